#pragma once

#include <Eigen/Dense>

namespace ctdvp {

// Matrix-free Hermitian linear map contract shared by the effective
// operators and the dense-reference Hamiltonian applier.
struct LinearMap {
  virtual ~LinearMap() = default;
  virtual Eigen::Index dim() const = 0;
  virtual void apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const = 0;

  Eigen::VectorXcd operator()(const Eigen::VectorXcd& in) const {
    Eigen::VectorXcd out;
    apply(in, out);
    return out;
  }
};

}  // namespace ctdvp
