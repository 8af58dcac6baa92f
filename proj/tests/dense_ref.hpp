#pragma once

// Independent dense reference for the low-level algebra tests: built straight
// from 2x2 matrices and Kronecker products, with no dependence on the library
// encodings it is used to check.

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace dense_ref {

inline Eigen::Matrix2cd sigma(char c) {
  const std::complex<double> i(0.0, 1.0);
  Eigen::Matrix2cd m;
  switch (c) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, -i, i, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("dense_ref::sigma: bad label");
  }
  return m;
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  return out;
}

// Site 0 is the most significant factor.
inline Eigen::MatrixXcd from_labels(const std::string& labels, double sign = 1.0) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1) * sign;
  for (char c : labels) m = kron(m, sigma(c));
  return m;
}

}  // namespace dense_ref
