#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "qwalk/errors.hpp"

namespace qwalk {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;

// Operators here are built from rationals and square-root surds, so residuals
// sit near machine epsilon; 1e-10 leaves plenty of headroom.
inline constexpr double kDefaultTolerance = 1e-10;
inline constexpr double kUnitarityTolerance = 1e-12;

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "matrix shapes differ");
  }
  return max_abs(a - b);
}

inline bool is_square(const Matrix& m) { return m.rows() == m.cols(); }

inline bool is_hermitian(const Matrix& m, double tol) {
  return is_square(m) && max_abs(m - m.adjoint()) <= tol;
}

inline bool is_unitary(const Matrix& m, double tol) {
  if (!is_square(m)) return false;
  const auto n = m.rows();
  return max_abs(m.adjoint() * m - Matrix::Identity(n, n)) <= tol;
}

inline bool is_involution(const Matrix& m, double tol) {
  if (!is_square(m)) return false;
  const auto n = m.rows();
  return max_abs(m * m - Matrix::Identity(n, n)) <= tol;
}

inline Matrix direct_sum(std::span<const Matrix> blocks) {
  Eigen::Index n = 0;
  for (const auto& b : blocks) n += b.rows();
  Matrix out = Matrix::Zero(n, n);
  Eigen::Index offset = 0;
  for (const auto& b : blocks) {
    out.block(offset, offset, b.rows(), b.cols()) = b;
    offset += b.rows();
  }
  return out;
}

inline Matrix hadamard_gate() {
  Matrix h(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  h << s, s, s, -s;
  return h;
}

/// d-dimensional discrete Fourier transform. Not Hermitian for d >= 3, so it
/// is the standard example of a coin outside the reflection class.
inline Matrix fourier_matrix(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  Matrix f(n, n);
  const double pi = std::acos(-1.0);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      f(j, k) = std::polar(1.0 / std::sqrt(static_cast<double>(d)),
                           2.0 * pi * static_cast<double>(j * k) / static_cast<double>(d));
    }
  }
  return f;
}

}  // namespace qwalk
