#pragma once

// Small dense complex linear algebra shared by every module: 2x2 / 4x4 types,
// Pauli operators in the two-qubit basis and spectral functions of Hermitian
// matrices.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qtnn {

using real = double;
using cplx = std::complex<double>;

using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Vec2 = Eigen::Vector2cd;
using Vec4 = Eigen::Vector4cd;

inline constexpr cplx I_UNIT{0.0, 1.0};
inline constexpr real PI = std::numbers::pi;

/// Eigenvalues below this are treated as exact zeros by logs, square roots and
/// support checks.
inline constexpr real EIGEN_FLOOR = 1e-12;

namespace pauli {

inline Mat2 id() { return Mat2::Identity(); }

inline Mat2 x() {
  Mat2 m;
  m << 0, 1, 1, 0;
  return m;
}

inline Mat2 y() {
  Mat2 m;
  m << 0, -I_UNIT, I_UNIT, 0;
  return m;
}

inline Mat2 z() {
  Mat2 m;
  m << 1, 0, 0, -1;
  return m;
}

}  // namespace pauli

/// Kronecker product a (x) b with `a` acting on qubit A (the left factor).
inline Mat4 kron(const Mat2& a, const Mat2& b) {
  Mat4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

inline Vec4 kron(const Vec2& a, const Vec2& b) {
  Vec4 out;
  out << a(0) * b(0), a(0) * b(1), a(1) * b(0), a(1) * b(1);
  return out;
}

inline const Mat4& zz_operator() {
  static const Mat4 op = kron(pauli::z(), pauli::z());
  return op;
}

inline const Mat4& yy_operator() {
  static const Mat4 op = kron(pauli::y(), pauli::y());
  return op;
}

inline real max_abs(const Mat4& m) { return m.cwiseAbs().maxCoeff(); }

/// Apply a scalar function to a Hermitian matrix through its eigendecomposition.
template <class Fn>
Mat4 hermitian_apply(const Mat4& h, Fn&& fn) {
  Eigen::SelfAdjointEigenSolver<Mat4> es(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("hermitian eigendecomposition failed");
  Vec4 mapped;
  for (int k = 0; k < 4; ++k) mapped(k) = fn(es.eigenvalues()(k));
  return es.eigenvectors() * mapped.asDiagonal() * es.eigenvectors().adjoint();
}

/// Principal square root of a positive semidefinite matrix; negative noise
/// eigenvalues are clipped to zero.
inline Mat4 psd_sqrt(const Mat4& h) {
  return hermitian_apply(h, [](real x) { return cplx(std::sqrt(std::max(x, 0.0))); });
}

inline Eigen::Vector4d hermitian_eigenvalues(const Mat4& h) {
  Eigen::SelfAdjointEigenSolver<Mat4> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

template <class Derived>
typename Derived::PlainObject hermitian_part(const Eigen::MatrixBase<Derived>& m) {
  return 0.5 * (m + m.adjoint());
}

}  // namespace qtnn
