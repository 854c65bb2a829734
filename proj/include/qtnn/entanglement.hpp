#pragma once

// Entanglement oracles used to generate targets and cross-check the network:
// concurrence, entanglement entropy, the relative-entropy and Bures distances,
// nearest pure product state, and the partial-transpose test.
//
// Logarithms are base 2 unless a LogBase of Nats is requested.

#include "qtnn/errors.hpp"
#include "qtnn/linalg.hpp"
#include "qtnn/qstate.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace qtnn {

enum class LogBase { Bits, Nats };

namespace detail {

inline real log_in(real x, LogBase base) { return base == LogBase::Bits ? std::log2(x) : std::log(x); }

inline real entropy_of(const std::vector<real>& probs, LogBase base) {
  real s = 0.0;
  for (real p : probs)
    if (p > EIGEN_FLOOR) s -= p * log_in(p, base);
  return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// concurrence

/// Square root of rho with eigenvalues below EIGEN_FLOOR set to zero.
inline Mat4 floored_sqrt(const DensityMatrix& rho) {
  return hermitian_apply(rho.matrix(), [](real x) { return cplx(x < EIGEN_FLOOR ? 0.0 : std::sqrt(x)); });
}

/// Wootters concurrence. The lambda_i are the square roots of the eigenvalues of
/// rho (sy sy) conj(rho) (sy sy), taken here as the singular values of
/// sqrt(rho) sqrt(rho~). Working with square roots avoids amplifying round-off
/// in the null space of rank-deficient states; eigenvalues of rho below
/// EIGEN_FLOOR count as zero.
inline real concurrence(const DensityMatrix& rho) {
  const Mat4 root = floored_sqrt(rho);
  const Mat4 root_flipped = yy_operator() * root.conjugate() * yy_operator();
  Eigen::JacobiSVD<Mat4> svd(root * root_flipped);
  const auto& lam = svd.singularValues();  // descending
  return std::max(0.0, lam(0) - lam(1) - lam(2) - lam(3));
}

// ---------------------------------------------------------------------------
// reduced states and entropy

/// Partial trace over qubit B.
inline Mat2 reduced_a(const Mat4& rho) {
  Mat2 r;
  for (int a = 0; a < 2; ++a)
    for (int ap = 0; ap < 2; ++ap) r(a, ap) = rho(2 * a, 2 * ap) + rho(2 * a + 1, 2 * ap + 1);
  return r;
}

/// Partial trace over qubit A.
inline Mat2 reduced_b(const Mat4& rho) {
  Mat2 r;
  for (int b = 0; b < 2; ++b)
    for (int bp = 0; bp < 2; ++bp) r(b, bp) = rho(b, bp) + rho(2 + b, 2 + bp);
  return r;
}

/// Largest eigenvalue of the reduced state, i.e. the largest squared Schmidt
/// coefficient for a pure input.
inline real max_schmidt_weight(const Amplitudes& psi) {
  const Mat4 rho = psi.vec() * psi.vec().adjoint();
  Eigen::SelfAdjointEigenSolver<Mat2> es(hermitian_part(reduced_a(rho)));
  return es.eigenvalues()(1);
}

/// von Neumann entropy of the reduced state of a pure input.
inline real entanglement_entropy(const Amplitudes& psi, LogBase base = LogBase::Bits) {
  const Mat4 rho = psi.vec() * psi.vec().adjoint();
  Eigen::SelfAdjointEigenSolver<Mat2> es(hermitian_part(reduced_a(rho)));
  return detail::entropy_of({es.eigenvalues()(0), es.eigenvalues()(1)}, base);
}

/// Overload for callers holding a density matrix: it must be rank one.
inline real entanglement_entropy(const DensityMatrix& rho, LogBase base = LogBase::Bits) {
  const auto psi = as_pure(rho);
  if (!psi) throw InvalidState("entanglement_entropy requires a pure state");
  return entanglement_entropy(*psi, base);
}

inline real von_neumann_entropy(const DensityMatrix& rho, LogBase base = LogBase::Bits) {
  const Eigen::Vector4d ev = hermitian_eigenvalues(rho.matrix());
  return detail::entropy_of({ev(0), ev(1), ev(2), ev(3)}, base);
}

// ---------------------------------------------------------------------------
// distances

/// Tr[rho*(log rho* - log rho)]. Infinite when rho* has weight outside the
/// support of rho (eigenvalues of rho below EIGEN_FLOOR count as zero).
inline real relative_entropy(const DensityMatrix& rho_star, const DensityMatrix& rho,
                             LogBase base = LogBase::Bits) {
  Eigen::SelfAdjointEigenSolver<Mat4> es(rho.matrix());
  const Mat4& v = es.eigenvectors();
  const Mat4 in_basis = v.adjoint() * rho_star.matrix() * v;  // rho* in rho's eigenbasis

  real cross = 0.0;  // -Tr[rho* log rho]
  for (int k = 0; k < 4; ++k) {
    const real weight = in_basis(k, k).real();
    const real lambda = es.eigenvalues()(k);
    if (lambda <= EIGEN_FLOOR) {
      if (weight > EIGEN_FLOOR) return std::numeric_limits<real>::infinity();
      continue;
    }
    cross -= weight * detail::log_in(lambda, base);
  }
  return std::max(0.0, cross - von_neumann_entropy(rho_star, base));
}

/// Uhlmann fidelity F = (Tr sqrt(sqrt(rho) rho* sqrt(rho)))^2.
inline real fidelity(const DensityMatrix& rho_star, const DensityMatrix& rho) {
  // Tr sqrt(sqrt(b) a sqrt(b)) is the trace norm of sqrt(a) sqrt(b)
  Eigen::JacobiSVD<Mat4> svd(floored_sqrt(rho_star) * floored_sqrt(rho));
  const real tr = svd.singularValues().sum();
  return std::min(1.0, tr * tr);
}

/// Bures distance 2 - 2 sqrt(F), in [0, 2].
inline real bures_distance(const DensityMatrix& rho_star, const DensityMatrix& rho) {
  return std::max(0.0, 2.0 - 2.0 * std::sqrt(fidelity(rho_star, rho)));
}

// ---------------------------------------------------------------------------
// partial transpose

inline Mat4 partial_transpose_b(const Mat4& rho) {
  Mat4 out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int ap = 0; ap < 2; ++ap)
        for (int bp = 0; bp < 2; ++bp) out(2 * a + b, 2 * ap + bp) = rho(2 * a + bp, 2 * ap + b);
  return out;
}

inline real partial_transpose_min_eigenvalue(const DensityMatrix& rho) {
  return hermitian_eigenvalues(hermitian_part(partial_transpose_b(rho.matrix()))).minCoeff();
}

/// Positive partial transpose; for two qubits this is exactly separability.
inline bool ppt_separable(const DensityMatrix& rho) { return partial_transpose_min_eigenvalue(rho) >= -1e-10; }

// ---------------------------------------------------------------------------
// nearest pure product state

/// Bloch angles of a product state:
/// (cos(thA/2)|0> + e^{i phA} sin(thA/2)|1>) (x) (same for B).
struct ProductStateParams {
  real theta_a = 0.0;
  real phi_a = 0.0;
  real theta_b = 0.0;
  real phi_b = 0.0;

  static Vec2 qubit(real theta, real phi) {
    Vec2 v;
    v << std::cos(0.5 * theta), std::polar(std::sin(0.5 * theta), phi);
    return v;
  }

  /// Angles of a single-qubit vector, with the global phase removed.
  static std::pair<real, real> angles_of(const Vec2& v) {
    const real n = v.norm();
    const real c = std::abs(v(0)) / n;
    const real s = std::abs(v(1)) / n;
    const real theta = 2.0 * std::atan2(s, c);
    real phi = (s > 0.0 && c > 0.0) ? std::arg(v(1)) - std::arg(v(0)) : 0.0;
    phi = std::fmod(phi, 2.0 * PI);
    if (phi < 0.0) phi += 2.0 * PI;
    return {theta, phi};
  }

  Vec4 ket() const { return kron(qubit(theta_a, phi_a), qubit(theta_b, phi_b)); }
  DensityMatrix density() const { return density_from_pure(normalize_vector(ket())); }
};

enum class Metric { Concurrence, EntropyBits, RelativeEntropyBits, Bures };

inline const char* metric_name(Metric m) {
  switch (m) {
    case Metric::Concurrence: return "concurrence";
    case Metric::EntropyBits: return "entropy_bits";
    case Metric::RelativeEntropyBits: return "relative_entropy_bits";
    case Metric::Bures: return "bures";
  }
  return "?";
}

struct OracleResult {
  real value = 0.0;
  Metric metric = Metric::Bures;
  std::optional<ProductStateParams> witness;
  bool infinite = false;
  /// Relative entropy to the witness mixed with I/4 at weight SMOOTHING; set only
  /// for the relative-entropy metric.
  std::optional<real> smoothed;
};

struct NearestProductOptions {
  int starts = 32;
  real param_tol = 1e-9;
  int max_sweeps = 10000;
  /// Weight of I/4 mixed into the witness for the smoothed relative entropy.
  real smoothing = 1e-6;
};

namespace detail {

// Top eigenvector of a 2x2 Hermitian matrix.
inline Vec2 top_eigenvector(const Mat2& m) {
  Eigen::SelfAdjointEigenSolver<Mat2> es(0.5 * (m + m.adjoint()));
  return es.eigenvectors().col(1);
}

// <a b| rho |a b>
inline real product_overlap(const Mat4& rho, const Vec2& a, const Vec2& b) {
  const Vec4 k = kron(a, b);
  return (k.adjoint() * rho * k)(0, 0).real();
}

// Effective 2x2 operator on A with B fixed: <b|rho|b> contracted on qubit B.
inline Mat2 contract_b(const Mat4& rho, const Vec2& b) {
  Mat2 out;
  for (int a = 0; a < 2; ++a)
    for (int ap = 0; ap < 2; ++ap) {
      cplx acc = 0.0;
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) acc += std::conj(b(x)) * rho(2 * a + x, 2 * ap + y) * b(y);
      out(a, ap) = acc;
    }
  return out;
}

inline Mat2 contract_a(const Mat4& rho, const Vec2& a) {
  Mat2 out;
  for (int b = 0; b < 2; ++b)
    for (int bp = 0; bp < 2; ++bp) {
      cplx acc = 0.0;
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) acc += std::conj(a(x)) * rho(2 * x + b, 2 * y + bp) * a(y);
      out(b, bp) = acc;
    }
  return out;
}

struct ProductCandidate {
  real overlap = -1.0;
  ProductStateParams params;
};

// Maximize <ab|rho|ab> by alternating exact maximization over each qubit (each
// step solves a 2x2 eigenproblem, so the overlap never decreases). Stops when
// every Bloch angle moves by less than `tol` in a sweep.
inline ProductCandidate ascend_from(const Mat4& rho, ProductStateParams start, const NearestProductOptions& opt) {
  Vec2 a = ProductStateParams::qubit(start.theta_a, start.phi_a);
  Vec2 b = ProductStateParams::qubit(start.theta_b, start.phi_b);
  auto angles = [&] {
    const auto [ta, pa] = ProductStateParams::angles_of(a);
    const auto [tb, pb] = ProductStateParams::angles_of(b);
    return ProductStateParams{ta, pa, tb, pb};
  };
  auto angle_gap = [](real x, real y) {
    const real d = std::fmod(std::abs(x - y), 2.0 * PI);
    return std::min(d, 2.0 * PI - d);
  };
  ProductStateParams prev = angles();
  for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
    a = top_eigenvector(contract_b(rho, b));
    b = top_eigenvector(contract_a(rho, a));
    const ProductStateParams now = angles();
    // phi is undefined at the poles, so its change is weighted by sin(theta)
    const real move = std::max({std::abs(now.theta_a - prev.theta_a), std::abs(now.theta_b - prev.theta_b),
                                angle_gap(now.phi_a, prev.phi_a) * std::abs(std::sin(now.theta_a)),
                                angle_gap(now.phi_b, prev.phi_b) * std::abs(std::sin(now.theta_b))});
    prev = now;
    if (move < opt.param_tol) break;
  }
  return {product_overlap(rho, a, b), prev};
}

}  // namespace detail

/// Minimizes the chosen distance from rho* over pure product states. Both
/// distances are monotone in the overlap <ab|rho*|ab>, so the search maximizes
/// that overlap from a deterministic grid of starts on the angle torus; ties go
/// to the lowest start index.
inline OracleResult nearest_product(const DensityMatrix& rho_star, Metric metric,
                                    const NearestProductOptions& opt = {}) {
  if (metric != Metric::Bures && metric != Metric::RelativeEntropyBits)
    throw std::invalid_argument("nearest_product supports the bures and relative_entropy metrics");
  if (opt.starts < 1) throw std::invalid_argument("nearest_product needs at least one start");

  const Mat4& rho = rho_star.matrix();
  detail::ProductCandidate best;
  // 2 x 2 x 2 x 4 grid per 32 starts, offset so no start sits on a pole
  for (int s = 0; s < opt.starts; ++s) {
    const int i = s % 32;
    const real shift = static_cast<real>(s / 32) * 0.37;
    ProductStateParams start{PI * (0.25 + 0.5 * (i & 1)) + shift, 2.0 * PI * (0.125 + 0.25 * ((i >> 3) & 3)) + shift,
                             PI * (0.25 + 0.5 * ((i >> 1) & 1)) + shift, PI * (0.5 + ((i >> 2) & 1)) + shift};
    const auto cand = detail::ascend_from(rho, start, opt);
    if (cand.overlap > best.overlap + 1e-15) best = cand;
  }

  OracleResult out;
  out.metric = metric;
  out.witness = best.params;
  const DensityMatrix witness = best.params.density();
  if (metric == Metric::Bures) {
    out.value = bures_distance(rho_star, witness);
    return out;
  }

  // relative entropy against a rank-one candidate is finite only when rho* is
  // that very product state
  out.value = relative_entropy(rho_star, witness);
  out.infinite = std::isinf(out.value);
  const Mat4 smoothed = (1.0 - opt.smoothing) * witness.matrix() + opt.smoothing * 0.25 * Mat4::Identity();
  out.smoothed = relative_entropy(rho_star, DensityMatrix::from_matrix(smoothed));
  return out;
}

}  // namespace qtnn
