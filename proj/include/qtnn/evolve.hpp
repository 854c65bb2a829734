#pragma once

// Time evolution of the two-qubit register under the reduced spin-boson
// Hamiltonian
//
//   H_s = K_s (sx_A + sx_B) + eps_s (sz_A + sz_B) + J_s sz_A sz_B
//
// held constant over each slice of length dt. Units: hbar = 1, energies in meV
// and times in hbar/meV, so phases are energy * time.

#include "qtnn/errors.hpp"
#include "qtnn/linalg.hpp"
#include "qtnn/qstate.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace qtnn {

struct SliceParams {
  real K = 0.0;    // tunneling amplitude
  real eps = 0.0;  // applied field
  real J = 0.0;    // zz coupling, off unless trained explicitly

  bool finite() const { return std::isfinite(K) && std::isfinite(eps) && std::isfinite(J); }
  friend bool operator==(const SliceParams&, const SliceParams&) = default;
};

/// Ordered per-slice parameters; slice 0 acts first.
class Schedule {
 public:
  Schedule(std::vector<SliceParams> slices, real dt) : slices_(std::move(slices)), dt_(dt) {
    if (!(dt_ > 0.0) || !std::isfinite(dt_)) throw std::invalid_argument("schedule dt must be positive");
    if (slices_.empty()) throw std::invalid_argument("schedule needs at least one slice");
    for (const auto& p : slices_)
      if (!p.finite()) throw std::invalid_argument("schedule contains non-finite parameters");
  }

  /// `n` slices with all parameters zero (identity evolution).
  static Schedule zeros(int n, real dt) { return Schedule(std::vector<SliceParams>(n), dt); }

  static Schedule uniform(int n, real dt, SliceParams p) {
    return Schedule(std::vector<SliceParams>(n, p), dt);
  }

  const std::vector<SliceParams>& slices() const noexcept { return slices_; }
  std::vector<SliceParams>& slices() noexcept { return slices_; }
  int size() const noexcept { return static_cast<int>(slices_.size()); }
  real dt() const noexcept { return dt_; }
  real total_time() const noexcept { return dt_ * static_cast<real>(slices_.size()); }

  friend bool operator==(const Schedule&, const Schedule&) = default;

 private:
  std::vector<SliceParams> slices_;
  real dt_;
};

inline Mat4 slice_hamiltonian(const SliceParams& p) {
  // Real symmetric in the computational basis.
  Eigen::Matrix4d h = Eigen::Matrix4d::Zero();
  // diagonal: eps (S_A + S_B) + J S_A S_B with S = +1 for bit 0
  for (int idx = 0; idx < 4; ++idx) {
    const real sa = (idx & 2) ? -1.0 : 1.0;
    const real sb = (idx & 1) ? -1.0 : 1.0;
    h(idx, idx) = p.eps * (sa + sb) + p.J * sa * sb;
  }
  // single bit flips on A (idx ^ 2) or B (idx ^ 1)
  for (int idx = 0; idx < 4; ++idx) {
    h(idx, idx ^ 2) += p.K;
    h(idx, idx ^ 1) += p.K;
  }
  return h.cast<cplx>();
}

/// Partial derivatives of the slice Hamiltonian with respect to (K, eps, J).
inline const std::array<Mat4, 3>& slice_hamiltonian_generators() {
  static const std::array<Mat4, 3> gens = {
      slice_hamiltonian({1.0, 0.0, 0.0}),
      slice_hamiltonian({0.0, 1.0, 0.0}),
      slice_hamiltonian({0.0, 0.0, 1.0}),
  };
  return gens;
}

/// exp(-i H dt) by exact Hermitian eigendecomposition.
inline Mat4 slice_unitary(const SliceParams& p, real dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("slice_unitary needs dt > 0");
  return hermitian_apply(slice_hamiltonian(p), [dt](real e) { return std::polar(1.0, -e * dt); });
}

namespace detail {

// sin(x)/x, accurate near zero
inline real sinc(real x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

}  // namespace detail

/// Slice unitary together with dU/dK, dU/deps, dU/dJ. Uses the divided
/// difference form of the derivative of a matrix function: with H = V diag(e) V^+,
/// dU = V (F o (V^+ dH V)) V^+ where F_jk = (f(e_j) - f(e_k)) / (e_j - e_k).
struct SliceJacobian {
  Mat4 unitary;
  std::array<Mat4, 3> d_unitary;
};

inline SliceJacobian slice_unitary_jacobian(const SliceParams& p, real dt) {
  Eigen::SelfAdjointEigenSolver<Mat4> es(slice_hamiltonian(p));
  const Mat4& v = es.eigenvectors();
  const auto& e = es.eigenvalues();

  Mat4 divided;
  for (int j = 0; j < 4; ++j) {
    for (int k = 0; k < 4; ++k) {
      // (f(a) - f(b)) / (a - b) for f(x) = exp(-i x dt), written without cancellation
      const real mean = 0.5 * (e(j) + e(k));
      const real half_gap = 0.5 * (e(j) - e(k)) * dt;
      divided(j, k) = -I_UNIT * dt * std::polar(1.0, -mean * dt) * detail::sinc(half_gap);
    }
  }

  SliceJacobian out;
  Vec4 phases;
  for (int k = 0; k < 4; ++k) phases(k) = std::polar(1.0, -e(k) * dt);
  out.unitary = v * phases.asDiagonal() * v.adjoint();
  const auto& gens = slice_hamiltonian_generators();
  for (int g = 0; g < 3; ++g) {
    const Mat4 rotated = v.adjoint() * gens[g] * v;
    out.d_unitary[g] = v * divided.cwiseProduct(rotated) * v.adjoint();
  }
  return out;
}

/// Full-interval propagator U_n ... U_2 U_1.
inline Mat4 propagator(const Schedule& s) {
  Mat4 g = Mat4::Identity();
  for (const auto& p : s.slices()) g = slice_unitary(p, s.dt()) * g;
  return g;
}

inline DensityMatrix evolve_density(const DensityMatrix& rho0, const Schedule& s) {
  const Mat4 g = propagator(s);
  return DensityMatrix::from_matrix(hermitian_part(g * rho0.matrix() * g.adjoint()), 10.0);
}

/// The 2x2 propagator of one qubit when J = 0 in every slice; then G = u (x) u.
inline Mat2 local_propagator(const Schedule& s) {
  Mat2 u = Mat2::Identity();
  for (const auto& p : s.slices()) {
    if (p.J != 0.0) throw std::invalid_argument("local_propagator requires J = 0 in every slice");
    // exp(-i dt (K sx + eps sz)) = cos(r dt) I - i sin(r dt) (K sx + eps sz) / r
    const real r = std::hypot(p.K, p.eps);
    Mat2 step = Mat2::Identity() * std::cos(r * s.dt());
    if (r > 0.0) step -= I_UNIT * std::sin(r * s.dt()) / r * (p.K * pauli::x() + p.eps * pauli::z());
    u = step * u;
  }
  return u;
}

// ---------------------------------------------------------------------------
// short-time (split) propagator and the explicit path sum

/// Single-qubit tunneling factor exp(-i K dt sx).
inline Mat2 tunneling_factor(real K, real dt) {
  Mat2 t;
  const real c = std::cos(K * dt);
  const cplx is = -I_UNIT * std::sin(K * dt);
  t << c, is, is, c;
  return t;
}

/// Diagonal phases exp(-i dt (eps (S_A + S_B) + J S_A S_B)) indexed by basis state.
inline Vec4 diagonal_factor(const SliceParams& p, real dt) {
  Vec4 d;
  for (int idx = 0; idx < 4; ++idx) {
    const real sa = (idx & 2) ? -1.0 : 1.0;
    const real sb = (idx & 1) ? -1.0 : 1.0;
    d(idx) = std::polar(1.0, -dt * (p.eps * (sa + sb) + p.J * sa * sb));
  }
  return d;
}

/// exp(-i dt (eps Sz + J zz)) . exp(-i dt K Sx): the tunneling factor acts
/// first, then the diagonal phases. Local error O(dt^2).
inline Mat4 split_slice_unitary(const SliceParams& p, real dt) {
  const Mat2 t = tunneling_factor(p.K, dt);
  return diagonal_factor(p, dt).asDiagonal() * kron(t, t);
}

inline Mat4 split_propagator(const Schedule& s) {
  Mat4 g = Mat4::Identity();
  for (const auto& p : s.slices()) g = split_slice_unitary(p, s.dt()) * g;
  return g;
}

/// Spin configuration of both qubits at one time boundary.
struct BasisLabel {
  int bit_a = 0;
  int bit_b = 0;

  int index() const { return 2 * bit_a + bit_b; }
  static BasisLabel from_index(int idx) { return {(idx >> 1) & 1, idx & 1}; }
  friend bool operator==(const BasisLabel&, const BasisLabel&) = default;
};

struct PathSumOptions {
  int max_slices = 12;
};

/// <fin| U_split,n ... U_split,1 |init> as an explicit sum over the 4^(n-1)
/// spin configurations at the interior slice boundaries. Each path weight is a
/// product of per-slice transfer elements d(c') t(c'_A, c_A) t(c'_B, c_B).
/// Paths are summed in configuration-index order.
inline cplx path_sum_amplitude(BasisLabel init, BasisLabel fin, const Schedule& s,
                               const PathSumOptions& opt = {}) {
  const int n = s.size();
  if (n > opt.max_slices)
    throw std::invalid_argument("path sum over " + std::to_string(n) + " slices exceeds the cap of " +
                                std::to_string(opt.max_slices));
  struct Transfer {
    Mat2 t;
    Vec4 d;
  };
  std::vector<Transfer> transfer;
  transfer.reserve(n);
  for (const auto& p : s.slices()) transfer.push_back({tunneling_factor(p.K, s.dt()), diagonal_factor(p, s.dt())});

  const int interior = n - 1;
  const std::uint64_t configs = std::uint64_t{1} << (2 * interior);
  cplx total = 0.0;
  for (std::uint64_t cfg = 0; cfg < configs; ++cfg) {
    cplx weight = 1.0;
    BasisLabel prev = init;
    for (int k = 0; k < n; ++k) {
      const BasisLabel next =
          (k == n - 1) ? fin : BasisLabel::from_index(static_cast<int>((cfg >> (2 * k)) & 3u));
      const auto& tr = transfer[k];
      weight *= tr.d(next.index()) * tr.t(next.bit_a, prev.bit_a) * tr.t(next.bit_b, prev.bit_b);
      prev = next;
    }
    total += weight;
  }
  return total;
}

/// Ising-type bond between neighbouring time slices, -(1/2) ln tan(K dt).
/// Diagnostic only; the path sum uses the raw propagator elements.
inline real ising_bond_strength(real K, real dt) {
  const real x = K * dt;
  if (!(x > 0.0) || !(x < PI / 2.0))
    throw DomainError("ising_bond_strength needs 0 < K*dt < pi/2, got " + std::to_string(x));
  return -0.5 * std::log(std::tan(x));
}

}  // namespace qtnn
