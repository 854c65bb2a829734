#pragma once

// The network: an input state is evolved under the slice schedule and the
// output is the squared final-time correlation <sz_A sz_B>^2. The trainable
// weights are the per-slice (K, eps, J) values selected by a mask.

#include "qtnn/evolve.hpp"
#include "qtnn/qstate.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace qtnn {

enum class Param : int { K = 0, Eps = 1, J = 2 };
inline constexpr int PARAMS_PER_SLICE = 3;

inline const char* param_name(Param p) {
  switch (p) {
    case Param::K: return "K";
    case Param::Eps: return "eps";
    case Param::J: return "J";
  }
  return "?";
}

/// Per-parameter switches in slice-major order: (K_0, eps_0, J_0, K_1, ...).
class TrainableMask {
 public:
  TrainableMask() = default;
  explicit TrainableMask(std::vector<bool> bits) : bits_(std::move(bits)) {
    if (bits_.size() % PARAMS_PER_SLICE != 0)
      throw std::invalid_argument("mask length must be a multiple of 3");
  }

  /// Same switches in every slice.
  static TrainableMask per_slice(int slices, bool k, bool eps, bool j) {
    std::vector<bool> bits;
    for (int s = 0; s < slices; ++s) bits.insert(bits.end(), {k, eps, j});
    return TrainableMask(std::move(bits));
  }

  /// K and eps train, J stays fixed.
  static TrainableMask defaults(int slices) { return per_slice(slices, true, true, false); }

  bool operator()(int slice, Param p) const { return bits_.at(PARAMS_PER_SLICE * slice + static_cast<int>(p)); }
  const std::vector<bool>& bits() const noexcept { return bits_; }
  int size() const noexcept { return static_cast<int>(bits_.size()); }
  int count() const {
    int c = 0;
    for (bool b : bits_) c += b ? 1 : 0;
    return c;
  }
  friend bool operator==(const TrainableMask&, const TrainableMask&) = default;

 private:
  std::vector<bool> bits_;
};

struct NetworkWeights {
  Schedule schedule;
  TrainableMask mask;

  explicit NetworkWeights(Schedule s) : schedule(std::move(s)), mask(TrainableMask::defaults(schedule.size())) {}
  NetworkWeights(Schedule s, TrainableMask m) : schedule(std::move(s)), mask(std::move(m)) {
    if (mask.size() != PARAMS_PER_SLICE * schedule.size())
      throw std::invalid_argument("mask length does not match the parameter count");
  }

  /// Values of the unmasked parameters in slice-major order.
  std::vector<real> trainable_values() const {
    std::vector<real> out;
    for (int s = 0; s < schedule.size(); ++s)
      for (int g = 0; g < PARAMS_PER_SLICE; ++g)
        if (mask(s, Param(g))) out.push_back(get(s, Param(g)));
    return out;
  }

  void set_trainable_values(const std::vector<real>& values) {
    if (static_cast<int>(values.size()) != mask.count())
      throw std::invalid_argument("trainable value count does not match the mask");
    std::size_t i = 0;
    for (int s = 0; s < schedule.size(); ++s)
      for (int g = 0; g < PARAMS_PER_SLICE; ++g)
        if (mask(s, Param(g))) set(s, Param(g), values[i++]);
  }

  real get(int slice, Param p) const {
    const auto& sp = schedule.slices().at(slice);
    return p == Param::K ? sp.K : p == Param::Eps ? sp.eps : sp.J;
  }

  void set(int slice, Param p, real v) {
    auto& sp = schedule.slices().at(slice);
    (p == Param::K ? sp.K : p == Param::Eps ? sp.eps : sp.J) = v;
  }

  friend bool operator==(const NetworkWeights&, const NetworkWeights&) = default;
};

/// Input state with its desired output.
struct TrainingPair {
  std::string label;
  DensityMatrix state;
  real target = 0.0;

  TrainingPair(std::string l, DensityMatrix s, real t) : label(std::move(l)), state(std::move(s)), target(t) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("target for '" + label + "' must lie in [0, 1]");
  }
};

using Dataset = std::vector<TrainingPair>;

/// Final-time correlation <sz_A sz_B> for a precomputed propagator.
inline real final_correlation(const DensityMatrix& rho0, const Mat4& g) {
  return (zz_operator() * g * rho0.matrix() * g.adjoint()).trace().real();
}

inline real forward(const DensityMatrix& rho0, const NetworkWeights& w) {
  const real c = final_correlation(rho0, propagator(w.schedule));
  return c * c;
}

struct LossValue {
  real mse = 0.0;
  real rms = 0.0;
};

inline LossValue loss(const NetworkWeights& w, const Dataset& data) {
  if (data.empty()) throw std::invalid_argument("loss over an empty dataset");
  const Mat4 g = propagator(w.schedule);
  real acc = 0.0;
  for (const auto& pair : data) {
    const real c = final_correlation(pair.state, g);
    const real err = c * c - pair.target;
    acc += err * err;
  }
  const real mse = acc / static_cast<real>(data.size());
  return {mse, std::sqrt(mse)};
}

/// d(mse)/d(parameter) for every unmasked parameter, slice-major order.
struct GradientVector {
  std::vector<real> values;

  real norm() const {
    real s = 0.0;
    for (real v : values) s += v * v;
    return std::sqrt(s);
  }
  std::size_t size() const { return values.size(); }
  real operator[](std::size_t i) const { return values[i]; }
};

struct Analytic {};
struct CentralDifference {
  real h = 1e-5;
};
using GradientMethod = std::variant<Analytic, CentralDifference>;

namespace detail {

inline GradientVector analytic_gradient(const NetworkWeights& w, const Dataset& data) {
  const auto& slices = w.schedule.slices();
  const int n = w.schedule.size();
  const real dt = w.schedule.dt();

  std::vector<SliceJacobian> jac;
  jac.reserve(n);
  for (const auto& p : slices) jac.push_back(slice_unitary_jacobian(p, dt));

  // before[s] = U_{s-1} ... U_0, after[s] = U_{n-1} ... U_{s+1}
  std::vector<Mat4> before(n + 1), after(n + 1);
  before[0] = Mat4::Identity();
  for (int s = 0; s < n; ++s) before[s + 1] = jac[s].unitary * before[s];
  after[n - 1] = Mat4::Identity();
  for (int s = n - 1; s > 0; --s) after[s - 1] = after[s] * jac[s].unitary;
  const Mat4& g = before[n];

  // d(mse) = sum_pairs (2/N)(c^2 - t) 2c dc, dc = 2 Re Tr[ZZ dG rho G^+]
  // so the pair terms fold into one weighted operator W = sum coef * rho G^+ ZZ.
  Mat4 weighted = Mat4::Zero();
  const real inv_n = 1.0 / static_cast<real>(data.size());
  for (const auto& pair : data) {
    const real c = final_correlation(pair.state, g);
    const real coef = 2.0 * inv_n * (c * c - pair.target) * 2.0 * c * 2.0;
    weighted += coef * (pair.state.matrix() * g.adjoint() * zz_operator());
  }

  GradientVector out;
  for (int s = 0; s < n; ++s) {
    for (int p = 0; p < PARAMS_PER_SLICE; ++p) {
      if (!w.mask(s, Param(p))) continue;
      const Mat4 dg = after[s] * jac[s].d_unitary[p] * before[s];
      out.values.push_back((dg * weighted).trace().real());
    }
  }
  return out;
}

inline GradientVector difference_gradient(const NetworkWeights& w, const Dataset& data, real h) {
  if (!(h > 0.0)) throw std::invalid_argument("central difference step must be positive");
  GradientVector out;
  NetworkWeights probe = w;
  for (int s = 0; s < w.schedule.size(); ++s) {
    for (int p = 0; p < PARAMS_PER_SLICE; ++p) {
      if (!w.mask(s, Param(p))) continue;
      const real x = w.get(s, Param(p));
      probe.set(s, Param(p), x + h);
      const real up = loss(probe, data).mse;
      probe.set(s, Param(p), x - h);
      const real down = loss(probe, data).mse;
      probe.set(s, Param(p), x);
      out.values.push_back((up - down) / (2.0 * h));
    }
  }
  return out;
}

}  // namespace detail

inline GradientVector gradient(const NetworkWeights& w, const Dataset& data, GradientMethod method = Analytic{}) {
  if (data.empty()) throw std::invalid_argument("gradient over an empty dataset");
  if (std::holds_alternative<Analytic>(method)) return detail::analytic_gradient(w, data);
  return detail::difference_gradient(w, data, std::get<CentralDifference>(method).h);
}

}  // namespace qtnn
