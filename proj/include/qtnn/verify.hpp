#pragma once

// Self-check suite behind `qtnn verify`: engine equivalences, gradient checks
// and closed-form oracle values, each reported as measured vs tolerated.

#include "qtnn/entanglement.hpp"
#include "qtnn/train.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace qtnn {

struct CheckResult {
  std::string name;
  real measured = 0.0;
  std::string tolerance;  // human-readable bound, e.g. "<= 1e-11"
  bool passed = false;
};

/// Deliberate defects for exercising the checker itself.
struct VerifyFaults {
  /// Flip the time-step sign when building the backward propagator.
  bool dt_sign_flip = false;
};

inline Schedule random_schedule(std::mt19937_64& rng, int slices, real dt, real box = 0.5) {
  std::uniform_real_distribution<real> unif(-box, box);
  std::vector<SliceParams> s(slices);
  for (auto& p : s) {
    p.K = unif(rng);
    p.eps = unif(rng);
    p.J = unif(rng);
  }
  return Schedule(std::move(s), dt);
}

/// ||U_split(dt) - U(dt)|| / ||U_split(dt/2) - U(dt/2)|| for one slice. The
/// split has an O(dt^2) local error, so the ratio tends to 4.
inline real trotter_local_ratio(const SliceParams& p, real dt) {
  const real e1 = (split_slice_unitary(p, dt) - slice_unitary(p, dt)).norm();
  const real e2 = (split_slice_unitary(p, 0.5 * dt) - slice_unitary(p, 0.5 * dt)).norm();
  return e1 / e2;
}

/// Largest |<f|G_split|i> - path sum| over all 16 basis pairs.
inline real path_sum_deviation(const Schedule& s) {
  const Mat4 g = split_propagator(s);
  real worst = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int f = 0; f < 4; ++f)
      worst = std::max(worst, std::abs(g(f, i) - path_sum_amplitude(BasisLabel::from_index(i),
                                                                     BasisLabel::from_index(f), s)));
  return worst;
}

/// max(|G^+ G - I|, |G_back G - I|) where G_back evolves backwards slice by slice.
inline real unitarity_residue(const Schedule& s, const VerifyFaults& faults = {}) {
  const Mat4 g = propagator(s);
  const real back_dt = faults.dt_sign_flip ? -s.dt() : s.dt();
  Mat4 back = Mat4::Identity();
  for (auto it = s.slices().rbegin(); it != s.slices().rend(); ++it)
    back = hermitian_apply(slice_hamiltonian(*it), [back_dt](real e) { return std::polar(1.0, e * back_dt); }) * back;
  const Mat4 id = Mat4::Identity();
  return std::max(max_abs(g.adjoint() * g - id), max_abs(back * g - id));
}

/// ||analytic - central difference|| / max(1, ||central difference||).
inline real gradient_relative_error(const NetworkWeights& w, const Dataset& data) {
  const GradientVector a = gradient(w, data, Analytic{});
  const GradientVector f = gradient(w, data, CentralDifference{1e-5});
  real diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) diff += (a[i] - f[i]) * (a[i] - f[i]);
  return std::sqrt(diff) / std::max(1.0, f.norm());
}

/// Datasets with P's target set to 4/9, which the analytic schedule fits exactly.
inline Dataset table2_exact() { return table2_dataset(4.0 / 9.0); }
inline Dataset table3_exact() { return table3_dataset(4.0 / 9.0); }

inline std::vector<CheckResult> run_verify(const VerifyFaults& faults = {}) {
  std::vector<CheckResult> out;
  auto upper = [&](std::string name, real measured, real tol) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "<= %.0e", tol);
    out.push_back({std::move(name), measured, buf, measured <= tol});
  };
  auto near = [&](std::string name, real measured, real expected, real tol) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g +- %.0e", expected, tol);
    out.push_back({std::move(name), measured, buf, std::abs(measured - expected) <= tol});
  };

  std::mt19937_64 rng(20260101);

  {
    real worst = 0.0;
    for (int k = 0; k < 4; ++k) worst = std::max(worst, unitarity_residue(random_schedule(rng, 4, 2.5), faults));
    upper("unitarity (4 random schedules)", worst, 1e-11);
  }
  {
    real worst = 0.0;
    for (int n : {3, 4, 5, 6}) worst = std::max(worst, path_sum_deviation(random_schedule(rng, n, 2.5)));
    upper("path sum vs split product (4 random schedules)", worst, 1e-10);
  }
  {
    real lo = 1e300, hi = -1e300;
    for (int k = 0; k < 4; ++k) {
      const real r = trotter_local_ratio(random_schedule(rng, 1, 1.0).slices()[0], 0.05);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    out.push_back({"trotter step-halving ratio, min", lo, "in [3.5, 4.5]", lo >= 3.5 && lo <= 4.5});
    out.push_back({"trotter step-halving ratio, max", hi, "in [3.5, 4.5]", hi >= 3.5 && hi <= 4.5});
  }
  {
    const Dataset data = table2_dataset();
    real worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      NetworkWeights w(random_schedule(rng, 4, 2.5), TrainableMask::per_slice(4, true, true, true));
      worst = std::max(worst, gradient_relative_error(w, data));
    }
    upper("analytic vs central-difference gradient (20 seeds)", worst, 1e-6);
  }
  {
    const NetworkWeights w(analytic_schedule(), TrainableMask::per_slice(4, true, true, true));
    upper("gradient norm at the analytic solution", gradient(w, table2_exact()).norm(), 1e-8);
    real worst = 0.0;
    for (const Dataset& d : {table2_exact(), table3_exact()}) {
      const Evaluation ev = evaluate(w, d);
      for (std::size_t i = 0; i < d.size(); ++i) worst = std::max(worst, std::abs(ev.outputs[i] - d[i].target));
    }
    upper("analytic solution vs desired outputs", worst, 1e-9);
  }
  {
    near("bell bures to nearest product", nearest_product(catalog("bell"), Metric::Bures).value, 2.0 - std::sqrt(2.0),
         1e-7);
    near("relative entropy bell vs M (bits)", relative_entropy(catalog("bell"), catalog("M")), 1.0, 1e-9);
    const std::vector<std::pair<std::string, real>> conc = {{"bell", 1.0}, {"epr", 1.0}, {"flat", 0.0},
                                                            {"C", 0.0},    {"P", 2.0 / 3.0}, {"M", 0.0}};
    real worst_c = 0.0;
    for (const auto& [n, v] : conc) worst_c = std::max(worst_c, std::abs(concurrence(catalog(n)) - v));
    upper("concurrence closed forms, max error", worst_c, 1e-9);
    const std::vector<std::pair<std::string, real>> corr = {{"bell", 1.0}, {"epr", -1.0}, {"flat", 0.0},
                                                            {"C", 0.6},    {"P", -1.0 / 3.0}, {"M", 1.0}};
    real worst_z = 0.0;
    for (const auto& [n, v] : corr) worst_z = std::max(worst_z, std::abs(zz_correlation(catalog(n)) - v));
    upper("classical correlation closed forms, max error", worst_z, 1e-12);
    int mismatches = 0;
    for (const auto& n : catalog_names()) {
      const DensityMatrix rho = catalog(n);
      if (ppt_separable(rho) != (concurrence(rho) < 1e-9)) ++mismatches;
    }
    upper("ppt vs concurrence-zero disagreements", mismatches, 0.0);
  }
  return out;
}

}  // namespace qtnn
