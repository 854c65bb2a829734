// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "qtnn/qtnn.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <thread>
#include <vector>

using namespace qtnn;

namespace {

int failures = 0;

void report(int n, bool ok, const std::string& text) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", n, text.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

void note(const std::string& text) {
  std::printf("       %s\n", text.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

real max_abs_diff(const std::vector<real>& a, const std::vector<real>& b) {
  real worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

Schedule random_sched(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<real> u(-0.5, 0.5);
  std::vector<SliceParams> s(n);
  for (auto& p : s) p = {u(rng), u(rng), u(rng)};
  return Schedule(s, 2.5);
}

struct TrainArtifacts {
  TrainReport rep;
  std::string csv;  // history + outputs + weights
};

TrainArtifacts run_train() {
  TrainArtifacts a{train(table2_dataset(), TrainConfig{}), {}};
  a.csv = history_csv(a.rep) + outputs_csv(table2_dataset(), a.rep) + weights_to_yaml(a.rep.final_weights);
  return a;
}

std::vector<real> sweep_grid() {
  SweepSettings s;
  s.extra_points = "0.44,4/9";
  return sweep_points(s);
}

std::string run_baseline_csv(MlpTrainResult* out = nullptr, std::vector<LooFold>* folds_out = nullptr) {
  const MlpTrainResult res = mlp_train(mlp_table2_dataset(), MlpConfig{});
  const auto folds = loo_experiment(mlp_loo_pool(), MlpConfig{});
  const std::string csv = mlp_outputs_csv(mlp_table2_dataset(), mlp_eval(res.net, mlp_table2_dataset())) +
                          mlp_outputs_csv(mlp_table3_dataset(), mlp_eval(res.net, mlp_table3_dataset())) +
                          folds_csv(folds);
  if (out) *out = res;
  if (folds_out) *folds_out = folds;
  return csv;
}

std::string run_oracle_csv() {
  std::vector<OracleRow> rows;
  for (const char* n : {"bell", "epr", "flat", "C", "P", "M"}) rows.push_back(oracle_row(n));
  return oracle_csv(rows);
}

}  // namespace

int main() {
  const Dataset t2 = table2_dataset(), t3 = table3_dataset();

  // 1: training reproduction
  const TrainArtifacts first = run_train();
  const TrainReport& rep = first.rep;
  {
    const std::vector<real> want = {1.0, 0.0, 0.0, 0.44};
    const real err = max_abs_diff(rep.per_pair_outputs, want);
    const bool ok = rep.converged && rep.final_rms <= 1e-3 && rep.total_epochs <= 5000 && err <= 0.01;
    report(1, ok,
           fmt("train RMS %.3g after %d epochs (restart %d, %d epochs in total), outputs %.6f %.3g %.3g %.6f, "
               "max error %.3g (need RMS <= 1e-3, <= 5000 epochs, error <= 0.01)",
               rep.final_rms, rep.epochs_run, rep.restart_index, rep.total_epochs, rep.per_pair_outputs[0],
               rep.per_pair_outputs[1], rep.per_pair_outputs[2], rep.per_pair_outputs[3], err));
    TrainConfig zero;
    zero.init = InitKind::Zero;
    zero.max_epochs = 600;
    const TrainReport z = train(t2, zero);
    note(fmt("init is a random box of half-width %.0e around zero; exact zero weights give gradient norm %.1e "
             "and end %s at RMS %.4f",
             TrainConfig{}.init_box, gradient(NetworkWeights(Schedule::zeros(4, 2.5)), t2).norm(),
             status_name(z.status), z.final_rms));
  }

  // 2: generalization to the held-out set
  const Evaluation test_ev = evaluate(rep.final_weights, t3);
  {
    const std::vector<real> want = {1.0, 0.0, 0.0, 0.44, 0.0};
    const real err = max_abs_diff(test_ev.outputs, want);
    report(2, err <= 0.02 && test_ev.rms <= 0.02,
           fmt("outputs EPR %.6f, |00> %.3g, ket10_09_11 %.3g, P2 %.6f, M %.3g; max error %.3g, RMS %.3g "
               "(need <= 0.02 each)",
               test_ev.outputs[0], test_ev.outputs[1], test_ev.outputs[2], test_ev.outputs[3], test_ev.outputs[4],
               err, test_ev.rms));
  }

  // 3: zero-weight forward pass
  {
    const NetworkWeights zero(Schedule::zeros(4, 2.5));
    std::vector<real> out;
    for (const auto& p : t2) out.push_back(forward(p.state, zero));
    const real err = max_abs_diff(out, {1.0, 0.0, 0.36, 0.11});
    const real exact = max_abs_diff(out, {1.0, 0.0, 0.36, 1.0 / 9.0});
    const real near_zero_start = max_abs_diff(rep.initial_outputs, out);
    report(3, err <= 5e-3 && exact <= 1e-12 && near_zero_start <= 5e-3,
           fmt("zero weights give %.6f %.6f %.6f %.6f; vs (1, 0, 0.36, 0.11) error %.3g (need <= 5e-3); "
               "vs (1, 0, 0.36, 1/9) %.1e; training start differs by %.1e",
               out[0], out[1], out[2], out[3], err, exact, near_zero_start));
  }

  // 4: analytic solution K = 3 pi / 40
  {
    const real K = 3.0 * PI / 40.0;
    const NetworkWeights w(Schedule::uniform(4, 2.5, {K, 0.0, 0.0}));
    real worst = 0.0;
    for (const Dataset& d : {table2_dataset(4.0 / 9.0), table3_dataset(4.0 / 9.0)}) {
      const Evaluation ev = evaluate(w, d);
      for (std::size_t i = 0; i < d.size(); ++i) worst = std::max(worst, std::abs(ev.outputs[i] - d[i].target));
    }
    const real rotation = 2.0 * 4 * K * 2.5;
    const real reported = 2.0 * 4 * 0.236 * 2.5;
    const bool ok = worst <= 1e-9 && std::abs(rotation - 1.5 * PI) <= 1e-12 && std::abs(reported - 1.5 * PI) <= 0.5;
    report(4, ok,
           fmt("max |output - desired| %.2e (need <= 1e-9); total rotation %.6f vs 3pi/2 = %.6f; "
               "K = 0.236 averaged gives %.4f, off by %.4f rad (band 0.5)",
               worst, rotation, 1.5 * PI, reported, std::abs(reported - 1.5 * PI)));
    real trained_rot = 0.0;
    for (const auto& p : rep.final_weights.schedule.slices()) trained_rot += 2.0 * p.K * 2.5;
    note(fmt("trained schedule rotation sum 2 K dt = %.4f rad (eps and J also train, so not asserted)", trained_rot));
  }

  // 5: evolution engine
  {
    std::mt19937_64 rng(5);
    real path = 0.0;
    for (int n = 1; n <= 6; ++n)
      for (int k = 0; k < 3; ++k) {
        const Schedule s = random_sched(rng, n);
        const Mat4 g = split_propagator(s);
        for (int i = 0; i < 4; ++i)
          for (int f = 0; f < 4; ++f)
            path = std::max(path, std::abs(g(f, i) - path_sum_amplitude(BasisLabel::from_index(i),
                                                                       BasisLabel::from_index(f), s)));
      }
    real lo = 1e300, hi = 0.0;
    for (int k = 0; k < 8; ++k) {
      const real r = trotter_local_ratio(random_sched(rng, 1).slices()[0], 0.05);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    real unit = 0.0;
    for (int n : {1, 4, 16, 64}) {
      const Mat4 g = propagator(random_sched(rng, n));
      unit = std::max(unit, (g.adjoint() * g - Mat4::Identity()).cwiseAbs().maxCoeff());
    }
    report(5, path <= 1e-10 && lo >= 3.5 && hi <= 4.5 && unit <= 1e-11,
           fmt("path sum vs split product %.2e (need <= 1e-10, 1..6 slices, all 16 pairs); step-halving ratio "
               "%.4f..%.4f (need [3.5, 4.5]); unitarity residue %.2e (need <= 1e-11)",
               path, lo, hi, unit));
  }

  // 6: gradients
  {
    std::mt19937_64 rng(6);
    real worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      const NetworkWeights w(random_sched(rng, 4), TrainableMask::per_slice(4, true, true, true));
      const GradientVector a = gradient(w, t2, Analytic{});
      const GradientVector f = gradient(w, t2, CentralDifference{1e-5});
      real diff = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) diff += (a[i] - f[i]) * (a[i] - f[i]);
      worst = std::max(worst, std::sqrt(diff) / std::max(1.0, f.norm()));
    }
    const NetworkWeights sol(analytic_schedule(), TrainableMask::per_slice(4, true, true, true));
    const real at_sol = gradient(sol, table2_dataset(4.0 / 9.0)).norm();
    report(6, worst <= 1e-6 && at_sol <= 1e-8,
           fmt("analytic vs central difference, worst relative error %.2e over 20 seeds (need <= 1e-6); "
               "gradient norm at the analytic solution %.2e (need <= 1e-8)",
               worst, at_sol));
  }

  // 7: entanglement oracles
  {
    const real bures = nearest_product(catalog("bell"), Metric::Bures).value;
    const real rel = relative_entropy(catalog("bell"), catalog("M"));
    const std::vector<std::pair<std::string, real>> conc = {{"bell", 1.0}, {"epr", 1.0}, {"flat", 0.0},
                                                            {"C", 0.0},    {"P", 2.0 / 3.0}, {"M", 0.0}};
    const std::vector<real> corr = {1.0, -1.0, 0.0, 0.6, -1.0 / 3.0, 1.0};
    real wc = 0.0, wz = 0.0;
    int ppt_bad = 0;
    for (std::size_t i = 0; i < conc.size(); ++i) {
      const DensityMatrix rho = catalog(conc[i].first);
      const real c = concurrence(rho);
      wc = std::max(wc, std::abs(c - conc[i].second));
      wz = std::max(wz, std::abs(zz_correlation(rho) - corr[i]));
      if (ppt_separable(rho) != (conc[i].second == 0.0)) ++ppt_bad;
    }
    const real p_entropy = entanglement_entropy(*as_pure(catalog("P")));
    const real p_bures = nearest_product(catalog("P"), Metric::Bures).value;
    // P = (|01> + |10> + |11>)/sqrt3: Schmidt weights (1 +- sqrt5/3)/2
    const real lmax = 0.5 * (1.0 + std::sqrt(5.0) / 3.0), lmin = 1.0 - lmax;
    const real p_entropy_exact = -lmax * std::log2(lmax) - lmin * std::log2(lmin);
    const real p_bures_exact = 2.0 - 2.0 * std::sqrt(lmax);
    const bool ok = std::abs(bures - (2.0 - std::sqrt(2.0))) <= 1e-7 && std::abs(rel - 1.0) <= 1e-9 && wc <= 1e-9 &&
                    wz <= 1e-12 && ppt_bad == 0 && std::abs(p_entropy - p_entropy_exact) <= 1e-9 &&
                    std::abs(p_bures - p_bures_exact) <= 1e-7;
    report(7, ok,
           fmt("Bell Bures %.9f (2 - sqrt2 = %.9f); Bell vs M relative entropy %.12f bits; concurrence max error "
               "%.1e; correlation max error %.1e; PPT disagreements %d; P entropy %.6f bits, P Bures %.6f",
               bures, 2.0 - std::sqrt(2.0), rel, wc, wz, ppt_bad, p_entropy, p_bures));
  }

  // 8: target sweep
  const int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const std::vector<real> grid = sweep_grid();
  const std::vector<SweepRow> sweep = sweep_target("P", grid, t2, sweep_config(), threads);
  const std::string sweep_text = sweep_csv(sweep);
  {
    int grid_rows = 0, errors = 0;
    real at_044 = NAN, rms_49 = NAN;
    for (const auto& r : sweep) {
      errors += r.error.empty() ? 0 : 1;
      if (r.desired == 0.44) at_044 = r.trained;
      else if (r.desired == 4.0 / 9.0) rms_49 = r.rms;
      else ++grid_rows;
    }
    report(8, grid_rows == 19 && errors == 0 && std::abs(at_044 - 0.44) <= 0.01 && rms_49 <= 1e-6,
           fmt("%d grid rows plus 0.44 and 4/9, %d failed; trained at 0.44 = %.6f (need within 0.01); "
               "RMS at 4/9 = %.4e (need <= 1e-6); %zu-byte CSV",
               grid_rows, errors, at_044, rms_49, sweep_text.size()));
    for (const auto& r : sweep)
      note(fmt("desired %.4f  trained %.6f  rms %.2e  %s", r.desired, r.trained, r.rms, sweep_row_status(r).c_str()));
  }

  // 9: classical baseline contrast
  MlpTrainResult mlp{Mlp({4, 8, 1}, 0), {}, 0.0, false, false};
  std::vector<LooFold> folds;
  const std::string baseline_text = run_baseline_csv(&mlp, &folds);
  {
    const MlpEvaluation mlp_test = mlp_eval(mlp.net, mlp_table3_dataset());
    real loo = 0.0;
    bool all_trained = true;
    for (const auto& f : folds) {
      loo += f.abs_error / static_cast<real>(folds.size());
      all_trained = all_trained && f.trained;
    }
    // same four pure states for both networks
    Dataset pure(t3.begin(), t3.begin() + 4);
    const real qnn_rms = evaluate(rep.final_weights, pure).rms;
    const real gap = mlp_test.rms / qnn_rms;
    report(9, mlp.final_rms <= 1e-2 && mlp_test.rms >= 0.2 && loo >= 0.1 && all_trained && gap >= 10.0,
           fmt("MLP train RMS %.4f (need <= 1e-2); test RMS %.4f (need >= 0.2); leave-one-out mean error %.4f "
               "over %zu folds, all trained: %s (need >= 0.1); QNN test RMS %.2e on the same states, gap %.0fx "
               "(need >= 10x)",
               mlp.final_rms, mlp_test.rms, loo, folds.size(), all_trained ? "yes" : "no", qnn_rms, gap));
  }

  // 10: determinism
  {
    const bool train_same = run_train().csv == first.csv;
    const bool sweep_same = sweep_csv(sweep_target("P", grid, t2, sweep_config(), 1)) == sweep_text;
    const bool baseline_same = run_baseline_csv() == baseline_text;
    const bool oracle_same = run_oracle_csv() == run_oracle_csv();
    report(10, train_same && sweep_same && baseline_same && oracle_same,
           fmt("byte-identical repeats: train %s, sweep (%d threads vs 1) %s, baseline %s, oracle %s",
               train_same ? "yes" : "no", threads, sweep_same ? "yes" : "no", baseline_same ? "yes" : "no",
               oracle_same ? "yes" : "no"));
  }

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
