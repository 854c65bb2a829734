#pragma once

// Full-batch gradient descent over the slice parameters, the canonical
// training/testing sets and the target sweep for the partially entangled state.

#include "qtnn/qnn.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <future>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace qtnn {

enum class InitKind { Zero, Explicit, Random, Analytic };

inline const char* init_name(InitKind k) {
  switch (k) {
    case InitKind::Zero: return "zero";
    case InitKind::Explicit: return "explicit";
    case InitKind::Random: return "random";
    case InitKind::Analytic: return "analytic";
  }
  return "?";
}

/// Uniform tunneling that rotates both qubits by 3 pi / 2 about x over the run,
/// K = 3 pi / (4 * total_time). Maps the sz sz measurement onto sy sy.
inline Schedule analytic_schedule(int slices = 4, real dt = 2.5) {
  const real K = 3.0 * PI / (4.0 * slices * dt);
  return Schedule::uniform(slices, dt, {K, 0.0, 0.0});
}

struct TrainConfig {
  real learning_rate = 1.0;
  int max_epochs = 5000;
  real rms_stop = 1e-4;

  /// Exact zero weights are a stationary point of the loss for real-amplitude
  /// inputs, so descent starts from a small random box around zero instead.
  InitKind init = InitKind::Random;
  std::optional<Schedule> explicit_init;  // for InitKind::Explicit
  real init_box = 1e-3;                   // half-width (meV) for InitKind::Random
  std::uint64_t seed = 0;

  int slices = 4;
  real dt = 2.5;
  bool train_k = true;
  bool train_eps = true;
  bool train_j = true;

  /// Halve the rate and retry whenever a step would raise the loss.
  bool backtracking = true;
  /// Rate multiplier after an accepted step, capped at `learning_rate`.
  real lr_growth = 1.1;

  /// Plateau stop: end a run when RMS fell by less than `stall_tol` (relative)
  /// over the last `stall_window` epochs. 0 disables.
  int stall_window = 500;
  real stall_tol = 1e-3;

  /// Independent runs from seeds seed, seed + 1, ... (random init only). The
  /// first run that converges wins, otherwise the lowest final RMS.
  int restarts = 32;

  GradientMethod gradient = Analytic{};
};

/// Tighter stopping used for the target sweep.
inline TrainConfig sweep_config(TrainConfig cfg = {}) {
  cfg.rms_stop = 1e-6;
  cfg.max_epochs = 20000;
  return cfg;
}

inline NetworkWeights initial_weights(const TrainConfig& cfg) {
  const TrainableMask mask = TrainableMask::per_slice(cfg.slices, cfg.train_k, cfg.train_eps, cfg.train_j);
  switch (cfg.init) {
    case InitKind::Zero: return NetworkWeights(Schedule::zeros(cfg.slices, cfg.dt), mask);
    case InitKind::Analytic: return NetworkWeights(analytic_schedule(cfg.slices, cfg.dt), mask);
    case InitKind::Explicit: {
      if (!cfg.explicit_init) throw std::invalid_argument("explicit init requested without weights");
      const Schedule& s = *cfg.explicit_init;
      return NetworkWeights(s, TrainableMask::per_slice(s.size(), cfg.train_k, cfg.train_eps, cfg.train_j));
    }
    case InitKind::Random: {
      std::mt19937_64 rng(cfg.seed);
      std::uniform_real_distribution<real> unif(-cfg.init_box, cfg.init_box);
      std::vector<SliceParams> slices(cfg.slices);
      // Only trainable parameters are randomized; fixed ones stay at zero.
      for (auto& p : slices) {
        const real k = unif(rng), e = unif(rng), j = unif(rng);
        p.K = cfg.train_k ? k : 0.0;
        p.eps = cfg.train_eps ? e : 0.0;
        p.J = cfg.train_j ? j : 0.0;
      }
      return NetworkWeights(Schedule(std::move(slices), cfg.dt), mask);
    }
  }
  throw std::logic_error("unhandled init kind");
}

enum class TrainStatus { Converged, MaxEpochs, Stalled, Diverged };

inline const char* status_name(TrainStatus s) {
  switch (s) {
    case TrainStatus::Converged: return "converged";
    case TrainStatus::MaxEpochs: return "max_epochs";
    case TrainStatus::Stalled: return "stalled";
    case TrainStatus::Diverged: return "diverged";
  }
  return "?";
}

struct TrainReport {
  std::vector<real> rms_history;  // RMS at the start of each epoch
  NetworkWeights initial_weights;
  NetworkWeights final_weights;
  std::vector<real> initial_outputs;
  std::vector<real> per_pair_outputs;  // at final_weights
  real final_rms = 0.0;
  int epochs_run = 0;
  bool converged = false;
  TrainStatus status = TrainStatus::MaxEpochs;
  int restart_index = 0;  // which restart produced this report
  int restarts_run = 1;
  int total_epochs = 0;  // summed over every restart
};

struct Evaluation {
  std::vector<real> outputs;
  real rms = 0.0;
};

inline Evaluation evaluate(const NetworkWeights& w, const Dataset& data) {
  Evaluation ev;
  const Mat4 g = propagator(w.schedule);
  real acc = 0.0;
  for (const auto& pair : data) {
    const real c = final_correlation(pair.state, g);
    ev.outputs.push_back(c * c);
    acc += (c * c - pair.target) * (c * c - pair.target);
  }
  ev.rms = data.empty() ? 0.0 : std::sqrt(acc / static_cast<real>(data.size()));
  return ev;
}

namespace detail {

inline TrainReport train_once(const Dataset& data, const TrainConfig& cfg) {
  NetworkWeights w = initial_weights(cfg);
  TrainReport rep{{}, w, w, evaluate(w, data).outputs, {}, 0.0, 0, false, TrainStatus::MaxEpochs};

  real lr = cfg.learning_rate;
  LossValue current = loss(w, data);
  const real initial_rms = current.rms;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    rep.rms_history.push_back(current.rms);
    rep.epochs_run = epoch + 1;
    if (current.rms <= cfg.rms_stop) {
      rep.converged = true;
      rep.status = TrainStatus::Converged;
      break;
    }
    if (!std::isfinite(current.rms) || current.rms > 10.0 * initial_rms) {
      rep.status = TrainStatus::Diverged;
      break;
    }
    if (cfg.stall_window > 0 && epoch >= cfg.stall_window) {
      const real past = rep.rms_history[epoch - cfg.stall_window];
      if (past - current.rms < cfg.stall_tol * past) {
        rep.status = TrainStatus::Stalled;
        break;
      }
    }

    const GradientVector grad = gradient(w, data, cfg.gradient);
    const std::vector<real> x = w.trainable_values();
    std::vector<real> trial(x.size());
    NetworkWeights candidate = w;
    LossValue next{};
    for (int attempt = 0;; ++attempt) {
      for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] - lr * grad[i];
      candidate.set_trainable_values(trial);
      next = loss(candidate, data);
      if (!cfg.backtracking || next.mse <= current.mse || attempt >= 60) break;
      lr *= 0.5;
    }
    w = std::move(candidate);
    current = next;
    if (cfg.backtracking) lr = std::min(lr * cfg.lr_growth, cfg.learning_rate);
  }

  rep.final_weights = w;
  const Evaluation ev = evaluate(w, data);
  rep.per_pair_outputs = ev.outputs;
  rep.final_rms = ev.rms;
  return rep;
}

}  // namespace detail

inline TrainReport train(const Dataset& data, const TrainConfig& cfg) {
  if (data.empty()) throw std::invalid_argument("training needs at least one pair");
  if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (cfg.max_epochs < 0) throw std::invalid_argument("max_epochs must be non-negative");
  if (!(cfg.rms_stop >= 0.0)) throw std::invalid_argument("rms_stop must be non-negative");
  if (cfg.restarts < 1) throw std::invalid_argument("restarts must be at least 1");

  const int runs = cfg.init == InitKind::Random ? cfg.restarts : 1;
  std::optional<TrainReport> best;
  TrainConfig attempt = cfg;
  int total = 0;
  for (int r = 0; r < runs; ++r) {
    attempt.seed = cfg.seed + static_cast<std::uint64_t>(r);
    TrainReport rep = detail::train_once(data, attempt);
    rep.restart_index = r;
    total += rep.epochs_run;
    const bool done = rep.converged;
    if (!best || rep.final_rms < best->final_rms || done) best = std::move(rep);
    best->restarts_run = r + 1;
    best->total_epochs = total;
    if (done) break;
  }
  return *best;
}

// ---------------------------------------------------------------------------
// canonical datasets

/// Target used for the partially entangled state P in the canonical set.
inline constexpr real P_TARGET = 0.44;

inline TrainingPair catalog_pair(const std::string& name, real target, const CatalogParams& p = {}) {
  return TrainingPair(canonical_name(name), catalog(name, p), target);
}

/// Bell(0) -> 1, flat -> 0, C(0.5) -> 0, P -> p_target.
inline Dataset table2_dataset(real p_target = P_TARGET) {
  return {catalog_pair("bell", 1.0), catalog_pair("flat", 0.0), catalog_pair("C", 0.0, {0.5, 0.0}),
          catalog_pair("P", p_target)};
}

/// EPR -> 1, |00> -> 0, |10> + 0.9|11> -> 0, P2 -> p_target, M -> 0.
inline Dataset table3_dataset(real p_target = P_TARGET) {
  return {catalog_pair("epr", 1.0), catalog_pair("ket00", 0.0), catalog_pair("ket10_09_11", 0.0),
          catalog_pair("P2", p_target), catalog_pair("M", 0.0)};
}

// ---------------------------------------------------------------------------
// target sweep

struct SweepRow {
  real desired = 0.0;
  real trained = 0.0;
  real rms = 0.0;
  TrainStatus status = TrainStatus::MaxEpochs;
  std::string error;  // non-empty if training threw
};

/// Retrains from cfg.init for every grid value with the pivot's target replaced.
/// Points are independent; with threads > 1 they run on a small worker pool and
/// results are merged by grid index, so the output does not depend on scheduling.
inline std::vector<SweepRow> sweep_target(const std::string& pivot, const std::vector<real>& targets,
                                          const Dataset& base_data, const TrainConfig& cfg, int threads = 1) {
  std::size_t pivot_idx = base_data.size();
  for (std::size_t i = 0; i < base_data.size(); ++i)
    if (base_data[i].label == pivot) pivot_idx = i;
  if (pivot_idx == base_data.size()) throw std::invalid_argument("pivot '" + pivot + "' not in the dataset");

  auto run_point = [&](real desired) {
    SweepRow row;
    row.desired = desired;
    try {
      Dataset data = base_data;
      data[pivot_idx] = TrainingPair(base_data[pivot_idx].label, base_data[pivot_idx].state, desired);
      const TrainReport rep = train(data, cfg);
      row.trained = rep.per_pair_outputs[pivot_idx];
      row.rms = rep.final_rms;
      row.status = rep.status;
    } catch (const std::exception& e) {
      row.error = e.what();
      row.trained = std::numeric_limits<real>::quiet_NaN();
      row.rms = std::numeric_limits<real>::quiet_NaN();
    }
    return row;
  };

  std::vector<SweepRow> rows(targets.size());
  const int workers = std::min<int>(std::max(threads, 1), static_cast<int>(targets.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < targets.size(); ++i) rows[i] = run_point(targets[i]);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> pool;
  for (int k = 0; k < workers; ++k)
    pool.push_back(std::async(std::launch::async, [&] {
      for (std::size_t i = next++; i < targets.size(); i = next++) rows[i] = run_point(targets[i]);
    }));
  for (auto& f : pool) f.get();
  return rows;
}

}  // namespace qtnn
