#pragma once

// YAML experiment configs and weight files. Every key is optional and falls back
// to the library default; unknown keys and malformed values are rejected with
// the offending line.

#include "qtnn/baseline.hpp"
#include "qtnn/io.hpp"
#include "qtnn/train.hpp"

#include <yaml-cpp/yaml.h>

#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace qtnn {

struct OracleSettings {
  std::vector<std::string> states{"bell", "epr", "flat", "C", "P", "M"};
  CatalogParams params;
};

struct SweepSettings {
  std::string pivot = "P";
  std::string grid = "0.05:0.05:0.95";
  std::string extra_points;  // appended to the grid, e.g. "0.44,4/9"
  TrainConfig train = sweep_config();
};

struct BaselineSettings {
  MlpConfig mlp;
  std::vector<int> wide_layer_sizes{4, 16, 1};
  real fold_rms_required = 1e-2;
};

struct ExperimentConfig {
  TrainConfig train;
  Dataset training_set = table2_dataset();
  Dataset test_set = table3_dataset();
  SweepSettings sweep;
  OracleSettings oracle;
  BaselineSettings baseline;
};

namespace detail {

inline int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

[[noreturn]] inline void config_fail(const YAML::Node& n, const std::string& what) {
  throw ConfigError(what, line_of(n));
}

inline void require_map(const YAML::Node& n, const std::string& where, const std::set<std::string>& allowed) {
  if (!n.IsMap()) config_fail(n, where + " must be a mapping");
  for (const auto& kv : n) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.count(key)) config_fail(kv.first, "unknown key '" + key + "' in " + where);
  }
}

inline std::string as_string(const YAML::Node& n, const std::string& key) {
  if (!n.IsScalar()) config_fail(n, "'" + key + "' must be a scalar");
  return n.Scalar();
}

inline real as_real(const YAML::Node& n, const std::string& key) {
  try {
    return io::parse_number(as_string(n, key));
  } catch (const ConfigError&) {
    config_fail(n, "'" + key + "' must be a number, got '" + n.Scalar() + "'");
  }
}

inline long long as_int(const YAML::Node& n, const std::string& key) {
  const std::string s = as_string(n, key);
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  config_fail(n, "'" + key + "' must be an integer, got '" + s + "'");
}

inline bool as_bool(const YAML::Node& n, const std::string& key) {
  const std::string s = lower(as_string(n, key));
  if (s == "true" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "no" || s == "off") return false;
  config_fail(n, "'" + key + "' must be true or false, got '" + s + "'");
}

inline Mat4 as_matrix(const YAML::Node& n) {
  // four rows of four [re, im] pairs
  if (!n.IsSequence() || n.size() != 4) config_fail(n, "matrix must have 4 rows");
  Mat4 m;
  for (int i = 0; i < 4; ++i) {
    const YAML::Node row = n[i];
    if (!row.IsSequence() || row.size() != 4) config_fail(row, "matrix row must have 4 entries");
    for (int j = 0; j < 4; ++j) {
      const YAML::Node e = row[j];
      if (e.IsScalar()) {
        m(i, j) = as_real(e, "matrix entry");
      } else if (e.IsSequence() && e.size() == 2) {
        m(i, j) = cplx(as_real(e[0], "matrix entry"), as_real(e[1], "matrix entry"));
      } else {
        config_fail(e, "matrix entry must be a number or [re, im]");
      }
    }
  }
  return m;
}

inline InitKind parse_init(const YAML::Node& n) {
  const std::string s = lower(as_string(n, "init"));
  if (s == "zero") return InitKind::Zero;
  if (s == "random") return InitKind::Random;
  if (s == "analytic") return InitKind::Analytic;
  if (s == "explicit") return InitKind::Explicit;
  config_fail(n, "init must be zero, random, analytic or explicit, got '" + s + "'");
}

inline Schedule parse_schedule(const YAML::Node& n, TrainableMask* mask_out = nullptr);

inline void apply_train(const YAML::Node& n, TrainConfig& cfg) {
  require_map(n, "train",
              {"learning_rate", "max_epochs", "rms_stop", "init", "init_box", "seed", "slices", "dt", "trainable",
               "backtracking", "lr_growth", "stall_window", "stall_tol", "restarts", "gradient", "weights"});
  if (auto v = n["learning_rate"]) cfg.learning_rate = as_real(v, "learning_rate");
  if (auto v = n["max_epochs"]) cfg.max_epochs = static_cast<int>(as_int(v, "max_epochs"));
  if (auto v = n["rms_stop"]) cfg.rms_stop = as_real(v, "rms_stop");
  if (auto v = n["init"]) cfg.init = parse_init(v);
  if (auto v = n["init_box"]) cfg.init_box = as_real(v, "init_box");
  if (auto v = n["seed"]) cfg.seed = static_cast<std::uint64_t>(as_int(v, "seed"));
  if (auto v = n["slices"]) cfg.slices = static_cast<int>(as_int(v, "slices"));
  if (auto v = n["dt"]) cfg.dt = as_real(v, "dt");
  if (auto v = n["backtracking"]) cfg.backtracking = as_bool(v, "backtracking");
  if (auto v = n["lr_growth"]) cfg.lr_growth = as_real(v, "lr_growth");
  if (auto v = n["stall_window"]) cfg.stall_window = static_cast<int>(as_int(v, "stall_window"));
  if (auto v = n["stall_tol"]) cfg.stall_tol = as_real(v, "stall_tol");
  if (auto v = n["restarts"]) cfg.restarts = static_cast<int>(as_int(v, "restarts"));
  if (auto v = n["trainable"]) {
    require_map(v, "trainable", {"K", "eps", "J"});
    if (auto b = v["K"]) cfg.train_k = as_bool(b, "K");
    if (auto b = v["eps"]) cfg.train_eps = as_bool(b, "eps");
    if (auto b = v["J"]) cfg.train_j = as_bool(b, "J");
  }
  if (auto v = n["gradient"]) {
    const std::string g = lower(as_string(v, "gradient"));
    if (g == "analytic") cfg.gradient = Analytic{};
    else if (g == "central_difference") cfg.gradient = CentralDifference{};
    else config_fail(v, "gradient must be analytic or central_difference");
  }
  if (auto v = n["weights"]) cfg.explicit_init = parse_schedule(v);

  if (!(cfg.learning_rate > 0.0)) config_fail(n, "learning_rate must be positive");
  if (cfg.max_epochs < 0) config_fail(n, "max_epochs must be non-negative");
  if (!(cfg.rms_stop >= 0.0)) config_fail(n, "rms_stop must be non-negative");
  if (cfg.slices < 1) config_fail(n, "slices must be at least 1");
  if (!(cfg.dt > 0.0)) config_fail(n, "dt must be positive");
  if (cfg.restarts < 1) config_fail(n, "restarts must be at least 1");
  if (cfg.init == InitKind::Explicit && !cfg.explicit_init) config_fail(n, "init: explicit needs a weights entry");
}

inline Schedule parse_schedule(const YAML::Node& n, TrainableMask* mask_out) {
  require_map(n, "weights", {"dt", "slices"});
  if (!n["dt"]) config_fail(n, "weights need dt");
  if (!n["slices"] || !n["slices"].IsSequence() || n["slices"].size() == 0)
    config_fail(n, "weights need a non-empty slices list");
  const real dt = as_real(n["dt"], "dt");
  std::vector<SliceParams> slices;
  std::vector<bool> bits;
  for (const auto& s : n["slices"]) {
    require_map(s, "slice", {"K", "eps", "J", "train"});
    SliceParams p;
    if (auto v = s["K"]) p.K = as_real(v, "K");
    if (auto v = s["eps"]) p.eps = as_real(v, "eps");
    if (auto v = s["J"]) p.J = as_real(v, "J");
    slices.push_back(p);
    bool t[3] = {true, true, false};
    if (auto v = s["train"]) {
      if (!v.IsSequence() || v.size() != 3) config_fail(v, "slice train flags must be [K, eps, J]");
      for (int i = 0; i < 3; ++i) t[i] = as_bool(v[i], "train");
    }
    bits.insert(bits.end(), {t[0], t[1], t[2]});
  }
  if (mask_out) *mask_out = TrainableMask(std::move(bits));
  try {
    return Schedule(std::move(slices), dt);
  } catch (const std::exception& e) {
    config_fail(n, e.what());
  }
}

inline CatalogParams parse_params(const YAML::Node& n) {
  require_map(n, "params", {"gamma", "delta"});
  CatalogParams p;
  if (auto v = n["gamma"]) p.gamma = as_real(v, "gamma");
  if (auto v = n["delta"]) p.delta = as_real(v, "delta");
  return p;
}

inline Dataset parse_dataset(const YAML::Node& n, const std::string& where) {
  if (!n.IsSequence() || n.size() == 0) config_fail(n, where + " must be a non-empty list");
  Dataset out;
  for (const auto& e : n) {
    require_map(e, where + " entry", {"state", "matrix", "label", "params", "target"});
    if (!e["target"]) config_fail(e, where + " entry needs a target");
    const real target = as_real(e["target"], "target");
    if (!(target >= 0.0 && target <= 1.0)) config_fail(e["target"], "target must lie in [0, 1]");
    try {
      if (e["state"]) {
        const CatalogParams p = e["params"] ? parse_params(e["params"]) : CatalogParams{};
        const std::string name = as_string(e["state"], "state");
        const std::string label = e["label"] ? as_string(e["label"], "label") : canonical_name(name);
        out.emplace_back(label, catalog(name, p), target);
      } else if (e["matrix"]) {
        const std::string label = e["label"] ? as_string(e["label"], "label") : "matrix";
        out.emplace_back(label, DensityMatrix::from_matrix(as_matrix(e["matrix"])), target);
      } else {
        config_fail(e, where + " entry needs a state name or a matrix");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& ex) {
      config_fail(e, ex.what());
    }
  }
  return out;
}

inline std::vector<int> parse_layers(const YAML::Node& n, const std::string& key) {
  if (!n.IsSequence()) config_fail(n, key + " must be a list");
  std::vector<int> out;
  for (const auto& v : n) out.push_back(static_cast<int>(as_int(v, key)));
  if (out.size() < 2 || out.front() != 4 || out.back() != 1) config_fail(n, key + " must start at 4 and end at 1");
  return out;
}

inline YAML::Node load_yaml(const std::string& text) {
  try {
    return YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(e.msg, e.mark.line >= 0 ? e.mark.line + 1 : 0);
  }
}

}  // namespace detail

/// Parses a full experiment config. An empty document yields the defaults.
inline ExperimentConfig load_experiment(const std::string& text) {
  using namespace detail;
  ExperimentConfig cfg;
  const YAML::Node root = load_yaml(text);
  if (root.IsNull()) return cfg;
  require_map(root, "config", {"train", "training_set", "test_set", "sweep", "oracle", "baseline"});
  if (auto n = root["train"]) apply_train(n, cfg.train);
  if (auto n = root["training_set"]) cfg.training_set = parse_dataset(n, "training_set");
  if (auto n = root["test_set"]) cfg.test_set = parse_dataset(n, "test_set");

  // the sweep inherits the train section, then applies its own overrides
  cfg.sweep.train = sweep_config(cfg.train);
  if (auto n = root["sweep"]) {
    require_map(n, "sweep", {"pivot", "grid", "extra_points", "train"});
    if (auto v = n["pivot"]) cfg.sweep.pivot = canonical_name(as_string(v, "pivot"));
    if (auto v = n["grid"]) cfg.sweep.grid = as_string(v, "grid");
    if (auto v = n["extra_points"]) cfg.sweep.extra_points = as_string(v, "extra_points");
    if (auto v = n["train"]) apply_train(v, cfg.sweep.train);
    try {
      io::parse_grid(cfg.sweep.grid);
      if (!cfg.sweep.extra_points.empty()) io::parse_grid(cfg.sweep.extra_points);
    } catch (const ConfigError& e) {
      config_fail(n, e.what());
    }
  }
  if (auto n = root["oracle"]) {
    require_map(n, "oracle", {"states", "params"});
    if (auto v = n["states"]) {
      if (!v.IsSequence()) config_fail(v, "oracle states must be a list");
      cfg.oracle.states.clear();
      for (const auto& s : v) {
        try {
          cfg.oracle.states.push_back(canonical_name(as_string(s, "state")));
        } catch (const CatalogError& e) {
          config_fail(s, e.what());
        }
      }
    }
    if (auto v = n["params"]) cfg.oracle.params = parse_params(v);
  }
  if (auto n = root["baseline"]) {
    require_map(n, "baseline",
                {"layer_sizes", "wide_layer_sizes", "learning_rate", "max_epochs", "rms_stop", "seed",
                 "fold_rms_required"});
    MlpConfig& m = cfg.baseline.mlp;
    if (auto v = n["layer_sizes"]) m.layer_sizes = parse_layers(v, "layer_sizes");
    if (auto v = n["wide_layer_sizes"]) cfg.baseline.wide_layer_sizes = parse_layers(v, "wide_layer_sizes");
    if (auto v = n["learning_rate"]) m.learning_rate = as_real(v, "learning_rate");
    if (auto v = n["max_epochs"]) m.max_epochs = static_cast<int>(as_int(v, "max_epochs"));
    if (auto v = n["rms_stop"]) m.rms_stop = as_real(v, "rms_stop");
    if (auto v = n["seed"]) m.seed = static_cast<std::uint64_t>(as_int(v, "seed"));
    if (auto v = n["fold_rms_required"]) cfg.baseline.fold_rms_required = as_real(v, "fold_rms_required");
  }
  return cfg;
}

/// Sweep grid plus extra points, ascending.
inline std::vector<real> sweep_points(const SweepSettings& s) {
  std::vector<real> pts = io::parse_grid(s.grid);
  if (!s.extra_points.empty())
    for (real x : io::parse_grid(s.extra_points)) pts.push_back(x);
  std::stable_sort(pts.begin(), pts.end());
  return pts;
}

// ---------------------------------------------------------------------------
// weight files

inline std::string weights_to_yaml(const NetworkWeights& w) {
  char buf[64];
  auto num = [&](real x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  std::ostringstream os;
  os << "dt: " << num(w.schedule.dt()) << "\nslices:\n";
  for (int s = 0; s < w.schedule.size(); ++s) {
    const auto& p = w.schedule.slices()[s];
    os << "  - {K: " << num(p.K) << ", eps: " << num(p.eps) << ", J: " << num(p.J) << ", train: [";
    for (int g = 0; g < PARAMS_PER_SLICE; ++g) os << (g ? ", " : "") << (w.mask(s, Param(g)) ? "true" : "false");
    os << "]}\n";
  }
  return os.str();
}

inline NetworkWeights weights_from_yaml(const std::string& text) {
  const YAML::Node root = detail::load_yaml(text);
  if (!root.IsMap()) throw ConfigError("weights file must be a mapping", detail::line_of(root));
  TrainableMask mask;
  Schedule s = detail::parse_schedule(root, &mask);
  return NetworkWeights(std::move(s), std::move(mask));
}

}  // namespace qtnn
