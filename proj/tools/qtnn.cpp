// qtnn: command-line driver for training, testing, sweeping and the oracle and
// baseline experiments. Every command writes CSV artifacts plus one
// manifest.yaml into --out-dir.
//
// Exit codes: 0 success, 2 config/usage error, 3 divergence, 4 verification failure.

#include "qtnn/qtnn.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using namespace qtnn;

namespace {

constexpr int EXIT_CONFIG = 2;
constexpr int EXIT_DIVERGED = 3;
constexpr int EXIT_VERIFY = 4;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs;
  std::string init;
  std::string out_dir = "out";
  bool deterministic = false;
  std::string p_target;

  std::vector<std::string> states;
  std::optional<real> gamma;
  std::optional<real> delta;

  std::string weights_path;
  std::string set_name = "table3";
  std::string grid;
  std::string extra;
  std::string fault;
};

/// Loads the config and applies command-line overrides.
struct Session {
  Options opt;
  std::string command_line;
  std::string config_text;
  ExperimentConfig cfg;
  RunManifest manifest;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void load() {
    if (!opt.config_path.empty()) config_text = io::read_file(opt.config_path);
    cfg = load_experiment(config_text);
    if (opt.seed) {
      cfg.train.seed = *opt.seed;
      cfg.sweep.train.seed = *opt.seed;
      cfg.baseline.mlp.seed = *opt.seed;
    }
    if (opt.epochs) {
      if (*opt.epochs < 0) throw ConfigError("--epochs must be non-negative");
      cfg.train.max_epochs = *opt.epochs;
      cfg.sweep.train.max_epochs = *opt.epochs;
    }
    if (!opt.init.empty()) {
      const YAML::Node n(opt.init);
      cfg.train.init = detail::parse_init(n);
      cfg.sweep.train.init = cfg.train.init;
    }
    if (!opt.p_target.empty()) {
      const real t = io::parse_number(opt.p_target);
      if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("--p-target must lie in [0, 1]");
      for (Dataset* d : {&cfg.training_set, &cfg.test_set})
        for (auto& pair : *d)
          if (pair.label == "P" || pair.label == "P2") pair = TrainingPair(pair.label, pair.state, t);
    }
    if (!opt.grid.empty()) cfg.sweep.grid = opt.grid;
    if (!opt.extra.empty()) cfg.sweep.extra_points = opt.extra;
    if (opt.gamma) cfg.oracle.params.gamma = *opt.gamma;
    if (opt.delta) cfg.oracle.params.delta = *opt.delta;
    if (!opt.states.empty()) {
      cfg.oracle.states.clear();
      for (const auto& s : opt.states) cfg.oracle.states.push_back(canonical_name(s));
    }
    manifest.command_line = command_line;
    manifest.config_digest = io::hex64(io::fnv1a(config_text));
    manifest.seed = cfg.train.seed;
    manifest.started_utc = utc_now();
  }

  int threads() const {
    if (opt.deterministic) return 1;
    if (const char* env = std::getenv("QTNN_THREADS")) {
      try {
        return std::max(1, std::stoi(env));
      } catch (const std::exception&) {
        throw ConfigError(std::string("QTNN_THREADS must be an integer, got '") + env + "'");
      }
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }

  void write(const std::string& name, const std::string& text) {
    io::write_atomic(fs::path(opt.out_dir) / name, text);
    manifest.artifacts.push_back(name);
  }

  void finish() {
    manifest.wall_clock_seconds =
        std::chrono::duration<real>(std::chrono::steady_clock::now() - start).count();
    io::write_atomic(fs::path(opt.out_dir) / "manifest.yaml", manifest.to_yaml());
  }
};

void print_table(const std::string& csv) { std::cout << csv; }

// ---------------------------------------------------------------------------

int run_oracle(Session& s) {
  std::vector<OracleRow> rows;
  for (const auto& n : s.cfg.oracle.states) rows.push_back(oracle_row(n, s.cfg.oracle.params));
  const std::string csv = oracle_csv(rows);
  s.write("oracle.csv", csv);
  print_table(csv);
  return 0;
}

int run_train(Session& s, std::optional<NetworkWeights>* trained = nullptr) {
  const TrainReport rep = train(s.cfg.training_set, s.cfg.train);
  s.write("train_rms.csv", history_csv(rep));
  s.write("train_outputs.csv", outputs_csv(s.cfg.training_set, rep));
  s.write("weights.yaml", weights_to_yaml(rep.final_weights));
  print_table(outputs_csv(s.cfg.training_set, rep));
  std::cout << "status: " << status_name(rep.status) << "  final rms: " << io::fmt_real(rep.final_rms)
            << "  epochs: " << rep.epochs_run << "  restart: " << rep.restart_index << " of " << rep.restarts_run
            << "  total epochs: " << rep.total_epochs << "\n";
  if (trained) *trained = rep.final_weights;
  if (rep.status == TrainStatus::Diverged) {
    std::cerr << "training diverged\n";
    return EXIT_DIVERGED;
  }
  return 0;
}

const Dataset& named_set(const Session& s, const std::string& name) {
  if (name == "table3" || name == "test") return s.cfg.test_set;
  if (name == "table2" || name == "train") return s.cfg.training_set;
  throw ConfigError("unknown set '" + name + "' (expected table2 or table3)");
}

int run_test(Session& s, const NetworkWeights& w, const std::string& set_name) {
  const Dataset& data = named_set(s, set_name);
  const std::string csv = test_csv(data, evaluate(w, data));
  s.write("test_" + set_name + ".csv", csv);
  print_table(csv);
  return 0;
}

int run_sweep(Session& s) {
  const auto rows = sweep_target(s.cfg.sweep.pivot, sweep_points(s.cfg.sweep), s.cfg.training_set,
                                 s.cfg.sweep.train, s.threads());
  const std::string csv = sweep_csv(rows);
  s.write("sweep.csv", csv);
  print_table(csv);
  int failed = 0;
  for (const auto& r : rows) failed += r.error.empty() ? 0 : 1;
  if (failed) std::cerr << failed << " sweep point(s) failed; see the status column\n";
  return 0;
}

int run_baseline(Session& s) {
  const BaselineSettings& b = s.cfg.baseline;
  MlpDataset train_set, test_set;
  for (const auto& p : s.cfg.training_set) train_set.push_back(mlp_sample(p.label, p.state, p.target));
  for (const auto& p : s.cfg.test_set)
    if (as_pure(p.state)) test_set.push_back(mlp_sample(p.label, p.state, p.target));

  const MlpTrainResult narrow = mlp_train(train_set, b.mlp);
  MlpConfig wide_cfg = b.mlp;
  wide_cfg.layer_sizes = b.wide_layer_sizes;
  const MlpTrainResult wide = mlp_train(train_set, wide_cfg);
  const MlpEvaluation test_ev = mlp_eval(narrow.net, test_set);

  MlpDataset pool = train_set;
  pool.insert(pool.end(), test_set.begin(), test_set.end());
  const auto folds = loo_experiment(pool, b.mlp, b.fold_rms_required);

  s.write("baseline_train.csv", mlp_outputs_csv(train_set, mlp_eval(narrow.net, train_set)));
  s.write("baseline_test.csv", mlp_outputs_csv(test_set, test_ev));
  s.write("baseline_folds.csv", folds_csv(folds));
  print_table(folds_csv(folds));

  real mean = 0.0;
  int untrained = 0;
  for (const auto& f : folds) {
    mean += f.abs_error / static_cast<real>(folds.size());
    untrained += f.trained ? 0 : 1;
  }
  std::cout << "train rms: " << io::fmt_real(narrow.final_rms) << "  wide train rms: " << io::fmt_real(wide.final_rms)
            << "  test rms: " << io::fmt_real(test_ev.rms) << "  loo mean error: " << io::fmt_real(mean) << "\n";
  if (untrained) std::cerr << untrained << " fold(s) did not reach the training threshold\n";
  if (narrow.diverged) {
    std::cerr << "baseline training diverged\n";
    return EXIT_DIVERGED;
  }
  return 0;
}

int run_verify_cmd(Session& s) {
  VerifyFaults faults;
  if (s.opt.fault == "dt-sign") faults.dt_sign_flip = true;
  else if (!s.opt.fault.empty()) throw ConfigError("unknown fault '" + s.opt.fault + "'");
  const auto checks = run_verify(faults);
  io::CsvWriter w{"check", "measured", "tolerance", "passed"};
  bool ok = true;
  for (const auto& c : checks) {
    std::printf("%-52s measured %-14.6g %-26s %s\n", c.name.c_str(), c.measured, c.tolerance.c_str(),
                c.passed ? "PASS" : "FAIL");
    w.row({c.name, io::fmt_real(c.measured), c.tolerance, c.passed ? "true" : "false"});
    ok = ok && c.passed;
  }
  s.write("verify.csv", w.str());
  return ok ? 0 : EXIT_VERIFY;
}

int run_reproduce(Session& s) {
  std::optional<NetworkWeights> trained;
  std::cout << "== train\n";
  if (int rc = run_train(s, &trained)) return rc;
  std::cout << "== test (table3)\n";
  run_test(s, *trained, "table3");
  std::cout << "== test (table2)\n";
  run_test(s, *trained, "table2");
  std::cout << "== sweep\n";
  run_sweep(s);
  std::cout << "== oracle\n";
  run_oracle(s);
  std::cout << "== baseline\n";
  return run_baseline(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-qubit quantum neural network: training, testing and entanglement oracles"};
  app.require_subcommand(1);
  Options opt;

  auto common = [&](CLI::App* c) {
    c->add_option("--config", opt.config_path, "YAML experiment config")->check(CLI::ExistingFile);
    c->add_option("--out-dir", opt.out_dir, "directory for CSV artifacts and the manifest");
  };
  auto training = [&](CLI::App* c) {
    c->add_option("--seed", opt.seed, "random seed");
    c->add_option("--epochs", opt.epochs, "maximum epochs per run");
    c->add_option("--init", opt.init, "initial weights")->check(CLI::IsMember({"zero", "analytic", "random"}));
    c->add_option("--p-target", opt.p_target, "target for P and P2, e.g. 0.44 or 4/9");
    c->add_flag("--deterministic", opt.deterministic, "single-threaded, fixed evaluation order");
  };

  auto* oracle = app.add_subcommand("oracle", "entanglement table for catalog states");
  common(oracle);
  oracle->add_option("--states,--state", opt.states, "comma-separated catalog names")->delimiter(',');
  oracle->add_option("--gamma", opt.gamma, "amplitude ratio of the C state");
  oracle->add_option("--delta", opt.delta, "relative phase of the Bell state");

  auto* train_cmd = app.add_subcommand("train", "train on the training set");
  common(train_cmd);
  training(train_cmd);

  auto* test_cmd = app.add_subcommand("test", "evaluate saved weights on a named set");
  common(test_cmd);
  test_cmd->add_option("--weights", opt.weights_path, "weights.yaml from train")->required();
  test_cmd->add_option("--set", opt.set_name, "table2 or table3");
  test_cmd->add_option("--p-target", opt.p_target, "target for P and P2");

  auto* sweep_cmd = app.add_subcommand("sweep", "retrain over a grid of targets for the pivot state");
  common(sweep_cmd);
  training(sweep_cmd);
  sweep_cmd->add_option("--grid", opt.grid, "start:step:stop or a comma list");
  sweep_cmd->add_option("--extra", opt.extra, "extra grid points, comma list");

  auto* verify_cmd = app.add_subcommand("verify", "run the self-check suite");
  verify_cmd->add_option("--out-dir", opt.out_dir, "directory for the report");
  verify_cmd->add_option("--inject-fault", opt.fault, "deliberate defect for testing the checker")
      ->check(CLI::IsMember({"dt-sign"}));

  auto* baseline_cmd = app.add_subcommand("baseline", "classical network comparison and leave-one-out");
  common(baseline_cmd);
  baseline_cmd->add_option("--seed", opt.seed, "random seed");

  auto* reproduce_cmd = app.add_subcommand("reproduce", "train, test, sweep, oracle and baseline in one run");
  common(reproduce_cmd);
  training(reproduce_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return EXIT_CONFIG;
  }

  Session s{opt};
  for (int i = 0; i < argc; ++i) s.command_line += (i ? " " : "") + std::string(argv[i]);

  try {
    s.load();
    int rc = 0;
    if (*oracle) rc = run_oracle(s);
    else if (*train_cmd) rc = run_train(s);
    else if (*test_cmd) {
      if (!fs::exists(opt.weights_path)) throw ConfigError("weights file '" + opt.weights_path + "' not found");
      const NetworkWeights w = weights_from_yaml(io::read_file(opt.weights_path));
      rc = run_test(s, w, opt.set_name);
    } else if (*sweep_cmd) rc = run_sweep(s);
    else if (*verify_cmd) rc = run_verify_cmd(s);
    else if (*baseline_cmd) rc = run_baseline(s);
    else if (*reproduce_cmd) rc = run_reproduce(s);
    s.finish();
    return rc;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
  } catch (const CatalogError& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return EXIT_CONFIG;
}
