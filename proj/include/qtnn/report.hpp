#pragma once

// CSV artifacts and run manifests shared by the command-line driver and the
// acceptance suite, so both produce byte-identical files for the same inputs.

#include "qtnn/baseline.hpp"
#include "qtnn/entanglement.hpp"
#include "qtnn/io.hpp"
#include "qtnn/train.hpp"

#include <chrono>
#include <ctime>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace qtnn {

// ---------------------------------------------------------------------------
// oracle table

struct OracleRow {
  std::string state;
  real classical_correlation = 0.0;
  real concurrence = 0.0;
  std::optional<real> entropy_bits;  // pure states only
  real bures_to_product = 0.0;
  bool ppt = true;
};

inline OracleRow oracle_row(const std::string& name, const CatalogParams& params = {}) {
  const CatalogEntry e = catalog_entry(name, params);
  OracleRow r;
  r.state = e.name;
  r.classical_correlation = zz_correlation(e.state);
  r.concurrence = concurrence(e.state);
  if (e.pure) r.entropy_bits = entanglement_entropy(*e.pure);
  r.bures_to_product = nearest_product(e.state, Metric::Bures).value;
  r.ppt = ppt_separable(e.state);
  return r;
}

/// Six decimals, the printed precision of the reference table.
inline std::string oracle_csv(const std::vector<OracleRow>& rows) {
  io::CsvWriter w{"state", "classical_correlation", "concurrence", "entropy_bits", "bures_to_product", "ppt"};
  for (const auto& r : rows)
    w.row({r.state, io::fmt_fixed(r.classical_correlation, 6), io::fmt_fixed(r.concurrence, 6),
           r.entropy_bits ? io::fmt_fixed(*r.entropy_bits, 6) : "NA", io::fmt_fixed(r.bures_to_product, 6),
           r.ppt ? "true" : "false"});
  return w.str();
}

// ---------------------------------------------------------------------------
// training and testing

inline std::string history_csv(const TrainReport& rep) {
  io::CsvWriter w{"epoch", "rms"};
  for (std::size_t i = 0; i < rep.rms_history.size(); ++i)
    w.row({std::to_string(i), io::fmt_real(rep.rms_history[i])});
  return w.str();
}

/// Initial / Desired / Trained per training pair.
inline std::string outputs_csv(const Dataset& data, const TrainReport& rep) {
  io::CsvWriter w{"state", "initial", "desired", "trained"};
  for (std::size_t i = 0; i < data.size(); ++i)
    w.row({data[i].label, io::fmt_real(rep.initial_outputs[i]), io::fmt_real(data[i].target),
           io::fmt_real(rep.per_pair_outputs[i])});
  return w.str();
}

/// Desired vs output per state with a final RMS row.
inline std::string test_csv(const Dataset& data, const Evaluation& ev) {
  io::CsvWriter w{"state", "desired", "output"};
  for (std::size_t i = 0; i < data.size(); ++i)
    w.row({data[i].label, io::fmt_real(data[i].target), io::fmt_real(ev.outputs[i])});
  w.row({"RMS", "", io::fmt_real(ev.rms)});
  return w.str();
}

inline std::string sweep_row_status(const SweepRow& r) {
  return r.error.empty() ? status_name(r.status) : "error: " + r.error;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  io::CsvWriter w{"desired", "trained", "rms", "status"};
  for (const auto& r : rows) {
    std::string status = sweep_row_status(r);
    for (char& c : status)
      if (c == ',' || c == '\n') c = ';';
    w.row({io::fmt_real(r.desired), io::fmt_real(r.trained), io::fmt_real(r.rms), status});
  }
  return w.str();
}

// ---------------------------------------------------------------------------
// baseline

inline std::string folds_csv(const std::vector<LooFold>& folds) {
  io::CsvWriter w{"held_out", "target", "output", "abs_error", "train_rms", "trained"};
  for (const auto& f : folds)
    w.row({f.held_out, io::fmt_real(f.target), io::fmt_real(f.output), io::fmt_real(f.abs_error),
           io::fmt_real(f.train_rms), f.trained ? "true" : "false"});
  return w.str();
}

inline std::string mlp_outputs_csv(const MlpDataset& data, const MlpEvaluation& ev) {
  io::CsvWriter w{"state", "desired", "output"};
  for (std::size_t i = 0; i < data.size(); ++i)
    w.row({data[i].label, io::fmt_real(data[i].target), io::fmt_real(ev.outputs[i])});
  w.row({"RMS", "", io::fmt_real(ev.rms)});
  return w.str();
}

// ---------------------------------------------------------------------------
// manifest

struct RunManifest {
  std::string command_line;
  std::string config_digest;  // FNV-1a of the config text, hex
  std::uint64_t seed = 0;
  std::vector<std::string> artifacts;
  std::string started_utc;
  real wall_clock_seconds = 0.0;
  std::string version = io::LIBRARY_VERSION;

  std::string to_yaml() const {
    std::ostringstream os;
    auto quoted = [](const std::string& s) {
      std::string q = "\"";
      for (char c : s) {
        if (c == '"' || c == '\\') q += '\\';
        q += c;
      }
      return q + "\"";
    };
    os << "command_line: " << quoted(command_line) << '\n'
       << "config_digest: " << quoted(config_digest) << '\n'
       << "seed: " << seed << '\n'
       << "started_utc: " << quoted(started_utc) << '\n'
       << "wall_clock_seconds: " << io::fmt_real(wall_clock_seconds) << '\n'
       << "version: " << quoted(version) << '\n'
       << "artifacts:\n";
    for (const auto& a : artifacts) os << "  - " << quoted(a) << '\n';
    return os.str();
  }
};

inline std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace qtnn
