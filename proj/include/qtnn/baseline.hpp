#pragma once

// Classical feed-forward baseline. Inputs are the magnitudes of the four
// normalized amplitudes; the phase information a real-valued network cannot
// see is dropped, so mixed states have no input encoding at all.

#include "qtnn/qstate.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace qtnn {

struct MlpConfig {
  std::vector<int> layer_sizes{4, 8, 1};
  real learning_rate = 2.0;
  int max_epochs = 50000;
  real rms_stop = 1e-3;
  std::uint64_t seed = 7;
};

struct MlpSample {
  std::string label;
  Eigen::Vector4d input;
  real target = 0.0;
};

using MlpDataset = std::vector<MlpSample>;

/// |a00|, |a01|, |a10|, |a11| of a pure state; mixed states are rejected.
inline Eigen::Vector4d mlp_features(const DensityMatrix& rho) {
  const auto psi = as_pure(rho);
  if (!psi) throw InvalidState("the classical baseline has no encoding for mixed states");
  return psi->vec().cwiseAbs();
}

inline MlpSample mlp_sample(const std::string& label, const DensityMatrix& rho, real target) {
  return {label, mlp_features(rho), target};
}

namespace detail {
inline real sigmoid(real x) { return 1.0 / (1.0 + std::exp(-x)); }
}  // namespace detail

/// Fully connected network with sigmoid units on every layer.
class Mlp {
 public:
  Mlp(const std::vector<int>& layer_sizes, std::uint64_t seed) {
    if (layer_sizes.size() < 2 || layer_sizes.front() != 4 || layer_sizes.back() != 1)
      throw std::invalid_argument("MLP layers must start at width 4 and end at width 1");
    std::mt19937_64 rng(seed);
    for (std::size_t l = 1; l < layer_sizes.size(); ++l) {
      if (layer_sizes[l] < 1) throw std::invalid_argument("MLP layer widths must be positive");
      const int in = layer_sizes[l - 1], out = layer_sizes[l];
      const real scale = 1.0 / std::sqrt(static_cast<real>(in));
      std::uniform_real_distribution<real> unif(-scale, scale);
      Eigen::MatrixXd w(out, in);
      for (int i = 0; i < out; ++i)
        for (int j = 0; j < in; ++j) w(i, j) = unif(rng);
      Eigen::VectorXd b(out);
      for (int i = 0; i < out; ++i) b(i) = unif(rng);
      weights_.push_back(std::move(w));
      biases_.push_back(std::move(b));
    }
  }

  int layers() const { return static_cast<int>(weights_.size()); }

  /// Activations of every layer, input first.
  std::vector<Eigen::VectorXd> activations(const Eigen::Vector4d& x) const {
    std::vector<Eigen::VectorXd> acts{Eigen::VectorXd(x)};
    for (int l = 0; l < layers(); ++l) {
      Eigen::VectorXd z = weights_[l] * acts.back() + biases_[l];
      acts.push_back(z.unaryExpr([](real v) { return detail::sigmoid(v); }));
    }
    return acts;
  }

  real predict(const Eigen::Vector4d& x) const { return activations(x).back()(0); }

  // flat parameter view, layer by layer: weights row-major then biases
  std::vector<real> parameters() const {
    std::vector<real> p;
    for (int l = 0; l < layers(); ++l) {
      for (int i = 0; i < weights_[l].rows(); ++i)
        for (int j = 0; j < weights_[l].cols(); ++j) p.push_back(weights_[l](i, j));
      for (int i = 0; i < biases_[l].size(); ++i) p.push_back(biases_[l](i));
    }
    return p;
  }

  void set_parameters(const std::vector<real>& p) {
    std::size_t k = 0;
    for (int l = 0; l < layers(); ++l) {
      for (int i = 0; i < weights_[l].rows(); ++i)
        for (int j = 0; j < weights_[l].cols(); ++j) weights_[l](i, j) = p.at(k++);
      for (int i = 0; i < biases_[l].size(); ++i) biases_[l](i) = p.at(k++);
    }
    if (k != p.size()) throw std::invalid_argument("parameter vector length mismatch");
  }

  const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
  const std::vector<Eigen::VectorXd>& biases() const { return biases_; }

  /// Mean squared error and its gradient in the flat parameter layout.
  std::pair<real, std::vector<real>> loss_and_gradient(const MlpDataset& data) const {
    std::vector<Eigen::MatrixXd> gw;
    std::vector<Eigen::VectorXd> gb;
    for (int l = 0; l < layers(); ++l) {
      gw.push_back(Eigen::MatrixXd::Zero(weights_[l].rows(), weights_[l].cols()));
      gb.push_back(Eigen::VectorXd::Zero(biases_[l].size()));
    }
    const real inv_n = 1.0 / static_cast<real>(data.size());
    real mse = 0.0;
    for (const auto& s : data) {
      const auto acts = activations(s.input);
      const real err = acts.back()(0) - s.target;
      mse += err * err * inv_n;
      // delta at the output pre-activation
      Eigen::VectorXd delta(1);
      delta(0) = 2.0 * inv_n * err;
      for (int l = layers() - 1; l >= 0; --l) {
        const Eigen::VectorXd& a = acts[l + 1];
        delta = delta.cwiseProduct(a.cwiseProduct(Eigen::VectorXd::Ones(a.size()) - a));
        gw[l] += delta * acts[l].transpose();
        gb[l] += delta;
        if (l > 0) delta = weights_[l].transpose() * delta;
      }
    }
    std::vector<real> flat;
    for (int l = 0; l < layers(); ++l) {
      for (int i = 0; i < gw[l].rows(); ++i)
        for (int j = 0; j < gw[l].cols(); ++j) flat.push_back(gw[l](i, j));
      for (int i = 0; i < gb[l].size(); ++i) flat.push_back(gb[l](i));
    }
    return {mse, flat};
  }

 private:
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::VectorXd> biases_;
};

struct MlpEvaluation {
  std::vector<real> outputs;
  real rms = 0.0;
};

inline MlpEvaluation mlp_eval(const Mlp& net, const MlpDataset& data) {
  MlpEvaluation ev;
  real acc = 0.0;
  for (const auto& s : data) {
    const real y = net.predict(s.input);
    ev.outputs.push_back(y);
    acc += (y - s.target) * (y - s.target);
  }
  ev.rms = data.empty() ? 0.0 : std::sqrt(acc / static_cast<real>(data.size()));
  return ev;
}

struct MlpTrainResult {
  Mlp net;
  std::vector<real> rms_history;
  real final_rms = 0.0;
  bool converged = false;
  bool diverged = false;
};

/// Full-batch backpropagation until RMS <= rms_stop or max_epochs.
inline MlpTrainResult mlp_train(const MlpDataset& data, const MlpConfig& cfg) {
  if (data.empty()) throw std::invalid_argument("MLP training needs at least one sample");
  if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  MlpTrainResult res{Mlp(cfg.layer_sizes, cfg.seed), {}, 0.0, false, false};
  real initial_rms = -1.0;
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    auto [mse, grad] = res.net.loss_and_gradient(data);
    const real rms = std::sqrt(mse);
    if (initial_rms < 0.0) initial_rms = rms;
    res.rms_history.push_back(rms);
    if (rms <= cfg.rms_stop) {
      res.converged = true;
      break;
    }
    if (!std::isfinite(rms) || rms > 10.0 * initial_rms) {
      res.diverged = true;
      break;
    }
    std::vector<real> p = res.net.parameters();
    for (std::size_t i = 0; i < p.size(); ++i) p[i] -= cfg.learning_rate * grad[i];
    res.net.set_parameters(p);
  }
  res.final_rms = mlp_eval(res.net, data).rms;
  return res;
}

struct LooFold {
  std::string held_out;
  real target = 0.0;
  real output = 0.0;
  real abs_error = 0.0;
  real train_rms = 0.0;
  bool trained = false;  // training RMS reached the fold threshold
};

/// Leave-one-out: train on all but one sample, test on the one removed.
/// A fold whose training RMS stays above `train_rms_required` is flagged.
inline std::vector<LooFold> loo_experiment(const MlpDataset& pool, const MlpConfig& cfg,
                                           real train_rms_required = 1e-2) {
  if (pool.size() < 2) throw std::invalid_argument("leave-one-out needs at least two samples");
  std::vector<LooFold> folds;
  for (std::size_t k = 0; k < pool.size(); ++k) {
    MlpDataset rest;
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (i != k) rest.push_back(pool[i]);
    const MlpTrainResult res = mlp_train(rest, cfg);
    LooFold f;
    f.held_out = pool[k].label;
    f.target = pool[k].target;
    f.output = res.net.predict(pool[k].input);
    f.abs_error = std::abs(f.output - f.target);
    f.train_rms = res.final_rms;
    f.trained = res.final_rms <= train_rms_required;
    folds.push_back(f);
  }
  return folds;
}

// ---------------------------------------------------------------------------
// canonical datasets for the baseline

inline MlpDataset mlp_table2_dataset(real p_target = 0.44) {
  return {mlp_sample("bell", catalog("bell"), 1.0), mlp_sample("flat", catalog("flat"), 0.0),
          mlp_sample("C", catalog("C", {0.5, 0.0}), 0.0), mlp_sample("P", catalog("P"), p_target)};
}

/// The table3 set minus the mixed state M.
inline MlpDataset mlp_table3_dataset(real p_target = 0.44) {
  return {mlp_sample("epr", catalog("epr"), 1.0), mlp_sample("ket00", catalog("ket00"), 0.0),
          mlp_sample("ket10_09_11", catalog("ket10_09_11"), 0.0), mlp_sample("P2", catalog("P2"), p_target)};
}

/// The eight pure states of both tables.
inline MlpDataset mlp_loo_pool(real p_target = 0.44) {
  MlpDataset pool = mlp_table2_dataset(p_target);
  for (auto& s : mlp_table3_dataset(p_target)) pool.push_back(std::move(s));
  return pool;
}

}  // namespace qtnn
