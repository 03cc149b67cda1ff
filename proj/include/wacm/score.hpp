// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

#include <memory>
#include <string>
#include <vector>

#include "wacm/random.hpp"

namespace wacm {

using Eigen::Index;

/// Tensor shape a score model was built for. For wavelet stacks this is
/// (H/2, W/2, 12); generic vector models use (1, 1, D).
struct Resolution {
  Index rows = 1;
  Index cols = 1;
  Index channels = 1;

  Index dim() const { return rows * cols * channels; }
  bool operator==(const Resolution&) const = default;
  std::string to_string() const;
};

/// Estimates the score grad_x log q_sigma(x) of the sigma-smoothed data
/// density. Implementations are immutable after construction and may be
/// evaluated concurrently.
class ScoreModel {
 public:
  virtual ~ScoreModel() = default;

  virtual Eigen::VectorXd score(const Eigen::Ref<const Eigen::VectorXd>& x, double sigma) const = 0;
  virtual std::string kind() const = 0;

  Index dim() const { return resolution_.dim(); }
  const Resolution& resolution() const { return resolution_; }

 protected:
  explicit ScoreModel(Resolution r) : resolution_(r) {}
  void check_input(const Eigen::Ref<const Eigen::VectorXd>& x, double sigma) const;

 private:
  Resolution resolution_;
};

/// Exact score of the Gaussian-smoothed empirical distribution of a finite
/// dataset (the minimizer of the denoising score matching objective):
///   score(x) = sum_j w_j (X_j - x) / sigma^2,
///   w = softmax_j(-|x - X_j|^2 / (2 sigma^2)).
class ParzenScore final : public ScoreModel {
 public:
  /// `data` holds one sample per column.
  explicit ParzenScore(Eigen::MatrixXd data);
  ParzenScore(Eigen::MatrixXd data, Resolution r);

  Eigen::VectorXd score(const Eigen::Ref<const Eigen::VectorXd>& x, double sigma) const override;
  std::string kind() const override { return "parzen"; }

  /// Posterior responsibilities w_j at (x, sigma).
  Eigen::VectorXd weights(const Eigen::Ref<const Eigen::VectorXd>& x, double sigma) const;

  const Eigen::MatrixXd& data() const { return data_; }
  Index size() const { return data_.cols(); }

 private:
  Eigen::MatrixXd data_;
};

/// Score of N(mean, s^2 I). With `smoothed`, returns the score of the
/// sigma-perturbed density N(mean, (s^2 + sigma^2) I) instead.
class GaussianScore final : public ScoreModel {
 public:
  GaussianScore(Eigen::VectorXd mean, double stddev, bool smoothed = false);

  Eigen::VectorXd score(const Eigen::Ref<const Eigen::VectorXd>& x, double sigma) const override;
  std::string kind() const override { return "gaussian"; }

 private:
  Eigen::VectorXd mean_;
  double variance_;
  bool smoothed_;
};

/// Weighting lambda(sigma) of each noise level in the DSM objective.
enum class LambdaRule { SigmaSquared, Unit };

double lambda_weight(LambdaRule rule, double sigma);

/// Fully connected tanh network S(x, sigma) = net([x; log sigma]) / sigma.
///
/// The 1/sigma output scaling keeps the regression target of every noise
/// level at unit scale when lambda = sigma^2 (the target becomes -z).
class MlpScore final : public ScoreModel {
 public:
  /// Glorot-uniform weights, zero biases.
  MlpScore(Resolution r, const std::vector<Index>& hidden, Rng& rng);
  /// Explicit parameters; weights[l] is (out x in).
  MlpScore(Resolution r, std::vector<Eigen::MatrixXd> weights, std::vector<Eigen::VectorXd> biases);

  Eigen::VectorXd score(const Eigen::Ref<const Eigen::VectorXd>& x, double sigma) const override;
  std::string kind() const override { return "mlp"; }

  /// Scores for a batch: one column per sample.
  Eigen::MatrixXd score_batch(const Eigen::MatrixXd& x, const Eigen::VectorXd& sigmas) const;

  /// mean_b lambda_b * 0.5 * |S(noisy_b, sigma_b) - target_b|^2, and its
  /// gradient with respect to parameters() when `gradient` is non-null.
  double regression_loss(const Eigen::MatrixXd& noisy, const Eigen::MatrixXd& target, const Eigen::VectorXd& sigmas,
                         const Eigen::VectorXd& lambdas, Eigen::VectorXd* gradient) const;

  Index parameter_count() const;
  /// All weights then biases, layer by layer, weights row-major.
  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::Ref<const Eigen::VectorXd>& theta);

  /// Layer widths including input (D+1) and output (D).
  std::vector<Index> widths() const;
  const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
  const std::vector<Eigen::VectorXd>& biases() const { return biases_; }

 private:
  Eigen::MatrixXd forward(const Eigen::MatrixXd& input, std::vector<Eigen::MatrixXd>* activations) const;
  Eigen::MatrixXd make_input(const Eigen::MatrixXd& x, const Eigen::VectorXd& sigmas) const;

  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::VectorXd> biases_;
};

/// Stochastic estimate of the multi-level DSM objective:
///   mean_b lambda(sigma_b) * 0.5 * |S(x_b + sigma_b z_b, sigma_b) + z_b / sigma_b|^2
/// with sigma_b drawn uniformly from `sigmas` and z_b ~ N(0, I).
/// `clean` holds one sample per column.
double dsm_loss(const ScoreModel& model, const Eigen::MatrixXd& clean, const std::vector<double>& sigmas,
                LambdaRule rule, Rng& rng);

struct DsmConfig {
  std::vector<double> sigmas{1.0, 0.01};
  LambdaRule lambda = LambdaRule::SigmaSquared;
  Index batch_size = 64;
  Index iterations = 1000;
  double learning_rate = 0.005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

/// Trains `model` on `dataset` (one sample per column) with Adam on the DSM
/// objective. Per-iteration minibatch losses are appended to `loss_history`
/// when given. Throws NumericalError if the loss becomes non-finite.
MlpScore train_mlp(MlpScore model, const Eigen::MatrixXd& dataset, const DsmConfig& config, Rng& rng,
                   std::vector<double>* loss_history = nullptr);

}  // namespace wacm
