// SPDX-License-Identifier: Apache-2.0
#include "wacm/score.hpp"

#include <cmath>
#include <string>

#include "wacm/error.hpp"

namespace wacm {

std::string Resolution::to_string() const {
  return std::to_string(rows) + "x" + std::to_string(cols) + "x" + std::to_string(channels);
}

void ScoreModel::check_input(const Eigen::Ref<const Eigen::VectorXd>& x, double sigma) const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ValidationError("score requires sigma > 0");
  if (x.size() != dim())
    throw ValidationError(kind() + " score expects dimension " + std::to_string(dim()) + ", got " +
                          std::to_string(x.size()));
}

// ---------------------------------------------------------------- Parzen

ParzenScore::ParzenScore(Eigen::MatrixXd data) : ParzenScore(data, Resolution{1, 1, data.rows()}) {}

ParzenScore::ParzenScore(Eigen::MatrixXd data, Resolution r) : ScoreModel(r), data_(std::move(data)) {
  if (data_.cols() < 1) throw ValidationError("Parzen score needs at least one sample");
  if (data_.rows() != r.dim())
    throw ValidationError("Parzen samples have dimension " + std::to_string(data_.rows()) +
                          " but the resolution " + r.to_string() + " implies " + std::to_string(r.dim()));
  if (!data_.allFinite()) throw ValidationError("Parzen dataset contains non-finite values");
}

Eigen::VectorXd ParzenScore::weights(const Eigen::Ref<const Eigen::VectorXd>& x, double sigma) const {
  check_input(x, sigma);
  const Eigen::VectorXd logits = -(data_.colwise() - x).colwise().squaredNorm().transpose() / (2.0 * sigma * sigma);
  // log-sum-exp
  const double peak = logits.maxCoeff();
  Eigen::VectorXd w = (logits.array() - peak).exp().matrix();
  return w / w.sum();
}

Eigen::VectorXd ParzenScore::score(const Eigen::Ref<const Eigen::VectorXd>& x, double sigma) const {
  const Eigen::VectorXd w = weights(x, sigma);
  return (data_ * w - x) / (sigma * sigma);
}

// ---------------------------------------------------------------- Gaussian

GaussianScore::GaussianScore(Eigen::VectorXd mean, double stddev, bool smoothed)
    : ScoreModel(Resolution{1, 1, mean.size()}), mean_(std::move(mean)), variance_(stddev * stddev), smoothed_(smoothed) {
  if (!(stddev > 0.0)) throw ValidationError("Gaussian score needs a positive standard deviation");
}

Eigen::VectorXd GaussianScore::score(const Eigen::Ref<const Eigen::VectorXd>& x, double sigma) const {
  check_input(x, sigma);
  const double var = smoothed_ ? variance_ + sigma * sigma : variance_;
  return -(x - mean_) / var;
}

double lambda_weight(LambdaRule rule, double sigma) {
  return rule == LambdaRule::SigmaSquared ? sigma * sigma : 1.0;
}

// ---------------------------------------------------------------- MLP

MlpScore::MlpScore(Resolution r, const std::vector<Index>& hidden, Rng& rng) : ScoreModel(r) {
  std::vector<Index> widths{r.dim() + 1};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(r.dim());
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const Index in = widths[l], out = widths[l + 1];
    if (in < 1 || out < 1) throw ValidationError("MLP layer widths must be positive");
    const double a = std::sqrt(6.0 / static_cast<double>(in + out));
    Eigen::MatrixXd W(out, in);
    for (Index i = 0; i < out; ++i)
      for (Index j = 0; j < in; ++j) W(i, j) = rng.uniform(-a, a);
    weights_.push_back(std::move(W));
    biases_.push_back(Eigen::VectorXd::Zero(out));
  }
}

MlpScore::MlpScore(Resolution r, std::vector<Eigen::MatrixXd> weights, std::vector<Eigen::VectorXd> biases)
    : ScoreModel(r), weights_(std::move(weights)), biases_(std::move(biases)) {
  if (weights_.empty() || weights_.size() != biases_.size()) throw ValidationError("MLP needs matching weight/bias lists");
  if (weights_.front().cols() != r.dim() + 1) throw ValidationError("MLP input width must be D+1");
  if (weights_.back().rows() != r.dim()) throw ValidationError("MLP output width must be D");
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    if (biases_[l].size() != weights_[l].rows()) throw ValidationError("MLP bias size mismatch");
    if (l > 0 && weights_[l].cols() != weights_[l - 1].rows()) throw ValidationError("MLP layer widths do not chain");
    if (!weights_[l].allFinite() || !biases_[l].allFinite()) throw ValidationError("MLP parameters must be finite");
  }
}

std::vector<Index> MlpScore::widths() const {
  std::vector<Index> w{weights_.front().cols()};
  for (const auto& W : weights_) w.push_back(W.rows());
  return w;
}

Eigen::MatrixXd MlpScore::make_input(const Eigen::MatrixXd& x, const Eigen::VectorXd& sigmas) const {
  if (x.rows() != dim() || sigmas.size() != x.cols()) throw ValidationError("MLP batch shape mismatch");
  if ((sigmas.array() <= 0.0).any()) throw ValidationError("score requires sigma > 0");
  Eigen::MatrixXd in(dim() + 1, x.cols());
  in.topRows(dim()) = x;
  in.row(dim()) = sigmas.array().log().matrix().transpose();
  return in;
}

Eigen::MatrixXd MlpScore::forward(const Eigen::MatrixXd& input, std::vector<Eigen::MatrixXd>* activations) const {
  Eigen::MatrixXd a = input;
  const std::size_t last = weights_.size() - 1;
  for (std::size_t l = 0; l < last; ++l) {
    if (activations) activations->push_back(a);
    a = ((weights_[l] * a).colwise() + biases_[l]).array().tanh().matrix();
  }
  if (activations) activations->push_back(a);
  return (weights_[last] * a).colwise() + biases_[last];
}

Eigen::MatrixXd MlpScore::score_batch(const Eigen::MatrixXd& x, const Eigen::VectorXd& sigmas) const {
  Eigen::MatrixXd out = forward(make_input(x, sigmas), nullptr);
  return out.array().rowwise() / sigmas.transpose().array();
}

Eigen::VectorXd MlpScore::score(const Eigen::Ref<const Eigen::VectorXd>& x, double sigma) const {
  check_input(x, sigma);
  return score_batch(Eigen::MatrixXd(x), Eigen::VectorXd::Constant(1, sigma)).col(0);
}

double MlpScore::regression_loss(const Eigen::MatrixXd& noisy, const Eigen::MatrixXd& target,
                                 const Eigen::VectorXd& sigmas, const Eigen::VectorXd& lambdas,
                                 Eigen::VectorXd* gradient) const {
  const Index batch = noisy.cols();
  if (batch < 1) throw ValidationError("empty batch");
  if (target.rows() != noisy.rows() || target.cols() != batch || lambdas.size() != batch)
    throw ValidationError("MLP loss batch shape mismatch");

  std::vector<Eigen::MatrixXd> acts;
  const Eigen::MatrixXd out = forward(make_input(noisy, sigmas), gradient ? &acts : nullptr);
  const Eigen::ArrayXXd inv_sigma = sigmas.transpose().array().inverse().replicate(out.rows(), 1);
  const Eigen::MatrixXd residual = (out.array() * inv_sigma - target.array()).matrix();
  const double loss = 0.5 * (residual.colwise().squaredNorm().transpose().array() * lambdas.array()).sum() /
                      static_cast<double>(batch);
  if (!gradient) return loss;

  // d loss / d out_b = lambda_b * residual_b / sigma_b / B
  Eigen::MatrixXd g = (residual.array() * inv_sigma *
                       lambdas.transpose().array().replicate(out.rows(), 1) / static_cast<double>(batch))
                          .matrix();
  std::vector<Eigen::MatrixXd> dW(weights_.size());
  std::vector<Eigen::VectorXd> db(weights_.size());
  for (std::size_t l = weights_.size(); l-- > 0;) {
    dW[l] = g * acts[l].transpose();
    db[l] = g.rowwise().sum();
    if (l > 0) g = ((weights_[l].transpose() * g).array() * (1.0 - acts[l].array().square())).matrix();
  }
  gradient->resize(parameter_count());
  Index k = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    for (Index i = 0; i < dW[l].rows(); ++i)
      for (Index j = 0; j < dW[l].cols(); ++j) (*gradient)[k++] = dW[l](i, j);
    gradient->segment(k, db[l].size()) = db[l];
    k += db[l].size();
  }
  return loss;
}

Index MlpScore::parameter_count() const {
  Index n = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) n += weights_[l].size() + biases_[l].size();
  return n;
}

Eigen::VectorXd MlpScore::parameters() const {
  Eigen::VectorXd theta(parameter_count());
  Index k = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    for (Index i = 0; i < weights_[l].rows(); ++i)
      for (Index j = 0; j < weights_[l].cols(); ++j) theta[k++] = weights_[l](i, j);
    theta.segment(k, biases_[l].size()) = biases_[l];
    k += biases_[l].size();
  }
  return theta;
}

void MlpScore::set_parameters(const Eigen::Ref<const Eigen::VectorXd>& theta) {
  if (theta.size() != parameter_count()) throw ValidationError("parameter vector has the wrong size");
  Index k = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    for (Index i = 0; i < weights_[l].rows(); ++i)
      for (Index j = 0; j < weights_[l].cols(); ++j) weights_[l](i, j) = theta[k++];
    biases_[l] = theta.segment(k, biases_[l].size());
    k += biases_[l].size();
  }
}

// ---------------------------------------------------------------- DSM

double dsm_loss(const ScoreModel& model, const Eigen::MatrixXd& clean, const std::vector<double>& sigmas,
                LambdaRule rule, Rng& rng) {
  if (clean.cols() < 1) throw ValidationError("DSM loss needs a non-empty batch");
  if (sigmas.empty()) throw ValidationError("DSM loss needs at least one noise level");
  if (clean.rows() != model.dim()) throw ValidationError("DSM batch dimension does not match the model");
  double total = 0.0;
  for (Index b = 0; b < clean.cols(); ++b) {
    const double sigma = sigmas[rng.index(sigmas.size())];
    const Eigen::VectorXd z = rng.normal_vector(clean.rows());
    const Eigen::VectorXd noisy = clean.col(b) + sigma * z;
    const Eigen::VectorXd r = model.score(noisy, sigma) + z / sigma;
    total += lambda_weight(rule, sigma) * 0.5 * r.squaredNorm();
  }
  return total / static_cast<double>(clean.cols());
}

void DsmConfig::validate() const {
  if (sigmas.empty()) throw ValidationError("DSM config needs at least one noise level");
  for (double s : sigmas)
    if (!(s > 0.0)) throw ValidationError("noise levels must be positive");
  if (batch_size < 1) throw ValidationError("batch size must be positive");
  if (iterations < 0) throw ValidationError("iteration count must be non-negative");
  if (!(learning_rate > 0.0) || !(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0) || !(epsilon > 0.0))
    throw ValidationError("invalid optimizer hyperparameters");
}

namespace {

/// Bias-corrected adaptive moment steps on a flat parameter vector.
class Adam {
 public:
  Adam(Index n, const DsmConfig& c)
      : m_(Eigen::VectorXd::Zero(n)), v_(Eigen::VectorXd::Zero(n)), lr_(c.learning_rate), b1_(c.beta1), b2_(c.beta2), eps_(c.epsilon) {}

  void step(Eigen::VectorXd& theta, const Eigen::VectorXd& grad) {
    ++t_;
    m_ = b1_ * m_ + (1.0 - b1_) * grad;
    v_ = b2_ * v_ + (1.0 - b2_) * grad.cwiseAbs2();
    const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
    theta.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
  }

 private:
  Eigen::VectorXd m_, v_;
  double lr_, b1_, b2_, eps_;
  long t_ = 0;
};

}  // namespace

MlpScore train_mlp(MlpScore model, const Eigen::MatrixXd& dataset, const DsmConfig& config, Rng& rng,
                   std::vector<double>* loss_history) {
  config.validate();
  if (dataset.cols() < 1) throw ValidationError("training dataset is empty");
  if (dataset.rows() != model.dim())
    throw ValidationError("training samples have dimension " + std::to_string(dataset.rows()) + ", model expects " +
                          std::to_string(model.dim()));
  if (config.iterations == 0) return model;

  const Index D = model.dim(), B = config.batch_size;
  Eigen::VectorXd theta = model.parameters();
  Adam adam(theta.size(), config);
  Eigen::MatrixXd noisy(D, B), target(D, B);
  Eigen::VectorXd sigmas(B), lambdas(B), grad;

  for (Index it = 0; it < config.iterations; ++it) {
    for (Index b = 0; b < B; ++b) {
      const auto j = static_cast<Index>(rng.index(static_cast<std::uint64_t>(dataset.cols())));
      const double sigma = config.sigmas[rng.index(config.sigmas.size())];
      const Eigen::VectorXd z = rng.normal_vector(D);
      noisy.col(b) = dataset.col(j) + sigma * z;
      target.col(b) = -z / sigma;
      sigmas[b] = sigma;
      lambdas[b] = lambda_weight(config.lambda, sigma);
    }
    const double loss = model.regression_loss(noisy, target, sigmas, lambdas, &grad);
    if (!std::isfinite(loss) || !grad.allFinite())
      throw NumericalError("DSM training diverged at iteration " + std::to_string(it) + " (loss " +
                           std::to_string(loss) + ")");
    if (loss_history) loss_history->push_back(loss);
    adam.step(theta, grad);
    model.set_parameters(theta);
  }
  return model;
}

}  // namespace wacm
