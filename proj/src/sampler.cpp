// SPDX-License-Identifier: Apache-2.0
#include "wacm/sampler.hpp"

#include <cmath>
#include <string>

#include "wacm/error.hpp"

namespace wacm {

NoiseSchedule make_schedule(double sigma_begin, double sigma_end, Index levels) {
  if (levels < 2) throw ValidationError("noise schedule needs at least 2 levels");
  if (!(sigma_end > 0.0) || !(sigma_begin > sigma_end) || !std::isfinite(sigma_begin))
    throw ValidationError("noise schedule needs sigma_begin > sigma_end > 0");
  const double ratio = std::pow(sigma_end / sigma_begin, 1.0 / static_cast<double>(levels - 1));
  NoiseSchedule s;
  s.sigmas.reserve(static_cast<std::size_t>(levels));
  for (Index i = 0; i < levels; ++i) s.sigmas.push_back(sigma_begin * std::pow(ratio, static_cast<double>(i)));
  s.sigmas.back() = sigma_end;
  return s;
}

double step_size(double epsilon, double sigma_i, double sigma_last) {
  if (!(epsilon > 0.0) || !(sigma_i > 0.0) || !(sigma_last > 0.0))
    throw ValidationError("step size needs positive epsilon and noise levels");
  return epsilon * sigma_i * sigma_i / (sigma_last * sigma_last);
}

DcBroadcast parse_dc_broadcast(const std::string& name) {
  if (name == "adjoint") return DcBroadcast::Adjoint;
  if (name == "replicate") return DcBroadcast::Replicate;
  throw ValidationError("unknown dc_broadcast '" + name + "' (expected adjoint or replicate)");
}

std::string to_string(DcBroadcast b) { return b == DcBroadcast::Adjoint ? "adjoint" : "replicate"; }

DcContext make_dc_context(const Image& gray, const GrayOp& op, DcBroadcast broadcast) {
  return DcContext{gray_wavelet(gray), op, broadcast};
}

void SamplerConfig::validate() const {
  if (levels < 2) throw ValidationError("levels must be >= 2");
  if (steps_per_level < 1) throw ValidationError("steps_per_level must be >= 1");
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be > 0");
  if (!(w2 >= 0.0)) throw ValidationError("w2 must be >= 0");
  if (w1 && !(*w1 >= 0.0)) throw ValidationError("w1 must be >= 0");
  if (!(sigma_end > 0.0) || !(sigma_begin > sigma_end)) throw ValidationError("need sigma_begin > sigma_end > 0");
}

namespace {

void check_match(const WaveletStack& X, const WaveletBands<double>& wy) {
  if (!wy.consistent() || wy.rows() != X.rows() || wy.cols() != X.cols())
    throw ValidationError("gray wavelet bands are " + std::to_string(wy.rows()) + "x" + std::to_string(wy.cols()) +
                          " but the stack is " + std::to_string(X.rows()) + "x" + std::to_string(X.cols()));
}

}  // namespace

WaveletStack dc_residual(const WaveletStack& X, const DcContext& ctx) {
  check_match(X, ctx.wy);
  const auto fx = project_gray(X, ctx.op);
  WaveletStack out(X.rows(), X.cols());
  for (Index b = 0; b < kBandsPerColor; ++b) {
    const Plane<double> r = fx.band(b) - ctx.wy.band(b);
    for (Index c = 0; c < 3; ++c) {
      const double scale = ctx.broadcast == DcBroadcast::Adjoint ? ctx.op.weights[static_cast<std::size_t>(c)] : 1.0;
      out.channel(WaveletStack::channel_index(c, b)) = scale * r;
    }
  }
  return out;
}

WaveletStack langevin_step(const WaveletStack& X, double sigma, double alpha, const ScoreModel& model,
                           const DcContext* ctx, double w1, const Eigen::Ref<const Eigen::VectorXd>& noise) {
  if (!(alpha > 0.0)) throw ValidationError("Langevin step size must be > 0");
  if (model.dim() != X.size())
    throw ValidationError("score model dimension " + std::to_string(model.dim()) + " does not match stack size " +
                          std::to_string(X.size()));
  if (noise.size() != X.size()) throw ValidationError("noise vector has the wrong size");
  const Eigen::VectorXd s = model.score(X.flat(), sigma);
  if (!s.allFinite())
    throw NumericalError("score model returned non-finite values at sigma=" + std::to_string(sigma));
  WaveletStack next = X;
  next.flat() += (0.5 * alpha) * s + std::sqrt(alpha) * noise;
  if (ctx) next.flat() -= w1 * dc_residual(X, *ctx).flat();
  return next;
}

WaveletStack langevin_step(const WaveletStack& X, double sigma, double alpha, const ScoreModel& model,
                           const DcContext* ctx, double w1, Rng& rng) {
  return langevin_step(X, sigma, alpha, model, ctx, w1, rng.normal_vector(X.size()));
}

WaveletStack sc_apply(const WaveletStack& X, const WaveletBands<double>& wy, double w2) {
  check_match(X, wy);
  WaveletStack out = X;
  for (Index c = 0; c < 3; ++c) {
    for (Index b : {kHorizontal, kVertical, kDiagonal}) {
      auto ch = out.channel(WaveletStack::channel_index(c, b));
      const double offset = ch.mean() - wy.band(b).mean();
      ch.array() -= w2 * offset;
    }
  }
  return out;
}

WaveletStack anneal_sample(const SamplerConfig& config, const NoiseSchedule& schedule, const ScoreModel& model,
                           const DcContext* ctx) {
  if (schedule.sigmas.empty()) throw ValidationError("empty noise schedule");
  if (config.steps_per_level < 1 || !(config.epsilon > 0.0) || !(config.w2 >= 0.0))
    throw ValidationError("invalid sampler configuration");

  const Resolution& res = model.resolution();
  Index rows = 0, cols = 0;
  if (ctx) {
    rows = ctx->wy.rows();
    cols = ctx->wy.cols();
    if (res.dim() != kStackChannels * rows * cols)
      throw ValidationError("model resolution " + res.to_string() + " does not match the " + std::to_string(rows) +
                            "x" + std::to_string(cols) + "x12 stack of the input");
  } else {
    if (res.channels == kStackChannels) {
      rows = res.rows;
      cols = res.cols;
    } else if (res.dim() % kStackChannels == 0) {
      rows = 1;
      cols = res.dim() / kStackChannels;
    } else {
      throw ValidationError("model resolution " + res.to_string() + " is not a wavelet stack shape");
    }
  }

  Rng rng(config.seed);
  WaveletStack X(rows, cols);
  X.flat() = rng.uniform_vector(X.size(), -1.0, 1.0);
  for (double sigma : schedule.sigmas) {
    const double alpha = step_size(config.epsilon, sigma, schedule.last());
    const double w1 = config.w1_for(alpha, sigma);
    for (Index t = 0; t < config.steps_per_level; ++t) X = langevin_step(X, sigma, alpha, model, ctx, w1, rng);
    if (ctx) X = sc_apply(X, ctx->wy, config.w2);
  }
  return X;
}

std::vector<Image> colorize(const Image& gray, const ScoreModel& model, const SamplerConfig& config,
                            const NoiseSchedule& schedule, Index n_samples) {
  if (gray.channels() != 1) throw ValidationError("colorize expects a 1-channel gray image");
  if (n_samples < 1) throw ValidationError("n_samples must be >= 1");
  const DcContext ctx = make_dc_context(gray, config.gray_op, config.dc_broadcast);
  std::vector<Image> out;
  out.reserve(static_cast<std::size_t>(n_samples));
  for (Index k = 0; k < n_samples; ++k) {
    SamplerConfig chain = config;
    chain.seed = config.seed + static_cast<std::uint64_t>(k);
    out.push_back(clamp(unstack(anneal_sample(chain, schedule, model, &ctx)), 0.0, 1.0));
  }
  return out;
}

double gray_consistency_error(const Image& color, const Image& gray, const GrayOp& op) {
  const Image fx = to_gray(color, op);
  if (!fx.same_shape(gray)) throw ValidationError("gray image shape does not match the color image");
  return (fx.plane(0) - gray.plane(0)).cwiseAbs().maxCoeff();
}

}  // namespace wacm
