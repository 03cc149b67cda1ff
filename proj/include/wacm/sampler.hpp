// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wacm/image.hpp"
#include "wacm/random.hpp"
#include "wacm/score.hpp"
#include "wacm/wavelet.hpp"

namespace wacm {

/// Strictly decreasing geometric noise levels sigma_1 > ... > sigma_L > 0.
struct NoiseSchedule {
  std::vector<double> sigmas;

  Index levels() const { return static_cast<Index>(sigmas.size()); }
  double first() const { return sigmas.front(); }
  double last() const { return sigmas.back(); }
};

/// sigma_i = sigma_begin * r^(i-1), r = (sigma_end/sigma_begin)^(1/(L-1)).
/// The last level is set to sigma_end exactly.
NoiseSchedule make_schedule(double sigma_begin, double sigma_end, Index levels);

/// alpha_i = epsilon * sigma_i^2 / sigma_L^2
double step_size(double epsilon, double sigma_i, double sigma_last);

/// How the 4-band gray residual is spread over the 12 color channels.
enum class DcBroadcast {
  Adjoint,    ///< channel (c,b) gets weight_c * r_b: the gradient of 0.5|F(X) - W(y)|^2
  Replicate,  ///< channel (c,b) gets r_b
};

DcBroadcast parse_dc_broadcast(const std::string& name);
std::string to_string(DcBroadcast b);

/// Observation for conditional sampling: the wavelet bands W(y) of the gray
/// input and the forward operator F that produced it.
struct DcContext {
  WaveletBands<double> wy;
  GrayOp op = GrayOp::mean();
  DcBroadcast broadcast = DcBroadcast::Adjoint;
};

DcContext make_dc_context(const Image& gray, const GrayOp& op, DcBroadcast broadcast = DcBroadcast::Adjoint);

struct SamplerConfig {
  double sigma_begin = 1.0;
  double sigma_end = 0.01;
  Index levels = 10;
  Index steps_per_level = 100;
  double epsilon = 1.56e-5;
  /// Fixed data-consistency weight; when unset, w1 = alpha_i / sigma_i^2.
  std::optional<double> w1;
  double w2 = 1.0;
  std::uint64_t seed = 0;
  GrayOp gray_op = GrayOp::mean();
  DcBroadcast dc_broadcast = DcBroadcast::Adjoint;

  void validate() const;
  NoiseSchedule schedule() const { return make_schedule(sigma_begin, sigma_end, levels); }
  double w1_for(double alpha, double sigma) const { return w1 ? *w1 : alpha / (sigma * sigma); }
};

/// r_b = F(X)_b - W(y)_b per band, broadcast back to 12 channels.
WaveletStack dc_residual(const WaveletStack& X, const DcContext& ctx);

/// X + alpha/2 * S(X, sigma) - w1 * DC(X) + sqrt(alpha) * noise.
/// The DC term is dropped when `ctx` is null.
WaveletStack langevin_step(const WaveletStack& X, double sigma, double alpha, const ScoreModel& model,
                           const DcContext* ctx, double w1, const Eigen::Ref<const Eigen::VectorXd>& noise);

/// Same, drawing the noise from `rng`.
WaveletStack langevin_step(const WaveletStack& X, double sigma, double alpha, const ScoreModel& model,
                           const DcContext* ctx, double w1, Rng& rng);

/// Shifts each high-frequency channel so its mean moves toward the mean of
/// the matching band of W(y): X_cb -= w2 * (mean(X_cb) - mean(Wy_b)).
/// Approximation channels are left untouched.
WaveletStack sc_apply(const WaveletStack& X, const WaveletBands<double>& wy, double w2);

/// Annealed Langevin sampling seeded from config.seed. X_0 ~ U(-1,1); for
/// each level, T Langevin steps with step alpha_i, then (with ctx only)
/// structure consistency. Without ctx the stack shape comes from the model
/// resolution.
WaveletStack anneal_sample(const SamplerConfig& config, const NoiseSchedule& schedule, const ScoreModel& model,
                           const DcContext* ctx = nullptr);

/// Colorizes a gray image: n_samples chains seeded config.seed + k, each
/// result inverse transformed and clamped to [0,1].
std::vector<Image> colorize(const Image& gray, const ScoreModel& model, const SamplerConfig& config,
                            const NoiseSchedule& schedule, Index n_samples);

/// max |F(x) - y| over pixels.
double gray_consistency_error(const Image& color, const Image& gray, const GrayOp& op);

}  // namespace wacm
