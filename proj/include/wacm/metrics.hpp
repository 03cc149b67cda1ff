// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <limits>
#include <string>
#include <vector>

#include "wacm/image.hpp"

namespace wacm {

/// Returned by psnr() for identical images.
inline constexpr double kPsnrInfinite = std::numeric_limits<double>::infinity();

/// 10 log10(peak^2 / MSE), MSE over every channel and pixel.
double psnr(const Image& a, const Image& b, double peak = 1.0);

/// Mean SSIM over all fully contained 11x11 Gaussian windows (sigma 1.5),
/// K1 = 0.01, K2 = 0.03, dynamic range 1. Color images average the
/// per-channel means.
double ssim(const Image& a, const Image& b);

struct MetricRow {
  std::string label;
  double psnr_db = 0.0;
  double ssim = 0.0;
};

struct MetricReport {
  std::vector<MetricRow> rows;
  double mean_psnr_db = 0.0;
  double mean_ssim = 0.0;

  void add(std::string label, const Image& reference, const Image& candidate);
};

/// "inf" for the infinite sentinel, otherwise fixed with 6 decimals.
std::string format_metric(double v);

}  // namespace wacm
