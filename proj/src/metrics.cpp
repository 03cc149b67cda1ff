// SPDX-License-Identifier: Apache-2.0
#include "wacm/metrics.hpp"

#include <cmath>
#include <cstdio>

#include "wacm/error.hpp"

namespace wacm {

namespace {

constexpr Index kWindow = 11;
constexpr double kWindowSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

void check_pair(const Image& a, const Image& b) {
  if (!a.same_shape(b))
    throw ValidationError("image shapes differ: " + std::to_string(a.channels()) + "x" + std::to_string(a.height()) +
                          "x" + std::to_string(a.width()) + " vs " + std::to_string(b.channels()) + "x" +
                          std::to_string(b.height()) + "x" + std::to_string(b.width()));
}

Eigen::VectorXd gaussian_taps() {
  Eigen::VectorXd g(kWindow);
  const double mid = (kWindow - 1) / 2.0;
  for (Index i = 0; i < kWindow; ++i) g[i] = std::exp(-(i - mid) * (i - mid) / (2.0 * kWindowSigma * kWindowSigma));
  return g / g.sum();
}

// Separable "valid" Gaussian filter.
Eigen::MatrixXd filter_valid(const Eigen::MatrixXd& p, const Eigen::VectorXd& g) {
  const Index oh = p.rows() - kWindow + 1, ow = p.cols() - kWindow + 1;
  Eigen::MatrixXd rows(p.rows(), ow);
  for (Index j = 0; j < ow; ++j) rows.col(j) = p.middleCols(j, kWindow) * g;
  Eigen::MatrixXd out(oh, ow);
  for (Index i = 0; i < oh; ++i) out.row(i) = g.transpose() * rows.middleRows(i, kWindow);
  return out;
}

double ssim_plane(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const Eigen::VectorXd& g) {
  const Eigen::ArrayXXd mx = filter_valid(x, g).array();
  const Eigen::ArrayXXd my = filter_valid(y, g).array();
  const Eigen::ArrayXXd sxx = filter_valid(x.cwiseProduct(x), g).array() - mx.square();
  const Eigen::ArrayXXd syy = filter_valid(y.cwiseProduct(y), g).array() - my.square();
  const Eigen::ArrayXXd sxy = filter_valid(x.cwiseProduct(y), g).array() - mx * my;
  const Eigen::ArrayXXd map = ((2.0 * mx * my + kC1) * (2.0 * sxy + kC2)) /
                              ((mx.square() + my.square() + kC1) * (sxx + syy + kC2));
  return map.mean();
}

}  // namespace

double psnr(const Image& a, const Image& b, double peak) {
  check_pair(a, b);
  if (!(peak > 0.0)) throw ValidationError("PSNR peak must be positive");
  double sse = 0.0;
  for (Index c = 0; c < a.channels(); ++c) sse += (a.plane(c) - b.plane(c)).squaredNorm();
  const double mse = sse / static_cast<double>(a.channels() * a.height() * a.width());
  if (mse == 0.0) return kPsnrInfinite;
  return 10.0 * std::log10(peak * peak / mse);
}

double ssim(const Image& a, const Image& b) {
  check_pair(a, b);
  if (a.height() < kWindow || a.width() < kWindow)
    throw ValidationError("SSIM needs images of at least 11x11 pixels");
  const Eigen::VectorXd g = gaussian_taps();
  double total = 0.0;
  for (Index c = 0; c < a.channels(); ++c) total += ssim_plane(a.plane(c), b.plane(c), g);
  return total / static_cast<double>(a.channels());
}

void MetricReport::add(std::string label, const Image& reference, const Image& candidate) {
  rows.push_back({std::move(label), psnr(reference, candidate), ssim(reference, candidate)});
  double p = 0.0, s = 0.0;
  for (const auto& r : rows) {
    p += r.psnr_db;
    s += r.ssim;
  }
  mean_psnr_db = p / static_cast<double>(rows.size());
  mean_ssim = s / static_cast<double>(rows.size());
}

std::string format_metric(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace wacm
