// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

#include <array>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wacm/error.hpp"

namespace wacm {

using Eigen::Index;

/// Row-major 2-D grid of intensities.
template <typename Scalar>
using Plane = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Planar raster with 1 (gray) or 3 (RGB) channels. Nominal range is [0,1];
/// out-of-range values are allowed in intermediate results.
template <typename Scalar>
class BasicImage {
 public:
  using PlaneType = Plane<Scalar>;

  BasicImage() = default;

  BasicImage(Index channels, Index height, Index width, Scalar fill = Scalar(0)) {
    check_shape(channels, height, width);
    planes_.assign(static_cast<std::size_t>(channels), PlaneType::Constant(height, width, fill));
  }

  /// Takes ownership of planes; all must share one shape and be finite.
  static BasicImage from_planes(std::vector<PlaneType> planes) {
    if (planes.empty()) throw ValidationError("image needs at least one channel");
    const Index h = planes.front().rows();
    const Index w = planes.front().cols();
    check_shape(static_cast<Index>(planes.size()), h, w);
    for (const auto& p : planes) {
      if (p.rows() != h || p.cols() != w) throw ValidationError("image planes differ in size");
      if (!p.allFinite()) throw ValidationError("image contains non-finite values");
    }
    BasicImage img;
    img.planes_ = std::move(planes);
    return img;
  }

  Index channels() const { return static_cast<Index>(planes_.size()); }
  Index height() const { return planes_.empty() ? 0 : planes_.front().rows(); }
  Index width() const { return planes_.empty() ? 0 : planes_.front().cols(); }

  const PlaneType& plane(Index c) const { return planes_.at(static_cast<std::size_t>(c)); }
  PlaneType& plane(Index c) { return planes_.at(static_cast<std::size_t>(c)); }
  const std::vector<PlaneType>& planes() const { return planes_; }

  bool all_finite() const {
    for (const auto& p : planes_)
      if (!p.allFinite()) return false;
    return true;
  }

  bool same_shape(const BasicImage& other) const {
    return channels() == other.channels() && height() == other.height() && width() == other.width();
  }

 private:
  static void check_shape(Index channels, Index height, Index width) {
    if (channels != 1 && channels != 3)
      throw ValidationError("image must have 1 or 3 channels, got " + std::to_string(channels));
    if (height < 2 || width < 2)
      throw ValidationError("image must be at least 2x2, got " + std::to_string(height) + "x" +
                            std::to_string(width));
  }

  std::vector<PlaneType> planes_;
};

using Image = BasicImage<double>;

enum class GrayKind { Mean, Luma, LumaCorrected };

/// Pixelwise linear RGB -> gray forward operator y = sum_c weight_c * x_c.
struct GrayOp {
  GrayKind kind = GrayKind::Mean;
  std::array<double, 3> weights{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};

  static GrayOp mean() { return {GrayKind::Mean, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}}; }
  // The published coefficients, 0.58 included (they sum to 0.993).
  static GrayOp luma() { return {GrayKind::Luma, {0.299, 0.58, 0.114}}; }
  static GrayOp luma_corrected() { return {GrayKind::LumaCorrected, {0.299, 0.587, 0.114}}; }

  double weight_sum() const { return weights[0] + weights[1] + weights[2]; }
  double weight_norm2() const {
    return weights[0] * weights[0] + weights[1] * weights[1] + weights[2] * weights[2];
  }

  std::string name() const {
    switch (kind) {
      case GrayKind::Mean: return "mean";
      case GrayKind::Luma: return "luma";
      case GrayKind::LumaCorrected: return "luma-corrected";
    }
    return "mean";
  }

  static GrayOp parse(std::string_view name) {
    if (name == "mean") return mean();
    if (name == "luma") return luma();
    if (name == "luma-corrected") return luma_corrected();
    throw ValidationError("unknown gray op '" + std::string(name) +
                          "' (expected mean, luma or luma-corrected)");
  }
};

template <typename Scalar>
BasicImage<Scalar> to_gray(const BasicImage<Scalar>& img, const GrayOp& op) {
  if (img.channels() != 3)
    throw ValidationError("to_gray expects a 3-channel image, got " + std::to_string(img.channels()));
  Plane<Scalar> y = Scalar(op.weights[0]) * img.plane(0) + Scalar(op.weights[1]) * img.plane(1) +
                    Scalar(op.weights[2]) * img.plane(2);
  return BasicImage<Scalar>::from_planes({std::move(y)});
}

template <typename Scalar>
BasicImage<Scalar> clamp(const BasicImage<Scalar>& img, Scalar lo, Scalar hi) {
  if (!(lo <= hi)) throw ValidationError("clamp requires lo <= hi");
  std::vector<Plane<Scalar>> out;
  out.reserve(static_cast<std::size_t>(img.channels()));
  for (const auto& p : img.planes()) out.push_back(p.cwiseMax(lo).cwiseMin(hi));
  return BasicImage<Scalar>::from_planes(std::move(out));
}

/// Drops the last row/column when odd so both dimensions become even.
template <typename Scalar>
BasicImage<Scalar> crop_to_even(const BasicImage<Scalar>& img) {
  const Index h = img.height() - img.height() % 2;
  const Index w = img.width() - img.width() % 2;
  const Index top = (img.height() - h) / 2;
  const Index left = (img.width() - w) / 2;
  std::vector<Plane<Scalar>> out;
  for (const auto& p : img.planes()) out.push_back(p.block(top, left, h, w));
  return BasicImage<Scalar>::from_planes(std::move(out));
}

}  // namespace wacm
