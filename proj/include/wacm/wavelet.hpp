// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

#include <array>
#include <string>

#include "wacm/error.hpp"
#include "wacm/image.hpp"

namespace wacm {

enum Band : Index { kApprox = 0, kHorizontal = 1, kVertical = 2, kDiagonal = 3 };

inline constexpr Index kBandsPerColor = 4;
inline constexpr Index kStackChannels = 12;

/// Single-level Haar sub-bands of one plane, each at half resolution.
template <typename Scalar>
struct WaveletBands {
  Plane<Scalar> cA, cH, cV, cD;

  Index rows() const { return cA.rows(); }
  Index cols() const { return cA.cols(); }

  const Plane<Scalar>& band(Index b) const {
    switch (b) {
      case kApprox: return cA;
      case kHorizontal: return cH;
      case kVertical: return cV;
      default: return cD;
    }
  }
  Plane<Scalar>& band(Index b) {
    return const_cast<Plane<Scalar>&>(static_cast<const WaveletBands&>(*this).band(b));
  }

  bool consistent() const {
    const auto same = [&](const Plane<Scalar>& p) { return p.rows() == rows() && p.cols() == cols(); };
    return same(cH) && same(cV) && same(cD);
  }
};

/// Haar analysis of a plane with even dimensions. For each 2x2 block
/// [[a,b],[c,d]]:
///   cA = ((a+b)+(c+d))/2   cH = ((a+b)-(c+d))/2
///   cV = ((a-b)+(c-d))/2   cD = ((a-b)-(c-d))/2
template <typename Derived>
WaveletBands<typename Derived::Scalar> dwt2_haar(const Eigen::MatrixBase<Derived>& plane) {
  using Scalar = typename Derived::Scalar;
  const Index h = plane.rows(), w = plane.cols();
  if (h < 2 || w < 2 || h % 2 != 0 || w % 2 != 0)
    throw ValidationError("Haar DWT needs even height and width >= 2, got " + std::to_string(h) + "x" +
                          std::to_string(w));
  const Index hh = h / 2, hw = w / 2;
  WaveletBands<Scalar> out{Plane<Scalar>(hh, hw), Plane<Scalar>(hh, hw), Plane<Scalar>(hh, hw),
                           Plane<Scalar>(hh, hw)};
  for (Index i = 0; i < hh; ++i) {
    for (Index j = 0; j < hw; ++j) {
      const Scalar a = plane(2 * i, 2 * j), b = plane(2 * i, 2 * j + 1);
      const Scalar c = plane(2 * i + 1, 2 * j), d = plane(2 * i + 1, 2 * j + 1);
      out.cA(i, j) = ((a + b) + (c + d)) / Scalar(2);
      out.cH(i, j) = ((a + b) - (c + d)) / Scalar(2);
      out.cV(i, j) = ((a - b) + (c - d)) / Scalar(2);
      out.cD(i, j) = ((a - b) - (c - d)) / Scalar(2);
    }
  }
  return out;
}

/// Exact inverse of dwt2_haar.
template <typename Scalar>
Plane<Scalar> idwt2_haar(const WaveletBands<Scalar>& bands) {
  if (!bands.consistent()) throw ValidationError("Haar IDWT: band dimensions differ");
  const Index hh = bands.rows(), hw = bands.cols();
  Plane<Scalar> out(2 * hh, 2 * hw);
  for (Index i = 0; i < hh; ++i) {
    for (Index j = 0; j < hw; ++j) {
      const Scalar A = bands.cA(i, j), H = bands.cH(i, j), V = bands.cV(i, j), D = bands.cD(i, j);
      out(2 * i, 2 * j) = ((A + H) + (V + D)) / Scalar(2);
      out(2 * i, 2 * j + 1) = ((A + H) - (V + D)) / Scalar(2);
      out(2 * i + 1, 2 * j) = ((A - H) + (V - D)) / Scalar(2);
      out(2 * i + 1, 2 * j + 1) = ((A - H) - (V - D)) / Scalar(2);
    }
  }
  return out;
}

/// The 12-channel wavelet tensor [cA_R,cH_R,cV_R,cD_R, cA_G,..., cD_B] at half
/// resolution. Stored as a row-major 12 x (rows*cols) matrix so that the flat
/// layout is channel-major, row-major within a channel.
template <typename Scalar>
class BasicWaveletStack {
 public:
  using Storage = Eigen::Matrix<Scalar, kStackChannels, Eigen::Dynamic, Eigen::RowMajor>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using ChannelMap = Eigen::Map<Plane<Scalar>>;
  using ConstChannelMap = Eigen::Map<const Plane<Scalar>>;

  BasicWaveletStack() = default;
  BasicWaveletStack(Index rows, Index cols) : rows_(rows), cols_(cols), data_(Storage::Zero(kStackChannels, rows * cols)) {
    if (rows < 1 || cols < 1) throw ValidationError("wavelet stack needs positive spatial size");
  }

  static BasicWaveletStack from_flat(const Eigen::Ref<const Vector>& flat, Index rows, Index cols) {
    BasicWaveletStack s(rows, cols);
    if (flat.size() != s.size())
      throw ValidationError("flat vector of size " + std::to_string(flat.size()) + " does not fit a 12x" +
                            std::to_string(rows) + "x" + std::to_string(cols) + " stack");
    s.flat() = flat;
    return s;
  }

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index size() const { return kStackChannels * rows_ * cols_; }

  static Index channel_index(Index color, Index band) { return color * kBandsPerColor + band; }

  ChannelMap channel(Index k) { return ChannelMap(data_.row(k).data(), rows_, cols_); }
  ConstChannelMap channel(Index k) const { return ConstChannelMap(data_.row(k).data(), rows_, cols_); }

  Eigen::Map<Vector> flat() { return Eigen::Map<Vector>(data_.data(), size()); }
  Eigen::Map<const Vector> flat() const { return Eigen::Map<const Vector>(data_.data(), size()); }

  Storage& data() { return data_; }
  const Storage& data() const { return data_; }

  WaveletBands<Scalar> color_bands(Index color) const {
    return {channel(channel_index(color, kApprox)), channel(channel_index(color, kHorizontal)),
            channel(channel_index(color, kVertical)), channel(channel_index(color, kDiagonal))};
  }

  bool operator==(const BasicWaveletStack& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  Storage data_;
};

using WaveletStack = BasicWaveletStack<double>;

template <typename Scalar>
BasicWaveletStack<Scalar> stack(const BasicImage<Scalar>& img) {
  if (img.channels() != 3)
    throw ValidationError("wavelet stack needs a 3-channel image, got " + std::to_string(img.channels()));
  if (img.height() % 2 != 0 || img.width() % 2 != 0)
    throw ValidationError("wavelet stack needs even height and width, got " + std::to_string(img.height()) +
                          "x" + std::to_string(img.width()));
  BasicWaveletStack<Scalar> X(img.height() / 2, img.width() / 2);
  for (Index color = 0; color < 3; ++color) {
    const auto bands = dwt2_haar(img.plane(color));
    for (Index b = 0; b < kBandsPerColor; ++b) X.channel(X.channel_index(color, b)) = bands.band(b);
  }
  return X;
}

template <typename Scalar>
BasicImage<Scalar> unstack(const BasicWaveletStack<Scalar>& X) {
  if (X.data().rows() != kStackChannels) throw ValidationError("unstack needs 12 channels");
  std::vector<Plane<Scalar>> planes;
  for (Index color = 0; color < 3; ++color) planes.push_back(idwt2_haar(X.color_bands(color)));
  return BasicImage<Scalar>::from_planes(std::move(planes));
}

/// W(y) for a 1-channel image.
template <typename Scalar>
WaveletBands<Scalar> gray_wavelet(const BasicImage<Scalar>& y) {
  if (y.channels() != 1)
    throw ValidationError("gray_wavelet expects a 1-channel image, got " + std::to_string(y.channels()));
  return dwt2_haar(y.plane(0));
}

/// F applied across the colors of a stack, band by band: F(W(x)).
template <typename Scalar>
WaveletBands<Scalar> project_gray(const BasicWaveletStack<Scalar>& X, const GrayOp& op) {
  WaveletBands<Scalar> out;
  for (Index b = 0; b < kBandsPerColor; ++b) {
    out.band(b) = Scalar(op.weights[0]) * X.channel(X.channel_index(0, b)) +
                  Scalar(op.weights[1]) * X.channel(X.channel_index(1, b)) +
                  Scalar(op.weights[2]) * X.channel(X.channel_index(2, b));
  }
  return out;
}

}  // namespace wacm
