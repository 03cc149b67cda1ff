// SPDX-License-Identifier: Apache-2.0
#include "wacm/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "wacm/error.hpp"

namespace wacm {

Rgb quantize_rgb(const Rgb& c) {
  Rgb q;
  for (std::size_t k = 0; k < 3; ++k) q[k] = std::round(std::clamp(c[k], 0.0, 1.0) * 255.0) / 255.0;
  return q;
}

double gray_of(const Rgb& c, const GrayOp& op) {
  return op.weights[0] * c[0] + op.weights[1] * c[1] + op.weights[2] * c[2];
}

Image constant_image(const Rgb& c, Index height, Index width) {
  std::vector<Plane<double>> planes;
  for (double v : c) planes.push_back(Plane<double>::Constant(height, width, v));
  return Image::from_planes(std::move(planes));
}

std::vector<Rgb> distinct_gray_colors(Index count, const GrayOp& op, Rng& rng) {
  if (count < 1) throw ValidationError("color count must be >= 1");
  std::vector<Rgb> out;
  for (Index k = 0; k < count; ++k) {
    const double target = (static_cast<double>(k) + 0.5) / static_cast<double>(count) * op.weight_sum();
    // Random chroma, shifted along (1,1,1) to the target gray; retry until in range.
    for (int attempt = 0;; ++attempt) {
      if (attempt > 10000) throw ValidationError("could not place a color at gray level " + std::to_string(target));
      Rgb c{rng.uniform(), rng.uniform(), rng.uniform()};
      const double shift = (target - gray_of(c, op)) / op.weight_sum();
      for (double& v : c) v += shift;
      if (std::all_of(c.begin(), c.end(), [](double v) { return v >= 0.0 && v <= 1.0; })) {
        out.push_back(quantize_rgb(c));
        break;
      }
    }
  }
  return out;
}

Rgb metamer_partner(const Rgb& c, const GrayOp& op) {
  const double t = (c[1] - c[0]) / op.weights[1];
  return {c[0] + t * op.weights[1], c[1] - t * op.weights[0], c[2]};
}

std::vector<std::pair<Rgb, Rgb>> metamer_pairs(Index count, const GrayOp& op, Rng& rng) {
  std::vector<std::pair<Rgb, Rgb>> out;
  for (Index k = 0; k < count; ++k) {
    for (int attempt = 0;; ++attempt) {
      if (attempt > 10000) throw ValidationError("could not generate a metamer pair");
      const Rgb a = quantize_rgb({rng.uniform(), rng.uniform(), rng.uniform()});
      if (std::abs(a[0] - a[1]) < 0.4) continue;
      const Rgb b = metamer_partner(a, op);
      if (std::all_of(b.begin(), b.end(), [](double v) { return v >= 0.0 && v <= 1.0; })) {
        out.emplace_back(a, b);
        break;
      }
    }
  }
  return out;
}

Plane<double> balanced_texture_mask(Index height, Index width, Rng& rng) {
  if (height < 2 || width < 2 || height % 2 || width % 2)
    throw ValidationError("texture mask needs even dimensions");
  const Index bh = height / 2, bw = width / 2, blocks = bh * bw;
  // Patterns 1..14 are the non-constant 2x2 binary blocks.
  std::vector<int> patterns;
  for (Index k = 0; k + 1 < blocks; k += 2) {
    const int p = 1 + static_cast<int>(rng.index(14));
    patterns.push_back(p);
    patterns.push_back(15 - p);
  }
  if (static_cast<Index>(patterns.size()) < blocks) patterns.push_back(0);
  for (std::size_t i = patterns.size(); i > 1; --i) std::swap(patterns[i - 1], patterns[rng.index(i)]);

  Plane<double> mask(height, width);
  for (Index i = 0; i < bh; ++i) {
    for (Index j = 0; j < bw; ++j) {
      const int p = patterns[static_cast<std::size_t>(i * bw + j)];
      mask(2 * i, 2 * j) = (p >> 0) & 1;
      mask(2 * i, 2 * j + 1) = (p >> 1) & 1;
      mask(2 * i + 1, 2 * j) = (p >> 2) & 1;
      mask(2 * i + 1, 2 * j + 1) = (p >> 3) & 1;
    }
  }
  return mask;
}

Image two_tone_image(const Plane<double>& mask, const Rgb& tone_a, const Rgb& tone_b) {
  std::vector<Plane<double>> planes;
  for (std::size_t c = 0; c < 3; ++c)
    planes.push_back((mask.array() * tone_a[c] + (1.0 - mask.array()) * tone_b[c]).matrix());
  return Image::from_planes(std::move(planes));
}

}  // namespace wacm
