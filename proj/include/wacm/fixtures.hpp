// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <utility>
#include <vector>

#include "wacm/image.hpp"
#include "wacm/random.hpp"

namespace wacm {

using Rgb = std::array<double, 3>;

/// Snaps each component to the nearest multiple of 1/255.
Rgb quantize_rgb(const Rgb& c);
double gray_of(const Rgb& c, const GrayOp& op);

Image constant_image(const Rgb& c, Index height, Index width);

/// K colors whose gray levels under `op` sit near (k + 0.5) / K, so every
/// pair differs in gray by about 1/K. Components are on the 1/255 grid.
std::vector<Rgb> distinct_gray_colors(Index count, const GrayOp& op, Rng& rng);

/// A second color with the same gray as `c` under `op`, moving only R and
/// G: for the mean operator this swaps R and G.
Rgb metamer_partner(const Rgb& c, const GrayOp& op);

/// Random metamer pairs with |R - G| >= 0.4 and both colors in [0,1].
std::vector<std::pair<Rgb, Rgb>> metamer_pairs(Index count, const GrayOp& op, Rng& rng);

/// Binary mask built from 2x2 blocks where every random block pattern is
/// placed together with its complement, so the Haar detail bands of the mask
/// sum to zero. Requires even dimensions.
Plane<double> balanced_texture_mask(Index height, Index width, Rng& rng);

/// tone_a where mask is 1, tone_b elsewhere.
Image two_tone_image(const Plane<double>& mask, const Rgb& tone_a, const Rgb& tone_b);

}  // namespace wacm
