// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "wacm/image.hpp"

namespace wacm {

/// Loads binary PGM (P5) / PPM (P6) with maxval 255, or 8-bit gray/RGB PNG.
/// The format is detected from the file's magic bytes. Byte v maps to v/255.
Image load_raster(const std::filesystem::path& path);

/// Saves by extension: .pgm/.ppm/.pnm (binary PNM) or .png. Values are
/// clamped to [0,1] and rounded to the nearest of 256 levels.
void save_raster(const Image& img, const std::filesystem::path& path);

/// In-memory codecs behind load_raster/save_raster.
Image decode_pnm(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> encode_pnm(const Image& img);
Image decode_png(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> encode_png(const Image& img);

/// round(clamp(v,0,1)*255)
std::uint8_t quantize(double v);

}  // namespace wacm
