// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "wacm/wavelet.hpp"

namespace wacm {

/// Dense real tensor as stored on disk: "WACM", u32 version, u32 rank,
/// rank x u64 dims, then little-endian f64 values in row-major order.
struct Tensor {
  std::vector<std::uint64_t> dims;
  std::vector<double> values;
};

inline constexpr std::uint32_t kTensorFormatVersion = 1;

std::vector<std::uint8_t> encode_tensor(const Tensor& t);
Tensor decode_tensor(const std::vector<std::uint8_t>& bytes);

void save_tensor(const Tensor& t, const std::filesystem::path& path);
Tensor load_tensor(const std::filesystem::path& path);

/// Shape (12, rows, cols).
Tensor to_tensor(const WaveletStack& X);
WaveletStack stack_from_tensor(const Tensor& t);

/// Shape (4, rows, cols), bands in cA, cH, cV, cD order.
Tensor to_tensor(const WaveletBands<double>& bands);
WaveletBands<double> bands_from_tensor(const Tensor& t);

}  // namespace wacm
