// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include "wacm/score.hpp"

namespace wacm {

// Layout: "WACMMDL", u32 version, u32 kind (1 Parzen, 2 MLP), u64 rows,
// u64 cols, u64 channels, then the payload, all little-endian.
//   Parzen: u64 count, u64 dim, count*dim f64 (one sample after another)
//   MLP:    u32 layers, (layers+1) u64 widths, then per layer the weights
//           (row-major, out x in) followed by the biases, as f64
inline constexpr std::uint32_t kModelFormatVersion = 1;
enum class ModelKind : std::uint32_t { Parzen = 1, Mlp = 2 };

/// Only ParzenScore and MlpScore are serializable.
std::vector<std::uint8_t> encode_model(const ScoreModel& model);
std::unique_ptr<ScoreModel> decode_model(const std::vector<std::uint8_t>& bytes);

void save_model(const ScoreModel& model, const std::filesystem::path& path);
std::unique_ptr<ScoreModel> load_model(const std::filesystem::path& path);

}  // namespace wacm
