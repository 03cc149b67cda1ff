// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "wacm/sampler.hpp"

namespace wacm {

using KeyValues = std::map<std::string, std::string>;

/// Parses "key = value" lines. Blank lines and '#' comments are ignored.
KeyValues parse_key_values(const std::string& text);
KeyValues load_key_values(const std::filesystem::path& path);

/// Applies recognised sampler keys (sigma_begin, sigma_end, levels,
/// steps_per_level, epsilon, w1, w2, seed, gray_op, dc_broadcast) on top of
/// `base`. Unknown keys are an error.
SamplerConfig apply_sampler_keys(const KeyValues& kv, SamplerConfig base = {});

/// The config as key-value text, readable by parse_key_values.
std::string to_key_values(const SamplerConfig& config);

}  // namespace wacm
