// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace wacm {

/// Reads a whole file; throws IoError when it cannot be opened.
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);
void write_file_atomic(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

/// 64-bit FNV-1a, hex encoded. Used as a content digest in run manifests.
std::string fnv1a_hex(const std::vector<std::uint8_t>& bytes);
std::string file_digest(const std::filesystem::path& path);

}  // namespace wacm
