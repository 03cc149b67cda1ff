// SPDX-License-Identifier: Apache-2.0
#include "wacm/config.hpp"

#include <charconv>
#include <sstream>

#include "wacm/error.hpp"
#include "wacm/io_util.hpp"

namespace wacm {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw ValidationError("config key '" + key + "' expects a number, got '" + v + "'");
}

long long to_integer(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ValidationError("config key '" + key + "' expects an integer, got '" + v + "'");
  return out;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ValidationError("config line " + std::to_string(lineno) + ": empty key or value");
    kv[key] = value;
  }
  return kv;
}

KeyValues load_key_values(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return parse_key_values(std::string(bytes.begin(), bytes.end()));
}

SamplerConfig apply_sampler_keys(const KeyValues& kv, SamplerConfig c) {
  for (const auto& [key, value] : kv) {
    if (key == "sigma_begin") c.sigma_begin = to_double(key, value);
    else if (key == "sigma_end") c.sigma_end = to_double(key, value);
    else if (key == "levels") c.levels = to_integer(key, value);
    else if (key == "steps_per_level") c.steps_per_level = to_integer(key, value);
    else if (key == "epsilon") c.epsilon = to_double(key, value);
    else if (key == "w1") c.w1 = value == "auto" ? std::nullopt : std::optional<double>(to_double(key, value));
    else if (key == "w2") c.w2 = to_double(key, value);
    else if (key == "seed") {
      const auto s = to_integer(key, value);
      if (s < 0) throw ValidationError("seed must be non-negative");
      c.seed = static_cast<std::uint64_t>(s);
    }
    else if (key == "gray_op") c.gray_op = GrayOp::parse(value);
    else if (key == "dc_broadcast") c.dc_broadcast = parse_dc_broadcast(value);
    else throw ValidationError("unknown config key '" + key + "'");
  }
  c.validate();
  return c;
}

std::string to_key_values(const SamplerConfig& c) {
  std::ostringstream os;
  os << "sigma_begin = " << format_double(c.sigma_begin) << "\n"
     << "sigma_end = " << format_double(c.sigma_end) << "\n"
     << "levels = " << c.levels << "\n"
     << "steps_per_level = " << c.steps_per_level << "\n"
     << "epsilon = " << format_double(c.epsilon) << "\n"
     << "w1 = " << (c.w1 ? format_double(*c.w1) : std::string("auto")) << "\n"
     << "w2 = " << format_double(c.w2) << "\n"
     << "seed = " << c.seed << "\n"
     << "gray_op = " << c.gray_op.name() << "\n"
     << "dc_broadcast = " << to_string(c.dc_broadcast) << "\n";
  return os.str();
}

}  // namespace wacm
