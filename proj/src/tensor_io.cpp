// SPDX-License-Identifier: Apache-2.0
#include "wacm/tensor_io.hpp"

#include <string>

#include "wacm/binary_io.hpp"
#include "wacm/io_util.hpp"

namespace wacm {

namespace {

std::uint64_t element_count(const std::vector<std::uint64_t>& dims) {
  std::uint64_t n = 1;
  for (auto d : dims) {
    if (d != 0 && n > (std::uint64_t{1} << 40) / d) throw IoError("tensor dimensions are implausibly large");
    n *= d;
  }
  return n;
}

void expect_shape(const Tensor& t, std::uint64_t leading, const char* what) {
  if (t.dims.size() != 3 || t.dims[0] != leading || t.dims[1] == 0 || t.dims[2] == 0)
    throw ValidationError(std::string("tensor does not have the shape of ") + what);
}

}  // namespace

std::vector<std::uint8_t> encode_tensor(const Tensor& t) {
  if (element_count(t.dims) != t.values.size()) throw ValidationError("tensor dims do not match value count");
  ByteWriter w;
  w.magic("WACM");
  w.u32(kTensorFormatVersion);
  w.u32(static_cast<std::uint32_t>(t.dims.size()));
  for (auto d : t.dims) w.u64(d);
  for (double v : t.values) w.f64(v);
  return w.bytes();
}

Tensor decode_tensor(const std::vector<std::uint8_t>& bytes) {
  ByteReader r(bytes);
  r.expect_magic("WACM", "WACM tensor");
  const auto version = r.u32();
  if (version != kTensorFormatVersion) throw IoError("unsupported tensor format version " + std::to_string(version));
  const auto rank = r.u32();
  if (rank > 8) throw IoError("tensor rank " + std::to_string(rank) + " is not supported");
  Tensor t;
  for (std::uint32_t i = 0; i < rank; ++i) t.dims.push_back(r.u64());
  const auto n = element_count(t.dims);
  if (r.remaining() < n * 8) throw IoError("truncated tensor payload");
  t.values.resize(n);
  for (auto& v : t.values) v = r.f64();
  if (!r.at_end()) throw IoError("trailing bytes after tensor payload");
  return t;
}

void save_tensor(const Tensor& t, const std::filesystem::path& path) { write_file_atomic(path, encode_tensor(t)); }

Tensor load_tensor(const std::filesystem::path& path) { return decode_tensor(read_file(path)); }

Tensor to_tensor(const WaveletStack& X) {
  Tensor t{{kStackChannels, static_cast<std::uint64_t>(X.rows()), static_cast<std::uint64_t>(X.cols())}, {}};
  t.values.assign(X.flat().data(), X.flat().data() + X.size());
  return t;
}

WaveletStack stack_from_tensor(const Tensor& t) {
  expect_shape(t, kStackChannels, "a 12-channel wavelet stack");
  const auto rows = static_cast<Index>(t.dims[1]), cols = static_cast<Index>(t.dims[2]);
  return WaveletStack::from_flat(Eigen::Map<const Eigen::VectorXd>(t.values.data(), static_cast<Index>(t.values.size())),
                                 rows, cols);
}

Tensor to_tensor(const WaveletBands<double>& bands) {
  Tensor t{{kBandsPerColor, static_cast<std::uint64_t>(bands.rows()), static_cast<std::uint64_t>(bands.cols())}, {}};
  for (Index b = 0; b < kBandsPerColor; ++b) {
    const auto& p = bands.band(b);
    t.values.insert(t.values.end(), p.data(), p.data() + p.size());
  }
  return t;
}

WaveletBands<double> bands_from_tensor(const Tensor& t) {
  expect_shape(t, kBandsPerColor, "4 wavelet bands");
  const auto rows = static_cast<Index>(t.dims[1]), cols = static_cast<Index>(t.dims[2]);
  WaveletBands<double> out;
  for (Index b = 0; b < kBandsPerColor; ++b)
    out.band(b) = Eigen::Map<const Plane<double>>(t.values.data() + b * rows * cols, rows, cols);
  return out;
}

}  // namespace wacm
