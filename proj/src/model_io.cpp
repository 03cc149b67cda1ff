// SPDX-License-Identifier: Apache-2.0
#include "wacm/model_io.hpp"

#include <string>

#include "wacm/binary_io.hpp"
#include "wacm/error.hpp"
#include "wacm/io_util.hpp"

namespace wacm {

namespace {

constexpr std::uint64_t kMaxDim = std::uint64_t{1} << 32;

Index checked_dim(std::uint64_t v, const char* what) {
  if (v == 0 || v > kMaxDim) throw IoError(std::string("model file has an invalid ") + what);
  return static_cast<Index>(v);
}

void write_matrix(ByteWriter& w, const Eigen::MatrixXd& m) {
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) w.f64(m(i, j));
}

}  // namespace

std::vector<std::uint8_t> encode_model(const ScoreModel& model) {
  ByteWriter w;
  w.magic("WACMMDL");
  w.u32(kModelFormatVersion);
  const auto* parzen = dynamic_cast<const ParzenScore*>(&model);
  const auto* mlp = dynamic_cast<const MlpScore*>(&model);
  if (!parzen && !mlp) throw ValidationError("score model of kind '" + model.kind() + "' cannot be saved");
  w.u32(static_cast<std::uint32_t>(parzen ? ModelKind::Parzen : ModelKind::Mlp));
  const auto& r = model.resolution();
  w.u64(static_cast<std::uint64_t>(r.rows));
  w.u64(static_cast<std::uint64_t>(r.cols));
  w.u64(static_cast<std::uint64_t>(r.channels));
  if (parzen) {
    const auto& data = parzen->data();
    w.u64(static_cast<std::uint64_t>(data.cols()));
    w.u64(static_cast<std::uint64_t>(data.rows()));
    for (Index j = 0; j < data.cols(); ++j)
      for (Index i = 0; i < data.rows(); ++i) w.f64(data(i, j));
  } else {
    const auto widths = mlp->widths();
    w.u32(static_cast<std::uint32_t>(mlp->weights().size()));
    for (auto width : widths) w.u64(static_cast<std::uint64_t>(width));
    for (std::size_t l = 0; l < mlp->weights().size(); ++l) {
      write_matrix(w, mlp->weights()[l]);
      for (Index i = 0; i < mlp->biases()[l].size(); ++i) w.f64(mlp->biases()[l][i]);
    }
  }
  return w.bytes();
}

std::unique_ptr<ScoreModel> decode_model(const std::vector<std::uint8_t>& bytes) {
  ByteReader r(bytes);
  r.expect_magic("WACMMDL", "WACM model");
  const auto version = r.u32();
  if (version != kModelFormatVersion) throw IoError("unsupported model format version " + std::to_string(version));
  const auto kind = r.u32();
  Resolution res;
  res.rows = checked_dim(r.u64(), "resolution");
  res.cols = checked_dim(r.u64(), "resolution");
  res.channels = checked_dim(r.u64(), "resolution");

  std::unique_ptr<ScoreModel> model;
  if (kind == static_cast<std::uint32_t>(ModelKind::Parzen)) {
    const Index count = checked_dim(r.u64(), "sample count");
    const Index dim = checked_dim(r.u64(), "sample dimension");
    if (r.remaining() / 8 < static_cast<std::uint64_t>(count) * static_cast<std::uint64_t>(dim))
      throw IoError("truncated model payload");
    Eigen::MatrixXd data(dim, count);
    for (Index j = 0; j < count; ++j)
      for (Index i = 0; i < dim; ++i) data(i, j) = r.f64();
    try {
      model = std::make_unique<ParzenScore>(std::move(data), res);
    } catch (const ValidationError& e) {
      throw IoError(std::string("inconsistent model file: ") + e.what());
    }
  } else if (kind == static_cast<std::uint32_t>(ModelKind::Mlp)) {
    const auto layers = r.u32();
    if (layers < 1 || layers > 64) throw IoError("model file has an invalid layer count");
    std::vector<Index> widths;
    for (std::uint32_t l = 0; l <= layers; ++l) widths.push_back(checked_dim(r.u64(), "layer width"));
    std::vector<Eigen::MatrixXd> W;
    std::vector<Eigen::VectorXd> b;
    for (std::uint32_t l = 0; l < layers; ++l) {
      const Index in = widths[l], out = widths[l + 1];
      if (r.remaining() / 8 < static_cast<std::uint64_t>(out) * static_cast<std::uint64_t>(in + 1))
        throw IoError("truncated model payload");
      Eigen::MatrixXd m(out, in);
      for (Index i = 0; i < out; ++i)
        for (Index j = 0; j < in; ++j) m(i, j) = r.f64();
      Eigen::VectorXd v(out);
      for (Index i = 0; i < out; ++i) v[i] = r.f64();
      W.push_back(std::move(m));
      b.push_back(std::move(v));
    }
    try {
      model = std::make_unique<MlpScore>(res, std::move(W), std::move(b));
    } catch (const ValidationError& e) {
      throw IoError(std::string("inconsistent model file: ") + e.what());
    }
  } else {
    throw IoError("unknown model kind tag " + std::to_string(kind));
  }
  if (!r.at_end()) throw IoError("trailing bytes after model payload");
  return model;
}

void save_model(const ScoreModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, encode_model(model));
}

std::unique_ptr<ScoreModel> load_model(const std::filesystem::path& path) { return decode_model(read_file(path)); }

}  // namespace wacm
