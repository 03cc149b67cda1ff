// SPDX-License-Identifier: Apache-2.0
#include "wacm/raster_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <string>

#include "wacm/io_util.hpp"

namespace wacm {

namespace {

class PnmHeaderReader {
 public:
  explicit PnmHeaderReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  long next_number() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_]))
      throw IoError("malformed PNM header: expected a number");
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > 1'000'000'000L) throw IoError("malformed PNM header: number too large");
      ++pos_;
    }
    return v;
  }

  // Exactly one whitespace byte separates maxval from the payload.
  std::size_t payload_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_]))
      throw IoError("malformed PNM header: missing whitespace before payload");
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 2;
};

bool has_png_signature(const std::vector<std::uint8_t>& bytes) {
  return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

Image from_interleaved(const std::uint8_t* data, Index channels, Index h, Index w) {
  std::vector<Plane<double>> planes(static_cast<std::size_t>(channels), Plane<double>(h, w));
  for (Index r = 0; r < h; ++r)
    for (Index c = 0; c < w; ++c)
      for (Index k = 0; k < channels; ++k)
        planes[static_cast<std::size_t>(k)](r, c) = data[(r * w + c) * channels + k] / 255.0;
  return Image::from_planes(std::move(planes));
}

std::vector<std::uint8_t> to_interleaved(const Image& img) {
  const Index ch = img.channels(), h = img.height(), w = img.width();
  std::vector<std::uint8_t> out(static_cast<std::size_t>(ch * h * w));
  for (Index r = 0; r < h; ++r)
    for (Index c = 0; c < w; ++c)
      for (Index k = 0; k < ch; ++k) out[(r * w + c) * ch + k] = quantize(img.plane(k)(r, c));
  return out;
}

}  // namespace

std::uint8_t quantize(double v) {
  const double c = std::clamp(v, 0.0, 1.0);
  return static_cast<std::uint8_t>(std::lround(c * 255.0));
}

Image decode_pnm(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6'))
    throw IoError("not a binary PGM/PPM file (expected P5 or P6)");
  const Index channels = bytes[1] == '5' ? 1 : 3;
  PnmHeaderReader header(bytes);
  const long w = header.next_number();
  const long h = header.next_number();
  const long maxval = header.next_number();
  if (maxval != 255) throw IoError("unsupported PNM maxval " + std::to_string(maxval) + " (only 255)");
  if (w < 1 || h < 1) throw IoError("malformed PNM header: zero dimension");
  const std::size_t offset = header.payload_offset();
  const std::size_t need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * channels;
  if (bytes.size() - std::min(offset, bytes.size()) < need) throw IoError("truncated PNM payload");
  return from_interleaved(bytes.data() + offset, channels, h, w);
}

std::vector<std::uint8_t> encode_pnm(const Image& img) {
  const std::string header = std::string(img.channels() == 1 ? "P5" : "P6") + "\n" +
                             std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  const auto payload = to_interleaved(img);
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

Image decode_png(const std::vector<std::uint8_t>& bytes) {
  if (!has_png_signature(bytes)) throw IoError("not a PNG file");
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
    throw IoError(std::string("malformed PNG: ") + image.message);

  // Only plain 8-bit gray or RGB is accepted.
  const auto fmt = image.format;
  const bool linear = (fmt & PNG_FORMAT_FLAG_LINEAR) != 0;
  const bool alpha = (fmt & PNG_FORMAT_FLAG_ALPHA) != 0;
  const bool colormap = (fmt & PNG_FORMAT_FLAG_COLORMAP) != 0;
  if (linear || alpha || colormap) {
    png_image_free(&image);
    throw IoError("unsupported PNG layout (only 8-bit gray or RGB without alpha)");
  }
  const Index channels = (fmt & PNG_FORMAT_FLAG_COLOR) ? 3 : 1;
  image.format = channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw IoError("truncated or corrupt PNG: " + msg);
  }
  return from_interleaved(buf.data(), channels, image.height, image.width);
}

std::vector<std::uint8_t> encode_png(const Image& img) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = img.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const auto pixels = to_interleaved(img);
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, pixels.data(), 0, nullptr))
    throw IoError(std::string("PNG encode failed: ") + image.message);
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, pixels.data(), 0, nullptr))
    throw IoError(std::string("PNG encode failed: ") + image.message);
  out.resize(size);
  return out;
}

Image load_raster(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  if (has_png_signature(bytes)) return decode_png(bytes);
  return decode_pnm(bytes);
}

void save_raster(const Image& img, const std::filesystem::path& path) {
  if (!img.all_finite()) throw ValidationError("cannot save an image with non-finite values");
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (ext == ".png") {
    write_file_atomic(path, encode_png(img));
    return;
  }
  if (ext == ".pgm" && img.channels() != 1) throw ValidationError(".pgm output needs a 1-channel image");
  if (ext == ".ppm" && img.channels() != 3) throw ValidationError(".ppm output needs a 3-channel image");
  if (ext != ".pgm" && ext != ".ppm" && ext != ".pnm")
    throw ValidationError("unsupported raster extension '" + ext + "' (use .pgm, .ppm, .pnm or .png)");
  write_file_atomic(path, encode_pnm(img));
}

}  // namespace wacm
