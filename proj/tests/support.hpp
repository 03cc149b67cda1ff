// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>

#include <unistd.h>

#include "wacm/image.hpp"
#include "wacm/random.hpp"

namespace wacm::test {

inline Image random_image(Index channels, Index h, Index w, Rng& rng, double lo = 0.0, double hi = 1.0) {
  std::vector<Plane<double>> planes;
  for (Index c = 0; c < channels; ++c) {
    Plane<double> p(h, w);
    for (Index i = 0; i < p.size(); ++i) p.data()[i] = rng.uniform(lo, hi);
    planes.push_back(std::move(p));
  }
  return Image::from_planes(std::move(planes));
}

/// Random image whose values are all multiples of 1/255.
inline Image random_grid_image(Index channels, Index h, Index w, Rng& rng) {
  Image img = random_image(channels, h, w, rng);
  for (Index c = 0; c < channels; ++c)
    img.plane(c) = (img.plane(c) * 255.0).array().floor().matrix() / 255.0;
  return img;
}

inline Plane<double> random_plane(Index h, Index w, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Plane<double> p(h, w);
  for (Index i = 0; i < p.size(); ++i) p.data()[i] = rng.uniform(lo, hi);
  return p;
}

inline Image constant_image_rgb(double r, double g, double b, Index h = 4, Index w = 4) {
  return Image::from_planes({Plane<double>::Constant(h, w, r), Plane<double>::Constant(h, w, g),
                             Plane<double>::Constant(h, w, b)});
}

inline double max_abs_diff(const Image& a, const Image& b) {
  double m = 0.0;
  for (Index c = 0; c < a.channels(); ++c) m = std::max(m, (a.plane(c) - b.plane(c)).cwiseAbs().maxCoeff());
  return m;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("wacm_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace wacm::test
