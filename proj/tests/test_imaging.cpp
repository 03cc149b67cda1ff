// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>
#include <png.h>

#include <cstring>

#include "support.hpp"
#include "wacm/io_util.hpp"
#include "wacm/raster_io.hpp"

using namespace wacm;
using wacm::test::constant_image_rgb;
using wacm::test::TempDir;

TEST_SUITE("imaging") {

TEST_CASE("image shape invariants") {
  CHECK_THROWS_AS(Image(2, 4, 4), ValidationError);
  CHECK_THROWS_AS(Image(3, 1, 4), ValidationError);
  Plane<double> bad = Plane<double>::Zero(2, 2);
  bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(Image::from_planes({bad}), ValidationError);
  CHECK_THROWS_AS(Image::from_planes({Plane<double>::Zero(2, 2), Plane<double>::Zero(2, 4), Plane<double>::Zero(2, 2)}),
                  ValidationError);
}

TEST_CASE("to_gray with the mean operator") {
  const Image x = constant_image_rgb(0.3, 0.6, 0.9);
  const Image y = to_gray(x, GrayOp::mean());
  CHECK(y.channels() == 1);
  CHECK(y.plane(0)(1, 2) == doctest::Approx(0.6).epsilon(1e-15));

  Rng rng(3);
  for (int k = 0; k < 20; ++k) {
    const double c = rng.uniform();
    CHECK(to_gray(constant_image_rgb(c, c, c), GrayOp::mean()).plane(0).maxCoeff() == doctest::Approx(c).epsilon(1e-15));
  }
}

TEST_CASE("luma keeps the published coefficients") {
  const Image y = to_gray(constant_image_rgb(1, 1, 1), GrayOp::luma());
  CHECK(y.plane(0)(0, 0) == doctest::Approx(0.993).epsilon(1e-15));
  const Image yc = to_gray(constant_image_rgb(1, 1, 1), GrayOp::luma_corrected());
  CHECK(yc.plane(0)(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  for (const auto& op : {GrayOp::mean(), GrayOp::luma(), GrayOp::luma_corrected()})
    for (double w : op.weights) CHECK(w > 0.0);
}

TEST_CASE("to_gray rejects non-RGB input") {
  CHECK_THROWS_AS(to_gray(Image(1, 4, 4), GrayOp::mean()), ValidationError);
}

TEST_CASE("to_gray is linear") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Image a = test::random_image(3, 6, 8, rng, -1, 2);
    const Image b = test::random_image(3, 6, 8, rng, -1, 2);
    const double alpha = rng.uniform(-3, 3), beta = rng.uniform(-3, 3);
    std::vector<Plane<double>> mix;
    for (Index c = 0; c < 3; ++c) mix.push_back(alpha * a.plane(c) + beta * b.plane(c));
    for (const auto& op : {GrayOp::mean(), GrayOp::luma()}) {
      const Plane<double> lhs = to_gray(Image::from_planes(mix), op).plane(0);
      const Plane<double> rhs = alpha * to_gray(a, op).plane(0) + beta * to_gray(b, op).plane(0);
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("clamp") {
  Image img(1, 2, 2);
  img.plane(0) << -0.2, 0.5, 1.7, 1.0;
  const Image c = clamp(img, 0.0, 1.0);
  CHECK(c.plane(0)(0, 0) == 0.0);
  CHECK(c.plane(0)(0, 1) == 0.5);
  CHECK(c.plane(0)(1, 0) == 1.0);
  CHECK_THROWS_AS(clamp(img, 1.0, 0.0), ValidationError);

  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Image x = test::random_image(3, 4, 6, rng, -2, 2);
    const Image once = clamp(x, 0.0, 1.0);
    CHECK(test::max_abs_diff(clamp(once, 0.0, 1.0), once) == 0.0);
    for (const auto& p : once.planes()) CHECK((p.minCoeff() >= 0.0 && p.maxCoeff() <= 1.0));
  }
}

TEST_CASE("crop_to_even") {
  const Image img(3, 5, 7);
  const Image c = crop_to_even(img);
  CHECK(c.height() == 4);
  CHECK(c.width() == 6);
}

TEST_CASE("byte <-> intensity mapping") {
  CHECK(quantize(1.0) == 255);
  CHECK(quantize(1.7) == 255);
  CHECK(quantize(-0.3) == 0);
  CHECK(quantize(128.0 / 255.0) == 128);

  TempDir dir("raster");
  Image img(1, 2, 2);
  img.plane(0) << 1.0, 128.0 / 255.0, 1.7, 0.0;
  save_raster(img, dir / "a.pgm");
  const Image back = load_raster(dir / "a.pgm");
  CHECK(back.plane(0)(0, 0) == 1.0);
  CHECK(back.plane(0)(0, 1) == doctest::Approx(0.50196).epsilon(1e-5));
  CHECK(back.plane(0)(0, 1) == 128.0 / 255.0);
  CHECK(back.plane(0)(1, 0) == 1.0);
  CHECK(back.plane(0)(1, 1) == 0.0);
}

TEST_CASE("PNM header layout is bit-exact") {
  Image img(3, 2, 3, 1.0);
  const auto bytes = encode_pnm(img);
  const std::string head(bytes.begin(), bytes.begin() + 11);
  CHECK(head == "P6\n3 2\n255\n");
  CHECK(bytes.size() == 11 + 18);
  const auto gray = encode_pnm(Image(1, 2, 2));
  CHECK(std::string(gray.begin(), gray.begin() + 11) == "P5\n2 2\n255\n");
}

TEST_CASE("raster round trip on the 1/255 grid") {
  Rng rng(21);
  TempDir dir("roundtrip");
  for (int trial = 0; trial < 10; ++trial) {
    for (Index ch : {1, 3}) {
      const Image img = test::random_grid_image(ch, 2 + rng.index(9), 2 + rng.index(9), rng);
      for (const char* ext : {".pnm", ".png"}) {
        const auto p = dir / ("img" + std::string(ext));
        save_raster(img, p);
        const Image back = load_raster(p);
        REQUIRE(back.same_shape(img));
        CHECK(test::max_abs_diff(back, img) == 0.0);
      }
    }
  }
}

TEST_CASE("PNM parse errors") {
  const auto parse = [](const std::string& s) { return decode_pnm(std::vector<std::uint8_t>(s.begin(), s.end())); };
  CHECK_THROWS_AS(parse("P3\n2 2\n255\n"), IoError);
  CHECK_THROWS_AS(parse("P5\n2 x\n255\n"), IoError);
  CHECK_THROWS_AS(parse("P5\n2 2\n65535\n" + std::string(8, '\0')), IoError);
  CHECK_THROWS_AS(parse("P5\n2 2\n255\n" + std::string(3, '\0')), IoError);
  CHECK_THROWS_AS(parse("P6\n2 2\n255\n" + std::string(11, '\0')), IoError);
  // Comments in the header are accepted.
  const Image ok = parse("P5\n# made by hand\n2 2\n255\n" + std::string("\x00\xff\x00\xff", 4));
  CHECK(ok.plane(0)(0, 1) == 1.0);
}

TEST_CASE("PNG with unsupported layout is rejected") {
  // 16-bit gray, produced by libpng's linear format.
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = 2;
  image.height = 2;
  image.format = PNG_FORMAT_LINEAR_Y;
  const std::uint16_t pixels[4] = {0, 1000, 40000, 65535};
  png_alloc_size_t size = 0;
  REQUIRE(png_image_write_to_memory(&image, nullptr, &size, 0, pixels, 0, nullptr));
  std::vector<std::uint8_t> buf(size);
  REQUIRE(png_image_write_to_memory(&image, buf.data(), &size, 0, pixels, 0, nullptr));
  buf.resize(size);
  CHECK_THROWS_AS(decode_png(buf), IoError);

  auto truncated = encode_png(Image(3, 4, 4, 0.5));
  truncated.resize(truncated.size() / 2);
  CHECK_THROWS_AS(decode_png(truncated), IoError);
}

TEST_CASE("save_raster validates extension against channel count") {
  TempDir dir("ext");
  CHECK_THROWS_AS(save_raster(Image(3, 2, 2), dir / "x.pgm"), ValidationError);
  CHECK_THROWS_AS(save_raster(Image(1, 2, 2), dir / "x.ppm"), ValidationError);
  CHECK_THROWS_AS(save_raster(Image(1, 2, 2), dir / "x.bmp"), ValidationError);
  CHECK_THROWS_AS(load_raster(dir / "missing.ppm"), IoError);
}

}  // TEST_SUITE
