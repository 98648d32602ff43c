#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <random>

#include "styleshift/image_io.hpp"
#include "styleshift/tensor.hpp"
#include "styleshift/tensor_file.hpp"
#include "test_support.hpp"

namespace {

using namespace styleshift;
using testing_support::TempDir;

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected styleshift::Error";
  return ErrorCode::io;
}

TEST(Tensor, RejectsWrongLengthAndNonFinite) {
  EXPECT_EQ(code_of([] { ImageTensor({1, 2, 2}, std::vector<float>(3)); }), ErrorCode::shape_mismatch);
  EXPECT_EQ(code_of([] { ImageTensor({0, 2, 2}, {}); }), ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([] { FeatureMap({1, 1, 2}, {0.0f, std::numeric_limits<float>::quiet_NaN()}); }),
            ErrorCode::non_finite);
  EXPECT_EQ(code_of([] { FeatureMap({1, 1, 1}, {std::numeric_limits<float>::infinity()}); }), ErrorCode::non_finite);
}

TEST(Tensor, ChannelMajorLayout) {
  const FeatureMap t({2, 2, 3}, {0, 1, 2, 3, 4, 5, 10, 11, 12, 13, 14, 15});
  EXPECT_EQ(t.at(0, 1, 2), 5.0f);
  EXPECT_EQ(t.at(1, 0, 1), 11.0f);
  EXPECT_EQ(t.channel(1)[3], 13.0f);
}

TEST(ChannelStats, EnforcesStdFloor) {
  EXPECT_NO_THROW(ChannelStats({0.5}, {std::sqrt(1e-5)}, 1e-5));
  EXPECT_EQ(code_of([] { ChannelStats({0.5}, {1e-4}, 1e-5); }), ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([] { ChannelStats({0.5, 0.1}, {1.0}, 1e-5); }), ErrorCode::shape_mismatch);
  EXPECT_EQ(code_of([] { ChannelStats({0.5}, {1.0}, 0.0); }), ErrorCode::invalid_argument);
}

// ---- tensor file ---------------------------------------------------------

TEST(TensorFile, HeaderLayoutIsBitExact) {
  const auto bytes = encode_tensor(std::vector<std::uint64_t>{1, 1, 2}, std::vector<float>{1.0f, -2.5f});
  const std::vector<unsigned char> expected = {
      'S', 'S', 'T', 'F', 1, 0, 1, 0, 3, 0, 0, 0,  //
      1,   0,   0,   0,   0, 0, 0, 0,              // dim 0
      1,   0,   0,   0,   0, 0, 0, 0,              // dim 1
      2,   0,   0,   0,   0, 0, 0, 0,              // dim 2
      0x00, 0x00, 0x80, 0x3F,                      // 1.0f
      0x00, 0x00, 0x20, 0xC0,                      // -2.5f
  };
  EXPECT_EQ(bytes, expected);
}

TEST(TensorFile, RoundtripIsBitExactForRandomShapes) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> dim(1, 9);
  std::uniform_int_distribution<std::uint32_t> bits;
  TempDir dir("tf");
  for (int trial = 0; trial < 50; ++trial) {
    const Shape s{dim(rng), dim(rng), dim(rng)};
    std::vector<float> v(s.size());
    for (auto& x : v) {
      do {
        x = std::bit_cast<float>(bits(rng));
      } while (!std::isfinite(x));
    }
    const FeatureMap t(s, v);
    write_tensor(t, dir / "t.sstf");
    const FeatureMap back = read_tensor(dir / "t.sstf");
    ASSERT_EQ(back.shape(), s);
    for (std::size_t i = 0; i < v.size(); ++i) {
      ASSERT_EQ(std::bit_cast<std::uint32_t>(back.data()[i]), std::bit_cast<std::uint32_t>(v[i]));
    }
  }
}

TEST(TensorFile, RejectsBadMagic) {
  auto bytes = encode_tensor(std::vector<std::uint64_t>{1}, std::vector<float>{0.0f});
  bytes[0] = 'X';
  EXPECT_EQ(code_of([&] { decode_tensor(bytes); }), ErrorCode::bad_magic);
  EXPECT_EQ(code_of([] { decode_tensor(std::vector<unsigned char>{'S', 'S'}); }), ErrorCode::bad_magic);
}

TEST(TensorFile, RejectsVersionAndDtype) {
  auto bytes = encode_tensor(std::vector<std::uint64_t>{1}, std::vector<float>{0.0f});
  bytes[4] = 2;
  EXPECT_EQ(code_of([&] { decode_tensor(bytes); }), ErrorCode::version_mismatch);
  bytes[4] = 1;
  bytes[6] = 7;
  EXPECT_EQ(code_of([&] { decode_tensor(bytes); }), ErrorCode::unsupported_dtype);
}

TEST(TensorFile, DeclaredTwoByThreeByFourWithTwentyThreeFloatsIsTruncated) {
  const std::vector<std::uint64_t> dims = {2, 3, 4};
  auto bytes = encode_tensor(dims, std::vector<float>(24, 0.5f));
  bytes.resize(bytes.size() - 4);  // 23 floats of payload
  EXPECT_EQ(code_of([&] { decode_tensor(bytes); }), ErrorCode::truncated);
}

TEST(TensorFile, RejectsTrailingBytesAndShortDimTable) {
  auto bytes = encode_tensor(std::vector<std::uint64_t>{2}, std::vector<float>{1.0f, 2.0f});
  bytes.push_back(0);
  EXPECT_EQ(code_of([&] { decode_tensor(bytes); }), ErrorCode::truncated);
  auto header_only = encode_tensor(std::vector<std::uint64_t>{2, 2}, std::vector<float>{});
  header_only.resize(12 + 8);
  EXPECT_EQ(code_of([&] { decode_tensor(header_only); }), ErrorCode::truncated);
}

TEST(TensorFile, RejectsDimensionOverflow) {
  const std::vector<std::uint64_t> dims = {1ULL << 33, 1ULL << 33};
  const auto bytes = encode_tensor(dims, std::vector<float>{});
  EXPECT_EQ(code_of([&] { decode_tensor(bytes); }), ErrorCode::dimension_overflow);
  const std::vector<std::uint64_t> huge = {1ULL << 62};
  EXPECT_EQ(code_of([&] { decode_tensor(encode_tensor(huge, std::vector<float>{})); }),
            ErrorCode::dimension_overflow);
}

TEST(TensorFile, ReadTensorNeedsThreeDims) {
  TempDir dir("tf3");
  write_raw_tensor(RawTensor{{2, 2}, {1, 2, 3, 4}}, dir / "flat.sstf");
  EXPECT_EQ(code_of([&] { read_tensor(dir / "flat.sstf"); }), ErrorCode::shape_mismatch);
  EXPECT_EQ(code_of([&] { read_tensor(dir / "missing.sstf"); }), ErrorCode::io);
}

// ---- images --------------------------------------------------------------

TEST(ImageIo, WhitePngLoadsAsOnes) {
  TempDir dir("img");
  testing_support::write_png8(dir / "w.png", 2, 2, 3, std::vector<std::uint8_t>(12, 255));
  const auto img = load_image(dir / "w.png");
  EXPECT_EQ(img.shape(), (Shape{3, 2, 2}));
  for (float v : img.data()) EXPECT_EQ(v, 1.0f);
}

TEST(ImageIo, GrayZeroPixel) {
  TempDir dir("img");
  testing_support::write_png8(dir / "g.png", 1, 1, 1, {0});
  const auto img = load_image(dir / "g.png");
  EXPECT_EQ(img.shape(), (Shape{1, 1, 1}));
  EXPECT_EQ(img.data()[0], 0.0f);
}

TEST(ImageIo, RgbPixelDividesBy255) {
  TempDir dir("img");
  testing_support::write_png8(dir / "p.png", 1, 1, 3, {51, 102, 204});
  const auto img = load_image(dir / "p.png");
  EXPECT_NEAR(img.at(0, 0, 0), 0.2, 1e-7);
  EXPECT_NEAR(img.at(1, 0, 0), 0.4, 1e-7);
  EXPECT_NEAR(img.at(2, 0, 0), 0.8, 1e-7);
}

TEST(ImageIo, SaveQuantisesAndHonoursClampPolicy) {
  TempDir dir("img");
  save_image(ImageTensor::filled({1, 2, 2}, 1.0f), dir / "ones.png", false);
  const auto ones = load_image(dir / "ones.png");
  for (float v : ones.data()) EXPECT_EQ(v, 1.0f);

  const ImageTensor over({1, 1, 2}, {1.2f, 0.4f});
  EXPECT_EQ(code_of([&] { save_image(over, dir / "o.png", false); }), ErrorCode::out_of_range);
  save_image(over, dir / "o.png", true);
  EXPECT_EQ(quantize(over, true).pixels, (std::vector<std::uint8_t>{255, 102}));
  const auto back = load_image(dir / "o.png");
  EXPECT_EQ(back.data()[0], 1.0f);
  EXPECT_NEAR(back.data()[1], 102.0 / 255.0, 1e-7);
}

TEST(ImageIo, SaveRejectsUnsupportedChannelCountAndBadPath) {
  TempDir dir("img");
  EXPECT_EQ(code_of([&] { save_image(ImageTensor::filled({2, 1, 1}, 0.5f), dir / "x.png", false); }),
            ErrorCode::unsupported_color_model);
  EXPECT_EQ(code_of([&] { save_image(ImageTensor::filled({1, 1, 1}, 0.5f), dir / "no/such/dir/x.png", false); }),
            ErrorCode::io);
}

TEST(ImageIo, LoadSaveReproducesEveryEightBitValue) {
  TempDir dir("img");
  std::vector<std::uint8_t> px(3 * 16 * 16);
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = static_cast<std::uint8_t>((i * 37) % 256);
  testing_support::write_png8(dir / "src.png", 16, 16, 3, px);
  save_image(load_image(dir / "src.png"), dir / "dst.png", false);
  const auto a = decode_image(detail::read_file_bytes(dir / "src.png"));
  const auto b = decode_image(detail::read_file_bytes(dir / "dst.png"));
  EXPECT_EQ(a.pixels, b.pixels);
  EXPECT_EQ(b.pixels, px);
}

TEST(ImageIo, DistinctErrorsForDepthAndColorModel) {
  TempDir dir("img");
  testing_support::write_png_raw(dir / "deep.png", 2, 1, PNG_COLOR_TYPE_GRAY, 16, {1000, 60000});
  EXPECT_EQ(code_of([&] { load_image(dir / "deep.png"); }), ErrorCode::unsupported_bit_depth);
  testing_support::write_png_raw(dir / "rgba.png", 1, 1, PNG_COLOR_TYPE_RGBA, 8, {1, 2, 3, 4});
  EXPECT_EQ(code_of([&] { load_image(dir / "rgba.png"); }), ErrorCode::unsupported_color_model);
  testing_support::write_jpeg(dir / "cmyk.jpg", 2, 2, 4, JCS_CMYK, std::vector<std::uint8_t>(16, 100));
  EXPECT_EQ(code_of([&] { load_image(dir / "cmyk.jpg"); }), ErrorCode::unsupported_color_model);
  EXPECT_EQ(code_of([&] { load_image(dir / "absent.png"); }), ErrorCode::io);

  std::ofstream(dir / "junk.png") << "definitely not an image";
  EXPECT_EQ(code_of([&] { load_image(dir / "junk.png"); }), ErrorCode::decode);
  auto bytes = detail::read_file_bytes(dir / "rgba.png");
  bytes.resize(bytes.size() / 2);
  EXPECT_EQ(code_of([&] { decode_image(bytes); }), ErrorCode::decode);
}

TEST(ImageIo, JpegGrayAndRgb) {
  TempDir dir("img");
  testing_support::write_jpeg(dir / "g.jpg", 8, 8, 1, JCS_GRAYSCALE, std::vector<std::uint8_t>(64, 128));
  const auto gray = load_image(dir / "g.jpg");
  EXPECT_EQ(gray.shape(), (Shape{1, 8, 8}));
  for (float v : gray.data()) EXPECT_NEAR(v, 128.0 / 255.0, 1.5 / 255.0);

  std::vector<std::uint8_t> rgb(8 * 8 * 3);
  for (std::size_t i = 0; i < 64; ++i) {
    rgb[3 * i] = 200;
    rgb[3 * i + 1] = 100;
    rgb[3 * i + 2] = 50;
  }
  testing_support::write_jpeg(dir / "c.jpeg", 8, 8, 3, JCS_RGB, rgb);
  const auto color = load_image(dir / "c.jpeg");
  EXPECT_EQ(color.shape(), (Shape{3, 8, 8}));
  EXPECT_NEAR(color.at(0, 3, 3), 200.0 / 255.0, 3.0 / 255.0);
  EXPECT_NEAR(color.at(1, 3, 3), 100.0 / 255.0, 3.0 / 255.0);
  EXPECT_NEAR(color.at(2, 3, 3), 50.0 / 255.0, 3.0 / 255.0);
}

}  // namespace
