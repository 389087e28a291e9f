#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "chromawave/colorspace.hpp"
#include "reference_values.hpp"

using namespace chromawave;
using namespace chromawave::colorspace;

namespace {

void expect_triple(const JzazbzPixel& p, const std::array<double, 3>& ref, double tol) {
  EXPECT_NEAR(p.jz, ref[0], tol);
  EXPECT_NEAR(p.az, ref[1], tol);
  EXPECT_NEAR(p.bz, ref[2], tol);
}

}  // namespace

TEST(SrgbToLinear, Endpoints) {
  EXPECT_EQ(srgb_to_linear(0), 0.0);
  EXPECT_DOUBLE_EQ(srgb_to_linear(255), 1.0);
}

TEST(SrgbToLinear, MidCode) {
  const double v = srgb_to_linear(128);
  EXPECT_GT(v, 0.21);
  EXPECT_LT(v, 0.22);
  EXPECT_NEAR(v, reference::kEotf128, 1e-15);
}

TEST(SrgbToLinear, Monotone) {
  for (int c = 1; c < 256; ++c) EXPECT_LT(srgb_to_linear(c - 1), srgb_to_linear(c));
}

TEST(RgbToJzazbz, BlackIsOrigin) {
  const auto p = rgb_to_jzazbz({0, 0, 0});
  EXPECT_LT(std::abs(p.jz), 1e-9);
  EXPECT_LT(std::abs(p.az), 1e-12);
  EXPECT_LT(std::abs(p.bz), 1e-12);
}

TEST(RgbToJzazbz, MatchesReferenceScript) {
  expect_triple(rgb_to_jzazbz({255, 0, 0}), reference::kRed, 1e-12);
  expect_triple(rgb_to_jzazbz({0, 128, 255}), reference::kAzure, 1e-12);
  expect_triple(rgb_to_jzazbz({12, 200, 77}), reference::kGreenish, 1e-12);
  expect_triple(rgb_to_jzazbz({255, 255, 255}), reference::kWhite, 1e-12);
}

// The published constants leave D65 white slightly off the neutral axis
// (|az|, |bz| ~ 1e-4), so neutrality is checked at that scale.
TEST(RgbToJzazbz, GraysNearNeutralAndMonotone) {
  double prev = -1.0;
  for (int g = 0; g < 256; ++g) {
    const auto p = rgb_to_jzazbz({static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(g),
                                  static_cast<std::uint8_t>(g)});
    EXPECT_LT(std::abs(p.az), 2e-4) << g;
    EXPECT_LT(std::abs(p.bz), 2e-4) << g;
    EXPECT_GT(p.jz, prev) << g;
    prev = p.jz;
  }
}

TEST(RgbToJzazbz, RandomPixelsFiniteAndInGamut) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> code(0, 255);
  for (int i = 0; i < 100000; ++i) {
    const SrgbPixel px{static_cast<std::uint8_t>(code(rng)), static_cast<std::uint8_t>(code(rng)),
                       static_cast<std::uint8_t>(code(rng))};
    const auto p = rgb_to_jzazbz(px);
    ASSERT_TRUE(std::isfinite(p.jz) && std::isfinite(p.az) && std::isfinite(p.bz));
    ASSERT_GE(p.jz, kJzRange.min - 1e-15);
    ASSERT_LE(p.jz, kJzRange.max + 1e-15);
    ASSERT_GE(p.az, kAzRange.min - 1e-15);
    ASSERT_LE(p.az, kAzRange.max + 1e-15);
    ASSERT_GE(p.bz, kBzRange.min - 1e-15);
    ASSERT_LE(p.bz, kBzRange.max + 1e-15);
  }
}

TEST(RgbToJzazbz, Deterministic) {
  const auto a = rgb_to_jzazbz({31, 97, 203});
  const auto b = rgb_to_jzazbz({31, 97, 203});
  EXPECT_EQ(a.jz, b.jz);
  EXPECT_EQ(a.az, b.az);
  EXPECT_EQ(a.bz, b.bz);
}

TEST(ImageToJzazbz, PixelwiseAndShape) {
  SrgbImage img(2, 2);
  img.at(0, 0) = {255, 0, 0};
  img.at(1, 0) = {0, 128, 255};
  img.at(0, 1) = {12, 200, 77};
  img.at(1, 1) = {255, 255, 255};
  const auto out = image_to_jzazbz(img);
  ASSERT_EQ(out.width(), 2);
  ASSERT_EQ(out.height(), 2);
  expect_triple(out.at(0, 0), reference::kRed, 1e-12);
  expect_triple(out.at(1, 0), reference::kAzure, 1e-12);
  expect_triple(out.at(0, 1), reference::kGreenish, 1e-12);
  expect_triple(out.at(1, 1), reference::kWhite, 1e-12);
}

TEST(ImageToJzazbz, UniformAndBlack) {
  const auto black = image_to_jzazbz(SrgbImage(1, 1));
  EXPECT_LT(std::abs(black.at(0, 0).jz), 1e-9);
  const auto uniform = image_to_jzazbz(SrgbImage(5, 3, {40, 50, 60}));
  for (const auto& p : uniform.data()) {
    EXPECT_EQ(p.jz, uniform.data().front().jz);
    EXPECT_EQ(p.az, uniform.data().front().az);
    EXPECT_EQ(p.bz, uniform.data().front().bz);
  }
}

TEST(ImageToJzazbz, EmptyRasterRejected) {
  try {
    image_to_jzazbz(SrgbImage());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::degenerate_input);
  }
}

TEST(ToGrayscale, WhiteBlackGreen) {
  const auto white = to_grayscale(SrgbImage(3, 3, {255, 255, 255}));
  for (double v : white.data()) EXPECT_NEAR(v, 1.0, 1e-12);
  const auto black = to_grayscale(SrgbImage(3, 3, {0, 0, 0}));
  for (double v : black.data()) EXPECT_EQ(v, 0.0);
  EXPECT_NEAR(to_grayscale(SrgbImage(1, 1, {0, 255, 0})).at(0, 0), 0.7152, 1e-12);
  EXPECT_THROW(to_grayscale(SrgbImage()), Error);
}

TEST(GamutRange, MidpointsInsideRange) {
  for (const auto& r : {kJzRange, kAzRange, kBzRange}) {
    EXPECT_LT(r.min, r.midpoint());
    EXPECT_LT(r.midpoint(), r.max);
  }
}

TEST(GamutRange, FullCubeScanMatchesConstants) {
  double lo[3] = {1e9, 1e9, 1e9}, hi[3] = {-1e9, -1e9, -1e9};
  for (int r = 0; r < 256; ++r)
    for (int g = 0; g < 256; ++g)
      for (int b = 0; b < 256; ++b) {
        const auto p = rgb_to_jzazbz({static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                                      static_cast<std::uint8_t>(b)});
        const double v[3] = {p.jz, p.az, p.bz};
        for (int k = 0; k < 3; ++k) {
          lo[k] = std::min(lo[k], v[k]);
          hi[k] = std::max(hi[k], v[k]);
        }
      }
  const GamutRange ranges[3] = {kJzRange, kAzRange, kBzRange};
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(lo[k], ranges[k].min, 1e-12) << k;
    EXPECT_NEAR(hi[k], ranges[k].max, 1e-12) << k;
  }
}
