// SPDX-License-Identifier: Apache-2.0
#include "lidarsim/encoding.hpp"
#include "lidarsim/error.hpp"
#include "lidarsim/geometry.hpp"

#include <doctest.h>

#include <random>

using namespace lidarsim;

TEST_CASE("depth code extremes") {
  CHECK(encode_depth_24(0.0, 50.0) == Rgb8{0, 0, 0});
  CHECK(encode_depth_24(50.0, 50.0) == Rgb8{255, 255, 255});
  CHECK(decode_depth_24({255, 255, 255}, 50.0) == 50.0);
  CHECK(unpack24(pack24(0x123456)) == 0x123456);
  CHECK(pack24(0x123456) == Rgb8{0x12, 0x34, 0x56});
}

TEST_CASE("depth outside the encode range throws") {
  CHECK_THROWS_AS(encode_depth_24(-0.001, 50.0), RangeError);
  CHECK_THROWS_AS(encode_depth_24(50.001, 50.0), RangeError);
  CHECK_THROWS_AS(encode_depth_24(1.0, 0.0), RangeError);
}

TEST_CASE("depth round trip within one quantum") {
  // 50 / 2^24 = 2.98e-6 m
  const double bound = 50.0 / 16777216.0;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 50.0);
  double worst = 0.0;
  for (int k = 0; k < 100000; ++k) {
    const double d = u(rng);
    worst = std::max(worst, std::abs(decode_depth_24(encode_depth_24(d, 50.0), 50.0) - d));
  }
  CHECK(worst <= bound);
  CHECK(worst > 0.25 * bound);
}

TEST_CASE("depth code is monotone") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 50.0);
  for (int k = 0; k < 10000; ++k) {
    double a = u(rng);
    double b = u(rng);
    if (a > b) std::swap(a, b);
    REQUIRE(unpack24(encode_depth_24(a, 50.0)) <= unpack24(encode_depth_24(b, 50.0)));
  }
}

TEST_CASE("incidence RGBA extremes") {
  CHECK(encode_incidence_rgba(0.0, 7) == Rgba8{0, 0, 0, 7});
  CHECK(encode_incidence_rgba(kPi / 2, 255) == Rgba8{255, 255, 255, 255});
  const auto d = decode_incidence_rgba({0, 0, 0, 7});
  CHECK(d.angle == 0.0);
  CHECK(d.material_index == 7);
  CHECK_THROWS_AS(encode_incidence_rgba(-0.01, 0), RangeError);
  CHECK_THROWS_AS(encode_incidence_rgba(kPi / 2 + 0.01, 0), RangeError);
}

TEST_CASE("incidence round trip within one quantum") {
  // (pi/2) / 2^24 = 9.36e-8 rad
  const double bound = (kPi / 2) / 16777216.0;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, kPi / 2);
  for (int k = 0; k < 100000; ++k) {
    const double a = u(rng);
    const auto m = static_cast<std::uint8_t>(k & 255);
    const auto back = decode_incidence_rgba(encode_incidence_rgba(a, m));
    REQUIRE(std::abs(back.angle - a) <= bound);
    REQUIRE(back.material_index == m);
  }
}
