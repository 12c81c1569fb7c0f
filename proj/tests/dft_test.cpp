#include "test_util.hpp"

#include <gtest/gtest.h>

namespace {

using tenqr::TubeDft;
using cplx = std::complex<double>;

std::vector<cplx> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<cplx> v(n);
  for (auto& x : v) x = cplx(normal(rng), normal(rng));
  return v;
}

TEST(TubeDft, LengthOneIsIdentity) {
  TubeDft dft(1);
  std::vector<cplx> v{cplx(3.5, -1.0)};
  dft.forward(v);
  EXPECT_EQ(v[0], cplx(3.5, -1.0));
  dft.inverse(v);
  EXPECT_EQ(v[0], cplx(3.5, -1.0));
}

TEST(TubeDft, ConstantTubeIsDcOnly) {
  for (std::size_t n : {2u, 5u, 8u, 10u}) {
    TubeDft dft(n);
    std::vector<cplx> v(n, cplx(2.0, 0.0));
    dft.forward(v);
    EXPECT_NEAR(std::abs(v[0] - cplx(2.0 * static_cast<double>(n), 0.0)), 0.0, 1e-12);
    for (std::size_t l = 1; l < n; ++l) EXPECT_NEAR(std::abs(v[l]), 0.0, 1e-12) << n << " " << l;
  }
}

TEST(TubeDft, MatchesNaiveDftForAllLengths) {
  for (std::size_t n = 1; n <= 33; ++n) {
    TubeDft dft(n);
    auto v = random_vector(n, n);
    const auto expected = tenqr::testing::naive_dft(v);
    dft.forward(v);
    for (std::size_t l = 0; l < n; ++l) EXPECT_NEAR(std::abs(v[l] - expected[l]), 0.0, 1e-11) << n;
  }
}

TEST(TubeDft, Radix2PathOnlyForPowersOfTwo) {
  EXPECT_TRUE(TubeDft(8).uses_radix2());
  EXPECT_TRUE(TubeDft(64).uses_radix2());
  EXPECT_FALSE(TubeDft(10).uses_radix2());
  EXPECT_FALSE(TubeDft(688).uses_radix2());
}

TEST(TubeDft, InverseUndoesForward) {
  for (std::size_t n : {3u, 4u, 10u, 16u, 27u}) {
    TubeDft dft(n);
    const auto orig = random_vector(n, 100 + n);
    auto v = orig;
    dft.forward(v);
    dft.inverse(v);
    for (std::size_t l = 0; l < n; ++l) EXPECT_NEAR(std::abs(v[l] - orig[l]), 0.0, 1e-12);
  }
}

}  // namespace
