#include <gtest/gtest.h>

#include <numbers>

#include "mcsd/lmo.hpp"
#include "mcsd/random.hpp"
#include "oracles.hpp"

using namespace mcsd;

namespace {

// Minimum of <s, d> over a grid of the 2x2 spectral unit ball: rotations times
// diag(1, t) times rotations, t in [-1, 1].
double spectral_ball_min_2x2(const Mat& s, int angles, int levels) {
  double best = std::numeric_limits<double>::infinity();
  auto rot = [](double a) {
    Mat r(2, 2);
    r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    return r;
  };
  for (int i = 0; i < angles; ++i) {
    const Mat ra = rot(2 * std::numbers::pi * i / angles);
    for (int j = 0; j < angles; ++j) {
      const Mat rb = rot(2 * std::numbers::pi * j / angles);
      for (int k = 0; k < levels; ++k) {
        const double t = -1.0 + 2.0 * k / (levels - 1);
        Mat dg = Mat::Zero(2, 2);
        dg(0, 0) = 1.0;
        dg(1, 1) = t;
        best = std::min(best, inner(s, Mat(ra * dg * rb.transpose())));
      }
    }
  }
  return best;
}

}  // namespace

TEST(Lmo, SpectralMatchesGridOracle2x2) {
  RngStream rng(31);
  for (int k = 0; k < 10; ++k) {
    const Mat s = rng.gaussian(2, 2);
    const Mat d = *lmo(NormKind::Spectral, s);
    EXPECT_LE(spectral_norm(d), 1.0 + 1e-12);
    const double grid = spectral_ball_min_2x2(s, 180, 11);
    EXPECT_LE(inner(s, d), grid + 1e-12);
    EXPECT_NEAR(inner(s, d), grid, 1e-3 * s.norm());
  }
}

TEST(Lmo, ValueIsMinusDualNorm) {
  RngStream rng(32);
  for (NormKind norm : {NormKind::Frobenius, NormKind::Spectral}) {
    const Mat s = rng.gaussian(9, 4);
    const Mat d = *lmo(norm, s);
    EXPECT_NEAR(inner(s, d), -dual_norm(norm, s), 1e-12 * s.norm());
    EXPECT_NEAR(primal_norm(norm, d), 1.0, 1e-12);
  }
}

TEST(Lmo, NuclearDualOfDiagonal) {
  Mat s = Mat::Zero(2, 2);
  s(0, 0) = 2.0;
  s(1, 1) = 3.0;
  EXPECT_NEAR(dual_norm(NormKind::Spectral, s), 5.0, 1e-14);
  EXPECT_NEAR(dual_norm(NormKind::Frobenius, s), std::sqrt(13.0), 1e-14);
  EXPECT_NEAR(dual_norm(NormKind::Spectral, s), oracle::nuclear(s), 1e-13);
}

TEST(Lmo, FrobeniusIsNormalizedNegative) {
  RngStream rng(33);
  const Mat s = rng.gaussian(5, 3);
  EXPECT_LT((*lmo(NormKind::Frobenius, s) + s / s.norm()).norm(), 1e-15);
}

TEST(Lmo, ZeroInputHasNoDirection) {
  EXPECT_FALSE(lmo(NormKind::Spectral, Mat(Mat::Zero(4, 2))).has_value());
  EXPECT_FALSE(lmo(NormKind::Frobenius, Mat(Mat::Constant(4, 2, 1e-16))).has_value());
}

TEST(Lmo, SpectralOnColumnVectorEqualsFrobenius) {
  RngStream rng(34);
  const Mat s = rng.gaussian(8, 1);
  EXPECT_LT((*lmo(NormKind::Spectral, s) - *lmo(NormKind::Frobenius, s)).norm(), 1e-15);
}

TEST(Lmo, RankDeficientSpectralInputThrows) {
  Mat s = Mat::Zero(3, 2);
  s(0, 0) = 1.0;
  EXPECT_THROW(lmo(NormKind::Spectral, s), RankDeficiencyError);
}

TEST(NormEquivalence, Constants) {
  EXPECT_DOUBLE_EQ(norm_equiv_constant(NormKind::Frobenius, 10, 5), 1.0);
  EXPECT_DOUBLE_EQ(norm_equiv_constant(NormKind::Spectral, 10, 5), std::sqrt(5.0));
  EXPECT_DOUBLE_EQ(norm_equiv_constant(NormKind::Spectral, 50, 3), std::sqrt(3.0));
  EXPECT_THROW(norm_equiv_constant(NormKind::Spectral, 2, 3), ConfigError);
}

TEST(NormEquivalence, HoldsOnSamples) {
  RngStream rng(35);
  for (int k = 0; k < 200; ++k) {
    const Mat x = rng.gaussian(10, 5);
    EXPECT_LE(x.norm(), norm_equiv_constant(NormKind::Spectral, 10, 5) * spectral_norm(x) + 1e-12);
  }
}

TEST(NormKind, Parsing) {
  EXPECT_EQ(parse_norm("fro"), NormKind::Frobenius);
  EXPECT_EQ(parse_norm("spectral"), NormKind::Spectral);
  EXPECT_THROW(parse_norm("nuclear"), ConfigError);
}
