#include <gtest/gtest.h>

#include "mcsd/linalg.hpp"
#include "mcsd/random.hpp"
#include "oracles.hpp"

using namespace mcsd;

namespace {

Mat from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Mat m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

Mat haar_orthogonal(long n, RngStream& rng) { return oracle::polar(rng.gaussian(n, n)); }

Mat with_condition(long n, long p, double kappa, RngStream& rng) {
  const Mat u = oracle::polar(rng.gaussian(n, p));
  const Mat v = haar_orthogonal(p, rng);
  Eigen::VectorXd s(p);
  for (long i = 0; i < p; ++i) s(i) = p == 1 ? 1.0 : std::pow(kappa, -static_cast<double>(i) / (p - 1));
  return u * s.asDiagonal() * v.transpose();
}

}  // namespace

TEST(Matmul, MatchesTripleLoop) {
  RngStream rng(1);
  for (auto [m, k, n] : {std::tuple{3, 4, 5}, {17, 1, 9}, {1, 8, 1}, {40, 33, 12}}) {
    const Mat a = rng.gaussian(m, k), b = rng.gaussian(k, n);
    EXPECT_LT((matmul(a, b) - oracle::triple_loop_matmul(a, b)).norm(), 1e-12 * (1 + a.norm() * b.norm()));
  }
}

TEST(Matmul, ShapeMismatchIsConfigError) {
  EXPECT_THROW(matmul(Mat(Mat::Zero(2, 3)), Mat(Mat::Zero(2, 3))), ConfigError);
}

TEST(Sym, AveragesWithTranspose) {
  const Mat s = sym(from_rows({{1, 2}, {4, 3}}));
  EXPECT_EQ(s, from_rows({{1, 3}, {3, 3}}));
}

TEST(Sym, ResultIsExactlySymmetric) {
  RngStream rng(2);
  const Mat s = sym(rng.gaussian(7, 7));
  EXPECT_EQ(s, Mat(s.transpose()));
}

TEST(Sym, RejectsNonSquare) { EXPECT_THROW(sym(Mat(Mat::Zero(2, 3))), ConfigError); }

TEST(Inner, IsTraceOfProduct) {
  RngStream rng(3);
  const Mat a = rng.gaussian(6, 4), b = rng.gaussian(6, 4);
  EXPECT_NEAR(inner(a, b), (a.transpose() * b).trace(), 1e-12);
}

TEST(Svd, SingularValuesMatchEigenJacobi) {
  RngStream rng(4);
  for (auto [m, n] : {std::pair{5, 3}, {3, 5}, {30, 7}, {4, 4}, {1, 6}, {6, 1}}) {
    const Mat y = rng.gaussian(m, n);
    const SvdFactors<double> f = svd(y);
    const Eigen::VectorXd ref = oracle::singular_values(y);
    ASSERT_EQ(static_cast<Eigen::Index>(f.s.size()), ref.size());
    for (Eigen::Index i = 0; i < ref.size(); ++i) EXPECT_NEAR(f.s[static_cast<std::size_t>(i)], ref(i), 1e-12 * ref(0));
    for (std::size_t i = 1; i < f.s.size(); ++i) EXPECT_GE(f.s[i - 1], f.s[i]);
  }
}

TEST(Svd, FactorsReconstructAndAreOrthonormal) {
  RngStream rng(5);
  for (auto [m, n] : {std::pair{9, 4}, {4, 9}, {6, 6}}) {
    const Mat y = rng.gaussian(m, n);
    const SvdFactors<double> f = svd(y);
    const Eigen::Map<const Eigen::VectorXd> s(f.s.data(), static_cast<Eigen::Index>(f.s.size()));
    EXPECT_LT((f.u * s.asDiagonal() * f.vt - y).norm(), 1e-12 * y.norm());
    const long k = std::min(m, n);
    EXPECT_LT((f.u.transpose() * f.u - Eigen::MatrixXd::Identity(k, k)).norm(), 1e-12);
    EXPECT_LT((f.vt * f.vt.transpose() - Eigen::MatrixXd::Identity(k, k)).norm(), 1e-12);
  }
}

TEST(Svd, RankDeficientStillHasOrthonormalFactors) {
  RngStream rng(6);
  Mat y = rng.gaussian(8, 3);
  y.col(2) = 2.0 * y.col(0) - y.col(1);
  const SvdFactors<double> f = svd(y);
  EXPECT_LT(f.s[2], 1e-12 * f.s[0]);
  EXPECT_LT((f.u.transpose() * f.u - Eigen::MatrixXd::Identity(3, 3)).norm(), 1e-12);
}

TEST(Svd, RejectsNonFiniteInput) {
  Mat y = Mat::Ones(3, 2);
  y(1, 1) = std::nan("");
  EXPECT_THROW(svd(y), ConfigError);
}

TEST(Norms, DiagonalExample) {
  const MatrixNorms<double> n = norms(from_rows({{2, 0}, {0, 3}}));
  EXPECT_NEAR(n.frobenius, std::sqrt(13.0), 1e-15);
  EXPECT_NEAR(n.spectral, 3.0, 1e-15);
  EXPECT_NEAR(n.nuclear, 5.0, 1e-14);
}

TEST(Norms, ZeroMatrix) {
  const MatrixNorms<double> n = norms(Mat(Mat::Zero(3, 2)));
  EXPECT_EQ(n.frobenius, 0.0);
  EXPECT_EQ(n.spectral, 0.0);
  EXPECT_EQ(n.nuclear, 0.0);
}

TEST(Norms, SpectralMatchesOracle) {
  RngStream rng(7);
  for (int k = 0; k < 5; ++k) {
    const Mat y = rng.gaussian(12, 5);
    EXPECT_NEAR(spectral_norm(y), oracle::spectral(y), 1e-12 * y.norm());
    EXPECT_NEAR(norms(y).nuclear, oracle::nuclear(y), 1e-11 * y.norm());
  }
}

TEST(MsignExact, DiagonalSignExample) {
  EXPECT_LT((msign_exact(from_rows({{2, 0}, {0, -3}})) - from_rows({{1, 0}, {0, -1}})).norm(), 1e-15);
}

TEST(MsignExact, MatchesGramOracle) {
  RngStream rng(8);
  for (auto [m, n] : {std::pair{20, 4}, {4, 20}, {5, 5}}) {
    const Mat y = rng.gaussian(m, n);
    const Mat ref = m >= n ? oracle::polar_via_gram(y) : Mat(oracle::polar_via_gram(y.transpose()).transpose());
    EXPECT_LT((msign_exact(y) - ref).norm(), 1e-11);
  }
}

TEST(MsignExact, OrthogonalEquivariance) {
  RngStream rng(9);
  const Mat y = rng.gaussian(10, 4);
  const Mat q = haar_orthogonal(10, rng), r = haar_orthogonal(4, rng);
  EXPECT_LT((msign_exact(Mat(q * y * r)) - q * msign_exact(y) * r).norm(), 1e-12);
}

TEST(MsignExact, RankDeficientThrows) {
  Mat y = Mat::Zero(4, 2);
  y(0, 0) = 1.0;
  EXPECT_THROW(msign_exact(y), RankDeficiencyError);
  EXPECT_THROW(msign_exact(Mat(Mat::Zero(3, 3))), RankDeficiencyError);
}

TEST(MsignIterative, GaussianTallInputsConvergeInEightIterations) {
  RngStream rng(10);
  const PolarScheme<double> ns = PolarScheme<double>::newton_schulz();
  for (int k = 0; k < 20; ++k) {
    const Mat y = rng.gaussian(200, 5);
    const Mat z = msign_iterative(y, ns, 8);
    EXPECT_LT((z - oracle::polar(y)).norm(), 1e-6);
    EXPECT_LT((z.transpose() * z - Eigen::MatrixXd::Identity(5, 5)).norm(), 1e-8);
  }
}

TEST(MsignIterative, ConditionTenNeedsMoreIterations) {
  RngStream rng(11);
  const PolarScheme<double> ns = PolarScheme<double>::newton_schulz();
  const Mat y = with_condition(50, 5, 10.0, rng);
  EXPECT_LT((msign_iterative(y, ns, 30) - oracle::polar(y)).norm(), 1e-6);
  EXPECT_GT((msign_iterative(y, ns, 8) - oracle::polar(y)).norm(), 1e-6);
}

TEST(MsignIterative, WideInputsMatchTransposedTall) {
  RngStream rng(12);
  const PolarScheme<double> ns = PolarScheme<double>::newton_schulz();
  const Mat y = rng.gaussian(5, 60);
  EXPECT_LT((msign_iterative(y, ns, 10) - Mat(msign_iterative(Mat(y.transpose()), ns, 10).transpose())).norm(),
            1e-13);
  EXPECT_LT((msign_iterative(y, ns, 12) - oracle::polar(y)).norm(), 1e-6);
}

TEST(MsignIterative, StiefelPointIsNearlyFixed) {
  RngStream rng(13);
  const PolarScheme<double> ns = PolarScheme<double>::newton_schulz();
  for (long p : {1, 3, 5}) {
    const Mat x = oracle::polar(rng.gaussian(40, p));
    for (int iters : {8, 12, 30}) EXPECT_LT((msign_iterative(x, ns, iters) - x).norm(), 1e-8) << p << " " << iters;
  }
}

TEST(MsignIterative, DivergingSchemeIsNumericError) {
  PolarScheme<double> bad{{{3.0, 0.0, 0.0}}};
  RngStream rng(14);
  try {
    msign_iterative(Mat(rng.gaussian(6, 2)), bad, 20);
    FAIL() << "expected divergence";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("iteration"), std::string::npos);
  }
}

TEST(MsignIterative, ZeroInputAndBadArguments) {
  const PolarScheme<double> ns = PolarScheme<double>::newton_schulz();
  EXPECT_THROW(msign_iterative(Mat(Mat::Zero(4, 2)), ns, 8), RankDeficiencyError);
  EXPECT_THROW(msign_iterative(Mat(Mat::Ones(4, 2)), ns, 0), ConfigError);
  EXPECT_THROW(msign_iterative(Mat(Mat::Ones(4, 2)), PolarScheme<double>{{}}, 3), ConfigError);
}

TEST(Msign, DispatchesOnMode) {
  RngStream rng(15);
  const Mat y = rng.gaussian(30, 3);
  EXPECT_EQ(msign(y, PolarMode<double>::exact()), msign_exact(y));
  EXPECT_EQ(msign(y, PolarMode<double>::iterative(5)),
            msign_iterative(y, PolarScheme<double>::newton_schulz(), 5));
  EXPECT_EQ(PolarMode<double>::iterative(8).describe(), "iterative:8");
}

TEST(Msign, FloatInstantiation) {
  RngStream rng(16);
  const DenseMatrix<float> y = rng.gaussian<float>(20, 3);
  const DenseMatrix<float> z = msign_exact(y);
  EXPECT_LT((z.transpose() * z - Eigen::MatrixXf::Identity(3, 3)).norm(), 1e-5f);
}
