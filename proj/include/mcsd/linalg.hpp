#pragma once

// Dense kernels and the matrix sign (polar factor) operator.
//
// All routines are templated on the scalar type; the library instantiates
// them with double throughout.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mcsd/errors.hpp"

namespace mcsd {

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Mat = DenseMatrix<double>;

/// Thin SVD y = u * diag(s) * vt with k = min(rows, cols).
template <typename Scalar>
struct SvdFactors {
  DenseMatrix<Scalar> u;   // rows x k, orthonormal columns
  std::vector<Scalar> s;   // descending, nonnegative
  DenseMatrix<Scalar> vt;  // k x cols, orthonormal rows
};

template <typename Scalar>
struct MatrixNorms {
  Scalar frobenius;
  Scalar spectral;
  Scalar nuclear;
};

/// Coefficients of one odd-polynomial polar step
/// X <- a X + b X (X^T X) + c X (X^T X)^2.
template <typename Scalar>
struct PolarStep {
  Scalar a;
  Scalar b;
  Scalar c;
};

/// Per-iteration coefficient schedule for msign_iterative. The last entry is
/// reused once the schedule is exhausted, so a single entry describes a
/// stationary iteration.
template <typename Scalar>
struct PolarScheme {
  std::vector<PolarStep<Scalar>> steps;
  Scalar prescale = Scalar(1.01);

  static PolarScheme newton_schulz() { return PolarScheme{{{Scalar(1.5), Scalar(-0.5), Scalar(0)}}}; }

  const PolarStep<Scalar>& at(std::size_t k) const { return steps[std::min(k, steps.size() - 1)]; }
};

/// How msign is evaluated: through the SVD or through a polynomial iteration.
template <typename Scalar>
struct PolarMode {
  enum class Kind { Exact, Iterative };
  Kind kind = Kind::Exact;
  int iters = 8;
  PolarScheme<Scalar> scheme = PolarScheme<Scalar>::newton_schulz();

  static PolarMode exact() { return PolarMode{}; }
  static PolarMode iterative(int iters) { return PolarMode{Kind::Iterative, iters}; }

  bool is_exact() const { return kind == Kind::Exact; }
  std::string describe() const { return is_exact() ? "exact" : "iterative:" + std::to_string(iters); }
};

inline constexpr double kRankTolerance = 1e-10;

template <typename Scalar>
DenseMatrix<Scalar> matmul(const DenseMatrix<Scalar>& a, const DenseMatrix<Scalar>& b) {
  if (a.cols() != b.rows())
    throw ConfigError("matmul: inner dimensions differ (" + std::to_string(a.cols()) + " vs " +
                      std::to_string(b.rows()) + ")");
  return a * b;
}

/// Symmetric part 0.5 (a + a^T). Entry (i, j) and (j, i) are computed by the
/// same expression, so the result is bitwise symmetric.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> sym(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  if (a.rows() != a.cols()) throw ConfigError("sym: matrix is not square");
  const Eigen::Index n = a.rows();
  DenseMatrix<Scalar> out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out(i, i) = a(i, i);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Scalar v = Scalar(0.5) * (a(i, j) + a(j, i));
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

template <typename Scalar>
Scalar inner(const DenseMatrix<Scalar>& a, const DenseMatrix<Scalar>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ConfigError("inner: shape mismatch");
  return a.cwiseProduct(b).sum();
}

namespace detail {

// One-sided Jacobi (Hestenes) on the columns of a tall matrix. On return the
// columns of `work` are mutually orthogonal and `v` accumulates the rotations.
template <typename Scalar>
void hestenes_sweeps(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& work,
                     Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& v) {
  constexpr int kMaxSweeps = 80;
  const Eigen::Index k = work.cols();
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (Eigen::Index i = 0; i + 1 < k; ++i) {
      for (Eigen::Index j = i + 1; j < k; ++j) {
        const Scalar alpha = work.col(i).squaredNorm();
        const Scalar beta = work.col(j).squaredNorm();
        const Scalar gamma = work.col(i).dot(work.col(j));
        if (gamma == Scalar(0) || std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const Scalar zeta = (beta - alpha) / (Scalar(2) * gamma);
        const Scalar t = (zeta >= 0 ? Scalar(1) : Scalar(-1)) /
                         (std::abs(zeta) + std::sqrt(Scalar(1) + zeta * zeta));
        const Scalar c = Scalar(1) / std::sqrt(Scalar(1) + t * t);
        const Scalar s = c * t;
        for (Eigen::Index r = 0; r < work.rows(); ++r) {
          const Scalar wi = work(r, i);
          const Scalar wj = work(r, j);
          work(r, i) = c * wi - s * wj;
          work(r, j) = s * wi + c * wj;
        }
        for (Eigen::Index r = 0; r < v.rows(); ++r) {
          const Scalar vi = v(r, i);
          const Scalar vj = v(r, j);
          v(r, i) = c * vi - s * vj;
          v(r, j) = s * vi + c * vj;
        }
      }
    }
    if (!rotated) return;
  }
  throw NumericError("svd: one-sided Jacobi did not converge after " + std::to_string(kMaxSweeps) +
                     " sweeps");
}

template <typename Scalar>
SvdFactors<Scalar> svd_tall(const DenseMatrix<Scalar>& y) {
  using ColMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index m = y.rows();
  const Eigen::Index k = y.cols();
  ColMat work = y;
  ColMat v = ColMat::Identity(k, k);
  hestenes_sweeps(work, v);

  std::vector<Scalar> sigma(static_cast<std::size_t>(k));
  for (Eigen::Index j = 0; j < k; ++j) sigma[j] = work.col(j).norm();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return sigma[a] > sigma[b]; });

  SvdFactors<Scalar> out;
  out.u.setZero(m, k);
  out.vt.resize(k, k);
  out.s.resize(static_cast<std::size_t>(k));
  const Scalar smax = k > 0 ? sigma[order[0]] : Scalar(0);
  const Scalar floor_tol = std::numeric_limits<Scalar>::epsilon() * std::max<Scalar>(smax, Scalar(1e-300)) * Scalar(m);
  std::vector<Eigen::Index> null_cols;
  for (Eigen::Index j = 0; j < k; ++j) {
    const Eigen::Index src = order[j];
    out.s[j] = sigma[src];
    out.vt.row(j) = v.col(src).transpose();
    if (sigma[src] > floor_tol) {
      out.u.col(j) = work.col(src) / sigma[src];
    } else {
      null_cols.push_back(j);
    }
  }
  // Complete u with an orthonormal basis for columns belonging to (numerically)
  // zero singular values.
  Eigen::Index probe = 0;
  for (Eigen::Index j : null_cols) {
    for (; probe < m; ++probe) {
      Eigen::Matrix<Scalar, Eigen::Dynamic, 1> e = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Unit(m, probe);
      for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index c = 0; c < k; ++c) e -= out.u.col(c).dot(e) * out.u.col(c);
      const Scalar nrm = e.norm();
      if (nrm > Scalar(0.5)) {
        out.u.col(j) = e / nrm;
        ++probe;
        break;
      }
    }
  }
  return out;
}

}  // namespace detail

/// Thin SVD by one-sided Jacobi. Wide inputs are handled by factoring the
/// transpose.
template <typename Scalar>
SvdFactors<Scalar> svd(const DenseMatrix<Scalar>& y) {
  if (!y.allFinite()) throw ConfigError("svd: input has non-finite entries");
  if (y.rows() >= y.cols()) return detail::svd_tall(y);
  DenseMatrix<Scalar> yt = y.transpose();
  SvdFactors<Scalar> f = detail::svd_tall(yt);
  SvdFactors<Scalar> out;
  out.u = f.vt.transpose();
  out.s = std::move(f.s);
  out.vt = f.u.transpose();
  return out;
}

template <typename Scalar>
MatrixNorms<Scalar> norms(const DenseMatrix<Scalar>& a) {
  const Scalar fro = a.norm();
  if (fro == Scalar(0)) return {Scalar(0), Scalar(0), Scalar(0)};
  const SvdFactors<Scalar> f = svd(a);
  return {fro, f.s.front(), std::accumulate(f.s.begin(), f.s.end(), Scalar(0))};
}

/// Largest singular value from the eigenvalues of the smaller Gram matrix.
/// Cheaper than a full SVD for tall-skinny inputs; relative accuracy ~ eps.
template <typename Scalar>
Scalar spectral_norm(const DenseMatrix<Scalar>& a) {
  using ColMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (a.size() == 0) return Scalar(0);
  const ColMat gram = a.rows() >= a.cols() ? ColMat(a.transpose() * a) : ColMat(a * a.transpose());
  Eigen::SelfAdjointEigenSolver<ColMat> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(es.eigenvalues().maxCoeff(), Scalar(0)));
}

/// Polar factor U V^T of a full-rank matrix, computed from the SVD.
template <typename Scalar>
DenseMatrix<Scalar> msign_exact(const DenseMatrix<Scalar>& y) {
  const SvdFactors<Scalar> f = svd(y);
  const Scalar smax = f.s.front();
  const Scalar smin = f.s.back();
  if (!(smax > Scalar(0)) || smin <= Scalar(kRankTolerance) * smax)
    throw RankDeficiencyError("msign: input is rank deficient (sigma_min=" + std::to_string(smin) +
                              ", sigma_max=" + std::to_string(smax) + ")");
  return f.u * f.vt;
}

/// Polynomial approximation of msign. The input is first scaled by
/// 1 / (prescale * ||y||_F) so every singular value lies in (0, 1).
template <typename Scalar>
DenseMatrix<Scalar> msign_iterative(const DenseMatrix<Scalar>& y, const PolarScheme<Scalar>& scheme,
                                    int iters) {
  if (iters < 1) throw ConfigError("msign_iterative: iteration count must be >= 1");
  if (scheme.steps.empty()) throw ConfigError("msign_iterative: empty polar scheme");
  if (!y.allFinite()) throw ConfigError("msign_iterative: input has non-finite entries");
  const Scalar fro = y.norm();
  if (fro == Scalar(0)) throw RankDeficiencyError("msign_iterative: zero input");

  using ColMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const bool tall = y.rows() >= y.cols();
  const Scalar limit = Scalar(10) * std::sqrt(static_cast<Scalar>(std::min(y.rows(), y.cols())));
  DenseMatrix<Scalar> x = y / (scheme.prescale * fro);
  for (int k = 0; k < iters; ++k) {
    const PolarStep<Scalar>& c = scheme.at(static_cast<std::size_t>(k));
    if (tall) {
      const ColMat a = x.transpose() * x;
      ColMat poly = c.b * a;
      if (c.c != Scalar(0)) poly += c.c * (a * a);
      x = c.a * x + x * poly;
    } else {
      const ColMat a = x * x.transpose();
      ColMat poly = c.b * a;
      if (c.c != Scalar(0)) poly += c.c * (a * a);
      x = c.a * x + poly * x;
    }
    const Scalar n = x.norm();
    if (!std::isfinite(n) || n > limit)
      throw NumericError("msign_iterative: diverged at iteration " + std::to_string(k + 1));
  }
  return x;
}

template <typename Scalar>
DenseMatrix<Scalar> msign(const DenseMatrix<Scalar>& y, const PolarMode<Scalar>& mode) {
  return mode.is_exact() ? msign_exact(y) : msign_iterative(y, mode.scheme, mode.iters);
}

}  // namespace mcsd
