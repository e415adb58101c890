#pragma once

#include <string>

#include "mcsd/linalg.hpp"
#include "mcsd/random.hpp"

namespace mcsd {

/// St(n, p) = { X in R^{n x p} : X^T X = I_p }. The unit sphere is St(n, 1).
template <typename Scalar>
class StiefelManifold {
 public:
  StiefelManifold(Eigen::Index n, Eigen::Index p, Scalar feas_tol = Scalar(1e-8))
      : n_(n), p_(p), feas_tol_(feas_tol) {
    if (n < 1 || p < 1) throw ConfigError("StiefelManifold: dimensions must be positive");
    if (p > n) throw ConfigError("StiefelManifold: requires p <= n");
  }

  Eigen::Index n() const { return n_; }
  Eigen::Index p() const { return p_; }
  Scalar feas_tol() const { return feas_tol_; }

  void check_shape(const DenseMatrix<Scalar>& y, const char* who) const {
    if (y.rows() != n_ || y.cols() != p_)
      throw ConfigError(std::string(who) + ": expected " + std::to_string(n_) + "x" + std::to_string(p_) +
                        ", got " + std::to_string(y.rows()) + "x" + std::to_string(y.cols()));
  }

  bool operator==(const StiefelManifold&) const = default;

 private:
  Eigen::Index n_;
  Eigen::Index p_;
  Scalar feas_tol_;
};

/// ||x^T x - I_p||_F.
template <typename Scalar>
Scalar feasibility_violation(const DenseMatrix<Scalar>& x) {
  using ColMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const ColMat g = x.transpose() * x;
  return (g - ColMat::Identity(x.cols(), x.cols())).norm();
}

/// A matrix certified to lie on its manifold up to a tolerance.
template <typename Scalar>
class StiefelPoint {
 public:
  /// Certifies against the manifold's feas_tol.
  StiefelPoint(const StiefelManifold<Scalar>& m, DenseMatrix<Scalar> x)
      : StiefelPoint(m, std::move(x), m.feas_tol()) {}

  StiefelPoint(const StiefelManifold<Scalar>& m, DenseMatrix<Scalar> x, Scalar tol)
      : owner_(m), x_(std::move(x)) {
    m.check_shape(x_, "StiefelPoint");
    const Scalar viol = feasibility_violation(x_);
    if (!(viol <= tol))
      throw NumericError("StiefelPoint: feasibility violation " + std::to_string(viol) + " exceeds " +
                         std::to_string(tol));
  }

  /// Skips certification. Used only where the caller measures feasibility
  /// itself and wants to observe violations instead of aborting.
  static StiefelPoint unchecked(const StiefelManifold<Scalar>& m, DenseMatrix<Scalar> x) {
    return StiefelPoint(m, std::move(x), Unchecked{});
  }

  const DenseMatrix<Scalar>& matrix() const { return x_; }
  const StiefelManifold<Scalar>& manifold() const { return owner_; }

 private:
  struct Unchecked {};
  StiefelPoint(const StiefelManifold<Scalar>& m, DenseMatrix<Scalar> x, Unchecked) : owner_(m), x_(std::move(x)) {
    m.check_shape(x_, "StiefelPoint");
  }

  StiefelManifold<Scalar> owner_;
  DenseMatrix<Scalar> x_;
};

/// Polar factor of y without certification.
template <typename Scalar>
DenseMatrix<Scalar> project_raw(const StiefelManifold<Scalar>& m, const DenseMatrix<Scalar>& y,
                                const PolarMode<Scalar>& mode) {
  m.check_shape(y, "project");
  return msign(y, mode);
}

/// Nearest point projection P_St(y) = y (y^T y)^{-1/2}.
template <typename Scalar>
StiefelPoint<Scalar> project(const StiefelManifold<Scalar>& m, const DenseMatrix<Scalar>& y,
                             const PolarMode<Scalar>& mode = PolarMode<Scalar>::exact()) {
  return StiefelPoint<Scalar>(m, project_raw(m, y, mode));
}

/// g - x sym(x^T g): orthogonal projection onto the tangent space at x.
template <typename Scalar>
DenseMatrix<Scalar> tangent_project(const DenseMatrix<Scalar>& x, const DenseMatrix<Scalar>& g) {
  if (x.rows() != g.rows() || x.cols() != g.cols()) throw ConfigError("tangent_project: shape mismatch");
  const DenseMatrix<Scalar> xtg = x.transpose() * g;
  return g - x * sym(xtg);
}

template <typename Scalar>
DenseMatrix<Scalar> tangent_project(const StiefelPoint<Scalar>& x, const DenseMatrix<Scalar>& g) {
  return tangent_project(x.matrix(), g);
}

template <typename Scalar>
DenseMatrix<Scalar> riemannian_grad(const StiefelPoint<Scalar>& x, const DenseMatrix<Scalar>& euclid_grad) {
  return tangent_project(x, euclid_grad);
}

/// ||x^T z + z^T x||_F; zero exactly when z is tangent at x.
template <typename Scalar>
Scalar tangency_residual(const DenseMatrix<Scalar>& x, const DenseMatrix<Scalar>& z) {
  const DenseMatrix<Scalar> xtz = x.transpose() * z;
  return (xtz + xtz.transpose()).norm();
}

/// Haar-distributed point: polar factor of a Gaussian draw.
template <typename Scalar>
StiefelPoint<Scalar> random_point(const StiefelManifold<Scalar>& m, RngStream& rng) {
  for (int attempt = 0;; ++attempt) {
    try {
      return project(m, rng.gaussian<Scalar>(m.n(), m.p()));
    } catch (const RankDeficiencyError&) {
      if (attempt >= 1) throw;
    }
  }
}

}  // namespace mcsd
