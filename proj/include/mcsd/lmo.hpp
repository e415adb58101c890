#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "mcsd/linalg.hpp"

namespace mcsd {

/// Norm whose unit ball the LMO minimizes over. The dual of Spectral is the
/// nuclear norm, which only appears through dual_norm.
enum class NormKind { Frobenius, Spectral };

inline std::string to_string(NormKind k) { return k == NormKind::Frobenius ? "frobenius" : "spectral"; }

inline NormKind parse_norm(const std::string& s) {
  if (s == "frobenius" || s == "fro") return NormKind::Frobenius;
  if (s == "spectral" || s == "spec") return NormKind::Spectral;
  throw ConfigError("unknown norm '" + s + "' (expected frobenius|spectral)");
}

template <typename Scalar>
Scalar zero_tolerance(const DenseMatrix<Scalar>& s) {
  return Scalar(1e-14) * std::sqrt(static_cast<Scalar>(s.rows() * s.cols()));
}

/// argmin_{||d|| <= 1} <s, d>. Returns nullopt when s is (numerically) zero:
/// every point of the ball is optimal there and callers treat it as converged.
template <typename Scalar>
std::optional<DenseMatrix<Scalar>> lmo(NormKind norm, const DenseMatrix<Scalar>& s,
                                       const PolarMode<Scalar>& mode = PolarMode<Scalar>::exact()) {
  const Scalar fro = s.norm();
  if (!(fro > zero_tolerance(s))) return std::nullopt;
  if (norm == NormKind::Frobenius) return DenseMatrix<Scalar>(-s / fro);
  return DenseMatrix<Scalar>(-msign(s, mode));
}

/// sup_{||d|| <= 1} <d, s>.
template <typename Scalar>
Scalar dual_norm(NormKind norm, const DenseMatrix<Scalar>& s) {
  if (norm == NormKind::Frobenius) return s.norm();
  return norms(s).nuclear;
}

template <typename Scalar>
Scalar primal_norm(NormKind norm, const DenseMatrix<Scalar>& d) {
  return norm == NormKind::Frobenius ? d.norm() : spectral_norm(d);
}

/// Smallest N with ||x||_F <= N ||x|| on R^{n x p}.
inline double norm_equiv_constant(NormKind norm, long n, long p) {
  if (p > n) throw ConfigError("norm_equiv_constant: requires p <= n");
  if (norm == NormKind::Frobenius) return 1.0;
  return std::sqrt(static_cast<double>(std::min(n, p)));
}

}  // namespace mcsd
