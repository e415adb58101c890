#pragma once

// Executable forms of the descent lemma and the convergence-rate bounds.
// Checkers are read-only over traces and reproducible from their RNG seed.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mcsd/lmo.hpp"
#include "mcsd/objectives.hpp"
#include "mcsd/random.hpp"
#include "mcsd/trace.hpp"

namespace mcsd {

struct BoundConstants {
  double lipschitz = 0.0;   // L
  double norm_equiv = 0.0;  // N
  double radius = 0.2;      // r
  double delta = 0.0;       // Delta >= f(x0) - inf f
};

/// One inequality instance lhs <= rhs + slack.
struct BoundReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool passed = false;
  BoundConstants constants;
  std::string detail;
  /// (x, d) of the worst sample, set when a sampled check fails.
  std::optional<std::pair<Mat, Mat>> witness;
};

BoundReport make_report(std::string name, double lhs, double rhs, double slack, BoundConstants constants = {});

/// "PASS name: lhs <= rhs + slack" style line.
std::string to_text(const BoundReport& r);
/// Machine-readable "name,lhs,rhs,slack,pass".
std::string to_record(const BoundReport& r);

/// f(P(x + d)) - [f(x) + <grad_M f(x), d> + L/2 ||d||_F^2], exact projection.
double descent_lemma_gap(const BrockettInstance& inst, const Mat& x, const Mat& d, double lipschitz);

/// Samples Haar x and d with ||d||_2 uniform in (0, r]; reports the worst
/// sample against L = l_composed with slack 1e-8.
BoundReport check_descent_lemma(const BrockettInstance& inst, long samples, double radius, RngStream& rng);

/// sum_t alpha_t ||g_t||_* <= f(x_0) - f(x_T) + (L N^2 / 2) sum_t alpha_t^2,
/// slack 1e-6 T.
BoundReport audit_deterministic_bound(const RunTrace& trace, const BoundConstants& constants);

/// Deterministic (sigma = nullopt): max over traces of min_t ||g_t||_* against
/// sqrt(2 Delta L N^2 / T) + 1e-6. Stochastic: seed-mean of per-trace minima
/// against 4 N (sqrt(L Delta) + sigma) T^{-1/4} + 3 standard errors; needs at
/// least 20 traces.
BoundReport check_min_grad_rate(const std::vector<RunTrace>& traces, const BoundConstants& constants,
                                std::optional<double> sigma = std::nullopt);

/// Compares <s, lmo(s)> with the minimum of <s, d> over net_size points of the
/// unit ball, for `inputs` random s; tolerance 1e-2 ||s||_F.
BoundReport brute_force_lmo_check(NormKind norm, long rows, long cols, long net_size, RngStream& rng,
                                  int inputs = 1);

}  // namespace mcsd
