#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mcsd/lmo.hpp"
#include "mcsd/objectives.hpp"
#include "mcsd/schedule.hpp"
#include "mcsd/stiefel.hpp"
#include "mcsd/trace.hpp"

namespace mcsd {

/// x+ = P(x + alpha LMO(grad_M f(x))).
struct McsdMethod {
  NormKind norm = NormKind::Spectral;
};

/// Heavy-ball momentum on sampled gradients; the LMO acts on the tangent
/// projection of the momentum.
struct StochasticMcsdMethod {
  NormKind norm = NormKind::Spectral;
  double beta = 0.9;
  NoiseConfig noise = AdditiveGaussian{0.0};
};

/// Riemannian gradient descent with normalized steps and polar retraction.
struct RgdMethod {};

/// Tangent-space LMO solved by dual subgradient ascent on the symmetric
/// multiplier of the tangency constraint.
struct ManifoldMuonMethod {
  int inner_iters = 10;
  double inner_lr = 0.1;
  double quality_tol = 1e-3;
};

using MethodSpec = std::variant<McsdMethod, StochasticMcsdMethod, RgdMethod, ManifoldMuonMethod>;

std::string method_label(const MethodSpec& m);
/// Norm whose dual is reported as grad_dual_norm in traces.
NormKind reporting_norm(const MethodSpec& m);

using Manifold = StiefelManifold<double>;
using Point = StiefelPoint<double>;
using Polar = PolarMode<double>;

/// One optimization trajectory: configuration plus evolving state.
struct OptimizerRun {
  MethodSpec method;
  StepSchedule schedule;
  Point x;
  std::optional<Mat> momentum;
  long t = 0;
  RngStream rng;
  Polar polar = Polar::exact();
  /// Abort when ||x^T x - I||_F exceeds 100 * feas_tol after a step.
  bool guard_feasibility = true;
  bool converged = false;
  int last_inner_iters = 0;
  std::vector<std::string> warnings;

  OptimizerRun(MethodSpec m, StepSchedule s, Point x0, std::uint64_t seed, Polar mode = Polar::exact())
      : method(std::move(m)), schedule(std::move(s)), x(std::move(x0)), rng(seed), polar(std::move(mode)) {}

  const Manifold& manifold() const { return x.manifold(); }
};

void mcsd_step(OptimizerRun& run, const Objective& f);
void rgd_step(OptimizerRun& run, const Objective& f);
void stochastic_mcsd_step(OptimizerRun& run, const Objective& f);
void manifold_muon_step(OptimizerRun& run, const Objective& f);
/// Dispatches on run.method.
void step(OptimizerRun& run, const Objective& f);

struct MuonDirection {
  Mat d;
  int inner_iters = 0;
  bool fallback = false;
};

/// Approximate argmin of <g, d> over {||d||_2 <= 1, d tangent at x}. The
/// returned direction is made feasible by tangent projection and a spectral
/// clip; if it does not beat -g/||g||_2 up to quality_tol * ||g||_F it is
/// replaced by that point.
MuonDirection manifold_muon_direction(const Mat& x, const Mat& g, int inner_iters, double inner_lr,
                                      double quality_tol = 1e-3, const Polar& polar = Polar::exact());

/// Extra per-iterate metric, e.g. subspace error against a known optimum.
using ReferenceMetric = std::function<double(const Mat&)>;

struct TrajectoryOptions {
  bool record_time = true;
};

/// Runs `steps` iterations and records T + 1 trace rows. Numeric failures stop
/// the run and are reported through RunTrace::abort_reason.
RunTrace run_trajectory(OptimizerRun& run, const Objective& f, long steps, const ReferenceMetric& reference = {},
                        TrajectoryOptions options = {});

}  // namespace mcsd
