#include "mcsd/optimizers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace mcsd {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void hold(OptimizerRun& run) {
  run.converged = true;
  run.last_inner_iters = 0;
  ++run.t;
}

// Projects y back to the manifold and installs it as the next iterate.
void advance(OptimizerRun& run, const Mat& y) {
  const Manifold& m = run.manifold();
  Mat next = project_raw(m, y, run.polar);
  const double viol = feasibility_violation(next);
  if (run.guard_feasibility) {
    const double limit = 100.0 * m.feas_tol();
    if (!(viol <= limit))
      throw NumericError("feasibility violation " + std::to_string(viol) + " exceeds " + std::to_string(limit) +
                         " at iteration " + std::to_string(run.t + 1));
    run.x = Point(m, std::move(next), limit);
  } else {
    run.x = Point::unchecked(m, std::move(next));
  }
  run.converged = false;
  ++run.t;
}

void steepest_step(OptimizerRun& run, const Objective& f, NormKind norm) {
  const Mat g = riemannian_grad(run.x, f.euclid_grad(run.x.matrix()));
  const auto d = lmo(norm, g, run.polar);
  if (!d) return hold(run);
  const double alpha = run.schedule.alpha(run.t);
  run.last_inner_iters = 0;
  advance(run, run.x.matrix() + alpha * *d);
}

}  // namespace

std::string method_label(const MethodSpec& m) {
  return std::visit(overloaded{
                        [](const McsdMethod& s) {
                          return s.norm == NormKind::Spectral ? std::string("spel") : std::string("mcsd-fro");
                        },
                        [](const StochasticMcsdMethod& s) { return "smcsd-" + to_string(s.norm); },
                        [](const RgdMethod&) { return std::string("rgd"); },
                        [](const ManifoldMuonMethod&) { return std::string("mm"); },
                    },
                    m);
}

NormKind reporting_norm(const MethodSpec& m) {
  return std::visit(overloaded{
                        [](const McsdMethod& s) { return s.norm; },
                        [](const StochasticMcsdMethod& s) { return s.norm; },
                        [](const RgdMethod&) { return NormKind::Frobenius; },
                        [](const ManifoldMuonMethod&) { return NormKind::Spectral; },
                    },
                    m);
}

void mcsd_step(OptimizerRun& run, const Objective& f) {
  const auto* m = std::get_if<McsdMethod>(&run.method);
  if (!m) throw ConfigError("mcsd_step: run is not configured for MCSD");
  steepest_step(run, f, m->norm);
}

void rgd_step(OptimizerRun& run, const Objective& f) {
  if (!std::holds_alternative<RgdMethod>(run.method)) throw ConfigError("rgd_step: run is not configured for RGD");
  // Normalized Riemannian gradient step == MCSD with the Frobenius LMO.
  steepest_step(run, f, NormKind::Frobenius);
}

void stochastic_mcsd_step(OptimizerRun& run, const Objective& f) {
  const auto* m = std::get_if<StochasticMcsdMethod>(&run.method);
  if (!m) throw ConfigError("stochastic_mcsd_step: run is not configured for stochastic MCSD");
  if (!(m->beta >= 0.0 && m->beta < 1.0)) throw ConfigError("stochastic MCSD: beta must lie in [0, 1)");
  const Mat g = f.stochastic_grad(run.x.matrix(), run.rng, m->noise);
  if (run.t == 0 || !run.momentum) {
    run.momentum = g;
  } else {
    *run.momentum = m->beta * *run.momentum + (1.0 - m->beta) * g;
  }
  const Mat s = tangent_project(run.x, *run.momentum);
  const auto d = lmo(m->norm, s, run.polar);
  if (!d) return hold(run);
  const double alpha = run.schedule.alpha(run.t);
  run.last_inner_iters = 0;
  advance(run, run.x.matrix() + alpha * *d);
}

MuonDirection manifold_muon_direction(const Mat& x, const Mat& g, int inner_iters, double inner_lr,
                                      double quality_tol, const Polar& polar) {
  if (inner_iters < 1) throw ConfigError("manifold muon: inner_iters must be >= 1");
  if (!(inner_lr > 0.0)) throw ConfigError("manifold muon: inner_lr must be positive");
  const double g_fro = g.norm();
  if (!(g_fro > zero_tolerance(g))) throw ConfigError("manifold muon: gradient is zero");
  const double g_spec = spectral_norm(g);

  // The minimizer is invariant to positive scaling of g; normalizing keeps
  // the multiplier on the same scale as the unit-ball direction.
  const Mat gn = g / g_spec;
  const long p = x.cols();
  Mat lambda = Mat::Zero(p, p);
  Mat d;
  for (int k = 0; k < inner_iters; ++k) {
    d = -msign(Mat(gn + x * lambda), polar);
    lambda += inner_lr * sym(Mat(x.transpose() * d));
  }

  d = tangent_project(x, d);
  d /= std::max(1.0, spectral_norm(d));

  MuonDirection out{std::move(d), inner_iters, false};
  const double bound = -(g_fro * g_fro) / g_spec + quality_tol * g_fro;
  if (!(inner(g, out.d) <= bound)) {
    out.d = -g / g_spec;
    out.fallback = true;
  }
  return out;
}

void manifold_muon_step(OptimizerRun& run, const Objective& f) {
  const auto* m = std::get_if<ManifoldMuonMethod>(&run.method);
  if (!m) throw ConfigError("manifold_muon_step: run is not configured for Manifold Muon");
  const Mat g = riemannian_grad(run.x, f.euclid_grad(run.x.matrix()));
  if (!(g.norm() > zero_tolerance(g))) return hold(run);
  MuonDirection dir = manifold_muon_direction(run.x.matrix(), g, m->inner_iters, m->inner_lr, m->quality_tol, run.polar);
  if (dir.fallback)
    run.warnings.push_back("inner solver fell back to -g/||g||_2 at iteration " + std::to_string(run.t));
  const double alpha = run.schedule.alpha(run.t);
  advance(run, run.x.matrix() + alpha * dir.d);
  run.last_inner_iters = dir.inner_iters;
}

void step(OptimizerRun& run, const Objective& f) {
  std::visit(overloaded{
                 [&](const McsdMethod&) { mcsd_step(run, f); },
                 [&](const StochasticMcsdMethod&) { stochastic_mcsd_step(run, f); },
                 [&](const RgdMethod&) { rgd_step(run, f); },
                 [&](const ManifoldMuonMethod&) { manifold_muon_step(run, f); },
             },
             run.method);
}

namespace {

TraceRecord measure(const OptimizerRun& run, const Objective& f, const ReferenceMetric& reference, NormKind norm) {
  const Mat& x = run.x.matrix();
  TraceRecord r;
  r.iter = run.t;
  r.objective = f.value(x);
  r.subspace_error = reference ? reference(x) : 0.0;
  r.orth_violation = feasibility_violation(x);
  r.grad_dual_norm = dual_norm(norm, tangent_project(x, f.euclid_grad(x)));
  r.step_size = run.schedule.alpha(run.t);
  return r;
}

}  // namespace

RunTrace run_trajectory(OptimizerRun& run, const Objective& f, long steps, const ReferenceMetric& reference,
                        TrajectoryOptions options) {
  using Clock = std::chrono::steady_clock;
  RunTrace trace;
  trace.method = method_label(run.method);
  const NormKind norm = reporting_norm(run.method);
  trace.records.reserve(static_cast<std::size_t>(steps + 1));
  trace.records.push_back(measure(run, f, reference, norm));
  double elapsed = 0.0;
  for (long k = 0; k < steps; ++k) {
    const auto start = Clock::now();
    try {
      step(run, f);
    } catch (const NumericError& e) {
      trace.abort_reason = std::string(e.what());
      break;
    }
    elapsed += std::chrono::duration<double>(Clock::now() - start).count();
    TraceRecord r = measure(run, f, reference, norm);
    r.inner_iters = run.last_inner_iters;
    r.elapsed_s = options.record_time ? elapsed : 0.0;
    trace.records.push_back(r);
  }
  trace.warnings = run.warnings;
  return trace;
}

}  // namespace mcsd
