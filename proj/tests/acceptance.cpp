// One PASS/FAIL line per acceptance criterion; exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mcsd/bench.hpp"

using namespace mcsd;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

const BrockettInstance& pca_instance() {
  static const BrockettInstance inst = build_instance(default_pca_config().instance);
  return inst;
}

const TheoryScenario& theory() {
  static const TheoryScenario sc = make_theory_scenario(50, 3, 200);
  return sc;
}

Outcome polar_accuracy() {
  RngStream rng(101);
  const PolarScheme<double> ns = PolarScheme<double>::newton_schulz();
  double worst_err = 0.0, worst_orth = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Mat y = rng.gaussian(200, 5);
    const Mat z = msign_iterative(y, ns, 8);
    worst_err = std::max(worst_err, (z - msign_exact(y)).norm());
    worst_orth = std::max(worst_orth, feasibility_violation(z));
  }
  return {worst_err <= 1e-6 && worst_orth <= 1e-8,
          "max ||NS8 - exact||_F=" + fmt(worst_err) + " max orth=" + fmt(worst_orth)};
}

Outcome pca_head_to_head() {
  BenchConfig cfg = default_pca_config();
  const ComparisonResult res = run_comparison(cfg, pca_instance());
  const std::vector<MethodSummary> sums = summarize(res);
  auto find = [&](const std::string& name) -> const MethodSummary& {
    for (const MethodSummary& s : sums)
      if (s.name == name) return s;
    throw std::runtime_error("missing method " + name);
  };
  const MethodSummary &rgd = find("rgd"), &spel = find("spel"), &mm = find("mm");
  for (const MethodSummary& s : sums)
    if (s.abort_reason) return {false, s.name + " aborted: " + *s.abort_reason};
  const double init = median(res.initial_subspace_error);
  const bool a = spel.median_final_error <= rgd.median_final_error;
  const bool b = spel.median_final_error <= 0.1 * init;
  const bool c = spel.median_wall_s <= 0.5 * mm.median_wall_s;
  std::ostringstream os;
  os << "(a) spel " << fmt(spel.median_final_error) << " <= rgd " << fmt(rgd.median_final_error) << (a ? "" : " NO")
     << "; (b) <= 0.1 x initial " << fmt(init) << (b ? "" : " NO") << "; (c) wall spel " << fmt(spel.median_wall_s)
     << "s <= 0.5 x mm " << fmt(mm.median_wall_s) << "s" << (c ? "" : " NO");
  return {a && b && c, os.str()};
}

Outcome deterministic_theorem() {
  const TheoryScenario& sc = theory();
  const RunTrace trace = run_theorem_deterministic(sc, 100);
  const BoundReport tele = audit_deterministic_bound(trace, sc.constants);
  const BoundReport rate = check_min_grad_rate({trace}, sc.constants);
  return {tele.passed && rate.passed, "alpha=" + fmt(trace.records[0].step_size) + "; " + to_record(tele) + "; " +
                                          to_record(rate)};
}

Outcome descent_lemma() {
  const BoundReport r = verify_descent_lemma(theory(), 1000, 17);
  return {r.passed, to_record(r) + " (" + r.detail + ")"};
}

Outcome stochastic_theorem() {
  const TheoryScenario& sc = theory();
  const std::vector<RunTrace> traces = run_theorem_stochastic(sc, 400, 20, 1.0);
  const BoundReport r = check_min_grad_rate(traces, sc.constants, 1.0);
  return {r.passed, to_record(r) + " beta=" + fmt(1.0 - 1.0 / std::sqrt(400.0))};
}

Outcome gradient_check() {
  const BrockettInstance& inst = pca_instance();
  const Manifold m(inst.n(), inst.p());
  RngStream rng(303);
  const double h = 1e-5;
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Mat w = random_point(m, rng).matrix();
    const Mat g = inst.euclid_grad(w);
    Mat fd(w.rows(), w.cols());
    Mat probe = w;
    for (long i = 0; i < w.rows(); ++i)
      for (long j = 0; j < w.cols(); ++j) {
        probe(i, j) = w(i, j) + h;
        const double up = inst.value(probe);
        probe(i, j) = w(i, j) - h;
        const double down = inst.value(probe);
        probe(i, j) = w(i, j);
        fd(i, j) = (up - down) / (2 * h);
      }
    worst = std::max(worst, (fd - g).norm() / g.norm());
  }
  return {worst <= 1e-5, "max relative error " + fmt(worst) + " over 20 points (n=200, p=5)"};
}

double trajectory_gap(const BrockettInstance& inst, const MethodSpec& a, const MethodSpec& b, const Point& x0,
                      const StepSchedule& sched) {
  OptimizerRun ra(a, sched, x0, 0), rb(b, sched, x0, 0);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    step(ra, inst);
    step(rb, inst);
    worst = std::max(worst, (ra.x.matrix() - rb.x.matrix()).cwiseAbs().maxCoeff());
  }
  return worst;
}

Outcome structural_equivalences() {
  const BrockettInstance& inst = pca_instance();
  const StepSchedule sched = StepSchedule::make(PeriodicDecay{0.1, 0.5, 30});
  const Point x0 = initial_point(inst, 404, 0);
  const double rgd_gap = trajectory_gap(inst, RgdMethod{}, McsdMethod{NormKind::Frobenius}, x0, sched);

  const BrockettInstance sphere = BrockettInstance::generate(200, 1, 1000, 405);
  const Point s0 = initial_point(sphere, 406, 0);
  const double sphere_gap =
      trajectory_gap(sphere, McsdMethod{NormKind::Spectral}, McsdMethod{NormKind::Frobenius}, s0, sched);
  return {rgd_gap <= 1e-12 && sphere_gap <= 1e-12,
          "RGD vs MCSD(F) " + fmt(rgd_gap) + "; St(200,1) spectral vs Frobenius " + fmt(sphere_gap)};
}

Outcome muon_quality() {
  const BrockettInstance& inst = pca_instance();
  const Manifold m(inst.n(), inst.p());
  RngStream rng(505);
  int fallbacks = 0, quality_misses = 0;
  double worst_tangency = 0.0, worst_spec = 0.0, worst_margin = -1e300;
  for (int k = 0; k < 50; ++k) {
    const Point x = random_point(m, rng);
    const Mat g = riemannian_grad(x, inst.euclid_grad(x.matrix()));
    const MuonDirection dir = manifold_muon_direction(x.matrix(), g, 10, 0.1, 1e-3, Polar::iterative(8));
    const double bound = -g.squaredNorm() / spectral_norm(g) + 1e-3 * g.norm();
    const double margin = (inner(g, dir.d) - bound) / g.norm();
    worst_margin = std::max(worst_margin, margin);
    if (margin > 0) ++quality_misses;
    if (dir.fallback) ++fallbacks;
    worst_tangency = std::max(worst_tangency, tangency_residual(x.matrix(), dir.d));
    worst_spec = std::max(worst_spec, spectral_norm(dir.d) - 1.0);
  }
  const bool ok = fallbacks == 0 && quality_misses == 0 && worst_tangency <= 1e-8 && worst_spec <= 1e-8;
  return {ok, "fallbacks=" + std::to_string(fallbacks) + " quality misses=" + std::to_string(quality_misses) +
                  " worst (<g,d> - bound)/||g||_F=" + fmt(worst_margin) + " tangency=" + fmt(worst_tangency) +
                  " ||d||_2 - 1=" + fmt(worst_spec)};
}

Outcome lmo_brute_force() {
  RngStream rng(606);
  const BoundReport r = brute_force_lmo_check(NormKind::Spectral, 2, 2, 1000000, rng, 20);
  return {r.passed, "worst of 20 inputs: " + to_record(r)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "polar accuracy (Newton-Schulz, 8 iterations)", 10, polar_accuracy},
      {2, "PCA head-to-head (n=200, p=5, d=1000, T=300, 3 repeats)", 300, pca_head_to_head},
      {3, "deterministic rate audit (telescoped bound and min-gradient rate)", 30, deterministic_theorem},
      {4, "descent lemma sampling (1000 samples)", 60, descent_lemma},
      {5, "stochastic rate surrogate (20 seeds, T=400, sigma=1)", 600, stochastic_theorem},
      {6, "gradient correctness (central differences)", 600, gradient_check},
      {7, "structural equivalences (RGD, sphere)", 600, structural_equivalences},
      {8, "Manifold Muon direction quality (50 states)", 600, muon_quality},
      {9, "LMO brute force (2x2, 1e6-point net, 20 inputs)", 600, lmo_brute_force},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_s) {
      o.passed = false;
      o.detail += "; runtime " + fmt(secs) + "s exceeds " + fmt(c.budget_s) + "s";
    }
    std::cout << (o.passed ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << o.detail << " ("
              << fmt(secs) << "s)" << std::endl;
    if (!o.passed) ++failed;
  }
  std::cout << (failed == 0 ? "all acceptance criteria passed" : std::to_string(failed) + " criteria failed")
            << std::endl;
  return failed == 0 ? 0 : 1;
}
