#include "mcsd/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "mcsd/schedule.hpp"
#include "mcsd/stiefel.hpp"

namespace mcsd {

BoundReport make_report(std::string name, double lhs, double rhs, double slack, BoundConstants constants) {
  BoundReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = slack;
  r.passed = lhs <= rhs + slack;
  r.constants = constants;
  return r;
}

std::string to_text(const BoundReport& r) {
  std::ostringstream os;
  os << (r.passed ? "PASS " : "FAIL ") << r.name << ": lhs=" << format_double(r.lhs)
     << " rhs=" << format_double(r.rhs) << " slack=" << format_double(r.slack);
  if (r.constants.lipschitz > 0)
    os << " [L=" << format_double(r.constants.lipschitz) << " N=" << format_double(r.constants.norm_equiv)
       << " r=" << format_double(r.constants.radius) << " Delta=" << format_double(r.constants.delta) << "]";
  if (!r.detail.empty()) os << " (" << r.detail << ")";
  return os.str();
}

std::string to_record(const BoundReport& r) {
  return r.name + "," + format_double(r.lhs) + "," + format_double(r.rhs) + "," + format_double(r.slack) + "," +
         (r.passed ? "pass" : "fail");
}

double descent_lemma_gap(const BrockettInstance& inst, const Mat& x, const Mat& d, double lipschitz) {
  const Mat g = tangent_project(x, inst.euclid_grad(x));
  const Mat moved = msign_exact(Mat(x + d));
  return inst.value(moved) - (inst.value(x) + inner(g, d) + 0.5 * lipschitz * d.squaredNorm());
}

BoundReport check_descent_lemma(const BrockettInstance& inst, long samples, double radius, RngStream& rng) {
  if (samples < 1) throw ConfigError("descent lemma: samples must be >= 1");
  if (!(radius > 0.0 && radius <= kStiefelRadius)) throw ConfigError("descent lemma: radius must lie in (0, 0.2]");
  const SmoothnessConstants sc = inst.smoothness_constants();
  const double L = sc.l_composed;
  const StiefelManifold<double> m(inst.n(), inst.p());

  double worst_gap = -std::numeric_limits<double>::infinity();
  double worst_lhs = 0.0, worst_rhs = 0.0;
  long worst_idx = -1;
  Mat worst_x, worst_d;
  for (long k = 0; k < samples; ++k) {
    RngStream task = rng.split(static_cast<std::uint64_t>(k));
    const Mat x = random_point(m, task).matrix();
    Mat d = task.gaussian(inst.n(), inst.p());
    const double radius_k = radius * (1.0 - task.uniform());  // uniform in (0, r]
    d *= radius_k / spectral_norm(d);

    const Mat g = tangent_project(x, inst.euclid_grad(x));
    const double lhs = inst.value(msign_exact(Mat(x + d)));
    const double rhs = inst.value(x) + inner(g, d) + 0.5 * L * d.squaredNorm();
    if (lhs - rhs > worst_gap) {
      worst_gap = lhs - rhs;
      worst_lhs = lhs;
      worst_rhs = rhs;
      worst_idx = k;
      worst_x = x;
      worst_d = d;
    }
  }
  BoundReport r = make_report("descent_lemma", worst_lhs, worst_rhs, 1e-8, {L, 0.0, radius, 0.0});
  r.detail = std::to_string(samples) + " samples, worst sample " + std::to_string(worst_idx) +
             ", max lhs - rhs " + format_double(worst_gap);
  if (!r.passed) r.witness = std::make_pair(worst_x, worst_d);
  return r;
}

namespace {

void require_dual_column(const RunTrace& trace) {
  for (const TraceRecord& rec : trace.records)
    if (std::isnan(rec.grad_dual_norm))
      throw ConfigError("trace '" + trace.method + "' lacks the grad_dual_norm column");
}

// Theorem schedules are constant steps inside (0, r].
void require_theorem_schedule(const RunTrace& trace, double radius) {
  const long T = trace.steps();
  if (T == 0) return;
  const double a0 = trace.records[0].step_size;
  for (long t = 0; t < T; ++t) {
    const double a = trace.records[t].step_size;
    if (!(a > 0.0 && a <= radius))
      throw ConfigError("trace '" + trace.method + "': step " + format_double(a) + " outside (0, r]");
    if (std::abs(a - a0) > 1e-12 * a0)
      throw ConfigError("trace '" + trace.method + "': step sizes are not the constant theorem schedule");
  }
}

}  // namespace

BoundReport audit_deterministic_bound(const RunTrace& trace, const BoundConstants& c) {
  if (trace.records.empty()) throw ConfigError("audit: empty trace");
  require_dual_column(trace);
  const long T = trace.steps();
  double lhs = 0.0, sum_sq = 0.0;
  for (long t = 0; t < T; ++t) {
    const TraceRecord& rec = trace.records[t];
    if (!(rec.step_size > 0.0 && rec.step_size <= c.radius))
      throw ConfigError("audit: step size " + format_double(rec.step_size) + " at t=" + std::to_string(t) +
                        " outside (0, r]");
    lhs += rec.step_size * rec.grad_dual_norm;
    sum_sq += rec.step_size * rec.step_size;
  }
  const double rhs = trace.records.front().objective - trace.records.back().objective +
                     0.5 * c.lipschitz * c.norm_equiv * c.norm_equiv * sum_sq;
  BoundReport r = make_report("deterministic_telescoped_bound", lhs, rhs, 1e-6 * static_cast<double>(T), c);
  r.detail = "T=" + std::to_string(T);
  return r;
}

BoundReport check_min_grad_rate(const std::vector<RunTrace>& traces, const BoundConstants& c,
                                std::optional<double> sigma) {
  if (traces.empty()) throw ConfigError("rate check: no traces");
  const long T = traces.front().steps();
  if (T < 1) throw ConfigError("rate check: traces must contain at least one step");
  std::vector<double> minima;
  for (const RunTrace& tr : traces) {
    require_dual_column(tr);
    require_theorem_schedule(tr, c.radius);
    if (tr.steps() != T) throw ConfigError("rate check: traces have different horizons");
    double mn = std::numeric_limits<double>::infinity();
    for (long t = 0; t < T; ++t) mn = std::min(mn, tr.records[t].grad_dual_norm);
    minima.push_back(mn);
  }
  const double Tf = static_cast<double>(T);
  const double LN2 = c.lipschitz * c.norm_equiv * c.norm_equiv;
  if (!sigma) {
    const double lhs = *std::max_element(minima.begin(), minima.end());
    BoundReport r = make_report("deterministic_min_grad_rate", lhs, std::sqrt(2.0 * c.delta * LN2 / Tf), 1e-6, c);
    r.detail = "T=" + std::to_string(T) + ", runs=" + std::to_string(traces.size());
    return r;
  }
  if (traces.size() < 20) throw ConfigError("stochastic rate check needs at least 20 seeds");
  const double k = static_cast<double>(minima.size());
  const double mean = std::accumulate(minima.begin(), minima.end(), 0.0) / k;
  double var = 0.0;
  for (double v : minima) var += (v - mean) * (v - mean);
  var /= (k - 1.0);
  const double rhs = 4.0 * c.norm_equiv * (std::sqrt(c.lipschitz * c.delta) + *sigma) * std::pow(Tf, -0.25);
  BoundReport r = make_report("stochastic_min_grad_rate", mean, rhs, 3.0 * std::sqrt(var / k), c);
  r.detail = "T=" + std::to_string(T) + ", seeds=" + std::to_string(traces.size()) + ", sigma=" + format_double(*sigma);
  return r;
}

namespace {

Mat haar_orthogonal(long n, RngStream& rng) {
  const Eigen::MatrixXd g = rng.gaussian(n, n);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (long j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

// Minimum of <s, d> over a net of the unit ball of `norm`.
double net_minimum(NormKind norm, const Mat& s, long net_size, RngStream& rng) {
  const long rows = s.rows(), cols = s.cols();
  double best = std::numeric_limits<double>::infinity();
  if (norm == NormKind::Frobenius) {
    for (long k = 0; k < net_size; ++k) {
      Mat d = rng.gaussian(rows, cols);
      d *= std::pow(rng.uniform(), 1.0 / static_cast<double>(rows * cols)) / d.norm();
      best = std::min(best, inner(s, d));
    }
    return best;
  }
  if (rows == 2 && cols == 2) {
    // Every matrix with ||d||_2 <= 1 is R(a) diag(1, t) R(b)^T up to scaling,
    // t in [-1, 1]; grid over (a, b, t) with a random angular offset.
    constexpr long kLevels = 10;
    const long per_angle = std::max(2L, static_cast<long>(std::sqrt(static_cast<double>(net_size) / kLevels)));
    const double step = 2.0 * std::numbers::pi / static_cast<double>(per_angle);
    const double off_a = step * rng.uniform(), off_b = step * rng.uniform();
    for (long i = 0; i < per_angle; ++i) {
      const double a = off_a + step * static_cast<double>(i);
      const double ca = std::cos(a), sa = std::sin(a);
      for (long j = 0; j < per_angle; ++j) {
        const double b = off_b + step * static_cast<double>(j);
        const double cb = std::cos(b), sb = std::sin(b);
        // <s, R(a) diag(1, t) R(b)^T> = <R(a)^T s R(b), diag(1, t)>
        const double m00 = ca * (s(0, 0) * cb + s(0, 1) * sb) + sa * (s(1, 0) * cb + s(1, 1) * sb);
        const double m11 = -sa * (-s(0, 0) * sb + s(0, 1) * cb) + ca * (-s(1, 0) * sb + s(1, 1) * cb);
        for (long l = 0; l < kLevels; ++l) {
          const double t = -1.0 + 2.0 * static_cast<double>(l) / static_cast<double>(kLevels - 1);
          best = std::min(best, m00 + t * m11);
        }
      }
    }
    return best;
  }
  const long k = std::min(rows, cols);
  for (long it = 0; it < net_size; ++it) {
    const Mat u = haar_orthogonal(rows, rng);
    const Mat v = haar_orthogonal(cols, rng);
    Mat sig = Mat::Zero(rows, cols);
    const bool extreme = (it % 2) == 0;
    for (long i = 0; i < k; ++i) sig(i, i) = (i == 0 || extreme) ? 1.0 : rng.uniform();
    best = std::min(best, inner(s, Mat(u * sig * v.transpose())));
  }
  return best;
}

}  // namespace

BoundReport brute_force_lmo_check(NormKind norm, long rows, long cols, long net_size, RngStream& rng, int inputs) {
  if (rows < 1 || cols < 1 || rows > 3 || cols > 3) throw ConfigError("lmo check: dims must be at most 3x3");
  if (net_size < 100000) throw ConfigError("lmo check: net_size must be >= 1e5");
  if (inputs < 1) throw ConfigError("lmo check: inputs must be >= 1");
  double worst_gap = -std::numeric_limits<double>::infinity();
  BoundReport worst;
  for (int i = 0; i < inputs; ++i) {
    RngStream task = rng.split(static_cast<std::uint64_t>(i));
    const Mat s = task.gaussian(rows, cols);
    const auto d = lmo(norm, s);
    const double value = d ? inner(s, *d) : 0.0;
    const double net = net_minimum(norm, s, net_size, task);
    const double tol = 1e-2 * s.norm();
    if (value - net - tol > worst_gap) {
      worst_gap = value - net - tol;
      worst = make_report("lmo_brute_force_" + to_string(norm), value, net, tol);
    }
  }
  worst.detail = std::to_string(rows) + "x" + std::to_string(cols) + ", net=" + std::to_string(net_size) +
                 ", inputs=" + std::to_string(inputs);
  return worst;
}

}  // namespace mcsd
