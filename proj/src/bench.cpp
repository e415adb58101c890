#include "mcsd/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "mcsd/svg.hpp"

namespace mcsd {

namespace fs = std::filesystem;

BrockettInstance build_instance(const InstanceSpec& spec) {
  if (spec.cache && fs::exists(*spec.cache)) {
    BrockettInstance inst = BrockettInstance::load(*spec.cache);
    if (inst.n() != spec.n || inst.p() != spec.p || inst.d() != spec.d || inst.data_seed() != spec.data_seed)
      throw ConfigError("instance cache " + spec.cache->string() + " does not match (n, p, d, data_seed)");
    return inst;
  }
  BrockettInstance inst = BrockettInstance::generate(spec.n, spec.p, spec.d, spec.data_seed);
  if (spec.cache) {
    if (spec.cache->has_parent_path()) fs::create_directories(spec.cache->parent_path());
    inst.save(*spec.cache);
  }
  return inst;
}

std::uint64_t matrix_hash(const Mat& m) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ull;
    }
  };
  const std::int64_t dims[2] = {m.rows(), m.cols()};
  mix(dims, sizeof(dims));
  mix(m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
  return h;
}

Point initial_point(const BrockettInstance& inst, std::uint64_t init_seed, int repeat) {
  const Manifold m(inst.n(), inst.p());
  RngStream rng = RngStream(init_seed).split(static_cast<std::uint64_t>(repeat));
  return random_point(m, rng);
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

namespace {

struct Job {
  int repeat;
  std::size_t method;
};

template <typename Fn>
void run_jobs(std::size_t count, int workers, Fn&& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(count);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::uint64_t run_seed(std::uint64_t init_seed, int repeat, std::size_t method) {
  return init_seed * 1000003ull + static_cast<std::uint64_t>(repeat) * 7919ull + method;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
  const fs::path probe = dir / ".write_probe";
  std::ofstream out(probe);
  if (!out) throw IoError("output directory is not writable: " + dir.string());
  out.close();
  fs::remove(probe, ec);
}

Series series_of(const RunTrace& trace, const std::string& name, double TraceRecord::*field) {
  Series s{name, {}, {}};
  for (const TraceRecord& r : trace.records) {
    s.x.push_back(static_cast<double>(r.iter));
    s.y.push_back(r.*field);
  }
  return s;
}

}  // namespace

ComparisonResult run_comparison(const BenchConfig& config, const BrockettInstance& inst, bool guard_feasibility) {
  if (config.methods.empty()) throw ConfigError("bench: no methods configured");
  ComparisonResult result;
  std::vector<Point> starts;
  for (int r = 0; r < config.repeats; ++r) {
    starts.push_back(initial_point(inst, config.init_seed, r));
    result.initial_subspace_error.push_back(inst.subspace_error(starts.back().matrix()));
  }
  for (const MethodEntry& m : config.methods) {
    MethodRuns runs;
    runs.name = m.name;
    runs.traces.resize(static_cast<std::size_t>(config.repeats));
    runs.init_hashes.resize(static_cast<std::size_t>(config.repeats));
    result.methods.push_back(std::move(runs));
  }

  std::vector<Job> jobs;
  for (int r = 0; r < config.repeats; ++r)
    for (std::size_t k = 0; k < config.methods.size(); ++k) jobs.push_back({r, k});

  const ReferenceMetric reference = [&inst](const Mat& w) { return inst.subspace_error(w); };
  run_jobs(jobs.size(), config.workers, [&](std::size_t i) {
    const Job job = jobs[i];
    const MethodEntry& entry = config.methods[job.method];
    OptimizerRun run(entry.spec, entry.schedule, starts[static_cast<std::size_t>(job.repeat)],
                     run_seed(config.init_seed, job.repeat, job.method), config.polar);
    run.guard_feasibility = guard_feasibility;
    MethodRuns& slot = result.methods[job.method];
    slot.init_hashes[static_cast<std::size_t>(job.repeat)] = matrix_hash(run.x.matrix());
    RunTrace trace = run_trajectory(run, inst, config.T, reference, {config.record_time});
    trace.method = entry.name;
    slot.traces[static_cast<std::size_t>(job.repeat)] = std::move(trace);
  });

  for (int r = 0; r < config.repeats; ++r) {
    const std::uint64_t h = result.methods.front().init_hashes[static_cast<std::size_t>(r)];
    for (const MethodRuns& m : result.methods)
      if (m.init_hashes[static_cast<std::size_t>(r)] != h)
        throw NumericError("bench: methods did not share the initial point in repeat " + std::to_string(r));
  }
  return result;
}

std::vector<MethodSummary> summarize(const ComparisonResult& result) {
  std::vector<MethodSummary> out;
  for (const MethodRuns& m : result.methods) {
    MethodSummary s;
    s.name = m.name;
    std::vector<double> err, wall;
    for (const RunTrace& t : m.traces) {
      err.push_back(t.final().subspace_error);
      wall.push_back(t.final().elapsed_s);
      if (t.abort_reason && !s.abort_reason) s.abort_reason = *t.abort_reason;
    }
    s.mean_final_error = std::accumulate(err.begin(), err.end(), 0.0) / static_cast<double>(err.size());
    s.mean_wall_s = std::accumulate(wall.begin(), wall.end(), 0.0) / static_cast<double>(wall.size());
    s.median_final_error = median(err);
    s.median_wall_s = median(wall);
    out.push_back(s);
  }
  return out;
}

int cmd_pca_bench(const BenchConfig& config, std::ostream& log) {
  ensure_dir(config.output_dir);
  const BrockettInstance inst = build_instance(config.instance);
  for (const std::string& w : inst.warnings()) log << "warning: " << w << '\n';
  const ComparisonResult result = run_comparison(config, inst);

  for (const MethodRuns& m : result.methods)
    for (std::size_t r = 0; r < m.traces.size(); ++r)
      write_trace_csv(m.traces[r], config.output_dir / (m.name + "_" + std::to_string(r) + ".csv"));

  const std::vector<MethodSummary> summary = summarize(result);
  std::ostringstream txt;
  txt << "instance n=" << inst.n() << " p=" << inst.p() << " d=" << inst.d() << " data_seed=" << inst.data_seed()
      << "\nT=" << config.T << " repeats=" << config.repeats << " polar=" << config.polar.describe() << '\n';
  txt << "initial subspace error (median over repeats): " << format_double(median(result.initial_subspace_error))
      << "\n\n";
  bool aborted = false;
  for (const MethodSummary& s : summary) {
    txt << s.name << ": final_subspace_error mean=" << format_double(s.mean_final_error)
        << " median=" << format_double(s.median_final_error) << "  wall_s mean=" << format_double(s.mean_wall_s)
        << " median=" << format_double(s.median_wall_s);
    if (s.abort_reason) {
      txt << "  ABORTED: " << *s.abort_reason;
      aborted = true;
    }
    txt << '\n';
  }
  std::ofstream(config.output_dir / "summary.txt") << txt.str();
  {
    std::ofstream csv(config.output_dir / "summary.csv");
    csv << "method,repeats,mean_final_subspace_error,median_final_subspace_error,mean_wall_s,median_wall_s,aborted\n";
    for (const MethodSummary& s : summary)
      csv << s.name << ',' << config.repeats << ',' << format_double(s.mean_final_error) << ','
          << format_double(s.median_final_error) << ',' << format_double(s.mean_wall_s) << ','
          << format_double(s.median_wall_s) << ',' << (s.abort_reason ? 1 : 0) << '\n';
  }

  std::vector<Series> series;
  for (const MethodRuns& m : result.methods)
    series.push_back(series_of(m.traces.front(), m.name, &TraceRecord::subspace_error));
  write_line_chart(config.output_dir / "subspace_error.svg", series,
                   {"Subspace error, n=" + std::to_string(inst.n()) + " p=" + std::to_string(inst.p()), "iteration",
                    "||W W^T - W* W*^T||_F", true});

  log << txt.str();
  return aborted ? kExitNumeric : kExitOk;
}

int cmd_rgd_sweep(const BenchConfig& config, const std::vector<double>& step_sizes, std::ostream& log) {
  if (step_sizes.empty()) throw ConfigError("rgd-sweep: empty step-size list");
  ensure_dir(config.output_dir);
  const BrockettInstance inst = build_instance(config.instance);
  const Point x0 = initial_point(inst, config.init_seed, 0);
  const ReferenceMetric reference = [&inst](const Mat& w) { return inst.subspace_error(w); };

  std::vector<Series> series;
  std::ostringstream txt;
  double best_err = std::numeric_limits<double>::infinity();
  double best_alpha = step_sizes.front();
  bool aborted = false;
  for (std::size_t k = 0; k < step_sizes.size(); ++k) {
    const double alpha = step_sizes[k];
    OptimizerRun run(RgdMethod{}, StepSchedule::make(ConstantStep{alpha}), x0, run_seed(config.init_seed, 0, k),
                     config.polar);
    RunTrace trace = run_trajectory(run, inst, config.T, reference, {config.record_time});
    const std::string name = "rgd_alpha_" + format_double(alpha);
    trace.method = name;
    write_trace_csv(trace, config.output_dir / (name + ".csv"));
    series.push_back(series_of(trace, "alpha=" + format_double(alpha), &TraceRecord::subspace_error));
    const double err = trace.final().subspace_error;
    txt << name << ": final_subspace_error=" << format_double(err);
    if (trace.abort_reason) {
      txt << "  ABORTED: " << *trace.abort_reason;
      aborted = true;
    }
    txt << '\n';
    if (err < best_err) {
      best_err = err;
      best_alpha = alpha;
    }
  }
  txt << "best step size: " << format_double(best_alpha) << " (final subspace error " << format_double(best_err)
      << "; expected winner at T=300: 0.001)\n";
  std::ofstream(config.output_dir / "rgd_sweep_summary.txt") << txt.str();
  write_line_chart(config.output_dir / "rgd_sweep.svg", series,
                   {"RGD constant step sweep", "iteration", "||W W^T - W* W*^T||_F", true});
  log << txt.str();
  return aborted ? kExitNumeric : kExitOk;
}

int cmd_orth_violation(const BenchConfig& config, std::ostream& log, std::optional<Polar> polar, double threshold) {
  ensure_dir(config.output_dir);
  BenchConfig cfg = config;
  cfg.repeats = 1;
  if (polar) cfg.polar = *polar;
  const BrockettInstance inst = build_instance(cfg.instance);
  const ComparisonResult result = run_comparison(cfg, inst, /*guard_feasibility=*/false);

  std::vector<Series> series;
  int code = kExitOk;
  for (const MethodRuns& m : result.methods) {
    const RunTrace& trace = m.traces.front();
    write_trace_csv(trace, cfg.output_dir / (m.name + "_orth.csv"));
    series.push_back(series_of(trace, m.name, &TraceRecord::orth_violation));
    double worst = 0.0;
    long worst_iter = 0;
    for (const TraceRecord& r : trace.records)
      if (!(r.orth_violation <= worst)) {
        worst = r.orth_violation;
        worst_iter = r.iter;
      }
    log << m.name << ": max orthogonality violation " << format_double(worst) << " at iteration " << worst_iter
        << " (polar " << cfg.polar.describe() << ")\n";
    if (!(worst <= threshold)) {
      log << "BREACH: " << m.name << " exceeds " << format_double(threshold) << " at iteration " << worst_iter
          << '\n';
      code = kExitCheckFailed;
    }
    if (trace.abort_reason) {
      log << "ABORTED: " << m.name << ": " << *trace.abort_reason << '\n';
      code = kExitNumeric;
    }
  }
  write_line_chart(cfg.output_dir / "orth_violation.svg", series,
                   {"Orthogonality violation, polar " + cfg.polar.describe(), "iteration", "||W^T W - I||_F", true});
  return code;
}

TheoryScenario make_theory_scenario(long n, long p, long d, std::uint64_t data_seed, std::uint64_t init_seed,
                                    NormKind norm) {
  BrockettInstance inst = BrockettInstance::generate(n, p, d, data_seed);
  Point x0 = initial_point(inst, init_seed, 0);
  const SmoothnessConstants sc = inst.smoothness_constants();
  BoundConstants c;
  c.lipschitz = sc.l_composed;
  c.norm_equiv = norm_equiv_constant(norm, n, p);
  c.radius = kStiefelRadius;
  c.delta = 1.1 * (inst.value(x0.matrix()) - inst.optimal_value());
  return TheoryScenario{std::move(inst), std::move(x0), norm, c};
}

BoundReport verify_descent_lemma(const TheoryScenario& sc, long samples, std::uint64_t seed) {
  RngStream rng(seed);
  return check_descent_lemma(sc.inst, samples, kStiefelRadius, rng);
}

RunTrace run_theorem_deterministic(const TheoryScenario& sc, long T) {
  const BoundConstants& c = sc.constants;
  StepSchedule schedule =
      StepSchedule::make(TheoremDeterministic{c.delta, c.lipschitz, c.norm_equiv, T}, c.radius);
  OptimizerRun run(McsdMethod{sc.norm}, schedule, sc.x0, 0, Polar::exact());
  RunTrace trace = run_trajectory(run, sc.inst, T);
  if (trace.abort_reason) throw NumericError("theorem run aborted: " + *trace.abort_reason);
  return trace;
}

std::vector<RunTrace> run_theorem_stochastic(const TheoryScenario& sc, long T, int seeds, double sigma) {
  const BoundConstants& c = sc.constants;
  StepSchedule schedule = StepSchedule::make(TheoremStochastic{c.delta, c.lipschitz, c.norm_equiv, T}, c.radius);
  // E||noise||_F^2 = n p sigma_entry^2 = sigma^2
  const double sigma_entry = sigma / std::sqrt(static_cast<double>(sc.inst.n() * sc.inst.p()));
  std::vector<RunTrace> traces;
  for (int s = 0; s < seeds; ++s) {
    StochasticMcsdMethod method{sc.norm, *schedule.beta(), AdditiveGaussian{sigma_entry}};
    OptimizerRun run(method, schedule, sc.x0, 1000 + static_cast<std::uint64_t>(s), Polar::exact());
    RunTrace trace = run_trajectory(run, sc.inst, T);
    if (trace.abort_reason) throw NumericError("stochastic theorem run aborted: " + *trace.abort_reason);
    traces.push_back(std::move(trace));
  }
  return traces;
}

std::vector<BoundReport> run_verify_suite(VerifyLevel level, std::ostream* progress) {
  const bool full = level == VerifyLevel::Full;
  std::vector<BoundReport> reports;
  auto note = [&](const BoundReport& r) {
    reports.push_back(r);
    if (progress) *progress << to_text(r) << std::endl;
  };
  const TheoryScenario sc = make_theory_scenario();

  note(verify_descent_lemma(sc, full ? 1000 : 200, 17));

  const RunTrace det = run_theorem_deterministic(sc, 100);
  note(audit_deterministic_bound(det, sc.constants));
  note(check_min_grad_rate({det}, sc.constants));

  RngStream lmo_rng(23);
  note(brute_force_lmo_check(NormKind::Spectral, 2, 2, 1000000, lmo_rng, full ? 20 : 3));
  note(brute_force_lmo_check(NormKind::Frobenius, 2, 2, 100000, lmo_rng, 3));

  if (full) {
    const double sigma = 1.0;
    const std::vector<RunTrace> traces = run_theorem_stochastic(sc, 400, 20, sigma);
    note(check_min_grad_rate(traces, sc.constants, sigma));
  }
  return reports;
}

int cmd_verify(VerifyLevel level, std::ostream& log) {
  const std::vector<BoundReport> reports = run_verify_suite(level, &log);
  log << "-- records --\n";
  bool ok = true;
  for (const BoundReport& r : reports) {
    log << to_record(r) << '\n';
    ok = ok && r.passed;
  }
  log << (ok ? "all checks passed" : "some checks FAILED") << '\n';
  return ok ? kExitOk : kExitCheckFailed;
}

}  // namespace mcsd
