#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mcsd/config.hpp"
#include "mcsd/verify.hpp"

namespace mcsd {

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitConfig = 2, kExitNumeric = 3 };

/// Loads the instance from its cache file when present; otherwise generates
/// it (and writes the cache if one is configured).
BrockettInstance build_instance(const InstanceSpec& spec);

/// FNV-1a over the raw bytes of the matrix.
std::uint64_t matrix_hash(const Mat& m);

/// Shared starting point of every method for one repeat.
Point initial_point(const BrockettInstance& inst, std::uint64_t init_seed, int repeat);

struct MethodRuns {
  std::string name;
  std::vector<RunTrace> traces;             // one per repeat
  std::vector<std::uint64_t> init_hashes;  // hash of x_0 per repeat
};

struct ComparisonResult {
  std::vector<MethodRuns> methods;
  std::vector<double> initial_subspace_error;  // per repeat
};

/// Runs every (repeat, method) pair from the shared initial points. Pure
/// computation: no files are touched.
ComparisonResult run_comparison(const BenchConfig& config, const BrockettInstance& inst,
                                bool guard_feasibility = true);

struct MethodSummary {
  std::string name;
  double mean_final_error = 0.0;
  double median_final_error = 0.0;
  double mean_wall_s = 0.0;
  double median_wall_s = 0.0;
  std::optional<std::string> abort_reason;
};

std::vector<MethodSummary> summarize(const ComparisonResult& result);
double median(std::vector<double> v);

int cmd_pca_bench(const BenchConfig& config, std::ostream& log);
int cmd_rgd_sweep(const BenchConfig& config, const std::vector<double>& step_sizes, std::ostream& log);
/// Runs all methods with the given polar mode (config default when unset) and
/// fails when any iterate violates orthogonality by more than `threshold`.
int cmd_orth_violation(const BenchConfig& config, std::ostream& log, std::optional<Polar> polar = std::nullopt,
                       double threshold = 1e-6);

enum class VerifyLevel { Fast, Full };

/// Brockett instance with a shared starting point and the constants of the
/// rate bounds: L = 4 L_f + 25 G, N for the chosen norm, r = 0.2 and
/// Delta = 1.1 (f(x_0) - f(w*)).
struct TheoryScenario {
  BrockettInstance inst;
  Point x0;
  NormKind norm;
  BoundConstants constants;
};

TheoryScenario make_theory_scenario(long n = 50, long p = 3, long d = 200, std::uint64_t data_seed = 11,
                                    std::uint64_t init_seed = 5, NormKind norm = NormKind::Spectral);

BoundReport verify_descent_lemma(const TheoryScenario& sc, long samples, std::uint64_t seed);
/// Deterministic MCSD with the constant theorem step, exact polar projection.
RunTrace run_theorem_deterministic(const TheoryScenario& sc, long T);
/// Stochastic MCSD with beta = 1 - T^{-1/2}, the theorem step and additive
/// Gaussian noise of total standard deviation sigma, one trace per seed.
std::vector<RunTrace> run_theorem_stochastic(const TheoryScenario& sc, long T, int seeds, double sigma);

std::vector<BoundReport> run_verify_suite(VerifyLevel level, std::ostream* progress = nullptr);
int cmd_verify(VerifyLevel level, std::ostream& log);

}  // namespace mcsd
