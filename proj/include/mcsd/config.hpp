#pragma once

// Bench configuration: a flat key = value format with [sections].
//
//   # comment
//   [instance]            n, p, d, data_seed, cache (optional instance file)
//   [run]                 T, init_seed, repeats, polar (exact | iterative:K),
//                         output_dir, workers, record_time (true | false)
//   [method <name>]       kind = mcsd | rgd | mm | smcsd
//                         schedule = constant:A | decay:A0,FACTOR,PERIOD
//                         norm = spectral | frobenius        (mcsd, smcsd)
//                         inner_iters, inner_lr, quality_tol (mm)
//                         beta, noise = gaussian:S | minibatch:B (smcsd)
//
// MCSD_OUTPUT_DIR and MCSD_WORKERS override output_dir and workers.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mcsd/optimizers.hpp"

namespace mcsd {

struct InstanceSpec {
  long n = 200;
  long p = 5;
  long d = 1000;
  std::uint64_t data_seed = 0;
  std::optional<std::filesystem::path> cache;
};

struct MethodEntry {
  std::string name;
  MethodSpec spec;
  StepSchedule schedule;
};

struct BenchConfig {
  InstanceSpec instance;
  std::vector<MethodEntry> methods;
  long T = 300;
  std::uint64_t init_seed = 0;
  Polar polar = Polar::iterative(8);
  std::filesystem::path output_dir = "out";
  int repeats = 3;
  int workers = 1;
  bool record_time = true;
};

/// Raw section/key/value view, in file order.
struct IniSection {
  std::string name;
  std::string arg;  // text after the section name, e.g. the method name
  std::map<std::string, std::string> values;
  long line = 0;
};

std::vector<IniSection> parse_ini(const std::string& text);

BenchConfig parse_bench_config(const std::string& text);
BenchConfig load_bench_config(const std::filesystem::path& path);
void apply_env_overrides(BenchConfig& config);

Polar parse_polar(const std::string& spec);
NoiseConfig parse_noise(const std::string& spec);

/// The setup of the PCA comparison: RGD at a constant 1e-3, SPEL and Manifold
/// Muon (10 inner iterations) on the 0.1 * 0.5^floor(t/30) decay.
BenchConfig default_pca_config();

}  // namespace mcsd
