#pragma once

#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace mcsd {

/// Metrics of the iterate x_t after t steps.
///
/// step_size is the alpha_t applied to leave x_t; inner_iters and elapsed_s
/// describe the step that produced x_t (both zero for t = 0). A NaN
/// grad_dual_norm marks a column that was not recorded.
struct TraceRecord {
  long iter = 0;
  double objective = 0.0;
  double subspace_error = 0.0;
  double orth_violation = 0.0;
  double grad_dual_norm = std::numeric_limits<double>::quiet_NaN();
  double step_size = 0.0;
  long inner_iters = 0;
  double elapsed_s = 0.0;

  bool operator==(const TraceRecord&) const = default;
};

struct RunTrace {
  std::string method;
  std::vector<TraceRecord> records;
  /// Set when the run stopped early on a numeric failure.
  std::optional<std::string> abort_reason;
  std::vector<std::string> warnings;

  long steps() const { return records.empty() ? 0 : static_cast<long>(records.size()) - 1; }
  const TraceRecord& final() const { return records.back(); }
};

inline constexpr const char* kTraceHeader =
    "iter,objective,subspace_error,orth_violation,grad_dual_norm,step_size,inner_iters,elapsed_s";

/// Shortest-roundtrip-safe rendering: 17 significant digits.
std::string format_double(double v);

void write_trace_csv(const RunTrace& trace, const std::filesystem::path& path);
RunTrace read_trace_csv(const std::filesystem::path& path);

}  // namespace mcsd
