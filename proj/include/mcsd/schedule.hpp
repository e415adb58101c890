#pragma once

#include <optional>
#include <string>
#include <variant>

namespace mcsd {

/// Radius of the spectral tube around St(n, p) on which the composed
/// objective is L-smooth with L = 4 L_f + 25 G.
inline constexpr double kStiefelRadius = 0.2;

struct ConstantStep {
  double alpha;
};

/// alpha_t = alpha0 * factor^floor(t / period).
struct PeriodicDecay {
  double alpha0;
  double factor;
  long period;
};

/// Constant step sqrt(2 Delta / (T L N^2)) from the deterministic rate.
struct TheoremDeterministic {
  double delta;
  double lipschitz;
  double norm_equiv;
  long horizon;
};

/// Constant step sqrt(2 Delta / (L N^2 T (8 sqrt(T) - 7))) with momentum
/// beta = 1 - T^{-1/2} from the stochastic rate.
struct TheoremStochastic {
  double delta;
  double lipschitz;
  double norm_equiv;
  long horizon;
};

using ScheduleKind = std::variant<ConstantStep, PeriodicDecay, TheoremDeterministic, TheoremStochastic>;

class StepSchedule {
 public:
  /// Validates parameters; theorem schedules also check the minimum horizon.
  /// With `cap`, every produced step must lie in (0, cap].
  static StepSchedule make(ScheduleKind kind, std::optional<double> cap = std::nullopt);

  double alpha(long t) const;
  /// Momentum prescribed by the stochastic schedule.
  std::optional<double> beta() const;
  const ScheduleKind& kind() const { return kind_; }
  std::optional<double> cap() const { return cap_; }
  std::string describe() const;

 private:
  StepSchedule(ScheduleKind kind, std::optional<double> cap) : kind_(kind), cap_(cap) {}

  ScheduleKind kind_;
  std::optional<double> cap_;
};

/// Parses "constant:0.001", "decay:0.1,0.5,30".
StepSchedule parse_schedule(const std::string& spec);

}  // namespace mcsd
