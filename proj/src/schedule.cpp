#include "mcsd/schedule.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "mcsd/errors.hpp"

namespace mcsd {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string("schedule: ") + what + " must be positive");
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

StepSchedule StepSchedule::make(ScheduleKind kind, std::optional<double> cap) {
  std::visit(overloaded{
                 [](const ConstantStep& s) { require_positive(s.alpha, "alpha"); },
                 [](const PeriodicDecay& s) {
                   require_positive(s.alpha0, "alpha0");
                   require_positive(s.factor, "decay factor");
                   if (s.factor > 1.0) throw ConfigError("schedule: decay factor must be <= 1");
                   if (s.period < 1) throw ConfigError("schedule: decay period must be >= 1");
                 },
                 [](const TheoremDeterministic& s) {
                   require_positive(s.delta, "Delta");
                   require_positive(s.lipschitz, "L");
                   require_positive(s.norm_equiv, "N");
                   const double min_t =
                       2.0 * s.delta / (kStiefelRadius * kStiefelRadius * s.lipschitz * s.norm_equiv * s.norm_equiv);
                   if (s.horizon < 1 || static_cast<double>(s.horizon) < min_t)
                     throw ConfigError("schedule: deterministic rate needs T >= 2 Delta / (r^2 L N^2) = " +
                                       fmt(min_t) + ", got T = " + std::to_string(s.horizon));
                 },
                 [](const TheoremStochastic& s) {
                   require_positive(s.delta, "Delta");
                   require_positive(s.lipschitz, "L");
                   require_positive(s.norm_equiv, "N");
                   const double ratio =
                       s.delta / (2.0 * s.lipschitz * s.norm_equiv * s.norm_equiv * kStiefelRadius * kStiefelRadius);
                   const double min_t = std::max(4.0, std::pow(ratio, 2.0 / 3.0));
                   if (static_cast<double>(s.horizon) < min_t)
                     throw ConfigError("schedule: stochastic rate needs T >= max{4, (Delta / (2 L N^2 r^2))^(2/3)} = " +
                                       fmt(min_t) + ", got T = " + std::to_string(s.horizon));
                 },
             },
             kind);
  StepSchedule out(kind, cap);
  if (cap) {
    require_positive(*cap, "step cap");
    // Every kind is nonincreasing in t, so the first step is the largest.
    if (out.alpha(0) > *cap)
      throw ConfigError("schedule: step " + fmt(out.alpha(0)) + " exceeds the cap " + fmt(*cap));
  }
  return out;
}

double StepSchedule::alpha(long t) const {
  return std::visit(overloaded{
                        [](const ConstantStep& s) { return s.alpha; },
                        [t](const PeriodicDecay& s) {
                          return s.alpha0 * std::pow(s.factor, static_cast<double>(t / s.period));
                        },
                        [](const TheoremDeterministic& s) {
                          return std::sqrt(2.0 * s.delta / (static_cast<double>(s.horizon) * s.lipschitz *
                                                            s.norm_equiv * s.norm_equiv));
                        },
                        [](const TheoremStochastic& s) {
                          const double tt = static_cast<double>(s.horizon);
                          return std::sqrt(2.0 * s.delta / (s.lipschitz * s.norm_equiv * s.norm_equiv * tt *
                                                            (8.0 * std::sqrt(tt) - 7.0)));
                        },
                    },
                    kind_);
}

std::optional<double> StepSchedule::beta() const {
  if (const auto* s = std::get_if<TheoremStochastic>(&kind_))
    return 1.0 - 1.0 / std::sqrt(static_cast<double>(s->horizon));
  return std::nullopt;
}

std::string StepSchedule::describe() const {
  return std::visit(overloaded{
                        [](const ConstantStep& s) { return "constant:" + fmt(s.alpha); },
                        [](const PeriodicDecay& s) {
                          return "decay:" + fmt(s.alpha0) + "," + fmt(s.factor) + "," + std::to_string(s.period);
                        },
                        [](const TheoremDeterministic& s) { return "theorem-det:T=" + std::to_string(s.horizon); },
                        [](const TheoremStochastic& s) { return "theorem-stoch:T=" + std::to_string(s.horizon); },
                    },
                    kind_);
}

StepSchedule parse_schedule(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw ConfigError("schedule '" + spec + "': expected kind:params");
  const std::string kind = spec.substr(0, colon);
  std::vector<double> params;
  std::stringstream ss(spec.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      params.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("schedule '" + spec + "': bad number '" + item + "'");
    }
  }
  if (kind == "constant") {
    if (params.size() != 1) throw ConfigError("schedule 'constant' takes one parameter");
    return StepSchedule::make(ConstantStep{params[0]});
  }
  if (kind == "decay") {
    if (params.size() != 3) throw ConfigError("schedule 'decay' takes alpha0,factor,period");
    return StepSchedule::make(PeriodicDecay{params[0], params[1], static_cast<long>(params[2])});
  }
  throw ConfigError("unknown schedule kind '" + kind + "' (expected constant|decay)");
}

}  // namespace mcsd
