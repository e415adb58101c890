#include <gtest/gtest.h>

#include <cmath>

#include "mcsd/errors.hpp"
#include "mcsd/schedule.hpp"

using namespace mcsd;

TEST(Schedule, PeriodicDecayExample) {
  const StepSchedule s = StepSchedule::make(PeriodicDecay{0.1, 0.5, 30});
  EXPECT_DOUBLE_EQ(s.alpha(0), 0.1);
  EXPECT_DOUBLE_EQ(s.alpha(29), 0.1);
  EXPECT_DOUBLE_EQ(s.alpha(30), 0.05);
  EXPECT_DOUBLE_EQ(s.alpha(60), 0.025);
  EXPECT_FALSE(s.beta().has_value());
}

TEST(Schedule, Constant) {
  const StepSchedule s = StepSchedule::make(ConstantStep{1e-3});
  for (long t : {0L, 1L, 299L}) EXPECT_EQ(s.alpha(t), 1e-3);
}

TEST(Schedule, TheoremDeterministicUnitConstants) {
  const StepSchedule s = StepSchedule::make(TheoremDeterministic{1.0, 1.0, 1.0, 50}, kStiefelRadius);
  EXPECT_NEAR(s.alpha(0), 0.2, 1e-15);
  EXPECT_EQ(s.alpha(0), s.alpha(49));
}

TEST(Schedule, TheoremDeterministicHorizonTooShort) {
  try {
    StepSchedule::make(TheoremDeterministic{1.0, 1.0, 1.0, 49});
    FAIL() << "expected a configuration error";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("T >= "), std::string::npos);
  }
}

TEST(Schedule, TheoremStochasticBetaAndStep) {
  const StepSchedule s = StepSchedule::make(TheoremStochastic{0.01, 1.0, 1.0, 4});
  EXPECT_DOUBLE_EQ(*s.beta(), 0.5);
  EXPECT_NEAR(s.alpha(0), std::sqrt(0.02 / (4.0 * (8.0 * 2.0 - 7.0))), 1e-15);
  const StepSchedule big = StepSchedule::make(TheoremStochastic{3.0, 50.0, std::sqrt(3.0), 400});
  EXPECT_NEAR(*big.beta(), 0.95, 1e-15);
  EXPECT_NEAR(big.alpha(7), std::sqrt(6.0 / (50.0 * 3.0 * 400.0 * (8.0 * 20.0 - 7.0))), 1e-15);
}

TEST(Schedule, TheoremStochasticMinimumHorizon) {
  EXPECT_THROW(StepSchedule::make(TheoremStochastic{1.0, 1.0, 1.0, 3}), ConfigError);
  // (Delta / (2 L N^2 r^2))^(2/3) = 1000^(2/3) = 100
  EXPECT_THROW(StepSchedule::make(TheoremStochastic{80.0, 1.0, 1.0, 99}), ConfigError);
  EXPECT_NO_THROW(StepSchedule::make(TheoremStochastic{80.0, 1.0, 1.0, 100}));
}

TEST(Schedule, CapIsEnforced) {
  EXPECT_THROW(StepSchedule::make(ConstantStep{0.3}, kStiefelRadius), ConfigError);
  EXPECT_NO_THROW(StepSchedule::make(ConstantStep{0.2}, kStiefelRadius));
  const StepSchedule s = StepSchedule::make(PeriodicDecay{0.1, 0.5, 30}, kStiefelRadius);
  for (long t = 0; t < 300; ++t) {
    EXPECT_GT(s.alpha(t), 0.0);
    EXPECT_LE(s.alpha(t), 0.2);
  }
}

TEST(Schedule, RejectsInvalidParameters) {
  EXPECT_THROW(StepSchedule::make(ConstantStep{0.0}), ConfigError);
  EXPECT_THROW(StepSchedule::make(ConstantStep{-1e-3}), ConfigError);
  EXPECT_THROW(StepSchedule::make(PeriodicDecay{0.1, 1.5, 30}), ConfigError);
  EXPECT_THROW(StepSchedule::make(PeriodicDecay{0.1, 0.5, 0}), ConfigError);
  EXPECT_THROW(StepSchedule::make(TheoremDeterministic{-1.0, 1.0, 1.0, 100}), ConfigError);
}

TEST(Schedule, Parsing) {
  EXPECT_DOUBLE_EQ(parse_schedule("constant:0.001").alpha(10), 0.001);
  const StepSchedule d = parse_schedule("decay:0.1,0.5,30");
  EXPECT_DOUBLE_EQ(d.alpha(30), 0.05);
  EXPECT_THROW(parse_schedule("constant:abc"), ConfigError);
  EXPECT_THROW(parse_schedule("decay:0.1,0.5"), ConfigError);
  EXPECT_THROW(parse_schedule("cosine:0.1"), ConfigError);
}
