#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "gold/delay.hpp"

using gold::DelaySchedule;
using gold::Round;

TEST(DelayAt, Examples) {
  gold::Rng rng(1);
  EXPECT_EQ(gold::delay_at(DelaySchedule::constant(0), 5, rng), 0);
  EXPECT_EQ(gold::delay_at(DelaySchedule::power(1.0, 0.5), 9, rng), 3);
  EXPECT_EQ(gold::delay_at(DelaySchedule::scripted({3, 0, 2, 0, 1}), 1, rng), 3);
}

TEST(DelayAt, PowerFloorsExactSquares) {
  // floor(t^0.5) must not lose a unit to rounding at perfect squares.
  gold::Rng rng(1);
  const auto d = DelaySchedule::power(1.0, 0.5);
  for (Round k = 1; k <= 3000; ++k) {
    EXPECT_EQ(d.delay_at(k * k, rng), k);
    EXPECT_EQ(d.delay_at(k * k + 2 * k, rng), k);
  }
}

TEST(DelayAt, GeometricIsCappedByPowerLaw) {
  gold::Rng rng(2);
  const auto d = DelaySchedule::geometric(50.0, 0.3);
  for (Round t = 1; t <= 20000; ++t) {
    const Round x = d.delay_at(t, rng);
    EXPECT_GE(x, 0);
    EXPECT_LE(x, static_cast<Round>(std::floor(std::pow(t, 0.3) + 1e-9)));
  }
  EXPECT_DOUBLE_EQ(d.alpha(), 0.3);
}

TEST(DelayAt, ScriptedExhaustion) {
  gold::Rng rng(3);
  const auto d = DelaySchedule::scripted({1, 2});
  EXPECT_EQ(d.delay_at(2, rng), 2);
  try {
    d.delay_at(3, rng);
    FAIL() << "expected exhaustion";
  } catch (const gold::Error& e) {
    EXPECT_NE(std::string(e.what()).find("exhausted at t=3"), std::string::npos);
  }
}

TEST(DelaySchedule, RejectsBadParameters) {
  EXPECT_THROW(DelaySchedule::constant(-1), gold::Error);
  EXPECT_THROW(DelaySchedule::power(1.0, 1.0), gold::Error);
  EXPECT_THROW(DelaySchedule::power(-1.0, 0.2), gold::Error);
  EXPECT_THROW(DelaySchedule::scripted({0, -2}), gold::Error);
}

TEST(DelaySchedule, ReadsScriptFile) {
  const auto path = std::filesystem::temp_directory_path() / "gold_delay_test_script.txt";
  {
    std::ofstream out(path);
    out << "3\n0\n2\n\n0\n1\n";
  }
  const auto d = DelaySchedule::from_file(path.string());
  gold::Rng rng(4);
  const Round want[] = {3, 0, 2, 0, 1};
  for (Round t = 1; t <= 5; ++t) EXPECT_EQ(d.delay_at(t, rng), want[t - 1]);
  std::filesystem::remove(path);
}

TEST(ArrivalRound, Examples) {
  static_assert(gold::arrival_round(2, 3) == 5);
  EXPECT_EQ(gold::arrival_round(1, 0), 1);
  EXPECT_EQ(gold::arrival_round(4, 2), 6);
}

TEST(DelayAt, DeterministicPerStream) {
  const auto d = DelaySchedule::geometric(5.0, 0.5);
  gold::Rng a(99), b(99);
  for (Round t = 1; t <= 1000; ++t) EXPECT_EQ(d.delay_at(t, a), d.delay_at(t, b));
}
