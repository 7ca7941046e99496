#include <cmath>

#include <gtest/gtest.h>

#include "gold/agent.hpp"

using gold::ActionSet;
using gold::DelaySchedule;
using gold::FeedbackItem;
using gold::GoldAgent;
using gold::GoldSchedules;
using gold::ParamRegion;
using gold::Round;
using gold::Vector;

TEST(ValidateParams, DefaultTuningIsOnTheBoundary) {
  const auto v = gold::validate_params(0.25, 0.75, 0.0);
  EXPECT_EQ(v.region, ParamRegion::LogBoundary);
  EXPECT_TRUE(v.violated.empty());
}

TEST(ValidateParams, StrictInterior) {
  EXPECT_EQ(gold::validate_params(0.2, 0.85, 0.0).region, ParamRegion::NashStrict);
}

TEST(ValidateParams, NamesEveryViolation) {
  const auto v = gold::validate_params(0.5, 0.6, 0.5);
  EXPECT_EQ(v.region, ParamRegion::Invalid);
  ASSERT_EQ(v.violated.size(), 2u);
  EXPECT_EQ(v.violated[0], "2c-b > 1+alpha (0.7 < 1.5)");
  EXPECT_EQ(v.violated[1], "2c-2b > 1 (0.2 < 1)");
  EXPECT_STREQ(gold::to_string(v.region), "INVALID");
}

TEST(ValidateParams, DefaultTuningNeverInvalid) {
  for (double a = 0.0; a < 0.99; a += 0.01) {
    const auto [b, c] = gold::default_tuning(a);
    EXPECT_NE(gold::validate_params(b, c, a).region, ParamRegion::Invalid) << a;
  }
}

TEST(DefaultTuning, Examples) {
  auto [b0, c0] = gold::default_tuning(0.0);
  EXPECT_DOUBLE_EQ(b0, 0.25);
  EXPECT_DOUBLE_EQ(c0, 0.75);
  auto [b1, c1] = gold::default_tuning(0.25);
  EXPECT_DOUBLE_EQ(b1, 0.25);
  EXPECT_DOUBLE_EQ(c1, 0.75);
  auto [b2, c2] = gold::default_tuning(0.5);
  EXPECT_NEAR(b2, 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(c2, 5.0 / 6.0, 1e-15);
}

namespace {

GoldAgent interval_agent(double gamma0) {
  GoldSchedules s;
  s.gamma0 = gamma0;
  s.delta0 = 0.5;
  return GoldAgent(ActionSet::interval(-1.0, 1.0), s, Vector::Zero(1));
}

}  // namespace

TEST(Learn, SingleUpdateByHand) {
  GoldAgent agent = interval_agent(0.1);
  const FeedbackItem item{1, 2.0, Vector::Ones(1), 0.5};
  const auto head = agent.learn(std::span<const FeedbackItem>(&item, 1));
  ASSERT_EQ(head, Round{1});
  EXPECT_NEAR(agent.pivot()[0], 0.4, 1e-15);
}

TEST(Learn, UpdateIsClippedToTheSet) {
  GoldAgent agent = interval_agent(1.0);
  const FeedbackItem item{1, 2.0, Vector::Ones(1), 0.5};
  agent.learn(std::span<const FeedbackItem>(&item, 1));
  EXPECT_DOUBLE_EQ(agent.pivot()[0], 1.0);
}

TEST(Learn, EmptyHeadLeavesPivotExactly) {
  GoldAgent agent = interval_agent(1.0);
  const Vector before = agent.pivot();
  EXPECT_FALSE(agent.learn({}).has_value());
  EXPECT_EQ(agent.pivot(), before);
  EXPECT_EQ(agent.round(), 2);
}

TEST(GoldAgent, RejectsBadConstruction) {
  GoldSchedules s;
  s.delta0 = 0.6;
  EXPECT_THROW(GoldAgent(ActionSet::interval(0, 1), s), gold::Error);
  s.delta0 = 0.2;
  EXPECT_THROW(GoldAgent(ActionSet::interval(0, 1), s, Vector::Constant(1, 1.5)), gold::Error);
}

TEST(GoldAgent, PlayCommitOrderingIsEnforced) {
  GoldAgent agent = interval_agent(0.1);
  EXPECT_THROW(agent.commit(0.0, 0), gold::Error);
  gold::Rng rng(1);
  agent.play(rng);
  EXPECT_THROW(agent.play(rng), gold::Error);
}

namespace {

struct Replay {
  std::vector<gold::StepRecord> records;
  GoldAgent agent;
};

Replay run_single(const DelaySchedule& delays, Round T, std::uint64_t seed) {
  GoldSchedules s;
  s.gamma0 = 0.5;
  s.delta0 = 0.4;
  s.b = 0.25;
  s.c = 0.75;
  Replay r{{}, GoldAgent(ActionSet::interval(0.0, 1.0), s, Vector::Constant(1, 0.8))};
  gold::Rng dir(seed), del(seed + 1000);
  auto payoff = [](const Vector& x) { return -(x[0] - 0.3) * (x[0] - 0.3) + 0.1; };
  for (Round t = 1; t <= T; ++t) r.records.push_back(r.agent.step(payoff, delays, dir, del));
  return r;
}

}  // namespace

TEST(GoldAgent, ReconstructionUsesTheOriginRadius) {
  // Every reward arrives 5 rounds late, so the radius in force at the update
  // differs from the one that generated the reward.
  const Round T = 60;
  auto [records, agent] = run_single(DelaySchedule::scripted(std::vector<Round>(T, 5)), T, 3);
  const auto& s = agent.schedules();
  const ActionSet& set = agent.action_set();
  for (Round t = 1; t < T; ++t) {
    const auto& rec = records[t - 1];
    const auto& next = records[t];
    if (!rec.head) {
      EXPECT_EQ(next.pivot, rec.pivot);
      continue;
    }
    const auto& origin = records[*rec.head - 1];
    const double delta_h = s.radius(*rec.head);
    const Vector u = (origin.played - origin.pivot) / delta_h +
                     (origin.pivot - set.safety_center()) / set.safety_radius();
    const Vector want = set.project(rec.pivot + s.step_size(t) * (1.0 / delta_h) * origin.reward * u);
    EXPECT_NEAR(next.pivot[0], want[0], 1e-12) << "t=" << t;
    const Vector wrong =
        set.project(rec.pivot + s.step_size(t) * (1.0 / s.radius(t)) * origin.reward * u);
    if (std::abs(wrong[0] - want[0]) > 1e-9) {
      EXPECT_GT(std::abs(next.pivot[0] - wrong[0]), 1e-10);
    }
  }
}

TEST(GoldAgent, HeadsFollowTheScriptedSchedule) {
  auto [records, agent] = run_single(DelaySchedule::scripted({3, 0, 2, 0, 1}), 5, 1);
  const std::optional<Round> want[] = {std::nullopt, 2, std::nullopt, 1, 3};
  for (int t = 0; t < 5; ++t) EXPECT_EQ(records[t].head, want[t]);
  EXPECT_EQ(records.back().empty_rounds, 2);
}

TEST(GoldAgent, Conservation) {
  auto [records, agent] = run_single(DelaySchedule::geometric(8.0, 0.5), 2000, 9);
  EXPECT_EQ(agent.generated(), 2000u);
  EXPECT_EQ(agent.generated(), agent.pool().enqueued() + agent.in_flight());
  EXPECT_EQ(agent.pool().enqueued(), agent.pool().dequeued() + agent.pool().size());
}

TEST(GoldAgent, Deterministic) {
  auto a = run_single(DelaySchedule::geometric(3.0, 0.3), 500, 42);
  auto b = run_single(DelaySchedule::geometric(3.0, 0.3), 500, 42);
  for (std::size_t k = 0; k < 500; ++k) {
    EXPECT_EQ(a.records[k].played, b.records[k].played);
    EXPECT_EQ(a.records[k].head, b.records[k].head);
  }
}

TEST(GoldAgent, PlayedPointsStayFeasible) {
  auto [records, agent] = run_single(DelaySchedule::power(1.0, 0.3), 5000, 4);
  for (const auto& rec : records) EXPECT_TRUE(agent.action_set().contains(rec.played));
}
