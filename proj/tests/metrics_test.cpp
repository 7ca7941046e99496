#include <cmath>

#include <gtest/gtest.h>

#include "gold/config.hpp"
#include "gold/harness.hpp"
#include "gold/metrics.hpp"

using gold::ActionSet;
using gold::Profile;
using gold::Round;
using gold::RunTrace;
using gold::SolveStatus;
using gold::Vector;

namespace {

Vector s(double x) { return Vector::Constant(1, x); }

// Single-player trace with the given played points; pivots equal plays and
// delays are zero unless a head sequence is supplied.
RunTrace scripted_trace(const std::vector<double>& plays, std::vector<Round> heads = {}) {
  RunTrace trace;
  trace.players = 1;
  trace.horizon = static_cast<Round>(plays.size());
  for (std::size_t k = 0; k < plays.size(); ++k) {
    gold::TraceRow row;
    row.t = static_cast<Round>(k + 1);
    row.pivot = row.played = s(plays[k]);
    row.head = heads.empty() ? row.t : heads[k];
    trace.rows.push_back(row);
  }
  return trace;
}

}  // namespace

TEST(SolveEquilibrium, DecoupledQuadratic) {
  const auto game = gold::quadratic_game({ActionSet::interval(0, 1), ActionSet::interval(0, 1)},
                                         {s(0.3), s(0.3)});
  const auto eq = gold::solve_equilibrium(game, 1e-12, 100000);
  ASSERT_TRUE(eq.ok());
  EXPECT_NEAR(eq.point[0][0], 0.3, 1e-10);
  EXPECT_NEAR(eq.point[1][0], 0.3, 1e-10);
  EXPECT_LT(eq.residual, 1e-10);
}

TEST(SolveEquilibrium, SymmetricKelly) {
  const auto game = gold::kelly_game({{2.0, 2.0}, 1.0, {1.0, 1.0}});
  const auto eq = gold::solve_equilibrium(game);
  ASSERT_EQ(eq.status, SolveStatus::Converged);
  const double x = (-1.0 + std::sqrt(5.0)) / 4.0;
  EXPECT_NEAR(eq.point[0][0], x, 1e-6);
  EXPECT_NEAR(eq.point[1][0], x, 1e-6);
}

TEST(SolveEquilibrium, AntiMonotoneIsFlagged) {
  const auto game = gold::anti_monotone_game({ActionSet::interval(0, 1), ActionSet::interval(0, 1)});
  const auto eq = gold::solve_equilibrium(game);
  EXPECT_NE(eq.status, SolveStatus::Converged);
  EXPECT_FALSE(eq.ok());
}

TEST(SolveEquilibrium, VariationalFixedPoint) {
  // <v^i(x*), x^i - x*^i> <= tol ||x^i - x*^i|| + tol on sampled feasible x^i.
  const auto game = gold::kelly_game({{1.0, 3.0, 2.0}, 0.5, {2.0, 1.0, 1.5}});
  const double tol = 1e-8;
  const auto eq = gold::solve_equilibrium(game, tol, 200000);
  ASSERT_TRUE(eq.ok());
  gold::Rng rng(1);
  for (int k = 0; k < 1000; ++k) {
    for (std::size_t i = 0; i < 3; ++i) {
      const Vector xi = gold::sample_uniform(game.action_sets[i], rng);
      const Vector d = xi - eq.point[i];
      EXPECT_LE(game.gradient(i, eq.point).dot(d), tol * d.norm() + tol);
    }
  }
}

TEST(RegretFromTrace, PlayAtTheMaximizerHasNoRegret) {
  const auto game = gold::quadratic_game({ActionSet::interval(0, 1)}, {s(0.4)});
  const auto report = gold::regret_from_trace(scripted_trace(std::vector<double>(50, 0.4)), game, 0);
  EXPECT_NEAR(report.cumulative, 0.0, 1e-9 * 50);
}

TEST(RegretFromTrace, ConstantPlayAtTheEdge) {
  const auto game = gold::quadratic_game({ActionSet::interval(-1, 1)}, {s(0.0)});
  const auto report = gold::regret_from_trace(scripted_trace(std::vector<double>(10, 1.0)), game, 0);
  EXPECT_NEAR(report.best_fixed[0], 0.0, 1e-9);
  EXPECT_NEAR(report.cumulative, 10.0, 1e-9);
}

TEST(RegretFromTrace, AlternatingPlay) {
  const auto game = gold::quadratic_game({ActionSet::interval(0, 1)}, {s(0.5)});
  const auto trace = scripted_trace({0, 1, 0, 1});
  const auto report = gold::regret_from_trace(trace, game, 0);
  EXPECT_TRUE(report.grid_checked);
  // Independent grid oracle at resolution 1e-4.
  double best = -1e300, arg = 0.0;
  for (int k = 0; k <= 10000; ++k) {
    const double x = k * 1e-4;
    double total = 0.0;
    for (double p : {0.0, 1.0, 0.0, 1.0}) total += -(x - 0.5) * (x - 0.5) - (-(p - 0.5) * (p - 0.5));
    if (total > best) {
      best = total;
      arg = x;
    }
  }
  EXPECT_NEAR(arg, 0.5, 1e-4);
  EXPECT_NEAR(report.best_fixed[0], 0.5, 1e-6);
  EXPECT_NEAR(report.cumulative, 1.0, 1e-9);
  EXPECT_NEAR(report.cumulative, best, 1e-7);
}

TEST(RegretFromTrace, ComparatorBeatsRandomFixedActions) {
  gold::ExperimentConfig cfg;
  cfg.game = gold::kelly_game({{2.0, 3.0}, 1.0, {1.0, 1.0}});
  cfg.horizon = 400;
  for (int i = 0; i < 2; ++i) {
    gold::PlayerConfig p;
    p.schedules = {1.0, 0.85, 0.2, 0.2, 0.0};
    cfg.players.push_back(p);
  }
  gold::validate_config(cfg);
  const auto trace = gold::run_experiment(cfg, 3);
  gold::Rng rng(4);
  for (std::size_t player = 0; player < 2; ++player) {
    const auto report = gold::regret_from_trace(trace, cfg.game, player);
    for (int k = 0; k < 100; ++k) {
      const Vector z = gold::sample_uniform(cfg.game.action_sets[player], rng);
      double against_z = 0.0;
      for (Round t = 1; t <= cfg.horizon; ++t) {
        Profile p{trace.at(t, 0).played, trace.at(t, 1).played};
        const double realized = cfg.game.payoff(player, p);
        p[player] = z;
        against_z += cfg.game.payoff(player, p) - realized;
      }
      EXPECT_GE(report.cumulative, against_z - 1e-9 * cfg.horizon);
    }
  }
}

TEST(DistanceTrajectory, FrozenAtEquilibrium) {
  gold::EquilibriumResult eq;
  eq.point = {s(0.25)};
  const auto d = gold::distance_trajectory(scripted_trace(std::vector<double>(20, 0.25)), eq);
  for (double x : d.played) EXPECT_EQ(x, 0.0);
  for (double x : d.pivot) EXPECT_EQ(x, 0.0);
}

TEST(DistanceTrajectory, PerturbationBound) {
  // Pivot at x*; played distance <= delta_t (1 + diam / r).
  const auto set = ActionSet::box(Vector::Zero(2), Vector::Ones(2)).with_safety(Vector::Constant(2, 0.3), 0.3);
  Vector xstar(2);
  xstar << 0.8, 0.6;
  gold::EquilibriumResult eq;
  eq.point = {xstar};
  gold::GoldSchedules sched{1.0, 0.75, 0.3, 0.25, 0.0};
  gold::Rng rng(5);
  RunTrace trace;
  trace.players = 1;
  trace.horizon = 1000;
  for (Round t = 1; t <= 1000; ++t) {
    gold::TraceRow row;
    row.t = t;
    row.pivot = xstar;
    row.played = gold::perturb(xstar, set, sched.radius(t), gold::sample_direction(2, rng)).first;
    trace.rows.push_back(row);
  }
  const auto d = gold::distance_trajectory(trace, eq);
  for (Round t = 1; t <= 1000; ++t) {
    EXPECT_LE(d.played[t - 1], sched.radius(t) * (1.0 + set.diameter() / set.safety_radius()) + 1e-15);
  }
}

TEST(SeriesDiagnostics, SynchronousHasNoStaleness) {
  const auto trace = scripted_trace(std::vector<double>(100, 0.5));
  const auto series = gold::series_diagnostics(trace, gold::GoldSchedules{});
  for (double a : series.A_partial) EXPECT_EQ(a, 0.0);
}

TEST(SeriesDiagnostics, MatchesDirectSummation) {
  const std::vector<Round> heads{-1, 2, -1, 1, 3};
  const auto trace = scripted_trace(std::vector<double>(5, 0.5), heads);
  const gold::GoldSchedules sched{0.7, 0.8, 0.3, 0.2, 0.0};
  const auto series = gold::series_diagnostics(trace, sched);
  double a = 0, b = 0, c = 0;
  for (Round t = 1; t <= 5; ++t) {
    const Round h = heads[t - 1];
    if (h > 0) {
      const double g = 0.7 / std::pow(t, 0.8);
      const double dh = 0.3 / std::pow(h, 0.2);
      for (Round s2 = h; s2 < t; ++s2) a += g * (0.7 / std::pow(s2, 0.8)) / (0.3 / std::pow(s2, 0.2));
      b += g * dh;
      c += g * g / (dh * dh);
    }
    EXPECT_NEAR(series.A_partial[t - 1], a, 1e-14);
    EXPECT_NEAR(series.B_partial[t - 1], b, 1e-14);
    EXPECT_NEAR(series.C_partial[t - 1], c, 1e-14);
  }
}

TEST(SeriesDiagnostics, BoundaryTuningGrowsLogarithmically) {
  // With gamma0 = delta0 and 2c - 2b = 1, C_T is the harmonic number H_T.
  const Round T = 100000;
  RunTrace trace = scripted_trace(std::vector<double>(T, 0.5));
  const auto series = gold::series_diagnostics(trace, gold::GoldSchedules{0.25, 0.75, 0.25, 0.25, 0.0});
  double harmonic = 0.0;
  for (Round t = 1; t <= T; ++t) harmonic += 1.0 / t;
  EXPECT_NEAR(series.C_sum(), harmonic, 1e-9);
  const double ratio = series.C_sum() / std::log(static_cast<double>(T));
  EXPECT_GE(ratio, 0.8);
  EXPECT_LE(ratio, 1.2);
}

TEST(MetricsTable, Header) {
  std::ostringstream out;
  gold::write_metrics(out, {gold::MetricsRow{"r", 3, 1.5, 0.25, 1, 2, 0.1, 0.2, 0.3}});
  EXPECT_EQ(out.str(),
            "run_id,T,regret,final_pivot_distance,empty_rounds,max_lag,A_sum,B_sum,C_sum\n"
            "r,3,1.5,0.25,1,2,0.1,0.2,0.3\n");
}
