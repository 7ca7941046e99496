#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "gold/agent.hpp"
#include "gold/common.hpp"
#include "gold/game.hpp"
#include "gold/trace.hpp"

namespace gold {

// ── Equilibrium oracle ──────────────────────────────────────────────────────

enum class SolveStatus {
  Converged,
  NotConverged,
  /// The sampled monotonicity check found violations: the returned point may
  /// be a fixed point but is not certified as the unique equilibrium.
  NotMonotone,
};

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "CONVERGED";
    case SolveStatus::NotConverged: return "NOT_CONVERGED";
    case SolveStatus::NotMonotone: return "NOT_MONOTONE";
  }
  return "?";
}

struct EquilibriumResult {
  Profile point;
  double residual = std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
  SolveStatus status = SolveStatus::NotConverged;

  bool ok() const noexcept { return status == SolveStatus::Converged; }
};

/// max_i ||x^i - P_i(x^i + v^i(x))||: zero exactly at Nash equilibria of a
/// concave game.
inline double equilibrium_residual(const GameSpec& game, const Profile& x) {
  double worst = 0.0;
  for (std::size_t i = 0; i < game.players(); ++i) {
    const Vector moved = game.action_sets[i].project(x[i] + game.gradient(i, x));
    worst = std::max(worst, (x[i] - moved).norm());
  }
  return worst;
}

struct SolveOptions {
  double tol = 1e-10;
  std::size_t max_iter = 200000;
  std::size_t dsc_pairs = 1000;
  std::uint64_t dsc_seed = 0x9e3779b97f4a7c15ULL;
};

/// Extragradient iteration on the true gradient field with step 1/(2 beta),
/// started from the safety centers. Returns the best iterate seen.
inline EquilibriumResult solve_equilibrium(const GameSpec& game, const SolveOptions& opts = {}) {
  Rng dsc_rng(opts.dsc_seed);
  const bool monotone = check_dsc(game, opts.dsc_pairs, dsc_rng).violations == 0;

  const double eta = game.lipschitz_grad > 0.0 ? 1.0 / (2.0 * game.lipschitz_grad) : 1.0;
  const std::size_t n = game.players();
  auto step = [&](const Profile& base, const Profile& at) {
    Profile next(n);
    for (std::size_t i = 0; i < n; ++i)
      next[i] = game.action_sets[i].project(base[i] + eta * game.gradient(i, at));
    return next;
  };

  EquilibriumResult best;
  Profile x = game.centers();
  for (std::size_t it = 0; it <= opts.max_iter; ++it) {
    const double res = equilibrium_residual(game, x);
    if (res < best.residual) {
      best.residual = res;
      best.point = x;
      best.iterations = it;
    }
    if (res <= opts.tol) break;
    x = step(x, step(x, x));
  }
  if (!monotone) best.status = SolveStatus::NotMonotone;
  else best.status = best.residual <= opts.tol ? SolveStatus::Converged : SolveStatus::NotConverged;
  return best;
}

inline EquilibriumResult solve_equilibrium(const GameSpec& game, double tol, std::size_t max_iter) {
  SolveOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  return solve_equilibrium(game, opts);
}

// ── Regret ──────────────────────────────────────────────────────────────────

struct RegretReport {
  Round horizon = 0;
  Vector best_fixed;
  double cumulative = 0.0;
  std::vector<double> per_round;
  bool grid_checked = false;
};

struct RegretOptions {
  double solver_tol = 1e-9;
  std::size_t max_iter = 100000;
  /// Grid spacing for the brute-force comparator cross-check (dim <= 2).
  double grid_resolution = 1e-3;
  /// Skip the grid check when it would cost more payoff evaluations.
  double grid_budget = 5e7;
};

namespace detail {

// Lattice over the bounding box of `set` at the given spacing, keeping
// feasible points only.
inline std::vector<Vector> feasible_grid(const ActionSet& set, double spacing) {
  const int dim = set.dim();
  Vector lo(dim), hi(dim);
  for (int k = 0; k < dim; ++k) {
    Vector e = Vector::Zero(dim);
    e[k] = 1e12;
    lo[k] = set.project(set.safety_center() - e)[k];
    hi[k] = set.project(set.safety_center() + e)[k];
  }
  // Axis extremes of a box or ball are attained on the axis through the
  // center; simplex slices have their minimum there too and their maximum at
  // a vertex, which the projection along the axis reaches.
  std::vector<Vector> points;
  if (dim == 1) {
    const auto count = static_cast<long>(std::floor((hi[0] - lo[0]) / spacing + 1e-9));
    for (long k = 0; k <= count; ++k) points.push_back(Vector::Constant(1, lo[0] + k * spacing));
    if (points.back()[0] < hi[0]) points.push_back(Vector::Constant(1, hi[0]));
  } else {
    const auto nx = static_cast<long>(std::floor((hi[0] - lo[0]) / spacing + 1e-9));
    const auto ny = static_cast<long>(std::floor((hi[1] - lo[1]) / spacing + 1e-9));
    for (long a = 0; a <= nx; ++a) {
      for (long b = 0; b <= ny; ++b) {
        Vector p(2);
        p << lo[0] + a * spacing, lo[1] + b * spacing;
        if (set.contains(p)) points.push_back(std::move(p));
      }
    }
  }
  return points;
}

}  // namespace detail

/// Regret of `player` against the best fixed action in hindsight, where the
/// opponents' contribution at round t is their played action x̂_t^{-i}.
///
/// The comparator maximizes the concave map x -> sum_t u^i(x; x̂_t^{-i}) by
/// projected gradient ascent; for dim <= 2 a grid search cross-checks it and
/// replaces it if the grid finds a better point.
inline RegretReport regret_from_trace(const RunTrace& trace, const GameSpec& game,
                                      std::size_t player, const RegretOptions& opts = {}) {
  if (!trace.complete()) throw validation_error("regret needs a complete, unthinned trace");
  if (trace.players != game.players()) throw validation_error("regret: trace/game player mismatch");
  const ActionSet& set = game.action_sets[player];
  const auto T = static_cast<std::size_t>(trace.horizon);

  std::vector<Profile> profiles(T);
  for (std::size_t t = 0; t < T; ++t) {
    profiles[t].resize(game.players());
    for (std::size_t j = 0; j < game.players(); ++j)
      profiles[t][j] = trace.at(static_cast<Round>(t + 1), j).played;
  }

  // With a single player every round faces the same payoff function, so the
  // cumulative objective is T times one evaluation.
  const bool static_env = game.players() == 1;
  auto objective = [&](const Vector& x) {
    if (static_env) {
      Profile p{x};
      return static_cast<double>(T) * game.payoff(player, p);
    }
    double total = 0.0;
    Profile p;
    for (const Profile& prof : profiles) {
      p = prof;
      p[player] = x;
      total += game.payoff(player, p);
    }
    return total;
  };
  auto mean_gradient = [&](const Vector& x) -> Vector {
    if (static_env) {
      Profile p{x};
      return game.gradient(player, p);
    }
    Vector g = Vector::Zero(set.dim());
    Profile p;
    for (const Profile& prof : profiles) {
      p = prof;
      p[player] = x;
      g += game.gradient(player, p);
    }
    return g / static_cast<double>(T);
  };

  const double eta = game.lipschitz_grad > 0.0 ? 1.0 / game.lipschitz_grad : 1.0;
  Vector x = set.safety_center();
  for (std::size_t it = 0; it < opts.max_iter; ++it) {
    const Vector g = mean_gradient(x);
    if ((x - set.project(x + g)).norm() <= opts.solver_tol) break;
    x = set.project(x + eta * g);
  }

  RegretReport report;
  report.horizon = trace.horizon;
  if (set.dim() <= 2 && opts.grid_resolution > 0.0) {
    const std::vector<Vector> grid = detail::feasible_grid(set, opts.grid_resolution);
    const double cost = static_cast<double>(grid.size()) * (static_env ? 1.0 : static_cast<double>(T));
    if (cost <= opts.grid_budget) {
      report.grid_checked = true;
      double best = objective(x);
      for (const Vector& p : grid) {
        const double value = objective(p);
        if (value > best) {
          best = value;
          x = p;
        }
      }
    }
  }

  report.best_fixed = x;
  report.per_round.resize(T);
  Profile p;
  for (std::size_t t = 0; t < T; ++t) {
    p = profiles[t];
    const double realized = game.payoff(player, p);
    p[player] = x;
    report.per_round[t] = game.payoff(player, p) - realized;
    report.cumulative += report.per_round[t];
  }
  return report;
}

// ── Trajectories and series ─────────────────────────────────────────────────

struct DistanceTrajectory {
  std::vector<Round> rounds;
  std::vector<double> played;  // ||x̂_t - x*||
  std::vector<double> pivot;   // ||x_t - x*||
};

/// Joint-profile distances to the equilibrium at every recorded round.
inline DistanceTrajectory distance_trajectory(const RunTrace& trace, const EquilibriumResult& eq) {
  if (eq.point.size() != trace.players) throw validation_error("distance: trace/equilibrium player mismatch");
  DistanceTrajectory out;
  std::size_t k = 0;
  while (k < trace.rows.size()) {
    const Round t = trace.rows[k].t;
    double played_sq = 0.0, pivot_sq = 0.0;
    std::size_t seen = 0;
    for (; k < trace.rows.size() && trace.rows[k].t == t; ++k, ++seen) {
      const TraceRow& row = trace.rows[k];
      played_sq += (row.played - eq.point[row.player]).squaredNorm();
      pivot_sq += (row.pivot - eq.point[row.player]).squaredNorm();
    }
    if (seen != trace.players) throw validation_error("distance: round " + std::to_string(t) + " is missing players");
    out.rounds.push_back(t);
    out.played.push_back(std::sqrt(played_sq));
    out.pivot.push_back(std::sqrt(pivot_sq));
  }
  return out;
}

struct SeriesDiagnostics {
  std::vector<double> A_partial;  // outdated-information error
  std::vector<double> B_partial;  // estimator-bias error
  std::vector<double> C_partial;  // estimator second moment

  double A_sum() const { return A_partial.empty() ? 0.0 : A_partial.back(); }
  double B_sum() const { return B_partial.empty() ? 0.0 : B_partial.back(); }
  double C_sum() const { return C_partial.empty() ? 0.0 : C_partial.back(); }
};

/// Running sums of
///   A_t = gamma_t sum_{s = head_t}^{t-1} gamma_s / delta_s,
///   B_t = gamma_t delta_{head_t},
///   C_t = gamma_t^2 / delta_{head_t}^2,
/// with empty-head rounds contributing zero.
inline SeriesDiagnostics series_diagnostics(const RunTrace& trace, const GoldSchedules& sched,
                                            std::size_t player = 0) {
  if (!trace.complete()) throw validation_error("series diagnostics need a complete, unthinned trace");
  const auto T = static_cast<std::size_t>(trace.horizon);
  // ratio_prefix[k] = sum_{s=1}^{k} gamma_s / delta_s
  std::vector<double> ratio_prefix(T + 1, 0.0);
  for (std::size_t s = 1; s <= T; ++s) {
    const auto r = static_cast<Round>(s);
    ratio_prefix[s] = ratio_prefix[s - 1] + sched.step_size(r) / sched.radius(r);
  }
  SeriesDiagnostics out;
  out.A_partial.reserve(T);
  out.B_partial.reserve(T);
  out.C_partial.reserve(T);
  double a = 0.0, b = 0.0, c = 0.0;
  for (std::size_t t = 1; t <= T; ++t) {
    const Round head = trace.at(static_cast<Round>(t), player).head;
    if (head > 0) {
      const double gamma = sched.step_size(static_cast<Round>(t));
      const double delta_head = sched.radius(head);
      a += gamma * (ratio_prefix[t - 1] - ratio_prefix[static_cast<std::size_t>(head) - 1]);
      b += gamma * delta_head;
      c += (gamma * gamma) / (delta_head * delta_head);
    }
    out.A_partial.push_back(a);
    out.B_partial.push_back(b);
    out.C_partial.push_back(c);
  }
  return out;
}

// ── Metrics table ───────────────────────────────────────────────────────────

struct MetricsRow {
  std::string run_id;
  Round T = 0;
  double regret = 0.0;
  double final_pivot_distance = 0.0;
  Round empty_rounds = 0;
  Round max_lag = 0;
  double A_sum = 0.0;
  double B_sum = 0.0;
  double C_sum = 0.0;
};

inline constexpr std::string_view kMetricsHeader =
    "run_id,T,regret,final_pivot_distance,empty_rounds,max_lag,A_sum,B_sum,C_sum";

inline void write_metrics(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << kMetricsHeader << '\n';
  for (const MetricsRow& m : rows) {
    std::string line = m.run_id + ',' + std::to_string(m.T) + ',';
    detail::append_double(line, m.regret);
    line += ',';
    detail::append_double(line, m.final_pivot_distance);
    line += ',' + std::to_string(m.empty_rounds) + ',' + std::to_string(m.max_lag) + ',';
    detail::append_double(line, m.A_sum);
    line += ',';
    detail::append_double(line, m.B_sum);
    line += ',';
    detail::append_double(line, m.C_sum);
    out << line << '\n';
  }
}

/// Per-player metrics for one complete trace.
inline std::vector<MetricsRow> analyze_trace(const RunTrace& trace, const GameSpec& game,
                                             const std::vector<GoldSchedules>& schedules,
                                             const std::string& run_id,
                                             const RegretOptions& regret_opts = {}) {
  if (schedules.size() != trace.players) throw validation_error("analyze: need schedules for every player");
  const EquilibriumResult eq = solve_equilibrium(game);
  const DistanceTrajectory dist = distance_trajectory(trace, eq);
  std::vector<MetricsRow> rows;
  for (std::size_t p = 0; p < trace.players; ++p) {
    MetricsRow m;
    m.run_id = trace.players == 1 ? run_id : run_id + "-p" + std::to_string(p);
    m.T = trace.horizon;
    m.regret = regret_from_trace(trace, game, p, regret_opts).cumulative;
    m.final_pivot_distance = dist.pivot.empty() ? 0.0 : dist.pivot.back();
    for (Round t = 1; t <= trace.horizon; ++t) {
      const TraceRow& row = trace.at(t, p);
      if (row.head > 0) m.max_lag = std::max(m.max_lag, t - row.head);
    }
    m.empty_rounds = trace.at(trace.horizon, p).empty_rounds;
    const SeriesDiagnostics series = series_diagnostics(trace, schedules[p], p);
    m.A_sum = series.A_sum();
    m.B_sum = series.B_sum();
    m.C_sum = series.C_sum();
    rows.push_back(std::move(m));
  }
  return rows;
}

}  // namespace gold
