#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "gold/common.hpp"
#include "gold/geometry.hpp"

namespace gold {

/// An N-player continuous game: per-player action sets, payoffs u^i(x) that
/// are concave in the player's own action, and their individual gradients
/// v^i(x) = d u^i / d x^i.
struct GameSpec {
  using PayoffFn = std::function<double(std::size_t, const Profile&)>;
  using GradientFn = std::function<Vector(std::size_t, const Profile&)>;

  std::string name;
  std::vector<ActionSet> action_sets;
  PayoffFn payoff;
  GradientFn gradient;
  double lipschitz_value = 0.0;  // bound on the joint gradient norm
  double lipschitz_grad = 0.0;   // smoothness constant of the gradient field

  std::size_t players() const noexcept { return action_sets.size(); }

  /// Profile of safety centers (the default starting point).
  Profile centers() const {
    Profile x;
    x.reserve(players());
    for (const auto& set : action_sets) x.push_back(set.safety_center());
    return x;
  }
};

inline double joint_norm(const Profile& x) {
  double sq = 0.0;
  for (const auto& xi : x) sq += xi.squaredNorm();
  return std::sqrt(sq);
}

inline double joint_distance(const Profile& a, const Profile& b) {
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sq += (a[i] - b[i]).squaredNorm();
  return std::sqrt(sq);
}

inline Profile sample_profile(const GameSpec& game, Rng& rng) {
  Profile x;
  x.reserve(game.players());
  for (const auto& set : game.action_sets) x.push_back(sample_uniform(set, rng));
  return x;
}

// ── Kelly auctions ──────────────────────────────────────────────────────────

/// Proportional-share auction. Each bidder i splits its bid across resources;
/// on resource r it receives x^i_r / (c + sum_j x^j_r) of the commodity, worth
/// g^i per unit, and pays its bid.
struct KellyAuction {
  std::vector<double> gains;
  double entry_barrier = 1.0;
  std::vector<double> budgets;
};

inline void validate(const KellyAuction& a) {
  if (a.gains.empty()) throw validation_error("kelly: at least one bidder required");
  if (a.gains.size() != a.budgets.size())
    throw validation_error("kelly: gains and budgets must have equal length");
  // The share x/(c + sum x) is undefined at the all-zero profile when c = 0.
  if (!(a.entry_barrier > 0.0)) throw validation_error("kelly: entry barrier must be > 0");
  for (double g : a.gains)
    if (!(g > 0.0)) throw validation_error("kelly: gains must be > 0");
  for (double b : a.budgets)
    if (!(b > 0.0)) throw validation_error("kelly: budgets must be > 0");
}

inline double kelly_payoff(const KellyAuction& a, std::size_t i, const Profile& x) {
  const Eigen::Index resources = x[i].size();
  double total = 0.0;
  for (Eigen::Index r = 0; r < resources; ++r) {
    double denom = a.entry_barrier;
    for (const auto& xj : x) denom += xj[r];
    total += a.gains[i] * x[i][r] / denom - x[i][r];
  }
  return total;
}

inline Vector kelly_gradient(const KellyAuction& a, std::size_t i, const Profile& x) {
  const Eigen::Index resources = x[i].size();
  Vector grad(resources);
  for (Eigen::Index r = 0; r < resources; ++r) {
    double denom = a.entry_barrier;
    for (const auto& xj : x) denom += xj[r];
    grad[r] = a.gains[i] * (denom - x[i][r]) / (denom * denom) - 1.0;
  }
  return grad;
}

/// Kelly auction as a game on [0, b^i]^resources. The safety ball is the
/// interval midpoint with radius 0.99 b^i / 2 so perturbed bids stay strictly
/// inside the budget.
inline GameSpec kelly_game(KellyAuction a, int resources = 1) {
  validate(a);
  if (resources < 1) throw validation_error("kelly: resources must be >= 1");
  const double c = a.entry_barrier;
  const std::size_t n = a.gains.size();

  GameSpec game;
  game.name = "kelly";
  double value_sq = 0.0;
  double smooth_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double b = a.budgets[i];
    auto set = ActionSet::box(Vector::Zero(resources), Vector::Constant(resources, b));
    game.action_sets.push_back(set.with_safety(Vector::Constant(resources, 0.5 * b), 0.99 * 0.5 * b));
    // v^i ranges over [-1, g^i / c - 1] per resource.
    const double per = std::max(1.0, a.gains[i] / c - 1.0);
    value_sq += resources * per * per;
    // |d v^i / d x^i| <= 2 g / c^2 and |d v^i / d x^j| <= g / c^2, per resource.
    const double diag = 2.0 * a.gains[i] / (c * c);
    const double off = a.gains[i] / (c * c);
    smooth_sq += resources * (diag * diag + static_cast<double>(n - 1) * off * off);
  }
  game.lipschitz_value = std::sqrt(value_sq);
  game.lipschitz_grad = std::sqrt(smooth_sq);
  game.payoff = [a](std::size_t i, const Profile& x) { return kelly_payoff(a, i, x); };
  game.gradient = [a](std::size_t i, const Profile& x) { return kelly_gradient(a, i, x); };
  return game;
}

// ── Synthetic games ─────────────────────────────────────────────────────────

/// u^i(x) = -||x^i - target^i||^2. Decoupled, strongly monotone; with one
/// player this is plain concave maximization.
inline GameSpec quadratic_game(std::vector<ActionSet> sets, std::vector<Vector> targets) {
  if (sets.empty() || sets.size() != targets.size())
    throw validation_error("quadratic: need one target per player");
  double value_sq = 0.0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    detail::require_dim(targets[i], sets[i].dim(), "quadratic target");
    const double reach = sets[i].diameter() + (sets[i].safety_center() - targets[i]).norm();
    value_sq += 4.0 * reach * reach;
  }
  GameSpec game;
  game.name = "quadratic";
  game.action_sets = std::move(sets);
  game.lipschitz_value = std::sqrt(value_sq);
  game.lipschitz_grad = 2.0;
  game.payoff = [targets](std::size_t i, const Profile& x) {
    return -(x[i] - targets[i]).squaredNorm();
  };
  game.gradient = [targets](std::size_t i, const Profile& x) -> Vector {
    return -2.0 * (x[i] - targets[i]);
  };
  return game;
}

/// u^i(x) = slope^i . x^i + offset^i.
inline GameSpec linear_game(std::vector<ActionSet> sets, std::vector<Vector> slopes,
                            std::vector<double> offsets = {}) {
  if (sets.empty() || sets.size() != slopes.size())
    throw validation_error("linear: need one slope per player");
  if (offsets.empty()) offsets.assign(sets.size(), 0.0);
  if (offsets.size() != sets.size()) throw validation_error("linear: need one offset per player");
  double value_sq = 0.0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    detail::require_dim(slopes[i], sets[i].dim(), "linear slope");
    value_sq += slopes[i].squaredNorm();
  }
  GameSpec game;
  game.name = "linear";
  game.action_sets = std::move(sets);
  game.lipschitz_value = std::sqrt(value_sq);
  game.lipschitz_grad = 0.0;
  game.payoff = [slopes, offsets](std::size_t i, const Profile& x) {
    return slopes[i].dot(x[i]) + offsets[i];
  };
  game.gradient = [slopes](std::size_t i, const Profile&) -> Vector { return slopes[i]; };
  return game;
}

/// u^i(x) = +||x^i||^2: convex in own action, so the monotonicity sum is
/// strictly positive for every distinct pair. A negative control.
inline GameSpec anti_monotone_game(std::vector<ActionSet> sets) {
  if (sets.empty()) throw validation_error("anti-monotone: need at least one player");
  double value_sq = 0.0;
  for (const auto& set : sets) {
    const double reach = set.safety_center().norm() + set.diameter();
    value_sq += 4.0 * reach * reach;
  }
  GameSpec game;
  game.name = "anti_monotone";
  game.action_sets = std::move(sets);
  game.lipschitz_value = std::sqrt(value_sq);
  game.lipschitz_grad = 2.0;
  game.payoff = [](std::size_t i, const Profile& x) { return x[i].squaredNorm(); };
  game.gradient = [](std::size_t i, const Profile& x) -> Vector { return 2.0 * x[i]; };
  return game;
}

// ── Diagnostics ─────────────────────────────────────────────────────────────

struct DscReport {
  std::size_t violations = 0;
  double worst_value = -std::numeric_limits<double>::infinity();
  std::size_t pairs = 0;
};

/// Sampling falsifier for diagonal strict concavity: draws random feasible
/// pairs x != x' and evaluates sum_i w^i <v^i(x') - v^i(x), x'^i - x^i>.
/// Zero violations means none were found, not that the game is certified.
inline DscReport check_dsc(const GameSpec& game, const std::vector<double>& weights,
                           std::size_t pairs, Rng& rng) {
  if (weights.size() != game.players())
    throw validation_error("check_dsc: need one weight per player");
  for (double w : weights)
    if (!(w > 0.0)) throw validation_error("check_dsc: weights must be > 0");

  DscReport report;
  report.pairs = pairs;
  for (std::size_t k = 0; k < pairs; ++k) {
    Profile x = sample_profile(game, rng);
    Profile y = sample_profile(game, rng);
    while (joint_distance(x, y) <= 1e-6) y = sample_profile(game, rng);
    double sum = 0.0;
    for (std::size_t i = 0; i < game.players(); ++i) {
      sum += weights[i] * (game.gradient(i, y) - game.gradient(i, x)).dot(y[i] - x[i]);
    }
    if (sum >= 0.0) ++report.violations;
    report.worst_value = std::max(report.worst_value, sum);
  }
  return report;
}

inline DscReport check_dsc(const GameSpec& game, std::size_t pairs, Rng& rng) {
  return check_dsc(game, std::vector<double>(game.players(), 1.0), pairs, rng);
}

/// Worst relative disagreement between the analytic gradient and central
/// finite differences of the payoff over `samples` random feasible profiles.
inline double gradient_fd_error(const GameSpec& game, std::size_t samples, Rng& rng,
                                double h = 1e-6) {
  double worst = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    Profile x = sample_profile(game, rng);
    for (std::size_t i = 0; i < game.players(); ++i) {
      const Vector analytic = game.gradient(i, x);
      Vector numeric(analytic.size());
      for (Eigen::Index r = 0; r < analytic.size(); ++r) {
        Profile up = x, down = x;
        up[i][r] += h;
        down[i][r] -= h;
        numeric[r] = (game.payoff(i, up) - game.payoff(i, down)) / (2.0 * h);
      }
      const double scale = std::max(1.0, analytic.norm());
      worst = std::max(worst, (analytic - numeric).norm() / scale);
    }
  }
  return worst;
}

}  // namespace gold
