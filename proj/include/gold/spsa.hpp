#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "gold/common.hpp"
#include "gold/game.hpp"
#include "gold/geometry.hpp"
#include "gold/reward_pool.hpp"

namespace gold {

/// A sampling direction u, its feasibility-adjusted version
/// w = u - (pivot - p) / r, and the radius delta it was used with.
struct Perturbation {
  Vector direction;
  Vector adjusted;
  double radius = 0.0;
};

/// Uniform draw from the unit sphere in R^dim, by normalizing a standard
/// Gaussian vector. In one dimension the sphere is {-1, +1}.
inline Vector sample_direction(int dim, Rng& rng) {
  if (dim < 1) throw validation_error("sample_direction: dim must be >= 1");
  if (dim == 1) {
    std::bernoulli_distribution coin(0.5);
    return Vector::Constant(1, coin(rng) ? 1.0 : -1.0);
  }
  std::normal_distribution<double> gauss;
  Vector u(dim);
  double norm = 0.0;
  do {
    for (int i = 0; i < dim; ++i) u[i] = gauss(rng);
    norm = u.norm();
  } while (norm == 0.0);
  return u / norm;
}

/// The action actually played around `pivot`:
///   played = pivot + radius * (direction - (pivot - p) / r)
/// which equals the convex combination (1 - radius/r) pivot + (radius/r)(p + r u)
/// and is therefore feasible whenever radius <= r.
inline std::pair<Vector, Perturbation> perturb(const Vector& pivot, const ActionSet& set,
                                                double radius, const Vector& direction) {
  detail::require_dim(pivot, set.dim(), "perturb pivot");
  detail::require_dim(direction, set.dim(), "perturb direction");
  if (!(radius > 0.0)) throw validation_error("perturb: sampling radius must be > 0");
  if (radius > set.safety_radius()) {
    throw validation_error("infeasible sampling radius " + std::to_string(radius) +
                           " (safety radius " + std::to_string(set.safety_radius()) + ")");
  }
  Perturbation pert;
  pert.direction = direction;
  pert.adjusted = direction - (pivot - set.safety_center()) / set.safety_radius();
  pert.radius = radius;
  Vector played = pivot + radius * pert.adjusted;
  return {std::move(played), std::move(pert)};
}

/// One-point gradient surrogate (dim / radius) * reward * direction, built
/// from the radius recorded with the item (not the current one). The empty
/// head yields the zero vector.
inline Vector reconstruct_gradient(const std::optional<FeedbackItem>& item, int dim) {
  if (!item) return Vector::Zero(dim);
  return (static_cast<double>(dim) / item->radius) * item->reward * item->direction;
}

struct GradientEstimate {
  Vector mean;
  Vector std_error;  // componentwise standard error of the mean
  Vector true_gradient;

  double bias() const { return (mean - true_gradient).norm(); }
};

/// Monte Carlo statistics of player `player`'s estimator at a frozen profile,
/// with every player perturbing at `radius` using fresh directions.
inline GradientEstimate estimate_gradient(const GameSpec& game, std::size_t player,
                                          const Profile& profile, double radius,
                                          std::size_t samples, Rng& rng) {
  if (samples < 2) throw validation_error("estimate_gradient: need at least 2 samples");
  const int dim = game.action_sets[player].dim();
  Vector sum = Vector::Zero(dim);
  Vector sum_sq = Vector::Zero(dim);
  Profile played(game.players());
  for (std::size_t k = 0; k < samples; ++k) {
    Vector own_direction;
    for (std::size_t j = 0; j < game.players(); ++j) {
      const ActionSet& set = game.action_sets[j];
      Vector u = sample_direction(set.dim(), rng);
      played[j] = perturb(profile[j], set, radius, u).first;
      if (j == player) own_direction = std::move(u);
    }
    const double reward = game.payoff(player, played);
    const Vector g = (static_cast<double>(dim) / radius) * reward * own_direction;
    sum += g;
    sum_sq += g.cwiseProduct(g);
  }
  const double n = static_cast<double>(samples);
  GradientEstimate out;
  out.mean = sum / n;
  const Vector var = ((sum_sq / n) - out.mean.cwiseProduct(out.mean)) * (n / (n - 1.0));
  out.std_error = (var.cwiseMax(0.0) / n).cwiseSqrt();
  out.true_gradient = game.gradient(player, profile);
  return out;
}

/// ||E[estimator] - v^i(x)|| by Monte Carlo.
inline double estimate_bias(const GameSpec& game, std::size_t player, const Profile& profile,
                            double radius, std::size_t samples, Rng& rng) {
  return estimate_gradient(game, player, profile, radius, samples, rng).bias();
}

}  // namespace gold
