#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gold/common.hpp"

namespace gold {

/// Membership tolerance for projection fixed-point checks.
inline constexpr double kBoundaryTol = 1e-9;

struct Box {
  Vector lo;
  Vector hi;
};

struct Ball {
  Vector center;
  double radius;
};

/// { x in R^dim : x_i >= lower for all i, sum_i x_i <= budget }.
struct SimplexSlice {
  double budget;
  int dim;
  double lower;
};

struct SafetyBall {
  Vector center;
  double radius;
};

/// A compact convex action space with closed-form Euclidean projection and a
/// ball B_r(p) contained in it. Immutable once built; every factory checks
/// the safety-ball containment before returning.
class ActionSet {
 public:
  using Kind = std::variant<Box, Ball, SimplexSlice>;

  static ActionSet box(Vector lo, Vector hi);
  static ActionSet interval(double lo, double hi) {
    return box(Vector::Constant(1, lo), Vector::Constant(1, hi));
  }
  static ActionSet ball(Vector center, double radius);
  static ActionSet simplex_slice(double budget, int dim, double lower = 0.0);

  /// Same set, different safety ball. Rejects balls that are not contained.
  ActionSet with_safety(Vector center, double radius) const;

  int dim() const noexcept { return dim_; }
  const Kind& kind() const noexcept { return kind_; }
  const Vector& safety_center() const noexcept { return safety_.center; }
  double safety_radius() const noexcept { return safety_.radius; }

  Vector project(const Vector& y) const;
  double diameter() const;
  bool contains(const Vector& x, double tol = kBoundaryTol) const;

  std::string describe() const;

 private:
  ActionSet(Kind kind, int dim) : kind_(std::move(kind)), dim_(dim) {}

  void check_safety(const SafetyBall& ball) const;

  Kind kind_;
  int dim_;
  SafetyBall safety_;
};

namespace detail {

// Projection onto { y >= 0, sum y = s } by the sort-and-threshold rule.
inline Vector project_scaled_simplex(const Vector& y, double s) {
  std::vector<double> u(y.data(), y.data() + y.size());
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumsum += u[j];
    const double candidate = (cumsum - s) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) theta = candidate;
  }
  return (y.array() - theta).max(0.0).matrix();
}

inline void require_dim(const Vector& y, int dim, const char* what) {
  if (y.size() != dim) {
    throw validation_error(std::string(what) + ": dimension mismatch (expected " +
                           std::to_string(dim) + ", got " +
                           std::to_string(y.size()) + ")");
  }
}

}  // namespace detail

/// Center and radius of a ball inscribed in the set.
///   box: midpoint, half the shortest side
///   ball: the ball itself
///   simplex slice: inscribed ball of the corner simplex
inline SafetyBall default_safety_ball(const ActionSet::Kind& kind) {
  return std::visit(
      [](const auto& k) -> SafetyBall {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Box>) {
          const Vector side = k.hi - k.lo;
          const double min_side = side.minCoeff();
          if (!(min_side > 0.0)) throw validation_error("box has no interior (zero-width side)");
          return {0.5 * (k.lo + k.hi), 0.5 * min_side};
        } else if constexpr (std::is_same_v<K, Ball>) {
          if (!(k.radius > 0.0)) throw validation_error("ball has no interior (radius <= 0)");
          return {k.center, k.radius};
        } else {
          const double slack = k.budget - k.dim * k.lower;
          if (!(slack > 0.0)) throw validation_error("simplex slice has no interior");
          const double n = k.dim;
          const double r = slack / (n + std::sqrt(n));
          return {Vector::Constant(k.dim, k.lower + r), r};
        }
      },
      kind);
}

inline SafetyBall default_safety_ball(const ActionSet& set) {
  return default_safety_ball(set.kind());
}

inline ActionSet ActionSet::box(Vector lo, Vector hi) {
  if (lo.size() == 0 || lo.size() != hi.size())
    throw validation_error("box bounds must be nonempty and of equal length");
  if ((lo.array() > hi.array()).any()) throw validation_error("box requires lo <= hi");
  if (!lo.allFinite() || !hi.allFinite()) throw validation_error("box bounds must be finite");
  const int dim = static_cast<int>(lo.size());
  ActionSet set(Box{std::move(lo), std::move(hi)}, dim);
  set.safety_ = default_safety_ball(set.kind_);
  set.check_safety(set.safety_);
  return set;
}

inline ActionSet ActionSet::ball(Vector center, double radius) {
  if (center.size() == 0) throw validation_error("ball center must be nonempty");
  if (!std::isfinite(radius)) throw validation_error("ball radius must be finite");
  const int dim = static_cast<int>(center.size());
  ActionSet set(Ball{std::move(center), radius}, dim);
  set.safety_ = default_safety_ball(set.kind_);
  set.check_safety(set.safety_);
  return set;
}

inline ActionSet ActionSet::simplex_slice(double budget, int dim, double lower) {
  if (dim < 1) throw validation_error("simplex slice needs dim >= 1");
  ActionSet set(SimplexSlice{budget, dim, lower}, dim);
  set.safety_ = default_safety_ball(set.kind_);
  set.check_safety(set.safety_);
  return set;
}

inline ActionSet ActionSet::with_safety(Vector center, double radius) const {
  detail::require_dim(center, dim_, "safety center");
  SafetyBall ball{std::move(center), radius};
  check_safety(ball);
  ActionSet copy = *this;
  copy.safety_ = std::move(ball);
  return copy;
}

inline void ActionSet::check_safety(const SafetyBall& ball) const {
  if (!(ball.radius > 0.0)) throw validation_error("safety radius must be positive");
  constexpr double tol = 1e-12;
  auto fixed = [&](const Vector& y) { return (project(y) - y).lpNorm<Eigen::Infinity>() <= tol; };
  if (!fixed(ball.center)) throw validation_error("safety center lies outside the action set");
  for (int i = 0; i < dim_; ++i) {
    for (double sign : {-1.0, 1.0}) {
      Vector probe = ball.center;
      probe[i] += sign * ball.radius;
      if (!fixed(probe)) {
        throw validation_error("safety ball of radius " + std::to_string(ball.radius) +
                               " is not contained in the action set (" + describe() + ")");
      }
    }
  }
}

inline Vector ActionSet::project(const Vector& y) const {
  detail::require_dim(y, dim_, "project");
  return std::visit(
      [&](const auto& k) -> Vector {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Box>) {
          return y.cwiseMax(k.lo).cwiseMin(k.hi);
        } else if constexpr (std::is_same_v<K, Ball>) {
          const Vector offset = y - k.center;
          const double norm = offset.norm();
          if (norm <= k.radius) return y;
          return k.center + (k.radius / norm) * offset;
        } else {
          const Vector shifted = y.array() - k.lower;
          const Vector clamped = shifted.cwiseMax(0.0);
          const double slack = k.budget - k.dim * k.lower;
          if (clamped.sum() <= slack) return clamped.array() + k.lower;
          return detail::project_scaled_simplex(shifted, slack).array() + k.lower;
        }
      },
      kind_);
}

/// Exact for every supported kind.
inline double ActionSet::diameter() const {
  return std::visit(
      [](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Box>) {
          return (k.hi - k.lo).norm();
        } else if constexpr (std::is_same_v<K, Ball>) {
          return 2.0 * k.radius;
        } else {
          const double slack = k.budget - k.dim * k.lower;
          return k.dim == 1 ? slack : slack * std::sqrt(2.0);
        }
      },
      kind_);
}

inline bool ActionSet::contains(const Vector& x, double tol) const {
  if (x.size() != dim_ || !x.allFinite()) return false;
  return (project(x) - x).lpNorm<Eigen::Infinity>() <= tol;
}

inline std::string ActionSet::describe() const {
  return std::visit(
      [&](const auto& k) -> std::string {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Box>) {
          return "box(dim=" + std::to_string(dim_) + ")";
        } else if constexpr (std::is_same_v<K, Ball>) {
          return "ball(dim=" + std::to_string(dim_) + ", radius=" + std::to_string(k.radius) + ")";
        } else {
          return "simplex-slice(dim=" + std::to_string(dim_) +
                 ", budget=" + std::to_string(k.budget) + ")";
        }
      },
      kind_);
}

inline Vector project(const ActionSet& set, const Vector& y) { return set.project(y); }

/// Uniform draw from the set (exact for every supported kind).
inline Vector sample_uniform(const ActionSet& set, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return std::visit(
      [&](const auto& k) -> Vector {
        using K = std::decay_t<decltype(k)>;
        const int n = set.dim();
        Vector x(n);
        if constexpr (std::is_same_v<K, Box>) {
          for (int i = 0; i < n; ++i) x[i] = k.lo[i] + (k.hi[i] - k.lo[i]) * unit(rng);
          return x;
        } else if constexpr (std::is_same_v<K, Ball>) {
          std::normal_distribution<double> gauss;
          double norm = 0.0;
          do {
            for (int i = 0; i < n; ++i) x[i] = gauss(rng);
            norm = x.norm();
          } while (norm == 0.0);
          const double scale = k.radius * std::pow(unit(rng), 1.0 / n) / norm;
          return k.center + scale * x;
        } else {
          // Flat Dirichlet over n + 1 coordinates, last one dropped.
          std::exponential_distribution<double> expo(1.0);
          double total = 0.0;
          for (int i = 0; i < n; ++i) total += (x[i] = expo(rng));
          total += expo(rng);
          const double slack = k.budget - k.dim * k.lower;
          return (x.array() * (slack / total) + k.lower).matrix();
        }
      },
      set.kind());
}
inline double diameter(const ActionSet& set) { return set.diameter(); }

}  // namespace gold
