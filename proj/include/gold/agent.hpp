#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gold/common.hpp"
#include "gold/delay.hpp"
#include "gold/geometry.hpp"
#include "gold/reward_pool.hpp"
#include "gold/spsa.hpp"

namespace gold {

/// Power-law schedules gamma_t = gamma0 / t^c and delta_t = delta0 / t^b,
/// tuned for delays growing like t^alpha.
struct GoldSchedules {
  double gamma0 = 1.0;
  double c = 0.75;
  double delta0 = 0.25;
  double b = 0.25;
  double alpha = 0.0;

  double step_size(Round t) const { return gamma0 / std::pow(static_cast<double>(t), c); }
  double radius(Round t) const { return delta0 / std::pow(static_cast<double>(t), b); }
};

enum class ParamRegion { NashStrict, LogBoundary, Invalid };

inline const char* to_string(ParamRegion r) {
  switch (r) {
    case ParamRegion::NashStrict: return "NASH_STRICT";
    case ParamRegion::LogBoundary: return "LOG_BOUNDARY";
    case ParamRegion::Invalid: return "INVALID";
  }
  return "?";
}

struct ParamVerdict {
  ParamRegion region = ParamRegion::Invalid;
  std::vector<std::string> violated;
};

/// Classifies exponents against
///   2c - b > 1 + alpha,   b + c > 1,   2c - 2b > 1.
/// All strict: NASH_STRICT. All hold with at least one equality (within
/// 1e-12): LOG_BOUNDARY. Otherwise INVALID, naming each failed constraint.
inline ParamVerdict validate_params(double b, double c, double alpha) {
  constexpr double tol = 1e-12;
  struct Constraint {
    const char* name;
    double lhs;
    double rhs;
  };
  const Constraint constraints[] = {
      {"2c-b > 1+alpha", 2.0 * c - b, 1.0 + alpha},
      {"b+c > 1", b + c, 1.0},
      {"2c-2b > 1", 2.0 * c - 2.0 * b, 1.0},
  };
  ParamVerdict verdict;
  bool any_equal = false;
  for (const auto& k : constraints) {
    const double margin = k.lhs - k.rhs;
    if (margin < -tol) {
      std::ostringstream os;
      os << k.name << " (" << k.lhs << " < " << k.rhs << ")";
      verdict.violated.push_back(os.str());
    } else if (margin <= tol) {
      any_equal = true;
    }
  }
  if (!(b > 0.0) || !(c > 0.0)) verdict.violated.emplace_back("b, c > 0");
  if (!(alpha >= 0.0 && alpha < 1.0)) verdict.violated.emplace_back("0 <= alpha < 1");
  if (!verdict.violated.empty()) verdict.region = ParamRegion::Invalid;
  else verdict.region = any_equal ? ParamRegion::LogBoundary : ParamRegion::NashStrict;
  return verdict;
}

/// b = min{1/4, 1/3 - alpha/3},  c = max{3/4, 2/3 + alpha/3}.
inline std::pair<double, double> default_tuning(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw validation_error("default_tuning: alpha must lie in [0, 1)");
  return {std::min(0.25, 1.0 / 3.0 - alpha / 3.0), std::max(0.75, 2.0 / 3.0 + alpha / 3.0)};
}

/// Everything one round of play produced, from the focal player's view.
struct StepRecord {
  Round t = 0;
  Vector pivot;  // x_t, before the update
  Vector played;
  double reward = 0.0;
  Round triggered_delay = 0;
  std::optional<Round> head;  // nullopt: empty pool, no update
  std::size_t pool_size = 0;  // after the dequeue
  Round empty_rounds = 0;     // cumulative
};

/// One player's GOLD policy. Each round plays a perturbed pivot and takes at
/// most one projected gradient step, built from the oldest pooled reward.
///
/// A round is split in two so that several agents can play simultaneously:
/// play() fixes x̂_t, then commit() receives the reward and the triggered delay.
class GoldAgent {
 public:
  using PayoffOracle = std::function<double(const Vector&)>;

  GoldAgent(ActionSet set, GoldSchedules schedules, std::optional<Vector> x1 = std::nullopt)
      : set_(std::move(set)), schedules_(schedules) {
    if (!(schedules_.gamma0 > 0.0) || !(schedules_.delta0 > 0.0))
      throw validation_error("gamma0 and delta0 must be > 0");
    if (!(schedules_.b > 0.0) || !(schedules_.c > 0.0))
      throw validation_error("exponents b and c must be > 0");
    if (schedules_.delta0 > set_.safety_radius()) {
      throw validation_error("delta0 = " + std::to_string(schedules_.delta0) +
                             " exceeds the safety radius " +
                             std::to_string(set_.safety_radius()));
    }
    pivot_ = x1 ? *x1 : set_.safety_center();
    if (!set_.contains(pivot_)) throw validation_error("initial point lies outside the action set");
  }

  /// Draws u_t and returns x̂_t = x_t + delta_t w_t.
  const Vector& play(Rng& rng) {
    if (played_) throw runtime_error("play() called twice in round " + std::to_string(round_));
    const double radius = schedules_.radius(round_);
    if (radius > set_.safety_radius()) {
      throw runtime_error("sampling radius exceeds safety radius at t=" + std::to_string(round_));
    }
    auto [played, pert] = perturb(pivot_, set_, radius, sample_direction(set_.dim(), rng));
    played_ = std::move(played);
    pert_ = std::move(pert);
    return *played_;
  }

  /// Stamps the reward of x̂_t for delivery at t + delay, enqueues everything
  /// arriving this round, dequeues the oldest item and updates the pivot.
  StepRecord commit(double reward, Round delay) {
    if (!played_) throw runtime_error("commit() before play() in round " + std::to_string(round_));
    if (delay < 0) throw runtime_error("negative delay at t=" + std::to_string(round_));
    StepRecord rec;
    rec.t = round_;
    rec.pivot = pivot_;
    rec.played = std::move(*played_);
    rec.reward = reward;
    rec.triggered_delay = delay;
    played_.reset();

    inbox_.schedule(arrival_round(round_, delay),
                    FeedbackItem{round_, reward, std::move(pert_.direction), pert_.radius});
    ++generated_;
    const std::vector<FeedbackItem> arriving = inbox_.take(round_);
    rec.head = learn(arriving);
    rec.pool_size = pool_.size();
    rec.empty_rounds = pool_.stats().empty_rounds;
    return rec;
  }

  /// Single-agent round against a fixed payoff oracle.
  StepRecord step(const PayoffOracle& payoff, const DelaySchedule& delays, Rng& direction_rng,
                  Rng& delay_rng) {
    const Round t = round_;
    const double reward = payoff(play(direction_rng));
    return commit(reward, delays.delay_at(t, delay_rng));
  }

  /// Pools `arriving` (items with origin + delay = current round), consumes
  /// the head and takes the gradient step; advances the round. Returns the
  /// head origin, or nullopt when the pool was empty and the pivot stayed put.
  std::optional<Round> learn(std::span<const FeedbackItem> arriving) {
    pool_.enqueue_batch(arriving, round_);
    const std::optional<FeedbackItem> head = pool_.dequeue_head(round_);
    if (head) {
      const Vector grad = reconstruct_gradient(head, set_.dim());
      pivot_ = set_.project(pivot_ + schedules_.step_size(round_) * grad);
    }
    ++round_;
    return head ? std::optional<Round>(head->origin) : std::nullopt;
  }

  Round round() const noexcept { return round_; }
  const Vector& pivot() const noexcept { return pivot_; }
  const ActionSet& action_set() const noexcept { return set_; }
  const GoldSchedules& schedules() const noexcept { return schedules_; }
  const RewardPool& pool() const noexcept { return pool_; }
  std::size_t generated() const noexcept { return generated_; }
  std::size_t in_flight() const noexcept { return inbox_.in_flight(); }

 private:
  ActionSet set_;
  GoldSchedules schedules_;
  Vector pivot_;
  Round round_ = 1;
  RewardPool pool_;
  DeliveryBuffer inbox_;
  std::optional<Vector> played_;
  Perturbation pert_;
  std::size_t generated_ = 0;
};

}  // namespace gold
