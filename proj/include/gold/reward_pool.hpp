#pragma once

#include <cmath>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "gold/delay.hpp"
#include "gold/common.hpp"

namespace gold {

/// A timestamped reward together with the sampling direction and radius that
/// produced it, so the gradient surrogate can be rebuilt when it is dequeued.
struct FeedbackItem {
  Round origin = 0;
  double reward = 0.0;
  Vector direction;
  double radius = 0.0;
};

struct PoolStats {
  Round empty_rounds = 0;
  Round max_lag = 0;
  std::size_t max_pool_size = 0;  // largest pending count left after a dequeue
};

/// Received-but-unused rewards, dequeued one per round oldest-origin first.
///
/// Each origin may be enqueued once and is consumed exactly once. Note that
/// consumption order across rounds is not monotone in origin: a late-arriving
/// old reward is consumed after younger ones that arrived earlier.
class RewardPool {
 public:
  /// Adds every item that arrives at round `now`.
  void enqueue_batch(std::span<const FeedbackItem> items, Round now) {
    for (const FeedbackItem& item : items) {
      if (item.origin < 1 || item.origin > now) {
        throw runtime_error("reward pool: origin " + std::to_string(item.origin) +
                            " enqueued at round " + std::to_string(now));
      }
      if (!(item.radius > 0.0)) throw runtime_error("reward pool: item radius must be > 0");
      if (std::abs(item.direction.norm() - 1.0) > 1e-12) {
        throw runtime_error("reward pool: item direction is not unit norm");
      }
      const auto slot = static_cast<std::size_t>(item.origin);
      if (slot >= seen_.size()) seen_.resize(slot + 1, false);
      if (seen_[slot]) {
        throw runtime_error("reward pool: duplicate origin " + std::to_string(item.origin));
      }
      seen_[slot] = true;
      pending_.push(item);
      ++enqueued_;
    }
  }

  /// Removes and returns the oldest pending item, or nullopt when the pool is
  /// empty (a no-update round).
  std::optional<FeedbackItem> dequeue_head(Round t) {
    if (pending_.empty()) {
      last_head_.reset();
      ++stats_.empty_rounds;
      return std::nullopt;
    }
    FeedbackItem head = pending_.top();
    pending_.pop();
    last_head_ = head.origin;
    stats_.max_pool_size = std::max(stats_.max_pool_size, pending_.size());
    stats_.max_lag = std::max(stats_.max_lag, t - head.origin);
    ++dequeued_;
    return head;
  }

  const PoolStats& stats() const noexcept { return stats_; }
  std::size_t size() const noexcept { return pending_.size(); }
  bool empty() const noexcept { return pending_.empty(); }
  /// Origin of the most recent dequeue; nullopt stands for the empty head.
  std::optional<Round> last_head() const noexcept { return last_head_; }
  std::size_t enqueued() const noexcept { return enqueued_; }
  std::size_t dequeued() const noexcept { return dequeued_; }

 private:
  struct LaterOrigin {
    bool operator()(const FeedbackItem& a, const FeedbackItem& b) const {
      return a.origin > b.origin;
    }
  };

  std::priority_queue<FeedbackItem, std::vector<FeedbackItem>, LaterOrigin> pending_;
  std::vector<bool> seen_;
  std::optional<Round> last_head_;
  PoolStats stats_;
  std::size_t enqueued_ = 0;
  std::size_t dequeued_ = 0;
};

inline PoolStats pool_stats(const RewardPool& pool) { return pool.stats(); }

/// Rewards in flight, bucketed by the round at which they arrive.
class DeliveryBuffer {
 public:
  void schedule(Round arrival, FeedbackItem item) {
    if (arrival < 1) throw runtime_error("delivery buffer: arrival round must be >= 1");
    const auto slot = static_cast<std::size_t>(arrival);
    if (slot >= buckets_.size()) buckets_.resize(slot + 1);
    buckets_[slot].push_back(std::move(item));
    ++in_flight_;
  }

  /// Hands over (and forgets) everything arriving at round t.
  std::vector<FeedbackItem> take(Round t) {
    const auto slot = static_cast<std::size_t>(t);
    if (slot >= buckets_.size()) return {};
    std::vector<FeedbackItem> out;
    out.swap(buckets_[slot]);
    in_flight_ -= out.size();
    return out;
  }

  std::size_t in_flight() const noexcept { return in_flight_; }

 private:
  std::vector<std::vector<FeedbackItem>> buckets_;
  std::size_t in_flight_ = 0;
};

}  // namespace gold
