#pragma once

// Drives a RewardPool through a delay sequence the way an agent would, with
// dummy payloads. Shared by the pool unit tests and the acceptance binary.

#include <optional>
#include <vector>

#include "gold/reward_pool.hpp"

namespace gold::testing {

struct PoolRun {
  std::vector<std::optional<Round>> heads;
  std::vector<Round> empty_prefix;  // cumulative empty rounds after round t
  std::vector<std::size_t> sizes;   // pool size after the dequeue of round t
  PoolStats stats;
};

inline PoolRun drive_pool(const std::vector<Round>& delays) {
  const Round T = static_cast<Round>(delays.size());
  RewardPool pool;
  DeliveryBuffer inbox;
  PoolRun run;
  for (Round t = 1; t <= T; ++t) {
    inbox.schedule(t + delays[static_cast<std::size_t>(t - 1)],
                   FeedbackItem{t, 0.0, Vector::Ones(1), 0.5});
    const auto arriving = inbox.take(t);
    pool.enqueue_batch(arriving, t);
    const auto head = pool.dequeue_head(t);
    run.heads.push_back(head ? std::optional<Round>(head->origin) : std::nullopt);
    run.empty_prefix.push_back(pool.stats().empty_rounds);
    run.sizes.push_back(pool.size());
  }
  run.stats = pool_stats(pool);
  return run;
}

}  // namespace gold::testing
