#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iterator>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "gold/agent.hpp"
#include "gold/config.hpp"
#include "gold/metrics.hpp"
#include "gold/trace.hpp"

namespace gold {

enum class Stream : std::uint64_t { Direction = 1, Delay = 2 };

/// Independent stream for (seed, player, purpose). Runs never share streams,
/// so results do not depend on how runs are scheduled across threads.
inline Rng make_stream(std::uint64_t seed, std::uint64_t player, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(player), static_cast<std::uint32_t>(stream)};
  return Rng(seq);
}

/// Run-level parallelism: GOLD_SIM_THREADS if set, else the core count.
inline unsigned thread_count() {
  if (const char* env = std::getenv("GOLD_SIM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
    throw validation_error("GOLD_SIM_THREADS must be a positive integer");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls job(k) for k in [0, count) on up to `threads` workers. The first
/// exception thrown by any job is rethrown after all workers stop.
template <typename Job>
void parallel_for(std::size_t count, unsigned threads, Job&& job) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t k = 0; k < count; ++k) job(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> workers;
  for (unsigned w = 0; w < threads; ++w) {
    workers.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) {
        try {
          job(k);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  workers.clear();
  if (failure) std::rethrow_exception(failure);
}

/// One deterministic run. Each round every player perturbs and plays at once,
/// payoffs are evaluated at the joint played profile, and then every player
/// stamps its reward and updates from its own pool.
inline RunTrace run_experiment(const ExperimentConfig& cfg, std::uint64_t seed, Round thin) {
  const std::size_t n = cfg.game.players();
  std::vector<GoldAgent> agents;
  std::vector<Rng> direction_rngs, delay_rngs;
  agents.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    agents.emplace_back(cfg.game.action_sets[i], cfg.players[i].schedules, cfg.players[i].x1);
    direction_rngs.push_back(make_stream(seed, i, Stream::Direction));
    delay_rngs.push_back(make_stream(seed, i, Stream::Delay));
  }

  RunTrace trace;
  trace.players = n;
  trace.horizon = cfg.horizon;
  trace.thin = thin;
  trace.rows.reserve(n * static_cast<std::size_t>((cfg.horizon + thin - 1) / thin));

  Profile played(n);
  std::vector<Round> delays(n);
  for (Round t = 1; t <= cfg.horizon; ++t) {
    try {
      for (std::size_t i = 0; i < n; ++i) played[i] = agents[i].play(direction_rngs[i]);
      for (std::size_t i = 0; i < n; ++i) {
        if (cfg.shared_delay && i > 0) {
          delays[i] = delays[0];
        } else {
          delays[i] = cfg.players[i].delay.delay_at(t, delay_rngs[i]);
        }
      }
      const bool record = (t - 1) % thin == 0;
      for (std::size_t i = 0; i < n; ++i) {
        const double reward = cfg.game.payoff(i, played);
        StepRecord rec = agents[i].commit(reward, delays[i]);
        if (!record) continue;
        TraceRow row;
        row.t = t;
        row.player = i;
        row.pivot = std::move(rec.pivot);
        row.played = std::move(rec.played);
        row.reward = rec.reward;
        row.triggered_delay = rec.triggered_delay;
        row.head = rec.head.value_or(-1);
        row.pool_size = rec.pool_size;
        row.empty_rounds = rec.empty_rounds;
        trace.rows.push_back(std::move(row));
      }
    } catch (const Error& e) {
      throw Error(e.kind(), "round " + std::to_string(t) + ": " + e.what());
    }
  }
  return trace;
}

inline RunTrace run_experiment(const ExperimentConfig& cfg, std::uint64_t seed) {
  return run_experiment(cfg, seed, cfg.outputs.thin);
}

// ── Sweeps ──────────────────────────────────────────────────────────────────

struct GridPoint {
  double b = 0.25;
  double c = 0.75;
  double alpha = 0.0;
  Round T = 1000;
};

/// Grid CSV with header "b,c,alpha,T".
inline std::vector<GridPoint> read_grid(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) return {};
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "b,c,alpha,T") throw validation_error("grid: expected header 'b,c,alpha,T'");
  std::vector<GridPoint> grid;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    GridPoint g;
    double T = 0;
    std::string rest;
    if (!(ls >> g.b >> g.c >> g.alpha >> T) || (ls >> rest) || T < 0 || std::floor(T) != T) {
      throw validation_error("grid line " + std::to_string(lineno) + ": expected b,c,alpha,T");
    }
    g.T = static_cast<Round>(T);
    grid.push_back(g);
  }
  return grid;
}

inline std::vector<GridPoint> read_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open grid: " + path);
  return read_grid(in);
}

struct SweepRow {
  GridPoint point;
  std::size_t seeds = 0;
  double mean_regret = 0.0;
  double stderr_regret = 0.0;
  double mean_distance = 0.0;
  double stderr_distance = 0.0;
  /// Log-log slope of mean regret against T across rows sharing (b, c, alpha).
  double slope = std::numeric_limits<double>::quiet_NaN();
};

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!(x[k] > 0.0) || !(y[k] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double lx = std::log(x[k]), ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / denom;
}

namespace detail {

inline std::pair<double, double> mean_and_stderr(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  if (v.empty()) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace detail

/// Scalar outcome of one run, enough for sweep statistics.
struct RunSummary {
  double regret = 0.0;  // averaged over players
  double final_distance = 0.0;
};

inline RunSummary summarize_run(const ExperimentConfig& cfg, std::uint64_t seed,
                                const EquilibriumResult& eq, const RegretOptions& opts = {}) {
  const RunTrace trace = run_experiment(cfg, seed, 1);
  RunSummary s;
  if (trace.rows.empty()) return s;
  for (std::size_t p = 0; p < trace.players; ++p)
    s.regret += regret_from_trace(trace, cfg.game, p, opts).cumulative;
  s.regret /= static_cast<double>(trace.players);
  Profile last(trace.players);
  for (std::size_t p = 0; p < trace.players; ++p) last[p] = trace.at(trace.horizon, p).pivot;
  s.final_distance = joint_distance(last, eq.point);
  return s;
}

/// Runs every (grid point, seed) pair with all players retuned to the grid
/// exponents. Rows come back in grid order whatever the thread count.
inline std::vector<SweepRow> run_sweep(const ExperimentConfig& base, const std::vector<GridPoint>& full_grid,
                                       unsigned threads = thread_count()) {
  // Zero-horizon points have nothing to measure and produce no rows.
  std::vector<GridPoint> grid;
  std::copy_if(full_grid.begin(), full_grid.end(), std::back_inserter(grid),
               [](const GridPoint& g) { return g.T > 0; });
  std::vector<ExperimentConfig> configs;
  for (const GridPoint& g : grid) {
    ExperimentConfig cfg = base;
    cfg.horizon = g.T;
    for (auto& p : cfg.players) {
      p.schedules.b = g.b;
      p.schedules.c = g.c;
      p.schedules.alpha = g.alpha;
    }
    validate_config(cfg);
    configs.push_back(std::move(cfg));
  }
  if (grid.empty()) return {};

  const EquilibriumResult eq = solve_equilibrium(base.game);
  const std::size_t seeds = base.seeds.size();
  std::vector<RunSummary> results(grid.size() * seeds);
  // Regret comparators for multi-player runs cost O(T) per candidate; skip
  // the grid cross-check inside sweeps and rely on projected ascent.
  RegretOptions opts;
  opts.grid_budget = 1e6;
  parallel_for(results.size(), threads, [&](std::size_t k) {
    results[k] = summarize_run(configs[k / seeds], base.seeds[k % seeds], eq, opts);
  });

  std::vector<SweepRow> rows(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::vector<double> regrets, distances;
    for (std::size_t s = 0; s < seeds; ++s) {
      regrets.push_back(results[g * seeds + s].regret);
      distances.push_back(results[g * seeds + s].final_distance);
    }
    rows[g].point = grid[g];
    rows[g].seeds = seeds;
    std::tie(rows[g].mean_regret, rows[g].stderr_regret) = detail::mean_and_stderr(regrets);
    std::tie(rows[g].mean_distance, rows[g].stderr_distance) = detail::mean_and_stderr(distances);
  }
  std::map<std::tuple<double, double, double>, std::vector<std::size_t>> groups;
  for (std::size_t g = 0; g < grid.size(); ++g)
    groups[{grid[g].b, grid[g].c, grid[g].alpha}].push_back(g);
  for (const auto& [key, members] : groups) {
    std::vector<double> xs, ys;
    for (std::size_t g : members) {
      xs.push_back(static_cast<double>(rows[g].point.T));
      ys.push_back(rows[g].mean_regret);
    }
    const double slope = loglog_slope(xs, ys);
    for (std::size_t g : members) rows[g].slope = slope;
  }
  return rows;
}

inline void write_sweep(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "b,c,alpha,T,seeds,mean_regret,stderr_regret,mean_distance,stderr_distance,slope\n";
  for (const SweepRow& r : rows) {
    std::string line;
    for (double v : {r.point.b, r.point.c, r.point.alpha}) {
      detail::append_double(line, v);
      line += ',';
    }
    line += std::to_string(r.point.T) + ',' + std::to_string(r.seeds);
    for (double v : {r.mean_regret, r.stderr_regret, r.mean_distance, r.stderr_distance, r.slope}) {
      line += ',';
      detail::append_double(line, v);
    }
    out << line << '\n';
  }
}

}  // namespace gold
