#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gold/agent.hpp"
#include "gold/common.hpp"
#include "gold/delay.hpp"
#include "gold/game.hpp"
#include "gold/geometry.hpp"

namespace gold {

struct PlayerConfig {
  GoldSchedules schedules;
  DelaySchedule delay = DelaySchedule::constant(0);
  std::optional<Vector> x1;
  ParamVerdict verdict;
};

struct OutputConfig {
  std::string trace_path;
  std::string metrics_path;
  Round thin = 1;
};

/// A fully resolved experiment. Build it with load_config(), or fill it in
/// programmatically and pass it through validate_config().
struct ExperimentConfig {
  GameSpec game;
  Round horizon = 1;
  std::vector<std::uint64_t> seeds{0};
  /// All players see the delay sequence generated by player 0's schedule.
  bool shared_delay = false;
  std::vector<PlayerConfig> players;
  OutputConfig outputs;
};

/// Checks cross-module constraints and records each player's parameter
/// verdict. INVALID exponents, delta0 above the safety radius, infeasible
/// starting points, and delays growing faster than the tuning targets are
/// rejected.
inline void validate_config(ExperimentConfig& cfg) {
  if (cfg.horizon < 0) throw validation_error("horizon must be >= 0");
  if (cfg.outputs.thin < 1) throw validation_error("outputs.thin must be >= 1");
  if (cfg.seeds.empty()) throw validation_error("at least one seed is required");
  if (cfg.players.size() != cfg.game.players()) {
    throw validation_error("config has " + std::to_string(cfg.players.size()) +
                           " player entries but the game has " +
                           std::to_string(cfg.game.players()) + " players");
  }
  for (std::size_t i = 0; i < cfg.players.size(); ++i) {
    PlayerConfig& p = cfg.players[i];
    const ActionSet& set = cfg.game.action_sets[i];
    const std::string who = "player " + std::to_string(i) + ": ";
    const DelaySchedule& delay = cfg.shared_delay ? cfg.players.front().delay : p.delay;
    if (delay.alpha() > p.schedules.alpha + 1e-12) {
      throw validation_error(who + "delay certifies alpha = " + std::to_string(delay.alpha()) +
                             " but the schedules target alpha = " +
                             std::to_string(p.schedules.alpha));
    }
    p.verdict = validate_params(p.schedules.b, p.schedules.c, p.schedules.alpha);
    if (p.verdict.region == ParamRegion::Invalid) {
      std::string msg = who + "exponents outside the admissible region:";
      for (const auto& v : p.verdict.violated) msg += " [" + v + "]";
      throw validation_error(msg);
    }
    if (!(p.schedules.gamma0 > 0.0) || !(p.schedules.delta0 > 0.0))
      throw validation_error(who + "gamma0 and delta0 must be > 0");
    if (p.schedules.delta0 > set.safety_radius()) {
      throw validation_error(who + "delta0 = " + std::to_string(p.schedules.delta0) +
                             " exceeds the safety radius " + std::to_string(set.safety_radius()));
    }
    if (p.x1 && !set.contains(*p.x1)) throw validation_error(who + "x1 lies outside the action set");
  }
}

namespace config_detail {

using nlohmann::json;

// Object accessor that rejects keys it was never asked about.
class Fields {
 public:
  Fields(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw validation_error(where_ + ": expected a table");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const json& at(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw validation_error(where_ + ": missing key '" + key + "'");
    return j_.at(key);
  }

  template <typename T>
  T get(const std::string& key) {
    const json& v = at(key);
    try {
      return v.get<T>();
    } catch (const json::exception&) {
      throw validation_error(where_ + "." + key + ": wrong type");
    }
  }

  template <typename T>
  T get_or(const std::string& key, T fallback) {
    return has(key) ? get<T>(key) : fallback;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw validation_error(where_ + ": unknown key '" + it.key() + "'");
    }
  }

  const std::string& where() const { return where_; }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

inline Vector to_vector(const json& j, const std::string& where) {
  if (j.is_number()) return Vector::Constant(1, j.get<double>());
  if (!j.is_array() || j.empty()) throw validation_error(where + ": expected a non-empty number list");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw validation_error(where + ": expected numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

inline ActionSet parse_set(const json& j, const std::string& where) {
  Fields f(j, where);
  const auto kind = f.get<std::string>("kind");
  std::optional<ActionSet> set;
  if (kind == "box" || kind == "interval") {
    set = ActionSet::box(to_vector(f.at("lo"), where + ".lo"), to_vector(f.at("hi"), where + ".hi"));
  } else if (kind == "ball") {
    set = ActionSet::ball(to_vector(f.at("center"), where + ".center"), f.get<double>("radius"));
  } else if (kind == "simplex") {
    set = ActionSet::simplex_slice(f.get<double>("budget"), f.get<int>("dim"),
                                   f.get_or<double>("lower", 0.0));
  } else {
    throw validation_error(where + ": unknown set kind '" + kind + "'");
  }
  f.finish();
  return *set;
}

inline std::vector<ActionSet> parse_sets(Fields& f) {
  const json& arr = f.at("sets");
  if (!arr.is_array() || arr.empty()) throw validation_error(f.where() + ".sets: expected a list");
  std::vector<ActionSet> sets;
  for (std::size_t i = 0; i < arr.size(); ++i)
    sets.push_back(parse_set(arr[i], f.where() + ".sets[" + std::to_string(i) + "]"));
  return sets;
}

inline std::vector<Vector> parse_vectors(const json& arr, const std::string& where) {
  if (!arr.is_array()) throw validation_error(where + ": expected a list");
  std::vector<Vector> out;
  for (std::size_t i = 0; i < arr.size(); ++i)
    out.push_back(to_vector(arr[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

inline GameSpec parse_game(const json& j) {
  Fields f(j, "game");
  const auto name = f.get<std::string>("name");
  GameSpec game;
  if (name == "kelly") {
    KellyAuction a;
    a.gains = f.get<std::vector<double>>("gains");
    a.entry_barrier = f.get<double>("entry_barrier");
    a.budgets = f.get<std::vector<double>>("budgets");
    game = kelly_game(std::move(a), f.get_or<int>("resources", 1));
  } else if (name == "quadratic") {
    auto sets = parse_sets(f);
    game = quadratic_game(std::move(sets), parse_vectors(f.at("targets"), "game.targets"));
  } else if (name == "linear") {
    auto sets = parse_sets(f);
    auto slopes = parse_vectors(f.at("slopes"), "game.slopes");
    game = linear_game(std::move(sets), std::move(slopes),
                       f.get_or<std::vector<double>>("offsets", {}));
  } else if (name == "anti_monotone") {
    game = anti_monotone_game(parse_sets(f));
  } else {
    throw validation_error("game: unknown name '" + name + "'");
  }
  f.finish();
  return game;
}

inline DelaySchedule parse_delay(const json& j, const std::string& where,
                                 const std::filesystem::path& base_dir) {
  Fields f(j, where);
  const auto kind = f.get<std::string>("kind");
  std::optional<DelaySchedule> d;
  if (kind == "constant") {
    d = DelaySchedule::constant(f.get<Round>("value"));
  } else if (kind == "power") {
    d = DelaySchedule::power(f.get_or<double>("scale", 1.0), f.get<double>("exponent"));
  } else if (kind == "geometric") {
    d = DelaySchedule::geometric(f.get<double>("mean"), f.get<double>("cap_exponent"));
  } else if (kind == "scripted") {
    const double alpha = f.get_or<double>("alpha", 0.0);
    if (f.has("values") == f.has("file"))
      throw validation_error(where + ": scripted delays need exactly one of 'values' or 'file'");
    if (f.has("values")) {
      d = DelaySchedule::scripted(f.get<std::vector<Round>>("values"), alpha);
    } else {
      std::filesystem::path path = f.get<std::string>("file");
      if (path.is_relative()) path = base_dir / path;
      d = DelaySchedule::from_file(path.string(), alpha);
    }
  } else {
    throw validation_error(where + ": unknown delay kind '" + kind + "'");
  }
  f.finish();
  return *d;
}

// Player entries override the shared "defaults" table key by key.
inline json merged(const json& defaults, const json& player) {
  json out = defaults.is_null() ? json::object() : defaults;
  if (player.is_null()) return out;
  if (!player.is_object()) throw validation_error("player entries must be tables");
  for (auto it = player.begin(); it != player.end(); ++it) {
    if (it.key() == "schedules" && out.contains("schedules") && it->is_object()) {
      for (auto s = it->begin(); s != it->end(); ++s) out["schedules"][s.key()] = *s;
    } else {
      out[it.key()] = *it;
    }
  }
  return out;
}

inline PlayerConfig parse_player(const json& j, const ActionSet& set, const std::string& where,
                                 const std::filesystem::path& base_dir, ActionSet& set_out) {
  Fields f(j, where);
  PlayerConfig p;
  set_out = set;
  if (f.has("safety")) {
    Fields s(f.at("safety"), where + ".safety");
    set_out = set.with_safety(to_vector(s.at("center"), where + ".safety.center"),
                              s.get<double>("radius"));
    s.finish();
  }
  if (f.has("delay")) p.delay = parse_delay(f.at("delay"), where + ".delay", base_dir);
  if (f.has("x1")) p.x1 = to_vector(f.at("x1"), where + ".x1");

  const double delay_alpha = p.delay.alpha();
  json sched_json = f.has("schedules") ? f.at("schedules") : json::object();
  Fields s(sched_json, where + ".schedules");
  p.schedules.alpha = s.get_or<double>("alpha", delay_alpha);
  if (!(p.schedules.alpha >= 0.0 && p.schedules.alpha < 1.0))
    throw validation_error(where + ".schedules.alpha must lie in [0, 1)");
  const auto [b, c] = default_tuning(p.schedules.alpha);
  p.schedules.b = s.get_or<double>("b", b);
  p.schedules.c = s.get_or<double>("c", c);
  p.schedules.gamma0 = s.get_or<double>("gamma0", set_out.diameter());
  p.schedules.delta0 = s.get_or<double>("delta0", 0.5 * set_out.safety_radius());
  s.finish();
  f.finish();
  return p;
}

}  // namespace config_detail

/// Builds and validates an experiment from its JSON form. Relative file
/// paths (scripted delays) resolve against `base_dir`.
inline ExperimentConfig parse_config(const nlohmann::json& j,
                                     const std::filesystem::path& base_dir = ".") {
  using namespace config_detail;
  Fields f(j, "config");
  ExperimentConfig cfg;
  cfg.game = parse_game(f.at("game"));
  cfg.horizon = f.get<Round>("horizon");
  cfg.seeds = f.get_or<std::vector<std::uint64_t>>("seeds", {0});
  cfg.shared_delay = f.get_or<bool>("shared_delay", false);

  const json defaults = f.has("defaults") ? f.at("defaults") : json::object();
  json players = f.has("players") ? f.at("players") : json();
  if (!players.is_null() && (!players.is_array() || players.size() != cfg.game.players())) {
    throw validation_error("config.players: expected one entry per player (" +
                           std::to_string(cfg.game.players()) + ")");
  }
  for (std::size_t i = 0; i < cfg.game.players(); ++i) {
    const json entry = merged(defaults, players.is_null() ? json() : players[i]);
    ActionSet resolved = cfg.game.action_sets[i];
    cfg.players.push_back(parse_player(entry, cfg.game.action_sets[i],
                                       "players[" + std::to_string(i) + "]", base_dir, resolved));
    cfg.game.action_sets[i] = std::move(resolved);
  }

  if (f.has("outputs")) {
    Fields o(f.at("outputs"), "config.outputs");
    cfg.outputs.trace_path = o.get_or<std::string>("trace_path", "");
    cfg.outputs.metrics_path = o.get_or<std::string>("metrics_path", "");
    cfg.outputs.thin = o.get_or<Round>("thin", 1);
    o.finish();
  }
  f.finish();
  validate_config(cfg);
  return cfg;
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open config: " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw validation_error(path + ": " + e.what());
  }
}

inline ExperimentConfig load_config(const std::string& path) {
  return parse_config(read_json_file(path), std::filesystem::path(path).parent_path());
}

}  // namespace gold
