#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gold/common.hpp"

namespace gold {

namespace delay {

struct Constant {
  Round value;
};

/// d_t = floor(scale * t^exponent).
struct Power {
  double scale;
  double exponent;
};

/// Geometric draw (number of failures) with the given mean, clamped to
/// floor(t^cap_exponent) so the certified growth exponent holds pathwise.
struct Geometric {
  double mean;
  double cap_exponent;
};

/// Replays a fixed sequence; d_t = values[t - 1].
struct Scripted {
  std::vector<Round> values;
  double certified_alpha = 0.0;
};

}  // namespace delay

namespace detail {

// floor(x) that tolerates pow() landing a hair below an exact integer,
// e.g. pow(8, 1/3) = 1.9999999999999998.
inline Round robust_floor(double x) {
  return static_cast<Round>(std::floor(x * (1.0 + 1e-12) + 1e-12));
}

}  // namespace detail

/// Generator of the delay sequence d_t: the reward of round t is delivered
/// at round t + d_t.
class DelaySchedule {
 public:
  using Kind = std::variant<delay::Constant, delay::Power, delay::Geometric, delay::Scripted>;

  static DelaySchedule constant(Round value) {
    if (value < 0) throw validation_error("constant delay must be >= 0");
    return DelaySchedule(delay::Constant{value});
  }

  static DelaySchedule power(double scale, double exponent) {
    if (!(scale >= 0.0)) throw validation_error("power delay scale must be >= 0");
    check_alpha(exponent);
    return DelaySchedule(delay::Power{scale, exponent});
  }

  static DelaySchedule geometric(double mean, double cap_exponent) {
    if (!(mean > 0.0)) throw validation_error("geometric delay mean must be > 0");
    check_alpha(cap_exponent);
    return DelaySchedule(delay::Geometric{mean, cap_exponent});
  }

  static DelaySchedule scripted(std::vector<Round> values, double certified_alpha = 0.0) {
    for (Round v : values) {
      if (v < 0) throw validation_error("scripted delays must be >= 0");
    }
    check_alpha(certified_alpha);
    return DelaySchedule(delay::Scripted{std::move(values), certified_alpha});
  }

  /// One non-negative integer per line; blank lines are skipped.
  static DelaySchedule from_file(const std::string& path, double certified_alpha = 0.0) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open delay file: " + path);
    std::vector<Round> values;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      std::istringstream ls(line);
      Round v = 0;
      std::string rest;
      if (!(ls >> v) || (ls >> rest)) {
        throw validation_error(path + ":" + std::to_string(lineno) + ": expected one integer");
      }
      values.push_back(v);
    }
    return scripted(std::move(values), certified_alpha);
  }

  const Kind& kind() const noexcept { return kind_; }

  /// The growth exponent alpha with d_t = O(t^alpha) this schedule certifies.
  double alpha() const {
    return std::visit(
        [](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, delay::Constant>) return 0.0;
          else if constexpr (std::is_same_v<K, delay::Power>) return k.exponent;
          else if constexpr (std::is_same_v<K, delay::Geometric>) return k.cap_exponent;
          else return k.certified_alpha;
        },
        kind_);
  }

  /// d_t for round t >= 1. Only the geometric kind draws from rng.
  Round delay_at(Round t, Rng& rng) const {
    if (t < 1) throw runtime_error("delay_at: round must be >= 1");
    return std::visit(
        [&](const auto& k) -> Round {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, delay::Constant>) {
            return k.value;
          } else if constexpr (std::is_same_v<K, delay::Power>) {
            return detail::robust_floor(k.scale * std::pow(static_cast<double>(t), k.exponent));
          } else if constexpr (std::is_same_v<K, delay::Geometric>) {
            std::geometric_distribution<Round> draw(1.0 / (1.0 + k.mean));
            const Round cap =
                detail::robust_floor(std::pow(static_cast<double>(t), k.cap_exponent));
            return std::min(draw(rng), cap);
          } else {
            if (t > static_cast<Round>(k.values.size())) {
              throw runtime_error("delay schedule exhausted at t=" + std::to_string(t));
            }
            return k.values[static_cast<std::size_t>(t - 1)];
          }
        },
        kind_);
  }

 private:
  explicit DelaySchedule(Kind kind) : kind_(std::move(kind)) {}

  static void check_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha < 1.0)) {
      throw validation_error("delay exponent must lie in [0, 1), got " + std::to_string(alpha));
    }
  }

  Kind kind_;
};

inline Round delay_at(const DelaySchedule& sched, Round t, Rng& rng) {
  return sched.delay_at(t, rng);
}

inline constexpr Round arrival_round(Round t, Round d) noexcept { return t + d; }

}  // namespace gold
