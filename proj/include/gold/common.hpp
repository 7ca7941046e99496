#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace gold {

using Vector = Eigen::VectorXd;

/// One action per player.
using Profile = std::vector<Vector>;

using Round = std::int64_t;

/// Random stream used throughout the library. Every stochastic component
/// takes one by reference; runs derive independent streams from a seed.
using Rng = std::mt19937_64;

// Validation errors come from bad inputs and map to CLI exit code 2.
// Runtime errors arise while a valid experiment executes and map to 1.
enum class ErrorKind { Validation, Runtime };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error validation_error(const std::string& what) {
  return Error(ErrorKind::Validation, what);
}

inline Error runtime_error(const std::string& what) {
  return Error(ErrorKind::Runtime, what);
}

}  // namespace gold
