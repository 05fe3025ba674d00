// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bigjump {

// Latent state of a conditional-independence model, serializable for replay.
using Latent = std::vector<double>;

// Thrown when a law is slowly varying and therefore has no boundary class.
class NoBoundaryClassError : public std::runtime_error {
 public:
  explicit NoBoundaryClassError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown for parameter combinations a constructor does not support.
class UnsupportedError : public std::runtime_error {
 public:
  explicit UnsupportedError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when a run configuration cannot be realized (bad keys, no feasible
// epsilon, empty admissible interval, ...).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace bigjump
