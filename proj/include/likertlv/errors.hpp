#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace likertlv {

/// Malformed or inconsistent input (bad data file, invalid parameters).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An estimator could not produce a result for otherwise valid input.
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-fatal messages collected while estimating.
using Warnings = std::vector<std::string>;

}  // namespace likertlv
