#pragma once

#include <stdexcept>
#include <string>

namespace mmqkd {

// Argument outside the mathematical domain of a function (probability not in [0,1], ...).
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Zero counts where a finite statistic needs at least one round.
class degenerate_input : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed or out-of-range configuration (maps to CLI exit code 2).
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failure: eigen-solver, non-finite intermediate (CLI exit code 3).
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mmqkd
