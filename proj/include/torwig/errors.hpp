#pragma once
// Error taxonomy shared by every module. The CLI maps each class onto an
// exit code: configuration problems -> 2, violated preconditions -> 3,
// failed numerical assertions -> 1.

#include <stdexcept>
#include <string>

namespace torwig {

// Malformed input: bad grid sizes, unparsable configuration, bad keys.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// An operation was called outside its domain (inadmissible hbar, wrong
// time sign, truncation too large, ...).
class PreconditionError : public std::domain_error {
 public:
  explicit PreconditionError(const std::string& what) : std::domain_error(what) {}
};

// A computed quantity failed a stated invariant or did not converge.
class InvariantViolation : public std::runtime_error {
 public:
  explicit InvariantViolation(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace torwig
