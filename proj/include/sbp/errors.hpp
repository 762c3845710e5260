#pragma once

#include <stdexcept>
#include <string>

namespace sbp {

// Raised when a caller passes arguments that violate an operation's
// preconditions (bad ids, weights, config values).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when external data (files, streams) cannot be parsed or is
// inconsistent with itself.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

[[noreturn]] inline void fail(const std::string& what) { throw InvalidInput(what); }

inline void require(bool condition, const char* what) {
  if (!condition) fail(what);
}

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(what);
}

}  // namespace detail
}  // namespace sbp
