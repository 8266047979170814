#pragma once

#include <stdexcept>
#include <string>

namespace lpt {

// Malformed or unresolvable input (files, specs, parse failures).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An operation was called outside its domain (dimension mismatch, p out of
// range, zero test function, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw PreconditionError(what);
}

}  // namespace lpt
