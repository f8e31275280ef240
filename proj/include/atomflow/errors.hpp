#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace atomflow {

// Error categories. The CLI maps input/config categories to exit code 2 and
// unmet domain preconditions to exit code 3.
enum class Errc {
  invalid_argument,
  near_antipodal,
  time_singularity,
  degenerate_geometry,
  missing_atom,
  shape_mismatch,
  parse,
  empty_complex,
  no_interface,
  contract,
  config,
  io,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string msg)
      : std::runtime_error(std::move(msg)), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) {
  throw Error(code, msg);
}

inline void require(bool cond, Errc code, const std::string& msg) {
  if (!cond) fail(code, msg);
}

// True for errors that mean "valid input, unmet domain precondition".
inline bool is_domain_error(Errc c) noexcept {
  switch (c) {
    case Errc::near_antipodal:
    case Errc::time_singularity:
    case Errc::degenerate_geometry:
    case Errc::missing_atom:
    case Errc::no_interface:
      return true;
    default:
      return false;
  }
}

}  // namespace atomflow
