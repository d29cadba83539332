#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace qgame {

// Every library error carries a short stable code ("NotHermitian", "DimMismatch", ...)
// so callers and tests can dispatch without parsing prose.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

// Bad input: malformed documents, invalid constructions, violated preconditions.
// The CLI maps these to exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A verifier stage whose *construction* broke (as opposed to a conclusion check
// that legitimately failed).
class StageConstructionError : public Error {
 public:
  using Error::Error;
};

}  // namespace qgame
