#pragma once

#include <stdexcept>
#include <string>

namespace torsionlab {

/// Coarse classification of failures. The CLI maps these onto exit codes.
enum class ErrorKind {
  input,         // malformed or inconsistent user data
  numeric,       // a computation could not be carried out reliably
  ambiguity,     // an eigenvalue sits too close to a classification cutoff
  inconsistent,  // two independent estimators disagree
  degenerate,    // a basis or map that must be invertible is not
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::input: return "input";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::ambiguity: return "ambiguity";
    case ErrorKind::inconsistent: return "inconsistent";
    case ErrorKind::degenerate: return "degenerate";
  }
  return "unknown";
}

}  // namespace torsionlab
