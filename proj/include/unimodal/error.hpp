#pragma once

#include <stdexcept>
#include <string>

namespace unimodal {

enum class ErrorKind {
  domain,
  critical_point,
  critical_orbit,
  not_unimodal,
  no_symmetric_point,
  degenerate_split,
  degenerate,
  fold,
  argument,
  construction_failed,
  precondition,
  no_central_domain,
  inapplicable,
  internal,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised when an iterate is not monotone on the requested interval. `step` is
/// the first i for which the i-th image contains the critical point in its
/// interior, and `critical_preimage` is the point x of the source interval with
/// f^i(x) = c.
class FoldError : public Error {
 public:
  FoldError(int step, double critical_preimage);

  int step() const noexcept { return step_; }
  double critical_preimage() const noexcept { return preimage_; }

 private:
  int step_;
  double preimage_;
};

}  // namespace unimodal
