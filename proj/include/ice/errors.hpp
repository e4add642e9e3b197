#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ice {

enum class ErrorKind {
  InvalidArgument,
  Io,
  MissingColumn,
  EmptyTrace,
  EmptyPrefix,
  AllMissing,
  LengthMismatch,
  DegenerateSignal,
  DegenerateInput,
  DegenerateSample,
  NonBinaryLabels,
  SingleGroup,
  TooFewGroups,
  NoConvergence,
  InvalidSpec,
};

std::string_view to_string(ErrorKind kind);

// All recoverable library failures are reported as ice::Error. The one
// expected non-exceptional outcome, the clustering FAIL path, is modelled
// with std::optional at the call sites that can produce it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ice
