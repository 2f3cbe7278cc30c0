#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ravenforge {

enum class ErrorKind {
  InfeasibleRegime,
  DomainOverflow,
  EmptyResult,
  GenerationRetryExhausted,
  CannotDiversify,
  Inconsistent,
  Ambiguous,
  Unsolvable,
  UnknownSlot,
  IoFailure,
  CorruptArchive,
  SchemaMismatch,
  BadTotal,
};

std::string_view to_string(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ravenforge
