#include "ravenforge/error.hpp"

namespace ravenforge {

std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::InfeasibleRegime: return "InfeasibleRegime";
    case ErrorKind::DomainOverflow: return "DomainOverflow";
    case ErrorKind::EmptyResult: return "EmptyResult";
    case ErrorKind::GenerationRetryExhausted: return "GenerationRetryExhausted";
    case ErrorKind::CannotDiversify: return "CannotDiversify";
    case ErrorKind::Inconsistent: return "Inconsistent";
    case ErrorKind::Ambiguous: return "Ambiguous";
    case ErrorKind::Unsolvable: return "Unsolvable";
    case ErrorKind::UnknownSlot: return "UnknownSlot";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::CorruptArchive: return "CorruptArchive";
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
    case ErrorKind::BadTotal: return "BadTotal";
  }
  return "Error";
}

}  // namespace ravenforge
