#include "fpr/error.hpp"

namespace fpr {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::io: return "io";
    case ErrorKind::schema: return "schema";
    case ErrorKind::topology: return "topology";
    case ErrorKind::catalog: return "catalog";
    case ErrorKind::contract: return "contract";
    case ErrorKind::unplannable: return "unplannable";
    case ErrorKind::infeasible: return "infeasible";
    case ErrorKind::numerical: return "numerical";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace fpr
