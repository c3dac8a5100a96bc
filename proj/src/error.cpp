#include "gvb/error.hpp"

namespace gvb {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_parameters: return "invalid-parameters";
    case ErrorKind::invalid_graph: return "invalid-graph";
    case ErrorKind::parse_error: return "parse-error";
    case ErrorKind::unsupported_configuration: return "unsupported-configuration";
    case ErrorKind::domain_error: return "domain-error";
    case ErrorKind::no_convergence: return "no-convergence";
    case ErrorKind::numeric_failure: return "numeric-failure";
    case ErrorKind::size_limit: return "size-limit";
  }
  return "unknown";
}

}  // namespace gvb
