#include "relubits/error.hpp"

namespace relubits {

const char* status_name(Status s) noexcept {
  switch (s) {
    case Status::ok: return "ok";
    case Status::shape: return "shape error";
    case Status::label: return "label error";
    case Status::data: return "data error";
    case Status::config: return "config error";
    case Status::index: return "index error";
    case Status::range: return "range error";
    case Status::degenerate: return "degenerate input";
    case Status::convergence: return "convergence error";
    case Status::multiplicity: return "multiplicity error";
    case Status::parameter: return "parameter error";
    case Status::io: return "I/O error";
    case Status::evaluation: return "evaluation error";
    case Status::contract: return "contract violation";
    case Status::metric: return "metric error";
  }
  return "unknown error";
}

int exit_code(Status s) noexcept {
  switch (s) {
    case Status::ok: return 0;
    case Status::parameter:
    case Status::config: return 1;
    case Status::convergence: return 3;
    default: return 2;
  }
}

}  // namespace relubits
