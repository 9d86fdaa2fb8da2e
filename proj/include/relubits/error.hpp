#pragma once

#include <stdexcept>
#include <string>

namespace relubits {

/// Failure categories shared by every module. The numeric values are
/// mirrored by `rb_status` in the C API.
enum class Status : int {
  ok = 0,
  shape = 1,         // dimension or length mismatch
  label = 2,         // label out of range or too few classes
  data = 3,          // empty or non-finite data
  config = 4,        // invalid attack / trainer configuration
  index = 5,         // column index out of range or duplicated
  range = 6,         // matrix entries outside the admissible interval
  degenerate = 7,    // zero-norm rows, zero variance
  convergence = 8,   // iterative solver did not converge
  multiplicity = 9,  // graph is disconnected where connectivity is required
  parameter = 10,    // k, l, layer, ... outside the admissible range
  io = 11,           // unreadable / malformed file
  evaluation = 12,   // cluster count does not match class count
  contract = 13,     // internal precondition broken by a caller
  metric = 14,       // evaluation metric undefined for the input
};

const char* status_name(Status s) noexcept;

/// Process exit code for a status: 0 success, 1 usage, 2 data/contract,
/// 3 numerical non-convergence.
int exit_code(Status s) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Status status, const std::string& what)
      : std::runtime_error(what), status_(status) {}

  Status status() const noexcept { return status_; }

 private:
  Status status_;
};

[[noreturn]] inline void fail(Status s, const std::string& what) {
  throw Error(s, what);
}

inline void require(bool cond, Status s, const std::string& what) {
  if (!cond) fail(s, what);
}

}  // namespace relubits
