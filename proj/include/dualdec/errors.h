#ifndef DUALDEC_ERRORS_H_
#define DUALDEC_ERRORS_H_

#include <stdexcept>
#include <string>

namespace dualdec {

// Failure categories. The CLI maps them onto process exit codes.
enum class ErrorKind {
  kInvalidArgument,
  kDimensionMismatch,
  kConfig,
  kAssumptionViolation,
  kOracleFailure,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised when a local subproblem has no finite minimizer or a numeric solve
// does not converge. Carries the offending agent (and step, when known).
class OracleFailure : public Error {
 public:
  OracleFailure(int agent, const std::string& what)
      : Error(ErrorKind::kOracleFailure, what), agent_(agent) {}
  int agent() const { return agent_; }
  long step() const { return step_; }
  void set_step(long step) { step_ = step; }

 private:
  int agent_;
  long step_ = -1;
};

[[noreturn]] inline void Fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void Require(bool cond, const std::string& what) {
  if (!cond) Fail(ErrorKind::kInvalidArgument, what);
}

inline void RequireDims(bool cond, const std::string& what) {
  if (!cond) Fail(ErrorKind::kDimensionMismatch, what);
}

}  // namespace dualdec

#endif  // DUALDEC_ERRORS_H_
