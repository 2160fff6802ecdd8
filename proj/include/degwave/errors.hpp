#pragma once

#include <stdexcept>
#include <string>

namespace degwave {

/// Process exit codes shared by the CLI and the error hierarchy.
enum class ExitCode : int {
  ok = 0,
  usage = 1,
  hypothesis = 2,
  inadmissible_lambda = 3,
  numerical = 4,
};

/// Base error; carries the exit category so main() can map refusals
/// without string matching.  Messages name the violated condition with
/// both sides' values wherever there is an inequality to report.
class Error : public std::runtime_error {
public:
  Error(ExitCode code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  ExitCode code() const noexcept { return code_; }

private:
  ExitCode code_;
};

/// Coefficient data violates a structural requirement (a(0) != 0, negative
/// values, non-finite samples, ...).
struct InvalidCoefficientError : Error {
  explicit InvalidCoefficientError(const std::string& msg) : Error(ExitCode::hypothesis, msg) {}
};

/// b/a (or another required integral) fails to converge.
struct IntegrabilityError : Error {
  explicit IntegrabilityError(const std::string& msg) : Error(ExitCode::hypothesis, msg) {}
};

/// A standing hypothesis needed by the requested operation is violated.
struct HypothesisError : Error {
  explicit HypothesisError(const std::string& msg) : Error(ExitCode::hypothesis, msg) {}
};

/// The zeroth-order coupling constant lies outside the admissible range.
struct InadmissibleLambdaError : Error {
  explicit InadmissibleLambdaError(const std::string& msg) : Error(ExitCode::inadmissible_lambda, msg) {}
};

/// Linear algebra / iteration failure (indefinite pencil, stalled inverse
/// iteration, non-finite element integral, ...).
struct NumericalError : Error {
  explicit NumericalError(const std::string& msg) : Error(ExitCode::numerical, msg) {}
};

/// Bad command line, config file, or user-supplied data.
struct UsageError : Error {
  explicit UsageError(const std::string& msg) : Error(ExitCode::usage, msg) {}
};

}  // namespace degwave
