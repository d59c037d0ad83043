#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace singquad {

enum class ErrorKind {
  invalid_parameters,
  evaluation_failure,
  non_integrable_moment,
  stencil_degenerate,
  no_convergence,
  out_of_range,
  incompatible_weights,
  insufficient_expansion,
  usage,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_parameters: return "invalid-parameters";
    case ErrorKind::evaluation_failure: return "evaluation-failure";
    case ErrorKind::non_integrable_moment: return "non-integrable-moment";
    case ErrorKind::stencil_degenerate: return "stencil-degenerate";
    case ErrorKind::no_convergence: return "no-convergence";
    case ErrorKind::out_of_range: return "out-of-range";
    case ErrorKind::incompatible_weights: return "incompatible-weights";
    case ErrorKind::insufficient_expansion: return "insufficient-expansion";
    case ErrorKind::usage: return "usage";
  }
  return "unknown";
}

/// Base class of every error thrown by the library. The kind is stable and
/// is what callers (and the CLI exit-code mapping) should dispatch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// A lattice integrand returned a non-finite value.
class EvaluationFailure : public Error {
 public:
  EvaluationFailure(const std::string& what, std::vector<double> node)
      : Error(ErrorKind::evaluation_failure, what), node_(std::move(node)) {}

  const std::vector<double>& node() const noexcept { return node_; }

 private:
  std::vector<double> node_;
};

/// An iterative procedure (weight ladder, adaptive oracle) ran out of budget.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, double best_estimate, double gap)
      : Error(ErrorKind::no_convergence, what), best_(best_estimate), gap_(gap) {}

  double best_estimate() const noexcept { return best_; }
  double gap() const noexcept { return gap_; }

 private:
  double best_;
  double gap_;
};

/// Compact scientific rendering for diagnostics.
inline std::string format_number(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) throw Error(kind, what);
}

}  // namespace singquad
