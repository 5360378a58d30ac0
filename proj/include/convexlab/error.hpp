#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace convexlab {

enum class Errc {
  duplicate_element,
  overflow_risk,
  order_too_high,
  profile_violation,
  repair_failure,
  budget_exceeded,
  overflow,
  empty_range,
  non_convergence,
  degenerate_input,
  stuck,
  config,
};

constexpr std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::duplicate_element: return "duplicate-element";
    case Errc::overflow_risk: return "overflow-risk";
    case Errc::order_too_high: return "order-too-high";
    case Errc::profile_violation: return "profile-violation";
    case Errc::repair_failure: return "repair-failure";
    case Errc::budget_exceeded: return "budget-exceeded";
    case Errc::overflow: return "overflow";
    case Errc::empty_range: return "empty-range";
    case Errc::non_convergence: return "non-convergence";
    case Errc::degenerate_input: return "degenerate-input";
    case Errc::stuck: return "stuck";
    case Errc::config: return "config";
  }
  return "unknown";
}

// Every failure raised by the library carries one of the codes above so
// callers (the verifier, the CLI) can turn it into a skip marker or an
// exit code without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Power iteration gave up; keeps the last estimate for diagnostics.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(double last_estimate, double gap, int iterations)
      : Error(Errc::non_convergence,
              "power iteration did not converge after " +
                  std::to_string(iterations) + " iterations (last estimate " +
                  std::to_string(last_estimate) + ", relative gap " +
                  std::to_string(gap) + ")"),
        last_estimate_(last_estimate),
        gap_(gap) {}

  double last_estimate() const noexcept { return last_estimate_; }
  double gap() const noexcept { return gap_; }

 private:
  double last_estimate_;
  double gap_;
};

}  // namespace convexlab
