#include "jaqm/errors.hpp"

#include <sstream>

namespace jaqm {

const char* clause_label(AssumptionClause clause) noexcept {
  switch (clause) {
    case AssumptionClause::drift_piecewise_lipschitz:
      return "(i)";
    case AssumptionClause::diffusion_lipschitz_nonzero:
      return "(ii)";
    case AssumptionClause::jump_lipschitz:
      return "(iii)";
    case AssumptionClause::piece_derivatives:
      return "(iv)";
  }
  return "(?)";
}

namespace {

std::string violation_message(AssumptionClause clause, double where, const std::string& what) {
  std::ostringstream os;
  os.precision(17);
  os << "assumption clause " << clause_label(clause) << " violated at x = " << where << ": " << what;
  return os.str();
}

std::string overflow_message(std::size_t step, double time, double state) {
  std::ostringstream os;
  os.precision(17);
  os << "scheme state became non-finite (" << state << ") at step " << step << ", t = " << time;
  return os.str();
}

}  // namespace

AssumptionViolation::AssumptionViolation(AssumptionClause clause, double where, const std::string& what)
    : std::runtime_error(violation_message(clause, where, what)), clause_(clause), where_(where) {}

SchemeOverflow::SchemeOverflow(std::size_t step, double time, double state)
    : NumericError(overflow_message(step, time, state)), step_(step), time_(time) {}

}  // namespace jaqm
