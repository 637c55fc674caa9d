#include <algorithm>
#include <cmath>

#include "odpd/milp.hpp"

namespace odpd::milp {

VarId MilpProblem::add_variable(VarSpec spec) {
  if (spec.kind == VarKind::kBinary) {
    spec.lower = std::max(spec.lower, 0.0);
    spec.upper = std::min(spec.upper, 1.0);
  }
  if (std::isnan(spec.lower) || std::isnan(spec.upper) || spec.lower > spec.upper) {
    throw MalformedProblem("variable " + spec.name + " has inconsistent bounds");
  }
  variables_.push_back(std::move(spec));
  objective_.push_back(0.0);
  return VarId{static_cast<int>(variables_.size()) - 1};
}

VarId MilpProblem::add_binary(std::string name) {
  return add_variable({std::move(name), VarKind::kBinary, 0.0, 1.0});
}

VarId MilpProblem::add_integer(std::string name, double lower, double upper) {
  return add_variable({std::move(name), VarKind::kInteger, lower, upper});
}

VarId MilpProblem::add_continuous(std::string name, double lower, double upper) {
  return add_variable({std::move(name), VarKind::kContinuous, lower, upper});
}

void MilpProblem::check_var(VarId id) const {
  if (id.value < 0 || id.value >= num_variables()) {
    throw MalformedProblem("undeclared variable id " + std::to_string(id.value));
  }
}

void MilpProblem::add_constraint(std::string name, std::vector<Term> terms, Sense sense,
                                 double rhs) {
  for (const Term& term : terms) check_var(term.var);
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return a.var < b.var; });
  std::vector<Term> merged;
  for (const Term& term : terms) {
    if (!merged.empty() && merged.back().var == term.var) {
      merged.back().coef += term.coef;
    } else {
      merged.push_back(term);
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
  if (!std::isfinite(rhs)) throw MalformedProblem("constraint " + name + " has non-finite rhs");
  constraints_.push_back({std::move(name), std::move(merged), sense, rhs});
}

void MilpProblem::set_objective(VarId var, double coef) {
  check_var(var);
  objective_[var.value] = coef;
}

void MilpProblem::add_objective(VarId var, double coef) {
  check_var(var);
  objective_[var.value] += coef;
}

bool MilpProblem::has_integers() const {
  return std::any_of(variables_.begin(), variables_.end(),
                     [](const VarSpec& v) { return v.kind != VarKind::kContinuous; });
}

void MilpProblem::validate() const {
  for (const VarSpec& v : variables_) {
    if (v.lower > v.upper) throw MalformedProblem("variable " + v.name + " has lower > upper");
  }
  for (const LinearConstraint& c : constraints_) {
    for (const Term& t : c.terms) {
      check_var(t.var);
      if (!std::isfinite(t.coef)) {
        throw MalformedProblem("constraint " + c.name + " has a non-finite coefficient");
      }
    }
  }
  for (double c : objective_) {
    if (!std::isfinite(c)) throw MalformedProblem("objective has a non-finite coefficient");
  }
}

double MilpProblem::objective_value(std::span<const double> values) const {
  double total = 0.0;
  for (int j = 0; j < num_variables(); ++j) {
    if (objective_[j] != 0.0) total += objective_[j] * values[j];
  }
  return total;
}

double MilpProblem::max_violation(std::span<const double> values) const {
  double worst = 0.0;
  for (int j = 0; j < num_variables(); ++j) {
    worst = std::max(worst, variables_[j].lower - values[j]);
    worst = std::max(worst, values[j] - variables_[j].upper);
  }
  for (const LinearConstraint& c : constraints_) {
    double lhs = 0.0;
    for (const Term& t : c.terms) lhs += t.coef * values[t.var.value];
    switch (c.sense) {
      case Sense::kLessEqual:
        worst = std::max(worst, lhs - c.rhs);
        break;
      case Sense::kGreaterEqual:
        worst = std::max(worst, c.rhs - lhs);
        break;
      case Sense::kEqual:
        worst = std::max(worst, std::fabs(lhs - c.rhs));
        break;
    }
  }
  return worst;
}

std::string_view status_name(Status status) {
  switch (status) {
    case Status::kOptimal:
      return "Optimal";
    case Status::kInfeasible:
      return "Infeasible";
    case Status::kUnbounded:
      return "Unbounded";
    case Status::kGapLimit:
      return "GapLimit";
    case Status::kIterLimit:
      return "IterLimit";
  }
  return "Unknown";
}

}  // namespace odpd::milp
