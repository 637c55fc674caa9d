#pragma once
// Solver-neutral mixed-integer linear programs (always minimisation), the
// bundled LP/branch-and-bound solver, and the LP-format / solution-file
// exchange formats used to hand problems to external solvers.

#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace odpd::milp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct VarId {
  int value = -1;
  auto operator<=>(const VarId&) const = default;
};

enum class VarKind { kBinary, kInteger, kContinuous };

struct VarSpec {
  std::string name;
  VarKind kind = VarKind::kContinuous;
  double lower = 0.0;
  double upper = kInf;
};

enum class Sense { kLessEqual, kEqual, kGreaterEqual };

struct Term {
  VarId var;
  double coef = 0.0;
};

struct LinearConstraint {
  std::string name;
  std::vector<Term> terms;  // sorted by VarId, no duplicates, no zeros
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
};

class MalformedProblem : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class MilpProblem {
 public:
  VarId add_variable(VarSpec spec);
  VarId add_binary(std::string name);
  VarId add_integer(std::string name, double lower, double upper);
  VarId add_continuous(std::string name, double lower = 0.0, double upper = kInf);

  // Duplicate variables are merged and zero coefficients dropped.
  void add_constraint(std::string name, std::vector<Term> terms, Sense sense, double rhs);

  void set_objective(VarId var, double coef);
  void add_objective(VarId var, double coef);

  int num_variables() const { return static_cast<int>(variables_.size()); }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }
  const std::vector<VarSpec>& variables() const { return variables_; }
  const VarSpec& variable(VarId id) const { return variables_.at(id.value); }
  const std::vector<LinearConstraint>& constraints() const { return constraints_; }
  const std::vector<double>& objective() const { return objective_; }
  double objective_coef(VarId id) const { return objective_.at(id.value); }
  bool has_integers() const;

  // Throws MalformedProblem when any reference or bound is inconsistent.
  void validate() const;

  // Objective value of a full assignment.
  double objective_value(std::span<const double> values) const;
  // Largest violation of any constraint or bound; integrality ignored.
  double max_violation(std::span<const double> values) const;

 private:
  void check_var(VarId id) const;

  std::vector<VarSpec> variables_;
  std::vector<LinearConstraint> constraints_;
  std::vector<double> objective_;
};

enum class Status { kOptimal, kInfeasible, kUnbounded, kGapLimit, kIterLimit };

std::string_view status_name(Status status);

struct MilpSolution {
  Status status = Status::kIterLimit;
  std::vector<double> values;  // empty when no solution is available
  double objective_value = kInf;
  double proven_bound = -kInf;
  std::int64_t nodes = 0;
  std::int64_t lp_iterations = 0;

  bool has_values() const { return !values.empty(); }
  double value(VarId id) const { return values.at(id.value); }
};

struct LpOptions {
  std::int64_t max_iterations = 0;  // 0 picks a size-based default
};

// Solves the continuous relaxation (integrality ignored).
MilpSolution solve_lp(const MilpProblem& problem, const LpOptions& options = {});

// Same as solve_lp with per-variable bound overrides; used by branch and bound.
MilpSolution solve_lp(const MilpProblem& problem, std::span<const double> lower,
                      std::span<const double> upper, const LpOptions& options = {});

struct BnbConfig {
  double gap_tol = 1e-6;            // absolute objective gap
  std::int64_t max_nodes = 5'000'000;
  double time_limit_seconds = kInf;
  std::int64_t restart_interval = 1000;  // best-bound jump every N nodes
};

MilpSolution solve_bnb(const MilpProblem& problem, const BnbConfig& config = {});

// CPLEX LP text. Variable names are sanitised to [A-Za-z0-9_].
std::string write_lp_format(const MilpProblem& problem);

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

// Reads the subset of the LP format produced by write_lp_format.
MilpProblem parse_lp_format(std::string_view text);

// Whitespace separated "name value" lines; blank lines and '#' comments skipped.
std::map<std::string, double> read_solution_file(std::string_view text);

// Maps named values onto the problem's variables (missing names become 0).
// Throws std::invalid_argument for names the problem does not declare.
std::vector<double> bind_solution(const MilpProblem& problem,
                                  const std::map<std::string, double>& named);

std::string sanitize_name(std::string_view name);

// The unique sanitised names write_lp_format uses, in declaration order.
std::vector<std::string> exported_names(const MilpProblem& problem);

}  // namespace odpd::milp
