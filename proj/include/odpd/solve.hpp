#pragma once
// One entry point over the three solution methods, with outcomes mapped onto
// the command-line exit codes.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "odpd/lshaped.hpp"
#include "odpd/milp.hpp"
#include "odpd/model.hpp"
#include "odpd/oracle.hpp"

namespace odpd {

enum class Method { kExtensive, kLShaped, kOracle };

std::string_view method_name(Method m);
Method parse_method(std::string_view name);  // throws std::invalid_argument

enum class Outcome { kSolved, kInfeasible, kRefused, kBudgetExhausted };

std::string_view outcome_name(Outcome o);

struct SolveOptions {
  Method method = Method::kExtensive;
  double gap_tol = 1e-6;
  double time_limit_seconds = milp::kInf;
  long long max_nodes = 5'000'000;
  double epsilon = 0.001;
  int max_iterations = 50;
  oracle::OracleLimits oracle_limits;
};

struct SolveResult {
  Method method = Method::kExtensive;
  Outcome outcome = Outcome::kSolved;
  std::string message;
  bool has_solution = false;
  FirstStagePlan plan;
  std::vector<ScenarioRecourse> recourse;
  PaymentBreakdown breakdown;
  double objective = 0.0;  // solver-reported objective
  double wall_seconds = 0.0;
  long long nodes = 0;
  int iterations = 0;
  std::vector<lshaped::IterationRecord> trace;
};

// Solver limits and refusals are reported in the outcome; malformed
// instances still throw.
SolveResult solve(const Instance& inst, const SolveOptions& options);

// 0 solved, 1 infeasible or refused, 3 budget exhausted.
int exit_code(Outcome o);

}  // namespace odpd
