#include "odpd/solve.hpp"

#include <chrono>
#include <stdexcept>

#include "odpd/formulation.hpp"

namespace odpd {
namespace {

using Clock = std::chrono::steady_clock;

milp::BnbConfig bnb_config(const SolveOptions& o) {
  milp::BnbConfig c;
  c.gap_tol = o.gap_tol;
  c.time_limit_seconds = o.time_limit_seconds;
  c.max_nodes = o.max_nodes;
  return c;
}

void solve_extensive(const Instance& inst, const SolveOptions& o, SolveResult& r) {
  BuiltProblem built = build_extensive(inst, BigMPolicy::defaults(inst));
  const milp::MilpSolution sol = milp::solve_bnb(built.problem, bnb_config(o));
  r.nodes = sol.nodes;
  switch (sol.status) {
    case milp::Status::kOptimal:
      r.outcome = Outcome::kSolved;
      break;
    case milp::Status::kInfeasible:
    case milp::Status::kUnbounded:
      r.outcome = Outcome::kInfeasible;
      r.message = std::string(milp::status_name(sol.status));
      return;
    case milp::Status::kGapLimit:
    case milp::Status::kIterLimit:
      r.outcome = Outcome::kBudgetExhausted;
      r.message = "solver limit reached (" + std::string(milp::status_name(sol.status)) + ")";
      break;
  }
  if (!sol.has_values()) return;
  DecodedSolution dec = decode(sol, built.index, inst);
  r.plan = *dec.plan;
  for (auto& [w, rec] : dec.recourse) r.recourse.push_back(std::move(rec));
  r.objective = sol.objective_value;
  r.has_solution = true;
}

void solve_lshaped(const Instance& inst, const SolveOptions& o, SolveResult& r) {
  lshaped::LShapedConfig config;
  config.epsilon = o.epsilon;
  config.max_iterations = o.max_iterations;
  config.master_solver = bnb_config(o);
  config.subproblem_solver = bnb_config(o);
  lshaped::LShapedResult res;
  try {
    res = lshaped::run(inst, config);
  } catch (const lshaped::RefusedInstance& e) {
    r.outcome = Outcome::kRefused;
    r.message = e.what();
    return;
  }
  r.outcome = res.converged ? Outcome::kSolved : Outcome::kBudgetExhausted;
  if (!res.converged) r.message = "iteration limit reached; best-H iterate returned";
  r.plan = res.best.plan;
  r.recourse = res.best.recourse;
  r.objective = res.best.total();
  r.iterations = static_cast<int>(res.trace.size());
  r.trace = std::move(res.trace);
  r.has_solution = true;
}

void solve_oracle(const Instance& inst, const SolveOptions& o, SolveResult& r) {
  try {
    oracle::OracleResult res = oracle::enumerate_optimal(inst, o.oracle_limits);
    r.plan = std::move(res.plan);
    r.recourse = std::move(res.recourse);
    r.objective = res.optimal_total;
    r.nodes = res.enumeration_count;
    r.has_solution = true;
    r.outcome = Outcome::kSolved;
  } catch (const oracle::BudgetExceeded& e) {
    r.outcome = Outcome::kBudgetExhausted;
    r.message = e.what();
  } catch (const oracle::NoFeasiblePlan& e) {
    r.outcome = Outcome::kInfeasible;
    r.message = e.what();
  }
}

}  // namespace

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kExtensive:
      return "extensive";
    case Method::kLShaped:
      return "lshaped";
    case Method::kOracle:
      return "oracle";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  if (name == "extensive") return Method::kExtensive;
  if (name == "lshaped") return Method::kLShaped;
  if (name == "oracle") return Method::kOracle;
  throw std::invalid_argument("unknown method \"" + std::string(name) + "\"");
}

std::string_view outcome_name(Outcome o) {
  switch (o) {
    case Outcome::kSolved:
      return "solved";
    case Outcome::kInfeasible:
      return "infeasible";
    case Outcome::kRefused:
      return "refused";
    case Outcome::kBudgetExhausted:
      return "budget_exhausted";
  }
  return "?";
}

SolveResult solve(const Instance& inst, const SolveOptions& options) {
  const auto start = Clock::now();
  SolveResult r;
  r.method = options.method;
  switch (options.method) {
    case Method::kExtensive:
      solve_extensive(inst, options, r);
      break;
    case Method::kLShaped:
      solve_lshaped(inst, options, r);
      break;
    case Method::kOracle:
      solve_oracle(inst, options, r);
      break;
  }
  if (r.has_solution) r.breakdown = evaluate(r.plan, r.recourse, inst);
  r.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return r;
}

int exit_code(Outcome o) {
  switch (o) {
    case Outcome::kSolved:
      return 0;
    case Outcome::kInfeasible:
    case Outcome::kRefused:
      return 1;
    case Outcome::kBudgetExhausted:
      return 3;
  }
  return 1;
}

}  // namespace odpd
