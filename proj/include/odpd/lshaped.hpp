#pragma once
// L-shaped decomposition: a first-stage master over (X, W, theta) and one
// recourse subproblem per demand scenario, linked by optimality cuts built
// from the subproblem solutions.

#include <iosfwd>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "odpd/formulation.hpp"
#include "odpd/milp.hpp"
#include "odpd/model.hpp"

namespace odpd::lshaped {

class LShapedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised before the first iteration when the instance has no carrier, since
// subproblems are then not guaranteed feasible.
class RefusedInstance : public LShapedError {
 public:
  using LShapedError::LShapedError;
};

double compute_P(const Instance& inst, int scenario, const ScenarioRecourse& rec);
// Interior arcs are counted from both endpoints.
double compute_M(const Instance& inst, int scenario, const ScenarioRecourse& rec);
double compute_J(const Instance& inst, int scenario);
double compute_I(const Instance& inst, int customer, int truck, int scenario,
                 const ScenarioRecourse& rec);

struct ScenarioTerms {
  double J = 0.0;
  double P = 0.0;
  double M = 0.0;
  Grid<double> I;  // customers x trucks
};

ScenarioTerms scenario_terms(const Instance& inst, int scenario, const ScenarioRecourse& rec);
OptimalityCut assemble_cut(const std::vector<ScenarioTerms>& terms);

struct LShapedConfig {
  double epsilon = 0.001;
  int max_iterations = 50;
  milp::BnbConfig master_solver;
  milp::BnbConfig subproblem_solver;
  std::optional<BigMPolicy> big_m;  // defaults from the instance when absent
};

inline constexpr double kNoTheta = -std::numeric_limits<double>::infinity();

struct IterationRecord {
  int k = 0;
  double theta_bar = kNoTheta;
  double B = 0.0;
  double H = 0.0;
  int N = 0;
  FirstStagePlan plan;
  OptimalityCut cut;
  std::vector<double> h;  // subproblem objective per scenario
  std::vector<ScenarioRecourse> recourse;
  double master_objective = 0.0;
  double assignment_term = 0.0;  // sum of X
  double wall_seconds = 0.0;     // this iteration only

  double total() const { return H + assignment_term; }
};

struct LShapedResult {
  IterationRecord best;
  std::vector<IterationRecord> trace;
  bool converged = false;  // false when max_iterations was reached
  double wall_seconds = 0.0;
};

LShapedResult run(const Instance& inst, const LShapedConfig& config = {});

// One JSON object per line: k, theta_bar (null for the first iteration), B, H,
// N, wall_seconds.
void write_trace(std::ostream& out, const std::vector<IterationRecord>& trace);

}  // namespace odpd::lshaped
