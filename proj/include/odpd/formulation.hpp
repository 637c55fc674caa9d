#pragma once
// Builds the mixed-integer programs for a delivery instance: the extensive
// form over all demand scenarios, the decomposition master problem with
// optimality cuts, and the single-scenario recourse subproblem. Solver output
// is mapped back into plans and recourse through the VariableIndex.

#include <compare>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "odpd/milp.hpp"
#include "odpd/model.hpp"

namespace odpd {

enum class VarFamily { kX, kW, kY, kV, kS, kZ, kTheta };

// Structured key of a decision variable. Customers are identified by their
// location (1..n), arcs by a pair of locations (0 is the depot).
struct VarKey {
  VarFamily family = VarFamily::kX;
  int a = 0;
  int b = 0;
  int c = 0;
  int d = 0;

  static VarKey x(int customer, int truck) { return {VarFamily::kX, customer, truck}; }
  static VarKey w(int truck) { return {VarFamily::kW, truck}; }
  static VarKey y(int customer, int carrier, int scenario) {
    return {VarFamily::kY, customer, carrier, scenario};
  }
  static VarKey v(int from, int to, int truck, int scenario) {
    return {VarFamily::kV, from, to, truck, scenario};
  }
  static VarKey s(int customer, int truck, int scenario) {
    return {VarFamily::kS, customer, truck, scenario};
  }
  static VarKey z(int truck, int sample, int scenario) {
    return {VarFamily::kZ, truck, sample, scenario};
  }
  static VarKey theta() { return {VarFamily::kTheta}; }

  auto operator<=>(const VarKey&) const = default;
};

class VariableIndex {
 public:
  void add(VarKey key, milp::VarId id);
  std::optional<milp::VarId> find(const VarKey& key) const;
  milp::VarId at(const VarKey& key) const;  // throws std::out_of_range
  const VarKey& key(milp::VarId id) const { return keys_.at(id.value); }
  int size() const { return static_cast<int>(keys_.size()); }
  std::vector<int> scenarios() const;  // scenario ids present, ascending

 private:
  std::map<VarKey, milp::VarId> ids_;
  std::vector<VarKey> keys_;
};

struct BigMPolicy {
  double delta_assignment = 0.0;  // activation constraint
  double delta_deadline = 0.0;    // late-flag forcing constraint

  // delta_assignment = n; delta_deadline = the longest conceivable route time
  // under any sample (sum of the n+1 largest off-diagonal travel times) minus
  // the deadline, clamped at >= 1.
  static BigMPolicy defaults(const Instance& inst);
};

struct OptimalityCut {
  Grid<double> coefficients;  // E, customers x trucks
  double rhs = 0.0;           // e
};

struct BuiltProblem {
  milp::MilpProblem problem;
  VariableIndex index;
};

class InvalidInstance : public std::invalid_argument {
 public:
  explicit InvalidInstance(const std::vector<std::string>& violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

BuiltProblem build_extensive(const Instance& inst, const BigMPolicy& big_m);

// With first_iteration the recourse estimate is left out entirely and no cut
// may be passed.
BuiltProblem build_master(const Instance& inst, const BigMPolicy& big_m,
                          const std::vector<OptimalityCut>& cuts, bool first_iteration);

BuiltProblem build_subproblem(const Instance& inst, int scenario,
                              const FirstStagePlan& fixed_plan, const BigMPolicy& big_m);

struct DecodedSolution {
  std::optional<FirstStagePlan> plan;          // present when X/W are in the index
  std::map<int, ScenarioRecourse> recourse;    // keyed by scenario id
  std::optional<double> theta;
};

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rounds integer variables (|x - round(x)| <= 1e-6 or DecodeError) and
// extracts routes; a subtour raises SubtourDetected.
DecodedSolution decode(const milp::MilpSolution& solution, const VariableIndex& index,
                       const Instance& inst);

}  // namespace odpd
