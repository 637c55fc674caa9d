#pragma once
// Exhaustive reference solver for tiny instances. It enumerates every
// assignment matrix and, per scenario and truck, every visiting order, so its
// optimum certifies the MILP and decomposition results in tests.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "odpd/model.hpp"

namespace odpd::oracle {

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoFeasiblePlan : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TourResult {
  double cost = 0.0;
  std::vector<int> tour;  // locations, depot implicit at both ends
};

// Held-Karp over at most 12 customer locations.
TourResult min_tour_cost(const std::vector<int>& locations, const Matrix& weight);

struct OracleResult {
  double optimal_total = 0.0;
  FirstStagePlan plan;
  std::vector<ScenarioRecourse> recourse;
  std::int64_t enumeration_count = 0;
};

struct OracleLimits {
  int max_customers = 6;
  int max_trucks = 2;
  int max_scenarios = 4;
  int max_samples = 4;
};

OracleResult enumerate_optimal(const Instance& inst, const OracleLimits& limits = {});

}  // namespace odpd::oracle
