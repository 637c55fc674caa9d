#include <algorithm>
#include <random>
#include <vector>

#include "doctest.h"
#include "odpd/formulation.hpp"
#include "odpd/lshaped.hpp"
#include "odpd/oracle.hpp"
#include "support.hpp"

using namespace odpd;
using namespace odpd::oracle;
using odpd::testing::battery_instance;
using odpd::testing::blank_instance;

TEST_CASE("min_tour_cost") {
  Matrix K(6, 6, 0.0);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> d(1.0, 9.0);
  for (int u = 0; u < 6; ++u) {
    for (int v = 0; v < 6; ++v) K(u, v) = u == v ? 0.0 : d(rng);
  }
  const TourResult empty = min_tour_cost({}, K);
  CHECK(empty.cost == 0.0);
  CHECK(empty.tour.empty());
  CHECK(min_tour_cost({3}, K).cost == doctest::Approx(K(0, 3) + K(3, 0)));

  std::vector<int> set{1, 2, 4, 5};
  double best = 1e300;
  std::vector<int> perm = set;
  do {
    double c = K(0, perm[0]) + K(perm.back(), 0);
    for (std::size_t k = 0; k + 1 < perm.size(); ++k) c += K(perm[k], perm[k + 1]);
    best = std::min(best, c);
  } while (std::next_permutation(perm.begin(), perm.end()));
  const TourResult r = min_tour_cost(set, K);
  CHECK(r.cost == doctest::Approx(best));
  std::vector<int> sorted = r.tour;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == set);

  CHECK_THROWS_AS(min_tour_cost(std::vector<int>(13, 1), K), BudgetExceeded);
}

TEST_CASE("enumerate_optimal: trivial instances") {
  CHECK(enumerate_optimal(blank_instance(3, 2, 1, 2, {0, 0, 0})).optimal_total == 0.0);

  Instance one = blank_instance(1, 1, 1, 1);
  one.trucks[0].initial_cost = 280;
  one.carriers[0].per_customer_charge = {21};
  one.scenarios = {Scenario{0.3, {1}}, Scenario{0.7, {0}}};
  const OracleResult r = enumerate_optimal(one);
  CHECK(r.optimal_total == doctest::Approx(21 * 0.3));
  CHECK(r.plan == empty_plan(one));
  CHECK(r.enumeration_count == 2);

  CHECK_THROWS_AS(enumerate_optimal(blank_instance(7, 1, 1, 1)), BudgetExceeded);
  CHECK_THROWS_AS(enumerate_optimal(blank_instance(2, 0, 0, 1)), NoFeasiblePlan);
}

TEST_CASE("oracle solutions are feasible and their lateness matches the flags") {
  for (int seed = 1; seed <= 20; ++seed) {
    Instance inst = battery_instance(seed, 3);
    const OracleResult r = enumerate_optimal(inst);
    CHECK(check_feasibility(r.plan, r.recourse, inst).empty());
    CHECK(evaluate(r.plan, r.recourse, inst).total == doctest::Approx(r.optimal_total));
    for (const ScenarioRecourse& rec : r.recourse) {
      for (int t = 0; t < inst.num_trucks(); ++t) {
        int flags = 0;
        for (int s = 0; s < inst.num_samples(); ++s) flags += rec.late_flags(t, s);
        CHECK(flags == doctest::Approx(violation_probability(rec.routes[t], inst) * inst.num_samples()));
      }
    }
  }
}

TEST_CASE("oracle agrees with the extensive form and bounds the decomposition") {
  for (int seed = 1; seed <= 15; ++seed) {
    Instance inst = battery_instance(seed, 2);
    const OracleResult r = enumerate_optimal(inst);
    const BuiltProblem b = build_extensive(inst, BigMPolicy::defaults(inst));
    const milp::MilpSolution s = milp::solve_bnb(b.problem);
    CHECK(s.objective_value == doctest::Approx(r.optimal_total).epsilon(1e-9));
    CHECK(lshaped::run(inst).best.total() >= r.optimal_total - 1e-6);
  }
}
