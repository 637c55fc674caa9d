#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "odpd/lshaped.hpp"
#include "odpd/oracle.hpp"
#include "support.hpp"

using namespace odpd;
using namespace odpd::lshaped;
using odpd::testing::battery_instance;
using odpd::testing::blank_instance;

namespace {

ScenarioRecourse with_route(const Instance& inst, std::vector<int> tour) {
  ScenarioRecourse r = empty_recourse(inst);
  r.routes[0] = Route{0, tour};
  r.arcs[0] = arcs_from_route(r.routes[0], inst.num_locations());
  return r;
}

}  // namespace

TEST_CASE("P counts late flags") {
  Instance inst = blank_instance(2, 1, 1, 3);
  inst.scenarios[0].probability = 0.5;
  ScenarioRecourse r = empty_recourse(inst);
  CHECK(compute_P(inst, 0, r) == 0.0);
  r.late_flags(0, 0) = r.late_flags(0, 2) = 1;
  CHECK(compute_P(inst, 0, r) == doctest::Approx(1.0));
}

TEST_CASE("M counts interior arcs from both ends") {
  Instance inst = blank_instance(2, 1, 1, 1);
  inst.scenarios[0].probability = 0.5;
  Matrix& K = inst.distance_km;
  K(0, 1) = 1;
  K(1, 0) = 2;
  K(1, 2) = 4;
  K(2, 0) = 8;
  CHECK(compute_M(inst, 0, empty_recourse(inst)) == 0.0);
  CHECK(compute_M(inst, 0, with_route(inst, {1})) == doctest::Approx(0.5 * (1 + 2)));
  CHECK(compute_M(inst, 0, with_route(inst, {1, 2})) == doctest::Approx(0.5 * (1 + 2 * 4 + 8)));
}

TEST_CASE("J takes the cheapest carrier") {
  Instance inst = blank_instance(1, 1, 2, 1, {0});
  CHECK(compute_J(inst, 0) == 0.0);
  inst.scenarios[0].demand = {1};
  inst.carriers[0].per_customer_charge = {25};
  inst.carriers[1].per_customer_charge = {21};
  CHECK(compute_J(inst, 0) == 21.0);
  Instance none = blank_instance(1, 1, 0, 1);
  CHECK_THROWS_AS(compute_J(none, 0), RefusedInstance);

  Instance gen = battery_instance(9, 2);
  for (int w = 0; w < gen.num_scenarios(); ++w) {
    double sum = 0;
    for (int c = 0; c < gen.num_customers(); ++c) {
      double best = 1e300;
      for (const Carrier& r : gen.carriers) best = std::min(best, r.per_customer_charge[c]);
      sum += gen.scenarios[w].demand[c] * best;
    }
    CHECK(compute_J(gen, w) == doctest::Approx(gen.scenarios[w].probability * sum));
  }
}

TEST_CASE("I per customer and truck") {
  Instance inst = blank_instance(2, 1, 1, 1, {0, 1});
  inst.distance_km(0, 2) = 3;
  inst.distance_km(2, 0) = 4;
  CHECK(compute_I(inst, 0, 0, 0, empty_recourse(inst)) == 0.0);
  CHECK(compute_I(inst, 1, 0, 0, with_route(inst, {2})) == doctest::Approx(5.0 - 7.0));
}

TEST_CASE("scenario terms on solved instances") {
  for (int seed : {4, 9, 14}) {
    Instance inst = battery_instance(seed, 2);
    const oracle::OracleResult o = oracle::enumerate_optimal(inst);
    for (int w = 0; w < inst.num_scenarios(); ++w) {
      const ScenarioTerms st = scenario_terms(inst, w, o.recourse[w]);
      double late = 0;
      for (int t = 0; t < inst.num_trucks(); ++t) {
        for (int s = 0; s < inst.num_samples(); ++s) {
          late += exceeding_time(o.recourse[w].routes[t], s, inst) > kNonzeroTol;
        }
      }
      CHECK(st.P == doctest::Approx(inst.scenarios[w].probability * inst.penalty_cost * late));
      double sum_i = 0;
      for (int c = 0; c < inst.num_customers(); ++c) {
        for (int t = 0; t < inst.num_trucks(); ++t) sum_i += st.I(c, t);
      }
      // Each customer's demand term appears once per truck.
      CHECK(sum_i == doctest::Approx(inst.num_trucks() * st.J - st.M));
    }
  }
}

TEST_CASE("assemble_cut") {
  ScenarioTerms a{42, 2, 10, Grid<double>(1, 1, 3.0)};
  OptimalityCut one = assemble_cut({a});
  CHECK(one.rhs == 30.0);
  CHECK(one.coefficients(0, 0) == 3.0);
  ScenarioTerms b{10, 1, 4, Grid<double>(1, 1, -1.0)};
  OptimalityCut two = assemble_cut({a, b});
  CHECK(two.rhs == one.rhs + assemble_cut({b}).rhs);
  CHECK(two.coefficients(0, 0) == 2.0);
}

TEST_CASE("run: trivial instances") {
  Instance none = blank_instance(3, 1, 1, 2, {0, 0, 0});
  const LShapedResult r = run(none);
  CHECK(r.best.total() == 0.0);
  CHECK(r.best.plan == empty_plan(none));

  Instance pricey = battery_instance(9, 2);
  for (Truck& t : pricey.trucks) t.initial_cost = 1e6;
  const LShapedResult c = run(pricey);
  double sum_j = 0;
  for (int w = 0; w < pricey.num_scenarios(); ++w) sum_j += compute_J(pricey, w);
  CHECK(c.best.total() == doctest::Approx(sum_j));

  CHECK_THROWS_AS(run(blank_instance(2, 1, 0, 1)), RefusedInstance);
}

TEST_CASE("run: trace invariants") {
  for (int seed = 1; seed <= 12; ++seed) {
    Instance inst = battery_instance(seed, 3);
    const LShapedResult res = run(inst);
    REQUIRE(!res.trace.empty());
    CHECK(check_feasibility(res.best.plan, res.best.recourse, inst).empty());
    std::vector<OptimalityCut> cuts;
    for (std::size_t k = 0; k < res.trace.size(); ++k) {
      const IterationRecord& rec = res.trace[k];
      CHECK(rec.k == static_cast<int>(k));
      CHECK((k == 0) == std::isinf(rec.theta_bar));

      double trucks = 0, hsum = 0;
      for (int t = 0; t < inst.num_trucks(); ++t) trucks += inst.trucks[t].initial_cost * rec.plan.reserved[t];
      for (double h : rec.h) hsum += h;
      CHECK(rec.H == doctest::Approx(trucks + hsum).epsilon(1e-12));
      const PaymentBreakdown b = evaluate(rec.plan, rec.recourse, inst);
      CHECK(rec.H == doctest::Approx(b.total - b.assignment_term).epsilon(1e-9));

      // At the generating point the cut is slack by exactly the penalty mass.
      double ex = 0, p = 0;
      for (int c = 0; c < inst.num_customers(); ++c) {
        for (int t = 0; t < inst.num_trucks(); ++t) ex += rec.cut.coefficients(c, t) * rec.plan.assigned(c, t);
      }
      for (int w = 0; w < inst.num_scenarios(); ++w) p += compute_P(inst, w, rec.recourse[w]);
      CHECK(rec.cut.rhs - ex == doctest::Approx(rec.B - p));

      if (k >= 1) {
        // The master solution satisfies every earlier cut.
        for (const OptimalityCut& cut : cuts) {
          double lhs = rec.theta_bar;
          for (int c = 0; c < inst.num_customers(); ++c) {
            for (int t = 0; t < inst.num_trucks(); ++t) lhs += cut.coefficients(c, t) * rec.plan.assigned(c, t);
          }
          CHECK(lhs >= cut.rhs - 1e-6);
        }
        // Dropping the newest cut reproduces the previous master objective.
        std::vector<OptimalityCut> fewer(cuts.begin(), cuts.end() - 1);
        const BuiltProblem m = build_master(inst, BigMPolicy::defaults(inst), fewer, k == 1);
        CHECK(milp::solve_bnb(m.problem).objective_value ==
              doctest::Approx(res.trace[k - 1].master_objective));
      }
      cuts.push_back(rec.cut);
    }
    CHECK(cuts.size() == res.trace.size());
  }
}

TEST_CASE("trace export") {
  const LShapedResult res = run(battery_instance(4, 2));
  std::ostringstream out;
  write_trace(out, res.trace);
  std::istringstream in(out.str());
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    if (lines == 0) CHECK(line.find("\"theta_bar\":null") != std::string::npos);
    CHECK(line.find("\"H\":") != std::string::npos);
    ++lines;
  }
  CHECK(lines == static_cast<int>(res.trace.size()));
}
