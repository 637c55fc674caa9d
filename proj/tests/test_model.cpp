#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "odpd/model.hpp"
#include "odpd/oracle.hpp"
#include "support.hpp"

using namespace odpd;
using odpd::testing::blank_instance;

namespace {

// One customer, one truck; the depot round trip takes trip_minutes[s] under
// sample s, split 50/50 between the two arcs.
Instance round_trip_instance(const std::vector<double>& trip_minutes, double deadline) {
  Instance inst = blank_instance(1, 1, 1, static_cast<int>(trip_minutes.size()));
  for (std::size_t s = 0; s < trip_minutes.size(); ++s) {
    inst.travel_time_samples[s](0, 1) = trip_minutes[s] / 2.0;
    inst.travel_time_samples[s](1, 0) = trip_minutes[s] / 2.0;
  }
  inst.deadline_minutes = deadline;
  return inst;
}

PaymentBreakdown reference_evaluate(const FirstStagePlan& plan,
                                    const std::vector<ScenarioRecourse>& rec,
                                    const Instance& inst) {
  PaymentBreakdown b;
  const int n = inst.num_customers();
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < inst.num_trucks(); ++t) b.assignment_term += plan.assigned(i, t);
  }
  for (int t = 0; t < inst.num_trucks(); ++t) {
    b.truck_initial += inst.trucks[t].initial_cost * plan.reserved[t];
  }
  for (int w = 0; w < inst.num_scenarios(); ++w) {
    const double p = inst.scenarios[w].probability;
    for (int i = 0; i < n; ++i) {
      for (int r = 0; r < inst.num_carriers(); ++r) {
        b.carrier_charges += p * inst.carriers[r].per_customer_charge[i] * rec[w].carrier_assign(i, r);
      }
    }
    for (int t = 0; t < inst.num_trucks(); ++t) {
      for (int u = 0; u <= n; ++u) {
        for (int v = 0; v <= n; ++v) {
          if (rec[w].arcs[t](u, v)) b.routing_cost += p * inst.routing_cost(u, v);
        }
      }
      for (int s = 0; s < inst.num_samples(); ++s) {
        double time = 0.0;
        for (int u = 0; u <= n; ++u) {
          for (int v = 0; v <= n; ++v) {
            if (u != v && rec[w].arcs[t](u, v)) time += inst.travel_time_samples[s](u, v);
          }
        }
        if (time - inst.deadline_minutes > 1e-9) b.penalty_cost += p * inst.penalty_cost;
      }
    }
  }
  b.total = b.assignment_term + b.truck_initial + b.carrier_charges + b.routing_cost +
            b.penalty_cost;
  return b;
}

// Direct transcription of the constraint families, used to cross-check
// check_feasibility.
bool direct_feasible(const FirstStagePlan& plan, const ScenarioRecourse& rec, const Instance& inst) {
  const int n = inst.num_customers();
  const auto& D = inst.scenarios[0].demand;
  for (int t = 0; t < inst.num_trucks(); ++t) {
    double load = 0;
    int xs = 0;
    for (int i = 0; i < n; ++i) {
      load += inst.customers[i].weight_kg * plan.assigned(i, t);
      xs += plan.assigned(i, t);
    }
    if (load > inst.trucks[t].capacity_kg) return false;
    if (xs > n * plan.reserved[t]) return false;
  }
  for (int i = 0; i < n; ++i) {
    int cover = 0;
    for (int t = 0; t < inst.num_trucks(); ++t) cover += plan.assigned(i, t);
    for (int r = 0; r < inst.num_carriers(); ++r) cover += rec.carrier_assign(i, r);
    if (cover < D[i]) return false;
  }
  for (int t = 0; t < inst.num_trucks(); ++t) {
    const auto& V = rec.arcs[t];
    int in0 = 0, out0 = 0;
    for (int u = 0; u <= n; ++u) {
      if (V(u, u)) return false;
      in0 += V(u, 0);
      out0 += V(0, u);
    }
    if (in0 > 1 || out0 > 1) return false;
    for (int i = 1; i <= n; ++i) {
      int in = 0, out = 0;
      for (int u = 0; u <= n; ++u) {
        in += V(u, i);
        out += V(i, u);
      }
      if (in != plan.assigned(i - 1, t) * D[i - 1]) return false;
      if (out != plan.assigned(i - 1, t) * D[i - 1]) return false;
      const int S = rec.order(i - 1, t);
      if (S < 0 || S > n) return false;
    }
    for (int i = 1; i <= n; ++i) {
      for (int j = 1; j <= n; ++j) {
        if (i != j && rec.order(i - 1, t) - rec.order(j - 1, t) + n * V(i, j) > n - 1) return false;
      }
    }
    for (int s = 0; s < inst.num_samples(); ++s) {
      double time = 0;
      for (int u = 0; u <= n; ++u) {
        for (int v = 0; v <= n; ++v) time += V(u, v) * inst.travel_time_samples[s](u, v);
      }
      if (time > inst.deadline_minutes + 1e-9 && rec.late_flags(t, s) == 0) return false;
    }
  }
  return true;
}

bool contains_prefix(const std::vector<std::string>& v, const std::string& prefix) {
  return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.rfind(prefix, 0) == 0; });
}

}  // namespace

TEST_CASE("cardinality") {
  const std::vector<double> fixture{0, 3, 4, 0, 8, 1};
  CHECK(cardinality(fixture) == 4);
  CHECK(cardinality(std::vector<double>{}) == 0);
  CHECK(cardinality(std::vector<double>{0, 0, 0}) == 0);
  CHECK(cardinality(std::vector<double>{1e-10, -1e-10, 2e-9, -5}) == 2);
}

TEST_CASE("route time and exceeding time") {
  Instance inst = blank_instance(2, 1, 1, 1);
  inst.travel_time_samples[0](0, 1) = 40;
  inst.travel_time_samples[0](1, 0) = 50;
  CHECK(route_time(Route{0, {}}, 0, inst) == 0.0);
  CHECK(route_time(Route{0, {1}}, 0, inst) == 90.0);
  CHECK_THROWS_AS(route_time(Route{0, {1}}, 1, inst), std::out_of_range);

  Instance gen = odpd::testing::battery_instance(4, 2);
  const Route r{0, {1, 2, 3}};
  const auto& W = gen.travel_time_samples[1];
  CHECK(route_time(r, 1, gen) == doctest::Approx(W(0, 1) + W(1, 2) + W(2, 3) + W(3, 0)));

  Instance late = round_trip_instance({110}, 105);
  CHECK(exceeding_time(Route{0, {1}}, 0, late) == doctest::Approx(5.0));
  Instance early = round_trip_instance({95}, 105);
  CHECK(exceeding_time(Route{0, {1}}, 0, early) == 0.0);
  CHECK(exceeding_time(Route{0, {}}, 0, early) == 0.0);
}

TEST_CASE("violation probability") {
  Instance inst = round_trip_instance({100, 110, 95, 120, 104}, 105);
  CHECK(violation_probability(Route{0, {1}}, inst) == doctest::Approx(0.4));
  CHECK(violation_probability(Route{0, {1}}, round_trip_instance({1, 2, 3}, 105)) == 0.0);
  CHECK(violation_probability(Route{0, {1}}, round_trip_instance({200, 300}, 105)) == 1.0);
}

TEST_CASE("exceeding time and violation probability properties") {
  for (int seed = 1; seed <= 20; ++seed) {
    Instance inst = odpd::testing::battery_instance(seed, 2);
    std::vector<int> tour(inst.num_customers());
    std::iota(tour.begin(), tour.end(), 1);
    const Route r{0, tour};
    std::vector<double> g;
    for (int s = 0; s < inst.num_samples(); ++s) {
      const double e = exceeding_time(r, s, inst);
      CHECK(e >= 0.0);
      CHECK((e <= 1e-9) == (route_time(r, s, inst) <= inst.deadline_minutes + 1e-9));
      g.push_back(e);
    }
    const double vp = violation_probability(r, inst);
    CHECK(vp == static_cast<double>(cardinality(g)) / inst.num_samples());
  }
}

TEST_CASE("validate_instance") {
  Instance inst = blank_instance(2, 1, 1, 1);
  CHECK(validate_instance(inst).empty());

  Instance bad = inst;
  bad.scenarios = {Scenario{0.6, {1, 0}}, Scenario{0.5, {0, 1}}};
  const auto report = validate_instance(bad);
  REQUIRE(report.size() == 1);
  CHECK(report[0].find("probabilities sum to 1.1") != std::string::npos);

  Instance shape = inst;
  shape.travel_time_samples[0] = Matrix(2, 2, 0.0);
  const auto shape_report = validate_instance(shape);
  REQUIRE(!shape_report.empty());
  CHECK(shape_report[0].find("travel-time sample 0") != std::string::npos);

  Instance neg = inst;
  neg.customers[0].weight_kg = -1;
  neg.carriers[0].per_customer_charge.pop_back();
  CHECK(validate_instance(neg).size() == 2);
}

TEST_CASE("routes_from_arcs") {
  Grid<int> a(4, 4, 0);
  a(0, 1) = a(1, 0) = 1;
  CHECK(routes_from_arcs(a).visit_sequence == std::vector<int>{1});

  a(2, 3) = a(3, 2) = 1;
  try {
    routes_from_arcs(a);
    FAIL("expected a subtour");
  } catch (const SubtourDetected& e) {
    std::vector<int> cycle = e.cycle();
    std::sort(cycle.begin(), cycle.end());
    CHECK(cycle == std::vector<int>{2, 3});
  }

  Grid<int> b(3, 3, 0);
  b(0, 2) = b(2, 1) = b(1, 0) = 1;
  CHECK(routes_from_arcs(b).visit_sequence == std::vector<int>{2, 1});

  Grid<int> broken(3, 3, 0);
  broken(0, 1) = broken(1, 0) = broken(2, 0) = 1;
  CHECK_THROWS_AS(routes_from_arcs(broken), BrokenPath);

  CHECK(routes_from_arcs(Grid<int>(3, 3, 0)).visit_sequence.empty());
}

TEST_CASE("routes_from_arcs inverts arcs_from_route") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> locs{1, 2, 3, 4, 5, 6};
    std::shuffle(locs.begin(), locs.end(), rng);
    locs.resize(trial % 7);
    const Route r{2, locs};
    CHECK(routes_from_arcs(arcs_from_route(r, 7), 2) == r);
  }
}

TEST_CASE("evaluate") {
  Instance none = blank_instance(3, 2, 1, 2, {0, 0, 0});
  std::vector<ScenarioRecourse> rec{empty_recourse(none)};
  const PaymentBreakdown zero = evaluate(empty_plan(none), rec, none);
  CHECK(zero.total == 0.0);
  CHECK(zero.routing_cost == 0.0);
  CHECK_THROWS_AS(evaluate(empty_plan(none), std::vector<ScenarioRecourse>{}, none),
                  std::invalid_argument);

  // Truck 280, routing 4.19, penalty 2 (two late samples out of five).
  Instance inst = round_trip_instance({100, 110, 95, 120, 104}, 105);
  inst.trucks[0].initial_cost = 280;
  inst.distance_km(0, 1) = 2.0;
  inst.distance_km(1, 0) = 2.19;
  FirstStagePlan plan = empty_plan(inst);
  plan.reserved[0] = 1;
  plan.assigned(0, 0) = 1;
  ScenarioRecourse r = empty_recourse(inst);
  r.arcs[0] = arcs_from_route(Route{0, {1}}, 2);
  r.routes[0] = Route{0, {1}};
  r.order(0, 0) = 1;
  const PaymentBreakdown b = evaluate(plan, std::vector<ScenarioRecourse>{r}, inst);
  CHECK(b.truck_initial == 280.0);
  CHECK(b.routing_cost == doctest::Approx(4.19));
  CHECK(b.penalty_cost == doctest::Approx(2.0));
  CHECK(b.carrier_charges == 0.0);
  CHECK(b.total - b.assignment_term == doctest::Approx(286.19).epsilon(1e-12));
  CHECK(b.total == doctest::Approx(b.assignment_term + b.truck_initial + b.carrier_charges +
                                   b.routing_cost + b.penalty_cost)
                       .epsilon(1e-12));
}

TEST_CASE("evaluate matches an independent evaluator") {
  for (int seed = 1; seed <= 25; ++seed) {
    Instance inst = odpd::testing::battery_instance(seed, 3);
    const oracle::OracleResult o = oracle::enumerate_optimal(inst);
    const PaymentBreakdown a = evaluate(o.plan, o.recourse, inst);
    const PaymentBreakdown b = reference_evaluate(o.plan, o.recourse, inst);
    CHECK(a.total == doctest::Approx(b.total).epsilon(1e-12));
    CHECK(a.penalty_cost == doctest::Approx(b.penalty_cost).epsilon(1e-12));
    CHECK(a.routing_cost == doctest::Approx(b.routing_cost).epsilon(1e-12));
    CHECK(a.total == doctest::Approx(o.optimal_total).epsilon(1e-9));
  }
}

TEST_CASE("evaluate is additive over scenario subsets") {
  for (int seed : {7, 12, 17, 23}) {
    Instance inst = odpd::testing::battery_instance(seed, 3);
    if (inst.num_scenarios() < 2) continue;
    const oracle::OracleResult o = oracle::enumerate_optimal(inst);
    const PaymentBreakdown full = evaluate(o.plan, o.recourse, inst);
    double second = 0.0;
    for (int half = 0; half < 2; ++half) {
      Instance part = inst;
      std::vector<ScenarioRecourse> rec;
      part.scenarios.clear();
      for (int w = 0; w < inst.num_scenarios(); ++w) {
        if (w % 2 == half) {
          part.scenarios.push_back(inst.scenarios[w]);
          rec.push_back(o.recourse[w]);
        }
      }
      const PaymentBreakdown b = evaluate(o.plan, rec, part);
      second += b.carrier_charges + b.routing_cost + b.penalty_cost;
    }
    CHECK(second == doctest::Approx(full.carrier_charges + full.routing_cost + full.penalty_cost));
  }
}

TEST_CASE("check_feasibility examples") {
  Instance inst = blank_instance(2, 1, 1, 1);
  FirstStagePlan plan = empty_plan(inst);
  ScenarioRecourse rec = empty_recourse(inst);
  rec.carrier_assign(1, 0) = 1;
  auto v = check_feasibility(plan, std::vector<ScenarioRecourse>{rec}, inst);
  REQUIRE(v.size() == 1);
  CHECK(v[0] == "(3) i=1, ω=0");

  Instance heavy = blank_instance(2, 1, 1, 1);
  heavy.customers.assign(2, Customer{540});
  heavy.trucks[0].capacity_kg = 1060;
  FirstStagePlan full = empty_plan(heavy);
  full.reserved[0] = 1;
  full.assigned(0, 0) = full.assigned(1, 0) = 1;
  ScenarioRecourse tour = empty_recourse(heavy);
  tour.arcs[0] = arcs_from_route(Route{0, {1, 2}}, 3);
  tour.order(0, 0) = 1;
  tour.order(1, 0) = 2;
  CHECK(contains_prefix(check_feasibility(full, std::vector<ScenarioRecourse>{tour}, heavy), "(4) t=0"));

  Instance late = round_trip_instance({120}, 105);
  FirstStagePlan one = empty_plan(late);
  one.reserved[0] = 1;
  one.assigned(0, 0) = 1;
  ScenarioRecourse r1 = empty_recourse(late);
  r1.arcs[0] = arcs_from_route(Route{0, {1}}, 2);
  r1.order(0, 0) = 1;
  v = check_feasibility(one, std::vector<ScenarioRecourse>{r1}, late);
  REQUIRE(v.size() == 1);
  CHECK(v[0] == "(18) t=0, s=0, ω=0");
  r1.late_flags(0, 0) = 1;
  CHECK(check_feasibility(one, std::vector<ScenarioRecourse>{r1}, late).empty());
}

TEST_CASE("check_feasibility agrees with a direct transcription, exhaustively at n=2") {
  // n=2, one truck, one carrier, one sample; every binary X, W, Y, V, Z and
  // every S in {0,1,2}^2.
  Instance inst = blank_instance(2, 1, 1, 1);
  inst.trucks[0].capacity_kg = 1.5;
  auto& W = inst.travel_time_samples[0];
  W(0, 1) = W(1, 0) = 60;
  W(0, 2) = W(2, 0) = 30;
  W(1, 2) = W(2, 1) = 20;
  inst.deadline_minutes = 100;
  long long checked = 0, feasible = 0, mismatches = 0;
  for (const std::vector<int>& demand : {std::vector<int>{1, 1}, std::vector<int>{1, 0}}) {
    inst.scenarios[0].demand = demand;
    for (int fs = 0; fs < 8; ++fs) {
      FirstStagePlan plan = empty_plan(inst);
      plan.assigned(0, 0) = fs & 1;
      plan.assigned(1, 0) = (fs >> 1) & 1;
      plan.reserved[0] = (fs >> 2) & 1;
      for (int ys = 0; ys < 4; ++ys) {
        for (int vs = 0; vs < 512; ++vs) {
          for (int ss = 0; ss < 9; ++ss) {
            for (int z = 0; z < 2; ++z) {
              ScenarioRecourse rec = empty_recourse(inst);
              rec.carrier_assign(0, 0) = ys & 1;
              rec.carrier_assign(1, 0) = (ys >> 1) & 1;
              for (int k = 0; k < 9; ++k) rec.arcs[0](k / 3, k % 3) = (vs >> k) & 1;
              rec.order(0, 0) = ss % 3;
              rec.order(1, 0) = ss / 3;
              rec.late_flags(0, 0) = z;
              const bool direct = direct_feasible(plan, rec, inst);
              const bool lib = check_feasibility(plan, std::span(&rec, 1), inst).empty();
              mismatches += direct != lib;
              feasible += direct;
              ++checked;
            }
          }
        }
      }
    }
  }
  CHECK(mismatches == 0);
  CHECK(feasible > 0);
  CHECK(checked == 2LL * 8 * 4 * 512 * 9 * 2);
}
