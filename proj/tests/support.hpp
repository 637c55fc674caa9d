#pragma once
// Shared fixtures for the unit and acceptance tests.

#include <cstdint>
#include <vector>

#include "odpd/generator.hpp"
#include "odpd/model.hpp"

namespace odpd::testing {

// Small random instances sized for oracle enumeration. Trucks are priced so
// that roughly half of the optimal plans reserve one.
inline GeneratorSpec battery_spec(int seed, int max_scenarios) {
  GeneratorSpec spec;
  spec.n_customers = 1 + seed % 5;
  spec.n_trucks = 1 + seed % 2;
  spec.n_carriers = 1 + (seed / 2) % 2;
  spec.n_scenarios = 1 + (seed / 3) % max_scenarios;
  spec.n_samples = 1 + seed % 3;
  spec.seed = static_cast<std::uint64_t>(seed);
  spec.area_km = 10.0;
  spec.time_noise_std_seconds = 120.0;
  spec.demand_probability = 0.7;
  spec.carrier_charge_jitter = 0.3;
  spec.pricing.truck_initial_cost = 6.0;
  spec.pricing.carrier_charge = 8.0;
  spec.pricing.routing_cost_per_km = 0.5;
  spec.pricing.deadline_minutes = 40.0;
  spec.pricing.penalty_cost = 2.0;
  return spec;
}

inline Instance battery_instance(int seed, int max_scenarios) {
  return generate(battery_spec(seed, max_scenarios));
}

// n customers, t trucks, r carriers, s samples, one certain scenario with the
// given demand. All matrices zero, unit weights, generous capacity.
inline Instance blank_instance(int n, int t, int r, int s, std::vector<int> demand = {}) {
  Instance inst;
  inst.customers.assign(n, Customer{1.0});
  inst.trucks.assign(t, Truck{100.0, 10.0});
  for (int k = 0; k < r; ++k) inst.carriers.push_back(Carrier{std::vector<double>(n, 5.0)});
  inst.distance_km = Matrix(n + 1, n + 1, 0.0);
  for (int k = 0; k < s; ++k) inst.travel_time_samples.emplace_back(n + 1, n + 1, 0.0);
  if (demand.empty()) demand.assign(n, 1);
  inst.scenarios.push_back(Scenario{1.0, demand});
  inst.deadline_minutes = 100.0;
  inst.penalty_cost = 1.0;
  inst.routing_cost_per_km = 1.0;
  return inst;
}

// Deadline-busting customer 3: serving it by truck costs 35 + 2*penalty,
// handing it to the carrier costs 40, so the switch happens at penalty 2.5.
inline Instance busting_instance() {
  Instance inst = blank_instance(3, 1, 1, 2);
  inst.trucks[0].initial_cost = 10;
  inst.carriers[0].per_customer_charge = {50, 50, 25};
  const double km[4][4] = {{0, 1, 1, 10}, {1, 0, 1, 10}, {1, 1, 0, 10}, {10, 10, 10, 0}};
  for (int u = 0; u < 4; ++u) {
    for (int v = 0; v < 4; ++v) {
      inst.distance_km(u, v) = km[u][v];
      for (Matrix& W : inst.travel_time_samples) W(u, v) = 6.0 * km[u][v];
    }
  }
  inst.deadline_minutes = 60;
  return inst;
}

}  // namespace odpd::testing
