#pragma once
// Synthetic instance generation: customers scattered uniformly in a square,
// Euclidean road distances, mean travel times from a constant speed, and
// travel-time samples drawn normally around the mean.

#include <cstdint>
#include <optional>
#include <vector>

#include "odpd/model.hpp"

namespace odpd {

struct PricingDefaults {
  double truck_initial_cost = 280.0;
  double truck_capacity_kg = 1060.0;
  double package_weight_kg = 30.0;
  double carrier_charge = 21.0;
  double routing_cost_per_km = 0.105;
  double penalty_cost = 1.0;
  double deadline_minutes = 105.0;
};

struct GeneratorSpec {
  int n_customers = 5;
  int n_trucks = 1;
  int n_carriers = 1;
  int n_scenarios = 1;
  int n_samples = 5;
  std::uint64_t seed = 1;

  double area_km = 20.0;         // side of the square holding depot and customers
  double base_speed_kmh = 30.0;  // used when no base time matrix is given
  std::optional<Matrix> base_time_minutes;
  // Standard deviation of the per-arc travel-time noise, in seconds.
  double time_noise_std_seconds = 10.0;

  double demand_probability = 0.5;
  std::vector<double> demand_probabilities;  // per customer; overrides the scalar

  // Multiplicative jitter on carrier charges: charge * U(1 - j, 1 + j).
  double carrier_charge_jitter = 0.0;

  PricingDefaults pricing;
};

Instance generate(const GeneratorSpec& spec);

}  // namespace odpd
