#include "odpd/generator.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace odpd {

Instance generate(const GeneratorSpec& spec) {
  if (spec.n_customers < 0 || spec.n_trucks < 0 || spec.n_carriers < 0 ||
      spec.n_scenarios < 1 || spec.n_samples < 1) {
    throw std::invalid_argument("generator counts must be nonnegative (scenarios, samples >= 1)");
  }
  if (spec.n_customers > 30) throw std::invalid_argument("at most 30 customers are supported");
  const int n = spec.n_customers;
  const int dim = n + 1;
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> coord(0.0, spec.area_km);

  std::vector<double> xs(dim), ys(dim);
  xs[0] = ys[0] = spec.area_km / 2.0;
  for (int u = 1; u < dim; ++u) {
    xs[u] = coord(rng);
    ys[u] = coord(rng);
  }

  Instance inst;
  inst.distance_km = Matrix(dim, dim, 0.0);
  for (int u = 0; u < dim; ++u) {
    for (int v = 0; v < dim; ++v) {
      inst.distance_km(u, v) = std::hypot(xs[u] - xs[v], ys[u] - ys[v]);
    }
  }

  Matrix base(dim, dim, 0.0);
  if (spec.base_time_minutes) {
    if (static_cast<int>(spec.base_time_minutes->rows()) != dim ||
        static_cast<int>(spec.base_time_minutes->cols()) != dim) {
      throw std::invalid_argument("base time matrix must be (n+1)x(n+1)");
    }
    base = *spec.base_time_minutes;
  } else {
    if (!(spec.base_speed_kmh > 0)) throw std::invalid_argument("base speed must be positive");
    for (int u = 0; u < dim; ++u) {
      for (int v = 0; v < dim; ++v) {
        base(u, v) = inst.distance_km(u, v) / spec.base_speed_kmh * 60.0;
      }
    }
  }

  const double std_minutes = spec.time_noise_std_seconds / 60.0;
  for (int k = 0; k < spec.n_samples; ++k) {
    Matrix sample = base;
    if (std_minutes > 0.0) {
      std::normal_distribution<double> noise(0.0, std_minutes);
      for (int u = 0; u < dim; ++u) {
        for (int v = 0; v < dim; ++v) {
          if (u == v) continue;
          sample(u, v) = std::max(0.0, base(u, v) + noise(rng));
        }
      }
    }
    for (int u = 0; u < dim; ++u) sample(u, u) = 0.0;
    inst.travel_time_samples.push_back(std::move(sample));
  }

  const PricingDefaults& pr = spec.pricing;
  inst.customers.assign(n, Customer{pr.package_weight_kg});
  inst.trucks.assign(spec.n_trucks, Truck{pr.truck_capacity_kg, pr.truck_initial_cost});
  std::uniform_real_distribution<double> jitter(1.0 - spec.carrier_charge_jitter,
                                                1.0 + spec.carrier_charge_jitter);
  for (int r = 0; r < spec.n_carriers; ++r) {
    Carrier carrier;
    for (int c = 0; c < n; ++c) {
      const double factor = spec.carrier_charge_jitter > 0.0 ? jitter(rng) : 1.0;
      carrier.per_customer_charge.push_back(pr.carrier_charge * factor);
    }
    inst.carriers.push_back(std::move(carrier));
  }
  inst.routing_cost_per_km = pr.routing_cost_per_km;
  inst.penalty_cost = pr.penalty_cost;
  inst.deadline_minutes = pr.deadline_minutes;

  std::vector<double> p(n, spec.demand_probability);
  if (!spec.demand_probabilities.empty()) {
    if (static_cast<int>(spec.demand_probabilities.size()) != n) {
      throw std::invalid_argument("one demand probability per customer is required");
    }
    p = spec.demand_probabilities;
  }
  for (double q : p) {
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("demand probability outside [0,1]");
  }

  const bool exhaustive = n < 31 && (1LL << n) <= spec.n_scenarios;
  if (exhaustive) {
    for (long long mask = 0; mask < (1LL << n); ++mask) {
      Scenario sc;
      sc.probability = 1.0;
      for (int c = 0; c < n; ++c) {
        const int d = static_cast<int>((mask >> c) & 1);
        sc.demand.push_back(d);
        sc.probability *= d ? p[c] : 1.0 - p[c];
      }
      if (sc.probability > 0.0) inst.scenarios.push_back(std::move(sc));
    }
  } else {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int w = 0; w < spec.n_scenarios; ++w) {
      Scenario sc;
      sc.probability = 1.0 / spec.n_scenarios;
      for (int c = 0; c < n; ++c) sc.demand.push_back(unit(rng) < p[c] ? 1 : 0);
      inst.scenarios.push_back(std::move(sc));
    }
  }
  return inst;
}

}  // namespace odpd
