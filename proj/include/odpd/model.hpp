#pragma once
// Delivery-planning domain: instance data, first-stage plans, per-scenario
// recourse, and the reference evaluation of cost and deadline violation that
// every solver in the library is checked against.
//
// Indexing conventions:
//   * locations are 0..n, the depot is location 0 and customer c (0-based) is
//     location c + 1;
//   * per-customer grids (assigned, carrier_assign, order) are indexed by the
//     0-based customer index;
//   * arc grids are indexed by location.

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "odpd/grid.hpp"

namespace odpd {

// Entries with |value| <= kNonzeroTol count as zero when taking cardinality.
inline constexpr double kNonzeroTol = 1e-9;

struct Customer {
  double weight_kg = 0.0;
};

struct Truck {
  double capacity_kg = 0.0;
  double initial_cost = 0.0;
};

struct Carrier {
  std::vector<double> per_customer_charge;  // one entry per customer
};

struct Scenario {
  double probability = 0.0;
  std::vector<int> demand;  // one 0/1 entry per customer
};

struct Instance {
  std::vector<Customer> customers;
  std::vector<Truck> trucks;
  std::vector<Carrier> carriers;
  Matrix distance_km;                     // (n+1) x (n+1)
  std::vector<Matrix> travel_time_samples;  // minutes, (n+1) x (n+1) each
  std::vector<Scenario> scenarios;
  double deadline_minutes = 0.0;
  // Charged once per late travel-time sample; the 1/s' normalisation of the
  // violation probability is folded into this value.
  double penalty_cost = 0.0;
  double routing_cost_per_km = 0.0;
  // When present, replaces routing_cost_per_km * distance_km.
  std::optional<Matrix> routing_cost_override;

  int num_customers() const { return static_cast<int>(customers.size()); }
  int num_locations() const { return num_customers() + 1; }
  int num_trucks() const { return static_cast<int>(trucks.size()); }
  int num_carriers() const { return static_cast<int>(carriers.size()); }
  int num_scenarios() const { return static_cast<int>(scenarios.size()); }
  int num_samples() const { return static_cast<int>(travel_time_samples.size()); }

  // Cost of driving from location u to location v.
  double routing_cost(int u, int v) const;
  // Cheapest carrier charge for customer c; throws when there is no carrier.
  double min_carrier_charge(int customer) const;
};

struct FirstStagePlan {
  std::vector<int> reserved;  // W_t
  Grid<int> assigned;         // X, customers x trucks

  bool operator==(const FirstStagePlan&) const = default;
};

struct Route {
  int truck = 0;
  std::vector<int> visit_sequence;  // customer locations; depot implicit at both ends

  bool operator==(const Route&) const = default;
};

struct ScenarioRecourse {
  Grid<int> carrier_assign;   // Y, customers x carriers
  std::vector<Grid<int>> arcs;  // V, one (n+1) x (n+1) grid per truck
  Grid<int> order;            // S, customers x trucks
  Grid<int> late_flags;       // Z, trucks x samples
  std::vector<Route> routes;  // extracted from arcs, one per truck

  bool operator==(const ScenarioRecourse&) const = default;
};

struct PaymentBreakdown {
  double assignment_term = 0.0;
  double truck_initial = 0.0;
  double carrier_charges = 0.0;
  double routing_cost = 0.0;
  double penalty_cost = 0.0;
  double total = 0.0;
};

class SubtourDetected : public std::runtime_error {
 public:
  explicit SubtourDetected(std::vector<int> cycle);
  const std::vector<int>& cycle() const { return cycle_; }

 private:
  std::vector<int> cycle_;
};

class BrokenPath : public std::runtime_error {
 public:
  BrokenPath(int node, const std::string& detail);
  int node() const { return node_; }

 private:
  int node_;
};

FirstStagePlan empty_plan(const Instance& inst);
ScenarioRecourse empty_recourse(const Instance& inst);

// Every violated structural invariant, as human-readable messages.
std::vector<std::string> validate_instance(const Instance& inst);

double route_time(const Route& route, int sample, const Instance& inst);
double exceeding_time(const Route& route, int sample, const Instance& inst);
int cardinality(std::span<const double> values);
double violation_probability(const Route& route, const Instance& inst);

// Sum of W^s over the arcs set in one truck's arc grid (diagonal ignored).
double arcs_time(const Grid<int>& arcs, int sample, const Instance& inst);

// Follows successors from the depot. An arc grid without any arc yields an
// empty route.
Route routes_from_arcs(const Grid<int>& arcs, int truck = 0);
Grid<int> arcs_from_route(const Route& route, int num_locations);

// Total over scenarios; throws std::invalid_argument when the recourse list
// does not cover every scenario.
PaymentBreakdown evaluate(const FirstStagePlan& plan,
                          std::span<const ScenarioRecourse> recourse,
                          const Instance& inst);

// Constraint identifiers such as "(4) t=0" for every violated constraint.
std::vector<std::string> check_feasibility(const FirstStagePlan& plan,
                                           std::span<const ScenarioRecourse> recourse,
                                           const Instance& inst);

}  // namespace odpd
