#include "odpd/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

namespace odpd {
namespace {

std::string fmt_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

std::string join_ints(const std::vector<int>& values) {
  std::string out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k > 0) out += ",";
    out += std::to_string(values[k]);
  }
  return out;
}

bool is_binary(int value) { return value == 0 || value == 1; }

void check_square(const Matrix& m, int dim, const std::string& what,
                  std::vector<std::string>& report) {
  if (static_cast<int>(m.rows()) != dim || static_cast<int>(m.cols()) != dim) {
    report.push_back(what + " has shape " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()) + ", expected " + std::to_string(dim) + "x" +
                     std::to_string(dim));
    return;
  }
  for (double v : m.values()) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      report.push_back(what + " contains a negative or non-finite entry");
      return;
    }
  }
}

}  // namespace

SubtourDetected::SubtourDetected(std::vector<int> cycle)
    : std::runtime_error("subtour detected: {" + join_ints(cycle) + "}"),
      cycle_(std::move(cycle)) {}

BrokenPath::BrokenPath(int node, const std::string& detail)
    : std::runtime_error("broken path at location " + std::to_string(node) + ": " + detail),
      node_(node) {}

double Instance::routing_cost(int u, int v) const {
  if (routing_cost_override) return (*routing_cost_override)(u, v);
  return routing_cost_per_km * distance_km(u, v);
}

double Instance::min_carrier_charge(int customer) const {
  if (carriers.empty()) throw std::logic_error("no carrier available");
  double best = std::numeric_limits<double>::infinity();
  for (const Carrier& carrier : carriers) {
    best = std::min(best, carrier.per_customer_charge.at(customer));
  }
  return best;
}

FirstStagePlan empty_plan(const Instance& inst) {
  FirstStagePlan plan;
  plan.reserved.assign(inst.num_trucks(), 0);
  plan.assigned = Grid<int>(inst.num_customers(), inst.num_trucks(), 0);
  return plan;
}

ScenarioRecourse empty_recourse(const Instance& inst) {
  ScenarioRecourse rec;
  const int n = inst.num_customers();
  rec.carrier_assign = Grid<int>(n, inst.num_carriers(), 0);
  rec.arcs.assign(inst.num_trucks(), Grid<int>(n + 1, n + 1, 0));
  rec.order = Grid<int>(n, inst.num_trucks(), 0);
  rec.late_flags = Grid<int>(inst.num_trucks(), inst.num_samples(), 0);
  rec.routes.resize(inst.num_trucks());
  for (int t = 0; t < inst.num_trucks(); ++t) rec.routes[t].truck = t;
  return rec;
}

std::vector<std::string> validate_instance(const Instance& inst) {
  std::vector<std::string> report;
  const int n = inst.num_customers();
  const int dim = n + 1;

  for (int c = 0; c < n; ++c) {
    if (!(inst.customers[c].weight_kg >= 0.0)) {
      report.push_back("customer " + std::to_string(c + 1) + " has negative weight");
    }
  }
  for (int t = 0; t < inst.num_trucks(); ++t) {
    if (!(inst.trucks[t].capacity_kg > 0.0)) {
      report.push_back("truck " + std::to_string(t) + " has non-positive capacity");
    }
    if (!(inst.trucks[t].initial_cost >= 0.0)) {
      report.push_back("truck " + std::to_string(t) + " has negative initial cost");
    }
  }
  for (int r = 0; r < inst.num_carriers(); ++r) {
    const auto& charges = inst.carriers[r].per_customer_charge;
    if (static_cast<int>(charges.size()) != n) {
      report.push_back("carrier " + std::to_string(r) + " lists " +
                       std::to_string(charges.size()) + " charges, expected " +
                       std::to_string(n));
    } else if (std::any_of(charges.begin(), charges.end(),
                           [](double v) { return !(v >= 0.0); })) {
      report.push_back("carrier " + std::to_string(r) + " has a negative charge");
    }
  }

  check_square(inst.distance_km, dim, "distance matrix", report);
  if (inst.routing_cost_override) {
    check_square(*inst.routing_cost_override, dim, "routing cost matrix", report);
  }
  if (inst.travel_time_samples.empty()) {
    report.push_back("at least one travel-time sample is required");
  }
  for (int s = 0; s < inst.num_samples(); ++s) {
    check_square(inst.travel_time_samples[s], dim,
                 "travel-time sample " + std::to_string(s), report);
  }

  if (inst.scenarios.empty()) report.push_back("at least one demand scenario is required");
  double prob_sum = 0.0;
  for (int w = 0; w < inst.num_scenarios(); ++w) {
    const Scenario& sc = inst.scenarios[w];
    if (!(sc.probability >= 0.0 && sc.probability <= 1.0)) {
      report.push_back("scenario " + std::to_string(w) + " probability " +
                       fmt_number(sc.probability) + " outside [0,1]");
    }
    prob_sum += sc.probability;
    if (static_cast<int>(sc.demand.size()) != n) {
      report.push_back("scenario " + std::to_string(w) + " lists " +
                       std::to_string(sc.demand.size()) + " demands, expected " +
                       std::to_string(n));
    } else if (!std::all_of(sc.demand.begin(), sc.demand.end(), is_binary)) {
      report.push_back("scenario " + std::to_string(w) + " has a non-binary demand");
    }
  }
  if (!inst.scenarios.empty() && std::fabs(prob_sum - 1.0) > 1e-9) {
    report.push_back("scenario probabilities sum to " + fmt_number(prob_sum));
  }

  if (!(inst.deadline_minutes > 0.0)) report.push_back("deadline must be positive");
  if (!(inst.penalty_cost >= 0.0)) report.push_back("penalty cost must be nonnegative");
  if (!(inst.routing_cost_per_km >= 0.0)) {
    report.push_back("routing cost per km must be nonnegative");
  }
  return report;
}

double route_time(const Route& route, int sample, const Instance& inst) {
  if (sample < 0 || sample >= inst.num_samples()) {
    throw std::out_of_range("travel-time sample index " + std::to_string(sample) +
                            " out of range");
  }
  const Matrix& w = inst.travel_time_samples[sample];
  double total = 0.0;
  int prev = 0;
  for (int loc : route.visit_sequence) {
    total += w(prev, loc);
    prev = loc;
  }
  if (!route.visit_sequence.empty()) total += w(prev, 0);
  return total;
}

double exceeding_time(const Route& route, int sample, const Instance& inst) {
  return std::max(0.0, route_time(route, sample, inst) - inst.deadline_minutes);
}

int cardinality(std::span<const double> values) {
  return static_cast<int>(std::count_if(values.begin(), values.end(),
                                        [](double v) { return std::fabs(v) > kNonzeroTol; }));
}

double violation_probability(const Route& route, const Instance& inst) {
  const int samples = inst.num_samples();
  if (samples == 0) throw std::invalid_argument("instance has no travel-time samples");
  std::vector<double> exceed(samples);
  for (int s = 0; s < samples; ++s) exceed[s] = exceeding_time(route, s, inst);
  return static_cast<double>(cardinality(exceed)) / samples;
}

double arcs_time(const Grid<int>& arcs, int sample, const Instance& inst) {
  const Matrix& w = inst.travel_time_samples.at(sample);
  double total = 0.0;
  for (std::size_t u = 0; u < arcs.rows(); ++u) {
    for (std::size_t v = 0; v < arcs.cols(); ++v) {
      if (u != v && arcs(u, v) != 0) total += w(u, v) * arcs(u, v);
    }
  }
  return total;
}

Route routes_from_arcs(const Grid<int>& arcs, int truck) {
  const int dim = static_cast<int>(arcs.rows());
  std::vector<int> out_deg(dim, 0), in_deg(dim, 0), succ(dim, -1);
  for (int u = 0; u < dim; ++u) {
    for (int v = 0; v < dim; ++v) {
      if (arcs(u, v) == 0) continue;
      if (u == v && u == 0) throw BrokenPath(0, "depot self-loop");
      ++out_deg[u];
      ++in_deg[v];
      succ[u] = v;
    }
  }
  for (int u = 0; u < dim; ++u) {
    if (in_deg[u] != out_deg[u]) {
      throw BrokenPath(u, "in-degree " + std::to_string(in_deg[u]) + " != out-degree " +
                              std::to_string(out_deg[u]));
    }
    if (out_deg[u] > 1) {
      throw BrokenPath(u, "degree " + std::to_string(out_deg[u]) + " exceeds 1");
    }
  }

  Route route;
  route.truck = truck;
  std::vector<char> seen(dim, 0);
  seen[0] = 1;
  if (out_deg[0] == 1) {
    for (int v = succ[0]; v != 0; v = succ[v]) {
      seen[v] = 1;
      route.visit_sequence.push_back(v);
    }
  }
  for (int u = 1; u < dim; ++u) {
    if (seen[u] || out_deg[u] == 0) continue;
    std::vector<int> cycle;
    for (int v = u; !seen[v]; v = succ[v]) {
      seen[v] = 1;
      cycle.push_back(v);
    }
    throw SubtourDetected(std::move(cycle));
  }
  return route;
}

Grid<int> arcs_from_route(const Route& route, int num_locations) {
  Grid<int> arcs(num_locations, num_locations, 0);
  int prev = 0;
  for (int loc : route.visit_sequence) {
    arcs(prev, loc) = 1;
    prev = loc;
  }
  if (!route.visit_sequence.empty()) arcs(prev, 0) = 1;
  return arcs;
}

PaymentBreakdown evaluate(const FirstStagePlan& plan,
                          std::span<const ScenarioRecourse> recourse,
                          const Instance& inst) {
  if (static_cast<int>(recourse.size()) < inst.num_scenarios()) {
    throw std::invalid_argument("recourse missing for scenario " +
                                std::to_string(recourse.size()));
  }
  const int n = inst.num_customers();
  const int trucks = inst.num_trucks();
  const int samples = inst.num_samples();

  PaymentBreakdown out;
  for (int c = 0; c < n; ++c) {
    for (int t = 0; t < trucks; ++t) out.assignment_term += plan.assigned(c, t);
  }
  for (int t = 0; t < trucks; ++t) {
    out.truck_initial += inst.trucks[t].initial_cost * plan.reserved[t];
  }

  std::vector<double> exceed(samples);
  for (int w = 0; w < inst.num_scenarios(); ++w) {
    const double prob = inst.scenarios[w].probability;
    const ScenarioRecourse& rec = recourse[w];
    double carrier = 0.0;
    for (int c = 0; c < n; ++c) {
      for (int r = 0; r < inst.num_carriers(); ++r) {
        carrier += inst.carriers[r].per_customer_charge[c] * rec.carrier_assign(c, r);
      }
    }
    double routing = 0.0;
    double penalty = 0.0;
    for (int t = 0; t < trucks; ++t) {
      const Grid<int>& arcs = rec.arcs[t];
      for (int u = 0; u <= n; ++u) {
        for (int v = 0; v <= n; ++v) {
          if (arcs(u, v) != 0) routing += inst.routing_cost(u, v) * arcs(u, v);
        }
      }
      for (int s = 0; s < samples; ++s) {
        exceed[s] = std::max(0.0, arcs_time(arcs, s, inst) - inst.deadline_minutes);
      }
      penalty += inst.penalty_cost * cardinality(exceed);
    }
    out.carrier_charges += prob * carrier;
    out.routing_cost += prob * routing;
    out.penalty_cost += prob * penalty;
  }
  out.total = out.assignment_term + out.truck_initial + out.carrier_charges +
              out.routing_cost + out.penalty_cost;
  return out;
}

std::vector<std::string> check_feasibility(const FirstStagePlan& plan,
                                           std::span<const ScenarioRecourse> recourse,
                                           const Instance& inst) {
  std::vector<std::string> v;
  const int n = inst.num_customers();
  const int trucks = inst.num_trucks();
  const int carriers = inst.num_carriers();
  const int samples = inst.num_samples();
  const int dim = n + 1;

  if (static_cast<int>(plan.reserved.size()) != trucks ||
      static_cast<int>(plan.assigned.rows()) != n ||
      static_cast<int>(plan.assigned.cols()) != trucks) {
    v.push_back("plan shape");
    return v;
  }
  auto id = [](const char* family, std::initializer_list<std::pair<const char*, int>> parts) {
    std::string s = family;
    bool first = true;
    for (const auto& [key, val] : parts) {
      s += first ? " " : ", ";
      s += key;
      s += "=";
      s += std::to_string(val);
      first = false;
    }
    return s;
  };

  for (int t = 0; t < trucks; ++t) {
    if (!is_binary(plan.reserved[t])) v.push_back(id("(12) W", {{"t", t}}));
    double load = 0.0;
    bool used = false;
    for (int c = 0; c < n; ++c) {
      const int x = plan.assigned(c, t);
      if (!is_binary(x)) v.push_back(id("(12) X", {{"i", c + 1}, {"t", t}}));
      load += inst.customers[c].weight_kg * x;
      used = used || x != 0;
    }
    if (load > inst.trucks[t].capacity_kg + 1e-9) v.push_back(id("(4)", {{"t", t}}));
    if (used && plan.reserved[t] == 0) v.push_back(id("(5)", {{"t", t}}));
  }

  for (int w = 0; w < inst.num_scenarios(); ++w) {
    if (w >= static_cast<int>(recourse.size())) {
      v.push_back(id("recourse missing", {{"ω", w}}));
      continue;
    }
    const ScenarioRecourse& rec = recourse[w];
    const std::vector<int>& demand = inst.scenarios[w].demand;
    if (static_cast<int>(rec.carrier_assign.rows()) != n ||
        static_cast<int>(rec.carrier_assign.cols()) != carriers ||
        static_cast<int>(rec.arcs.size()) != trucks ||
        static_cast<int>(rec.order.rows()) != n ||
        static_cast<int>(rec.order.cols()) != trucks ||
        static_cast<int>(rec.late_flags.rows()) != trucks ||
        static_cast<int>(rec.late_flags.cols()) != samples) {
      v.push_back(id("recourse shape", {{"ω", w}}));
      continue;
    }

    for (int c = 0; c < n; ++c) {
      int cover = 0;
      for (int t = 0; t < trucks; ++t) cover += plan.assigned(c, t);
      for (int r = 0; r < carriers; ++r) {
        const int y = rec.carrier_assign(c, r);
        if (!is_binary(y)) v.push_back(id("(13) Y", {{"i", c + 1}, {"r", r}, {"ω", w}}));
        cover += y;
      }
      if (cover < demand[c]) v.push_back(id("(3)", {{"i", c + 1}, {"ω", w}}));
    }

    for (int t = 0; t < trucks; ++t) {
      const Grid<int>& arcs = rec.arcs[t];
      if (static_cast<int>(arcs.rows()) != dim || static_cast<int>(arcs.cols()) != dim) {
        v.push_back(id("recourse shape", {{"t", t}, {"ω", w}}));
        continue;
      }
      int into_depot = 0;
      int out_of_depot = 0;
      for (int u = 0; u < dim; ++u) {
        for (int x = 0; x < dim; ++x) {
          if (!is_binary(arcs(u, x))) {
            v.push_back(id("(13) V", {{"u", u}, {"v", x}, {"t", t}, {"ω", w}}));
          }
        }
        if (arcs(u, u) != 0) v.push_back(id("(6)", {{"u", u}, {"t", t}, {"ω", w}}));
        into_depot += arcs(u, 0);
        out_of_depot += arcs(0, u);
      }
      if (into_depot > 1) v.push_back(id("(7)", {{"t", t}, {"ω", w}}));
      if (out_of_depot > 1) v.push_back(id("(8)", {{"t", t}, {"ω", w}}));
      for (int c = 0; c < n; ++c) {
        const int loc = c + 1;
        const int required = plan.assigned(c, t) * demand[c];
        int in_deg = 0;
        int out_deg = 0;
        for (int u = 0; u < dim; ++u) {
          in_deg += arcs(u, loc);
          out_deg += arcs(loc, u);
        }
        if (in_deg != required) v.push_back(id("(9)", {{"i", loc}, {"t", t}, {"ω", w}}));
        if (out_deg != required) v.push_back(id("(10)", {{"i", loc}, {"t", t}, {"ω", w}}));
      }
      for (int c = 0; c < n; ++c) {
        const int s_val = rec.order(c, t);
        if (s_val < 0 || s_val > n) {
          v.push_back(id("(14) S", {{"i", c + 1}, {"t", t}, {"ω", w}}));
        }
      }
      for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) {
          if (i == j) continue;
          if (rec.order(i - 1, t) - rec.order(j - 1, t) + n * arcs(i, j) > n - 1) {
            v.push_back(id("(11)", {{"i", i}, {"j", j}, {"t", t}, {"ω", w}}));
          }
        }
      }
      for (int s = 0; s < samples; ++s) {
        const int z = rec.late_flags(t, s);
        if (!is_binary(z)) v.push_back(id("(19) Z", {{"t", t}, {"s", s}, {"ω", w}}));
        if (z == 0 && arcs_time(arcs, s, inst) - inst.deadline_minutes > kNonzeroTol) {
          v.push_back(id("(18)", {{"t", t}, {"s", s}, {"ω", w}}));
        }
      }
    }
  }
  return v;
}

}  // namespace odpd
