#include "odpd/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace odpd::oracle {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct BestTour {
  double value = 0.0;  // routing cost + penalty * late samples
  std::vector<int> tour;
};

double tour_routing(const std::vector<int>& tour, const Instance& inst) {
  double cost = 0.0;
  int prev = 0;
  for (int loc : tour) {
    cost += inst.routing_cost(prev, loc);
    prev = loc;
  }
  if (!tour.empty()) cost += inst.routing_cost(prev, 0);
  return cost;
}

int late_samples(const std::vector<int>& tour, const Instance& inst) {
  const Route route{0, tour};
  int late = 0;
  for (int s = 0; s < inst.num_samples(); ++s) {
    if (exceeding_time(route, s, inst) > kNonzeroTol) ++late;
  }
  return late;
}

// Best visiting order for every subset of customers (bit c = customer c).
std::vector<BestTour> best_tours(const Instance& inst) {
  const int n = inst.num_customers();
  std::vector<BestTour> best(std::size_t{1} << n);
  for (std::size_t mask = 1; mask < best.size(); ++mask) {
    std::vector<int> perm;
    for (int c = 0; c < n; ++c) {
      if (mask & (std::size_t{1} << c)) perm.push_back(c + 1);
    }
    double best_value = kInf;
    do {
      const double value =
          tour_routing(perm, inst) + inst.penalty_cost * late_samples(perm, inst);
      if (value < best_value - 1e-12) {
        best_value = value;
        best[mask].tour = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    best[mask].value = best_value;
  }
  return best;
}

}  // namespace

TourResult min_tour_cost(const std::vector<int>& locations, const Matrix& weight) {
  const int k = static_cast<int>(locations.size());
  if (k > 12) throw BudgetExceeded("Held-Karp limited to 12 locations");
  TourResult result;
  if (k == 0) return result;
  const std::size_t full = (std::size_t{1} << k) - 1;
  std::vector<double> dp((full + 1) * k, kInf);
  std::vector<int> parent((full + 1) * k, -1);
  for (int j = 0; j < k; ++j) dp[(std::size_t{1} << j) * k + j] = weight(0, locations[j]);
  for (std::size_t mask = 1; mask <= full; ++mask) {
    for (int last = 0; last < k; ++last) {
      const double here = dp[mask * k + last];
      if (!(mask & (std::size_t{1} << last)) || here == kInf) continue;
      for (int next = 0; next < k; ++next) {
        if (mask & (std::size_t{1} << next)) continue;
        const std::size_t nmask = mask | (std::size_t{1} << next);
        const double cand = here + weight(locations[last], locations[next]);
        if (cand < dp[nmask * k + next]) {
          dp[nmask * k + next] = cand;
          parent[nmask * k + next] = last;
        }
      }
    }
  }
  double best = kInf;
  int best_last = -1;
  for (int last = 0; last < k; ++last) {
    const double cand = dp[full * k + last] + weight(locations[last], 0);
    if (cand < best) {
      best = cand;
      best_last = last;
    }
  }
  result.cost = best;
  std::size_t mask = full;
  for (int cur = best_last; cur >= 0;) {
    result.tour.push_back(locations[cur]);
    const int prev = parent[mask * k + cur];
    mask &= ~(std::size_t{1} << cur);
    cur = prev;
  }
  std::reverse(result.tour.begin(), result.tour.end());
  return result;
}

OracleResult enumerate_optimal(const Instance& inst, const OracleLimits& limits) {
  const int n = inst.num_customers();
  const int trucks = inst.num_trucks();
  if (n > limits.max_customers || trucks > limits.max_trucks ||
      inst.num_scenarios() > limits.max_scenarios || inst.num_samples() > limits.max_samples) {
    throw BudgetExceeded("instance exceeds the oracle enumeration budget");
  }
  const std::vector<BestTour> tours = best_tours(inst);
  const int bits = n * trucks;

  std::vector<double> cheapest(n, kInf);
  if (inst.num_carriers() > 0) {
    for (int c = 0; c < n; ++c) cheapest[c] = inst.min_carrier_charge(c);
  }

  OracleResult result;
  result.optimal_total = kInf;
  long long best_mask = -1;
  for (long long mask = 0; mask < (1LL << bits); ++mask) {
    ++result.enumeration_count;
    auto x = [&](int c, int t) { return static_cast<int>((mask >> (c * trucks + t)) & 1); };
    double total = 0.0;
    bool feasible = true;
    for (int t = 0; t < trucks && feasible; ++t) {
      double load = 0.0;
      bool used = false;
      for (int c = 0; c < n; ++c) {
        if (x(c, t)) {
          load += inst.customers[c].weight_kg;
          total += 1.0;
          used = true;
        }
      }
      if (load > inst.trucks[t].capacity_kg + 1e-9) feasible = false;
      if (used) total += inst.trucks[t].initial_cost;
    }
    if (!feasible) continue;
    for (int w = 0; w < inst.num_scenarios() && feasible; ++w) {
      const Scenario& sc = inst.scenarios[w];
      double second = 0.0;
      for (int c = 0; c < n; ++c) {
        if (!sc.demand[c]) continue;
        bool covered = false;
        for (int t = 0; t < trucks; ++t) covered = covered || x(c, t);
        if (!covered) {
          if (inst.num_carriers() == 0) {
            feasible = false;
            break;
          }
          second += cheapest[c];
        }
      }
      for (int t = 0; t < trucks; ++t) {
        std::size_t subset = 0;
        for (int c = 0; c < n; ++c) {
          if (x(c, t) && sc.demand[c]) subset |= std::size_t{1} << c;
        }
        second += tours[subset].value;
      }
      total += sc.probability * second;
    }
    if (!feasible) continue;
    if (total < result.optimal_total - 1e-12) {
      result.optimal_total = total;
      best_mask = mask;
    }
  }
  if (best_mask < 0) throw NoFeasiblePlan("no plan satisfies capacity and coverage");

  auto x = [&](int c, int t) { return static_cast<int>((best_mask >> (c * trucks + t)) & 1); };
  result.plan = empty_plan(inst);
  for (int t = 0; t < trucks; ++t) {
    for (int c = 0; c < n; ++c) {
      result.plan.assigned(c, t) = x(c, t);
      if (x(c, t)) result.plan.reserved[t] = 1;
    }
  }
  for (int w = 0; w < inst.num_scenarios(); ++w) {
    const Scenario& sc = inst.scenarios[w];
    ScenarioRecourse rec = empty_recourse(inst);
    for (int c = 0; c < n; ++c) {
      if (!sc.demand[c]) continue;
      bool covered = false;
      for (int t = 0; t < trucks; ++t) covered = covered || x(c, t);
      if (covered) continue;
      int best_r = 0;
      for (int r = 1; r < inst.num_carriers(); ++r) {
        if (inst.carriers[r].per_customer_charge[c] <
            inst.carriers[best_r].per_customer_charge[c]) {
          best_r = r;
        }
      }
      rec.carrier_assign(c, best_r) = 1;
    }
    for (int t = 0; t < trucks; ++t) {
      std::size_t subset = 0;
      for (int c = 0; c < n; ++c) {
        if (x(c, t) && sc.demand[c]) subset |= std::size_t{1} << c;
      }
      Route route{t, tours[subset].tour};
      rec.arcs[t] = arcs_from_route(route, n + 1);
      for (std::size_t k = 0; k < route.visit_sequence.size(); ++k) {
        rec.order(route.visit_sequence[k] - 1, t) = static_cast<int>(k) + 1;
      }
      for (int s = 0; s < inst.num_samples(); ++s) {
        rec.late_flags(t, s) = exceeding_time(route, s, inst) > kNonzeroTol ? 1 : 0;
      }
      rec.routes[t] = std::move(route);
    }
    result.recourse.push_back(std::move(rec));
  }
  return result;
}

}  // namespace odpd::oracle
