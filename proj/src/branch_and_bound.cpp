// LP-based branch and bound.
//
// Depth-first dive with the child nearest the LP value explored first;
// every `restart_interval` processed nodes the open node with the lowest
// bound is moved to the top of the stack. Branching takes the most
// fractional integer variable, lowest VarId on ties.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <vector>

#include "odpd/milp.hpp"

namespace odpd::milp {
namespace {

constexpr double kIntTol = 1e-6;

struct Node {
  std::vector<double> lower;
  std::vector<double> upper;
  double bound = -kInf;
};

int most_fractional(const MilpProblem& p, const std::vector<double>& x) {
  int best = -1;
  double best_score = kIntTol;
  for (int j = 0; j < p.num_variables(); ++j) {
    if (p.variables()[j].kind == VarKind::kContinuous) continue;
    const double f = x[j] - std::floor(x[j]);
    const double score = std::min(f, 1.0 - f);
    if (score > best_score + 1e-12) {
      best_score = score;
      best = j;
    }
  }
  return best;
}

std::vector<double> rounded(const MilpProblem& p, const std::vector<double>& x) {
  std::vector<double> out = x;
  for (int j = 0; j < p.num_variables(); ++j) {
    if (p.variables()[j].kind != VarKind::kContinuous) out[j] = std::round(out[j]);
  }
  return out;
}

}  // namespace

MilpSolution solve_bnb(const MilpProblem& problem, const BnbConfig& config) {
  problem.validate();
  if (!problem.has_integers()) return solve_lp(problem);
  for (const VarSpec& v : problem.variables()) {
    if (v.kind != VarKind::kContinuous && (!std::isfinite(v.lower) || !std::isfinite(v.upper))) {
      throw MalformedProblem("integer variable " + v.name + " must be bounded");
    }
  }

  const auto start = std::chrono::steady_clock::now();
  const double prune_eps = std::max(config.gap_tol, 1e-9);

  Node root;
  for (const VarSpec& v : problem.variables()) {
    // Integer bounds are rounded inward; the relaxation stays valid.
    const bool integral = v.kind != VarKind::kContinuous;
    root.lower.push_back(integral ? std::ceil(v.lower - kIntTol) : v.lower);
    root.upper.push_back(integral ? std::floor(v.upper + kIntTol) : v.upper);
  }

  std::vector<Node> open;
  open.push_back(std::move(root));

  MilpSolution result;
  std::vector<double> incumbent;
  double incumbent_obj = kInf;
  double pruned_bound = kInf;  // lowest bound among nodes discarded by the gap rule
  bool lp_failure = false;
  bool limit_hit = false;
  std::int64_t processed = 0;

  while (!open.empty()) {
    if (processed >= config.max_nodes) {
      limit_hit = true;
      break;
    }
    if (std::isfinite(config.time_limit_seconds)) {
      const double elapsed =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (elapsed > config.time_limit_seconds) {
        limit_hit = true;
        break;
      }
    }
    if (processed > 0 && config.restart_interval > 0 &&
        processed % config.restart_interval == 0) {
      auto best = std::min_element(open.begin(), open.end(), [](const Node& a, const Node& b) {
        return a.bound < b.bound;
      });
      std::iter_swap(best, open.end() - 1);
    }

    Node node = std::move(open.back());
    open.pop_back();
    if (node.bound >= incumbent_obj - prune_eps) {
      pruned_bound = std::min(pruned_bound, node.bound);
      continue;
    }

    MilpSolution lp = solve_lp(problem, node.lower, node.upper);
    ++processed;
    result.lp_iterations += lp.lp_iterations;
    if (lp.status == Status::kInfeasible) continue;
    if (lp.status == Status::kUnbounded) {
      result.status = Status::kUnbounded;
      result.nodes = processed;
      return result;
    }
    if (lp.status != Status::kOptimal) {
      lp_failure = true;
      continue;
    }
    const double z = std::max(lp.objective_value, node.bound);
    if (z >= incumbent_obj - prune_eps) {
      pruned_bound = std::min(pruned_bound, z);
      continue;
    }

    const int branch = most_fractional(problem, lp.values);
    if (branch < 0) {
      std::vector<double> candidate = rounded(problem, lp.values);
      if (problem.max_violation(candidate) > 1e-6) candidate = lp.values;
      const double obj = problem.objective_value(candidate);
      if (obj < incumbent_obj) {
        incumbent_obj = obj;
        incumbent = std::move(candidate);
      }
      continue;
    }

    const double value = lp.values[branch];
    Node down{node.lower, node.upper, z};
    down.upper[branch] = std::floor(value);
    Node up{std::move(node.lower), std::move(node.upper), z};
    up.lower[branch] = std::ceil(value);
    // The last pushed node is explored next.
    if (value - std::floor(value) >= 0.5) {
      open.push_back(std::move(down));
      open.push_back(std::move(up));
    } else {
      open.push_back(std::move(up));
      open.push_back(std::move(down));
    }
  }

  result.nodes = processed;
  double bound = std::min(incumbent_obj, pruned_bound);
  for (const Node& n : open) bound = std::min(bound, n.bound);

  if (incumbent.empty()) {
    result.status = (limit_hit || lp_failure) ? Status::kIterLimit : Status::kInfeasible;
    result.proven_bound = limit_hit ? bound : kInf;
    return result;
  }
  result.values = std::move(incumbent);
  result.objective_value = incumbent_obj;
  result.proven_bound = bound;
  const bool closed = !limit_hit && !lp_failure;
  result.status = (closed || incumbent_obj - bound <= config.gap_tol) ? Status::kOptimal
                                                                      : Status::kGapLimit;
  return result;
}

}  // namespace odpd::milp
