#include "odpd/formulation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <string>

namespace odpd {
namespace {

using milp::MilpProblem;
using milp::Sense;
using milp::Term;
using milp::VarId;

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (k > 0) out += "; ";
    out += parts[k];
  }
  return out;
}

std::string name_of(const char* prefix, std::initializer_list<int> ids) {
  std::string out = prefix;
  for (int id : ids) out += "_" + std::to_string(id);
  return out;
}

void require_valid(const Instance& inst) {
  auto report = validate_instance(inst);
  if (!report.empty()) throw InvalidInstance(report);
}

struct FirstStageVars {
  // x[c][t] for customer index c (0-based).
  std::vector<std::vector<VarId>> x;
  std::vector<VarId> w;
};

FirstStageVars add_first_stage(const Instance& inst, const BigMPolicy& big_m,
                               MilpProblem& p, VariableIndex& index) {
  const int n = inst.num_customers();
  const int trucks = inst.num_trucks();
  FirstStageVars fs;
  fs.x.assign(n, std::vector<VarId>(trucks));
  for (int c = 0; c < n; ++c) {
    for (int t = 0; t < trucks; ++t) {
      fs.x[c][t] = p.add_binary(name_of("X", {c + 1, t}));
      index.add(VarKey::x(c + 1, t), fs.x[c][t]);
      p.set_objective(fs.x[c][t], 1.0);
    }
  }
  for (int t = 0; t < trucks; ++t) {
    fs.w.push_back(p.add_binary(name_of("W", {t})));
    index.add(VarKey::w(t), fs.w.back());
    p.set_objective(fs.w.back(), inst.trucks[t].initial_cost);
  }
  for (int t = 0; t < trucks; ++t) {
    std::vector<Term> load;
    for (int c = 0; c < n; ++c) load.push_back({fs.x[c][t], inst.customers[c].weight_kg});
    p.add_constraint(name_of("cap", {t}), std::move(load), Sense::kLessEqual,
                     inst.trucks[t].capacity_kg);
  }
  for (int t = 0; t < trucks; ++t) {
    std::vector<Term> act;
    for (int c = 0; c < n; ++c) act.push_back({fs.x[c][t], 1.0});
    act.push_back({fs.w[t], -big_m.delta_assignment});
    p.add_constraint(name_of("act", {t}), std::move(act), Sense::kLessEqual, 0.0);
  }
  return fs;
}

// Second-stage block of one scenario. With `fs` the assignment variables are
// decision variables (extensive form); otherwise `fixed` supplies X-bar.
void add_recourse_block(const Instance& inst, int w, const BigMPolicy& big_m,
                        const FirstStageVars* fs, const FirstStagePlan* fixed,
                        MilpProblem& p, VariableIndex& index) {
  const int n = inst.num_customers();
  const int dim = n + 1;
  const int trucks = inst.num_trucks();
  const int carriers = inst.num_carriers();
  const int samples = inst.num_samples();
  const Scenario& sc = inst.scenarios[w];
  const double prob = sc.probability;

  std::vector<std::vector<VarId>> y(n, std::vector<VarId>(carriers));
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < carriers; ++r) {
      y[c][r] = p.add_binary(name_of("Y", {c + 1, r, w}));
      index.add(VarKey::y(c + 1, r, w), y[c][r]);
      p.set_objective(y[c][r], prob * inst.carriers[r].per_customer_charge[c]);
    }
  }
  // v[t][u][v]
  std::vector<std::vector<std::vector<VarId>>> v(
      trucks, std::vector<std::vector<VarId>>(dim, std::vector<VarId>(dim)));
  for (int t = 0; t < trucks; ++t) {
    for (int a = 0; a < dim; ++a) {
      for (int b = 0; b < dim; ++b) {
        v[t][a][b] = p.add_binary(name_of("V", {a, b, t, w}));
        index.add(VarKey::v(a, b, t, w), v[t][a][b]);
        const double cost = prob * inst.routing_cost(a, b);
        if (cost != 0.0) p.set_objective(v[t][a][b], cost);
      }
    }
  }
  std::vector<std::vector<VarId>> s(n, std::vector<VarId>(trucks));
  for (int c = 0; c < n; ++c) {
    for (int t = 0; t < trucks; ++t) {
      s[c][t] = p.add_integer(name_of("S", {c + 1, t, w}), 0.0, n);
      index.add(VarKey::s(c + 1, t, w), s[c][t]);
    }
  }
  std::vector<std::vector<VarId>> z(trucks, std::vector<VarId>(samples));
  for (int t = 0; t < trucks; ++t) {
    for (int k = 0; k < samples; ++k) {
      z[t][k] = p.add_binary(name_of("Z", {t, k, w}));
      index.add(VarKey::z(t, k, w), z[t][k]);
      p.set_objective(z[t][k], prob * inst.penalty_cost);
    }
  }

  auto fixed_x = [&](int c, int t) { return static_cast<double>(fixed->assigned(c, t)); };

  // (3) coverage
  for (int c = 0; c < n; ++c) {
    std::vector<Term> terms;
    double rhs = sc.demand[c];
    for (int t = 0; t < trucks; ++t) {
      if (fs) {
        terms.push_back({fs->x[c][t], 1.0});
      } else {
        rhs -= fixed_x(c, t);
      }
    }
    for (int r = 0; r < carriers; ++r) terms.push_back({y[c][r], 1.0});
    p.add_constraint(name_of("cover", {c + 1, w}), std::move(terms), Sense::kGreaterEqual, rhs);
  }
  for (int t = 0; t < trucks; ++t) {
    // (6) no self-loops
    for (int a = 0; a < dim; ++a) {
      p.add_constraint(name_of("noloop", {a, t, w}), {{v[t][a][a], 1.0}}, Sense::kEqual, 0.0);
    }
    // (7)-(8) depot entered and left at most once
    std::vector<Term> into, out_of;
    for (int a = 0; a < dim; ++a) {
      into.push_back({v[t][a][0], 1.0});
      out_of.push_back({v[t][0][a], 1.0});
    }
    p.add_constraint(name_of("depin", {t, w}), std::move(into), Sense::kLessEqual, 1.0);
    p.add_constraint(name_of("depout", {t, w}), std::move(out_of), Sense::kLessEqual, 1.0);
    // (9)-(10) customer degree equals X * D
    for (int c = 0; c < n; ++c) {
      const int loc = c + 1;
      std::vector<Term> in_terms, out_terms;
      for (int a = 0; a < dim; ++a) {
        in_terms.push_back({v[t][a][loc], 1.0});
        out_terms.push_back({v[t][loc][a], 1.0});
      }
      double rhs = 0.0;
      if (fs) {
        if (sc.demand[c] != 0) {
          in_terms.push_back({fs->x[c][t], -static_cast<double>(sc.demand[c])});
          out_terms.push_back({fs->x[c][t], -static_cast<double>(sc.demand[c])});
        }
      } else {
        rhs = fixed_x(c, t) * sc.demand[c];
      }
      p.add_constraint(name_of("in", {loc, t, w}), std::move(in_terms), Sense::kEqual, rhs);
      p.add_constraint(name_of("out", {loc, t, w}), std::move(out_terms), Sense::kEqual, rhs);
    }
    // (11) MTZ ordering
    for (int i = 1; i <= n; ++i) {
      for (int j = 1; j <= n; ++j) {
        if (i == j) continue;
        p.add_constraint(name_of("mtz", {i, j, t, w}),
                         {{s[i - 1][t], 1.0}, {s[j - 1][t], -1.0}, {v[t][i][j], double(n)}},
                         Sense::kLessEqual, n - 1.0);
      }
    }
    // (18) late flag forced when the route under sample k exceeds the deadline
    for (int k = 0; k < samples; ++k) {
      const Matrix& time = inst.travel_time_samples[k];
      std::vector<Term> terms;
      for (int a = 0; a < dim; ++a) {
        for (int b = 0; b < dim; ++b) {
          if (a != b && time(a, b) != 0.0) terms.push_back({v[t][a][b], time(a, b)});
        }
      }
      terms.push_back({z[t][k], -big_m.delta_deadline});
      p.add_constraint(name_of("late", {t, k, w}), std::move(terms), Sense::kLessEqual,
                       inst.deadline_minutes);
    }
  }
}

int round_checked(double value, const VarKey& key) {
  const double r = std::round(value);
  if (std::fabs(value - r) > 1e-6) {
    throw DecodeError("non-integral value " + std::to_string(value) + " for variable family " +
                      std::to_string(static_cast<int>(key.family)));
  }
  return static_cast<int>(r);
}

}  // namespace

InvalidInstance::InvalidInstance(const std::vector<std::string>& violations)
    : std::invalid_argument("invalid instance: " + join(violations)), violations_(violations) {}

void VariableIndex::add(VarKey key, milp::VarId id) {
  if (!ids_.emplace(key, id).second) throw std::logic_error("duplicate variable key");
  if (id.value != static_cast<int>(keys_.size())) {
    throw std::logic_error("variables must be indexed in declaration order");
  }
  keys_.push_back(key);
}

std::optional<milp::VarId> VariableIndex::find(const VarKey& key) const {
  auto it = ids_.find(key);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

milp::VarId VariableIndex::at(const VarKey& key) const {
  auto it = ids_.find(key);
  if (it == ids_.end()) throw std::out_of_range("variable key not in index");
  return it->second;
}

std::vector<int> VariableIndex::scenarios() const {
  std::set<int> ids;
  for (const VarKey& k : keys_) {
    switch (k.family) {
      case VarFamily::kY:
      case VarFamily::kS:
      case VarFamily::kZ:
        ids.insert(k.c);
        break;
      case VarFamily::kV:
        ids.insert(k.d);
        break;
      default:
        break;
    }
  }
  return {ids.begin(), ids.end()};
}

BigMPolicy BigMPolicy::defaults(const Instance& inst) {
  BigMPolicy policy;
  const int n = inst.num_customers();
  policy.delta_assignment = n;
  double longest = 0.0;
  for (const Matrix& m : inst.travel_time_samples) {
    std::vector<double> entries;
    for (std::size_t a = 0; a < m.rows(); ++a) {
      for (std::size_t b = 0; b < m.cols(); ++b) {
        if (a != b) entries.push_back(m(a, b));
      }
    }
    const std::size_t take = std::min<std::size_t>(entries.size(), n + 1);
    std::partial_sort(entries.begin(), entries.begin() + take, entries.end(),
                      std::greater<>());
    double sum = 0.0;
    for (std::size_t k = 0; k < take; ++k) sum += entries[k];
    longest = std::max(longest, sum);
  }
  policy.delta_deadline = std::max(1.0, longest - inst.deadline_minutes);
  return policy;
}

BuiltProblem build_extensive(const Instance& inst, const BigMPolicy& big_m) {
  require_valid(inst);
  BuiltProblem out;
  const FirstStageVars fs = add_first_stage(inst, big_m, out.problem, out.index);
  for (int w = 0; w < inst.num_scenarios(); ++w) {
    add_recourse_block(inst, w, big_m, &fs, nullptr, out.problem, out.index);
  }
  return out;
}

BuiltProblem build_master(const Instance& inst, const BigMPolicy& big_m,
                          const std::vector<OptimalityCut>& cuts, bool first_iteration) {
  require_valid(inst);
  if (first_iteration && !cuts.empty()) {
    throw std::invalid_argument("the first master iteration takes no cuts");
  }
  BuiltProblem out;
  const FirstStageVars fs = add_first_stage(inst, big_m, out.problem, out.index);
  if (first_iteration) return out;

  const VarId theta = out.problem.add_continuous("theta", 0.0, milp::kInf);
  out.index.add(VarKey::theta(), theta);
  out.problem.set_objective(theta, 1.0);
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    const OptimalityCut& cut = cuts[k];
    std::vector<Term> terms;
    for (int c = 0; c < inst.num_customers(); ++c) {
      for (int t = 0; t < inst.num_trucks(); ++t) {
        terms.push_back({fs.x[c][t], cut.coefficients(c, t)});
      }
    }
    terms.push_back({theta, 1.0});
    out.problem.add_constraint(name_of("cut", {static_cast<int>(k)}), std::move(terms),
                               Sense::kGreaterEqual, cut.rhs);
  }
  return out;
}

BuiltProblem build_subproblem(const Instance& inst, int scenario,
                              const FirstStagePlan& fixed_plan, const BigMPolicy& big_m) {
  require_valid(inst);
  if (scenario < 0 || scenario >= inst.num_scenarios()) {
    throw std::out_of_range("scenario index out of range");
  }
  if (static_cast<int>(fixed_plan.assigned.rows()) != inst.num_customers() ||
      static_cast<int>(fixed_plan.assigned.cols()) != inst.num_trucks()) {
    throw std::invalid_argument("fixed plan does not match the instance");
  }
  BuiltProblem out;
  add_recourse_block(inst, scenario, big_m, nullptr, &fixed_plan, out.problem, out.index);
  return out;
}

DecodedSolution decode(const milp::MilpSolution& solution, const VariableIndex& index,
                       const Instance& inst) {
  if (!solution.has_values()) throw DecodeError("solution carries no values");
  DecodedSolution out;
  for (int w : index.scenarios()) out.recourse.emplace(w, empty_recourse(inst));

  for (int id = 0; id < index.size(); ++id) {
    const VarKey& key = index.key(VarId{id});
    const double value = solution.values.at(id);
    if (key.family == VarFamily::kTheta) {
      out.theta = value;
      continue;
    }
    const int iv = round_checked(value, key);
    switch (key.family) {
      case VarFamily::kX:
        if (!out.plan) out.plan = empty_plan(inst);
        out.plan->assigned(key.a - 1, key.b) = iv;
        break;
      case VarFamily::kW:
        if (!out.plan) out.plan = empty_plan(inst);
        out.plan->reserved[key.a] = iv;
        break;
      case VarFamily::kY:
        out.recourse.at(key.c).carrier_assign(key.a - 1, key.b) = iv;
        break;
      case VarFamily::kV:
        out.recourse.at(key.d).arcs[key.c](key.a, key.b) = iv;
        break;
      case VarFamily::kS:
        out.recourse.at(key.c).order(key.a - 1, key.b) = iv;
        break;
      case VarFamily::kZ:
        out.recourse.at(key.c).late_flags(key.a, key.b) = iv;
        break;
      case VarFamily::kTheta:
        break;
    }
  }
  for (auto& [w, rec] : out.recourse) {
    for (int t = 0; t < inst.num_trucks(); ++t) rec.routes[t] = routes_from_arcs(rec.arcs[t], t);
  }
  return out;
}

}  // namespace odpd
