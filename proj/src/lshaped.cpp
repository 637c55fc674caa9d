#include "odpd/lshaped.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

#include "json.hpp"

namespace odpd::lshaped {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool usable(const milp::MilpSolution& sol) {
  return sol.has_values() &&
         (sol.status == milp::Status::kOptimal || sol.status == milp::Status::kGapLimit);
}

}  // namespace

double compute_P(const Instance& inst, int scenario, const ScenarioRecourse& rec) {
  double flags = 0.0;
  for (int t = 0; t < inst.num_trucks(); ++t) {
    for (int s = 0; s < inst.num_samples(); ++s) flags += rec.late_flags(t, s);
  }
  return inst.scenarios.at(scenario).probability * inst.penalty_cost * flags;
}

double compute_M(const Instance& inst, int scenario, const ScenarioRecourse& rec) {
  double sum = 0.0;
  const int dim = inst.num_locations();
  for (int i = 1; i < dim; ++i) {
    for (int t = 0; t < inst.num_trucks(); ++t) {
      const Grid<int>& v = rec.arcs[t];
      for (int u = 0; u < dim; ++u) {
        sum += inst.routing_cost(u, i) * v(u, i) + inst.routing_cost(i, u) * v(i, u);
      }
    }
  }
  return inst.scenarios.at(scenario).probability * sum;
}

double compute_J(const Instance& inst, int scenario) {
  if (inst.num_carriers() == 0) throw RefusedInstance("J is undefined without a carrier");
  const Scenario& sc = inst.scenarios.at(scenario);
  double sum = 0.0;
  for (int c = 0; c < inst.num_customers(); ++c) {
    if (sc.demand[c]) sum += inst.min_carrier_charge(c);
  }
  return sc.probability * sum;
}

double compute_I(const Instance& inst, int customer, int truck, int scenario,
                 const ScenarioRecourse& rec) {
  if (inst.num_carriers() == 0) throw RefusedInstance("I is undefined without a carrier");
  const Scenario& sc = inst.scenarios.at(scenario);
  const int i = customer + 1;
  const Grid<int>& v = rec.arcs.at(truck);
  double routed = 0.0;
  for (int u = 0; u < inst.num_locations(); ++u) {
    routed += inst.routing_cost(u, i) * v(u, i) + inst.routing_cost(i, u) * v(i, u);
  }
  return sc.probability * sc.demand[customer] * inst.min_carrier_charge(customer) -
         sc.probability * routed;
}

ScenarioTerms scenario_terms(const Instance& inst, int scenario, const ScenarioRecourse& rec) {
  ScenarioTerms out;
  out.J = compute_J(inst, scenario);
  out.P = compute_P(inst, scenario, rec);
  out.M = compute_M(inst, scenario, rec);
  out.I = Grid<double>(inst.num_customers(), inst.num_trucks(), 0.0);
  for (int c = 0; c < inst.num_customers(); ++c) {
    for (int t = 0; t < inst.num_trucks(); ++t) {
      out.I(c, t) = compute_I(inst, c, t, scenario, rec);
    }
  }
  return out;
}

OptimalityCut assemble_cut(const std::vector<ScenarioTerms>& terms) {
  OptimalityCut cut;
  if (terms.empty()) return cut;
  cut.coefficients = Grid<double>(terms[0].I.rows(), terms[0].I.cols(), 0.0);
  for (const ScenarioTerms& st : terms) {
    cut.rhs += st.J - st.P - st.M;
    for (std::size_t c = 0; c < st.I.rows(); ++c) {
      for (std::size_t t = 0; t < st.I.cols(); ++t) cut.coefficients(c, t) += st.I(c, t);
    }
  }
  return cut;
}

LShapedResult run(const Instance& inst, const LShapedConfig& config) {
  if (!(config.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (config.max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  if (inst.num_carriers() == 0) {
    throw RefusedInstance("L-shaped needs at least one carrier for complete recourse");
  }
  const BigMPolicy big_m = config.big_m ? *config.big_m : BigMPolicy::defaults(inst);
  const auto run_start = Clock::now();

  LShapedResult result;
  std::vector<OptimalityCut> cuts;
  double previous_H = std::numeric_limits<double>::infinity();
  for (int k = 0; k < config.max_iterations; ++k) {
    const auto iter_start = Clock::now();
    IterationRecord rec;
    rec.k = k;

    BuiltProblem master = build_master(inst, big_m, cuts, k == 0);
    const milp::MilpSolution msol = milp::solve_bnb(master.problem, config.master_solver);
    if (!usable(msol)) {
      throw LShapedError("master problem failed at iteration " + std::to_string(k) + ": " +
                         std::string(milp::status_name(msol.status)));
    }
    DecodedSolution mdec = decode(msol, master.index, inst);
    rec.plan = *mdec.plan;
    rec.theta_bar = mdec.theta ? *mdec.theta : kNoTheta;
    rec.master_objective = msol.objective_value;
    for (int c = 0; c < inst.num_customers(); ++c) {
      for (int t = 0; t < inst.num_trucks(); ++t) rec.assignment_term += rec.plan.assigned(c, t);
    }

    std::vector<ScenarioTerms> terms;
    for (int w = 0; w < inst.num_scenarios(); ++w) {
      BuiltProblem sub = build_subproblem(inst, w, rec.plan, big_m);
      const milp::MilpSolution ssol = milp::solve_bnb(sub.problem, config.subproblem_solver);
      if (!usable(ssol)) {
        throw LShapedError("subproblem " + std::to_string(w) + " failed at iteration " +
                           std::to_string(k) + ": " +
                           std::string(milp::status_name(ssol.status)));
      }
      DecodedSolution sdec = decode(ssol, sub.index, inst);
      rec.recourse.push_back(std::move(sdec.recourse.at(w)));
      rec.h.push_back(ssol.objective_value);
      terms.push_back(scenario_terms(inst, w, rec.recourse.back()));
    }

    rec.cut = assemble_cut(terms);
    double jm = 0.0;
    for (const ScenarioTerms& st : terms) jm += st.J - st.M;
    double ex = 0.0;
    for (int c = 0; c < inst.num_customers(); ++c) {
      for (int t = 0; t < inst.num_trucks(); ++t) {
        ex += rec.cut.coefficients(c, t) * rec.plan.assigned(c, t);
      }
    }
    rec.B = jm - ex;
    rec.H = 0.0;
    for (int t = 0; t < inst.num_trucks(); ++t) {
      rec.H += inst.trucks[t].initial_cost * rec.plan.reserved[t];
    }
    for (double h : rec.h) rec.H += h;
    rec.N = std::abs(rec.B - rec.theta_bar) <= config.epsilon ? 1 : 0;
    rec.wall_seconds = seconds_since(iter_start);

    cuts.push_back(rec.cut);
    result.trace.push_back(std::move(rec));
    const IterationRecord& cur = result.trace.back();
    if (!(cur.H < previous_H || cur.N != 1)) {
      result.best = result.trace[result.trace.size() - 2];
      result.converged = true;
      result.wall_seconds = seconds_since(run_start);
      return result;
    }
    previous_H = cur.H;
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < result.trace.size(); ++i) {
    if (result.trace[i].H < result.trace[best].H) best = i;
  }
  result.best = result.trace[best];
  result.converged = false;
  result.wall_seconds = seconds_since(run_start);
  return result;
}

void write_trace(std::ostream& out, const std::vector<IterationRecord>& trace) {
  for (const IterationRecord& rec : trace) {
    nlohmann::json line;
    line["k"] = rec.k;
    line["theta_bar"] = std::isfinite(rec.theta_bar) ? nlohmann::json(rec.theta_bar)
                                                     : nlohmann::json(nullptr);
    line["B"] = rec.B;
    line["H"] = rec.H;
    line["N"] = rec.N;
    line["wall_seconds"] = rec.wall_seconds;
    out << line.dump() << '\n';
  }
}

}  // namespace odpd::lshaped
