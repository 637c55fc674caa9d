#include "odpd/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace odpd::experiments {
namespace {

ReportRow row_from(const SolveResult& res, const Instance& inst) {
  ReportRow row;
  row.method = std::string(method_name(res.method));
  row.outcome = std::string(outcome_name(res.outcome));
  row.has_solution = res.has_solution;
  row.wall_seconds = res.wall_seconds;
  row.iterations = res.iterations;
  row.nodes = res.nodes;
  row.message = res.message;
  if (res.has_solution) {
    row.breakdown = res.breakdown;
    row.violation_probability = expected_worst_violation(res.recourse, inst);
    row.consistent = std::fabs(res.breakdown.total - res.objective) <= 1e-6;
    if (!row.consistent) {
      row.message += (row.message.empty() ? "" : "; ") +
                     std::string("evaluated total differs from solver objective");
    }
  }
  return row;
}

ReportRow run_guarded(const Instance& inst, const SolveOptions& options) {
  try {
    return row_from(solve(inst, options), inst);
  } catch (const std::exception& e) {
    ReportRow row;
    row.method = std::string(method_name(options.method));
    row.outcome = "error";
    row.consistent = false;
    row.message = e.what();
    return row;
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::string_view parameter_name(Parameter p) {
  return p == Parameter::kDeadline ? "deadline" : "penalty";
}

Parameter parse_parameter(std::string_view name) {
  if (name == "deadline") return Parameter::kDeadline;
  if (name == "penalty") return Parameter::kPenalty;
  throw std::invalid_argument("unknown sweep parameter \"" + std::string(name) + "\"");
}

double expected_worst_violation(std::span<const ScenarioRecourse> recourse, const Instance& inst) {
  double out = 0.0;
  for (int w = 0; w < inst.num_scenarios() && w < static_cast<int>(recourse.size()); ++w) {
    double worst = 0.0;
    for (const Route& route : recourse[w].routes) {
      worst = std::max(worst, violation_probability(route, inst));
    }
    out += inst.scenarios[w].probability * worst;
  }
  return out;
}

SweepReport sweep(const Instance& inst, Parameter parameter, std::span<const double> values,
                  const SolveOptions& options) {
  SweepReport report;
  for (double value : values) {
    Instance point = inst;
    if (parameter == Parameter::kDeadline) {
      point.deadline_minutes = value;
    } else {
      point.penalty_cost = value;
    }
    ReportRow row = run_guarded(point, options);
    row.parameter = std::string(parameter_name(parameter));
    row.value = value;
    report.rows.push_back(std::move(row));
  }
  return report;
}

SweepReport sweep_deadline(const Instance& inst, std::span<const double> deadlines,
                           const SolveOptions& options) {
  return sweep(inst, Parameter::kDeadline, deadlines, options);
}

SweepReport sweep_penalty(const Instance& inst, std::span<const double> penalties,
                          const SolveOptions& options) {
  return sweep(inst, Parameter::kPenalty, penalties, options);
}

SweepReport compare_methods(const Instance& inst, const SolveOptions& options) {
  SweepReport report;
  for (Method m : {Method::kExtensive, Method::kLShaped, Method::kOracle}) {
    SolveOptions o = options;
    o.method = m;
    ReportRow row = run_guarded(inst, o);
    row.parameter = "none";
    report.rows.push_back(std::move(row));
  }
  return report;
}

void write_csv(std::ostream& out, const SweepReport& report) {
  out << "parameter,value,method,outcome,assignment_term,truck_initial,carrier_charges,"
         "routing_cost,penalty_cost,total,violation_probability,wall_seconds,iterations,"
         "nodes,consistent,message\n";
  for (const ReportRow& r : report.rows) {
    const PaymentBreakdown& b = r.breakdown;
    out << r.parameter << ',' << num(r.value) << ',' << r.method << ',' << r.outcome << ',';
    if (r.has_solution) {
      out << num(b.assignment_term) << ',' << num(b.truck_initial) << ','
          << num(b.carrier_charges) << ',' << num(b.routing_cost) << ',' << num(b.penalty_cost)
          << ',' << num(b.total) << ',' << num(r.violation_probability) << ',';
    } else {
      out << ",,,,,,,";
    }
    out << num(r.wall_seconds) << ',' << r.iterations << ',' << r.nodes << ','
        << (r.consistent ? 1 : 0) << ',' << csv_field(r.message) << '\n';
  }
}

}  // namespace odpd::experiments
