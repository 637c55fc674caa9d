#pragma once
// Parameter sweeps and method comparisons producing CSV-ready tables.

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "odpd/solve.hpp"

namespace odpd::experiments {

enum class Parameter { kDeadline, kPenalty };

std::string_view parameter_name(Parameter p);
Parameter parse_parameter(std::string_view name);  // throws std::invalid_argument

struct ReportRow {
  std::string parameter;  // "deadline", "penalty" or "none" for comparisons
  double value = 0.0;
  std::string method;
  std::string outcome;
  bool has_solution = false;
  PaymentBreakdown breakdown;
  // Expected over scenarios of the largest per-truck violation probability.
  double violation_probability = 0.0;
  double wall_seconds = 0.0;
  int iterations = 0;
  long long nodes = 0;
  bool consistent = true;  // breakdown re-sums to the solver objective
  std::string message;
};

struct SweepReport {
  std::vector<ReportRow> rows;
};

double expected_worst_violation(std::span<const ScenarioRecourse> recourse, const Instance& inst);

// Points that fail are kept as flagged rows and the sweep continues.
SweepReport sweep(const Instance& inst, Parameter parameter, std::span<const double> values,
                  const SolveOptions& options);
SweepReport sweep_deadline(const Instance& inst, std::span<const double> deadlines,
                           const SolveOptions& options);
SweepReport sweep_penalty(const Instance& inst, std::span<const double> penalties,
                          const SolveOptions& options);

// Extensive form, L-shaped and, when the instance fits its budget, the oracle.
SweepReport compare_methods(const Instance& inst, const SolveOptions& options);

void write_csv(std::ostream& out, const SweepReport& report);

}  // namespace odpd::experiments
