// odpd command-line front end.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "odpd/experiments.hpp"
#include "odpd/formulation.hpp"
#include "odpd/generator.hpp"
#include "odpd/instance_io.hpp"
#include "odpd/milp.hpp"
#include "odpd/solve.hpp"

namespace {

constexpr int kExitInput = 2;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError("bad value \"" + item + "\" in --values");
    }
  }
  if (out.empty()) throw InputError("--values is empty");
  return out;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw InputError("cannot write " + out_path);
  f << text;
}

void add_solver_flags(CLI::App* cmd, odpd::SolveOptions& o) {
  cmd->add_option("--gap", o.gap_tol, "absolute optimality gap")->capture_default_str();
  cmd->add_option("--time-limit", o.time_limit_seconds, "seconds per MILP solve");
  cmd->add_option("--max-nodes", o.max_nodes, "branch-and-bound node limit")
      ->capture_default_str();
  cmd->add_option("--epsilon", o.epsilon, "L-shaped convergence tolerance")
      ->capture_default_str();
  cmd->add_option("--max-iterations", o.max_iterations, "L-shaped iteration limit")
      ->capture_default_str();
}

void print_breakdown(const odpd::SolveResult& r) {
  const odpd::PaymentBreakdown& b = r.breakdown;
  std::printf("method      %s\n", std::string(odpd::method_name(r.method)).c_str());
  std::printf("outcome     %s\n", std::string(odpd::outcome_name(r.outcome)).c_str());
  if (!r.message.empty()) std::printf("note        %s\n", r.message.c_str());
  if (r.has_solution) {
    std::printf("objective   %.9g\n", r.objective);
    std::printf("assignment  %.9g\n", b.assignment_term);
    std::printf("trucks      %.9g\n", b.truck_initial);
    std::printf("carriers    %.9g\n", b.carrier_charges);
    std::printf("routing     %.9g\n", b.routing_cost);
    std::printf("penalty     %.9g\n", b.penalty_cost);
    std::printf("total       %.9g\n", b.total);
  }
  std::printf("wall        %.3fs\n", r.wall_seconds);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delivery planning with a private fleet and common carriers"};
  app.require_subcommand(1);

  odpd::GeneratorSpec spec;
  std::string gen_out;
  bool gen_csv = false;
  std::string base_time_csv;
  auto* gen = app.add_subcommand("gen", "generate a synthetic instance");
  gen->add_option("--customers", spec.n_customers)->capture_default_str();
  gen->add_option("--trucks", spec.n_trucks)->capture_default_str();
  gen->add_option("--carriers", spec.n_carriers)->capture_default_str();
  gen->add_option("--scenarios", spec.n_scenarios)->capture_default_str();
  gen->add_option("--samples", spec.n_samples)->capture_default_str();
  gen->add_option("--seed", spec.seed)->capture_default_str();
  gen->add_option("--area-km", spec.area_km)->capture_default_str();
  gen->add_option("--speed-kmh", spec.base_speed_kmh)->capture_default_str();
  gen->add_option("--base-time", base_time_csv, "CSV matrix of mean travel minutes");
  gen->add_option("--noise-std", spec.time_noise_std_seconds, "seconds")->capture_default_str();
  gen->add_option("--demand-prob", spec.demand_probability)->capture_default_str();
  gen->add_option("--charge-jitter", spec.carrier_charge_jitter)->capture_default_str();
  gen->add_option("--truck-cost", spec.pricing.truck_initial_cost)->capture_default_str();
  gen->add_option("--capacity", spec.pricing.truck_capacity_kg)->capture_default_str();
  gen->add_option("--weight", spec.pricing.package_weight_kg)->capture_default_str();
  gen->add_option("--carrier-charge", spec.pricing.carrier_charge)->capture_default_str();
  gen->add_option("--rate", spec.pricing.routing_cost_per_km)->capture_default_str();
  gen->add_option("--penalty", spec.pricing.penalty_cost)->capture_default_str();
  gen->add_option("--deadline", spec.pricing.deadline_minutes)->capture_default_str();
  gen->add_option("--out", gen_out, "instance file")->required();
  gen->add_flag("--csv", gen_csv, "write matrices to CSV sidecar files");

  std::string instance_path;
  std::string out_path;
  std::string method = "extensive";
  std::string trace_path;
  odpd::SolveOptions solve_opts;
  auto* solve = app.add_subcommand("solve", "solve an instance");
  solve->add_option("--instance", instance_path)->required();
  solve->add_option("--method", method)
      ->check(CLI::IsMember({"extensive", "lshaped", "oracle"}))
      ->capture_default_str();
  solve->add_option("--out", out_path, "solution file");
  solve->add_option("--trace", trace_path, "L-shaped iteration trace (one JSON line each)");
  add_solver_flags(solve, solve_opts);

  auto* export_lp = app.add_subcommand("export-lp", "write the extensive form in LP format");
  export_lp->add_option("--instance", instance_path)->required();
  export_lp->add_option("--out", out_path, "LP file, stdout when omitted");

  std::string parameter;
  std::string values;
  odpd::SolveOptions sweep_opts;
  auto* sweep = app.add_subcommand("sweep", "solve over a range of deadlines or penalties");
  sweep->add_option("--instance", instance_path)->required();
  sweep->add_option("--parameter", parameter)
      ->check(CLI::IsMember({"deadline", "penalty"}))
      ->required();
  sweep->add_option("--values", values, "comma-separated list")->required();
  sweep->add_option("--method", method)
      ->check(CLI::IsMember({"extensive", "lshaped", "oracle"}))
      ->capture_default_str();
  sweep->add_option("--out", out_path, "CSV report, stdout when omitted");
  add_solver_flags(sweep, sweep_opts);

  odpd::SolveOptions compare_opts;
  auto* compare = app.add_subcommand("compare", "run every method on one instance");
  compare->add_option("--instance", instance_path)->required();
  compare->add_option("--out", out_path, "CSV report, stdout when omitted");
  add_solver_flags(compare, compare_opts);

  auto* validate = app.add_subcommand("validate", "check an instance file");
  validate->add_option("--instance", instance_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*gen) {
      if (!base_time_csv.empty()) spec.base_time_minutes = odpd::io::read_csv_matrix(base_time_csv);
      odpd::Instance inst;
      try {
        inst = odpd::generate(spec);
      } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
      }
      odpd::io::write_instance(inst, gen_out, {gen_csv});
      return 0;
    }
    if (*validate) {
      try {
        odpd::io::load_instance(instance_path);
      } catch (const odpd::io::ValidationError& e) {
        for (const auto& v : e.violations()) std::printf("%s\n", v.c_str());
        return kExitInput;
      }
      std::printf("ok\n");
      return 0;
    }

    const odpd::Instance inst = odpd::io::load_instance(instance_path);
    if (*solve) {
      solve_opts.method = odpd::parse_method(method);
      const odpd::SolveResult r = odpd::solve(inst, solve_opts);
      print_breakdown(r);
      if (!out_path.empty() && r.has_solution) {
        odpd::io::SolutionDocument doc{std::string(odpd::method_name(r.method)),
                                       std::string(odpd::outcome_name(r.outcome)),
                                       r.plan,
                                       r.recourse,
                                       r.breakdown,
                                       r.wall_seconds};
        odpd::io::write_solution(doc, inst, out_path);
      }
      if (!trace_path.empty()) {
        std::ostringstream ss;
        odpd::lshaped::write_trace(ss, r.trace);
        emit(trace_path, ss.str());
      }
      return odpd::exit_code(r.outcome);
    }
    if (*export_lp) {
      const odpd::BuiltProblem built =
          odpd::build_extensive(inst, odpd::BigMPolicy::defaults(inst));
      emit(out_path, odpd::milp::write_lp_format(built.problem));
      return 0;
    }
    if (*sweep) {
      sweep_opts.method = odpd::parse_method(method);
      const std::vector<double> points = parse_values(values);
      const auto report = odpd::experiments::sweep(
          inst, odpd::experiments::parse_parameter(parameter), points, sweep_opts);
      std::ostringstream ss;
      odpd::experiments::write_csv(ss, report);
      emit(out_path, ss.str());
      return 0;
    }
    if (*compare) {
      const auto report = odpd::experiments::compare_methods(inst, compare_opts);
      std::ostringstream ss;
      odpd::experiments::write_csv(ss, report);
      emit(out_path, ss.str());
      return 0;
    }
  } catch (const InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  } catch (const odpd::io::FormatError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  } catch (const odpd::io::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
