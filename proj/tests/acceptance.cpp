// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "checks.hpp"
#include "odpd/experiments.hpp"
#include "odpd/generator.hpp"
#include "odpd/model.hpp"
#include "odpd/oracle.hpp"
#include "odpd/solve.hpp"
#include "support.hpp"

using namespace odpd;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int n, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", n, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Per-truck violation probability times s' must equal the late-flag count.
bool identity_holds(const SolveResult& r, const Instance& inst) {
  const int s = inst.num_samples();
  for (const ScenarioRecourse& rec : r.recourse) {
    for (int t = 0; t < inst.num_trucks(); ++t) {
      Route route = rec.routes.at(t);
      int flagged = 0;
      for (int k = 0; k < s; ++k) flagged += rec.late_flags(t, k);
      const double vp = violation_probability(route, inst);
      if (vp != static_cast<double>(flagged) / s) return false;
    }
  }
  return true;
}

int identity_checked = 0;
int identity_failed = 0;

void criterion1() {
  const std::vector<double> v{0, 3, 4, 0, 8, 1};
  const int c = cardinality(v);
  report(1, c == 4, fmt("cardinality([0,3,4,0,8,1]) = %d", c));
}

void criterion2() {
  Stopwatch clock;
  int agree = 0, feasible = 0, total = 0;
  std::string first_bad;
  for (int seed = 1; seed <= 50; ++seed) {
    const Instance inst = testing::battery_instance(seed, 2);
    ++total;
    SolveOptions opt;
    const SolveResult ext = solve(inst, opt);
    const oracle::OracleResult orc = oracle::enumerate_optimal(inst);
    const bool same = ext.outcome == Outcome::kSolved &&
                      std::abs(ext.objective - orc.optimal_total) <= 1e-6;
    agree += same;
    if (!same && first_bad.empty()) {
      first_bad = fmt(" (seed %d: %.9g vs %.9g)", seed, ext.objective, orc.optimal_total);
    }
    if (ext.has_solution && check_feasibility(ext.plan, ext.recourse, inst).empty()) ++feasible;
    if (ext.has_solution && ext.outcome == Outcome::kSolved) {
      ++identity_checked;
      if (!identity_holds(ext, inst)) ++identity_failed;
    }
  }
  const double secs = clock.seconds();
  report(2, agree == total && feasible == total && secs < 300.0,
         fmt("%d/%d extensive objectives match oracle, %d/%d feasible, %.1f s", agree, total,
             feasible, total, secs) +
             first_bad);
}

void criterion3() {
  Stopwatch clock;
  const testing::MtzReport rep = testing::mtz_equivalence_all(4);
  const double secs = clock.seconds();
  report(3, rep.mismatches == 0 && rep.tensors > 0 && secs < 60.0,
         fmt("n<=4: %lld tensors, %lld accepted, %lld mismatches, %.1f s", rep.tensors,
             rep.accepted, rep.mismatches, secs));
}

void criterion4() {
  Stopwatch clock;
  int within = 0, below = 0, infeasible = 0, total = 0;
  double worst = 0.0;
  for (int seed = 1; seed <= 30; ++seed) {
    const Instance inst = testing::battery_instance(seed, 3);
    ++total;
    SolveOptions opt;
    opt.method = Method::kLShaped;
    const SolveResult ls = solve(inst, opt);
    const double best = oracle::enumerate_optimal(inst).optimal_total;
    if (!ls.has_solution || !check_feasibility(ls.plan, ls.recourse, inst).empty()) {
      ++infeasible;
      continue;
    }
    const double got = ls.breakdown.total;
    if (got < best - 1e-6) ++below;
    const double rel = (got - best) / std::max(std::abs(best), 1e-9);
    worst = std::max(worst, rel);
    if (rel <= 0.10) ++within;
    if (ls.outcome == Outcome::kSolved) {
      ++identity_checked;
      if (!identity_holds(ls, inst)) ++identity_failed;
    }
  }
  report(4, below == 0 && infeasible == 0 && within * 10 >= total * 9,
         fmt("%d/%d within 10%%, %d below oracle, %d infeasible, worst +%.1f%%, %.1f s", within,
             total, below, infeasible, worst * 100.0, clock.seconds()));
}

Instance deadline_instance() {
  GeneratorSpec spec;
  spec.n_customers = 5;
  spec.n_trucks = 1;
  spec.n_carriers = 1;
  spec.n_scenarios = 2;
  spec.n_samples = 3;
  spec.seed = 7;
  spec.area_km = 10.0;
  spec.time_noise_std_seconds = 120.0;
  spec.demand_probability = 0.7;
  spec.pricing.truck_initial_cost = 20.0;
  spec.pricing.carrier_charge = 21.0;
  spec.pricing.routing_cost_per_km = 0.5;
  spec.pricing.penalty_cost = 5.0;
  return generate(spec);
}

// Longest time any single tour can take: the n+1 largest off-diagonal entries
// of the slowest sample.
double worst_tour_time(const Instance& inst) {
  double worst = 0.0;
  const int dim = inst.num_locations();
  for (const Matrix& W : inst.travel_time_samples) {
    std::vector<double> entries;
    for (int u = 0; u < dim; ++u)
      for (int v = 0; v < dim; ++v)
        if (u != v) entries.push_back(W(u, v));
    std::sort(entries.rbegin(), entries.rend());
    double sum = 0.0;
    for (int k = 0; k < dim && k < static_cast<int>(entries.size()); ++k) sum += entries[k];
    worst = std::max(worst, sum);
  }
  return worst;
}

void criterion5() {
  Stopwatch clock;
  const Instance inst = deadline_instance();
  const double top = worst_tour_time(inst);
  const std::vector<double> deadlines{0.1 * top, 0.2 * top, 0.3 * top,
                                      0.45 * top, 0.6 * top, 1.05 * top};
  SolveOptions opt;
  const auto rep = experiments::sweep_deadline(inst, deadlines, opt);
  bool ok = rep.rows.size() == deadlines.size();
  std::string trail;
  double prev = milp::kInf;
  for (const auto& row : rep.rows) {
    ok = ok && row.outcome == "solved";
    const double pen = row.breakdown.penalty_cost;
    if (pen > prev + 1e-9) ok = false;
    prev = pen;
    trail += fmt(" %.1f:%.4g", row.value, pen);
  }
  ok = ok && !rep.rows.empty() && rep.rows.back().breakdown.penalty_cost == 0.0;
  const double secs = clock.seconds();
  ok = ok && secs < 120.0;
  report(5, ok, "penalty by deadline" + trail + fmt(", %.1f s", secs));
}

void criterion6() {
  Stopwatch clock;
  const Instance base = testing::busting_instance();
  const std::vector<double> penalties{0.5, 1.5, 2.4, 2.6, 4.0, 10.0};
  SolveOptions opt;
  const auto rep = experiments::sweep_penalty(base, penalties, opt);
  bool ok = rep.rows.size() == penalties.size();
  std::string trail;
  for (std::size_t k = 0; ok && k < penalties.size(); ++k) {
    Instance inst = base;
    inst.penalty_cost = penalties[k];
    const auto orc = oracle::enumerate_optimal(inst);
    const bool to_carrier = orc.recourse.at(0).carrier_assign(2, 0) == 1;
    const auto& row = rep.rows[k];
    ok = ok && to_carrier == (penalties[k] > 2.5);
    ok = ok && std::abs(row.breakdown.total - orc.optimal_total) <= 1e-6;
    ok = ok && (penalties[k] > 2.5 ? row.breakdown.penalty_cost == 0.0
                                   : row.breakdown.penalty_cost > 0.0);
    trail += fmt(" %.1f:%s", penalties[k], to_carrier ? "carrier" : "truck");
  }
  report(6, ok, "threshold 2.5, customer 3 by" + trail + fmt(", %.1f s", clock.seconds()));
}

void criterion7() {
  report(7, identity_checked > 0 && identity_failed == 0,
         fmt("%d/%d solved battery instances satisfy vp*s' = sum Z",
             identity_checked - identity_failed, identity_checked));
}

void criterion8() {
  GeneratorSpec spec = testing::battery_spec(1, 1);
  spec.n_customers = 5;
  spec.n_trucks = 1;
  spec.n_carriers = 1;
  spec.n_samples = 3;
  spec.n_scenarios = 8;
  const Instance inst = generate(spec);
  SolveOptions ls_opt;
  ls_opt.method = Method::kLShaped;
  const SolveResult ls = solve(inst, ls_opt);
  SolveOptions ext_opt;
  ext_opt.time_limit_seconds = 60.0;
  const SolveResult ext = solve(inst, ext_opt);
  const bool ls_ok = ls.has_solution && std::isfinite(ls.wall_seconds);
  const bool ext_slower = ext.outcome == Outcome::kBudgetExhausted || ext.wall_seconds > ls.wall_seconds;
  report(8, ls_ok && ext_slower,
         fmt("q'=%d: lshaped %.3f s (%s), extensive %.3f s (%s)", inst.num_scenarios(),
             ls.wall_seconds, std::string(outcome_name(ls.outcome)).c_str(), ext.wall_seconds,
             std::string(outcome_name(ext.outcome)).c_str()));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string objective_line(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind("objective", 0) == 0) return line;
  return {};
}

void criterion9() {
  const fs::path dir = fs::temp_directory_path() / fmt("odpd_acceptance_%d", static_cast<int>(getpid()));
  fs::create_directories(dir);
  const std::string cli = ODPD_CLI_PATH;
  auto run = [&](const std::string& args) {
    const std::string cmd = "\"" + cli + "\" " + args;
    return std::system(cmd.c_str());
  };
  const std::string gen = "gen --customers 4 --trucks 1 --carriers 1 --scenarios 2 --samples 3 --seed 11 --out ";
  int rc = run(gen + (dir / "a.json").string() + " > /dev/null");
  rc |= run(gen + (dir / "b.json").string() + " > /dev/null");
  const std::string a = slurp(dir / "a.json"), b = slurp(dir / "b.json");
  const std::string solve = "solve --method extensive --instance " + (dir / "a.json").string() + " > ";
  rc |= run(solve + (dir / "s1.txt").string());
  rc |= run(solve + (dir / "s2.txt").string());
  const std::string o1 = objective_line(slurp(dir / "s1.txt"));
  const std::string o2 = objective_line(slurp(dir / "s2.txt"));
  const bool ok = rc == 0 && !a.empty() && a == b && !o1.empty() && o1 == o2;
  fs::remove_all(dir);
  report(9, ok, fmt("gen files %s (%zu bytes), solve '%s' vs '%s'", a == b ? "identical" : "differ",
                    a.size(), o1.c_str(), o2.c_str()));
}

}  // namespace

int main() {
  try {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
