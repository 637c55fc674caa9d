#include "odpd/instance_io.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "json.hpp"

namespace odpd::io {
namespace {

using json = nlohmann::ordered_json;

// Puts every array that holds only numbers on one line.
std::string compact_numeric_arrays(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '[') {
      std::size_t j = i + 1;
      bool numeric = true;
      while (j < text.size() && text[j] != ']') {
        const char c = text[j];
        if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.' ||
              c == 'e' || c == 'E' || c == ',' || std::isspace(static_cast<unsigned char>(c)))) {
          numeric = false;
          break;
        }
        ++j;
      }
      if (numeric && j < text.size()) {
        out += '[';
        bool first = true;
        std::string token;
        for (std::size_t k = i + 1; k <= j; ++k) {
          const char c = text[k];
          if (c == ',' || c == ']') {
            if (!token.empty()) {
              out += first ? "" : ", ";
              out += token;
              first = false;
            }
            token.clear();
          } else if (!std::isspace(static_cast<unsigned char>(c))) {
            token += c;
          }
        }
        out += ']';
        i = j + 1;
        continue;
      }
    }
    out += text[i++];
  }
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += "; ";
    out += s;
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(path.string() + ": cannot write file");
  out << text;
  if (!out) throw FormatError(path.string() + ": write failed");
}

std::pair<int, int> line_col(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw FormatError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(where + ": missing field \"" + key + "\"");
  return *it;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw FormatError(where + ": expected a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw FormatError(where + ": expected an integer");
  return v.get<int>();
}

const json& array(const json& v, const std::string& where) {
  if (!v.is_array()) throw FormatError(where + ": expected an array");
  return v;
}

Matrix inline_matrix(const json& v, const std::string& where) {
  array(v, where);
  const std::size_t rows = v.size();
  const std::size_t cols = rows ? array(v[0], where + "[0]").size() : 0;
  Matrix m(rows, cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string rw = where + "[" + std::to_string(r) + "]";
    if (array(v[r], rw).size() != cols) throw FormatError(rw + ": ragged matrix row");
    for (std::size_t c = 0; c < cols; ++c) {
      m(r, c) = number(v[r][c], rw + "[" + std::to_string(c) + "]");
    }
  }
  return m;
}

Matrix matrix_field(const json& v, const std::string& where,
                    const std::filesystem::path& base_dir) {
  if (v.is_object()) {
    const json& p = field(v, "csv", where);
    if (!p.is_string()) throw FormatError(where + ".csv: expected a path string");
    std::filesystem::path path = p.get<std::string>();
    if (path.is_relative()) path = base_dir / path;
    return read_csv_matrix(path);
  }
  return inline_matrix(v, where);
}

json matrix_json(const Matrix& m) {
  json out = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

json int_grid_json(const Grid<int>& g) {
  json out = json::array();
  for (std::size_t r = 0; r < g.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < g.cols(); ++c) row.push_back(g(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

json instance_json(const Instance& inst, const std::function<json(const Matrix&, const std::string&)>& mat) {
  json doc;
  doc["format"] = kInstanceFormat;
  doc["version"] = kInstanceVersion;
  doc["customers"] = json::array();
  for (const Customer& c : inst.customers) doc["customers"].push_back({{"weight_kg", c.weight_kg}});
  doc["trucks"] = json::array();
  for (const Truck& t : inst.trucks) {
    doc["trucks"].push_back({{"capacity_kg", t.capacity_kg}, {"initial_cost", t.initial_cost}});
  }
  doc["carriers"] = json::array();
  for (const Carrier& r : inst.carriers) {
    doc["carriers"].push_back({{"per_customer_charge", r.per_customer_charge}});
  }
  doc["deadline_minutes"] = inst.deadline_minutes;
  doc["penalty_cost"] = inst.penalty_cost;
  doc["routing_cost_per_km"] = inst.routing_cost_per_km;
  doc["distance_km"] = mat(inst.distance_km, "distance");
  if (inst.routing_cost_override) {
    doc["routing_cost"] = mat(*inst.routing_cost_override, "routing_cost");
  }
  doc["travel_time_samples"] = json::array();
  for (int s = 0; s < inst.num_samples(); ++s) {
    doc["travel_time_samples"].push_back(
        mat(inst.travel_time_samples[s], "sample" + std::to_string(s)));
  }
  doc["scenarios"] = json::array();
  for (const Scenario& sc : inst.scenarios) {
    doc["scenarios"].push_back({{"probability", sc.probability}, {"demand", sc.demand}});
  }
  return doc;
}

std::string format_g9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : std::runtime_error("invalid instance: " + join(violations)),
      violations_(std::move(violations)) {}

Instance parse_instance(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
    throw FormatError("line " + std::to_string(line) + ", column " + std::to_string(col) +
                      ": " + e.what());
  }
  const json& format = field(doc, "format", "document");
  if (!format.is_string() || format.get<std::string>() != kInstanceFormat) {
    throw FormatError("document: format must be \"" + std::string(kInstanceFormat) + "\"");
  }
  const int version = integer(field(doc, "version", "document"), "version");
  if (version != kInstanceVersion) {
    throw FormatError("document: unsupported version " + std::to_string(version));
  }

  Instance inst;
  const json& customers = array(field(doc, "customers", "document"), "customers");
  for (std::size_t i = 0; i < customers.size(); ++i) {
    const std::string w = "customers[" + std::to_string(i) + "]";
    inst.customers.push_back({number(field(customers[i], "weight_kg", w), w + ".weight_kg")});
  }
  const json& trucks = array(field(doc, "trucks", "document"), "trucks");
  for (std::size_t i = 0; i < trucks.size(); ++i) {
    const std::string w = "trucks[" + std::to_string(i) + "]";
    inst.trucks.push_back({number(field(trucks[i], "capacity_kg", w), w + ".capacity_kg"),
                           number(field(trucks[i], "initial_cost", w), w + ".initial_cost")});
  }
  const json& carriers = array(field(doc, "carriers", "document"), "carriers");
  for (std::size_t i = 0; i < carriers.size(); ++i) {
    const std::string w = "carriers[" + std::to_string(i) + "].per_customer_charge";
    const json& charges = array(field(carriers[i], "per_customer_charge", w), w);
    Carrier carrier;
    for (std::size_t c = 0; c < charges.size(); ++c) {
      carrier.per_customer_charge.push_back(number(charges[c], w + "[" + std::to_string(c) + "]"));
    }
    inst.carriers.push_back(std::move(carrier));
  }
  inst.deadline_minutes = number(field(doc, "deadline_minutes", "document"), "deadline_minutes");
  inst.penalty_cost = number(field(doc, "penalty_cost", "document"), "penalty_cost");
  inst.routing_cost_per_km =
      number(field(doc, "routing_cost_per_km", "document"), "routing_cost_per_km");
  inst.distance_km = matrix_field(field(doc, "distance_km", "document"), "distance_km", base_dir);
  if (doc.contains("routing_cost")) {
    inst.routing_cost_override = matrix_field(doc["routing_cost"], "routing_cost", base_dir);
  }
  const json& samples =
      array(field(doc, "travel_time_samples", "document"), "travel_time_samples");
  for (std::size_t s = 0; s < samples.size(); ++s) {
    inst.travel_time_samples.push_back(
        matrix_field(samples[s], "travel_time_samples[" + std::to_string(s) + "]", base_dir));
  }
  const json& scenarios = array(field(doc, "scenarios", "document"), "scenarios");
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const std::string w = "scenarios[" + std::to_string(i) + "]";
    Scenario sc;
    sc.probability = number(field(scenarios[i], "probability", w), w + ".probability");
    const json& demand = array(field(scenarios[i], "demand", w), w + ".demand");
    for (std::size_t c = 0; c < demand.size(); ++c) {
      sc.demand.push_back(integer(demand[c], w + ".demand[" + std::to_string(c) + "]"));
    }
    inst.scenarios.push_back(std::move(sc));
  }

  std::vector<std::string> violations = validate_instance(inst);
  if (!violations.empty()) throw ValidationError(std::move(violations));
  return inst;
}

Instance load_instance(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return parse_instance(text, path.parent_path().empty() ? "." : path.parent_path());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string instance_to_string(const Instance& inst) {
  return compact_numeric_arrays(
             instance_json(inst, [](const Matrix& m, const std::string&) { return matrix_json(m); })
                 .dump(2)) +
         "\n";
}

void write_instance(const Instance& inst, const std::filesystem::path& path,
                    const WriteOptions& options) {
  if (!options.csv_sidecars) {
    write_file(path, instance_to_string(inst));
    return;
  }
  const std::filesystem::path dir = path.parent_path();
  const std::string stem = path.stem().string();
  const json doc = instance_json(inst, [&](const Matrix& m, const std::string& tag) {
    const std::string name = stem + "." + tag + ".csv";
    write_csv_matrix(m, dir / name);
    return json{{"csv", name}};
  });
  write_file(path, compact_numeric_arrays(doc.dump(2)) + "\n");
}

Matrix read_csv_matrix(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      std::string cell = line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      const auto b = cell.find_first_not_of(" \t");
      const auto e = cell.find_last_not_of(" \t");
      cell = b == std::string::npos ? "" : cell.substr(b, e - b + 1);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
        throw FormatError(path.string() + ":" + std::to_string(line_no) + ": bad number \"" +
                          cell + "\"");
      }
      row.push_back(v);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (!rows.empty() && row.size() != rows[0].size()) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size(), 0.0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

std::string format_csv_matrix(const Matrix& m) {
  std::string out;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += format_g9(m(r, c));
    }
    out += '\n';
  }
  return out;
}

void write_csv_matrix(const Matrix& m, const std::filesystem::path& path) {
  write_file(path, format_csv_matrix(m));
}

std::vector<double> truck_violation_probabilities(std::span<const ScenarioRecourse> recourse,
                                                  const Instance& inst) {
  std::vector<double> out(inst.num_trucks(), 0.0);
  for (int w = 0; w < inst.num_scenarios() && w < static_cast<int>(recourse.size()); ++w) {
    for (int t = 0; t < inst.num_trucks(); ++t) {
      out[t] += inst.scenarios[w].probability *
                violation_probability(recourse[w].routes[t], inst);
    }
  }
  return out;
}

std::string solution_to_string(const SolutionDocument& doc, const Instance& inst) {
  json out;
  out["method"] = doc.method;
  out["status"] = doc.status;
  out["wall_seconds"] = doc.wall_seconds;
  const PaymentBreakdown& b = doc.breakdown;
  out["breakdown"] = {{"assignment_term", b.assignment_term},
                      {"truck_initial", b.truck_initial},
                      {"carrier_charges", b.carrier_charges},
                      {"routing_cost", b.routing_cost},
                      {"penalty_cost", b.penalty_cost},
                      {"total", b.total}};
  out["plan"] = {{"reserved", doc.plan.reserved}, {"assigned", int_grid_json(doc.plan.assigned)}};
  out["truck_violation_probability"] = truck_violation_probabilities(doc.recourse, inst);
  out["scenarios"] = json::array();
  for (std::size_t w = 0; w < doc.recourse.size(); ++w) {
    const ScenarioRecourse& rec = doc.recourse[w];
    json sc;
    sc["scenario"] = w;
    sc["probability"] = inst.scenarios.at(w).probability;
    sc["carrier_assign"] = int_grid_json(rec.carrier_assign);
    sc["order"] = int_grid_json(rec.order);
    sc["late_flags"] = int_grid_json(rec.late_flags);
    sc["routes"] = json::array();
    for (const Route& route : rec.routes) {
      sc["routes"].push_back({{"truck", route.truck},
                              {"visits", route.visit_sequence},
                              {"violation_probability", violation_probability(route, inst)}});
    }
    out["scenarios"].push_back(std::move(sc));
  }
  return compact_numeric_arrays(out.dump(2)) + "\n";
}

void write_solution(const SolutionDocument& doc, const Instance& inst,
                    const std::filesystem::path& path) {
  write_file(path, solution_to_string(doc, inst));
}

}  // namespace odpd::io
