#pragma once
// Instance documents (JSON, matrices inline or in CSV sidecar files) and
// solution documents.

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "odpd/model.hpp"

namespace odpd::io {

inline constexpr const char* kInstanceFormat = "odpd-instance";
inline constexpr int kInstanceVersion = 1;

// Malformed document: bad JSON, missing field, unreadable CSV. The message
// carries the location (file, line/column or field path).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

// Parses and validates; throws FormatError or ValidationError.
Instance load_instance(const std::filesystem::path& path);
Instance parse_instance(const std::string& text, const std::filesystem::path& base_dir = ".");

struct WriteOptions {
  // Write the distance, routing-cost and travel-time matrices to CSV files
  // next to the document instead of inline.
  bool csv_sidecars = false;
};

void write_instance(const Instance& inst, const std::filesystem::path& path,
                    const WriteOptions& options = {});
// Inline document text.
std::string instance_to_string(const Instance& inst);

// CSV matrices use 9 significant digits.
Matrix read_csv_matrix(const std::filesystem::path& path);
void write_csv_matrix(const Matrix& m, const std::filesystem::path& path);
std::string format_csv_matrix(const Matrix& m);

struct SolutionDocument {
  std::string method;
  std::string status;
  FirstStagePlan plan;
  std::vector<ScenarioRecourse> recourse;
  PaymentBreakdown breakdown;
  double wall_seconds = 0.0;
};

// Per truck: sum over scenarios of Prob(w) times the violation probability
// of the truck's route in w.
std::vector<double> truck_violation_probabilities(std::span<const ScenarioRecourse> recourse,
                                                  const Instance& inst);

std::string solution_to_string(const SolutionDocument& doc, const Instance& inst);
void write_solution(const SolutionDocument& doc, const Instance& inst,
                    const std::filesystem::path& path);

}  // namespace odpd::io
