#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "odpd/milp.hpp"

namespace odpd::milp {
namespace {

constexpr std::size_t kTermsPerLine = 8;

std::string format_number(double value) {
  if (std::isinf(value)) return value > 0 ? "+inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, ptr);
}

void write_expression(std::ostringstream& out, const std::vector<Term>& terms,
                      const std::vector<std::string>& names) {
  std::size_t written = 0;
  for (const Term& t : terms) {
    if (written > 0 && written % kTermsPerLine == 0) out << "\n   ";
    const double mag = std::fabs(t.coef);
    if (written == 0) {
      if (std::signbit(t.coef)) out << " -";
    } else {
      out << (std::signbit(t.coef) ? " -" : " +");
    }
    if (mag != 1.0) out << " " << format_number(mag);
    out << " " << names[t.var.value];
    ++written;
  }
}

const char* sense_text(Sense sense) {
  switch (sense) {
    case Sense::kLessEqual:
      return "<=";
    case Sense::kGreaterEqual:
      return ">=";
    case Sense::kEqual:
      return "=";
  }
  return "=";
}

std::vector<std::string> unique_sanitized(const std::vector<std::string>& raw,
                                          const std::string& fallback) {
  std::vector<std::string> out;
  std::set<std::string> used;
  for (std::size_t k = 0; k < raw.size(); ++k) {
    std::string base = raw[k].empty() ? fallback + std::to_string(k) : sanitize_name(raw[k]);
    std::string name = base;
    for (int suffix = 1; used.count(name) > 0; ++suffix) {
      name = base + "_" + std::to_string(suffix);
    }
    used.insert(name);
    out.push_back(std::move(name));
  }
  return out;
}

// ---- parsing --------------------------------------------------------------

enum class Section { kNone, kObjective, kConstraints, kBounds, kBinary, kGeneral, kEnd };

struct Token {
  enum Kind { kName, kNumber, kOp, kColon } kind;
  std::string text;
  double number = 0.0;
  int line = 0;
};

std::string lower_copy(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool match_section(std::string_view trimmed, Section& section) {
  const std::string key = lower_copy(trimmed);
  if (key == "minimize" || key == "minimise" || key == "min") {
    section = Section::kObjective;
  } else if (key == "subject to" || key == "such that" || key == "st" || key == "s.t.") {
    section = Section::kConstraints;
  } else if (key == "bounds" || key == "bound") {
    section = Section::kBounds;
  } else if (key == "binary" || key == "binaries" || key == "bin") {
    section = Section::kBinary;
  } else if (key == "general" || key == "generals" || key == "gen") {
    section = Section::kGeneral;
  } else if (key == "end") {
    section = Section::kEnd;
  } else {
    return false;
  }
  return true;
}

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '[' ||
         c == ']' || c == '#' || c == '$' || c == '{' || c == '}' || c == '~' || c == '!' ||
         c == '"' || c == '\'' || c == '&' || c == '@' || c == '?' || c == ';' || c == '/';
}

void tokenize_line(std::string_view line, int line_no, std::vector<Token>& out) {
  std::size_t k = 0;
  while (k < line.size()) {
    const char c = line[k];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++k;
      continue;
    }
    if (c == '\\') break;  // comment
    if (c == ':') {
      out.push_back({Token::kColon, ":", 0.0, line_no});
      ++k;
      continue;
    }
    if (c == '<' || c == '>' || c == '=') {
      std::string op(1, c);
      ++k;
      if (k < line.size() && line[k] == '=') {
        op += '=';
        ++k;
      }
      if (op == "=<") op = "<=";
      if (op == "=>") op = ">=";
      if (op == "<") op = "<=";
      if (op == ">") op = ">=";
      out.push_back({Token::kOp, op, 0.0, line_no});
      continue;
    }
    if (c == '+' || c == '-') {
      // Signed infinity literal.
      const std::string rest = lower_copy(line.substr(k + 1, 8));
      if (rest.rfind("infinity", 0) == 0 || rest.rfind("inf", 0) == 0) {
        const std::size_t len = rest.rfind("infinity", 0) == 0 ? 8 : 3;
        out.push_back({Token::kNumber, std::string(line.substr(k, len + 1)),
                       c == '-' ? -kInf : kInf, line_no});
        k += len + 1;
        continue;
      }
      out.push_back({Token::kOp, std::string(1, c), 0.0, line_no});
      ++k;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && k + 1 < line.size() && std::isdigit(static_cast<unsigned char>(line[k + 1])))) {
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(line.data() + k, line.data() + line.size(), value);
      if (ec != std::errc()) throw ParseError(line_no, "bad number");
      const std::size_t len = static_cast<std::size_t>(ptr - (line.data() + k));
      out.push_back({Token::kNumber, std::string(line.substr(k, len)), value, line_no});
      k += len;
      continue;
    }
    if (is_name_char(c)) {
      std::size_t end = k;
      while (end < line.size() && is_name_char(line[end])) ++end;
      std::string name(line.substr(k, end - k));
      const std::string low = lower_copy(name);
      if (low == "inf" || low == "infinity") {
        out.push_back({Token::kNumber, name, kInf, line_no});
      } else {
        out.push_back({Token::kName, name, 0.0, line_no});
      }
      k = end;
      continue;
    }
    throw ParseError(line_no, std::string("unexpected character '") + c + "'");
  }
}

class LpReader {
 public:
  MilpProblem read(std::string_view text) {
    std::map<Section, std::vector<Token>> tokens;
    Section section = Section::kNone;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(pos, end - pos);
      ++line_no;
      pos = end + 1;
      std::size_t a = line.find_first_not_of(" \t\r");
      std::size_t b = line.find_last_not_of(" \t\r");
      if (a == std::string_view::npos) {
        if (end == text.size()) break;
        continue;
      }
      std::string_view trimmed = line.substr(a, b - a + 1);
      Section next;
      if (match_section(trimmed, next)) {
        section = next;
        if (section == Section::kEnd) break;
        continue;
      }
      if (trimmed.front() == '\\') continue;
      if (section == Section::kNone) throw ParseError(line_no, "content outside any section");
      tokenize_line(line, line_no, tokens[section]);
      if (end == text.size()) break;
    }

    parse_objective(tokens[Section::kObjective]);
    parse_constraints(tokens[Section::kConstraints]);
    parse_bounds(tokens[Section::kBounds]);
    parse_kind(tokens[Section::kBinary], VarKind::kBinary);
    parse_kind(tokens[Section::kGeneral], VarKind::kInteger);

    MilpProblem p;
    for (const Pending& v : vars_) p.add_variable(v.spec);
    for (std::size_t j = 0; j < vars_.size(); ++j) {
      if (vars_[j].objective != 0.0) p.set_objective(VarId{static_cast<int>(j)}, vars_[j].objective);
    }
    for (auto& c : rows_) p.add_constraint(c.name, std::move(c.terms), c.sense, c.rhs);
    return p;
  }

 private:
  struct Pending {
    VarSpec spec;
    double objective = 0.0;
  };

  VarId var(const std::string& name) {
    auto it = index_.find(name);
    if (it != index_.end()) return VarId{it->second};
    const int id = static_cast<int>(vars_.size());
    vars_.push_back({{name, VarKind::kContinuous, 0.0, kInf}, 0.0});
    index_.emplace(name, id);
    return VarId{id};
  }

  // Parses [label ':'] expression starting at k; stops at an operator other
  // than +/- or at the end. Returns terms and advances k.
  std::vector<Term> parse_expression(const std::vector<Token>& toks, std::size_t& k,
                                     std::string* label) {
    if (label && k + 1 < toks.size() && toks[k].kind == Token::kName &&
        toks[k + 1].kind == Token::kColon) {
      *label = toks[k].text;
      k += 2;
    }
    std::vector<Term> terms;
    while (k < toks.size()) {
      double sign = 1.0;
      bool have_sign = false;
      while (k < toks.size() && toks[k].kind == Token::kOp &&
             (toks[k].text == "+" || toks[k].text == "-")) {
        if (toks[k].text == "-") sign = -sign;
        have_sign = true;
        ++k;
      }
      if (k >= toks.size()) throw ParseError(toks.back().line, "dangling sign");
      double coef = 1.0;
      if (toks[k].kind == Token::kNumber) {
        // A bare number followed by an operator is a right-hand side.
        if (k + 1 >= toks.size() || toks[k + 1].kind != Token::kName ||
            (k + 2 < toks.size() && toks[k + 2].kind == Token::kColon)) {
          if (have_sign) --k;
          break;
        }
        coef = toks[k].number;
        ++k;
      }
      if (toks[k].kind != Token::kName) {
        if (have_sign) throw ParseError(toks[k].line, "expected a variable name");
        break;
      }
      if (k + 1 < toks.size() && toks[k + 1].kind == Token::kColon) {
        if (have_sign) throw ParseError(toks[k].line, "unexpected label");
        break;  // next row's label
      }
      terms.push_back({var(toks[k].text), sign * coef});
      ++k;
    }
    return terms;
  }

  void parse_objective(const std::vector<Token>& toks) {
    std::size_t k = 0;
    std::string label;
    auto terms = parse_expression(toks, k, &label);
    if (k != toks.size()) throw ParseError(toks[k].line, "unexpected token in objective");
    for (const Term& t : terms) vars_[t.var.value].objective += t.coef;
  }

  void parse_constraints(const std::vector<Token>& toks) {
    std::size_t k = 0;
    while (k < toks.size()) {
      std::string label;
      auto terms = parse_expression(toks, k, &label);
      if (k >= toks.size() || toks[k].kind != Token::kOp) {
        throw ParseError(k < toks.size() ? toks[k].line : toks.back().line,
                         "expected a comparison operator");
      }
      const std::string op = toks[k].text;
      ++k;
      double sign = 1.0;
      while (k < toks.size() && toks[k].kind == Token::kOp &&
             (toks[k].text == "+" || toks[k].text == "-")) {
        if (toks[k].text == "-") sign = -sign;
        ++k;
      }
      if (k >= toks.size() || toks[k].kind != Token::kNumber) {
        throw ParseError(toks[k - 1].line, "expected a right-hand side number");
      }
      const double rhs = sign * toks[k].number;
      ++k;
      Sense sense = op == "<=" ? Sense::kLessEqual : op == ">=" ? Sense::kGreaterEqual
                                                                : Sense::kEqual;
      rows_.push_back({label, std::move(terms), sense, rhs});
    }
  }

  double signed_number(const std::vector<Token>& toks, std::size_t& k) {
    double sign = 1.0;
    while (k < toks.size() && toks[k].kind == Token::kOp &&
           (toks[k].text == "+" || toks[k].text == "-")) {
      if (toks[k].text == "-") sign = -sign;
      ++k;
    }
    if (k >= toks.size() || toks[k].kind != Token::kNumber) {
      throw ParseError(k < toks.size() ? toks[k].line : 0, "expected a number in bounds");
    }
    return sign * toks[k++].number;
  }

  void parse_bounds(const std::vector<Token>& toks) {
    std::size_t k = 0;
    while (k < toks.size()) {
      const int line = toks[k].line;
      if (toks[k].kind == Token::kName) {
        // "x free" | "x >= l" | "x <= u" | "x = v"
        VarSpec& spec = vars_[var(toks[k].text).value].spec;
        ++k;
        if (k < toks.size() && toks[k].kind == Token::kName &&
            lower_copy(toks[k].text) == "free") {
          spec.lower = -kInf;
          spec.upper = kInf;
          ++k;
          continue;
        }
        if (k >= toks.size() || toks[k].kind != Token::kOp) throw ParseError(line, "bad bound");
        const std::string op = toks[k++].text;
        const double v = signed_number(toks, k);
        if (op == ">=") spec.lower = v;
        if (op == "<=") spec.upper = v;
        if (op == "=") spec.lower = spec.upper = v;
        continue;
      }
      // "l <= x [<= u]"
      const double lo = signed_number(toks, k);
      if (k >= toks.size() || toks[k].kind != Token::kOp) throw ParseError(line, "bad bound");
      const std::string op1 = toks[k++].text;
      if (k >= toks.size() || toks[k].kind != Token::kName) throw ParseError(line, "bad bound");
      VarSpec& spec = vars_[var(toks[k].text).value].spec;
      ++k;
      if (op1 == "<=") spec.lower = lo;
      if (op1 == ">=") spec.upper = lo;
      if (op1 == "=") spec.lower = spec.upper = lo;
      if (k < toks.size() && toks[k].kind == Token::kOp &&
          (toks[k].text == "<=" || toks[k].text == ">=")) {
        const std::string op2 = toks[k++].text;
        const double hi = signed_number(toks, k);
        if (op2 == "<=") spec.upper = hi;
        if (op2 == ">=") spec.lower = hi;
      }
    }
  }

  void parse_kind(const std::vector<Token>& toks, VarKind kind) {
    for (const Token& t : toks) {
      if (t.kind != Token::kName) throw ParseError(t.line, "expected a variable name");
      VarSpec& spec = vars_[var(t.text).value].spec;
      spec.kind = kind;
      if (kind == VarKind::kBinary) {
        spec.lower = 0.0;
        spec.upper = 1.0;
      }
    }
  }

  std::vector<Pending> vars_;
  std::unordered_map<std::string, int> index_;
  std::vector<LinearConstraint> rows_;
};

}  // namespace

ParseError::ParseError(int line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

std::string sanitize_name(std::string_view name) {
  std::string out;
  for (char c : name) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    out += ok ? c : '_';
  }
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out.front()))) out = "_" + out;
  // A leading e/E followed by digits reads as an exponent in some parsers.
  if ((out[0] == 'e' || out[0] == 'E') && out.size() > 1 &&
      std::isdigit(static_cast<unsigned char>(out[1]))) {
    out = "_" + out;
  }
  // Keywords that would be mistaken for section headers or bounds.
  const std::string low = lower_copy(out);
  if (low == "inf" || low == "infinity" || low == "free" || low == "end" || low == "st" ||
      low == "bounds" || low == "binary" || low == "binaries" || low == "general" ||
      low == "generals" || low == "min" || low == "minimize" || low == "bin" || low == "gen") {
    out = "_" + out;
  }
  return out;
}

std::vector<std::string> exported_names(const MilpProblem& problem) {
  std::vector<std::string> raw;
  for (const VarSpec& v : problem.variables()) raw.push_back(v.name);
  return unique_sanitized(raw, "x");
}

std::string write_lp_format(const MilpProblem& problem) {
  const std::vector<std::string> names = exported_names(problem);
  std::vector<std::string> raw_rows;
  for (const LinearConstraint& c : problem.constraints()) raw_rows.push_back(c.name);
  const std::vector<std::string> row_names = unique_sanitized(raw_rows, "c");

  std::ostringstream out;
  out << "Minimize\n obj:";
  // Zero coefficients are written too so a reader declares the variables in
  // their original order.
  std::vector<Term> obj;
  for (int j = 0; j < problem.num_variables(); ++j) obj.push_back({VarId{j}, problem.objective()[j]});
  write_expression(out, obj, names);
  out << "\nSubject To\n";
  for (std::size_t r = 0; r < problem.constraints().size(); ++r) {
    const LinearConstraint& c = problem.constraints()[r];
    out << " " << row_names[r] << ":";
    if (c.terms.empty()) {
      if (problem.num_variables() == 0) continue;
      out << " 0 " << names[0];
    } else {
      write_expression(out, c.terms, names);
    }
    out << " " << sense_text(c.sense) << " " << format_number(c.rhs) << "\n";
  }
  out << "Bounds\n";
  for (int j = 0; j < problem.num_variables(); ++j) {
    const VarSpec& v = problem.variables()[j];
    if (v.kind == VarKind::kBinary) continue;
    const bool lo_inf = std::isinf(v.lower);
    const bool hi_inf = std::isinf(v.upper);
    if (lo_inf && hi_inf) {
      out << " " << names[j] << " free\n";
    } else if (hi_inf) {
      out << " " << names[j] << " >= " << format_number(v.lower) << "\n";
    } else if (v.lower == v.upper) {
      out << " " << names[j] << " = " << format_number(v.lower) << "\n";
    } else {
      out << " " << format_number(v.lower) << " <= " << names[j]
          << " <= " << format_number(v.upper) << "\n";
    }
  }
  out << "Binary\n";
  for (int j = 0; j < problem.num_variables(); ++j) {
    if (problem.variables()[j].kind == VarKind::kBinary) out << " " << names[j] << "\n";
  }
  out << "General\n";
  for (int j = 0; j < problem.num_variables(); ++j) {
    if (problem.variables()[j].kind == VarKind::kInteger) out << " " << names[j] << "\n";
  }
  out << "End\n";
  return out.str();
}

MilpProblem parse_lp_format(std::string_view text) { return LpReader().read(text); }

std::map<std::string, double> read_solution_file(std::string_view text) {
  std::map<std::string, double> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string name, value, extra;
    if (!(fields >> name)) continue;
    if (name.front() == '#') continue;
    if (!(fields >> value) || (fields >> extra)) {
      throw ParseError(line_no, "expected 'name value'");
    }
    double parsed = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), parsed);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
      throw ParseError(line_no, "invalid number '" + value + "'");
    }
    if (!out.emplace(name, parsed).second) {
      throw ParseError(line_no, "duplicate name '" + name + "'");
    }
  }
  return out;
}

std::vector<double> bind_solution(const MilpProblem& problem,
                                  const std::map<std::string, double>& named) {
  const std::vector<std::string> exported = exported_names(problem);
  std::unordered_map<std::string, int> lookup;
  for (int j = 0; j < problem.num_variables(); ++j) {
    lookup.emplace(exported[j], j);
    lookup.emplace(problem.variables()[j].name, j);
  }
  std::vector<double> values(problem.num_variables(), 0.0);
  for (const auto& [name, value] : named) {
    auto it = lookup.find(name);
    if (it == lookup.end()) throw std::invalid_argument("unknown variable '" + name + "'");
    values[it->second] = value;
  }
  return values;
}

}  // namespace odpd::milp
