#include "lagphase/problem_io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "lagphase/expr.hpp"

namespace lagphase {

namespace {

struct RawEntry {
  std::string value;
  int line = 0;
};

GridField BuildField(const std::string& spec, int line, const BoxDomain& dom,
                     const std::string& base_dir) {
  if (spec.rfind("expr:", 0) == 0) {
    Expression e = [&] {
      try {
        return Expression::Parse(spec.substr(5));
      } catch (const ExprError& err) {
        throw ProblemParseError(err.what(), line);
      }
    }();
    if (e.max_variable() > dom.dim()) {
      throw ProblemParseError("expression references more variables than the "
                              "domain has axes", line);
    }
    return GridField::Sample(dom, [&](const Eigen::VectorXd& x) {
      return e.Eval(x);
    });
  }
  if (spec.rfind("csv:", 0) == 0) {
    const std::filesystem::path p =
        std::filesystem::path(base_dir) / spec.substr(4);
    GridField f = ReadFieldCsv(p.string());
    if (!(f.domain() == dom)) {
      throw ProblemParseError("csv grid does not match the declared box",
                              line);
    }
    return f;
  }
  throw ProblemParseError("field must start with 'expr:' or 'csv:'", line);
}

}  // namespace

ProblemSpec ParseProblem(const std::string& text, const std::string& base_dir) {
  std::map<std::string, RawEntry> entries;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ProblemParseError("expected 'key = value'", lineno);
    }
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ProblemParseError("empty key or value", lineno);
    }
    if (entries.count(key)) {
      throw ProblemParseError("duplicate key '" + key + "'", lineno);
    }
    entries[key] = {value, lineno};
  }

  auto require = [&](const std::string& key) -> const RawEntry& {
    auto it = entries.find(key);
    if (it == entries.end()) {
      throw ProblemParseError("missing required key '" + key + "'", lineno);
    }
    return it->second;
  };
  for (const auto& [key, entry] : entries) {
    static const char* kKnown[] = {"setting", "box", "resolution",
                                   "delta", "h", "phi", "usub"};
    if (std::find_if(std::begin(kKnown), std::end(kKnown), [&](const char* k) {
          return key == k;
        }) == std::end(kKnown)) {
      throw ProblemParseError("unknown key '" + key + "'", entry.line);
    }
  }

  Setting setting;
  {
    const RawEntry& e = require("setting");
    if (e.value == "real2") setting = {Setting::Kind::kReal, 2};
    else if (e.value == "real3") setting = {Setting::Kind::kReal, 3};
    else if (e.value == "complex1") setting = {Setting::Kind::kComplex, 1};
    else if (e.value == "complex2") setting = {Setting::Kind::kComplex, 2};
    else throw ProblemParseError("setting must be real2|real3|complex1|complex2",
                                 e.line);
  }
  const int d = setting.spatial_dim();

  int resolution = 0;
  {
    const RawEntry& e = require("resolution");
    try {
      resolution = std::stoi(e.value);
    } catch (const std::exception&) {
      throw ProblemParseError("resolution must be an integer", e.line);
    }
  }

  double delta = 0;
  {
    const RawEntry& e = require("delta");
    try {
      delta = std::stod(e.value);
    } catch (const std::exception&) {
      throw ProblemParseError("delta must be a real number", e.line);
    }
    if (!(delta > 0)) {
      throw ProblemParseError("delta must be positive", e.line);
    }
  }

  Eigen::VectorXd lower(d), upper(d);
  {
    const RawEntry& e = require("box");
    std::istringstream bs(e.value);
    for (int k = 0; k < d; ++k) {
      if (!(bs >> lower[k])) {
        throw ProblemParseError("box needs " + std::to_string(2 * d) +
                                " coordinates", e.line);
      }
    }
    for (int k = 0; k < d; ++k) {
      if (!(bs >> upper[k])) {
        throw ProblemParseError("box needs " + std::to_string(2 * d) +
                                " coordinates", e.line);
      }
    }
    double extra;
    if (bs >> extra) {
      throw ProblemParseError("box has too many coordinates", e.line);
    }
  }

  BoxDomain dom = [&] {
    try {
      return BoxDomain(lower, upper, resolution);
    } catch (const std::invalid_argument& err) {
      throw ProblemParseError(err.what(), require("box").line);
    }
  }();

  const RawEntry& he = require("h");
  const RawEntry& pe = require("phi");
  const RawEntry& ue = require("usub");
  ProblemSpec spec{dom, setting,
                   BuildField(he.value, he.line, dom, base_dir),
                   BuildField(pe.value, pe.line, dom, base_dir),
                   BuildField(ue.value, ue.line, dom, base_dir), delta};
  spec.Validate();
  return spec;
}

ProblemSpec LoadProblem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open problem spec: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseProblem(buf.str(),
                      std::filesystem::path(path).parent_path().string());
}

}  // namespace lagphase
