// Command-line front end: solve Dirichlet problems for the Lagrangian
// phase operator, verify subsolutions, run the property suites, or
// evaluate the forward operator on a provided field.
//
// Exit codes: 0 success, 1 solver error, 2 validation error.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "lagphase/problem_io.hpp"
#include "lagphase/verify.hpp"

namespace {

using namespace lagphase;

// Minimal JSON writer with stable key order and 17-significant-digit
// numbers (round-trip safe).
class JsonWriter {
 public:
  explicit JsonWriter(std::ostream& out) : out_(out) {}

  void Begin() { out_ << "{"; first_.push_back(true); }
  void End() {
    out_ << "}";
    first_.pop_back();
  }
  void BeginArray(const std::string& key) {
    Key(key);
    out_ << "[";
    first_.push_back(true);
  }
  void EndArray() {
    out_ << "]";
    first_.pop_back();
  }
  void BeginObjectItem() {
    Comma();
    out_ << "{";
    first_.push_back(true);
  }
  void EndObjectItem() { End(); }
  void Field(const std::string& key, double v) {
    Key(key);
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out_ << buf;
  }
  void Field(const std::string& key, std::int64_t v) {
    Key(key);
    out_ << v;
  }
  void Field(const std::string& key, bool v) {
    Key(key);
    out_ << (v ? "true" : "false");
  }
  void Field(const std::string& key, const std::string& v) {
    Key(key);
    out_ << '"';
    for (char c : v) {
      if (c == '"' || c == '\\') out_ << '\\';
      out_ << c;
    }
    out_ << '"';
  }

 private:
  void Comma() {
    if (!first_.back()) out_ << ",";
    first_.back() = false;
  }
  void Key(const std::string& key) {
    Comma();
    out_ << '"' << key << "\":";
  }
  std::ostream& out_;
  std::vector<bool> first_;
};

void WriteSuiteReport(JsonWriter& w, const SuiteReport& r) {
  w.BeginObjectItem();
  w.Field("suite", r.name);
  w.Field("cases", r.cases);
  w.Field("failures", static_cast<std::int64_t>(r.failures.size()));
  w.Field("worst_margin", r.worst_margin);
  w.Field("seed", static_cast<std::int64_t>(r.seed));
  w.Field("pass", r.pass());
  w.EndObjectItem();
}

int RunSolve(const ProblemSpec& spec, const NewtonConfig& cfg,
             const std::string& out_dir) {
  SolveReport report;
  std::string error;
  bool ok = true;
  GridField u(spec.domain);
  try {
    u = ContinuitySolve(spec, cfg, &report);
  } catch (const SolveError& e) {
    ok = false;
    error = e.what();
  }
  SuiteReport solution_suite;
  if (ok) {
    solution_suite = SuiteSolution(spec, u, cfg);
    report.verification.push_back(
        {"solution_suite", solution_suite.pass(),
         std::to_string(solution_suite.failures.size()) + " failures"});
    WriteFieldCsv(u, out_dir + "/solution.csv");
    WriteFieldCsv(SubsolutionGap(spec, u), out_dir + "/subsolution_gap.csv");
  }

  std::ofstream out(out_dir + "/report.json");
  JsonWriter w(out);
  w.Begin();
  w.Field("command", std::string("solve"));
  w.Field("success", ok);
  if (!ok) w.Field("error", error);
  w.Field("A_used", report.A_used);
  w.Field("delta", report.delta);
  w.Field("residual_sup_F", report.residual_sup_F);
  w.Field("residual_sup_G", report.residual_sup_G);
  w.Field("min_band_margin", report.min_band_margin);
  w.Field("total_linear_solves",
          static_cast<std::int64_t>(report.total_linear_solves));
  w.BeginArray("path");
  for (const auto& p : report.path) {
    w.BeginObjectItem();
    w.Field("t", p.t);
    w.Field("newton_iters", static_cast<std::int64_t>(p.newton_iters));
    w.Field("final_residual", p.final_residual);
    w.EndObjectItem();
  }
  w.EndArray();
  w.BeginArray("suites");
  if (ok) WriteSuiteReport(w, solution_suite);
  w.EndArray();
  w.Field("timings_wall_seconds", report.wall_time_seconds);
  w.End();
  out << "\n";
  return ok && solution_suite.pass() ? 0 : 1;
}

int RunVerifySubsolution(const ProblemSpec& spec, const std::string& out_dir) {
  const SubsolutionVerdict v = VerifySubsolution(spec);
  WriteFieldCsv(v.margin, out_dir + "/subsolution_margin.csv");
  std::ofstream out(out_dir + "/report.json");
  JsonWriter w(out);
  w.Begin();
  w.Field("command", std::string("verify-subsolution"));
  w.Field("success", v.ok);
  w.Field("min_margin", v.min_margin);
  w.Field("delta", spec.delta);
  w.End();
  out << "\n";
  return v.ok ? 0 : 1;
}

int RunCheckCone(const ProblemSpec& spec, const std::string& out_dir) {
  // Cone membership of the subsolution's Hessian spectra, node by node.
  const GridField phase = EvalOperatorField(spec, spec.usub);
  const PhaseBand band = spec.band();
  std::int64_t violations = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  spec.domain.for_each_node([&](std::int64_t i, const std::vector<int>& m) {
    if (spec.domain.is_boundary(m)) return;
    const double margin = phase[i] - band.lower();
    min_margin = std::min(min_margin, margin);
    if (margin < 0) ++violations;
  });
  std::ofstream out(out_dir + "/report.json");
  JsonWriter w(out);
  w.Begin();
  w.Field("command", std::string("check-cone"));
  w.Field("success", violations == 0);
  w.Field("violations", violations);
  w.Field("min_margin", min_margin);
  w.Field("delta", spec.delta);
  w.End();
  out << "\n";
  return violations == 0 ? 0 : 1;
}

int RunSuites(const ProblemSpec* spec, std::uint64_t seed,
              const std::string& out_dir) {
  std::vector<SuiteReport> reports;
  std::vector<std::pair<std::string, double>> certificates;
  for (int n : {2, 3, 4}) {
    for (double delta : {0.2, 0.5, 1.0}) {
      const PhaseBand band{n, delta};
      reports.push_back(SuiteConeFacts(band, 10000, seed));
      SuiteReport concavity;
      const ConcavityCertificate cert =
          SuiteConcavity(band, 10000, seed, &concavity);
      std::ostringstream label;
      label << "concavity_n" << n << "_delta" << delta;
      concavity.name = label.str();
      reports.back().name += label.str().substr(9);
      reports.push_back(concavity);
      certificates.emplace_back(label.str(), cert.min_H_eigenvalue);
      if (n >= 3) reports.push_back(SuiteSchurHorn(n, band, 10000, seed));
    }
  }
  if (spec) {
    // Also check the user's subsolution for cone membership.
    const SubsolutionVerdict v = VerifySubsolution(*spec);
    SuiteReport r;
    r.name = "subsolution";
    r.cases = 1;
    r.worst_margin = v.min_margin;
    if (!v.ok) r.failures.push_back({0, "usub", "not a subsolution"});
    reports.push_back(r);
  }

  bool all_pass = true;
  std::ofstream out(out_dir + "/report.json");
  JsonWriter w(out);
  w.Begin();
  w.Field("command", std::string("suites"));
  w.BeginArray("suites");
  for (const auto& r : reports) {
    WriteSuiteReport(w, r);
    all_pass = all_pass && r.pass();
  }
  w.EndArray();
  w.BeginArray("concavity_certificates");
  for (const auto& [name, min_eig] : certificates) {
    w.BeginObjectItem();
    w.Field("band", name);
    w.Field("min_H_eigenvalue", min_eig);
    w.EndObjectItem();
  }
  w.EndArray();
  w.Field("success", all_pass);
  w.End();
  out << "\n";
  return all_pass ? 0 : 1;
}

int RunForward(const ProblemSpec& spec, const std::string& out_dir) {
  const GridField phase = EvalOperatorField(spec, spec.usub);
  WriteFieldCsv(phase, out_dir + "/forward.csv");
  std::ofstream out(out_dir + "/report.json");
  JsonWriter w(out);
  w.Begin();
  w.Field("command", std::string("forward"));
  w.Field("success", true);
  w.End();
  out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dirichlet solver for the Lagrangian phase operator"};
  std::string command, spec_path, out_dir = ".";
  std::uint64_t seed = 0;
  NewtonConfig cfg;
  app.add_option("--command", command,
                 "solve | verify-subsolution | check-cone | suites | forward")
      ->required();
  app.add_option("--spec", spec_path, "problem spec path");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "suite sampling seed");
  app.add_option("--tol", cfg.residual_tol, "Newton G-residual tolerance");
  app.add_option("--max-iters", cfg.max_iters, "Newton iteration cap");
  CLI11_PARSE(app, argc, argv);

  try {
    std::filesystem::create_directories(out_dir);
    std::optional<ProblemSpec> spec;
    if (!spec_path.empty()) spec = LoadProblem(spec_path);

    if (command == "suites") {
      return RunSuites(spec ? &*spec : nullptr, seed, out_dir);
    }
    if (!spec) {
      std::cerr << "error: --spec is required for command '" << command
                << "'\n";
      return 2;
    }
    if (command == "solve") return RunSolve(*spec, cfg, out_dir);
    if (command == "verify-subsolution")
      return RunVerifySubsolution(*spec, out_dir);
    if (command == "check-cone") return RunCheckCone(*spec, out_dir);
    if (command == "forward") return RunForward(*spec, out_dir);
    std::cerr << "error: unknown command '" << command << "'\n";
    return 2;
  } catch (const SolveError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  }
}
