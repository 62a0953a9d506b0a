#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "lagphase/grid.hpp"

// Damped Newton iteration on the concavified equation G(D^2 u) = psi,
// G = -exp(-A F), and the continuity method driving the right-hand side
// from the subsolution's own phase to the target.

namespace lagphase {

enum class SolveErrorCode {
  kMaxItersExceeded,
  kLineSearchStall,
  kLinearSolveFailure,
  kSupercriticalViolation,
  kContinuityStall,
};

class SolveError : public std::runtime_error {
 public:
  SolveError(SolveErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  SolveErrorCode code() const { return code_; }

 private:
  SolveErrorCode code_;
};

struct NewtonConfig {
  double residual_tol = 1e-10;   // sup-norm on the G-residual
  int max_iters = 50;
  int max_backtracks = 30;
  double linear_rel_tol = 1e-12;
  double cone_slack = 0.5;       // fraction of delta kept during line search
};

struct NewtonLog {
  std::vector<double> residual_history;  // accepted sup-norm G-residuals
  int iterations = 0;
  int linear_solves = 0;
};

struct PathEntry {
  double t = 0.0;
  int newton_iters = 0;
  double final_residual = 0.0;  // G-residual sup-norm at acceptance
};

struct VerdictEntry {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SolveReport {
  std::vector<PathEntry> path;
  int total_linear_solves = 0;
  double wall_time_seconds = 0.0;
  double residual_sup_G = 0.0;
  double residual_sup_F = 0.0;
  double A_used = 0.0;
  double delta = 0.0;
  double min_band_margin = 0.0;  // min over t and nodes of rhs_t - band floor
  std::vector<VerdictEntry> verification;

  bool reached_end() const {
    return !path.empty() && path.back().t == 1.0;
  }
};

/// Discrete harmonic extension: 2*dim-point Laplacian vanishes at every
/// interior node, boundary equals phi exactly.
GridField LaplaceSolve(const BoxDomain& domain, const GridField& phi);

/// Poisson variant used by the complex cross-checks: Laplacian equals
/// `source` at interior nodes.
GridField PoissonSolve(const BoxDomain& domain, const GridField& phi,
                       const GridField& source);

/// Newton iteration for G(D^2 u) = -exp(-A * rhs) at fixed right-hand
/// side.  init must match spec.phi on the boundary and have interior
/// Hessian spectra inside the cone with margin >= cone_slack * delta.
GridField NewtonSolve(const ProblemSpec& spec, const GridField& rhs,
                      const GridField& init, const NewtonConfig& cfg,
                      NewtonLog* log = nullptr);

/// Continuity method F(D^2 u_t) = t h + (1-t) h0, h0 = F(D^2 usub),
/// warm-starting each step and adapting the step size.
GridField ContinuitySolve(const ProblemSpec& spec, const NewtonConfig& cfg,
                          SolveReport* report = nullptr);

struct SubsolutionVerdict {
  bool ok = false;
  double min_margin = 0.0;
  GridField margin;  // F(D^2 usub) - h on interior nodes
};

/// Checks F(D^2 usub) >= h - 1e-12 at interior nodes and exact boundary
/// agreement with phi.
SubsolutionVerdict VerifySubsolution(const ProblemSpec& spec);

/// Diagnostic field trace(F^{ij}(D^2 u) [usub_{ij} - u_{ij}]) per node;
/// no sign is asserted.
GridField SubsolutionGap(const ProblemSpec& spec, const GridField& u);

/// Sup over interior nodes of |F(D^2 u) - rhs|.
double SupResidualF(const ProblemSpec& spec, const GridField& u,
                    const GridField& rhs);

}  // namespace lagphase
