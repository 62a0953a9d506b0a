#include "lagphase/solver.hpp"

#include <Eigen/Sparse>
#include <chrono>
#include <cmath>
#include <limits>

namespace lagphase {

namespace {

using SparseMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Map from grid linear index to interior equation index (-1 on boundary).
std::vector<std::int64_t> InteriorMap(const BoxDomain& dom) {
  std::vector<std::int64_t> map(dom.node_count(), -1);
  std::int64_t next = 0;
  dom.for_each_node([&](std::int64_t i, const std::vector<int>& m) {
    if (!dom.is_boundary(m)) map[i] = next++;
  });
  return map;
}

// Per-node real coefficient matrix on the spatial second-derivative
// stencils.  Real setting: G^{ij} itself.  Complex setting: the real
// form (1/4) [Re G^{ij~} (d_{xi xj} + d_{yi yj}) + Im G^{ij~} (d_{xi yj}
// - d_{yi xj})] accumulated into a dim x dim symmetric matrix.
SymMatrix SpatialCoefficients(const Setting& setting, double A,
                              const GridField& u,
                              const std::vector<int>& node) {
  if (setting.kind == Setting::Kind::kReal) {
    return GLinearization(A, HessianReal(u, node));
  }
  const HermMatrix G = GLinearization(A, HessianComplex(u, node, setting));
  const int n = setting.n;
  SymMatrix C = SymMatrix::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double re = 0.25 * G(i, j).real();
      const double im = 0.25 * G(i, j).imag();
      C(2 * i, 2 * j) += re;
      C(2 * i + 1, 2 * j + 1) += re;
      C(2 * i, 2 * j + 1) += im;
      C(2 * i + 1, 2 * j) -= im;
    }
  }
  return ((C + C.transpose()) / 2.0).eval();
}

double GOfNode(const Setting& setting, double A, const GridField& u,
               const std::vector<int>& node) {
  const double F = setting.kind == Setting::Kind::kReal
                       ? OperatorValue(HessianReal(u, node))
                       : OperatorValue(HessianComplex(u, node, setting));
  return -std::exp(-A * F);
}

// Interior phase values F(D^2 u); all nodes visited, boundary skipped.
Eigen::VectorXd InteriorPhases(const Setting& setting, const GridField& u,
                               const std::vector<std::int64_t>& imap) {
  Eigen::VectorXd phases(u.domain().interior_count());
  u.domain().for_each_node([&](std::int64_t i, const std::vector<int>& m) {
    if (imap[i] < 0) return;
    phases[imap[i]] = setting.kind == Setting::Kind::kReal
                          ? OperatorValue(HessianReal(u, m))
                          : OperatorValue(HessianComplex(u, m, setting));
  });
  return phases;
}

Eigen::VectorXd GResidual(const Setting& setting, double A, const GridField& u,
                          const Eigen::VectorXd& psi,
                          const std::vector<std::int64_t>& imap) {
  Eigen::VectorXd r(psi.size());
  u.domain().for_each_node([&](std::int64_t i, const std::vector<int>& m) {
    if (imap[i] < 0) return;
    r[imap[i]] = GOfNode(setting, A, u, m) - psi[imap[i]];
  });
  return r;
}

// Sparse Jacobian of the interior G-residual with Dirichlet boundary
// (boundary columns dropped; the update is zero there).
SparseMat AssembleJacobian(const ProblemSpec& spec, double A,
                           const GridField& u,
                           const std::vector<std::int64_t>& imap) {
  const BoxDomain& dom = spec.domain;
  const int d = dom.dim();
  const std::int64_t unknowns = dom.interior_count();
  std::vector<Triplet> trip;
  trip.reserve(unknowns * (2 * d + 2 * d * (d - 1) + 1));
  dom.for_each_node([&](std::int64_t i, const std::vector<int>& m) {
    const std::int64_t row = imap[i];
    if (row < 0) return;
    const SymMatrix C = SpatialCoefficients(spec.setting, A, u, m);
    std::vector<int> q = m;
    double center = 0.0;
    for (int a = 0; a < d; ++a) {
      const double wa = C(a, a) / (dom.spacing(a) * dom.spacing(a));
      center += -2.0 * wa;
      for (int s : {+1, -1}) {
        q[a] += s;
        const std::int64_t col = imap[dom.linear_index(q)];
        if (col >= 0) trip.emplace_back(row, col, wa);
        q[a] -= s;
      }
      for (int b = a + 1; b < d; ++b) {
        const double wab =
            2.0 * C(a, b) / (4.0 * dom.spacing(a) * dom.spacing(b));
        for (int sa : {+1, -1}) {
          for (int sb : {+1, -1}) {
            q[a] += sa;
            q[b] += sb;
            const std::int64_t col = imap[dom.linear_index(q)];
            if (col >= 0) trip.emplace_back(row, col, sa * sb * wab);
            q[a] -= sa;
            q[b] -= sb;
          }
        }
      }
    }
    trip.emplace_back(row, row, center);
  });
  SparseMat J(unknowns, unknowns);
  J.setFromTriplets(trip.begin(), trip.end());
  return J;
}

GridField ApplyUpdate(const GridField& u, const Eigen::VectorXd& du,
                      double step, const std::vector<std::int64_t>& imap) {
  Eigen::VectorXd values = u.values();
  for (std::int64_t i = 0; i < values.size(); ++i) {
    if (imap[i] >= 0) values[i] += step * du[imap[i]];
  }
  return GridField(u.domain(), std::move(values));
}

SparseMat LaplacianMatrix(const BoxDomain& dom,
                          const std::vector<std::int64_t>& imap) {
  const int d = dom.dim();
  const std::int64_t unknowns = dom.interior_count();
  std::vector<Triplet> trip;
  trip.reserve(unknowns * (2 * d + 1));
  dom.for_each_node([&](std::int64_t i, const std::vector<int>& m) {
    const std::int64_t row = imap[i];
    if (row < 0) return;
    std::vector<int> q = m;
    double center = 0.0;
    for (int a = 0; a < d; ++a) {
      const double wa = 1.0 / (dom.spacing(a) * dom.spacing(a));
      center += 2.0 * wa;
      for (int s : {+1, -1}) {
        q[a] += s;
        const std::int64_t col = imap[dom.linear_index(q)];
        if (col >= 0) trip.emplace_back(row, col, -wa);
        q[a] -= s;
      }
    }
    trip.emplace_back(row, row, center);
  });
  SparseMat L(unknowns, unknowns);
  L.setFromTriplets(trip.begin(), trip.end());
  return L;
}

// Right-hand side moving boundary values of -Laplacian to the RHS.
Eigen::VectorXd LaplacianBoundaryRhs(const BoxDomain& dom,
                                     const GridField& phi,
                                     const std::vector<std::int64_t>& imap) {
  const int d = dom.dim();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dom.interior_count());
  dom.for_each_node([&](std::int64_t i, const std::vector<int>& m) {
    const std::int64_t row = imap[i];
    if (row < 0) return;
    std::vector<int> q = m;
    for (int a = 0; a < d; ++a) {
      const double wa = 1.0 / (dom.spacing(a) * dom.spacing(a));
      for (int s : {+1, -1}) {
        q[a] += s;
        const std::int64_t j = dom.linear_index(q);
        if (imap[j] < 0) rhs[row] += wa * phi[j];
        q[a] -= s;
      }
    }
  });
  return rhs;
}

}  // namespace

GridField LaplaceSolve(const BoxDomain& domain, const GridField& phi) {
  return PoissonSolve(domain, phi, GridField(domain));
}

GridField PoissonSolve(const BoxDomain& domain, const GridField& phi,
                       const GridField& source) {
  const auto imap = InteriorMap(domain);
  SparseMat L = LaplacianMatrix(domain, imap);
  Eigen::VectorXd rhs = LaplacianBoundaryRhs(domain, phi, imap);
  domain.for_each_node([&](std::int64_t i, const std::vector<int>& m) {
    if (imap[i] >= 0) rhs[imap[i]] -= source[i];
  });
  Eigen::SimplicialLDLT<SparseMat> chol(L);
  if (chol.info() != Eigen::Success) {
    throw SolveError(SolveErrorCode::kLinearSolveFailure,
                     "LaplaceSolve: factorization failed");
  }
  Eigen::VectorXd w = chol.solve(rhs);
  Eigen::VectorXd values(domain.node_count());
  domain.for_each_node([&](std::int64_t i, const std::vector<int>& m) {
    values[i] = imap[i] >= 0 ? w[imap[i]] : phi[i];
  });
  return GridField(domain, std::move(values));
}

GridField NewtonSolve(const ProblemSpec& spec, const GridField& rhs,
                      const GridField& init, const NewtonConfig& cfg,
                      NewtonLog* log) {
  const BoxDomain& dom = spec.domain;
  const PhaseBand band = spec.band();
  const double A = ChooseA(band);
  const auto imap = InteriorMap(dom);
  const double cone_floor = band.lower() - (1.0 - cfg.cone_slack) * spec.delta;

  // Boundary data must be satisfied exactly by the initial guess.
  for (std::int64_t i = 0; i < init.values().size(); ++i) {
    if (imap[i] < 0 && init[i] != spec.phi[i]) {
      throw std::invalid_argument("NewtonSolve: init violates boundary data");
    }
  }

  Eigen::VectorXd psi(dom.interior_count());
  dom.for_each_node([&](std::int64_t i, const std::vector<int>& m) {
    if (imap[i] < 0) return;
    if (rhs[i] < band.lower()) {
      throw SolveError(SolveErrorCode::kSupercriticalViolation,
                       "NewtonSolve: rhs below supercritical band");
    }
    psi[imap[i]] = -std::exp(-A * rhs[i]);
  });

  GridField u = init;
  {
    const Eigen::VectorXd phases = InteriorPhases(spec.setting, u, imap);
    if (phases.minCoeff() < cone_floor) {
      throw std::invalid_argument(
          "NewtonSolve: initial Hessians outside the cone slack margin");
    }
  }
  Eigen::VectorXd residual = GResidual(spec.setting, A, u, psi, imap);
  double res_norm = residual.lpNorm<Eigen::Infinity>();
  if (log) {
    log->residual_history.clear();
    log->iterations = 0;
    log->linear_solves = 0;
    log->residual_history.push_back(res_norm);
  }

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    if (res_norm <= cfg.residual_tol) return u;
    SparseMat J = AssembleJacobian(spec, A, u, imap);
    Eigen::SparseLU<SparseMat> lu(J);
    if (lu.info() != Eigen::Success) {
      throw SolveError(SolveErrorCode::kLinearSolveFailure,
                       "NewtonSolve: Jacobian factorization failed");
    }
    Eigen::VectorXd du = lu.solve(-residual);
    if (log) ++log->linear_solves;
    const double lin_res = (J * du + residual).norm();
    if (!(lin_res <= cfg.linear_rel_tol * std::max(1.0, residual.norm()))) {
      // One step of iterative refinement before giving up.
      du += lu.solve(-(J * du + residual));
      if (log) ++log->linear_solves;
      if (!((J * du + residual).norm() <=
            cfg.linear_rel_tol * std::max(1.0, residual.norm()))) {
        throw SolveError(SolveErrorCode::kLinearSolveFailure,
                         "NewtonSolve: linear residual above tolerance");
      }
    }

    double step = 1.0;
    bool accepted = false;
    for (int bt = 0; bt <= cfg.max_backtracks; ++bt, step /= 2.0) {
      GridField trial = ApplyUpdate(u, du, step, imap);
      const Eigen::VectorXd phases = InteriorPhases(spec.setting, trial, imap);
      if (phases.minCoeff() < cone_floor) continue;
      Eigen::VectorXd trial_res = GResidual(spec.setting, A, trial, psi, imap);
      const double trial_norm = trial_res.lpNorm<Eigen::Infinity>();
      if (trial_norm < res_norm) {
        u = std::move(trial);
        residual = std::move(trial_res);
        res_norm = trial_norm;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      throw SolveError(SolveErrorCode::kLineSearchStall,
                       "NewtonSolve: line search stalled");
    }
    if (log) {
      ++log->iterations;
      log->residual_history.push_back(res_norm);
    }
  }
  if (res_norm <= cfg.residual_tol) return u;
  throw SolveError(SolveErrorCode::kMaxItersExceeded,
                   "NewtonSolve: max iterations exceeded");
}

GridField ContinuitySolve(const ProblemSpec& spec, const NewtonConfig& cfg,
                          SolveReport* report) {
  const auto start = std::chrono::steady_clock::now();
  const SubsolutionVerdict sub = VerifySubsolution(spec);
  if (!sub.ok) {
    throw std::invalid_argument(
        "ContinuitySolve: usub is not a discrete subsolution");
  }
  const BoxDomain& dom = spec.domain;
  const auto imap = InteriorMap(dom);
  const GridField h0 = EvalOperatorField(spec, spec.usub);
  const double band_floor = spec.band().lower();
  const double A = ChooseA(spec.band());

  SolveReport local;
  SolveReport& rep = report ? *report : local;
  rep = SolveReport{};
  rep.A_used = A;
  rep.delta = spec.delta;
  rep.min_band_margin = std::numeric_limits<double>::infinity();

  auto blend = [&](double t) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dom.node_count());
    for (std::int64_t i = 0; i < v.size(); ++i) {
      if (imap[i] >= 0) v[i] = t * spec.h[i] + (1.0 - t) * h0[i];
    }
    return GridField(dom, std::move(v));
  };
  auto track_margin = [&](const GridField& rhs_t) {
    for (std::int64_t i = 0; i < rhs_t.values().size(); ++i) {
      if (imap[i] >= 0) {
        rep.min_band_margin =
            std::min(rep.min_band_margin, rhs_t[i] - band_floor);
      }
    }
  };

  // t = 0: usub solves F(D^2 u) = h0 by construction.
  GridField u = spec.usub;
  track_margin(blend(0.0));
  rep.path.push_back({0.0, 0, 0.0});

  double t = 0.0;
  double step = 0.25;
  GridField final_rhs = blend(0.0);
  while (t < 1.0) {
    if (step < 1e-4) {
      throw SolveError(SolveErrorCode::kContinuityStall,
                       "ContinuitySolve: step below 1e-4");
    }
    const double t_next = std::min(1.0, t + step);
    const GridField rhs_t = blend(t_next);
    try {
      NewtonLog nlog;
      GridField u_next = NewtonSolve(spec, rhs_t, u, cfg, &nlog);
      u = std::move(u_next);
      t = t_next;
      track_margin(rhs_t);
      rep.path.push_back({t, nlog.iterations, nlog.residual_history.back()});
      rep.total_linear_solves += nlog.linear_solves;
      final_rhs = rhs_t;
      step = std::min(step * 1.5, 0.25);
    } catch (const SolveError& e) {
      if (e.code() == SolveErrorCode::kSupercriticalViolation) throw;
      step /= 2.0;
    }
  }

  // Final residuals in both formulations.
  Eigen::VectorXd psi(dom.interior_count());
  dom.for_each_node([&](std::int64_t i, const std::vector<int>& m) {
    if (imap[i] >= 0) psi[imap[i]] = -std::exp(-A * final_rhs[i]);
  });
  rep.residual_sup_G = GResidual(spec.setting, A, u, psi, imap)
                           .lpNorm<Eigen::Infinity>();
  rep.residual_sup_F = SupResidualF(spec, u, final_rhs);
  rep.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return u;
}

SubsolutionVerdict VerifySubsolution(const ProblemSpec& spec) {
  const GridField phase = EvalOperatorField(spec, spec.usub);
  const BoxDomain& dom = spec.domain;
  Eigen::VectorXd margin = Eigen::VectorXd::Zero(dom.node_count());
  double min_margin = std::numeric_limits<double>::infinity();
  bool boundary_ok = true;
  dom.for_each_node([&](std::int64_t i, const std::vector<int>& m) {
    if (dom.is_boundary(m)) {
      if (spec.usub[i] != spec.phi[i]) boundary_ok = false;
      return;
    }
    margin[i] = phase[i] - spec.h[i];
    min_margin = std::min(min_margin, margin[i]);
  });
  SubsolutionVerdict v{boundary_ok && min_margin >= -1e-12, min_margin,
                       GridField(dom, std::move(margin))};
  return v;
}

GridField SubsolutionGap(const ProblemSpec& spec, const GridField& u) {
  const BoxDomain& dom = spec.domain;
  Eigen::VectorXd gap = Eigen::VectorXd::Zero(dom.node_count());
  dom.for_each_node([&](std::int64_t i, const std::vector<int>& m) {
    if (dom.is_boundary(m)) return;
    if (spec.setting.kind == Setting::Kind::kReal) {
      const SymMatrix Hu = HessianReal(u, m);
      const SymMatrix Hs = HessianReal(spec.usub, m);
      gap[i] = (Linearization(Hu) * (Hs - Hu)).trace();
    } else {
      const HermMatrix Hu = HessianComplex(u, m, spec.setting);
      const HermMatrix Hs = HessianComplex(spec.usub, m, spec.setting);
      gap[i] = (Linearization(Hu) * (Hs - Hu)).trace().real();
    }
  });
  return GridField(dom, std::move(gap));
}

double SupResidualF(const ProblemSpec& spec, const GridField& u,
                    const GridField& rhs) {
  const GridField phase = EvalOperatorField(spec, u);
  double sup = 0.0;
  const BoxDomain& dom = spec.domain;
  dom.for_each_node([&](std::int64_t i, const std::vector<int>& m) {
    if (!dom.is_boundary(m)) sup = std::max(sup, std::abs(phase[i] - rhs[i]));
  });
  return sup;
}

}  // namespace lagphase
