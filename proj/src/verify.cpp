#include "lagphase/verify.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace lagphase {

namespace {

std::string SerializeSpectrum(const Spectrum& s) {
  std::ostringstream os;
  os.precision(17);
  os << "lambda = (";
  for (int i = 0; i < s.n(); ++i) os << (i ? ", " : "") << s[i];
  os << ")";
  return os.str();
}

double GaussianPair(std::mt19937_64& rng) {
  // Box-Muller on implementation-independent uniforms.
  double u1 = UniformUnit(rng);
  double u2 = UniformUnit(rng);
  if (u1 <= 0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

double UniformUnit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Eigen::MatrixXd RandomOrthogonal(int n, std::mt19937_64& rng) {
  Eigen::MatrixXd G(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) G(i, j) = GaussianPair(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  Eigen::MatrixXd Q = qr.householderQ();
  // Fix the sign convention so the factor is a deterministic function
  // of the Gaussian sample.
  Eigen::MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    if (R(j, j) < 0) Q.col(j) = -Q.col(j);
  }
  return Q;
}

SuiteReport SuiteConeFacts(const PhaseBand& band, int count,
                           std::uint64_t seed) {
  SuiteReport report;
  report.name = "cone_facts";
  report.seed = seed;
  report.worst_margin = std::numeric_limits<double>::infinity();
  const auto corpus = SampleCone(band, count, seed);
  for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(corpus.size());
       ++idx) {
    const Spectrum& s = corpus[idx];
    const ConeVerdict v = ConeMembership(s, band);
    report.worst_margin = std::min(report.worst_margin, v.margin);
    ++report.cases;
    if (!v.member || !v.diagnostics_hold()) {
      std::ostringstream obs;
      obs << "member=" << v.member
          << " lam_pos=" << v.second_smallest_positive
          << " dominated=" << v.last_dominated
          << " trace=" << v.trace_nonnegative
          << " lower=" << v.last_bounded_below
          << " recip=" << v.reciprocal_sum_bounded;
      report.failures.push_back({idx, SerializeSpectrum(s), obs.str()});
    }
  }
  return report;
}

ConcavityCertificate SuiteConcavityWithA(const PhaseBand& band, double A,
                                         int count, std::uint64_t seed,
                                         SuiteReport* report) {
  SuiteReport local;
  SuiteReport& rep = report ? *report : local;
  rep = SuiteReport{};
  rep.name = "concavity";
  rep.seed = seed;
  rep.worst_margin = std::numeric_limits<double>::infinity();

  ConcavityCertificate cert;
  cert.A = A;
  cert.band = band;
  cert.min_H_eigenvalue = std::numeric_limits<double>::infinity();

  const auto corpus = SampleCone(band, count, seed);
  for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(corpus.size());
       ++idx) {
    const Spectrum& s = corpus[idx];
    const Eigen::MatrixXd H = HMatrix(A, s);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    const double min_eig = es.eigenvalues().minCoeff();
    const double scale = 1.0 + H.cwiseAbs().maxCoeff();
    ++rep.cases;
    ++cert.samples;
    if (min_eig < cert.min_H_eigenvalue) {
      cert.min_H_eigenvalue = min_eig;
      cert.witness = s;
    }
    rep.worst_margin = std::min(rep.worst_margin, min_eig / scale);
    if (min_eig < -1e-9 * scale) {
      std::ostringstream obs;
      obs.precision(17);
      obs << "min_eig(H) = " << min_eig << " scale = " << scale;
      rep.failures.push_back({idx, SerializeSpectrum(s), obs.str()});
    }
  }

  // Segment concavity of g along chords of the (convex) cone.
  std::mt19937_64 rng(seed ^ 0x5eedc0de);
  const auto pairs = SampleCone(band, 64, rng());
  for (size_t k = 0; k + 1 < pairs.size(); k += 2) {
    const Spectrum& a = pairs[k];
    const Spectrum& b = pairs[k + 1];
    const double ga = GValue(A, a);
    const double gb = GValue(A, b);
    for (int ti = 1; ti <= 9; ++ti) {
      const double t = 0.1 * ti;
      const Spectrum mix = Spectrum::FromUnsorted(
          t * a.values() + (1.0 - t) * b.values());
      ++rep.cases;
      const double lhs = GValue(A, mix);
      const double rhs = t * ga + (1.0 - t) * gb;
      if (lhs < rhs - 1e-12) {
        std::ostringstream in, obs;
        in.precision(17);
        obs.precision(17);
        in << SerializeSpectrum(a) << " ; " << SerializeSpectrum(b)
           << " ; t = " << t;
        obs << "g(mix) = " << lhs << " < chord = " << rhs;
        rep.failures.push_back(
            {static_cast<std::int64_t>(rep.cases - 1), in.str(), obs.str()});
      }
    }
  }
  return cert;
}

ConcavityCertificate SuiteConcavity(const PhaseBand& band, int count,
                                    std::uint64_t seed, SuiteReport* report) {
  return SuiteConcavityWithA(band, ChooseA(band), count, seed, report);
}

SuiteReport SuiteSchurHorn(int n, const PhaseBand& band, int count,
                           std::uint64_t seed) {
  SuiteReport report;
  report.name = "schur_horn";
  report.seed = seed;
  report.worst_margin = std::numeric_limits<double>::infinity();
  const auto corpus = SampleCone(band, count, seed);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(corpus.size());
       ++idx) {
    const Spectrum& s = corpus[idx];
    const Eigen::MatrixXd Q = RandomOrthogonal(n, rng);
    const SymMatrix M =
        (Q * s.values().asDiagonal() * Q.transpose() +
         (Q * s.values().asDiagonal() * Q.transpose()).transpose()) /
        2.0;
    CompressionResult r;
    try {
      r = CompressionCheck(M, band);
    } catch (const std::invalid_argument&) {
      // Conjugation roundoff pushed the phase a hair below the band;
      // skip rather than fail a property that assumes exact membership.
      continue;
    }
    ++report.cases;
    report.worst_margin = std::min(
        report.worst_margin,
        std::min(r.block_phase - r.phase_minus_corner,
                 r.block_phase - r.band_floor));
    if (!r.holds) {
      std::ostringstream obs;
      obs.precision(17);
      obs << "block_phase = " << r.block_phase
          << " phase_minus_corner = " << r.phase_minus_corner
          << " band_floor = " << r.band_floor;
      report.failures.push_back({idx, SerializeSpectrum(s), obs.str()});
    }
  }
  return report;
}

SuiteReport SuiteSolution(const ProblemSpec& spec, const GridField& u,
                          const NewtonConfig& cfg) {
  SuiteReport report;
  report.name = "solution";
  report.worst_margin = std::numeric_limits<double>::infinity();
  const BoxDomain& dom = spec.domain;
  const PhaseBand band = spec.band();
  const double A = ChooseA(band);

  auto fail = [&](const std::string& input, const std::string& obs) {
    report.failures.push_back(
        {static_cast<std::int64_t>(report.cases), input, obs});
  };

  // (a) F-residual within the tolerance implied by the G tolerance.
  double max_h = -std::numeric_limits<double>::infinity();
  dom.for_each_node([&](std::int64_t i, const std::vector<int>& m) {
    if (!dom.is_boundary(m)) max_h = std::max(max_h, spec.h[i]);
  });
  const double f_tol =
      (std::exp(A * max_h) / A) * cfg.residual_tol * (1.0 + 1e-6);
  const double f_res = SupResidualF(spec, u, spec.h);
  ++report.cases;
  if (f_res > f_tol) {
    std::ostringstream obs;
    obs.precision(17);
    obs << "sup|F - h| = " << f_res << " > " << f_tol;
    fail("F-residual", obs.str());
  }

  // (b) comparison bounds usub - 1e-8 <= u <= w + 1e-8.
  const GridField w = LaplaceSolve(dom, spec.phi);
  dom.for_each_node([&](std::int64_t i, const std::vector<int>& m) {
    ++report.cases;
    if (u[i] < spec.usub[i] - 1e-8 || u[i] > w[i] + 1e-8) {
      std::ostringstream in, obs;
      obs.precision(17);
      in << "comparison at node " << i;
      obs << "usub = " << spec.usub[i] << " u = " << u[i] << " w = " << w[i];
      fail(in.str(), obs.str());
    }
    report.worst_margin =
        std::min({report.worst_margin, u[i] - spec.usub[i], w[i] - u[i]});
  });

  // (c) cone membership with slack margin at interior nodes.
  const GridField phase = EvalOperatorField(spec, u);
  const double cone_floor = band.lower() - (1.0 - cfg.cone_slack) * spec.delta;
  dom.for_each_node([&](std::int64_t i, const std::vector<int>& m) {
    if (dom.is_boundary(m)) return;
    ++report.cases;
    if (phase[i] < cone_floor) {
      std::ostringstream in, obs;
      obs.precision(17);
      in << "cone margin at node " << i;
      obs << "phase = " << phase[i] << " floor = " << cone_floor;
      fail(in.str(), obs.str());
    }
  });

  // (d) boundary exactness.
  dom.for_each_node([&](std::int64_t i, const std::vector<int>& m) {
    if (!dom.is_boundary(m)) return;
    ++report.cases;
    if (u[i] != spec.phi[i]) {
      fail("boundary node " + std::to_string(i), "u != phi bitwise");
    }
  });
  return report;
}

}  // namespace lagphase
