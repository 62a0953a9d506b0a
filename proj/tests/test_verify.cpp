#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lagphase/verify.hpp"

using namespace lagphase;

TEST_CASE("cone facts suite passes on sampled corpora") {
  CHECK(SuiteConeFacts(PhaseBand{2, 0.3}, 10000, 1).pass());
  CHECK(SuiteConeFacts(PhaseBand{3, 1.0}, 10000, 2).pass());
}

TEST_CASE("a corrupted spectrum is recorded as a failure") {
  const PhaseBand band{2, 0.3};
  // lambda_n pushed below the -1/tan(delta) floor while keeping the
  // verdict territory: check the diagnostic flags directly.
  const double bad = -2.0 / std::tan(band.delta);
  const Spectrum s =
      Spectrum::FromUnsorted(Eigen::Vector2d(1000.0, bad));
  const ConeVerdict v = ConeMembership(s, band);
  if (v.member) {
    CHECK_FALSE(v.last_bounded_below);
    CHECK_FALSE(v.diagnostics_hold());
  } else {
    // Not in the cone at all; the constant is only claimed inside.
    CHECK(v.margin < 0);
  }
}

TEST_CASE("concavity suite certifies chosen A across bands") {
  for (int n : {2, 3, 4}) {
    for (double delta : {0.2, 0.5, 1.0}) {
      const PhaseBand band{n, delta};
      SuiteReport report;
      const ConcavityCertificate cert =
          SuiteConcavity(band, 5000, 77, &report);
      CHECK(report.pass());
      CHECK(cert.samples == 5000);
      CHECK(cert.witness.has_value());
      CHECK(cert.A == ChooseA(band));
    }
  }
}

TEST_CASE("concavity fails below the admissible A threshold") {
  // A = 1 << 2/tan(0.05): the corpus must contain indefinite H samples.
  const PhaseBand band{3, 0.05};
  SuiteReport report;
  SuiteConcavityWithA(band, 1.0, 5000, 5, &report);
  CHECK_FALSE(report.pass());
}

TEST_CASE("H is positive definite whenever lambda_n >= 0") {
  // sigma_{n-1} and sigma_n are nonnegative on nonnegative spectra, so
  // every leading minor of H is positive for any A > 0.
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 500; ++trial) {
    Eigen::VectorXd v(2);
    v << 10.0 * UniformUnit(rng), 10.0 * UniformUnit(rng);
    const Spectrum s = Spectrum::FromUnsorted(v);
    const Eigen::MatrixXd H = HMatrix(1.0, s);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("schur-horn suite: diagonal equality branch and rotations") {
  const PhaseBand band{3, 0.4};
  CHECK(SuiteSchurHorn(3, band, 3000, 11).pass());

  // Diagonal matrices give the equality branch of the inequality.
  const auto corpus = SampleCone(band, 50, 13);
  for (const Spectrum& s : corpus) {
    const SymMatrix D = s.values().asDiagonal();
    const CompressionResult r = CompressionCheck(D, band);
    CHECK(r.holds);
    CHECK(std::abs(r.block_phase - r.phase_minus_corner) < 1e-12);
  }
}

TEST_CASE("suites are deterministic under a fixed seed") {
  const PhaseBand band{3, 0.5};
  const SuiteReport a = SuiteConeFacts(band, 2000, 99);
  const SuiteReport b = SuiteConeFacts(band, 2000, 99);
  CHECK(a.cases == b.cases);
  CHECK(a.worst_margin == b.worst_margin);
  CHECK(a.seed == 99);

  SuiteReport ra, rb;
  const ConcavityCertificate ca = SuiteConcavity(band, 2000, 99, &ra);
  const ConcavityCertificate cb = SuiteConcavity(band, 2000, 99, &rb);
  CHECK(ca.min_H_eigenvalue == cb.min_H_eigenvalue);
  CHECK(ra.worst_margin == rb.worst_margin);
  REQUIRE(ca.witness.has_value());
  REQUIRE(cb.witness.has_value());
  CHECK(ca.witness->values() == cb.witness->values());
}

TEST_CASE("failure records carry a reproducer") {
  const PhaseBand band{3, 0.05};
  SuiteReport report;
  SuiteConcavityWithA(band, 1.0, 5000, 5, &report);
  REQUIRE_FALSE(report.pass());
  for (const SuiteFailure& f : report.failures) {
    CHECK(f.input.find("lambda = (") != std::string::npos);
    CHECK_FALSE(f.observed.empty());
  }
}
