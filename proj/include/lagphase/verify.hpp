#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lagphase/solver.hpp"

// Executable property suites.  Each suite samples its own corpus from a
// fixed seed, records every failing case with enough data to re-run it,
// and reports the worst margin observed.

namespace lagphase {

struct SuiteFailure {
  std::int64_t case_index = 0;
  std::string input;      // serialized reproducer
  std::string observed;
};

struct SuiteReport {
  std::string name;
  std::int64_t cases = 0;
  std::vector<SuiteFailure> failures;
  double worst_margin = 0.0;
  std::uint64_t seed = 0;

  bool pass() const { return failures.empty(); }
};

/// All five cone diagnostics on sampled supercritical spectra.
SuiteReport SuiteConeFacts(const PhaseBand& band, int count,
                           std::uint64_t seed);

/// Minimum H eigenvalue sweep with A = ChooseA(band), plus segment
/// concavity spot checks of g along chords of the cone.
ConcavityCertificate SuiteConcavity(const PhaseBand& band, int count,
                                    std::uint64_t seed,
                                    SuiteReport* report = nullptr);

/// Same sweep with a caller-supplied A (negative controls use A below
/// the admissible threshold and expect recorded failures).
ConcavityCertificate SuiteConcavityWithA(const PhaseBand& band, double A,
                                         int count, std::uint64_t seed,
                                         SuiteReport* report = nullptr);

/// Principal-block compression on randomly conjugated cone spectra.
SuiteReport SuiteSchurHorn(int n, const PhaseBand& band, int count,
                           std::uint64_t seed);

/// Post-solve checks: residual, comparison bounds against usub and the
/// harmonic extension, cone margin, boundary exactness; attaches
/// subsolution-gap statistics without asserting a sign.
SuiteReport SuiteSolution(const ProblemSpec& spec, const GridField& u,
                          const NewtonConfig& cfg);

/// Random orthogonal matrix (Haar via QR of a Gaussian sample),
/// deterministic for fixed generator state.
Eigen::MatrixXd RandomOrthogonal(int n, std::mt19937_64& rng);

/// Uniform double in [0, 1) with implementation-independent bits.
double UniformUnit(std::mt19937_64& rng);

}  // namespace lagphase
