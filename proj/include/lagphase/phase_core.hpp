#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

// Eigenvalue-space layer of the Lagrangian phase operator
// f(lambda) = sum_i arctan(lambda_i) and its concave transform
// g = -exp(-A f).  Everything here is a pure function of a sorted
// eigenvalue vector; matrix-level wrappers live in spectral.hpp.

namespace lagphase {

/// Ordered eigenvalue list lambda_1 >= ... >= lambda_n, 2 <= n <= 4
/// (n = 1 is also accepted for the complex one-dimensional setting).
class Spectrum {
 public:
  explicit Spectrum(Eigen::VectorXd sorted_descending);

  /// Sorts the entries descending before constructing.
  static Spectrum FromUnsorted(const Eigen::VectorXd& values);

  int n() const { return static_cast<int>(values_.size()); }
  double operator[](int i) const { return values_[i]; }
  const Eigen::VectorXd& values() const { return values_; }

  Spectrum scaled(double t) const;

 private:
  Eigen::VectorXd values_;
};

/// Supercritical band [(n-2)pi/2 + delta, n pi/2).
struct PhaseBand {
  int n = 2;
  double delta = 0.0;  // radians, 0 < delta < pi

  double lower() const;
  bool valid() const;
};

/// Outcome of the empirical concavity sweep over sampled cone spectra.
struct ConcavityCertificate {
  double A = 0.0;
  PhaseBand band;
  std::int64_t samples = 0;
  double min_H_eigenvalue = 0.0;
  std::optional<Spectrum> witness;  // spectrum where the minimum occurred
};

/// f(lambda) = sum_i arctan(lambda_i), in (-n pi/2, n pi/2).
double PhaseSum(const Spectrum& s);

/// k-th elementary symmetric polynomial; sigma_0 = 1, zero for k > n.
double ElementarySymmetric(const Eigen::VectorXd& values, int k);

/// det(A + 2 lambda_i delta_ij) = A 2^{n-1} sigma_{n-1} + 2^n sigma_n.
double ConcavityDet(double A, const Spectrum& s);

/// H_ij = (A + 2 lambda_i delta_ij) / ((1+lambda_i^2)(1+lambda_j^2)).
/// -A e^{-Af} H is the Hessian of g in eigenvalue space.
Eigen::MatrixXd HMatrix(double A, const Spectrum& s);

/// A = max(1, 3/tan(delta)); above the 2/tan(delta) threshold required
/// for H to stay positive semidefinite on the supercritical cone.
double ChooseA(const PhaseBand& band);

/// g(lambda) = -exp(-A f(lambda)); negative, increasing in each entry.
double GValue(double A, const Spectrum& s);

/// dg/dlambda_i = A e^{-Af} / (1 + lambda_i^2); strictly positive.
Eigen::VectorXd GGradient(double A, const Spectrum& s);

/// Cone membership with the five diagnostic facts that hold on
/// supercritical spectra (with constants depending on delta).
struct ConeVerdict {
  bool member = false;       // f(lambda) >= (n-2)pi/2 + delta
  double phase = 0.0;
  double margin = 0.0;       // phase - band.lower()

  // Diagnostics, populated when member is true.
  bool second_smallest_positive = false;  // lambda_{n-1} > 0
  bool last_dominated = false;            // |lambda_n| <= lambda_{n-1}
  bool trace_nonnegative = false;         // sum lambda_i >= 0
  bool last_bounded_below = false;        // lambda_n >= -1/tan(delta)
  bool reciprocal_sum_bounded = false;    // lambda_n<0 => sum 1/lambda_i <= -tan(delta)

  bool diagnostics_hold() const {
    return second_smallest_positive && last_dominated && trace_nonnegative &&
           last_bounded_below && reciprocal_sum_bounded;
  }
};

ConeVerdict ConeMembership(const Spectrum& s, const PhaseBand& band);

/// Rejection sampler in angle space: theta_i uniform on (-pi/2, pi/2),
/// accepted when sum theta_i >= (n-2)pi/2 + delta, lambda_i = tan(theta_i).
/// Deterministic for fixed seed.  Throws if 1e6 consecutive draws are
/// rejected (delta too close to pi).
std::vector<Spectrum> SampleCone(const PhaseBand& band, int count,
                                 std::uint64_t seed);

/// Acceptance rate observed by the most recent SampleCone call details
/// are returned through this variant for the Monte-Carlo volume check.
struct ConeSample {
  std::vector<Spectrum> spectra;
  std::int64_t draws = 0;  // total angle-vector draws, accepted + rejected
};
ConeSample SampleConeWithStats(const PhaseBand& band, int count,
                               std::uint64_t seed);

/// Smallest t in {1, 2, 4, ..., 2^60} with ConcavityDet(A, t*lambda) < 0,
/// demonstrating that concavity of g fails on any symmetric cone.
/// Requires lambda_{n-1} > 0 > lambda_n.
std::optional<double> ScalingCounterexample(const Spectrum& s, double A);

}  // namespace lagphase
