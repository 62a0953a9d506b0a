#include "lagphase/phase_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace lagphase {

namespace {
constexpr double kPi = std::numbers::pi;

// Uniform double in [0, 1) from the raw generator output; avoids the
// implementation-defined behavior of std::uniform_real_distribution so
// sampled corpora are byte-stable across standard libraries.
double UniformUnit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}
}  // namespace

Spectrum::Spectrum(Eigen::VectorXd sorted_descending)
    : values_(std::move(sorted_descending)) {
  if (values_.size() < 1 || values_.size() > 4) {
    throw std::invalid_argument("Spectrum: dimension must be in [1, 4]");
  }
  for (int i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw std::invalid_argument("Spectrum: entries must be finite");
    }
    if (i > 0 && values_[i - 1] < values_[i]) {
      throw std::invalid_argument("Spectrum: entries must be descending");
    }
  }
}

Spectrum Spectrum::FromUnsorted(const Eigen::VectorXd& values) {
  Eigen::VectorXd v = values;
  std::sort(v.data(), v.data() + v.size(), std::greater<double>());
  return Spectrum(std::move(v));
}

Spectrum Spectrum::scaled(double t) const {
  if (t < 0) {
    Eigen::VectorXd v = (t * values_).reverse();
    return Spectrum(std::move(v));
  }
  return Spectrum(t * values_);
}

double PhaseBand::lower() const { return (n - 2) * kPi / 2 + delta; }

bool PhaseBand::valid() const {
  return n >= 1 && n <= 4 && delta > 0 && delta < kPi;
}

double PhaseSum(const Spectrum& s) {
  double f = 0;
  for (int i = 0; i < s.n(); ++i) f += std::atan(s[i]);
  return f;
}

double ElementarySymmetric(const Eigen::VectorXd& values, int k) {
  if (k < 0) throw std::invalid_argument("ElementarySymmetric: k < 0");
  const int n = static_cast<int>(values.size());
  if (k == 0) return 1.0;
  if (k > n) return 0.0;
  // Recurrence over prefixes: e[j] after processing m values holds
  // sigma_j(values[0..m)).
  std::vector<double> e(static_cast<size_t>(k) + 1, 0.0);
  e[0] = 1.0;
  for (int m = 0; m < n; ++m) {
    for (int j = std::min(k, m + 1); j >= 1; --j) {
      e[j] += values[m] * e[j - 1];
    }
  }
  return e[k];
}

double ConcavityDet(double A, const Spectrum& s) {
  if (A <= 0) throw std::invalid_argument("ConcavityDet: A must be positive");
  const int n = s.n();
  const double sn1 = ElementarySymmetric(s.values(), n - 1);
  const double sn = ElementarySymmetric(s.values(), n);
  return A * std::ldexp(sn1, n - 1) + std::ldexp(sn, n);
}

Eigen::MatrixXd HMatrix(double A, const Spectrum& s) {
  if (A <= 0) throw std::invalid_argument("HMatrix: A must be positive");
  const int n = s.n();
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) w[i] = 1.0 / (1.0 + s[i] * s[i]);
  Eigen::MatrixXd H(n, n);
  for (int i = 0; i < n; ++i) {
    H(i, i) = (A + 2.0 * s[i]) * w[i] * w[i];
    for (int j = i + 1; j < n; ++j) {
      const double off = A * w[i] * w[j];
      H(i, j) = off;
      H(j, i) = off;
    }
  }
  return H;
}

double ChooseA(const PhaseBand& band) {
  if (!band.valid()) throw std::invalid_argument("ChooseA: invalid band");
  const double t = std::tan(band.delta);
  if (t <= 0) return 1.0;  // delta >= pi/2: lambda_n > 0 on the whole cone
  return std::max(1.0, 3.0 / t);
}

double GValue(double A, const Spectrum& s) {
  if (A <= 0) throw std::invalid_argument("GValue: A must be positive");
  return -std::exp(-A * PhaseSum(s));
}

Eigen::VectorXd GGradient(double A, const Spectrum& s) {
  if (A <= 0) throw std::invalid_argument("GGradient: A must be positive");
  const double scale = A * std::exp(-A * PhaseSum(s));
  Eigen::VectorXd grad(s.n());
  for (int i = 0; i < s.n(); ++i) grad[i] = scale / (1.0 + s[i] * s[i]);
  return grad;
}

ConeVerdict ConeMembership(const Spectrum& s, const PhaseBand& band) {
  if (s.n() != band.n) {
    throw std::invalid_argument("ConeMembership: dimension mismatch");
  }
  ConeVerdict v;
  v.phase = PhaseSum(s);
  v.margin = v.phase - band.lower();
  v.member = v.margin >= 0;
  if (!v.member) return v;

  const int n = s.n();
  const double lam_n = s[n - 1];
  const double lam_n1 = n >= 2 ? s[n - 2] : s[0];
  v.second_smallest_positive = n < 2 || lam_n1 > 0;
  v.last_dominated = n < 2 || std::abs(lam_n) <= lam_n1;
  v.trace_nonnegative = n < 2 || s.values().sum() >= 0;
  const double tan_delta = std::tan(band.delta);
  v.last_bounded_below = tan_delta <= 0 || lam_n >= -1.0 / tan_delta;
  if (lam_n < 0) {
    double recip = 0;
    for (int i = 0; i < n; ++i) recip += 1.0 / s[i];
    v.reciprocal_sum_bounded = recip <= -tan_delta;
  } else {
    v.reciprocal_sum_bounded = true;
  }
  return v;
}

ConeSample SampleConeWithStats(const PhaseBand& band, int count,
                               std::uint64_t seed) {
  if (!band.valid()) throw std::invalid_argument("SampleCone: invalid band");
  if (count < 1) throw std::invalid_argument("SampleCone: count < 1");
  constexpr std::int64_t kRejectBudget = 1000000;
  const double eps = 1e-12;
  const double half = kPi / 2 - eps;
  const double threshold = band.lower();
  std::mt19937_64 rng(seed);

  ConeSample out;
  out.spectra.reserve(count);
  std::int64_t consecutive_rejects = 0;
  Eigen::VectorXd theta(band.n);
  while (static_cast<int>(out.spectra.size()) < count) {
    ++out.draws;
    double sum = 0;
    for (int i = 0; i < band.n; ++i) {
      theta[i] = -half + 2.0 * half * UniformUnit(rng);
      sum += theta[i];
    }
    if (sum < threshold) {
      if (++consecutive_rejects >= kRejectBudget) {
        throw std::runtime_error(
            "SampleCone: rejection budget exhausted (delta too close to pi)");
      }
      continue;
    }
    consecutive_rejects = 0;
    Eigen::VectorXd lambda(band.n);
    for (int i = 0; i < band.n; ++i) lambda[i] = std::tan(theta[i]);
    out.spectra.push_back(Spectrum::FromUnsorted(lambda));
  }
  return out;
}

std::vector<Spectrum> SampleCone(const PhaseBand& band, int count,
                                 std::uint64_t seed) {
  return SampleConeWithStats(band, count, seed).spectra;
}

std::optional<double> ScalingCounterexample(const Spectrum& s, double A) {
  const int n = s.n();
  if (n < 2 || !(s[n - 2] > 0) || !(s[n - 1] < 0)) {
    throw std::invalid_argument(
        "ScalingCounterexample: requires lambda_{n-1} > 0 > lambda_n");
  }
  double t = 1.0;
  for (int k = 0; k <= 60; ++k, t *= 2.0) {
    if (ConcavityDet(A, s.scaled(t)) < 0) return t;
  }
  return std::nullopt;
}

}  // namespace lagphase
