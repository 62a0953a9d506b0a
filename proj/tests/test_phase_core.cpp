#include <doctest.h>

#include <bit>
#include <cmath>
#include <numbers>
#include <random>

#include "lagphase/phase_core.hpp"
#include "lagphase/verify.hpp"

using namespace lagphase;

namespace {

constexpr double kPi = std::numbers::pi;

// Brute-force sigma_k as a sum over k-subsets.
double SubsetSigma(const Eigen::VectorXd& v, int k) {
  const int n = static_cast<int>(v.size());
  if (k == 0) return 1.0;
  if (k > n) return 0.0;
  double sum = 0.0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != k) continue;
    double prod = 1.0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) prod *= v[i];
    }
    sum += prod;
  }
  return sum;
}

// Cofactor-expansion determinant, independent of any library routine.
double CofactorDet(const Eigen::MatrixXd& M) {
  const int n = static_cast<int>(M.rows());
  if (n == 1) return M(0, 0);
  double det = 0.0;
  for (int j = 0; j < n; ++j) {
    Eigen::MatrixXd minor(n - 1, n - 1);
    for (int r = 1; r < n; ++r) {
      int cc = 0;
      for (int c = 0; c < n; ++c) {
        if (c == j) continue;
        minor(r - 1, cc++) = M(r, c);
      }
    }
    det += (j % 2 ? -1.0 : 1.0) * M(0, j) * CofactorDet(minor);
  }
  return det;
}

Eigen::MatrixXd ShiftedMatrix(double A, const Spectrum& s) {
  const int n = s.n();
  Eigen::MatrixXd M = Eigen::MatrixXd::Constant(n, n, A);
  for (int i = 0; i < n; ++i) M(i, i) += 2.0 * s[i];
  return M;
}

}  // namespace

TEST_CASE("phase_sum on known spectra") {
  CHECK(PhaseSum(Spectrum::FromUnsorted(Eigen::Vector2d(1, 1))) ==
        doctest::Approx(kPi / 2).epsilon(1e-14));
  CHECK(PhaseSum(Spectrum::FromUnsorted(Eigen::Vector3d(0, 0, 0))) == 0.0);
  const Eigen::Vector3d tans(std::tan(0.5), std::tan(0.6), std::tan(0.7));
  CHECK(PhaseSum(Spectrum::FromUnsorted(tans)) ==
        doctest::Approx(1.8).epsilon(1e-14));
}

TEST_CASE("phase_sum and g_value are permutation invariant") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 3);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = 10.0 * UniformUnit(rng) - 5.0;
    const Spectrum a = Spectrum::FromUnsorted(v);
    std::shuffle(v.data(), v.data() + n, rng);
    const Spectrum b = Spectrum::FromUnsorted(v);
    CHECK(PhaseSum(a) == PhaseSum(b));
    CHECK(GValue(2.0, a) == GValue(2.0, b));
  }
}

TEST_CASE("elementary_symmetric basics and subset oracle") {
  CHECK(ElementarySymmetric(Eigen::Vector3d(1, 2, 3), 2) == 11.0);
  CHECK(ElementarySymmetric(Eigen::Vector2d(5, 7), 0) == 1.0);
  CHECK(ElementarySymmetric(Eigen::Vector2d(5, 7), 3) == 0.0);

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    Eigen::VectorXd v(4);
    for (int i = 0; i < 4; ++i) v[i] = 4.0 * UniformUnit(rng) - 2.0;
    for (int k = 0; k <= 5; ++k) {
      CHECK(ElementarySymmetric(v, k) ==
            doctest::Approx(SubsetSigma(v, k)).epsilon(1e-12));
    }
  }
}

TEST_CASE("concavity_det equals the dense determinant") {
  const Spectrum s21 = Spectrum::FromUnsorted(Eigen::Vector2d(2, 1));
  CHECK(ConcavityDet(1.0, s21) == doctest::Approx(14.0).epsilon(1e-14));
  CHECK(CofactorDet(ShiftedMatrix(1.0, s21)) ==
        doctest::Approx(14.0).epsilon(1e-14));

  for (int n = 2; n <= 4; ++n) {
    const Spectrum zeros = Spectrum::FromUnsorted(Eigen::VectorXd::Zero(n));
    CHECK(ConcavityDet(1.0, zeros) == 0.0);
  }

  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd v(3);
    for (int i = 0; i < 3; ++i) v[i] = 6.0 * UniformUnit(rng) - 3.0;
    const double A = 0.5 + 4.0 * UniformUnit(rng);
    const Spectrum s = Spectrum::FromUnsorted(v);
    const double expected = CofactorDet(ShiftedMatrix(A, s));
    CHECK(ConcavityDet(A, s) ==
          doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("h_matrix values and determinant pull-out identity") {
  const Eigen::MatrixXd H1 =
      HMatrix(2.0, Spectrum::FromUnsorted(Eigen::Vector2d(1, 1)));
  CHECK(H1(0, 0) == doctest::Approx(1.0));
  CHECK(H1(0, 1) == doctest::Approx(0.5));
  CHECK(H1(1, 0) == H1(0, 1));

  const Eigen::MatrixXd H2 =
      HMatrix(1.0, Spectrum::FromUnsorted(Eigen::Vector2d(0, 0)));
  CHECK(H2.isApprox(Eigen::MatrixXd::Ones(2, 2)));

  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 3);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = 6.0 * UniformUnit(rng) - 3.0;
    const double A = 0.5 + 4.0 * UniformUnit(rng);
    const Spectrum s = Spectrum::FromUnsorted(v);
    double denom = 1.0;
    for (int i = 0; i < n; ++i) {
      denom *= (1.0 + s[i] * s[i]) * (1.0 + s[i] * s[i]);
    }
    const double lhs = CofactorDet(HMatrix(A, s)) * denom;
    const double rhs = ConcavityDet(A, s);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("choose_A decision formula") {
  CHECK(ChooseA(PhaseBand{2, kPi / 4}) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(ChooseA(PhaseBand{2, 1.4}) == 1.0);  // 3/tan(1.4) ~ 0.519
  CHECK(ChooseA(PhaseBand{3, 0.1}) ==
        doctest::Approx(3.0 / std::tan(0.1)).epsilon(1e-14));
}

TEST_CASE("g_value and g_gradient formulas") {
  const Spectrum ones = Spectrum::FromUnsorted(Eigen::Vector2d(1, 1));
  CHECK(GValue(2.0, ones) == doctest::Approx(-std::exp(-kPi)).epsilon(1e-14));
  CHECK(GValue(1.0, Spectrum::FromUnsorted(Eigen::Vector2d(0, 0))) == -1.0);

  const Eigen::VectorXd grad0 =
      GGradient(1.0, Spectrum::FromUnsorted(Eigen::Vector2d(0, 0)));
  CHECK(grad0[0] == doctest::Approx(1.0));
  CHECK(grad0[1] == doctest::Approx(1.0));
  const Eigen::VectorXd grad1 = GGradient(2.0, ones);
  CHECK(grad1[0] == doctest::Approx(std::exp(-kPi)).epsilon(1e-14));

  // Finite-difference oracle; ellipticity.
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 3);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = 6.0 * UniformUnit(rng) - 3.0;
    const double A = 0.5 + 2.0 * UniformUnit(rng);
    const Spectrum s = Spectrum::FromUnsorted(v);
    const Eigen::VectorXd grad = GGradient(A, s);
    for (int i = 0; i < n; ++i) {
      CHECK(grad[i] > 0.0);
      const double eps = 1e-6;
      Eigen::VectorXd vp = s.values(), vm = s.values();
      vp[i] += eps;
      vm[i] -= eps;
      const double fd = (GValue(A, Spectrum::FromUnsorted(vp)) -
                         GValue(A, Spectrum::FromUnsorted(vm))) /
                        (2 * eps);
      CHECK(grad[i] == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("cone_membership verdicts") {
  const PhaseBand band{2, 0.1};
  CHECK(ConeMembership(Spectrum::FromUnsorted(Eigen::Vector2d(1, 1)), band)
            .member);
  CHECK_FALSE(
      ConeMembership(Spectrum::FromUnsorted(Eigen::Vector2d(1, -1)), band)
          .member);
  CHECK_THROWS_AS(
      ConeMembership(Spectrum::FromUnsorted(Eigen::Vector3d(1, 1, 1)), band),
      std::invalid_argument);
}

TEST_CASE("sampled supercritical spectra satisfy the five cone facts") {
  for (const auto& [n, delta] : std::vector<std::pair<int, double>>{
           {2, 0.3}, {3, 0.7}, {4, 1.0}}) {
    const PhaseBand band{n, delta};
    const auto corpus = SampleCone(band, 10000, 42);
    for (const Spectrum& s : corpus) {
      const ConeVerdict v = ConeMembership(s, band);
      REQUIRE(v.member);
      REQUIRE(v.diagnostics_hold());
    }
  }
}

TEST_CASE("sample_cone determinism and acceptance rate") {
  const PhaseBand band{2, 0.2};
  const auto a = SampleCone(band, 100, 7);
  const auto b = SampleCone(band, 100, 7);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].values() == b[i].values());
  }

  // Acceptance rate vs the analytic area fraction of the half-plane
  // sum(theta) >= delta inside the angle box (-pi/2, pi/2)^2.
  const ConeSample stats = SampleConeWithStats(band, 1000, 99);
  const double empirical =
      static_cast<double>(stats.spectra.size()) / stats.draws;
  const double analytic = (kPi - band.delta) * (kPi - band.delta) /
                          (2.0 * kPi * kPi);
  CHECK(empirical / analytic > 0.8);
  CHECK(empirical / analytic < 1.2);
}

TEST_CASE("scaling counterexample in the lambda_n < 0 regime") {
  const Spectrum s = Spectrum::FromUnsorted(Eigen::Vector3d(2, 2, -0.4));
  REQUIRE(PhaseSum(s) > kPi / 2);  // supercritical for n = 3
  const auto t = ScalingCounterexample(s, 10.0);
  REQUIRE(t.has_value());
  CHECK(ConcavityDet(10.0, s.scaled(*t)) < 0.0);

  CHECK_THROWS_AS(
      ScalingCounterexample(Spectrum::FromUnsorted(Eigen::Vector3d(2, 1, 0)),
                            10.0),
      std::invalid_argument);

  // Closed form: with all lambda_{i<n} > 0 > lambda_n the determinant
  // sign flips once t A sum(1/lambda_i)/t + 2 > 0, i.e. t > -A*S/2.
  const Spectrum w = Spectrum::FromUnsorted(Eigen::Vector3d(1, 1, -0.1));
  const double A = 10.0;
  double S = 0.0;
  for (int i = 0; i < 3; ++i) S += 1.0 / w[i];
  const double t_crit = -A * S / 2.0;  // det < 0 exactly for t > t_crit
  for (double t2 : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0}) {
    const double det = ConcavityDet(A, w.scaled(t2));
    if (t2 < t_crit) CHECK(det >= 0.0);
    if (t2 > t_crit) CHECK(det < 0.0);
  }
}

TEST_CASE("segment concavity of g over cone chords") {
  const PhaseBand band{3, 0.5};
  const double A = ChooseA(band);
  const auto corpus = SampleCone(band, 40, 123);
  for (size_t k = 0; k + 1 < corpus.size(); k += 2) {
    const double ga = GValue(A, corpus[k]);
    const double gb = GValue(A, corpus[k + 1]);
    for (int ti = 1; ti <= 9; ++ti) {
      const double t = 0.1 * ti;
      const Spectrum mix = Spectrum::FromUnsorted(
          t * corpus[k].values() + (1 - t) * corpus[k + 1].values());
      CHECK(GValue(A, mix) >= t * ga + (1 - t) * gb - 1e-12);
    }
  }
}

TEST_CASE("spectrum validation") {
  CHECK_THROWS_AS(Spectrum(Eigen::Vector2d(1, 2)), std::invalid_argument);
  Eigen::Vector2d bad(std::nan(""), 0);
  CHECK_THROWS_AS(Spectrum::FromUnsorted(bad), std::invalid_argument);
}
