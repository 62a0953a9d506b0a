#include "lagphase/spectral.hpp"

#include <cmath>
#include <numbers>

namespace lagphase {

namespace {
constexpr double kPi = std::numbers::pi;
}

CompressionResult CompressionCheck(const SymMatrix& M, const PhaseBand& band) {
  const int n = static_cast<int>(M.rows());
  if (n < 2) throw std::invalid_argument("CompressionCheck: need n >= 2");
  const double phase = OperatorValue(M);
  if (phase < band.lower()) {
    throw std::invalid_argument("CompressionCheck: matrix not supercritical");
  }
  const SymMatrix block = M.topLeftCorner(n - 1, n - 1);
  CompressionResult r;
  r.block_phase = OperatorValue(block);
  r.phase_minus_corner = phase - std::atan(M(n - 1, n - 1));
  r.band_floor = (n - 3) * kPi / 2 + band.delta;
  constexpr double tol = 1e-12;
  r.holds = r.block_phase >= r.phase_minus_corner - tol &&
            r.block_phase >= r.band_floor - tol;
  return r;
}

BorderedDeviation CnsAsymptoticsCheck(const Eigen::VectorXd& d,
                                      const Eigen::VectorXd& a_offdiag,
                                      double a) {
  const int m = static_cast<int>(d.size());
  if (a_offdiag.size() != m) {
    throw std::invalid_argument("CnsAsymptoticsCheck: size mismatch");
  }
  const double C = a_offdiag.cwiseAbs().maxCoeff();
  const double scale = 1.0 + d.cwiseAbs().maxCoeff() + C;
  if (a < 10.0 * scale) {
    throw std::invalid_argument("CnsAsymptoticsCheck: a too small");
  }
  const int n = m + 1;
  SymMatrix M = SymMatrix::Zero(n, n);
  M.topLeftCorner(m, m) = d.asDiagonal();
  M.col(n - 1).head(m) = a_offdiag;
  M.row(n - 1).head(m) = a_offdiag.transpose();
  M(n - 1, n - 1) = a;

  auto pair = EigenDecompose(M);
  // Descending spectrum: the corner eigenvalue is the largest for a > 0.
  const Eigen::VectorXd& lam = pair.spectrum.values();
  Eigen::VectorXd small = lam.tail(m);
  // Match small eigenvalues to d by sorting both descending.
  Eigen::VectorXd d_sorted = d;
  std::sort(d_sorted.data(), d_sorted.data() + m, std::greater<double>());
  BorderedDeviation out;
  out.max_diag_deviation = (small - d_sorted).cwiseAbs().maxCoeff();
  out.corner_deviation = std::abs(lam[0] / a - 1.0);
  return out;
}

double LinearizedProductBound(const HermMatrix& M) {
  auto pair = EigenDecompose(M);
  double radius = 0.0;
  for (int k = 0; k < pair.spectrum.n(); ++k) {
    const double lam = pair.spectrum[k];
    radius = std::max(radius, std::abs(lam / (1.0 + lam * lam)));
  }
  return radius;
}

}  // namespace lagphase
