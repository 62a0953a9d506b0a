#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <type_traits>

#include "lagphase/phase_core.hpp"

// Matrix-level layer: eigen-decomposition of small symmetric/Hermitian
// matrices and the operator F(M) = sum arctan(lambda_i(M)) together with
// its linearization F^{ij} = Q diag(1/(1+lambda^2)) Q*.

namespace lagphase {

using SymMatrix = Eigen::MatrixXd;
using HermMatrix = Eigen::MatrixXcd;

template <typename Scalar>
struct EigenPairT {
  Spectrum spectrum;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> frame;  // orthonormal columns
};

using EigenPair = EigenPairT<double>;
using HermEigenPair = EigenPairT<std::complex<double>>;

/// Descending eigen-decomposition M = Q diag(lambda) Q*.
template <typename Derived>
auto EigenDecompose(const Eigen::MatrixBase<Derived>& M)
    -> EigenPairT<typename Derived::Scalar> {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const int n = static_cast<int>(M.rows());
  if (n < 1 || n > 4 || M.cols() != n) {
    throw std::invalid_argument("EigenDecompose: expected n x n, 1 <= n <= 4");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(M.derived());
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("EigenDecompose: iteration did not converge");
  }
  // Eigen returns ascending order; flip to descending.
  Eigen::VectorXd values = solver.eigenvalues().reverse();
  Matrix frame = solver.eigenvectors().rowwise().reverse();
  return {Spectrum(std::move(values)), std::move(frame)};
}

/// F(M) = sum_i arctan(lambda_i(M)).
template <typename Derived>
double OperatorValue(const Eigen::MatrixBase<Derived>& M) {
  return PhaseSum(EigenDecompose(M).spectrum);
}

/// F^{ij}(M) = Q diag(1/(1+lambda_k^2)) Q*; positive definite with
/// eigenvalues in (0, 1].  Frame-independent at repeated eigenvalues.
template <typename Derived>
auto Linearization(const Eigen::MatrixBase<Derived>& M)
    -> Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> {
  auto pair = EigenDecompose(M);
  const int n = pair.spectrum.n();
  Eigen::VectorXd coeff(n);
  for (int k = 0; k < n; ++k) {
    const double lam = pair.spectrum[k];
    coeff[k] = 1.0 / (1.0 + lam * lam);
  }
  using Matrix =
      Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Matrix L = pair.frame * coeff.asDiagonal() * pair.frame.adjoint();
  // Symmetrize to kill roundoff skew from the triple product.
  return ((L + L.adjoint()) / 2.0).eval();
}

/// G^{ij}(M) = A e^{-A F(M)} F^{ij}(M); positive definite.
template <typename Derived>
auto GLinearization(double A, const Eigen::MatrixBase<Derived>& M)
    -> Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> {
  if (A <= 0) throw std::invalid_argument("GLinearization: A must be positive");
  return (A * std::exp(-A * OperatorValue(M)) * Linearization(M)).eval();
}

/// Principal-block compression of a supercritical matrix: the phase of
/// the leading (n-1) x (n-1) block dominates F(M) - arctan(M_nn), and
/// therefore stays above (n-3)pi/2 + delta.
struct CompressionResult {
  bool holds = false;
  double block_phase = 0.0;      // sum arctan lambda'_alpha
  double phase_minus_corner = 0.0;  // F(M) - arctan(M_nn)
  double band_floor = 0.0;       // (n-3)pi/2 + delta
};

CompressionResult CompressionCheck(const SymMatrix& M, const PhaseBand& band);

/// Eigenvalue asymptotics of the bordered matrix diag(d) with last
/// row/column (a_1..a_{n-1}, a): lambda_alpha -> d_alpha and
/// lambda_n / a -> 1 as a grows.  Returns the two deviations.
struct BorderedDeviation {
  double max_diag_deviation = 0.0;  // max_alpha |lambda_alpha - d_alpha|
  double corner_deviation = 0.0;    // |lambda_n / a - 1|
};

BorderedDeviation CnsAsymptoticsCheck(const Eigen::VectorXd& d,
                                      const Eigen::VectorXd& a_offdiag,
                                      double a);

/// Spectral radius of F^{ij}(M) M; bounded by 1/2 since
/// |lambda / (1 + lambda^2)| <= 1/2.
double LinearizedProductBound(const HermMatrix& M);

}  // namespace lagphase
