#pragma once

#include <complex>

#include <Eigen/Dense>

#include "phasekit/errors.hpp"

namespace phasekit {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kJ{0.0, 1.0};

/// Tolerances shared by every factorization and classification.
/// All are relative to the spectral norm of the input under test.
struct ToleranceConfig {
  double rank_tol = 1e-10;   // singular-value cutoff
  double psd_tol = 1e-10;    // eigenvalue nonnegativity slack
  double recon_tol = 1e-8;   // reconstruction residual bound

  void validate() const;
};

struct HermitianEig {
  RealVector values;      // descending
  ComplexMatrix vectors;  // unitary, columns match values
};

struct SvdResult {
  ComplexMatrix U;
  RealVector sigma;  // descending, nonnegative
  ComplexMatrix V;
};

// Validation helpers; throw InvalidArgument on failure.
void require_square(const ComplexMatrix& M, std::string_view what);
void require_finite(const ComplexMatrix& M, std::string_view what);

double spectral_norm(const ComplexMatrix& M);
double spectral_norm(const RealMatrix& M);

/// (M + M^H) / 2
ComplexMatrix hermitian_part(const ComplexMatrix& M);
/// (M - M^H) / 2j, so that M = hermitian_part(M) + j * skew_part(M).
ComplexMatrix skew_part(const ComplexMatrix& M);

HermitianEig hermitian_eig(const ComplexMatrix& M, const ToleranceConfig& tol = {});
SvdResult svd(const ComplexMatrix& M);
int numeric_rank(const ComplexMatrix& M, const ToleranceConfig& tol = {});
ComplexMatrix psd_sqrt(const ComplexMatrix& M, const ToleranceConfig& tol = {});

/// Smallest singular value; zero for an empty matrix.
double sigma_min(const ComplexMatrix& M);

}  // namespace phasekit
