#include "phasekit/numerics.hpp"

#include <cmath>
#include <string>

namespace phasekit {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::NotSectorial: return "NotSectorial";
    case ErrorCode::NotQuasiSectorial: return "NotQuasiSectorial";
    case ErrorCode::NotSemiSectorial: return "NotSemiSectorial";
    case ErrorCode::InvalidSector: return "InvalidSector";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::InvalidParam: return "InvalidParam";
    case ErrorCode::PoleProximity: return "PoleProximity";
    case ErrorCode::NotSemiSimple: return "NotSemiSimple";
    case ErrorCode::NotLyapunovStable: return "NotLyapunovStable";
    case ErrorCode::NotStable: return "NotStable";
    case ErrorCode::NotFrequencyWiseSemiSectorial: return "NotFrequencyWiseSemiSectorial";
    case ErrorCode::NotAccretiveAtStart: return "NotAccretiveAtStart";
    case ErrorCode::IllPosed: return "IllPosed";
    case ErrorCode::TargetOutsideEnvelope: return "TargetOutsideEnvelope";
    case ErrorCode::EnvelopeViolated: return "EnvelopeViolated";
    case ErrorCode::ConditionHolds: return "ConditionHolds";
    case ErrorCode::SynthesisFailed: return "SynthesisFailed";
    case ErrorCode::NotInner: return "NotInner";
    case ErrorCode::AssumptionViolatedAtInfinity: return "AssumptionViolatedAtInfinity";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

void ToleranceConfig::validate() const {
  if (!(rank_tol > 0.0 && rank_tol < 1.0) || !(psd_tol > 0.0) || !(recon_tol > 0.0)) {
    fail(ErrorCode::InvalidArgument,
         "tolerances must be positive and rank_tol must be below 1");
  }
}

void require_square(const ComplexMatrix& M, std::string_view what) {
  if (M.rows() != M.cols() || M.rows() < 1) {
    fail(ErrorCode::InvalidArgument,
         std::string(what) + ": expected a non-empty square matrix, got " +
             std::to_string(M.rows()) + "x" + std::to_string(M.cols()));
  }
}

void require_finite(const ComplexMatrix& M, std::string_view what) {
  if (!M.allFinite()) {
    fail(ErrorCode::InvalidArgument, std::string(what) + ": entries must be finite");
  }
}

double spectral_norm(const ComplexMatrix& M) {
  if (M.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> s(M);
  return s.singularValues()(0);
}

double spectral_norm(const RealMatrix& M) {
  if (M.size() == 0) return 0.0;
  Eigen::JacobiSVD<RealMatrix> s(M);
  return s.singularValues()(0);
}

ComplexMatrix hermitian_part(const ComplexMatrix& M) { return (M + M.adjoint()) / 2.0; }

ComplexMatrix skew_part(const ComplexMatrix& M) {
  return (M - M.adjoint()) / (2.0 * kJ);
}

HermitianEig hermitian_eig(const ComplexMatrix& M, const ToleranceConfig& tol) {
  require_square(M, "hermitian_eig");
  require_finite(M, "hermitian_eig");
  const double scale = spectral_norm(M);
  if (spectral_norm(ComplexMatrix(M - M.adjoint())) > tol.psd_tol * scale) {
    fail(ErrorCode::NotHermitian, "hermitian_eig: input is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(M));
  if (es.info() != Eigen::Success) {
    fail(ErrorCode::NoConvergence, "hermitian_eig: eigensolver did not converge");
  }
  // Eigen returns ascending order; reverse keeps ties in a deterministic order.
  HermitianEig out;
  out.values = es.eigenvalues().reverse();
  out.vectors = es.eigenvectors().rowwise().reverse();
  return out;
}

SvdResult svd(const ComplexMatrix& M) {
  require_finite(M, "svd");
  Eigen::JacobiSVD<ComplexMatrix> s(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (s.info() != Eigen::Success) {
    fail(ErrorCode::NoConvergence, "svd: did not converge");
  }
  return {s.matrixU(), s.singularValues(), s.matrixV()};
}

int numeric_rank(const ComplexMatrix& M, const ToleranceConfig& tol) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<ComplexMatrix> s(M);
  const RealVector& sv = s.singularValues();
  if (sv(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol.rank_tol * sv(0)) ++r;
  }
  return r;
}

ComplexMatrix psd_sqrt(const ComplexMatrix& M, const ToleranceConfig& tol) {
  const HermitianEig e = hermitian_eig(M, tol);
  const double scale = std::max(std::abs(e.values(0)), std::abs(e.values(e.values.size() - 1)));
  RealVector root(e.values.size());
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    if (e.values(i) < -tol.psd_tol * scale) {
      fail(ErrorCode::NotPSD, "psd_sqrt: negative eigenvalue " + std::to_string(e.values(i)));
    }
    root(i) = std::sqrt(std::max(e.values(i), 0.0));
  }
  ComplexMatrix S = e.vectors * root.asDiagonal() * e.vectors.adjoint();
  return hermitian_part(S);
}

double sigma_min(const ComplexMatrix& M) {
  if (M.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> s(M);
  return s.singularValues()(s.singularValues().size() - 1);
}

}  // namespace phasekit
