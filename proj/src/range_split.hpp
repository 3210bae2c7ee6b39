#pragma once

#include "phasekit/numerics.hpp"

namespace phasekit::detail {

/// Orthonormal split of C^n into range(C) and ker(C), and whether the kernel of
/// C coincides with the kernel of C^H (range orthogonal to kernel).
struct RangeSplit {
  int rank = 0;
  ComplexMatrix range;   // n x rank
  ComplexMatrix kernel;  // n x (n - rank)
  bool orthogonal = true;
};

inline RangeSplit range_split(const ComplexMatrix& C, const ToleranceConfig& tol) {
  const SvdResult s = svd(C);
  const auto n = C.rows();
  int r = 0;
  if (s.sigma(0) > 0.0) {
    for (Eigen::Index i = 0; i < s.sigma.size(); ++i) {
      if (s.sigma(i) > tol.rank_tol * s.sigma(0)) ++r;
    }
  }
  RangeSplit out;
  out.rank = r;
  out.range = s.U.leftCols(r);
  out.kernel = s.V.rightCols(n - r);
  if (r > 0 && r < n) {
    // ker C = ker C^H  <=>  range(C) is orthogonal to ker(C).
    out.orthogonal = spectral_norm(ComplexMatrix(out.range.adjoint() * out.kernel)) <= tol.recon_tol;
  }
  return out;
}

}  // namespace phasekit::detail
