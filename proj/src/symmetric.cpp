#include "phasekit/symmetric.hpp"

#include <algorithm>
#include <cmath>

#include "angular.hpp"
#include "congruence.hpp"
#include "phasekit/phasecore.hpp"

namespace phasekit {

bool is_complex_symmetric(const ComplexMatrix& C, const ToleranceConfig& tol) {
  if (C.rows() != C.cols()) return false;
  return spectral_norm(ComplexMatrix(C - C.transpose())) <= tol.psd_tol * spectral_norm(C);
}

namespace {

void require_symmetric(const ComplexMatrix& C, const ToleranceConfig& tol, std::string_view what) {
  require_square(C, what);
  require_finite(C, what);
  if (!is_complex_symmetric(C, tol)) {
    fail(ErrorCode::NotSymmetric, std::string(what) + ": input is not complex symmetric");
  }
}

// Z symmetric unitary; returns unitary S with S S^T = Z.
ComplexMatrix symmetric_unitary_root(const ComplexMatrix& Z) {
  const auto k = Z.rows();
  const RealMatrix X = Z.real();
  const RealMatrix Y = Z.imag();
  // X and Y are commuting real symmetric matrices: a generic combination
  // shares their eigenvectors.
  for (double mu : {0.5377, 1.8339, -2.2588, 0.8622, 0.3188}) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(RealMatrix((X + mu * Y + (X + mu * Y).transpose()) / 2.0));
    const RealMatrix& Q = es.eigenvectors();
    const ComplexMatrix Dz = Q.transpose().cast<Complex>() * Z * Q.cast<Complex>();
    const ComplexMatrix off = Dz - ComplexMatrix(Dz.diagonal().asDiagonal());
    if (off.norm() > 1e-9 * std::sqrt(static_cast<double>(k))) continue;
    ComplexVector half(k);
    for (Eigen::Index i = 0; i < k; ++i) half(i) = std::exp(kJ * (std::arg(Dz(i, i)) / 2.0));
    return Q.cast<Complex>() * half.asDiagonal() * Q.transpose().cast<Complex>();
  }
  fail(ErrorCode::NoConvergence, "takagi: phase correction did not converge");
}

}  // namespace

TakagiFactorization takagi(const ComplexMatrix& C, const ToleranceConfig& tol) {
  require_symmetric(C, tol, "takagi");
  const auto n = C.rows();
  const SvdResult s = svd(C);
  TakagiFactorization out;
  out.U = s.U;
  out.sigma = s.sigma;
  const double smax = s.sigma(0);
  if (smax == 0.0) return out;

  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index end = start + 1;
    while (end < n && s.sigma(end - 1) - s.sigma(end) < 1e-8 * smax) ++end;
    const Eigen::Index k = end - start;
    if (s.sigma(start) > tol.rank_tol * smax) {
      const ComplexMatrix Uc = s.U.middleCols(start, k);
      ComplexMatrix Z = Uc.adjoint() * s.V.middleCols(start, k).conjugate();
      Z = ((Z + Z.transpose()) / 2.0).eval();
      Eigen::JacobiSVD<ComplexMatrix> zs(Z, Eigen::ComputeFullU | Eigen::ComputeFullV);
      Z = zs.matrixU() * zs.matrixV().adjoint();
      Z = ((Z + Z.transpose()) / 2.0).eval();
      out.U.middleCols(start, k) = Uc * symmetric_unitary_root(Z);
    }
    start = end;
  }
  return out;
}

int ThompsonBlock::dimension() const {
  switch (kind) {
    case BlockKind::K:
    case BlockKind::L: return size;
    case BlockKind::M: return 2 * size - 1;
    case BlockKind::N: return 2 * size;
  }
  return size;
}

ComplexMatrix build_block(const ThompsonBlock& spec) {
  if (spec.size < 1) fail(ErrorCode::InvalidParam, "block size must be at least 1");
  if (spec.sign != 1 && spec.sign != -1) fail(ErrorCode::InvalidParam, "block sign must be +1 or -1");
  const int d = spec.dimension();
  ComplexMatrix B = ComplexMatrix::Zero(d, d);
  switch (spec.kind) {
    case BlockKind::K:
    case BlockKind::L: {
      const Complex anti = spec.kind == BlockKind::K ? Complex(1.0) : Complex(spec.a, -1.0);
      const Complex below = spec.kind == BlockKind::K ? -kJ : Complex(1.0);
      for (int i = 0; i < d; ++i) B(i, d - 1 - i) = anti;
      for (int i = 1; i < d; ++i) B(i, d - i) = below;
      B *= static_cast<double>(spec.sign);
      break;
    }
    case BlockKind::M: {
      const int m = spec.size;
      ComplexMatrix J = ComplexMatrix::Zero(m, m - 1);
      for (int i = 0; i < m - 1; ++i) {
        J(i, i) = -kJ;
        J(i + 1, i) = 1.0;
      }
      B.topRightCorner(m, m - 1) = J;
      B.bottomLeftCorner(m - 1, m) = J.transpose();
      break;
    }
    case BlockKind::N: {
      if (spec.b == 0.0) fail(ErrorCode::InvalidParam, "N blocks require b != 0");
      const int nb = spec.size;
      ComplexMatrix R(2, 2), S(2, 2);
      R << spec.b, Complex(spec.a, -1.0), Complex(spec.a, -1.0), -spec.b;
      S << 0.0, 1.0, 1.0, 0.0;
      for (int i = 0; i < nb; ++i) B.block(2 * i, 2 * (nb - 1 - i), 2, 2) = R;
      for (int i = 1; i < nb; ++i) B.block(2 * i, 2 * (nb - i), 2, 2) = S;
      break;
    }
  }
  return B;
}

ZeroLocation block_zero_location(const ThompsonBlock& spec, const ToleranceConfig& tol) {
  return zero_location(build_block(spec), tol);
}

ComplexMatrix RealCongruenceDecomposition::core() const {
  return assemble_core(kernel_dim, d_phases, e_block_count, theta0);
}

ComplexMatrix RealCongruenceDecomposition::reconstruct() const {
  const ComplexMatrix Tc = T.cast<Complex>();
  return Tc.transpose() * core() * Tc;
}

std::vector<double> RealCongruenceDecomposition::phases() const {
  SectorialDecomposition tmp;
  tmp.d_phases = d_phases;
  tmp.e_block_count = e_block_count;
  tmp.theta0 = theta0;
  return tmp.phases();
}

RealCongruenceDecomposition real_congruence_decompose(const ComplexMatrix& C,
                                                      const ToleranceConfig& tol) {
  require_symmetric(C, tol, "real_congruence_decompose");
  const ComplexMatrix Cs = (C + C.transpose()) / 2.0;
  const RealMatrix R = Cs.real();
  const RealMatrix I = Cs.imag();
  const auto red = detail::congruence_reduce<double>(R, I, tol);
  RealCongruenceDecomposition out;
  out.T = red.T;
  out.kernel_dim = red.kernel_dim;
  out.d_phases = red.d_phases;
  out.e_block_count = red.e_blocks;
  out.theta0 = red.theta0;
  return out;
}

BlockIdentityReport verify_block_identities(const std::vector<double>& a_values) {
  BlockIdentityReport rep;
  const ComplexMatrix E = e_tilde();
  RealMatrix TK(2, 2);
  TK << 1.0, 0.0, 0.0, -1.0;
  const ComplexMatrix K2 = build_block({BlockKind::K, 2});
  rep.k2_residual = (K2 - (-kJ) * TK.transpose().cast<Complex>() * E * TK.cast<Complex>()).norm();
  rep.max_residual = rep.k2_residual;
  for (double a : a_values) {
    RealMatrix TL(2, 2);
    TL << a * a + 1.0, a / 2.0, 0.0, 1.0;
    TL /= std::sqrt(a * a + 1.0);
    const ComplexMatrix L2 = build_block({BlockKind::L, 2, a});
    const ComplexMatrix rhs = Complex(1.0, a) * TL.transpose().cast<Complex>() * E * TL.cast<Complex>();
    const double res = (L2 - rhs).norm();
    rep.a_values.push_back(a);
    rep.l2_residuals.push_back(res);
    rep.max_residual = std::max(rep.max_residual, res);
  }
  return rep;
}

}  // namespace phasekit
