#include "phasekit/phasecore.hpp"

#include <algorithm>
#include <cmath>

#include "angular.hpp"
#include "congruence.hpp"
#include "range_split.hpp"

namespace phasekit {

using detail::kPi;
using detail::kTwoPi;

ComplexMatrix e_tilde() {
  ComplexMatrix E(2, 2);
  E << 0.0, -kJ, -kJ, 1.0;
  return E;
}

ComplexMatrix assemble_core(int kernel_dim, const std::vector<double>& d_phases, int e_blocks,
                            double theta0) {
  const int m = static_cast<int>(d_phases.size());
  const int n = kernel_dim + m + 2 * e_blocks;
  ComplexMatrix D = ComplexMatrix::Zero(n, n);
  for (int i = 0; i < m; ++i) D(kernel_dim + i, kernel_dim + i) = std::exp(kJ * d_phases[i]);
  const ComplexMatrix E = std::exp(kJ * theta0) * e_tilde();
  for (int b = 0; b < e_blocks; ++b) D.block(kernel_dim + m + 2 * b, kernel_dim + m + 2 * b, 2, 2) = E;
  return D;
}

ComplexMatrix SectorialDecomposition::core() const {
  return assemble_core(kernel_dim, d_phases, e_block_count, theta0);
}

ComplexMatrix SectorialDecomposition::reconstruct() const {
  return T.adjoint() * core() * T;
}

std::vector<double> SectorialDecomposition::phases() const {
  std::vector<double> p = d_phases;
  for (int b = 0; b < e_block_count; ++b) {
    p.push_back(theta0 + kPi / 2.0);
    p.push_back(theta0 - kPi / 2.0);
  }
  std::sort(p.begin(), p.end(), std::greater<>());
  return p;
}

SectorialDecomposition sectorial_decompose(const ComplexMatrix& C, const ToleranceConfig& tol) {
  const SectorialClass cls = classify(C, tol);
  if (cls.tag != SectorialTag::Sectorial) {
    fail(ErrorCode::NotSectorial, "sectorial_decompose: 0 is not outside the numerical range");
  }
  const double th = *cls.theta0;
  const ComplexMatrix A = std::exp(-kJ * th) * C;
  const ComplexMatrix H = hermitian_part(A);
  const ComplexMatrix K = skew_part(A);

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eh(H);
  if (eh.info() != Eigen::Success || eh.eigenvalues()(0) <= 0.0) {
    fail(ErrorCode::NotSectorial, "sectorial_decompose: rotated Hermitian part is not definite");
  }
  const RealVector h = eh.eigenvalues();
  const ComplexMatrix& Q = eh.eigenvectors();
  const ComplexMatrix Hs = Q * h.cwiseSqrt().asDiagonal() * Q.adjoint();
  const ComplexMatrix Hinv = Q * h.cwiseSqrt().cwiseInverse().asDiagonal() * Q.adjoint();

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> em(hermitian_part(Hinv * K * Hinv));
  if (em.info() != Eigen::Success) fail(ErrorCode::NoConvergence, "eigensolver failed");
  const RealVector lam = em.eigenvalues().reverse();
  const ComplexMatrix V = em.eigenvectors().rowwise().reverse();

  SectorialDecomposition out;
  RealVector w(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    w(i) = std::pow(1.0 + lam(i) * lam(i), 0.25);
    out.d_phases.push_back(th + std::atan(lam(i)));
  }
  out.T = w.asDiagonal() * V.adjoint() * Hs;
  out.theta0 = th;
  return out;
}

SectorialDecomposition quasi_sectorial_decompose(const ComplexMatrix& C,
                                                 const ToleranceConfig& tol) {
  require_square(C, "quasi_sectorial_decompose");
  const auto n = C.rows();
  const detail::RangeSplit split = detail::range_split(C, tol);
  if (split.rank == 0) {
    SectorialDecomposition out;
    out.T = ComplexMatrix::Identity(n, n);
    out.kernel_dim = static_cast<int>(n);
    return out;
  }
  if (!split.orthogonal) {
    fail(ErrorCode::NotQuasiSectorial, "quasi_sectorial_decompose: ker C differs from ker C^H");
  }
  const ComplexMatrix Cs = split.range.adjoint() * C * split.range;
  SectorialDecomposition inner;
  try {
    inner = sectorial_decompose(Cs, tol);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotSectorial) throw;
    fail(ErrorCode::NotQuasiSectorial, "quasi_sectorial_decompose: compression is not sectorial");
  }
  const auto k = n - split.rank;
  ComplexMatrix W(n, n);
  W << split.kernel, split.range;
  ComplexMatrix blk = ComplexMatrix::Zero(n, n);
  blk.topLeftCorner(k, k).setIdentity();
  blk.bottomRightCorner(split.rank, split.rank) = inner.T;

  SectorialDecomposition out;
  out.T = blk * W.adjoint();
  out.kernel_dim = static_cast<int>(k);
  out.d_phases = inner.d_phases;
  out.theta0 = inner.theta0;
  return out;
}

SectorialDecomposition semi_sectorial_decompose(const ComplexMatrix& C, const ToleranceConfig& tol) {
  require_square(C, "semi_sectorial_decompose");
  require_finite(C, "semi_sectorial_decompose");
  const auto red = detail::congruence_reduce<Complex>(hermitian_part(C), skew_part(C), tol);
  SectorialDecomposition out;
  out.T = red.T;
  out.kernel_dim = red.kernel_dim;
  out.d_phases = red.d_phases;
  out.e_block_count = red.e_blocks;
  out.theta0 = red.theta0;
  return out;
}

SectorialDecomposition decompose(const ComplexMatrix& C, const ToleranceConfig& tol) {
  switch (classify(C, tol).tag) {
    case SectorialTag::Sectorial: return sectorial_decompose(C, tol);
    case SectorialTag::QuasiSectorial: return quasi_sectorial_decompose(C, tol);
    case SectorialTag::SemiSectorial: return semi_sectorial_decompose(C, tol);
    case SectorialTag::Indefinite: break;
  }
  fail(ErrorCode::NotSemiSectorial, "0 is interior to the numerical range");
}

PhaseSector make_sector(std::vector<double> ph, std::optional<double> hint) {
  PhaseSector out;
  if (ph.empty()) return out;
  std::sort(ph.begin(), ph.end(), std::greater<>());
  const double gamma = 0.5 * (ph.front() + ph.back());
  double g = detail::wrap_angle(gamma);
  if (g > kPi - 1e-12) g -= kTwoPi;
  if (hint) g += kTwoPi * std::round((*hint - g) / kTwoPi);
  const double shift = g - gamma;
  for (double& p : ph) p += shift;
  out.gamma = g;
  out.delta = ph.front() - ph.back();
  out.phases = std::move(ph);
  return out;
}

PhaseSector phases(const ComplexMatrix& C, std::optional<double> hint, const ToleranceConfig& tol) {
  return make_sector(decompose(C, tol).phases(), hint);
}

MatrixCheck matrix_small_gain_check(const ComplexMatrix& A, double gamma) {
  require_square(A, "matrix_small_gain_check");
  if (!(gamma > 0.0)) fail(ErrorCode::InvalidArgument, "gain bound must be positive");
  const SvdResult s = svd(A);
  MatrixCheck out;
  out.holds = s.sigma(0) * gamma < 1.0;
  if (!out.holds) {
    out.witness = ComplexMatrix(-(1.0 / s.sigma(0)) * s.V.col(0) * s.U.col(0).adjoint());
  }
  return out;
}

namespace {

// Some 2pi translate of x lies in [lo, hi] (with a little slack); returns it.
std::optional<double> translate_into(double x, double lo, double hi) {
  constexpr double kSlack = 1e-12;
  const double k = std::ceil((lo - kSlack - x) / kTwoPi);
  const double y = x + kTwoPi * k;
  if (y <= hi + kSlack) return y;
  return std::nullopt;
}

}  // namespace

MatrixCheck matrix_small_phase_check(const ComplexMatrix& A, double alpha, double beta,
                                     const ToleranceConfig& tol) {
  require_square(A, "matrix_small_phase_check");
  if (!(beta - alpha >= 0.0 && beta - alpha < kTwoPi)) {
    fail(ErrorCode::InvalidSector, "sector [alpha, beta] must satisfy 0 <= beta - alpha < 2pi");
  }
  const SectorialTag tag = classify(A, tol).tag;
  if (tag != SectorialTag::Sectorial && tag != SectorialTag::QuasiSectorial) {
    fail(ErrorCode::NotQuasiSectorial, "matrix_small_phase_check: A must be quasi-sectorial");
  }
  const SectorialDecomposition dec =
      tag == SectorialTag::Sectorial ? sectorial_decompose(A, tol) : quasi_sectorial_decompose(A, tol);
  MatrixCheck out;
  if (dec.d_phases.empty()) {
    out.holds = true;
    return out;
  }
  const double top = dec.d_phases.front();
  const double bot = dec.d_phases.back();
  const double k = std::round((-alpha - beta - top - bot) / (2.0 * kTwoPi));
  const double hi = top + kTwoPi * k;
  const double lo = bot + kTwoPi * k;
  const double m_hi = (kPi - beta) - hi;
  const double m_lo = lo - (-kPi - alpha);
  out.holds = m_hi > 0.0 && m_lo > 0.0;
  if (out.holds) return out;

  const int kd = dec.kernel_dim;
  const int last = static_cast<int>(dec.d_phases.size()) - 1;
  const ComplexMatrix Tinv = dec.T.fullPivLu().inverse();
  auto single = [&](int i, double phi) -> std::optional<ComplexMatrix> {
    if (!translate_into(kPi - phi, alpha, beta)) return std::nullopt;
    const ComplexVector x = Tinv.col(kd + i);
    return ComplexMatrix(std::exp(kJ * (kPi - phi)) * x * x.adjoint());
  };
  const bool top_first = m_hi <= m_lo;
  out.witness = top_first ? single(0, top) : single(last, bot);
  if (!out.witness) out.witness = top_first ? single(last, bot) : single(0, top);
  if (out.witness) return out;

  // Neither end maps into the sector: mix the two extreme coordinates so the
  // quadratic form lands on a phase whose negation does.
  std::optional<double> star;
  for (double edge : {kPi - beta, kPi - alpha}) {
    if (auto y = translate_into(edge, lo, hi)) {
      star = *y - kTwoPi * k;
      break;
    }
  }
  if (!star) return out;  // unreachable when the condition fails
  const double w1 = std::sin(*star - bot);
  const double w2 = std::sin(top - *star);
  const ComplexVector x = Tinv.col(kd) * std::sqrt(w1) + Tinv.col(kd + last) * std::sqrt(w2);
  const Complex q = (x.adjoint() * A * x)(0, 0);
  out.witness = ComplexMatrix(std::exp(kJ * (kPi - *star)) / std::abs(q) * x * x.adjoint());
  return out;
}

}  // namespace phasekit
