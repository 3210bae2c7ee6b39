#pragma once

// Congruence reduction of a semi-sectorial matrix C = Hc + j Ks to the form
//   C = T^* blkdiag(0, diag(e^{j phi_i}), e^{j theta0} Et, ..., e^{j theta0} Et) T
// with Et = [[0, -j], [-j, 1]]. Instantiated with Scalar = Complex for general
// matrices and Scalar = double for complex symmetric ones (Hc = Re C,
// Ks = Im C), where every transformation stays real.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "angular.hpp"
#include "phasekit/numerics.hpp"

namespace phasekit::detail {

template <typename Scalar>
using DynMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
struct Reduction {
  DynMat<Scalar> T;
  int kernel_dim = 0;
  std::vector<double> d_phases;  // descending
  int e_blocks = 0;
  double theta0 = 0.0;
};

template <typename Scalar>
Scalar conj_of(Scalar x) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return x;
  } else {
    return std::conj(x);
  }
}

template <typename Mat>
Mat sym(const Mat& M) {
  return (M + M.adjoint()) / 2.0;
}

// With E blocks the maximizer of lambda_min is flat to second order, so the
// grid/bisection angle can be off by ~1e-8 and leave spurious small
// eigenvalues in the rotated Hermitian part. Newton steps on the near-kernel V
// (split at the widest spectral gap below 1e-5) drive V^* H(t) V to zero.
template <typename Mat>
double refine_angle(const Mat& Hr, const Mat& Kr, double th) {
  using Eigen::Index;
  const Index r = Hr.rows();
  double delta = 0.0, best_delta = 0.0;
  double best_err = INFINITY;
  for (int it = 0; it < 5; ++it) {
    const double t = th + delta;
    const Mat H = sym<Mat>(std::cos(t) * Hr + std::sin(t) * Kr);
    const Mat K = sym<Mat>(-std::sin(t) * Hr + std::cos(t) * Kr);
    Eigen::SelfAdjointEigenSolver<Mat> es(H);
    if (es.info() != Eigen::Success) break;
    const auto& ev = es.eigenvalues();
    Index split = 0;
    double best = 1.0;
    for (Index i = 0; i < r && ev(i) < 1e-5; ++i) {
      const double hi = i + 1 < r ? std::max(ev(i + 1), 1e-300) : 1.0;
      const double ratio = hi / std::max(ev(i), 1e-18);
      if (ratio > best) {
        best = ratio;
        split = i + 1;
      }
    }
    if (split == 0 || best < 1e3) break;
    const Mat V = es.eigenvectors().leftCols(split);
    const Mat HV = V.adjoint() * H * V;
    const Mat KV = V.adjoint() * K * V;
    const double err = HV.norm();
    if (err >= best_err) break;
    best_err = err;
    best_delta = delta;
    const double den = KV.squaredNorm();
    if (den < 1e-300) break;
    const double step = -std::real((HV * KV).trace()) / den;
    if (std::abs(step) < 1e-17) break;
    delta += step;
  }
  return std::abs(best_delta) < 1e-6 ? best_delta : 0.0;
}

template <typename Scalar>
Reduction<Scalar> congruence_reduce(const DynMat<Scalar>& Hc, const DynMat<Scalar>& Ks,
                                    const ToleranceConfig& tol) {
  using Mat = DynMat<Scalar>;
  using Eigen::Index;
  const Index n = Hc.rows();
  Reduction<Scalar> out;

  const ComplexMatrix C = Hc.template cast<Complex>() + kJ * Ks.template cast<Complex>();
  const double scale = spectral_norm(C);
  if (scale == 0.0) {
    out.T = Mat::Identity(n, n);
    out.kernel_dim = static_cast<int>(n);
    return out;
  }
  const Mat H0 = Hc / scale;
  const Mat K0 = Ks / scale;

  // Common kernel of the Hermitian and skew parts.
  Mat stacked(2 * n, n);
  stacked << H0, K0;
  Eigen::JacobiSVD<Mat> sv(stacked, Eigen::ComputeFullV);
  Index r = 0;
  for (Index i = 0; i < n; ++i) {
    if (sv.singularValues()(i) > tol.rank_tol * sv.singularValues()(0)) ++r;
  }
  const Mat Vr = sv.matrixV().leftCols(r);
  const Mat Vk = sv.matrixV().rightCols(n - r);
  if (r == 0) {
    out.T = Mat::Identity(n, n);
    out.kernel_dim = static_cast<int>(n);
    return out;
  }

  const Mat Hr = sym<Mat>(Vr.adjoint() * H0 * Vr);
  const Mat Kr = sym<Mat>(Vr.adjoint() * K0 * Vr);
  const AngularMax am = maximize_min_eig(Hr, Kr);
  if (am.value < -tol.psd_tol) {
    fail(ErrorCode::NotSemiSectorial, "matrix is not semi-sectorial");
  }
  double th = am.angle;
  th += refine_angle<Mat>(Hr, Kr, th);
  const double c = std::cos(th);
  const double s = std::sin(th);
  const Mat H = sym<Mat>(c * Hr + s * Kr);
  const Mat K = sym<Mat>(-s * Hr + c * Kr);

  // Normalize H to blkdiag(I_p, 0).
  Eigen::SelfAdjointEigenSolver<Mat> eh(H);
  if (eh.info() != Eigen::Success) fail(ErrorCode::NoConvergence, "eigensolver failed");
  std::vector<Index> pos, zer;
  for (Index i = 0; i < r; ++i) {
    (eh.eigenvalues()(i) > tol.rank_tol ? pos : zer).push_back(i);
  }
  Mat Bp(r, static_cast<Index>(pos.size()));
  for (Index i = 0; i < Bp.cols(); ++i) {
    Bp.col(i) = eh.eigenvectors().col(pos[i]) / std::sqrt(eh.eigenvalues()(pos[i]));
  }
  Mat Bz(r, static_cast<Index>(zer.size()));
  for (Index i = 0; i < Bz.cols(); ++i) Bz.col(i) = eh.eigenvectors().col(zer[i]);

  // Skew content on the H-kernel: nonzero directions give phases theta0 +- pi/2.
  Mat Bn(r, 0), Bz0(r, 0);
  std::vector<double> nsign;
  if (Bz.cols() > 0) {
    Eigen::SelfAdjointEigenSolver<Mat> ek(sym<Mat>(Bz.adjoint() * K * Bz));
    std::vector<Index> nz, zz;
    for (Index i = 0; i < Bz.cols(); ++i) {
      (std::abs(ek.eigenvalues()(i)) > tol.rank_tol ? nz : zz).push_back(i);
    }
    Bn.resize(r, static_cast<Index>(nz.size()));
    for (Index i = 0; i < Bn.cols(); ++i) {
      const double kap = ek.eigenvalues()(nz[i]);
      Bn.col(i) = Bz * ek.eigenvectors().col(nz[i]) / std::sqrt(std::abs(kap));
      nsign.push_back(kap > 0 ? 1.0 : -1.0);
    }
    Bz0.resize(r, static_cast<Index>(zz.size()));
    for (Index i = 0; i < Bz0.cols(); ++i) Bz0.col(i) = Bz * ek.eigenvectors().col(zz[i]);
  }
  if (Bn.cols() > 0 && Bp.cols() > 0) {
    Mat X = -(Bn.adjoint() * K * Bp);
    for (Index i = 0; i < X.rows(); ++i) X.row(i) *= nsign[i];
    Bp += Bn * X;
  }

  // Pair H-kernel directions with range directions through the skew coupling.
  Index e = 0;
  Mat Ecols(r, 0);
  if (Bz0.cols() > 0 && Bp.cols() > 0) {
    const Mat Kc = Bp.adjoint() * K * Bz0;
    Eigen::JacobiSVD<Mat> cs(Kc, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double ctol = tol.rank_tol * std::max(1.0, Bp.norm());
    for (Index i = 0; i < cs.singularValues().size(); ++i) {
      if (cs.singularValues()(i) > ctol) ++e;
    }
    Bp = (Bp * cs.matrixU()).eval();
    Bz0 = (Bz0 * cs.matrixV()).eval();
    Ecols.resize(r, 2 * e);
    for (Index i = 0; i < e; ++i) {
      const auto w = Bz0.col(i);
      const double sig = std::real((Bp.col(i).adjoint() * K * w)(0, 0));
      const double kyy = std::real((Bp.col(i).adjoint() * K * Bp.col(i))(0, 0));
      Bp.col(i) += (-kyy / (2.0 * sig)) * w;
      const auto y = Bp.col(i);
      for (Index j = 0; j < Bp.cols(); ++j) {
        if (j == i) continue;
        const Scalar kvy = (Bp.col(j).adjoint() * K * y)(0, 0);
        Bp.col(j) += (-conj_of(kvy) / sig) * w;
      }
      Ecols.col(2 * i) = -w / sig;
      Ecols.col(2 * i + 1) = Bp.col(i);
    }
  }

  // Remaining range block: H = I, diagonalize K.
  const Mat Brest = Bp.rightCols(Bp.cols() - e);
  struct DCol {
    double phase;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v;
  };
  std::vector<DCol> dcols;
  if (Brest.cols() > 0) {
    Eigen::SelfAdjointEigenSolver<Mat> er(sym<Mat>(Brest.adjoint() * K * Brest));
    for (Index i = 0; i < Brest.cols(); ++i) {
      const double lam = er.eigenvalues()(i);
      dcols.push_back({th + std::atan(lam),
                       Brest * er.eigenvectors().col(i) / std::pow(1.0 + lam * lam, 0.25)});
    }
  }
  for (Index i = 0; i < Bn.cols(); ++i) {
    dcols.push_back({th + nsign[i] * kPi / 2.0, Bn.col(i)});
  }
  std::stable_sort(dcols.begin(), dcols.end(),
                   [](const DCol& a, const DCol& b) { return a.phase > b.phase; });

  const Index kdim = (n - r) + (Bz0.cols() - e);
  Mat P(n, n);
  P.leftCols(n - r) = Vk;
  P.middleCols(n - r, Bz0.cols() - e) = Vr * Bz0.rightCols(Bz0.cols() - e);
  Index col = kdim;
  for (const auto& d : dcols) {
    P.col(col++) = Vr * d.v;
    out.d_phases.push_back(d.phase);
  }
  P.rightCols(2 * e) = Vr * Ecols;

  out.T = P.fullPivLu().inverse() * std::sqrt(scale);
  out.kernel_dim = static_cast<int>(kdim);
  out.e_blocks = static_cast<int>(e);
  out.theta0 = th;
  return out;
}

}  // namespace phasekit::detail
