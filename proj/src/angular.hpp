#pragma once

// Angular searches over the pencil cos(t) H + sin(t) K of two self-adjoint
// matrices. For a matrix C = H + jK this family is the Hermitian part of
// e^{-jt} C, so its extreme eigenvalues describe the supporting lines of the
// numerical range W(C).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "phasekit/errors.hpp"

namespace phasekit::detail {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduce an angle into [-pi, pi).
inline double wrap_angle(double t) {
  double r = std::fmod(t + kPi, kTwoPi);
  if (r < 0) r += kTwoPi;
  return r - kPi;
}

template <typename Mat>
struct MinEigAt {
  double value;
  double slope;  // derivative in t along the selected eigenvector
};

/// Smallest eigenvalue of cos(t) H + sin(t) K and its one-sided derivative.
template <typename Mat>
MinEigAt<Mat> min_eig(const Mat& H, const Mat& K, double t) {
  const double c = std::cos(t);
  const double s = std::sin(t);
  Mat M = c * H + s * K;
  M = (M + M.adjoint()).eval() / 2.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(M);
  if (es.info() != Eigen::Success) {
    fail(ErrorCode::NoConvergence, "angular search: eigensolver did not converge");
  }
  const auto v = es.eigenvectors().col(0);
  const Mat dM = -s * H + c * K;
  const double slope = std::real((v.adjoint() * dM * v)(0, 0));
  return {es.eigenvalues()(0), slope};
}

template <typename Mat>
double min_eig_value(const Mat& H, const Mat& K, double t) {
  const double c = std::cos(t);
  const double s = std::sin(t);
  Mat M = c * H + s * K;
  M = (M + M.adjoint()).eval() / 2.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(M, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    fail(ErrorCode::NoConvergence, "angular search: eigensolver did not converge");
  }
  return es.eigenvalues()(0);
}

struct AngularMax {
  double angle;  // in [-pi, pi)
  double value;
};

/// Maximizes g(t) = lambda_min(cos t H + sin t K) over the circle.
///
/// A uniform grid seeds the search; each of the best grid cells is then
/// refined by bisecting on the sign of g'(t). g is the minimum of smooth
/// eigenvalue branches, so its local maxima are either smooth critical points
/// or concave kinks, and both show up as a sign change of the slope.
template <typename Mat>
AngularMax maximize_min_eig(const Mat& H, const Mat& K, int grid = 256) {
  std::vector<double> g(grid);
  const double step = kTwoPi / grid;
  for (int i = 0; i < grid; ++i) g[i] = min_eig_value(H, K, -kPi + i * step);

  // Candidate cells: grid-local maxima, best first.
  std::vector<int> cand;
  for (int i = 0; i < grid; ++i) {
    const double l = g[(i + grid - 1) % grid];
    const double r = g[(i + 1) % grid];
    if (g[i] >= l && g[i] >= r) cand.push_back(i);
  }
  std::sort(cand.begin(), cand.end(), [&](int a, int b) { return g[a] > g[b]; });
  if (cand.size() > 4) cand.resize(4);

  AngularMax best{-kPi + (cand.empty() ? 0 : cand[0]) * step,
                  cand.empty() ? g[0] : g[cand[0]]};
  for (int i : cand) {
    double lo = -kPi + (i - 1) * step;
    double hi = -kPi + (i + 1) * step;
    for (int it = 0; it < 64 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (min_eig(H, K, mid).slope >= 0.0) lo = mid; else hi = mid;
    }
    const double t = 0.5 * (lo + hi);
    const double v = min_eig_value(H, K, t);
    if (v > best.value) best = {t, v};
  }
  best.angle = wrap_angle(best.angle);
  return best;
}

/// Connected arc of { t : g(t) >= level } containing `seed` (which must satisfy
/// the inequality). Returns {start, end} with end >= start, measured
/// counterclockwise; the ends are located by bisection to `depth` levels below
/// the grid spacing.
template <typename Mat>
std::pair<double, double> superlevel_arc(const Mat& H, const Mat& K, double seed, double level,
                                         int grid = 256, int depth = 50) {
  const double step = kTwoPi / grid;
  auto inside = [&](double t) { return min_eig_value(H, K, t) >= level; };
  auto edge = [&](double in, double out) {
    for (int it = 0; it < depth; ++it) {
      const double mid = 0.5 * (in + out);
      if (inside(mid)) in = mid; else out = mid;
    }
    return 0.5 * (in + out);
  };
  double hi = seed;
  int k = 0;
  while (k < grid && inside(hi + step)) { hi += step; ++k; }
  if (k == grid) return {seed - kPi, seed + kPi};
  const double end = edge(hi, hi + step);
  double lo = seed;
  k = 0;
  while (k < grid && inside(lo - step)) { lo -= step; ++k; }
  const double start = edge(lo, lo - step);
  return {start, end};
}

}  // namespace phasekit::detail
