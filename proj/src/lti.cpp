#include "phasekit/lti.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include <Eigen/Eigenvalues>

namespace phasekit {

void StateSpace::validate() const {
  const auto n = A.rows();
  const auto m = D.rows();
  auto bad = [](const std::string& msg) { fail(ErrorCode::InvalidArgument, "state space: " + msg); };
  if (A.cols() != n) bad("A must be square");
  if (D.cols() != m || m < 1) bad("D must be square and non-empty");
  if (B.rows() != n || B.cols() != m) bad("B must be n x m");
  if (C.rows() != m || C.cols() != n) bad("C must be m x n");
  if (!A.allFinite() || !B.allFinite() || !C.allFinite() || !D.allFinite()) bad("entries must be finite");
}

StateSpace StateSpace::gain(const RealMatrix& D) {
  const auto m = D.rows();
  StateSpace g{RealMatrix(0, 0), RealMatrix(0, m), RealMatrix(m, 0), D};
  g.validate();
  return g;
}

StateSpace tf(const std::vector<double>& num, const std::vector<double>& den) {
  if (den.empty() || den.front() == 0.0) fail(ErrorCode::InvalidArgument, "tf: leading denominator coefficient is zero");
  if (num.size() > den.size()) fail(ErrorCode::InvalidArgument, "tf: transfer function must be proper");
  const int n = static_cast<int>(den.size()) - 1;
  std::vector<double> a(den.size()), b(den.size(), 0.0);
  for (size_t i = 0; i < den.size(); ++i) a[i] = den[i] / den.front();
  std::copy(num.begin(), num.end(), b.begin() + (den.size() - num.size()));
  for (double& v : b) v /= den.front();

  StateSpace g{RealMatrix::Zero(n, n), RealMatrix::Zero(n, 1), RealMatrix::Zero(1, n), RealMatrix::Constant(1, 1, b[0])};
  for (int i = 0; i < n; ++i) {
    g.A(0, i) = -a[i + 1];
    g.C(0, i) = b[i + 1] - b[0] * a[i + 1];
    if (i > 0) g.A(i, i - 1) = 1.0;
  }
  if (n > 0) g.B(0, 0) = 1.0;
  return g;
}

namespace {

RealMatrix blkdiag(const RealMatrix& X, const RealMatrix& Y) {
  RealMatrix Z = RealMatrix::Zero(X.rows() + Y.rows(), X.cols() + Y.cols());
  Z.topLeftCorner(X.rows(), X.cols()) = X;
  Z.bottomRightCorner(Y.rows(), Y.cols()) = Y;
  return Z;
}

RealMatrix kron(const RealMatrix& X, const RealMatrix& Y) {
  RealMatrix Z(X.rows() * Y.rows(), X.cols() * Y.cols());
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    for (Eigen::Index j = 0; j < X.cols(); ++j)
      Z.block(i * Y.rows(), j * Y.cols(), Y.rows(), Y.cols()) = X(i, j) * Y;
  return Z;
}

}  // namespace

StateSpace append(const StateSpace& g1, const StateSpace& g2) {
  g1.validate();
  g2.validate();
  return {blkdiag(g1.A, g2.A), blkdiag(g1.B, g2.B), blkdiag(g1.C, g2.C), blkdiag(g1.D, g2.D)};
}

StateSpace series(const StateSpace& g1, const StateSpace& g2) {
  g1.validate();
  g2.validate();
  if (g1.size() != g2.size()) fail(ErrorCode::InvalidArgument, "series: size mismatch");
  const auto n1 = g1.order();
  const auto n2 = g2.order();
  StateSpace g;
  g.A = RealMatrix::Zero(n1 + n2, n1 + n2);
  g.A.topLeftCorner(n1, n1) = g1.A;
  g.A.topRightCorner(n1, n2) = g1.B * g2.C;
  g.A.bottomRightCorner(n2, n2) = g2.A;
  g.B.resize(n1 + n2, g2.size());
  g.B << g1.B * g2.D, g2.B;
  g.C.resize(g1.size(), n1 + n2);
  g.C << g1.C, g1.D * g2.C;
  g.D = g1.D * g2.D;
  return g;
}

StateSpace scale(const StateSpace& h, const RealMatrix& M) {
  h.validate();
  if (h.size() != 1) fail(ErrorCode::InvalidArgument, "scale: h must be SISO");
  if (M.rows() != M.cols()) fail(ErrorCode::InvalidArgument, "scale: M must be square");
  const RealMatrix I = RealMatrix::Identity(M.rows(), M.rows());
  return {kron(h.A, I), kron(h.B, I), kron(h.C, M), h.D(0, 0) * M};
}

ComplexMatrix eval(const StateSpace& G, Complex s) {
  G.validate();
  const auto n = G.order();
  ComplexMatrix out = G.D.cast<Complex>();
  if (n == 0) return out;
  const ComplexMatrix M = s * ComplexMatrix::Identity(n, n) - G.A.cast<Complex>();
  Eigen::PartialPivLU<ComplexMatrix> lu(M);
  const double scale = std::max(1.0, std::abs(s)) + G.A.norm();
  if (sigma_min(M) <= 1e-13 * scale) {
    fail(ErrorCode::PoleProximity, "eval: s is numerically a pole");
  }
  out += G.C.cast<Complex>() * lu.solve(G.B.cast<Complex>());
  return out;
}

ComplexMatrix eval_inf(const StateSpace& G) {
  G.validate();
  return G.D.cast<Complex>();
}

namespace {

// Orthonormal basis of the Krylov space spanned by [B, AB, A^2 B, ...].
// Tolerances are relative: the first block to |B|, later ones to |A| (the
// previous block is orthonormal), so scaling B or C does not hide states.
RealMatrix krylov_basis(const RealMatrix& A, const RealMatrix& B, double rtol) {
  const auto n = A.rows();
  RealMatrix Q(n, 0);
  RealMatrix block = B;
  double tol = rtol * B.norm();
  while (Q.cols() < n && block.cols() > 0) {
    for (int pass = 0; pass < 2; ++pass) block -= Q * (Q.transpose() * block);
    Eigen::JacobiSVD<RealMatrix> sv(block, Eigen::ComputeThinU);
    Eigen::Index k = 0;
    while (k < sv.singularValues().size() && sv.singularValues()(k) > tol) ++k;
    if (k == 0) break;
    const RealMatrix add = sv.matrixU().leftCols(k);
    RealMatrix next(n, Q.cols() + k);
    next << Q, add;
    Q = next;
    block = A * add;
    tol = rtol * std::max(A.norm(), 1e-300);
  }
  return Q;
}

// Diagonal similarity (powers of two) equalizing off-diagonal row and column
// 1-norms of A, EISPACK style.
StateSpace balanced(const StateSpace& G) {
  StateSpace g = G;
  const auto n = g.A.rows();
  bool done = false;
  for (int sweep = 0; sweep < 100 && !done; ++sweep) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double c = g.A.col(i).cwiseAbs().sum() - std::abs(g.A(i, i));
      double r = g.A.row(i).cwiseAbs().sum() - std::abs(g.A(i, i));
      if (c == 0.0 || r == 0.0) continue;
      const double total = c + r;
      double f = 1.0;
      while (c < r / 2) { f *= 2; c *= 4; }
      while (c >= r * 2) { f /= 2; c /= 4; }
      if ((c + r) / f < 0.95 * total) {
        done = false;
        g.A.col(i) *= f;
        g.A.row(i) /= f;
        g.B.row(i) /= f;
        g.C.col(i) *= f;
      }
    }
  }
  return g;
}

}  // namespace

StateSpace minimal_realization(const StateSpace& G, const ToleranceConfig& tol) {
  G.validate();
  if (G.order() == 0) return G;
  const double t = tol.rank_tol;
  const StateSpace b = balanced(G);
  const RealMatrix Qc = krylov_basis(b.A, b.B, t);
  StateSpace c{Qc.transpose() * b.A * Qc, Qc.transpose() * b.B, b.C * Qc, b.D};
  if (c.order() == 0) return c;
  const RealMatrix Qo = krylov_basis(c.A.transpose(), c.C.transpose(), t);
  return {Qo.transpose() * c.A * Qo, Qo.transpose() * c.B, c.C * Qo, c.D};
}

namespace {

bool near_axis(Complex z) { return std::abs(z.real()) <= 1e-8 * std::max(1.0, std::abs(z)); }

std::vector<Pole> cluster_poles(const RealMatrix& A) {
  std::vector<Pole> out;
  const auto n = A.rows();
  if (n == 0) return out;
  Eigen::EigenSolver<RealMatrix> es(A, false);
  if (es.info() != Eigen::Success) fail(ErrorCode::NoConvergence, "poles: eigensolver failed");
  std::vector<Complex> ev(es.eigenvalues().data(), es.eigenvalues().data() + n);
  std::vector<bool> used(n, false);
  const ComplexMatrix Ac = A.cast<Complex>();
  const double anorm = std::max(1.0, A.norm());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (used[i]) continue;
    std::vector<Complex> members;
    for (Eigen::Index j = i; j < n; ++j) {
      if (!used[j] && std::abs(ev[j] - ev[i]) <= 1e-6 * std::max(1.0, std::abs(ev[i]))) {
        used[j] = true;
        members.push_back(ev[j]);
      }
    }
    Complex mean = 0.0;
    for (Complex z : members) mean += z;
    mean /= static_cast<double>(members.size());
    if (std::abs(mean.imag()) <= 1e-12 * std::max(1.0, std::abs(mean))) mean = mean.real();
    Pole p;
    p.value = mean;
    p.multiplicity = static_cast<int>(members.size());
    p.on_axis = near_axis(mean);
    if (p.on_axis) p.value = Complex(0.0, mean.imag());
    if (p.multiplicity > 1) {
      Eigen::JacobiSVD<ComplexMatrix> sv(Ac - mean * ComplexMatrix::Identity(n, n));
      int nullity = 0;
      for (Eigen::Index k = 0; k < n; ++k) {
        if (sv.singularValues()(k) <= 1e-7 * anorm) ++nullity;
      }
      p.semi_simple = nullity >= p.multiplicity;
    }
    out.push_back(p);
  }
  std::sort(out.begin(), out.end(), [](const Pole& a, const Pole& b) {
    if (a.value.real() != b.value.real()) return a.value.real() > b.value.real();
    return a.value.imag() > b.value.imag();
  });
  return out;
}

}  // namespace

std::vector<Pole> poles(const StateSpace& G, const ToleranceConfig& tol) {
  return cluster_poles(minimal_realization(G, tol).A);
}

bool is_lyapunov_stable(const StateSpace& G, const ToleranceConfig& tol) {
  for (const Pole& p : poles(G, tol)) {
    if (p.on_axis) {
      if (!p.semi_simple) return false;
    } else if (p.value.real() > 0.0) {
      return false;
    }
  }
  return true;
}

bool is_stable(const StateSpace& G, const ToleranceConfig& tol) {
  for (const Pole& p : poles(G, tol)) {
    if (p.on_axis || p.value.real() >= 0.0) return false;
  }
  return true;
}

namespace {

ComplexMatrix null_space(const ComplexMatrix& M, int dim) {
  Eigen::JacobiSVD<ComplexMatrix> sv(M, Eigen::ComputeFullV);
  return sv.matrixV().rightCols(dim);
}

}  // namespace

ComplexMatrix residue_at(const StateSpace& G, double omega0, const ToleranceConfig& tol) {
  const StateSpace g = minimal_realization(G, tol);
  const auto m = g.size();
  const Complex lam(0.0, omega0);
  for (const Pole& p : cluster_poles(g.A)) {
    if (std::abs(p.value - lam) > 1e-6 * std::max(1.0, std::abs(omega0))) continue;
    if (!p.semi_simple) fail(ErrorCode::NotSemiSimple, "residue_at: pole is not semi-simple");
    const auto n = g.order();
    const ComplexMatrix M = g.A.cast<Complex>() - p.value * ComplexMatrix::Identity(n, n);
    const ComplexMatrix X = null_space(M, p.multiplicity);
    const ComplexMatrix Y = null_space(ComplexMatrix(M.adjoint()), p.multiplicity);
    const ComplexMatrix P = X * (Y.adjoint() * X).inverse() * Y.adjoint();
    return g.C.cast<Complex>() * P * g.B.cast<Complex>();
  }
  return ComplexMatrix::Zero(m, m);
}

namespace {

void push_unique(std::vector<double>& v, double w) {
  for (double x : v) {
    if (std::abs(x - w) <= 1e-8 * std::max(1.0, w)) return;
  }
  v.push_back(w);
}

}  // namespace

std::vector<double> axis_pole_frequencies(const StateSpace& G, const ToleranceConfig& tol) {
  std::vector<double> out;
  for (const Pole& p : poles(G, tol)) {
    if (p.on_axis) push_unique(out, std::abs(p.value.imag()));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> axis_zero_frequencies(const StateSpace& G, const ToleranceConfig& tol) {
  const StateSpace g = minimal_realization(G, tol);
  const auto n = g.order();
  const auto m = g.size();
  std::vector<double> out;
  if (n == 0) return out;
  // Normal-rank deficient: every s is a zero of the pencil, none is isolated.
  {
    const ComplexMatrix G0 = eval(g, Complex(0.7317, 1.2913));
    const SvdResult sv = svd(G0);
    if (sv.sigma(m - 1) <= 1e-10 * std::max(sv.sigma(0), 1e-300)) return out;
  }
  // Finite generalized eigenvalues of the system pencil.
  RealMatrix S(n + m, n + m), E = RealMatrix::Zero(n + m, n + m);
  S << g.A, g.B, g.C, g.D;
  E.topLeftCorner(n, n).setIdentity();
  Eigen::GeneralizedEigenSolver<RealMatrix> ges(S, E, false);
  const double scale = std::max(1.0, S.norm());
  for (Eigen::Index i = 0; i < n + m; ++i) {
    const Complex al = ges.alphas()(i);
    const double be = ges.betas()(i);
    if (std::abs(be) <= 1e-12 * scale) continue;  // infinite or singular pencil
    const Complex z = al / be;
    if (near_axis(z)) push_unique(out, std::abs(z.imag()));
  }
  std::sort(out.begin(), out.end());
  return out;
}

GainResponse gain_response(const StateSpace& G, const std::vector<double>& omegas) {
  GainResponse out;
  for (double w : omegas) {
    const ComplexMatrix M = std::isinf(w) ? eval_inf(G) : eval(G, Complex(0.0, w));
    out.samples.push_back({w, spectral_norm(M)});
  }
  return out;
}

std::vector<double> default_frequency_grid(const StateSpace& G, int points_per_decade) {
  double lo = 1.0, hi = 1.0;
  if (G.order() > 0) {
    Eigen::EigenSolver<RealMatrix> es(G.A, false);
    bool any = false;
    for (Eigen::Index i = 0; i < G.order(); ++i) {
      const double r = std::abs(es.eigenvalues()(i));
      if (r <= 0.0) continue;
      lo = any ? std::min(lo, r) : r;
      hi = any ? std::max(hi, r) : r;
      any = true;
    }
  }
  const double d0 = std::floor(std::log10(std::min(lo, 1.0))) - 3.0;
  const double d1 = std::ceil(std::log10(std::max(hi, 1.0))) + 3.0;
  std::vector<double> out{0.0};
  const int count = static_cast<int>((d1 - d0) * points_per_decade);
  for (int i = 0; i <= count; ++i) out.push_back(std::pow(10.0, d0 + (d1 - d0) * i / count));
  out.push_back(kInfFrequency);
  return out;
}

HinfResult hinf_norm(const StateSpace& G, const ToleranceConfig& tol) {
  if (!is_stable(G, tol)) fail(ErrorCode::NotStable, "hinf_norm: system is not stable");
  std::vector<double> grid = default_frequency_grid(G, 60);
  for (const Pole& p : poles(G, tol)) {
    grid.push_back(std::abs(p.value.imag()));
    grid.push_back(std::abs(p.value));
  }
  std::sort(grid.begin(), grid.end());
  const GainResponse r = gain_response(G, grid);
  auto sig = [&](double w) { return spectral_norm(eval(G, Complex(0.0, w))); };

  HinfResult best{r.samples[0].sigma_max, r.samples[0].omega};
  for (const auto& s : r.samples) {
    if (s.sigma_max > best.value) best = {s.sigma_max, s.omega};
  }
  // Golden-section refinement around every finite local maximum.
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  const auto& sm = r.samples;
  for (size_t i = 1; i + 1 < sm.size(); ++i) {
    if (std::isinf(sm[i + 1].omega)) continue;
    if (sm[i].sigma_max < sm[i - 1].sigma_max || sm[i].sigma_max < sm[i + 1].sigma_max) continue;
    double a = sm[i - 1].omega, b = sm[i + 1].omega;
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = sig(x1), f2 = sig(x2);
    for (int it = 0; it < 200 && b - a > 1e-12 * std::max(1.0, b); ++it) {
      if (f1 < f2) {
        a = x1; x1 = x2; f1 = f2; x2 = a + g * (b - a); f2 = sig(x2);
      } else {
        b = x2; x2 = x1; f2 = f1; x1 = b - g * (b - a); f1 = sig(x1);
      }
    }
    const double w = (f1 > f2) ? x1 : x2;
    const double v = std::max(f1, f2);
    if (v > best.value) best = {v, w};
  }
  return best;
}

bool is_symmetric_system(const StateSpace& G, const ToleranceConfig& tol) {
  G.validate();
  // Fixed seed: the check must be deterministic.
  uint64_t state = 0x9e3779b97f4a7c15ull;
  auto next = [&]() {
    state ^= state << 13; state ^= state >> 7; state ^= state << 17;
    return static_cast<double>(state >> 11) / static_cast<double>(1ull << 53);
  };
  const double scale = std::max(1.0, G.A.norm());
  int tested = 0;
  for (int k = 0; k < 64 && tested < 32; ++k) {
    const Complex s(scale * (0.1 + 2.0 * next()), scale * (4.0 * next() - 2.0));
    ComplexMatrix M;
    try {
      M = eval(G, s);
    } catch (const Error&) {
      continue;
    }
    ++tested;
    if ((M - M.transpose()).norm() > std::max(tol.recon_tol * M.norm(), 1e-12)) return false;
  }
  return (G.D - G.D.transpose()).norm() <= std::max(tol.recon_tol * G.D.norm(), 1e-12);
}

bool is_inner(const StateSpace& G, const ToleranceConfig& tol) {
  if (!is_stable(G, tol)) return false;
  const auto m = G.size();
  const ComplexMatrix I = ComplexMatrix::Identity(m, m);
  for (double w : default_frequency_grid(G, 20)) {
    const ComplexMatrix M = std::isinf(w) ? eval_inf(G) : eval(G, Complex(0.0, w));
    if ((M.adjoint() * M - I).norm() > 1e-8) return false;
  }
  return true;
}

}  // namespace phasekit
