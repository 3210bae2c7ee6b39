#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "angular.hpp"
#include "phasekit/feedback.hpp"
#include "phasekit/phasecore.hpp"
#include "phasekit/symmetric.hpp"

namespace phasekit {

using detail::kPi;

namespace {

constexpr double kViolationTol = 1e-9;

ComplexMatrix value_at(const StateSpace& G, double w) {
  return std::isinf(w) ? eval_inf(G) : eval(G, Complex(0.0, w));
}

// How deep the phase of -1/x (i.e. pi - phi) sits inside the envelope at w;
// nonnegative means the small phase condition fails for that phase.
double depth(double phi, const PhaseEnvelope& env, double w) {
  const auto [a, b] = env.at(w);
  return envelope_slack(kPi - phi, kPi - phi, a, b);
}

double max_depth(const std::vector<double>& phis, const PhaseEnvelope& env, double w) {
  double d = -std::numeric_limits<double>::infinity();
  for (double p : phis) d = std::max(d, depth(p, env, w));
  return d;
}

struct Peak {
  double omega = 0.0;
  double value = -std::numeric_limits<double>::infinity();
};

// Grid maximum of f over finite frequencies, refined by golden section between
// the neighbouring grid points.
Peak grid_peak(const std::vector<double>& grid, const std::function<double(double)>& f) {
  std::vector<double> w;
  for (double x : grid) if (std::isfinite(x)) w.push_back(x);
  std::vector<double> v;
  for (double x : w) v.push_back(f(x));
  const auto k = static_cast<size_t>(std::max_element(v.begin(), v.end()) - v.begin());
  Peak best{w[k], v[k]};
  if (w.size() < 2) return best;
  double a = w[k > 0 ? k - 1 : 0];
  double b = w[std::min(k + 1, w.size() - 1)];
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && b - a > 1e-13 * std::max(1.0, b); ++it) {
    if (f1 < f2) {
      a = x1; x1 = x2; f1 = f2; x2 = a + g * (b - a); f2 = f(x2);
    } else {
      b = x2; x2 = x1; f2 = f1; x1 = b - g * (b - a); f1 = f(x1);
    }
  }
  if (std::max(f1, f2) > best.value) best = f1 > f2 ? Peak{x1, f1} : Peak{x2, f2};
  return best;
}

std::vector<double> scan_grid(const StateSpace& G, const PhaseEnvelope& env) {
  std::vector<double> w = default_frequency_grid(G, 60);
  for (const auto& p : env.points()) w.push_back(p.omega);
  std::sort(w.begin(), w.end());
  w.erase(std::unique(w.begin(), w.end()), w.end());
  return w;
}

std::string num(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

// Evidence is recomputed from G and H alone.
void fill_evidence(const StateSpace& G, DestabilizerReport& r, const ToleranceConfig& tol) {
  const auto m = G.size();
  const ComplexMatrix M = ComplexMatrix::Identity(m, m) + value_at(G, r.omega0) * value_at(r.H, r.omega0);
  r.sigma_min = sigma_min(M);
  StateSpace cl;
  try {
    cl = interconnect(G, r.H, tol);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::IllPosed) throw;
    r.ill_posed = true;
    return;
  }
  if (cl.order() == 0 || std::isinf(r.omega0)) return;
  const Eigen::ComplexEigenSolver<ComplexMatrix> es(cl.A.cast<Complex>(), false);
  const Complex target(0.0, r.omega0);
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double d = std::abs(es.eigenvalues()(i) - target);
    if (d < best) {
      best = d;
      r.closed_loop_pole = es.eigenvalues()(i);
    }
  }
  r.pole_distance = best;
}

DestabilizerReport unstable_plant(const StateSpace& G, const PhaseEnvelope& env, const ToleranceConfig& tol) {
  DestabilizerReport r;
  r.construction = "unstable-plant";
  r.H = StateSpace::gain(RealMatrix::Zero(G.size(), G.size()));
  r.omega0 = 0.0;
  r.sigma_min = 1.0;
  // G#0 carries the poles of G; report the rightmost one.
  const Eigen::ComplexEigenSolver<ComplexMatrix> es(G.A.cast<Complex>(), false);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (!r.closed_loop_pole || es.eigenvalues()(i).real() > r.closed_loop_pole->real()) {
      r.closed_loop_pole = es.eigenvalues()(i);
    }
  }
  r.pole_distance = 0.0;
  r.membership = envelope_membership(r.H, env, true, tol);
  return r;
}

// Scalar h through the interpolator; phase pi - phi clamped into the envelope
// when it sits within the violation tolerance outside it.
StateSpace interpolate(double w0, double phi, const PhaseEnvelope& env) {
  double psi = kPi - phi;
  const auto [a, b] = env.at(w0);
  const double k = std::round(((a + b) / 2 - psi) / (2 * kPi));
  psi = std::clamp(psi + 2 * kPi * k, a, b);
  const Complex target = std::isinf(w0) || w0 == 0.0 ? Complex(std::cos(psi) >= 0 ? 1.0 : -1.0, 0.0)
                                                     : std::polar(1.0, psi);
  try {
    return design_scalar_interpolator(w0, target, env);
  } catch (const Error& e) {
    fail(ErrorCode::SynthesisFailed, "scalar interpolation at omega=" + num(w0) + " failed: " + e.what());
  }
}

// Static part: a violating eigenvalue of the real symmetric G(inf), deepest
// first, larger magnitude on ties.
std::optional<double> violating_eigenvalue(const RealMatrix& D, const PhaseEnvelope& env) {
  const Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (D + D.transpose()), Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, D.norm());
  std::optional<double> pick;
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double lam = es.eigenvalues()(i);
    if (std::abs(lam) <= 1e-12 * scale) continue;
    const double d = depth(lam > 0 ? 0.0 : kPi, env, kInfFrequency);
    if (d < -kViolationTol) continue;
    if (!pick || d > best + 1e-12 || (std::abs(d - best) <= 1e-12 && std::abs(lam) > std::abs(*pick))) {
      pick = lam;
      best = d;
    }
  }
  return pick;
}

}  // namespace

DestabilizerReport synthesize_destabilizer_symmetric(const StateSpace& G, const PhaseEnvelope& env,
                                                     const ToleranceConfig& tol) {
  G.validate();
  if (!is_symmetric_system(G, tol)) fail(ErrorCode::NotSymmetric, "synthesis: G is not symmetric");
  if (!is_stable(G, tol)) return unstable_plant(G, env, tol);
  const auto m = G.size();

  DestabilizerReport r;
  if (const auto lam = violating_eigenvalue(G.D, env)) {
    r.construction = "infinity";
    r.omega0 = kInfFrequency;
    const StateSpace h = interpolate(kInfFrequency, *lam > 0 ? 0.0 : kPi, env);
    // h(inf) = +-1; rescale so that h(inf) = -1/lambda
    r.H = scale(h, RealMatrix::Identity(m, m) / std::abs(*lam));
  } else {
    auto phase_depth = [&](double w) { return max_depth(phases(value_at(G, w), std::nullopt, tol).phases, env, w); };
    const Peak peak = grid_peak(scan_grid(G, env), phase_depth);
    if (peak.value < -kViolationTol) {
      fail(ErrorCode::ConditionHolds, "synthesis: small phase condition holds against the envelope");
    }
    r.construction = "finite";
    r.omega0 = peak.omega;
    const RealCongruenceDecomposition dec = real_congruence_decompose(value_at(G, r.omega0), tol);
    int idx = -1;
    double best = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < dec.d_phases.size(); ++i) {
      const double d = depth(dec.d_phases[i], env, r.omega0);
      if (d > best) {
        best = d;
        idx = static_cast<int>(i);
      }
    }
    if (idx < 0 || best < -1e-6) {
      fail(ErrorCode::SynthesisFailed,
           "synthesis: the violating phase at omega=" + num(r.omega0) + " belongs to an E block");
    }
    const RealVector x = dec.T.inverse().col(dec.kernel_dim + idx);
    const StateSpace h = interpolate(r.omega0, dec.d_phases[idx], env);
    r.H = minimal_realization(scale(h, x * x.transpose()), tol);
  }
  fill_evidence(G, r, tol);
  r.membership = envelope_membership(r.H, env, true, tol);
  return r;
}

namespace {

// Rectangular product G1 G2 (series connection without the square check).
StateSpace product(const RealMatrix& A1, const RealMatrix& B1, const RealMatrix& C1, const RealMatrix& D1,
                   const RealMatrix& A2, const RealMatrix& B2, const RealMatrix& C2, const RealMatrix& D2) {
  const auto n1 = A1.rows(), n2 = A2.rows();
  StateSpace g;
  g.A = RealMatrix::Zero(n1 + n2, n1 + n2);
  g.A.topLeftCorner(n1, n1) = A1;
  g.A.topRightCorner(n1, n2) = B1 * C2;
  g.A.bottomRightCorner(n2, n2) = A2;
  g.B.resize(n1 + n2, B2.cols());
  g.B << B1 * D2, B2;
  g.C.resize(C1.rows(), n1 + n2);
  g.C << C1, D1 * C2;
  g.D = D1 * D2;
  return g;
}

// Scalar all-pass (+-1 or +-(c - s)/(c + s)) with value e^{j theta} at j w0.
StateSpace allpass(double w0, double theta) {
  theta = detail::wrap_angle(theta);
  if (std::abs(theta) <= 1e-14) return tf({1.0}, {1.0});
  if (std::abs(std::abs(theta) - kPi) <= 1e-14) return tf({-1.0}, {1.0});
  if (theta < 0.0) {
    const double c = w0 / std::tan(-theta / 2);
    return tf({-1.0, c}, {1.0, c});
  }
  const double c = w0 / std::tan((kPi - theta) / 2);
  return tf({1.0, -c}, {1.0, c});
}

}  // namespace

DestabilizerReport synthesize_destabilizer_gain_symmetric(const StateSpace& G, const GainEnvelope& env,
                                                          const ToleranceConfig& tol) {
  G.validate();
  if (!is_symmetric_system(G, tol)) fail(ErrorCode::NotSymmetric, "synthesis: G is not symmetric");
  if (!is_stable(G, tol)) fail(ErrorCode::NotStable, "synthesis: G must be stable");
  if (env.weight) {
    env.weight->validate();
    if (env.weight->size() != 1 || !is_stable(*env.weight, tol)) {
      fail(ErrorCode::InvalidArgument, "gain envelope weight must be a stable SISO system");
    }
  } else if (!(env.constant > 0.0) || !std::isfinite(env.constant)) {
    fail(ErrorCode::InvalidArgument, "gain envelope constant must be positive");
  }
  const auto m = G.size();
  std::vector<double> grid = default_frequency_grid(G, 60);
  if (env.weight) {
    for (double w : default_frequency_grid(*env.weight, 60)) grid.push_back(w);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  }
  auto excess = [&](double w) { return spectral_norm(value_at(G, w)) * env.at(w); };

  // grid maximum including the end points, first occurrence wins
  Peak peak;
  for (double w : grid) {
    const double v = excess(w);
    if (v > peak.value + 1e-15) peak = {w, v};
  }
  if (std::isfinite(peak.omega) && peak.value < 1.0 - 1e-12) {
    const Peak p = grid_peak(grid, excess);
    if (p.value > peak.value) peak = p;
  }
  if (peak.value < 1.0 - 1e-12) {
    fail(ErrorCode::ConditionHolds, "synthesis: small gain condition holds, peak " + num(peak.value));
  }

  DestabilizerReport r;
  r.construction = "gain";
  r.omega0 = peak.omega;
  const ComplexMatrix G0 = value_at(G, r.omega0);
  if (r.omega0 == 0.0 || std::isinf(r.omega0)) {
    const Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (G0.real() + G0.real().transpose()));
    Eigen::Index k = 0;
    es.eigenvalues().cwiseAbs().maxCoeff(&k);
    const double lam = es.eigenvalues()(k);
    const RealVector q = es.eigenvectors().col(k);
    const RealMatrix H0 = -(1.0 / lam) * q * q.transpose();
    if (env.weight) {
      const double w0 = value_at(*env.weight, r.omega0)(0, 0).real();
      r.H = scale(*env.weight, H0 / w0);
    } else {
      r.H = StateSpace::gain(H0);
    }
  } else {
    const TakagiFactorization tk = takagi(G0, tol);
    const double sigma = tk.sigma(0);
    const ComplexVector v = tk.U.col(0).conjugate();
    // W(s): m x 1 column of scaled all-passes with W(j w0) = v
    RealMatrix Aw(0, 0), Bw(0, 1), Cw(m, 0), Dw(m, 1);
    for (int i = 0; i < m; ++i) {
      const StateSpace a = allpass(r.omega0, std::arg(v(i)));
      const double mag = std::abs(v(i));
      const auto n0 = Aw.rows(), na = a.A.rows();
      RealMatrix A2 = RealMatrix::Zero(n0 + na, n0 + na);
      A2.topLeftCorner(n0, n0) = Aw;
      A2.bottomRightCorner(na, na) = a.A;
      RealMatrix B2(n0 + na, 1);
      B2 << Bw, a.B;
      RealMatrix C2 = RealMatrix::Zero(m, n0 + na);
      C2.leftCols(n0) = Cw;
      C2.block(i, n0, 1, na) = mag * a.C;
      Aw = A2;
      Bw = B2;
      Cw = C2;
      Dw(i, 0) = mag * a.D(0, 0);
    }
    StateSpace H = product(Aw, Bw, Cw, Dw, Aw.transpose(), Cw.transpose(), Bw.transpose(), Dw.transpose());
    H.D *= -1.0 / sigma;
    H.C *= -1.0 / sigma;
    if (env.weight) {
      const Complex w0 = value_at(*env.weight, r.omega0)(0, 0);
      const StateSpace q = series(*env.weight, allpass(r.omega0, -std::arg(w0)));
      H = series(H, scale(q, RealMatrix::Identity(m, m) / std::abs(w0)));
    }
    r.H = minimal_realization(H, tol);
  }

  // gain containment on the grid
  r.membership.member = true;
  r.membership.worst_slack = std::numeric_limits<double>::infinity();
  if (!is_stable(r.H, tol)) {
    r.membership.member = false;
    r.membership.reason = "not stable";
  }
  for (double w : grid) {
    const double slack = env.at(w) - spectral_norm(value_at(r.H, w));
    if (slack < r.membership.worst_slack) {
      r.membership.worst_slack = slack;
      r.membership.offending_omega = w;
    }
  }
  if (r.membership.worst_slack < -1e-9 * std::max(1.0, env.at(*r.membership.offending_omega))) {
    fail(ErrorCode::SynthesisFailed,
         "synthesis: gain bound exceeded at omega=" + num(*r.membership.offending_omega));
  }
  if (r.membership.member) r.membership.offending_omega.reset();
  fill_evidence(G, r, tol);
  return r;
}

DestabilizerReport synthesize_destabilizer_inner(const StateSpace& G, const PhaseEnvelope& env,
                                                 const ToleranceConfig& tol) {
  G.validate();
  if (!is_inner(G, tol)) fail(ErrorCode::NotInner, "synthesis: G is not inner");
  const auto m = G.size();
  auto unit_phases = [&](double w) {
    const Eigen::ComplexEigenSolver<ComplexMatrix> es(value_at(G, w), false);
    std::vector<double> out;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(std::arg(es.eigenvalues()(i)));
    return out;
  };
  if (max_depth(unit_phases(kInfFrequency), env, kInfFrequency) >= -kViolationTol) {
    fail(ErrorCode::AssumptionViolatedAtInfinity, "synthesis: phases of G(inf) violate the envelope at infinity");
  }
  const Peak peak = grid_peak(scan_grid(G, env),
                              [&](double w) { return max_depth(unit_phases(w), env, w); });
  if (peak.value < -kViolationTol) {
    fail(ErrorCode::ConditionHolds, "synthesis: small phase condition holds against the envelope");
  }
  DestabilizerReport r;
  r.construction = "inner";
  r.omega0 = peak.omega;
  const ComplexMatrix G0 = value_at(G, r.omega0);
  if (spectral_norm(ComplexMatrix(G0.adjoint() * G0 - ComplexMatrix::Identity(m, m))) > 1e-8) {
    fail(ErrorCode::NotInner, "synthesis: G(j w0) is not unitary");
  }
  const std::vector<double> ph = unit_phases(r.omega0);
  const auto it = std::max_element(ph.begin(), ph.end(), [&](double a, double b) {
    return depth(a, env, r.omega0) < depth(b, env, r.omega0);
  });
  r.H = scale(interpolate(r.omega0, *it, env), RealMatrix::Identity(m, m));
  fill_evidence(G, r, tol);
  r.membership = envelope_membership(r.H, env, true, tol);
  return r;
}

}  // namespace phasekit
