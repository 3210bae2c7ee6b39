#include "phasekit/feedback.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "angular.hpp"

namespace phasekit {

using detail::kPi;
using detail::kTwoPi;

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::CertifiedStable: return "CertifiedStable";
    case Verdict::ConditionViolated: return "ConditionViolated";
    case Verdict::Inapplicable: return "Inapplicable";
  }
  return "Inapplicable";
}

StateSpace interconnect(const StateSpace& G, const StateSpace& H, const ToleranceConfig& tol) {
  G.validate();
  H.validate();
  if (G.size() != H.size()) fail(ErrorCode::InvalidArgument, "interconnect: G and H differ in size");
  const auto m = G.size();
  const auto ng = G.order();
  const auto nh = H.order();
  const RealMatrix I = RealMatrix::Identity(m, m);

  Eigen::JacobiSVD<RealMatrix> sv(RealMatrix(I + G.D * H.D));
  const RealVector& s = sv.singularValues();
  if (s(s.size() - 1) <= tol.rank_tol * s(0)) {
    fail(ErrorCode::IllPosed, "interconnect: I + G(inf) H(inf) is singular");
  }

  RealMatrix M(2 * m, 2 * m);
  M << I, H.D, -G.D, I;
  RealMatrix Cx = RealMatrix::Zero(2 * m, ng + nh);
  Cx.topRightCorner(m, nh) = -H.C;
  Cx.bottomLeftCorner(m, ng) = G.C;
  const Eigen::PartialPivLU<RealMatrix> lu(M);
  const RealMatrix Ccl = lu.solve(Cx);
  const RealMatrix Dcl = lu.inverse();

  RealMatrix Ab = RealMatrix::Zero(ng + nh, ng + nh);
  Ab.topLeftCorner(ng, ng) = G.A;
  Ab.bottomRightCorner(nh, nh) = H.A;
  RealMatrix Bb = RealMatrix::Zero(ng + nh, 2 * m);
  Bb.topLeftCorner(ng, m) = G.B;
  Bb.bottomRightCorner(nh, m) = H.B;
  return {Ab + Bb * Ccl, Bb * Dcl, Ccl, Dcl};
}

bool is_feedback_stable(const StateSpace& G, const StateSpace& H, const ToleranceConfig& tol) {
  return is_stable(interconnect(G, H, tol), tol);
}

namespace {

std::string omega_text(double w) {
  if (std::isinf(w)) return "inf";
  std::ostringstream os;
  os.precision(12);
  os << w;
  return os.str();
}

std::vector<double> merged_grid(const StateSpace& G, const StateSpace& H, const ToleranceConfig& tol) {
  std::vector<double> w = default_frequency_grid(G, 60);
  for (double x : default_frequency_grid(H, 60)) w.push_back(x);
  for (const StateSpace* S : {&G, &H}) {
    for (const Pole& p : poles(*S, tol)) {
      w.push_back(std::abs(p.value.imag()));
      w.push_back(std::abs(p.value));
    }
  }
  std::sort(w.begin(), w.end());
  w.erase(std::unique(w.begin(), w.end()), w.end());
  return w;
}

}  // namespace

Certificate certify_small_gain(const StateSpace& G, const StateSpace& H, const ToleranceConfig& tol) {
  if (G.size() != H.size()) fail(ErrorCode::InvalidArgument, "certify_small_gain: size mismatch");
  if (!is_stable(G, tol) || !is_stable(H, tol)) {
    fail(ErrorCode::NotStable, "certify_small_gain: G and H must be stable");
  }
  auto product = [&](double w) {
    if (std::isinf(w)) return spectral_norm(eval_inf(G)) * spectral_norm(eval_inf(H));
    const Complex s(0.0, w);
    return spectral_norm(eval(G, s)) * spectral_norm(eval(H, s));
  };
  Certificate out;
  const std::vector<double> grid = merged_grid(G, H, tol);
  std::vector<double> vals;
  for (double w : grid) {
    vals.push_back(product(w));
    out.margins.push_back({w, std::isinf(w) ? ContourKind::Infinity : ContourKind::Axis, w, 1.0 - vals.back()});
  }
  // Golden-section refinement of interior local maxima.
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (size_t i = 1; i + 1 < grid.size(); ++i) {
    if (std::isinf(grid[i + 1]) || vals[i] < vals[i - 1] || vals[i] < vals[i + 1]) continue;
    double a = grid[i - 1], b = grid[i + 1];
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = product(x1), f2 = product(x2);
    for (int it = 0; it < 100 && b - a > 1e-10 * std::max(1.0, b); ++it) {
      if (f1 < f2) {
        a = x1; x1 = x2; f1 = f2; x2 = a + g * (b - a); f2 = product(x2);
      } else {
        b = x2; x2 = x1; f2 = f1; x1 = b - g * (b - a); f1 = product(x1);
      }
    }
    const double w = f1 > f2 ? x1 : x2;
    out.margins.push_back({w, ContourKind::Axis, w, 1.0 - std::max(f1, f2)});
  }
  std::sort(out.margins.begin(), out.margins.end(),
            [](const MarginPoint& a, const MarginPoint& b) { return a.omega < b.omega; });
  const auto worst = std::min_element(out.margins.begin(), out.margins.end(),
                                      [](const MarginPoint& a, const MarginPoint& b) { return a.margin < b.margin; });
  out.min_margin = worst->margin;
  if (out.min_margin > 0.0) {
    out.verdict = Verdict::CertifiedStable;
  } else {
    out.verdict = Verdict::ConditionViolated;
    out.violation = Violation{worst->omega, "gain product " + omega_text(1.0 - worst->margin) +
                                                " >= 1 at omega=" + omega_text(worst->omega)};
  }
  return out;
}

Certificate certify_small_phase(const StateSpace& G, const StateSpace& H, const ToleranceConfig& tol) {
  if (G.size() != H.size()) fail(ErrorCode::InvalidArgument, "certify_small_phase: size mismatch");
  Certificate out;
  auto inapplicable = [&](double w, const std::string& why) {
    out.verdict = Verdict::Inapplicable;
    out.violation = Violation{w, why};
    return out;
  };
  if (!is_lyapunov_stable(G, tol)) return inapplicable(0.0, "G is not Lyapunov stable");
  if (!is_lyapunov_stable(H, tol)) return inapplicable(0.0, "H is not Lyapunov stable");

  std::vector<PhaseResponse> resp;
  try {
    const IndentedContour contour = build_contour(append(G, H), std::nullopt, {}, tol);
    resp = phase_responses({G, H}, contour, tol);
  } catch (const Error& e) {
    return inapplicable(0.0, std::string(to_string(e.code())) + ": " + e.what());
  }
  const auto& rg = resp[0].samples;
  const auto& rh = resp[1].samples;
  for (size_t i = 0; i < rg.size(); ++i) {
    if (rg[i].tag == SectorialTag::SemiSectorial) {
      return inapplicable(rg[i].point.omega,
                          "G is not quasi-sectorial at omega=" + omega_text(rg[i].point.omega));
    }
  }
  out.min_margin = kPi;
  std::optional<size_t> first_bad;
  for (size_t i = 0; i < rg.size(); ++i) {
    double margin = kPi;
    if (!rg[i].empty && !rh[i].empty) {
      margin = std::min(kPi - (rg[i].phi_high + rh[i].phi_high), (rg[i].phi_low + rh[i].phi_low) + kPi);
    }
    out.margins.push_back({rg[i].point.omega, rg[i].point.kind, rg[i].point.param, margin});
    if (margin <= 0.0 && !first_bad) first_bad = i;
    out.min_margin = std::min(out.min_margin, margin);
  }
  if (out.min_margin > 0.0) {
    out.verdict = Verdict::CertifiedStable;
  } else {
    out.verdict = Verdict::ConditionViolated;
    // first loss of margin along the contour
    const auto& p = rg[*first_bad].point;
    out.violation = Violation{p.omega, "phase sum reaches +-pi at omega=" + omega_text(p.omega) +
                                           ", worst margin " + omega_text(out.min_margin)};
  }
  return out;
}

PhaseEnvelope::PhaseEnvelope(std::vector<EnvelopePoint> points) : points_(std::move(points)) {
  if (points_.empty()) fail(ErrorCode::InvalidArgument, "phase envelope needs at least one point");
  for (const auto& p : points_) {
    if (!(p.omega >= 0.0) || !std::isfinite(p.alpha) || !std::isfinite(p.beta)) {
      fail(ErrorCode::InvalidArgument, "phase envelope: invalid breakpoint");
    }
    if (!(p.beta - p.alpha >= 0.0 && p.beta - p.alpha < kTwoPi)) {
      fail(ErrorCode::InvalidSector, "phase envelope: need 0 <= beta - alpha < 2pi at omega=" + omega_text(p.omega));
    }
  }
  std::sort(points_.begin(), points_.end(),
            [](const EnvelopePoint& a, const EnvelopePoint& b) { return a.omega < b.omega; });
  for (size_t i = 1; i < points_.size(); ++i) {
    if (points_[i].omega == points_[i - 1].omega) {
      fail(ErrorCode::InvalidArgument, "phase envelope: duplicate frequency " + omega_text(points_[i].omega));
    }
  }
}

PhaseEnvelope PhaseEnvelope::constant(double alpha, double beta) {
  return PhaseEnvelope({{1.0, alpha, beta}});
}

std::pair<double, double> PhaseEnvelope::at(double omega) const {
  if (points_.empty()) fail(ErrorCode::InvalidArgument, "phase envelope is empty");
  const EnvelopePoint* zero = nullptr;
  const EnvelopePoint* inf = nullptr;
  std::vector<const EnvelopePoint*> fin;
  for (const auto& p : points_) {
    if (p.omega == 0.0) zero = &p;
    else if (std::isinf(p.omega)) inf = &p;
    else fin.push_back(&p);
  }
  auto pair = [](const EnvelopePoint* p) { return std::make_pair(p->alpha, p->beta); };
  if (omega == 0.0) {
    if (zero) return pair(zero);
    return fin.empty() ? pair(inf) : pair(fin.front());
  }
  if (std::isinf(omega)) {
    if (inf) return pair(inf);
    return fin.empty() ? pair(zero) : pair(fin.back());
  }
  if (fin.empty()) return zero ? pair(zero) : pair(inf);
  if (omega <= fin.front()->omega) return pair(fin.front());
  if (omega >= fin.back()->omega) return pair(fin.back());
  size_t k = 1;
  while (fin[k]->omega < omega) ++k;
  const EnvelopePoint& a = *fin[k - 1];
  const EnvelopePoint& b = *fin[k];
  const double t = (std::log(omega) - std::log(a.omega)) / (std::log(b.omega) - std::log(a.omega));
  return {a.alpha + t * (b.alpha - a.alpha), a.beta + t * (b.beta - a.beta)};
}

double GainEnvelope::at(double omega) const {
  if (!weight) return constant;
  const ComplexMatrix v = std::isinf(omega) ? eval_inf(*weight) : eval(*weight, Complex(0.0, omega));
  return std::abs(v(0, 0));
}

double envelope_slack(double lo, double hi, double alpha, double beta) {
  const double k = std::round(((alpha + beta) - (lo + hi)) / (2.0 * kTwoPi));
  return std::min(lo + kTwoPi * k - alpha, beta - (hi + kTwoPi * k));
}

Membership envelope_membership(const StateSpace& H, const PhaseEnvelope& env, bool symmetric_required,
                               const ToleranceConfig& tol) {
  Membership out;
  if (!is_stable(H, tol)) {
    out.reason = "not stable";
    return out;
  }
  if (symmetric_required && !is_symmetric_system(H, tol)) {
    out.reason = "not symmetric";
    return out;
  }
  PhaseResponse r;
  try {
    r = phase_response(H, tol);
  } catch (const Error& e) {
    out.reason = std::string(to_string(e.code())) + ": " + e.what();
    return out;
  }
  out.worst_slack = kPi;
  for (const auto& s : r.samples) {
    if (s.empty) continue;
    const auto [a, b] = env.at(s.point.omega);
    const double slack = envelope_slack(s.phi_low, s.phi_high, a, b);
    if (slack < out.worst_slack) {
      out.worst_slack = slack;
      out.offending_omega = s.point.omega;
    }
  }
  out.member = out.worst_slack >= -1e-9;
  if (out.member) {
    out.offending_omega.reset();
  } else {
    out.reason = "phase leaves the envelope at omega=" + omega_text(*out.offending_omega);
  }
  return out;
}

PhaseInterpolation trivial_phase_interpolation(const ComplexMatrix& Z0, double omega0, double epsilon,
                                               const ToleranceConfig& tol) {
  if (!(omega0 >= 0.0) || !(epsilon > 0.0)) {
    fail(ErrorCode::InvalidArgument, "phase interpolation: need omega0 >= 0 and epsilon > 0");
  }
  const HermitianEig e = hermitian_eig(Z0, tol);
  const double scale = std::max(std::abs(e.values(0)), std::abs(e.values(e.values.size() - 1)));
  if (e.values(e.values.size() - 1) < -tol.psd_tol * scale) {
    fail(ErrorCode::NotPSD, "phase interpolation: Z0 is not positive semi-definite");
  }
  PhaseInterpolation out;
  const double norm = spectral_norm(Z0);
  const auto n = Z0.rows();
  if (spectral_norm(ComplexMatrix(Z0 - ComplexMatrix::Identity(n, n))) <= tol.psd_tol * std::max(1.0, norm)) {
    out.solved = true;
    out.Z = StateSpace::gain(RealMatrix::Identity(n, n));
    out.reason = "identity target: Z(s) = I";
    return out;
  }
  if (Z0.imag().norm() <= tol.psd_tol * norm) {
    out.solved = true;
    out.Z = StateSpace::gain(Z0.real());
    out.reason = "real target: Z(s) = Z0";
    return out;
  }
  out.reason = "general complex target: no construction available";
  return out;
}

}  // namespace phasekit
