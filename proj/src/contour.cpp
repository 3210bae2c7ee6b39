#include <algorithm>
#include <cmath>
#include <sstream>

#include "angular.hpp"
#include "phasekit/lti.hpp"
#include "phasekit/phasecore.hpp"

namespace phasekit {

std::string_view to_string(ContourKind k) noexcept {
  switch (k) {
    case ContourKind::Axis: return "axis";
    case ContourKind::Detour: return "detour";
    case ContourKind::LargeArc: return "arc";
    case ContourKind::Infinity: return "inf";
  }
  return "axis";
}

using detail::kPi;

double default_epsilon(const StateSpace& G) {
  G.validate();
  double rho = 0.0;
  if (G.order() > 0) {
    Eigen::EigenSolver<RealMatrix> es(G.A, false);
    rho = es.eigenvalues().cwiseAbs().maxCoeff();
  }
  return 1e-6 * std::max(1.0, rho);
}

namespace {

struct Builder {
  IndentedContour c;
  int segment = -1;
  double radius = 0.0;  // large arc radius

  void axis(double w) {
    c.points.push_back({ContourKind::Axis, segment, w, Complex(0.0, w), w});
  }
  void detour(double center, double theta) {
    c.points.push_back({ContourKind::Detour, segment, theta,
                        Complex(0.0, center) + c.epsilon * std::exp(kJ * theta), center});
  }
  void large_arc(double theta) {
    c.points.push_back({ContourKind::LargeArc, segment, theta, radius * std::exp(kJ * theta),
                        kInfFrequency});
  }
};

std::vector<double> log_points(double lo, double hi, int per_decade) {
  std::vector<double> out;
  if (!(lo > 0.0) || !(hi > lo)) return out;
  const double d0 = std::log10(lo), d1 = std::log10(hi);
  const int count = std::max(2, static_cast<int>(std::ceil((d1 - d0) * per_decade)));
  for (int i = 0; i <= count; ++i) out.push_back(std::pow(10.0, d0 + (d1 - d0) * i / count));
  return out;
}

}  // namespace

IndentedContour build_contour(const StateSpace& G, std::optional<double> epsilon,
                              const GridSpec& grid, const ToleranceConfig& tol) {
  G.validate();
  if (!is_lyapunov_stable(G, tol)) {
    fail(ErrorCode::NotLyapunovStable, "build_contour: system is not Lyapunov stable");
  }
  const double eps = epsilon.value_or(default_epsilon(G));
  if (!(eps > 0.0)) fail(ErrorCode::InvalidArgument, "build_contour: epsilon must be positive");
  if (grid.arc_points < 16 || grid.points_per_decade < 1) {
    fail(ErrorCode::InvalidArgument, "build_contour: need >= 16 arc points and >= 1 point per decade");
  }

  std::vector<double> centers = axis_pole_frequencies(G, tol);
  for (double z : axis_zero_frequencies(G, tol)) {
    if (std::none_of(centers.begin(), centers.end(),
                     [&](double c) { return std::abs(c - z) <= 1e-8 * std::max(1.0, z); })) {
      centers.push_back(z);
    }
  }
  std::sort(centers.begin(), centers.end());

  const double dmax = std::max(1.0, std::abs(G.D.norm()));
  const bool inf_zero = sigma_min(G.D.cast<Complex>()) <= tol.rank_tol * dmax;

  std::vector<double> omegas = default_frequency_grid(G, grid.points_per_decade);
  omegas.erase(std::remove_if(omegas.begin(), omegas.end(),
                              [](double w) { return w <= 0.0 || std::isinf(w); }),
               omegas.end());
  for (double w : grid.extra_omegas) {
    if (w > 0.0 && std::isfinite(w)) omegas.push_back(w);
  }
  double end = omegas.empty() ? 1e3 : *std::max_element(omegas.begin(), omegas.end());
  if (!centers.empty()) end = std::max(end, 10.0 * centers.back());
  Builder b;
  b.c.epsilon = eps;
  b.c.detour_centers = centers;
  b.c.infinity_detour = inf_zero;
  if (inf_zero) {
    b.radius = std::max(1.0 / eps, 10.0 * end);
    for (double w : log_points(end, b.radius, std::max(1, grid.points_per_decade / 4))) omegas.push_back(w);
    end = b.radius;
  }
  std::sort(omegas.begin(), omegas.end());

  const int arc = grid.arc_points;
  double pos = 0.0;
  size_t ci = 0;
  if (!centers.empty() && centers[0] <= 1e-12) {
    ++b.segment;
    for (int i = 0; i <= arc; ++i) b.detour(0.0, (kPi / 2.0) * i / arc);
    pos = eps;
    ci = 1;
  }
  auto axis_piece = [&](double from, double to) {
    if (to <= from) return;
    ++b.segment;
    b.axis(from);
    for (double w : omegas) {
      if (w > from && w < to) b.axis(w);
    }
    b.axis(to);
  };
  for (; ci < centers.size(); ++ci) {
    const double cw = centers[ci];
    axis_piece(pos, cw - eps);
    ++b.segment;
    for (int i = 0; i <= arc; ++i) b.detour(cw, -kPi / 2.0 + kPi * i / arc);
    pos = cw + eps;
  }
  axis_piece(pos, end);
  ++b.segment;
  if (inf_zero) {
    for (int i = 0; i <= arc; ++i) b.large_arc(kPi / 2.0 - (kPi / 2.0) * i / arc);
  } else {
    b.c.points.push_back({ContourKind::Infinity, b.segment, 0.0, Complex(0.0), kInfFrequency});
  }
  return b.c;
}

IndentedContour axis_contour(const std::vector<double>& omegas) {
  IndentedContour c;
  for (double w : omegas) {
    if (std::isinf(w)) {
      c.points.push_back({ContourKind::Infinity, 1, 0.0, Complex(0.0), kInfFrequency});
    } else {
      c.points.push_back({ContourKind::Axis, 0, w, Complex(0.0, w), w});
    }
  }
  return c;
}

namespace {

std::string describe(const ContourPoint& p) {
  std::ostringstream os;
  os.precision(12);
  switch (p.kind) {
    case ContourKind::Axis: os << "omega=" << p.param; break;
    case ContourKind::Detour: os << "detour at omega=" << p.omega << " theta=" << p.param; break;
    case ContourKind::LargeArc: os << "large arc theta=" << p.param; break;
    case ContourKind::Infinity: os << "omega=inf"; break;
  }
  return os.str();
}

ComplexMatrix value_at(const StateSpace& G, const ContourPoint& p) {
  return p.kind == ContourKind::Infinity ? eval_inf(G) : eval(G, p.s);
}

// Phases of M tracked from the branch center `hint`.
PhaseSample phase_sample(const ComplexMatrix& M, const ContourPoint& p, double hint,
                         const ToleranceConfig& tol) {
  PhaseSample out;
  out.point = p;
  if (M.norm() == 0.0) {
    out.empty = true;
    out.tag = SectorialTag::QuasiSectorial;
    out.gamma = out.phi_low = out.phi_high = hint;
    return out;
  }
  std::vector<double> ph;
  // Fast path: the previous center usually still separates W(M) from 0.
  const ComplexMatrix A = std::exp(-kJ * hint) * M;
  Eigen::LLT<ComplexMatrix> llt(hermitian_part(A));
  // a tiny pivot means a numerical kernel; leave that to the full decomposition
  const double floor = tol.rank_tol * M.norm();
  if (llt.info() == Eigen::Success &&
      llt.matrixLLT().diagonal().real().cwiseAbs2().minCoeff() > floor) {
    const ComplexMatrix L = llt.matrixL();
    const ComplexMatrix Li = L.inverse();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(
        hermitian_part(ComplexMatrix(Li * skew_part(A) * Li.adjoint())), Eigen::EigenvaluesOnly);
    if (es.info() == Eigen::Success) {
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) ph.push_back(hint + std::atan(es.eigenvalues()(i)));
      out.tag = SectorialTag::Sectorial;
    }
  }
  if (ph.empty()) {
    const SectorialTag tag = classify(M, tol).tag;
    if (tag == SectorialTag::Indefinite) {
      fail(ErrorCode::NotFrequencyWiseSemiSectorial,
           "phase response: value is not semi-sectorial at " + describe(p));
    }
    out.tag = tag;
    ph = decompose(M, tol).phases();
    if (ph.empty()) {
      out.empty = true;
      out.gamma = out.phi_low = out.phi_high = hint;
      return out;
    }
  }
  const PhaseSector sec = make_sector(std::move(ph), hint);
  out.phases = sec.phases;
  out.gamma = sec.gamma;
  out.phi_high = sec.max();
  out.phi_low = sec.min();
  return out;
}

constexpr int kMaxRefineDepth = 24;

struct Tracker {
  const std::vector<StateSpace>& systems;
  const ToleranceConfig& tol;
  const IndentedContour& contour;
  std::vector<PhaseResponse> out;

  std::vector<PhaseSample> sample(const ContourPoint& p, const std::vector<PhaseSample>* prev) {
    std::vector<PhaseSample> s;
    for (size_t k = 0; k < systems.size(); ++k) {
      const double hint = prev ? (*prev)[k].gamma : 0.0;
      s.push_back(phase_sample(value_at(systems[k], p), p, hint, tol));
    }
    return s;
  }

  void push(const std::vector<PhaseSample>& s) {
    for (size_t k = 0; k < s.size(); ++k) out[k].samples.push_back(s[k]);
  }

  std::vector<PhaseSample> last() const {
    std::vector<PhaseSample> s;
    for (const auto& r : out) s.push_back(r.samples.back());
    return s;
  }

  ContourPoint midpoint(const ContourPoint& a, const ContourPoint& b) const {
    ContourPoint m = a;
    m.param = 0.5 * (a.param + b.param);
    switch (a.kind) {
      case ContourKind::Axis:
        m.s = Complex(0.0, m.param);
        m.omega = m.param;
        break;
      case ContourKind::Detour:
        m.s = Complex(0.0, a.omega) + contour.epsilon * std::exp(kJ * m.param);
        break;
      case ContourKind::LargeArc:
        m.s = std::abs(a.s) * std::exp(kJ * m.param);
        break;
      case ContourKind::Infinity: break;
    }
    return m;
  }

  static bool jumps(const std::vector<PhaseSample>& a, const std::vector<PhaseSample>& b) {
    for (size_t k = 0; k < a.size(); ++k) {
      if (std::abs(a[k].gamma - b[k].gamma) > kPi / 2.0) return true;
    }
    return false;
  }

  void advance(const ContourPoint& a, const ContourPoint& b, int depth) {
    const std::vector<PhaseSample> sa = last();
    std::vector<PhaseSample> sb = sample(b, &sa);
    const bool refinable = a.segment == b.segment && a.kind == b.kind && a.kind != ContourKind::Infinity;
    if (jumps(sa, sb) && refinable) {
      if (depth >= kMaxRefineDepth) {
        fail(ErrorCode::NoConvergence, "phase response: phase center is discontinuous near " + describe(b));
      }
      const ContourPoint m = midpoint(a, b);
      advance(a, m, depth + 1);
      advance(m, b, depth + 1);
      return;
    }
    push(sb);
  }

  void run() {
    out.assign(systems.size(), PhaseResponse{});
    if (contour.points.empty()) return;
    const ContourPoint& p0 = contour.points.front();
    for (const auto& g : systems) {
      const ComplexMatrix M = value_at(g, p0);
      const double scale = std::max(1.0, spectral_norm(M));
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(M), Eigen::EigenvaluesOnly);
      if (es.eigenvalues()(0) < -tol.psd_tol * scale) {
        fail(ErrorCode::NotAccretiveAtStart,
             "phase response: Hermitian part is not positive semi-definite at " + describe(p0));
      }
    }
    push(sample(p0, nullptr));
    for (size_t i = 1; i < contour.points.size(); ++i) {
      advance(contour.points[i - 1], contour.points[i], 0);
    }
  }
};

void check_residues(const StateSpace& G, const IndentedContour& contour, const ToleranceConfig& tol) {
  for (double c : contour.detour_centers) {
    const ComplexMatrix R = residue_at(G, c, tol);
    if (R.norm() == 0.0) continue;
    if (classify(R, tol).tag == SectorialTag::Indefinite) {
      std::ostringstream os;
      os.precision(12);
      os << "residue at omega=" << c << " is not semi-sectorial";
      fail(ErrorCode::NotFrequencyWiseSemiSectorial, os.str());
    }
  }
}

}  // namespace

std::vector<PhaseResponse> phase_responses(const std::vector<StateSpace>& systems,
                                           const IndentedContour& contour,
                                           const ToleranceConfig& tol) {
  for (const auto& g : systems) {
    g.validate();
    check_residues(g, contour, tol);
  }
  Tracker t{systems, tol, contour, {}};
  t.run();
  return t.out;
}

PhaseResponse phase_response(const StateSpace& G, const IndentedContour& contour,
                             const ToleranceConfig& tol) {
  return phase_responses({G}, contour, tol).front();
}

PhaseResponse phase_response(const StateSpace& G, const ToleranceConfig& tol) {
  return phase_response(G, build_contour(G, std::nullopt, {}, tol), tol);
}

PhaseInterval phi_inf_sector(const PhaseResponse& response) {
  PhaseInterval out;
  bool any = false;
  for (const auto& s : response.samples) {
    if (s.empty) continue;
    out.low = any ? std::min(out.low, s.phi_low) : s.phi_low;
    out.high = any ? std::max(out.high, s.phi_high) : s.phi_high;
    any = true;
  }
  return out;
}

PhaseInterval phi_inf_sector(const StateSpace& G, const ToleranceConfig& tol) {
  return phi_inf_sector(phase_response(G, tol));
}

StructuralChecks structural_checks(const StateSpace& G, const ToleranceConfig& tol) {
  StructuralChecks out;
  out.symmetric = is_symmetric_system(G, tol);
  out.inner = is_inner(G, tol);
  if (!is_lyapunov_stable(G, tol)) {
    out.frequency_wise_class = SectorialTag::Indefinite;
    return out;
  }
  const IndentedContour c = build_contour(G, std::nullopt, {}, tol);
  SectorialTag weakest = SectorialTag::Sectorial;
  auto lower = [&](SectorialTag t) {
    if (class_rank(t) < class_rank(weakest)) weakest = t;
  };
  for (const auto& p : c.points) lower(classify(value_at(G, p), tol).tag);
  for (double w : c.detour_centers) {
    const ComplexMatrix R = residue_at(G, w, tol);
    if (R.norm() > 0.0) lower(classify(R, tol).tag);
  }
  out.frequency_wise_class = weakest;
  return out;
}

}  // namespace phasekit
