#include <algorithm>
#include <cmath>
#include <functional>

#include "angular.hpp"
#include "phasekit/feedback.hpp"

namespace phasekit {

using detail::kPi;
using detail::kTwoPi;

namespace {

// Scalar rational g * num(s) / den(s), coefficients in descending powers.
struct Scalar {
  double g = 1.0;
  std::vector<double> num{1.0};
  std::vector<double> den{1.0};

  Complex at(double w) const {
    if (std::isinf(w)) {
      if (num.size() < den.size()) return 0.0;
      return g * num.front() / den.front();
    }
    const Complex s(0.0, w);
    Complex n = 0.0, d = 0.0;
    for (double c : num) n = n * s + c;
    for (double c : den) d = d * s + c;
    return g * n / d;
  }

  StateSpace realize() const {
    std::vector<double> n = num;
    for (double& c : n) c *= g;
    return tf(n, den);
  }
};

std::vector<double> verification_grid(double omega0, const PhaseEnvelope& env) {
  double lo = std::isfinite(omega0) && omega0 > 0.0 ? omega0 : 1.0;
  double hi = lo;
  for (const auto& p : env.points()) {
    if (p.omega > 0.0 && std::isfinite(p.omega)) {
      lo = std::min(lo, p.omega);
      hi = std::max(hi, p.omega);
    }
  }
  std::vector<double> w{0.0, kInfFrequency};
  const double a = std::floor(std::log10(lo)) - 4.0;
  const double b = std::ceil(std::log10(hi)) + 4.0;
  const int ppd = 30;
  for (int k = 0; k <= static_cast<int>((b - a) * ppd); ++k) w.push_back(std::pow(10.0, a + double(k) / ppd));
  for (const auto& p : env.points()) w.push_back(p.omega);
  if (std::isfinite(omega0)) w.push_back(omega0);
  std::sort(w.begin(), w.end());
  w.erase(std::unique(w.begin(), w.end()), w.end());
  return w;
}

// Natural frequencies of the factors of h; light damping moves the phase
// quickly near them, faster than the shared grid resolves.
std::vector<double> corners(const Scalar& h) {
  std::vector<double> out;
  for (const auto* p : {&h.num, &h.den}) {
    const auto& c = *p;
    if (c.size() >= 2 && c.front() != 0.0 && c.back() != 0.0) {
      out.push_back(std::pow(std::abs(c.back() / c.front()), 1.0 / double(c.size() - 1)));
    }
  }
  return out;
}

bool fits(const Scalar& h, const std::vector<double>& grid, const PhaseEnvelope& env) {
  std::vector<double> all = grid;
  for (double wc : corners(h)) {
    for (int k = -200; k <= 200; ++k) all.push_back(wc * std::pow(10.0, k / 400.0));
  }
  for (double w : all) {
    const Complex v = h.at(w);
    if (std::abs(v) == 0.0) continue;
    const double ph = std::arg(v);
    const auto [a, b] = env.at(w);
    if (envelope_slack(ph, ph, a, b) < -1e-9) return false;
  }
  // the grid can miss a sharp resonance; confirm with the tracked phase response
  return envelope_membership(h.realize(), env, false).member;
}

// 1, 1/2, 2, 1/4, 4, ...
std::vector<double> damping_ladder() {
  std::vector<double> s{1.0};
  for (int k = 1; k <= 16; ++k) {
    s.push_back(std::ldexp(1.0, -k));
    s.push_back(std::ldexp(1.0, k));
  }
  return s;
}

// Points of the open interval (lo, hi) ordered from the middle outward.
std::vector<double> centre_out(double lo, double hi, int n) {
  std::vector<double> pts;
  for (int i = 1; i <= n; ++i) pts.push_back(lo + (hi - lo) * i / (n + 1));
  const double mid = 0.5 * (lo + hi);
  std::stable_sort(pts.begin(), pts.end(),
                   [mid](double x, double y) { return std::abs(x - mid) < std::abs(y - mid); });
  return pts;
}

// Quadratic s^2 + sign*a s + b whose value at j w0 has argument arg (in (0, pi)
// for sign = +1, in (-pi, 0) for sign = -1), with a = k w0. Empty if b <= 0.
std::optional<std::vector<double>> quadratic(double w0, double arg, double k, double sign) {
  const double a = k * w0;
  const double t = std::tan(std::abs(arg));
  const double b = w0 * w0 + a * w0 / t;
  if (!(b > 0.0) || !std::isfinite(b)) return std::nullopt;
  return std::vector<double>{1.0, sign * a, b};
}

std::optional<Scalar> search_finite(double w0, Complex target, const PhaseEnvelope& env,
                                    const std::vector<double>& grid) {
  const double r = std::abs(target);
  const double theta = std::arg(target);
  if (std::abs(target.imag()) <= 1e-12 * r && target.real() > 0.0) {
    Scalar c;
    c.g = target.real();
    if (fits(c, grid, env)) return c;
  }
  const auto ladder = damping_ladder();
  const double base = detail::wrap_angle(theta);
  for (double tp : {base, base - kTwoPi, base + kTwoPi}) {
    if (std::abs(tp) < kPi && std::abs(tp) > 1e-12) {
      // both factors minimum phase
      for (double c : centre_out(std::abs(tp) / 2, kPi - std::abs(tp) / 2, 64)) {
        for (double k : ladder) {
          const auto N = quadratic(w0, c + tp / 2, k, 1.0);
          const auto D = quadratic(w0, c - tp / 2, k, 1.0);
          if (!N || !D) continue;
          Scalar h{1.0, *N, *D};
          h.g = r / std::abs(h.at(w0));
          if (fits(h, grid, env)) return h;
        }
      }
    }
    if (tp < 0.0 && tp > -kTwoPi) {
      // numerator with right half-plane zeros
      const double lo = std::max(0.0, -tp - kPi);
      const double hi = std::min(kPi, -tp);
      for (double c1 : centre_out(lo, hi, 64)) {
        const double c2 = -tp - c1;
        for (double k : ladder) {
          const auto N = quadratic(w0, -c1, k, -1.0);
          const auto D = quadratic(w0, c2, k, 1.0);
          if (!N || !D) continue;
          Scalar h{1.0, *N, *D};
          h.g = r / std::abs(h.at(w0));
          if (fits(h, grid, env)) return h;
        }
      }
    }
  }
  // first-order all-pass r (c - s)/(c + s): phase runs from 0 down to -pi
  for (double tp : {base, base - kTwoPi}) {
    if (tp < 0.0 && tp > -kPi) {
      const double corner = w0 / std::tan(-tp / 2);
      Scalar h{r, {-1.0, corner}, {1.0, corner}};
      if (fits(h, grid, env)) return h;
    }
  }
  return std::nullopt;
}

std::optional<Scalar> search_infinity(double r, const PhaseEnvelope& env, const std::vector<double>& grid) {
  if (r > 0.0) {
    Scalar c;
    c.g = r;
    if (fits(c, grid, env)) return c;
    return std::nullopt;
  }
  // first-order all-pass: |r| (c - s)/(c + s), h(0) = |r| and h(inf) = r
  // corners 1, 10^(1/4), 10^(-1/4), ... outward
  for (int i = 0; i <= 80; ++i) {
    const int k = i % 2 ? (i + 1) / 2 : -i / 2;
    const double corner = std::pow(10.0, k / 4.0);
    Scalar h{-r, {-1.0, corner}, {1.0, corner}};
    if (fits(h, grid, env)) return h;
  }
  return std::nullopt;
}

}  // namespace

StateSpace design_scalar_interpolator(double omega0, Complex target, const PhaseEnvelope& env) {
  if (!(omega0 >= 0.0) || !std::isfinite(std::abs(target)) || std::abs(target) == 0.0) {
    fail(ErrorCode::InvalidArgument, "interpolator: need omega0 >= 0 and a finite nonzero target");
  }
  const bool at_inf = std::isinf(omega0);
  if ((at_inf || omega0 == 0.0) && std::abs(target.imag()) > 1e-12 * std::abs(target)) {
    fail(ErrorCode::InvalidArgument, "interpolator: target at omega=0 or inf must be real");
  }
  const double theta = std::arg(target);
  const auto [a, b] = env.at(omega0);
  if (envelope_slack(theta, theta, a, b) < -1e-9) {
    fail(ErrorCode::TargetOutsideEnvelope, "interpolator: target phase is outside the envelope");
  }
  const std::vector<double> grid = verification_grid(omega0, env);
  std::optional<Scalar> h;
  if (at_inf) {
    h = search_infinity(target.real(), env, grid);
  } else if (omega0 == 0.0) {
    if (target.real() < 0.0) fail(ErrorCode::TargetOutsideEnvelope, "interpolator: h(0) must be positive");
    Scalar c;
    c.g = target.real();
    if (fits(c, grid, env)) h = c;
  } else {
    h = search_finite(omega0, target, env, grid);
  }
  if (!h) fail(ErrorCode::EnvelopeViolated, "interpolator: no candidate keeps its phase inside the envelope");
  return h->realize();
}

}  // namespace phasekit
