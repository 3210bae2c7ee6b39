#pragma once

#include <optional>
#include <string>
#include <vector>

#include "phasekit/lti.hpp"

namespace phasekit {

/// Closed loop u1 = w1 - H u2, u2 = w2 + G u1, realized as the map
/// (w1, w2) -> (u1, u2).
StateSpace interconnect(const StateSpace& G, const StateSpace& H, const ToleranceConfig& tol = {});
bool is_feedback_stable(const StateSpace& G, const StateSpace& H, const ToleranceConfig& tol = {});

enum class Verdict { CertifiedStable, ConditionViolated, Inapplicable };
std::string_view to_string(Verdict v) noexcept;

struct MarginPoint {
  double omega = 0.0;  // envelope frequency; inf on the large arc and at infinity
  ContourKind kind = ContourKind::Axis;
  double param = 0.0;
  double margin = 0.0;
};

struct Violation {
  double omega = 0.0;
  std::string detail;
};

struct Certificate {
  Verdict verdict = Verdict::Inapplicable;
  std::vector<MarginPoint> margins;
  double min_margin = 0.0;
  std::optional<Violation> violation;
};

/// sigma_max(G(jw)) sigma_max(H(jw)) < 1 for all w in [0, inf].
Certificate certify_small_gain(const StateSpace& G, const StateSpace& H, const ToleranceConfig& tol = {});
/// Upper phases sum below pi and lower phases sum above -pi along the indented axis.
Certificate certify_small_phase(const StateSpace& G, const StateSpace& H,
                                const ToleranceConfig& tol = {});

struct EnvelopePoint {
  double omega = 0.0;  // inf allowed
  double alpha = 0.0;
  double beta = 0.0;
};

/// Frequency-dependent phase bounds [alpha(w), beta(w)]. Finite positive
/// breakpoints are interpolated linearly in log w and held constant outside
/// their range; entries at w = 0 and w = inf are used exactly there.
class PhaseEnvelope {
 public:
  PhaseEnvelope() = default;
  explicit PhaseEnvelope(std::vector<EnvelopePoint> points);
  static PhaseEnvelope constant(double alpha, double beta);

  const std::vector<EnvelopePoint>& points() const { return points_; }
  /// [alpha(w), beta(w)]
  std::pair<double, double> at(double omega) const;

 private:
  std::vector<EnvelopePoint> points_;
};

/// gamma(w) = constant, or |w(jw)| for a stable SISO weight.
struct GainEnvelope {
  double constant = 1.0;
  std::optional<StateSpace> weight;

  double at(double omega) const;
};

struct Membership {
  bool member = false;
  double worst_slack = 0.0;
  std::optional<double> offending_omega;
  std::string reason;
};

/// Slack of fitting the phase interval [lo, hi] into [alpha, beta] modulo 2pi
/// (best translate); nonnegative iff it fits.
double envelope_slack(double lo, double hi, double alpha, double beta);

Membership envelope_membership(const StateSpace& H, const PhaseEnvelope& env, bool symmetric_required,
                               const ToleranceConfig& tol = {});

/// Stable scalar h with h(j w0) = target (finite w0) or h(inf) = target.real()
/// (w0 = inf), h(0) > 0, and phase inside env at every verification frequency.
StateSpace design_scalar_interpolator(double omega0, Complex target, const PhaseEnvelope& env);

struct DestabilizerReport {
  StateSpace H;
  std::string construction;  // unstable-plant, infinity, finite, gain, inner
  double omega0 = 0.0;
  double sigma_min = 0.0;    // sigma_min(I + G(jw0) H(jw0))
  std::optional<Complex> closed_loop_pole;  // pole of G#H nearest j w0
  double pole_distance = 0.0;
  bool ill_posed = false;    // I + G(inf) H(inf) singular
  Membership membership;
};

DestabilizerReport synthesize_destabilizer_symmetric(const StateSpace& G, const PhaseEnvelope& env,
                                                     const ToleranceConfig& tol = {});
DestabilizerReport synthesize_destabilizer_gain_symmetric(const StateSpace& G, const GainEnvelope& env,
                                                          const ToleranceConfig& tol = {});
DestabilizerReport synthesize_destabilizer_inner(const StateSpace& G, const PhaseEnvelope& env,
                                                 const ToleranceConfig& tol = {});

struct PhaseInterpolation {
  bool solved = false;
  std::optional<StateSpace> Z;
  std::string reason;
};

/// Only the two trivial cases: real Z0 (constant solution) and Z0 = I.
PhaseInterpolation trivial_phase_interpolation(const ComplexMatrix& Z0, double omega0, double epsilon,
                                               const ToleranceConfig& tol = {});

}  // namespace phasekit
