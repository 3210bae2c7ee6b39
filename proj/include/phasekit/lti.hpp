#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "phasekit/numerics.hpp"
#include "phasekit/numrange.hpp"

namespace phasekit {

/// G(s) = C (sI - A)^{-1} B + D, square (m inputs, m outputs), real.
struct StateSpace {
  RealMatrix A;
  RealMatrix B;
  RealMatrix C;
  RealMatrix D;

  int order() const { return static_cast<int>(A.rows()); }
  int size() const { return static_cast<int>(D.rows()); }
  /// InvalidArgument on inconsistent or non-square data.
  void validate() const;

  static StateSpace gain(const RealMatrix& D);
};

/// SISO system num(s)/den(s), coefficients in descending powers, proper.
StateSpace tf(const std::vector<double>& num, const std::vector<double>& den);
/// blkdiag(G1(s), G2(s))
StateSpace append(const StateSpace& g1, const StateSpace& g2);
/// G1(s) G2(s)
StateSpace series(const StateSpace& g1, const StateSpace& g2);
/// h(s) M for scalar h and a real matrix M.
StateSpace scale(const StateSpace& h, const RealMatrix& M);

ComplexMatrix eval(const StateSpace& G, Complex s);
/// lim G(s) as s -> infinity, i.e. D.
ComplexMatrix eval_inf(const StateSpace& G);

StateSpace minimal_realization(const StateSpace& G, const ToleranceConfig& tol = {});

struct Pole {
  Complex value;
  int multiplicity = 1;
  bool semi_simple = true;
  bool on_axis = false;
};

/// Poles of the minimal realization, clustered with multiplicities.
std::vector<Pole> poles(const StateSpace& G, const ToleranceConfig& tol = {});
bool is_lyapunov_stable(const StateSpace& G, const ToleranceConfig& tol = {});
bool is_stable(const StateSpace& G, const ToleranceConfig& tol = {});

/// lim (s - j w0) G(s) as s -> j w0; zero when j w0 is not a pole.
ComplexMatrix residue_at(const StateSpace& G, double omega0, const ToleranceConfig& tol = {});

/// Nonnegative frequencies of imaginary-axis poles and transmission zeros.
std::vector<double> axis_pole_frequencies(const StateSpace& G, const ToleranceConfig& tol = {});
std::vector<double> axis_zero_frequencies(const StateSpace& G, const ToleranceConfig& tol = {});

inline constexpr double kInfFrequency = std::numeric_limits<double>::infinity();

enum class ContourKind { Axis, Detour, LargeArc, Infinity };
std::string_view to_string(ContourKind k) noexcept;

struct ContourPoint {
  ContourKind kind = ContourKind::Axis;
  int segment = 0;
  double param = 0.0;   // omega on the axis, angle on arcs
  Complex s;            // unused for Infinity
  double omega = 0.0;   // frequency used for envelopes: detour center, or inf
};

struct GridSpec {
  int points_per_decade = 40;
  int arc_points = 16;
  std::vector<double> extra_omegas;
};

struct IndentedContour {
  std::vector<ContourPoint> points;
  double epsilon = 0.0;
  std::vector<double> detour_centers;
  bool infinity_detour = false;
};

/// Upper half of the indented imaginary axis for G. Requires Lyapunov stability.
IndentedContour build_contour(const StateSpace& G, std::optional<double> epsilon = std::nullopt,
                              const GridSpec& grid = {}, const ToleranceConfig& tol = {});
/// Plain axis samples at the given frequencies (no detours).
IndentedContour axis_contour(const std::vector<double>& omegas);

double default_epsilon(const StateSpace& G);

struct PhaseSample {
  ContourPoint point;
  std::vector<double> phases;  // descending
  double phi_low = 0.0;
  double phi_high = 0.0;
  double gamma = 0.0;
  SectorialTag tag = SectorialTag::Sectorial;
  bool empty = false;  // G(s) = 0 here, no phases
};

struct PhaseResponse {
  std::vector<PhaseSample> samples;
  bool continuous = true;
};

PhaseResponse phase_response(const StateSpace& G, const IndentedContour& contour,
                             const ToleranceConfig& tol = {});
PhaseResponse phase_response(const StateSpace& G, const ToleranceConfig& tol = {});
/// Tracks several systems of equal size over one contour, refining it jointly.
std::vector<PhaseResponse> phase_responses(const std::vector<StateSpace>& systems,
                                           const IndentedContour& contour,
                                           const ToleranceConfig& tol = {});

struct PhaseInterval {
  double low = 0.0;
  double high = 0.0;
};

PhaseInterval phi_inf_sector(const PhaseResponse& response);
PhaseInterval phi_inf_sector(const StateSpace& G, const ToleranceConfig& tol = {});

struct GainSample {
  double omega = 0.0;
  double sigma_max = 0.0;
};

struct GainResponse {
  std::vector<GainSample> samples;
};

GainResponse gain_response(const StateSpace& G, const std::vector<double>& omegas);
/// Log grid over the dynamics of G plus omega = 0 and omega = inf.
std::vector<double> default_frequency_grid(const StateSpace& G, int points_per_decade = 40);

struct HinfResult {
  double value = 0.0;
  double omega = 0.0;
};

HinfResult hinf_norm(const StateSpace& G, const ToleranceConfig& tol = {});

struct StructuralChecks {
  bool symmetric = false;
  bool inner = false;
  SectorialTag frequency_wise_class = SectorialTag::Indefinite;
};

StructuralChecks structural_checks(const StateSpace& G, const ToleranceConfig& tol = {});
bool is_symmetric_system(const StateSpace& G, const ToleranceConfig& tol = {});
bool is_inner(const StateSpace& G, const ToleranceConfig& tol = {});

}  // namespace phasekit
