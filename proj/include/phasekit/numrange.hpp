#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "phasekit/numerics.hpp"

namespace phasekit {

/// Samples of the support function p(t) = lambda_max(Herm(e^{-jt} C)) of the
/// numerical range on a uniform grid of [0, 2pi).
struct SupportProfile {
  std::vector<double> angles;
  std::vector<double> values;
  int refinement_depth = 20;
};

enum class SectorialTag { Sectorial, QuasiSectorial, SemiSectorial, Indefinite };

enum class ZeroLocation { Outside, Boundary, Interior };

std::string_view to_string(SectorialTag tag) noexcept;
std::string_view to_string(ZeroLocation loc) noexcept;

/// True when `tag` is one of the three classes that carry phases.
bool is_semi_sectorial(SectorialTag tag) noexcept;
/// Ordering used for "weakest class" reductions: Sectorial > Quasi > Semi > Indefinite.
int class_rank(SectorialTag tag) noexcept;

struct SectorialClass {
  SectorialTag tag = SectorialTag::Indefinite;
  std::optional<double> delta;   // angle subtended at 0, present when <= pi
  std::optional<double> theta0;  // normal angle of the supporting half-plane
  double min_support = 0.0;      // min_t p(t); negative iff 0 lies outside W(C)
  bool in_tolerance_band = false;  // |min_support| within psd_tol * ||C||
};

double support_function(const ComplexMatrix& C, double t);
SupportProfile support_profile(const ComplexMatrix& C, int base_points = 256);

/// Points x^H C x on the boundary of W(C), one per angle of a uniform grid.
std::vector<Complex> boundary_points(const ComplexMatrix& C, int samples);

SectorialClass classify(const ComplexMatrix& C, const ToleranceConfig& tol = {});
ZeroLocation zero_location(const ComplexMatrix& C, const ToleranceConfig& tol = {});

}  // namespace phasekit
