#include "phasekit/numrange.hpp"

#include <cmath>

#include "angular.hpp"
#include "range_split.hpp"

namespace phasekit {

using detail::kPi;
using detail::kTwoPi;

std::string_view to_string(SectorialTag tag) noexcept {
  switch (tag) {
    case SectorialTag::Sectorial: return "sectorial";
    case SectorialTag::QuasiSectorial: return "quasi-sectorial";
    case SectorialTag::SemiSectorial: return "semi-sectorial";
    case SectorialTag::Indefinite: return "indefinite";
  }
  return "indefinite";
}

std::string_view to_string(ZeroLocation loc) noexcept {
  switch (loc) {
    case ZeroLocation::Outside: return "outside";
    case ZeroLocation::Boundary: return "boundary";
    case ZeroLocation::Interior: return "interior";
  }
  return "interior";
}

bool is_semi_sectorial(SectorialTag tag) noexcept { return tag != SectorialTag::Indefinite; }

int class_rank(SectorialTag tag) noexcept {
  switch (tag) {
    case SectorialTag::Sectorial: return 3;
    case SectorialTag::QuasiSectorial: return 2;
    case SectorialTag::SemiSectorial: return 1;
    case SectorialTag::Indefinite: return 0;
  }
  return 0;
}

double support_function(const ComplexMatrix& C, double t) {
  require_square(C, "support_function");
  // p(t) = lambda_max(Herm(e^{-jt}C)) = -lambda_min(Herm(e^{-j(t+pi)}C))
  return -detail::min_eig_value(ComplexMatrix(hermitian_part(C)), ComplexMatrix(skew_part(C)),
                                t + kPi);
}

SupportProfile support_profile(const ComplexMatrix& C, int base_points) {
  if (base_points < 256) base_points = 256;
  SupportProfile prof;
  prof.angles.resize(base_points);
  prof.values.resize(base_points);
  for (int i = 0; i < base_points; ++i) {
    prof.angles[i] = kTwoPi * i / base_points;
    prof.values[i] = support_function(C, prof.angles[i]);
  }
  return prof;
}

std::vector<Complex> boundary_points(const ComplexMatrix& C, int samples) {
  require_square(C, "boundary_points");
  if (samples < 8) fail(ErrorCode::InvalidArgument, "boundary_points: need at least 8 samples");
  std::vector<Complex> pts;
  pts.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    const double t = kTwoPi * i / samples;
    const ComplexMatrix R = hermitian_part(ComplexMatrix(std::exp(-kJ * t) * C));
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(R);
    const ComplexVector x = es.eigenvectors().col(R.rows() - 1);
    pts.push_back((x.adjoint() * C * x)(0, 0));
  }
  return pts;
}

namespace {

struct Extremes {
  double gmax;   // max_t lambda_min(Herm(e^{-jt} C)) = -min_t p(t)
  double angle;  // argmax
};

Extremes extremes(const ComplexMatrix& C) {
  const ComplexMatrix H = hermitian_part(C);
  const ComplexMatrix K = skew_part(C);
  const auto m = detail::maximize_min_eig(H, K);
  return {m.value, m.angle};
}

}  // namespace

SectorialClass classify(const ComplexMatrix& C, const ToleranceConfig& tol) {
  require_square(C, "classify");
  require_finite(C, "classify");
  SectorialClass out;
  const double norm = spectral_norm(C);
  if (norm == 0.0) {
    out.tag = SectorialTag::QuasiSectorial;
    out.delta = 0.0;
    out.theta0 = 0.0;
    out.in_tolerance_band = true;
    return out;
  }
  const double band = tol.psd_tol * norm;
  const Extremes ext = extremes(C);
  out.min_support = -ext.gmax;
  out.in_tolerance_band = std::abs(out.min_support) <= band;

  if (out.min_support > band) {
    out.tag = SectorialTag::Indefinite;
    return out;
  }

  out.tag = out.min_support < -band ? SectorialTag::Sectorial : SectorialTag::SemiSectorial;
  ComplexMatrix M = C;
  double theta0 = ext.angle;
  if (out.tag == SectorialTag::SemiSectorial) {
    const detail::RangeSplit split = detail::range_split(C, tol);
    if (split.orthogonal && split.rank > 0) {
      const ComplexMatrix Cs = split.range.adjoint() * C * split.range;
      const Extremes cext = extremes(Cs);
      theta0 = cext.angle;
      if (split.rank < C.rows() && cext.gmax > tol.psd_tol * spectral_norm(Cs)) {
        out.tag = SectorialTag::QuasiSectorial;
        M = Cs;
      }
    }
  }
  out.theta0 = detail::wrap_angle(theta0);
  if (out.tag == SectorialTag::SemiSectorial) {
    out.delta = kPi;
    return out;
  }

  // delta = pi minus the measure of the angles whose supporting line separates 0.
  const double mband = tol.psd_tol * spectral_norm(M);
  const auto arc = detail::superlevel_arc(ComplexMatrix(hermitian_part(M)),
                                          ComplexMatrix(skew_part(M)), theta0, mband);
  out.delta = std::clamp(kPi - (arc.second - arc.first), 0.0, kPi);
  return out;
}

ZeroLocation zero_location(const ComplexMatrix& C, const ToleranceConfig& tol) {
  require_square(C, "zero_location");
  const double norm = spectral_norm(C);
  if (norm == 0.0) return ZeroLocation::Boundary;
  const double band = tol.psd_tol * norm;
  const double min_support = -extremes(C).gmax;
  if (min_support < -band) return ZeroLocation::Outside;
  if (min_support > band) return ZeroLocation::Interior;
  return ZeroLocation::Boundary;
}

}  // namespace phasekit
