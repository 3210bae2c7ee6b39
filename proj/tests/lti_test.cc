#include "phasekit/lti.hpp"

#include <gtest/gtest.h>

#include "phasekit/phasecore.hpp"
#include "test_util.hpp"

namespace phasekit {
namespace {

using testing::angle_dist;
using testing::kPi;
using testing::norm2;
using testing::Rng;

StateSpace first_order() { return tf({1.0}, {1.0, 1.0}); }
StateSpace integrator() { return tf({1.0}, {1.0, 0.0}); }
StateSpace allpass_squared() { return tf({1.0, -2.0, 1.0}, {1.0, 2.0, 1.0}); }

RealMatrix mat(int r, int c, std::initializer_list<double> v) {
  RealMatrix M(r, c);
  auto it = v.begin();
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) M(i, j) = *it++;
  return M;
}

// Random stable MIMO system with real poles and complex pairs.
StateSpace random_stable(Rng& rng, int n, int m) {
  RealMatrix A = testing::random_real(rng, n, n);
  Eigen::EigenSolver<RealMatrix> es(A, false);
  const double shift = es.eigenvalues().real().maxCoeff() + testing::uniform(rng, 0.1, 1.0);
  A -= shift * RealMatrix::Identity(n, n);
  return {A, testing::random_real(rng, n, m), testing::random_real(rng, m, n), testing::random_real(rng, m, m)};
}

TEST(EvalTest, Examples) {
  EXPECT_NEAR(std::abs(eval(first_order(), kJ)(0, 0) - Complex(0.5, -0.5)), 0.0, 1e-15);
  const StateSpace D = StateSpace::gain(mat(2, 2, {0, 2, 0, 0}));
  EXPECT_EQ(eval(D, Complex(3.0, 1.0)), D.D.cast<Complex>());
  EXPECT_NEAR(std::abs(eval(allpass_squared(), kJ)(0, 0) + 1.0), 0.0, 1e-14);
  EXPECT_EQ(eval_inf(allpass_squared())(0, 0), Complex(1.0));
}

TEST(EvalProperty, ConjugateSymmetry) {
  Rng rng(51);
  for (int trial = 0; trial < 50; ++trial) {
    const StateSpace G = random_stable(rng, 1 + trial % 5, 1 + trial % 3);
    const double w = std::pow(10.0, testing::uniform(rng, -2, 2));
    const ComplexMatrix a = eval(G, Complex(0, w));
    const ComplexMatrix b = eval(G, Complex(0, -w));
    ASSERT_LE(norm2(ComplexMatrix(a - b.conjugate())), 1e-12 * (1 + norm2(a)));
  }
}

TEST(TfTest, RejectsImproper) {
  try {
    tf({1.0, 0.0, 0.0}, {1.0, 1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
}

TEST(PolesTest, Examples) {
  const auto p1 = poles(first_order());
  ASSERT_EQ(p1.size(), 1u);
  EXPECT_NEAR(std::abs(p1[0].value + 1.0), 0.0, 1e-14);
  EXPECT_TRUE(p1[0].semi_simple);

  const auto p2 = poles(integrator());
  ASSERT_EQ(p2.size(), 1u);
  EXPECT_TRUE(p2[0].on_axis);
  EXPECT_TRUE(p2[0].semi_simple);

  const auto p3 = poles(tf({1.0}, {1.0, 0.0, 0.0}));
  ASSERT_EQ(p3.size(), 1u);
  EXPECT_EQ(p3[0].multiplicity, 2);
  EXPECT_FALSE(p3[0].semi_simple);
}

TEST(StabilityTest, Examples) {
  EXPECT_TRUE(is_lyapunov_stable(integrator()));
  EXPECT_FALSE(is_stable(integrator()));
  EXPECT_FALSE(is_lyapunov_stable(tf({1.0}, {1.0, 0.0, 0.0})));
  EXPECT_FALSE(is_lyapunov_stable(tf({1.0}, {1.0, -1.0})));
  EXPECT_TRUE(is_stable(first_order()));
  // semi-simple double pole: diag(1/s, 1/s)
  const StateSpace G{RealMatrix::Zero(2, 2), RealMatrix::Identity(2, 2), RealMatrix::Identity(2, 2),
                     RealMatrix::Zero(2, 2)};
  EXPECT_TRUE(is_lyapunov_stable(G));
}

TEST(MinimalRealizationTest, CancelsHiddenModes) {
  // (s+1)/((s+1)(s+2)) has one hidden mode
  const StateSpace G = tf({1.0, 1.0}, {1.0, 3.0, 2.0});
  const StateSpace g = minimal_realization(G);
  EXPECT_EQ(g.order(), 1);
  for (double w : {0.0, 0.3, 4.0}) {
    EXPECT_NEAR(std::abs(eval(g, Complex(0, w))(0, 0) - eval(G, Complex(0, w))(0, 0)), 0.0, 1e-12);
  }
}

TEST(ResidueTest, Examples) {
  EXPECT_NEAR(std::abs(residue_at(integrator(), 0.0)(0, 0) - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(residue_at(tf({2.0, 0.0}, {1.0, 0.0, 1.0}), 1.0)(0, 0) - 1.0), 0.0, 1e-10);
  EXPECT_NEAR(std::abs(residue_at(first_order(), 0.0)(0, 0)), 0.0, 1e-14);
}

TEST(AxisFrequenciesTest, PolesAndZeros) {
  const auto p = axis_pole_frequencies(tf({1.0}, {1.0, 0.0, 4.0}));
  ASSERT_EQ(p.size(), 1u);
  EXPECT_NEAR(p[0], 2.0, 1e-10);
  const auto z = axis_zero_frequencies(tf({1.0, 0.0, 1.0}, {1.0, 2.0, 1.0}));
  ASSERT_EQ(z.size(), 1u);
  EXPECT_NEAR(z[0], 1.0, 1e-8);
  EXPECT_TRUE(axis_zero_frequencies(first_order()).empty());
}

TEST(ContourTest, Detours) {
  const IndentedContour a = build_contour(first_order());
  EXPECT_TRUE(a.detour_centers.empty());
  EXPECT_TRUE(a.infinity_detour);
  const IndentedContour b = build_contour(integrator());
  ASSERT_EQ(b.detour_centers.size(), 1u);
  EXPECT_EQ(b.detour_centers[0], 0.0);
  const IndentedContour c = build_contour(StateSpace::gain(RealMatrix::Identity(2, 2)));
  EXPECT_TRUE(c.detour_centers.empty());
  EXPECT_FALSE(c.infinity_detour);
  for (const ContourPoint& p : c.points) {
    EXPECT_TRUE(p.kind == ContourKind::Axis || p.kind == ContourKind::Infinity);
  }
}

TEST(ContourTest, DefaultEpsilonScales) {
  EXPECT_DOUBLE_EQ(default_epsilon(first_order()), 1e-6);
  EXPECT_DOUBLE_EQ(default_epsilon(tf({1.0}, {1.0, 100.0})), 1e-4);
}

TEST(PhaseResponseTest, FirstOrderAxis) {
  const IndentedContour c = axis_contour({0.0, 1.0, 10.0});
  const PhaseResponse r = phase_response(first_order(), c);
  ASSERT_EQ(r.samples.size(), 3u);
  EXPECT_NEAR(r.samples[1].phi_low, -kPi / 4, 1e-14);
  EXPECT_NEAR(r.samples[1].phi_high, -kPi / 4, 1e-14);
  EXPECT_NEAR(r.samples[0].phi_high, 0.0, 1e-14);
}

TEST(PhaseResponseTest, IntegratorDetour) {
  const PhaseResponse r = phase_response(integrator());
  int detour = 0;
  for (const PhaseSample& s : r.samples) {
    if (s.point.kind != ContourKind::Detour) continue;
    ++detour;
    EXPECT_NEAR(s.phi_high, -s.point.param, 1e-9);
  }
  EXPECT_GT(detour, 0);
  const PhaseInterval phi = phi_inf_sector(r);
  EXPECT_NEAR(phi.low, -kPi / 2, 1e-6);
  EXPECT_NEAR(phi.high, 0.0, 1e-6);
}

TEST(PhaseResponseTest, EqualPhasesMimo) {
  const StateSpace G = append(first_order(), tf({2.0}, {1.0, 1.0}));
  const PhaseResponse r = phase_response(G, axis_contour({0.5, 2.0}));
  for (const PhaseSample& s : r.samples) {
    const double expect = -std::atan(s.point.omega);
    EXPECT_NEAR(s.phi_low, expect, 1e-12);
    EXPECT_NEAR(s.phi_high, expect, 1e-12);
  }
}

TEST(PhaseResponseTest, SisoMatchesAtan) {
  std::vector<double> w;
  for (int i = 0; i < 1000; ++i) w.push_back(std::pow(10.0, -3.0 + 6.0 * i / 999));
  const PhaseResponse r = phase_response(first_order(), axis_contour(w));
  ASSERT_EQ(r.samples.size(), w.size());
  for (size_t i = 0; i < w.size(); ++i) ASSERT_NEAR(r.samples[i].phi_high, -std::atan(w[i]), 1e-12);
}

TEST(PhiInfTest, Examples) {
  const PhaseInterval a = phi_inf_sector(first_order());
  EXPECT_NEAR(a.low, -kPi / 2, 1e-6);
  EXPECT_NEAR(a.high, 0.0, 1e-6);
  const PhaseInterval b = phi_inf_sector(StateSpace::gain(RealMatrix::Identity(2, 2)));
  EXPECT_NEAR(b.low, 0.0, 1e-12);
  EXPECT_NEAR(b.high, 0.0, 1e-12);
}

TEST(PhaseResponseProperty, SisoArgumentOracle) {
  Rng rng(52);
  for (int trial = 0; trial < 30; ++trial) {
    StateSpace G = random_stable(rng, 1 + trial % 4, 1);
    // the phase is anchored at an accretive G(0)
    if (eval(G, 0.0)(0, 0).real() < 0) {
      G.C = -G.C;
      G.D = -G.D;
    }
    const PhaseResponse r = phase_response(G);
    const PhaseSample* prev = nullptr;
    for (const PhaseSample& s : r.samples) {
      if (s.empty) continue;
      const Complex g = s.point.kind == ContourKind::Infinity ? eval_inf(G)(0, 0) : eval(G, s.point.s)(0, 0);
      ASSERT_LE(angle_dist(s.phi_high, std::arg(g)), 1e-9) << "trial " << trial;
      ASSERT_EQ(s.phi_low, s.phi_high);
      // unwrapped: no jumps between neighbours of the same segment
      if (prev && prev->point.segment == s.point.segment) ASSERT_LT(std::abs(s.gamma - prev->gamma), kPi / 2);
      prev = &s;
    }
  }
}

TEST(PhaseResponseProperty, PhaseIsOdd) {
  Rng rng(53);
  for (int trial = 0; trial < 20; ++trial) {
    const StateSpace G = random_stable(rng, 1 + trial % 4, 1 + trial % 2);
    for (int k = 0; k < 5; ++k) {
      const double w = std::pow(10.0, testing::uniform(rng, -2, 2));
      const ComplexMatrix a = eval(G, Complex(0, w));
      const ComplexMatrix b = eval(G, Complex(0, -w));
      if (classify(a).tag == SectorialTag::Indefinite) continue;
      const PhaseSector pa = phases(a);
      const PhaseSector pb = phases(b, -pa.gamma);
      ASSERT_EQ(pa.phases.size(), pb.phases.size());
      for (size_t i = 0; i < pa.phases.size(); ++i) {
        ASSERT_NEAR(pa.phases[i], -pb.phases[pa.phases.size() - 1 - i], 1e-8);
      }
    }
  }
}

TEST(PhaseResponseProperty, MatchesDecompositionCore) {
  Rng rng(54);
  for (int trial = 0; trial < 20; ++trial) {
    StateSpace G = random_stable(rng, 2, 2);
    G.D += (hinf_norm(G).value + 0.5) * RealMatrix::Identity(2, 2);
    const PhaseResponse r = phase_response(G, axis_contour({0.1, 1.0, 10.0}));
    for (const PhaseSample& s : r.samples) {
      const ComplexMatrix M = eval(G, s.point.s);
      if (classify(M).tag != SectorialTag::Sectorial) continue;
      const SectorialDecomposition d = sectorial_decompose(M);
      // D-factor eigenvalues are e^{j phi}
      for (size_t i = 0; i < d.d_phases.size(); ++i) {
        ASSERT_LE(angle_dist(d.d_phases[i], s.phases[i]), 1e-8);
      }
    }
  }
}

TEST(HinfTest, Examples) {
  EXPECT_NEAR(hinf_norm(first_order()).value, 1.0, 1e-9);
  EXPECT_NEAR(hinf_norm(StateSpace::gain(mat(2, 2, {0, 2, 0, 0}))).value, 2.0, 1e-12);
  const StateSpace G = tf({1.0}, {1.0, 0.2, 1.0});
  // 10^6 point oracle on [0, 10]
  double oracle = 0.0;
  for (int i = 0; i <= 1000000; ++i) {
    const double w = 10.0 * i / 1e6;
    oracle = std::max(oracle, 1.0 / std::abs(Complex(1 - w * w, 0.2 * w)));
  }
  EXPECT_NEAR(oracle, 1.0 / std::sqrt(0.0396), 1e-4);
  EXPECT_NEAR(hinf_norm(G).value, oracle, 1e-3);
}

TEST(HinfTest, RejectsUnstable) { EXPECT_THROW(hinf_norm(integrator()), Error); }

TEST(HinfProperty, BoundsSampledGain) {
  Rng rng(55);
  for (int trial = 0; trial < 30; ++trial) {
    const StateSpace G = random_stable(rng, 1 + trial % 5, 1 + trial % 3);
    const HinfResult h = hinf_norm(G);
    const auto grid = default_frequency_grid(G, 20);
    for (const GainSample& s : gain_response(G, grid).samples) ASSERT_LE(s.sigma_max, h.value * (1 + 1e-9));
    const double at = std::isinf(h.omega) ? norm2(eval_inf(G)) : norm2(eval(G, Complex(0, h.omega)));
    ASSERT_NEAR(at, h.value, 1e-6 * h.value);
  }
}

TEST(StructuralTest, Examples) {
  EXPECT_TRUE(is_symmetric_system(first_order()));
  EXPECT_TRUE(is_inner(allpass_squared()));
  EXPECT_FALSE(is_inner(first_order()));
  EXPECT_FALSE(is_symmetric_system(StateSpace::gain(mat(2, 2, {0, 1, 0, 0}))));
  const StructuralChecks s = structural_checks(first_order());
  EXPECT_TRUE(s.symmetric);
  EXPECT_FALSE(s.inner);
}

TEST(StructuralProperty, SymmetricRealizations) {
  Rng rng(56);
  for (int trial = 0; trial < 20; ++trial) {
    // G^T-symmetric: C = B^T with symmetric A and D
    const int n = 2 + trial % 3, m = 2;
    RealMatrix A = testing::random_real(rng, n, n);
    A = -(A * A.transpose()) - 0.1 * RealMatrix::Identity(n, n);
    const RealMatrix B = testing::random_real(rng, n, m);
    RealMatrix D = testing::random_real(rng, m, m);
    D = (D + D.transpose()).eval();
    EXPECT_TRUE(is_symmetric_system({A, B, B.transpose(), D}));
    RealMatrix C = testing::random_real(rng, m, n);
    EXPECT_FALSE(is_symmetric_system({A, B, C, D}));
  }
}

}  // namespace
}  // namespace phasekit
