#include "phasekit/numrange.hpp"

#include <gtest/gtest.h>

#include "phasekit/symmetric.hpp"
#include "test_util.hpp"

namespace phasekit {
namespace {

using testing::angle_dist;
using testing::kPi;
using testing::Rng;

ComplexMatrix example1() {
  ComplexMatrix C(2, 2);
  C << 1.0, 2.0, 0.0, 1.0;
  return C;
}

// Random sectorial matrix T^H diag(e^{j phi}) T with phases in (c - w/2, c + w/2).
ComplexMatrix random_sectorial(Rng& rng, int n, double centre, double width) {
  RealVector phi(n);
  for (int i = 0; i < n; ++i) phi(i) = centre + testing::uniform(rng, -width / 2, width / 2);
  ComplexVector d(n);
  for (int i = 0; i < n; ++i) d(i) = std::polar(1.0, phi(i));
  const ComplexMatrix T = testing::random_nonsingular(rng, n, 10.0);
  return T.adjoint() * d.asDiagonal() * T;
}

TEST(SupportFunctionTest, Examples) {
  EXPECT_NEAR(support_function(ComplexMatrix::Identity(2, 2), 0.0), 1.0, 1e-14);
  ComplexMatrix D = ComplexMatrix::Zero(2, 2);
  D(0, 0) = -1.0;
  D(1, 1) = 1.0;
  EXPECT_NEAR(support_function(D, 0.0), 1.0, 1e-14);
  // Herm(-C) = -[[1,1],[1,1]] has eigenvalues 0 and -2
  EXPECT_NEAR(support_function(example1(), kPi), 0.0, 1e-14);
}

TEST(SupportFunctionTest, ProfileIsPeriodicAndDense) {
  const SupportProfile p = support_profile(example1());
  ASSERT_GE(p.angles.size(), 256u);
  EXPECT_EQ(p.angles.size(), p.values.size());
  for (size_t i = 0; i < p.angles.size(); i += 17) {
    EXPECT_NEAR(p.values[i], support_function(example1(), p.angles[i] + 2 * kPi), 1e-12);
  }
}

TEST(BoundaryPointsTest, Identity) {
  for (const Complex& z : boundary_points(ComplexMatrix::Identity(3, 3), 16)) {
    EXPECT_NEAR(std::abs(z - 1.0), 0.0, 1e-12);
  }
}

TEST(BoundaryPointsTest, NormalMatrixSegment) {
  ComplexMatrix C = ComplexMatrix::Zero(2, 2);
  C(0, 0) = 1.0;
  C(1, 1) = kJ;
  // segment from 1 to j: Re z + Im z = 1, both parts in [0, 1]
  for (const Complex& z : boundary_points(C, 64)) {
    EXPECT_NEAR(z.real() + z.imag(), 1.0, 1e-9);
    EXPECT_GE(z.real(), -1e-9);
    EXPECT_GE(z.imag(), -1e-9);
  }
}

TEST(BoundaryPointsTest, NilpotentDisk) {
  ComplexMatrix C = ComplexMatrix::Zero(2, 2);
  C(0, 1) = 2.0;
  for (const Complex& z : boundary_points(C, 64)) EXPECT_NEAR(std::abs(z), 1.0, 1e-9);
  // dense random sampling of x^H C x never leaves the unit disk
  Rng rng(3);
  for (int k = 0; k < 2000; ++k) {
    ComplexVector x = testing::random_complex(rng, 2, 1);
    x.normalize();
    EXPECT_LE(std::abs(x.dot(C * x)), 1.0 + 1e-12);
  }
}

TEST(BoundaryPointsTest, RejectsTooFewSamples) { EXPECT_THROW(boundary_points(example1(), 4), Error); }

TEST(ClassifyTest, IdentityIsSectorial) {
  const SectorialClass c = classify(ComplexMatrix::Identity(3, 3));
  EXPECT_EQ(c.tag, SectorialTag::Sectorial);
  ASSERT_TRUE(c.delta.has_value());
  EXPECT_NEAR(*c.delta, 0.0, 1e-9);
  ASSERT_TRUE(c.theta0.has_value());
  EXPECT_NEAR(angle_dist(*c.theta0, 0.0), 0.0, 1e-9);
}

TEST(ClassifyTest, Example1IsSemiSectorial) {
  const SectorialClass c = classify(example1());
  EXPECT_EQ(c.tag, SectorialTag::SemiSectorial);
  ASSERT_TRUE(c.delta.has_value());
  EXPECT_NEAR(*c.delta, kPi, 1e-12);
}

TEST(ClassifyTest, K3IsIndefinite) {
  const ComplexMatrix K3 = build_block({BlockKind::K, 3});
  EXPECT_EQ(classify(K3).tag, SectorialTag::Indefinite);
}

TEST(ClassifyTest, ZeroMatrixIsQuasi) {
  EXPECT_EQ(classify(ComplexMatrix::Zero(3, 3)).tag, SectorialTag::QuasiSectorial);
}

TEST(ClassifyTest, QuasiSectorialRankDeficient) {
  // blkdiag(0, sectorial) with a unitary change of basis keeps ker C = ker C^H
  Rng rng(5);
  const ComplexMatrix S = random_sectorial(rng, 2, 0.3, 1.0);
  ComplexMatrix C = ComplexMatrix::Zero(3, 3);
  C.bottomRightCorner(2, 2) = S;
  const ComplexMatrix U = testing::random_unitary(rng, 3);
  const SectorialClass c = classify(U.adjoint() * C * U);
  EXPECT_EQ(c.tag, SectorialTag::QuasiSectorial);
  ASSERT_TRUE(c.delta.has_value());
  EXPECT_LT(*c.delta, kPi);
}

TEST(ZeroLocationTest, Examples) {
  EXPECT_EQ(zero_location(build_block({BlockKind::K, 2})), ZeroLocation::Boundary);
  EXPECT_EQ(zero_location(build_block({BlockKind::N, 1, 1.0, 1.0})), ZeroLocation::Interior);
  EXPECT_EQ(zero_location(ComplexMatrix::Identity(2, 2)), ZeroLocation::Outside);
}

TEST(ClassifyProperty, RotationCovariance) {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 5;
    const ComplexMatrix C = random_sectorial(rng, n, testing::uniform(rng, -kPi, kPi), 2.5);
    const double th = testing::uniform(rng, -kPi, kPi);
    const SectorialClass a = classify(C);
    const SectorialClass b = classify(ComplexMatrix(std::polar(1.0, th) * C));
    ASSERT_EQ(a.tag, b.tag);
    ASSERT_NEAR(*a.delta, *b.delta, 1e-6);
    ASSERT_LE(angle_dist(*b.theta0, *a.theta0 + th), 1e-6);
  }
}

TEST(ClassifyProperty, ScalingInvariance) {
  Rng rng(22);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 5;
    const ComplexMatrix C = random_sectorial(rng, n, testing::uniform(rng, -kPi, kPi), 2.0);
    const double c = std::pow(10.0, testing::uniform(rng, -3, 3));
    const SectorialClass a = classify(C);
    const SectorialClass b = classify(ComplexMatrix(c * C));
    ASSERT_EQ(a.tag, b.tag);
    ASSERT_NEAR(*a.delta, *b.delta, 1e-6);
    ASSERT_LE(angle_dist(*a.theta0, *b.theta0), 1e-6);
  }
}

TEST(BoundaryPointsProperty, SumsStayInMinkowskiHull) {
  // Support functions are additive: every boundary point z of W(A + B)
  // satisfies Re(e^{-jt} z) <= pA(t) + pB(t) for every direction t.
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 4;
    const ComplexMatrix A = testing::random_complex(rng, n, n);
    const ComplexMatrix B = testing::random_complex(rng, n, n);
    const auto pts = boundary_points(ComplexMatrix(A + B), 32);
    for (int k = 0; k < 64; ++k) {
      const double t = 2 * kPi * k / 64;
      const double bound = support_function(A, t) + support_function(B, t);
      for (const Complex& z : pts) ASSERT_LE((std::polar(1.0, -t) * z).real(), bound + 1e-9);
    }
  }
}

TEST(ZeroLocationProperty, AgreesWithSampledRange) {
  Rng rng(24);
  std::normal_distribution<double> nd;
  int compared = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + trial % 5;
    ComplexMatrix C = testing::random_complex(rng, n, n);
    C += std::polar(testing::uniform(rng, 0.0, 4.0), testing::uniform(rng, -kPi, kPi)) *
         ComplexMatrix::Identity(n, n);
    // largest angular gap between sampled points of W(C)
    std::vector<double> ang;
    for (int k = 0; k < 100000; ++k) {
      ComplexVector x(n);
      for (int i = 0; i < n; ++i) x(i) = Complex(nd(rng), nd(rng));
      x.normalize();
      ang.push_back(std::arg(x.dot(C * x)));
    }
    std::sort(ang.begin(), ang.end());
    double gap = ang.front() + 2 * kPi - ang.back();
    for (size_t i = 1; i < ang.size(); ++i) gap = std::max(gap, ang[i] - ang[i - 1]);
    const ZeroLocation z = zero_location(C);
    if (gap < kPi - 0.05) {
      ++compared;
      ASSERT_EQ(z, ZeroLocation::Interior) << "trial " << trial;
    } else if (gap > kPi + 0.05) {
      ++compared;
      ASSERT_EQ(z, ZeroLocation::Outside) << "trial " << trial;
    }
  }
  EXPECT_GE(compared, 20);
}

}  // namespace
}  // namespace phasekit
