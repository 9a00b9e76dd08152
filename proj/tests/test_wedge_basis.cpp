#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "casimir/numerics.hpp"
#include "casimir/wedge_basis.hpp"

using namespace casimir;
using namespace casimir::wedge;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kK0At1 = 0.42102443824070834;  // K_0(1)

// Eq. for the tilted bracket evaluated without any special casing.
double raw_bracket(double th, double tb) {
  const double st = std::sin(th), sb = std::sin(tb);
  return 8.0 / 3.0 + 4.0 / (st * sb) + 4.0 * (th / (st * st) - tb / (sb * sb)) / std::sin(th - tb);
}

}  // namespace

TEST(TWedge, Values) {
  EXPECT_DOUBLE_EQ(t_wedge(0.0, Polarization::dirichlet), -1.0);
  EXPECT_DOUBLE_EQ(t_wedge(0.0, Polarization::neumann), 1.0);
  EXPECT_NEAR(t_wedge(1.0, Polarization::dirichlet), -1.0 / std::cosh(kPi), 1e-16);
  EXPECT_NEAR(t_wedge(1.0, Polarization::dirichlet), -0.0862667, 1e-7);
  EXPECT_THROW(t_wedge(-0.5, Polarization::dirichlet), DomainError);
}

TEST(UWedge, ZeroIndexIsBesselK0) {
  for (double th : {0.3, kPi / 2, 2.5}) {
    const double v = u_wedge(0.0, 0.0, {1.0}, 1.0, th, 0.7, Polarization::dirichlet);
    EXPECT_NEAR(v, 4.0 * kK0At1, 1e-10);
  }
  EXPECT_NEAR(4.0 * kK0At1, 1.68410, 1e-5);
}

TEST(UWedge, NeumannZeroIndexVanishes) {
  EXPECT_NEAR(u_wedge(0.0, 0.0, {0.4}, 1.0, 0.3, 1.1, Polarization::neumann), 0.0, 1e-15);
  EXPECT_NEAR(u_wedge(0.0, 0.0, {3.0}, 1.0, 0.3, 1.1, Polarization::neumann), 0.0, 1e-15);
}

TEST(UWedge, SymmetricUnderIndexAndAngleSwap) {
  for (Polarization p : {Polarization::dirichlet, Polarization::neumann}) {
    const double a = u_wedge(0.7, 1.3, {0.8}, 1.0, 0.4, 0.9, p);
    const double b = u_wedge(1.3, 0.7, {0.8}, 1.0, 0.9, 0.4, p);
    EXPECT_NEAR(a, b, 1e-10 * std::abs(a));
  }
}

TEST(UWedge, MatchesCosineProductQuadrature) {
  // Independent evaluation with complex arithmetic kept explicit.
  const double lam = 0.9, lamp = 0.4, th = 1.2, tb = 0.5, qd = 0.6;
  numerics::QuadratureSpec s;
  s.rel_tol = 1e-12;
  const auto r = numerics::integrate_decaying(
      [&](double t) {
        const std::complex<double> c1 = std::cosh(lam * std::complex<double>(th, t));
        const std::complex<double> c2 = std::cosh(lamp * std::complex<double>(tb, t));
        return 2.0 * (c1 * c2).real() * std::exp(-qd * std::cosh(t));
      },
      {-numerics::kInf, numerics::kInf}, s);
  EXPECT_NEAR(u_wedge(lam, lamp, {qd}, 1.0, th, tb, Polarization::dirichlet), r.value, 1e-10 * std::abs(r.value));
}

TEST(UWedge, DomainChecks) {
  EXPECT_THROW(u_wedge(0, 0, {1.0}, 0.0, 1, 1, Polarization::dirichlet), DomainError);
  EXPECT_THROW(u_wedge(0, 0, {0.0}, 1.0, 1, 1, Polarization::dirichlet), DomainError);
}

TEST(WedgeOperator, SpectrumIsNonNegativeAndBelowOne) {
  for (Polarization p : {Polarization::dirichlet, Polarization::neumann}) {
    const auto spec = wedge_operator(0.5, 1.0, kPi / 2, kPi / 2, p, {}).spectrum();
    EXPECT_GE(spec.minCoeff(), 0.0);
    EXPECT_LT(spec.maxCoeff(), 1.0);
  }
}

TEST(TraceNPower, VanishesAtLargeQ) {
  const TwoHalfPlaneConfig c{0.0, 1.0, kPi / 2, kPi / 2};
  const auto small = trace_n_power_wedge(c, {0.5}, 1, Polarization::dirichlet);
  const auto large = trace_n_power_wedge(c, {40.0}, 1, Polarization::dirichlet);
  EXPECT_GT(small.value, 0.0);
  EXPECT_LT(large.value, 1e-25);
}

TEST(TraceNPower, SecondTraceBoundedBySquareOfFirst) {
  const TwoHalfPlaneConfig c{0.0, 1.0, kPi / 2, kPi / 2};
  for (double q : {0.01, 0.1, 0.5, 1.0, 3.0}) {
    const double t1 = trace_n_power_wedge(c, {q}, 1, Polarization::dirichlet).value;
    const double t2 = trace_n_power_wedge(c, {q}, 2, Polarization::dirichlet).value;
    EXPECT_LE(t2, t1 * t1) << q;
    EXPECT_GT(t2, 0.0);
  }
}

TEST(TraceNPower, ConvergesUnderLambdaDoubling) {
  const TwoHalfPlaneConfig c{0.0, 1.0, kPi / 2, kPi / 4};
  for (Polarization p : {Polarization::dirichlet, Polarization::neumann})
    EXPECT_TRUE(trace_n_power_wedge(c, {0.5}, 1, p).converged);
}

TEST(TraceNPower, RejectsNonzeroDx) {
  EXPECT_THROW(trace_n_power_wedge({0.5, 1.0, kPi / 2, kPi / 2}, {1.0}, 1, Polarization::dirichlet), DomainError);
}

TEST(TraceNPower, ScaleInvariance) {
  // tr N^n depends on q and d_y only through q d_y.
  const TwoHalfPlaneConfig a{0.0, 1.0, 1.0, 0.6};
  const TwoHalfPlaneConfig b{0.0, 2.5, 1.0, 0.6};
  const double ta = trace_n_power_wedge(a, {0.8}, 2, Polarization::neumann).value;
  const double tb = trace_n_power_wedge(b, {0.8 / 2.5}, 2, Polarization::neumann).value;
  EXPECT_NEAR(ta, tb, 1e-12 * ta);
}

TEST(ReflectionSeries, FirstOrderSymmetricAngles) {
  const auto s = energy_reflection_series({0.0, 1.0, kPi / 2, kPi / 2}, 1);
  ASSERT_EQ(s.orders.size(), 1u);
  EXPECT_TRUE(s.converged);
  EXPECT_NEAR(s.partial_sums[0], -1.0 / (6.0 * kPi * kPi * kPi), 1e-4 * 0.0053752);
  EXPECT_EQ(ReflectionSeries::space_dimension, 3);
}

TEST(ReflectionSeries, OrdersNegativeAndDecreasing) {
  const auto s = energy_reflection_series({0.0, 1.0, 1.2, 0.9}, 3);
  ASSERT_EQ(s.orders.size(), 3u);
  for (double v : s.orders) EXPECT_LT(v, 0.0);
  EXPECT_LT(std::abs(s.orders[1]), std::abs(s.orders[0]));
  EXPECT_LT(std::abs(s.orders[2]), std::abs(s.orders[1]));
  EXPECT_NEAR(s.partial_sums[2], s.orders[0] + s.orders[1] + s.orders[2], 1e-15);
}

TEST(ReflectionSeries, FirstOrderMatchesTiltedClosedForm) {
  for (auto [th, tb] : {std::pair{1.0, 0.5}, std::pair{2.0, 1.4}}) {
    const auto s = energy_reflection_series({0.0, 1.0, th, tb}, 1);
    const double ref = energy_first_reflection_tilted(1.0, th, tb).value;
    EXPECT_NEAR(s.orders[0], ref, 1e-4 * std::abs(ref)) << th << "," << tb;
  }
}

TEST(ReflectionSeries, ScaleInvariance) {
  const auto a = energy_reflection_series({0.0, 1.0, 1.0, 0.5}, 1);
  const auto b = energy_reflection_series({0.0, 2.0, 1.0, 0.5}, 1);
  EXPECT_NEAR(4.0 * b.orders[0], a.orders[0], 1e-6 * std::abs(a.orders[0]));
}

TEST(TiltedClosedForm, ReferenceValues) {
  EXPECT_NEAR(energy_first_reflection_tilted(1.0, kPi / 2, kPi / 2).value, -1.0 / (6 * kPi * kPi * kPi), 1e-15);
  EXPECT_NEAR(energy_first_reflection_tilted(1.0, kPi / 2, kPi / 2).value, -0.0053752, 1e-7);
  const double ref = -(8.0 / 3.0 + 4.0 * std::sqrt(2.0)) / (64.0 * kPi * kPi * kPi);
  EXPECT_NEAR(energy_first_reflection_tilted(1.0, kPi / 2, kPi / 4).value, ref, 1e-15);
  EXPECT_NEAR(ref, -0.0041945, 1e-7);
  EXPECT_EQ(energy_first_reflection_tilted(1.0, 1.0, 0.5).method.tag(), "reflection:1");
}

TEST(TiltedClosedForm, ScalingSymmetryAndLimit) {
  for (auto [th, tb] : {std::pair{1.0, 0.5}, std::pair{2.0, 0.3}, std::pair{0.7, 0.7}}) {
    const double e1 = energy_first_reflection_tilted(1.0, th, tb).value;
    EXPECT_DOUBLE_EQ(energy_first_reflection_tilted(2.0, th, tb).value * 4.0, e1);
    EXPECT_NEAR(energy_first_reflection_tilted(1.0, tb, th).value, e1, 1e-15);
  }
  // Continuity across the removable-singularity switch.
  for (double th : {0.4, 1.3, 2.6}) {
    const double at = wedge::detail::tilted_bracket(th, th);
    const double near = raw_bracket(th + 3e-4, th - 3e-4);
    EXPECT_NEAR(at, near, 1e-6 * at);
    EXPECT_NEAR(wedge::detail::tilted_bracket(th + 4e-5, th - 4e-5), at, 1e-7 * at);
  }
}

TEST(TiltedClosedForm, DomainErrors) {
  EXPECT_THROW(energy_first_reflection_tilted(1.0, 0.0, 1.0), DomainError);
  EXPECT_THROW(energy_first_reflection_tilted(1.0, 1.0, kPi), DomainError);
  EXPECT_THROW(energy_first_reflection_tilted(0.0, 1.0, 1.0), DomainError);
}

TEST(OverlapClosedForm, ReferenceValues) {
  EXPECT_NEAR(energy_first_reflection_overlap(0.0, 1.0).value, -1.0 / (6 * kPi * kPi * kPi), 1e-15);
  EXPECT_NEAR(energy_first_reflection_overlap(1.0, 1.0).value,
              -(0.5 + 3.0 + 9.0 * kPi / 4.0) / (24.0 * kPi * kPi * kPi), 1e-15);
  EXPECT_NEAR(energy_first_reflection_overlap(1.0, 1.0).value, -0.0142022, 1e-7);
  EXPECT_NEAR(energy_first_reflection_overlap(-1.0, 1.0).value,
              -(0.5 + 3.0 - 3.0 * kPi / 4.0) / (24.0 * kPi * kPi * kPi), 1e-15);
  EXPECT_NEAR(energy_first_reflection_overlap(-1.0, 1.0).value, -0.0015371, 1e-7);
}

TEST(OverlapClosedForm, MatchesComplexLogarithmForm) {
  for (double r : {-3.0, -0.4, 0.0, 0.7, 5.0}) {
    const std::complex<double> i(0.0, 1.0);
    const std::complex<double> lg = std::log((i - r) / std::sqrt(1.0 + r * r));
    const std::complex<double> b = 1.0 / (1.0 + r * r) + 3.0 * (1.0 - i * r * lg);
    EXPECT_NEAR(b.imag(), 0.0, 1e-14);
    EXPECT_NEAR(overlap_bracket(r), b.real(), 1e-13) << r;
  }
}

TEST(OverlapClosedForm, AgreesWithTiltedAtZeroDisplacement) {
  EXPECT_NEAR(energy_first_reflection_overlap(0.0, 1.7).value,
              energy_first_reflection_tilted(1.7, kPi / 2, kPi / 2).value, 1e-16);
}

TEST(OverlapClosedForm, SlopeMatchesFiniteDifference) {
  for (double r : {-2.0, 0.5, 3.0}) {
    const double h = 1e-5;
    const double fd = (overlap_bracket(r + h) - overlap_bracket(r - h)) / (2 * h);
    EXPECT_NEAR(overlap_bracket_slope(r), fd, 1e-8);
  }
}

TEST(OverlapClosedForm, AsymptoticSlope) {
  // bracket -> 3 pi r for large r, i.e. E -> -r/(8 pi^2 d_y^2).
  const double s = energy_first_reflection_overlap(1e6 + 1, 1.0).value - energy_first_reflection_overlap(1e6, 1.0).value;
  EXPECT_NEAR(s, -1.0 / (8.0 * kPi * kPi), 1e-8);
}

TEST(TwoReflectionEdge, ReferenceValues) {
  EXPECT_NEAR(energy_two_reflection_edge(1.0, 0.0).value,
              -1.0 / (16 * kPi * kPi) - (8.0 / 3.0) / (256 * kPi * kPi * kPi), 1e-15);
  EXPECT_NEAR(energy_two_reflection_edge(1.0, 0.0).value, -0.0066685, 1e-7);
  const double ref = -std::sqrt(2.0) / (16 * kPi * kPi) - (4.0 / 3.0 + 4.0 * (kPi / 2 - 1.0)) / (256 * kPi * kPi * kPi);
  EXPECT_NEAR(energy_two_reflection_edge(1.0, kPi / 4).value, ref, 1e-15);
  EXPECT_NEAR(ref, -0.0094112, 1e-7);
  EXPECT_DOUBLE_EQ(energy_two_reflection_edge(2.0, 0.8).value * 4.0, energy_two_reflection_edge(1.0, 0.8).value);
  EXPECT_THROW(energy_two_reflection_edge(1.0, kPi / 2), DomainError);
}

TEST(TwoReflectionEdge, SmallAngleLimitIsContinuous) {
  for (double th : {5e-5, 2e-4, 1e-3}) {
    const double s = std::sin(th);
    const double raw = (2 * th - std::sin(2 * th)) / (s * s * s);
    EXPECT_NEAR(wedge::detail::edge_ratio(th), raw, 1e-5);
  }
  EXPECT_NEAR(wedge::detail::edge_ratio(0.0), 4.0 / 3.0, 1e-15);
}

TEST(TwoReflectionEdge, ParallelLimitOfC) {
  EXPECT_NEAR(two_reflection_c(kPi / 2), 17.0 / (256 * kPi * kPi), 1e-15);
  const double th = kPi / 2 - 1e-6;
  EXPECT_NEAR(-energy_two_reflection_edge(1.0, th).value * std::cos(th), 17.0 / (256 * kPi * kPi), 1e-8);
  EXPECT_NEAR(17.0 / (256 * kPi * kPi), (1.0 / (16 * kPi * kPi)) * (1.0 + 1.0 / 16.0), 1e-16);
}
