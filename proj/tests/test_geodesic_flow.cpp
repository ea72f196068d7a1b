#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "geodev/geodesic_flow.hpp"

using namespace geodev;

namespace {

struct Curve {
  MetricModel model;
  GeodesicRecord record;
  TransportFrame frame;
};

Curve curve(const std::string& name, double K, const Vec& p0, const Vec& v0, double s_min, double s_max) {
  MetricModel m = build_builtin_manifold(name, {static_cast<int>(p0.size()), K});
  GeodesicRecord r = integrate_geodesic(m, p0, v0, s_min, s_max);
  TransportFrame f = transport_frame(m, r);
  return {std::move(m), std::move(r), std::move(f)};
}

}  // namespace

TEST(Geodesic, FlatStraightLine) {
  const Curve c = curve("flat", 0.0, Vec::Zero(2), Vec{{1.0, 0.0}}, -1.0, 1.0);
  ASSERT_EQ(c.record.samples.front().s, -1.0);
  ASSERT_EQ(c.record.samples.back().s, 1.0);
  for (const auto& smp : c.record.samples) {
    EXPECT_NEAR(smp.x[0], smp.s, 1e-12);
    EXPECT_NEAR(smp.x[1], 0.0, 1e-12);
  }
  EXPECT_EQ(c.record.samples[c.record.origin].s, 0.0);
}

TEST(Geodesic, SphereEquatorStaysOnEquator) {
  const Curve c = curve("sphere", 1.0, Vec{{kPi / 2, 0.0}}, Vec{{0.0, 1.0}}, 0.0, kPi);
  for (const auto& smp : c.record.samples) {
    EXPECT_NEAR(smp.x[0], kPi / 2, 1e-8);
    EXPECT_NEAR(smp.x[1], smp.s, 1e-8);
  }
}

TEST(Geodesic, HyperbolicVerticalLine) {
  const Curve c = curve("hyperbolic", -1.0, Vec{{0.0, 1.0}}, Vec{{0.0, 1.0}}, 0.0, 1.0);
  for (const auto& smp : c.record.samples) EXPECT_NEAR(smp.x[1], std::exp(smp.s), 1e-8);
  EXPECT_LT(c.record.meta.speed_defect, 1e-10);
  EXPECT_LT(c.record.meta.refinement_error, 1e-10);
}

TEST(Geodesic, SlightlyOffUnitSpeedIsNormalized) {
  const MetricModel m = build_builtin_manifold("flat", {2, 0.0});
  const GeodesicRecord r = integrate_geodesic(m, Vec::Zero(2), Vec{{1.05, 0.0}}, 0.0, 1.0);
  EXPECT_TRUE(r.meta.normalized_initial);
  EXPECT_NEAR(r.samples.back().x[0], 1.0, 1e-12);
}

TEST(Geodesic, Errors) {
  const MetricModel flat = build_builtin_manifold("flat", {2, 0.0});
  EXPECT_THROW(integrate_geodesic(flat, Vec::Zero(2), Vec{{2.0, 0.0}}, 0.0, 1.0), Error);
  try {
    integrate_geodesic(flat, Vec::Zero(2), Vec{{2.0, 0.0}}, 0.0, 1.0);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotUnitSpeed);
  }
  // the vertical geodesic heading down reaches y = 0 only asymptotically; a
  // chart-limited sphere meets its coordinate singularity at theta = 0
  const MetricModel sphere = build_builtin_manifold("sphere", {2, 1.0});
  try {
    integrate_geodesic(sphere, Vec{{kPi / 2, 0.0}}, Vec{{-1.0, 0.0}}, 0.0, 3.0);
    ADD_FAILURE() << "expected LeftChart";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::LeftChart);
  }
}

TEST(Transport, FlatFrameIsConstant) {
  const Curve c = curve("flat", 0.0, Vec::Zero(2), Vec{{0.6, 0.8}}, -1.0, 1.0);
  for (const auto& phi : c.frame.frames) EXPECT_LT((phi - c.frame.base_frame).norm(), 1e-14);
}

TEST(Transport, SphereEquatorFrameIsConstant) {
  const Curve c = curve("sphere", 1.0, Vec{{kPi / 2, 0.0}}, Vec{{0.0, 1.0}}, 0.0, kPi);
  for (const auto& phi : c.frame.frames) EXPECT_LT((phi - c.frame.base_frame).norm(), 1e-10);
  // first column is the tangent
  EXPECT_LT((c.frame.base_frame.col(0) - Vec{{0.0, 1.0}}).norm(), 1e-14);
}

TEST(Transport, HyperbolicIsometry) {
  const Curve c = curve("hyperbolic", -1.0, Vec{{0.0, 1.0}}, Vec{{0.6, 0.8}}, 0.0, 1.0);
  const std::size_t k = c.record.index_of(1.0);
  const Mat lhs = c.frame.frames[k].transpose() * c.frame.metrics[k] * c.frame.frames[k];
  const Mat rhs = c.frame.base_frame.transpose() * c.frame.metrics[c.record.origin] * c.frame.base_frame;
  EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LT(c.frame.max_drift, 1e-8);
}

TEST(Transport, StrictDriftRaisesFrameDrift) {
  const MetricModel m = build_builtin_manifold("hyperbolic", {2, -1.0});
  const GeodesicRecord r = integrate_geodesic(m, Vec{{0.0, 1.0}}, Vec{{1.0, 0.0}}, 0.0, 2.0, {0.05});
  TransportOptions opts;
  opts.tolerance = 1e-16;
  opts.drift_factor = 1.0;
  try {
    transport_frame(m, r, opts);
    ADD_FAILURE() << "expected FrameDrift";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::FrameDrift);
    EXPECT_NE(std::string(e.what()).find("at s ="), std::string::npos);
  }
}

TEST(WGamma, PushConstantOnFlat) {
  const Curve c = curve("flat", 0.0, Vec::Zero(2), Vec{{1.0, 0.0}}, 0.0, 1.0);
  const std::vector<Vec> e1(c.frame.size(), Vec::Unit(2, 0));
  for (const auto& x : map_w_gamma(c.frame, e1, WDirection::Push)) EXPECT_LT((x - Vec{{1.0, 0.0}}).norm(), 1e-14);
}

TEST(WGamma, PullTangentIsFirstBasisVector) {
  const Curve c = curve("hyperbolic", -1.0, Vec{{0.0, 1.0}}, Vec{{0.6, 0.8}}, -1.0, 1.5);
  std::vector<Vec> tangent;
  for (const auto& smp : c.record.samples) tangent.push_back(smp.v);
  for (const auto& y : map_w_gamma(c.frame, tangent, WDirection::Pull)) EXPECT_LT((y - Vec::Unit(2, 0)).norm(), 1e-8);
}

TEST(WGamma, PreservesPointwiseInnerProducts) {
  const Curve c = curve("sphere", 1.0, Vec{{1.0, 0.3}}, Vec{{0.6, 0.8 / std::sin(1.0)}}, 0.0, 1.0);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> N;
  std::vector<Vec> A, B;
  for (std::size_t k = 0; k < c.frame.size(); ++k) {
    A.push_back(Vec{{N(rng), N(rng)}});
    B.push_back(Vec{{N(rng), N(rng)}});
  }
  const auto X = map_w_gamma(c.frame, A, WDirection::Push), Y = map_w_gamma(c.frame, B, WDirection::Push);
  const auto back = map_w_gamma(c.frame, X, WDirection::Pull);
  for (std::size_t k = 0; k < c.frame.size(); ++k) {
    EXPECT_NEAR(A[k].dot(B[k]), X[k].dot(c.frame.metrics[k] * Y[k]), 1e-8);
    EXPECT_LT((back[k] - A[k]).norm(), 1e-10);
  }
}

TEST(WGamma, GridMismatch) {
  const Curve c = curve("flat", 0.0, Vec::Zero(2), Vec{{1.0, 0.0}}, 0.0, 1.0);
  try {
    map_w_gamma(c.frame, std::vector<Vec>(3, Vec::Zero(2)), WDirection::Push);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::GridMismatch);
  }
}

TEST(CovariantDerivative, IntertwinesWithOrdinaryDerivative) {
  const Curve c = curve("hyperbolic", -1.0, Vec{{0.0, 1.0}}, Vec{{0.6, 0.8}}, 0.0, 1.0);
  std::vector<Vec> Y, dY;
  for (std::size_t k = 0; k < c.frame.size(); ++k) {
    const double s = c.frame.s(k);
    Y.push_back(Vec{{s * s, 1.0 - s}});
    dY.push_back(Vec{{2.0 * s, -1.0}});
  }
  const auto pulled =
      map_w_gamma(c.frame, covariant_derivative(c.record, map_w_gamma(c.frame, Y, WDirection::Push)), WDirection::Pull);
  for (std::size_t k = 0; k < c.frame.size(); ++k) EXPECT_LT((pulled[k] - dY[k]).norm(), 1e-5);
}
