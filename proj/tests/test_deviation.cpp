#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "geodev/deviation.hpp"

using namespace geodev;

namespace {

struct Fixture {
  MetricModel model;
  TransportFrame frame;
  OperatorPath path;
};

Fixture fixture(const std::string& name, double K, const Vec& p0, const Vec& v0, double s_min, double s_max) {
  MetricModel m = build_builtin_manifold(name, {static_cast<int>(p0.size()), K});
  TransportFrame f = transport_frame(m, integrate_geodesic(m, p0, v0, s_min, s_max));
  OperatorPath p = curvature_operator_path(m, f);
  return {std::move(m), std::move(f), std::move(p)};
}

Fixture sphere() { return fixture("sphere", 1.0, Vec{{kPi / 2, 0.0}}, Vec{{0.0, 1.0}}, 0.0, kPi); }
Fixture hyperbolic() { return fixture("hyperbolic", -1.0, Vec{{0.0, 1.0}}, Vec{{0.6, 0.8}}, -1.0, 3.0); }

CVec state(std::initializer_list<double> v) {
  CVec z(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) z[i++] = x;
  return z;
}

}  // namespace

TEST(OperatorPath, Flat) {
  const Fixture f = fixture("flat", 0.0, Vec::Zero(2), Vec{{1.0, 0.0}}, -1.0, 1.0);
  for (const auto& R : f.path.R) EXPECT_EQ(R.norm(), 0.0);
}

TEST(OperatorPath, SphereIsDiagZeroOne) {
  const Fixture f = sphere();
  const Mat expected = Vec{{0.0, 1.0}}.asDiagonal();
  for (const auto& R : f.path.R) EXPECT_LT((R - expected).norm(), 1e-8);
  EXPECT_LT(f.path.tangential_residual, 1e-8);
}

TEST(OperatorPath, HyperbolicIsDiagZeroMinusOne) {
  const Fixture f = hyperbolic();
  const Mat expected = Vec{{0.0, -1.0}}.asDiagonal();
  for (const auto& R : f.path.R) EXPECT_LT((R - expected).norm(), 1e-8);
  EXPECT_LT(f.path.symmetrization_defect, 1e-8);
  EXPECT_EQ(f.path.Rtilde.front().rows(), 4);
}

TEST(OperatorPath, AtRejectsOffGridAndOutOfRange) {
  const Fixture f = sphere();
  EXPECT_NO_THROW(f.path.at(f.path.s[500]));
  try {
    f.path.at(4.0);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::GridExceeded);
  }
}

TEST(Companion, Layout) {
  const Mat R = (Mat(2, 2) << 1, 2, 2, 3).finished();
  const Mat C = companion(R);
  EXPECT_TRUE(C.topLeftCorner(2, 2).isZero());
  EXPECT_TRUE(C.topRightCorner(2, 2).isIdentity());
  EXPECT_TRUE(C.bottomLeftCorner(2, 2).isApprox(-R));
  EXPECT_TRUE(C.bottomRightCorner(2, 2).isZero());
}

TEST(DeviationSystem, FreeMotion) {
  const OperatorPath p = constant_operator_path(Mat::Zero(2, 2), -1.0, 2.0, 1e-3);
  const CVec z0 = state({1.0, -2.0, 0.5, 3.0});
  const StateTrajectory t = solve_deviation_system(p, z0);
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double s = t.s[k];
    EXPECT_NEAR(std::abs(t.z[k][0] - (1.0 + 0.5 * s)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(t.z[k][1] - (-2.0 + 3.0 * s)), 0.0, 1e-12);
  }
}

TEST(DeviationSystem, OscillatingBlock) {
  const OperatorPath p = constant_operator_path(Mat::Constant(1, 1, 1.0), 0.0, kPi, 1e-3);
  const StateTrajectory t = solve_deviation_system(p, state({0.0, 1.0}));
  for (std::size_t k = 0; k < t.size(); ++k) EXPECT_NEAR(t.z[k][0].real(), std::sin(t.s[k]), 1e-8);
}

TEST(DeviationSystem, UnstableBlock) {
  const OperatorPath p = constant_operator_path(Mat::Constant(1, 1, -1.0), 0.0, 3.0, 1e-3);
  const StateTrajectory t = solve_deviation_system(p, state({1.0, 1.0}));
  for (std::size_t k = 0; k < t.size(); ++k) EXPECT_NEAR(t.z[k][0].real(), std::exp(t.s[k]), 1e-8);
}

TEST(DeviationSystem, SubrangeAndErrors) {
  const OperatorPath p = constant_operator_path(Mat::Constant(1, 1, 1.0), -1.0, 1.0, 1e-3);
  const StateTrajectory t = solve_deviation_system(p, state({0.0, 1.0}), -0.5, 0.5);
  EXPECT_NEAR(t.s.front(), -0.5, 1e-12);
  EXPECT_NEAR(t.s.back(), 0.5, 1e-12);
  EXPECT_NEAR(t.z.front()[0].real(), std::sin(-0.5), 1e-10);
  try {
    solve_deviation_system(p, state({0.0, 1.0}), 0.0, 2.0);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::GridExceeded);
  }
  EXPECT_THROW(solve_deviation_system(p, state({0.0, 1.0, 2.0})), Error);
}

TEST(CovariantJacobi, FlatConstantField) {
  const Fixture f = fixture("flat", 0.0, Vec::Zero(2), Vec{{1.0, 0.0}}, 0.0, 1.0);
  const StateTrajectory t = solve_jacobi_covariant(f.model, f.frame, Vec{{0.0, 1.0}}, Vec::Zero(2));
  for (const auto& z : t.z) EXPECT_LT((z - state({0.0, 1.0, 0.0, 0.0})).norm(), 1e-12);
}

TEST(CovariantJacobi, SphereNormOfJ) {
  const Fixture f = sphere();
  const Vec normal = f.frame.base_frame.col(1);
  const StateTrajectory t = solve_jacobi_covariant(f.model, f.frame, Vec::Zero(2), normal);
  for (std::size_t k = 0; k < t.size(); ++k) {
    const Vec J = t.z[k].head(2).real();
    EXPECT_NEAR(std::sqrt(J.dot(f.frame.metrics[k] * J)), std::sin(t.s[k]), 1e-7);
  }
}

TEST(CovariantJacobi, PullbackMatchesOscillatorFrame) {
  const Fixture f = sphere();
  const Mat& phi0 = f.frame.base_frame;
  const Vec j{{0.3, -0.7}}, dj{{0.2, 1.1}};
  const StateTrajectory osc = solve_deviation_system(f.path, (CVec(4) << j.cast<cdouble>(), dj.cast<cdouble>()).finished());
  const StateTrajectory cov = to_oscillator_frame(f.frame, solve_jacobi_covariant(f.model, f.frame, phi0 * j, phi0 * dj));
  ASSERT_EQ(osc.size(), cov.size());
  EXPECT_EQ(cov.representation, Representation::OscillatorFrame);
  for (std::size_t k = 0; k < osc.size(); ++k) EXPECT_LT((osc.z[k] - cov.z[k]).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Adiabaticity, ConstantCurvatureAndFlat) {
  EXPECT_LE(adiabaticity_profile(sphere().path).max, 1e-6);
  EXPECT_LE(adiabaticity_profile(hyperbolic().path).max, 1e-6);
  const AdiabaticityProfile flat =
      adiabaticity_profile(fixture("flat", 0.0, Vec::Zero(2), Vec{{1.0, 0.0}}, 0.0, 1.0).path);
  EXPECT_LE(flat.max, 1e-12);
  EXPECT_EQ(flat.s.size(), flat.epsilon.size());
}

TEST(Adiabaticity, ShortPathIsEmpty) {
  OperatorPath p;
  p.s = {0.0};
  p.R = {Mat::Zero(2, 2)};
  p.Rtilde = {Mat::Zero(4, 4)};
  EXPECT_TRUE(adiabaticity_profile(p).epsilon.empty());
}

TEST(Symplectic, PairingIsConservedForSymmetricR) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> N;
  Mat A(3, 3);
  for (int i = 0; i < 9; ++i) A(i / 3, i % 3) = N(rng);
  const Mat R = A + A.transpose();
  const OperatorPath p = constant_operator_path(R, 0.0, 1.0, 1e-3);
  CVec z1(6), z2(6);
  for (int i = 0; i < 6; ++i) z1[i] = N(rng), z2[i] = N(rng);
  const StateTrajectory a = solve_deviation_system(p, z1), b = solve_deviation_system(p, z2);
  const cdouble w0 = symplectic_pairing(z1, z2);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_LT(std::abs(symplectic_pairing(a.z[k], b.z[k]) - w0), 1e-9);
}
