#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "geodev/deviation.hpp"
#include "geodev/spectral_split.hpp"

using namespace geodev;

namespace {

Mat diag(std::initializer_list<double> d) {
  Vec v(static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double x : d) v[i++] = x;
  return v.asDiagonal();
}

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no geodev::Error thrown";
  return Errc::InvalidParams;
}

}  // namespace

TEST(DecomposeModes, DiagFourMinusNine) {
  const ModeSplit m = decompose_modes(diag({4.0, -9.0}));
  ASSERT_EQ(m.positive.size(), 1u);
  ASSERT_EQ(m.negative.size(), 1u);
  EXPECT_NEAR(m.positive[0].rate, 2.0, 1e-14);
  EXPECT_NEAR(std::abs(m.positive[0].basis(0, 0)), 1.0, 1e-14);
  EXPECT_NEAR(m.negative[0].rate, 3.0, 1e-14);
  EXPECT_NEAR(std::abs(m.negative[0].basis(1, 0)), 1.0, 1e-14);
  EXPECT_EQ(m.zero_count(), 0);
  EXPECT_EQ(m.dim_c(), 2);
  EXPECT_EQ(m.dim_s(), 1);
  EXPECT_EQ(m.dim_u(), 1);

  // u- = (e2, -3 e2), up to normalization and sign
  const CVec u = stable_vector(Vec{{0.0, 1.0}}, 3.0);
  EXPECT_LT((u - CVec(Vec{{0.0, 1.0, 0.0, -3.0}}.cast<cdouble>())).norm(), 1e-15);
  const CVec col = m.stable_basis.col(0);
  EXPECT_NEAR(std::abs(col.dot(u)) / u.norm(), 1.0, 1e-14);
  EXPECT_NEAR(m.stable_rates[0], 3.0, 1e-14);
}

TEST(DecomposeModes, ZeroOperatorIsNeutral) {
  const ModeSplit m = decompose_modes(Mat::Zero(2, 2));
  EXPECT_EQ(m.zero_count(), 2);
  EXPECT_EQ(m.dim_s(), 0);
  EXPECT_EQ(m.dim_u(), 0);
  EXPECT_LT((m.P_0 - CMat::Identity(4, 4)).norm(), 1e-14);
}

TEST(DecomposeModes, SphereFixture) {
  const ModeSplit m = decompose_modes(diag({0.0, 1.0}));
  EXPECT_EQ(m.zero_count(), 1);
  EXPECT_NEAR(std::abs(m.zero(0, 0)), 1.0, 1e-14);
  ASSERT_EQ(m.positive.size(), 1u);
  EXPECT_NEAR(m.positive[0].rate, 1.0, 1e-14);
  EXPECT_EQ(m.dim_u(), 0);
}

TEST(DecomposeModes, GroupsDegenerateRates) {
  const ModeSplit m = decompose_modes(diag({-4.0, -4.0, 1.0}));
  ASSERT_EQ(m.negative.size(), 1u);
  EXPECT_EQ(m.negative[0].multiplicity(), 2);
  EXPECT_EQ(m.dim_s(), 2);
}

TEST(DecomposeModes, Errors) {
  EXPECT_EQ(code_of([] { decompose_modes((Mat(2, 2) << 1, 2, 0, 1).finished()); }), Errc::NotSymmetric);
  const ModeSplit m = decompose_modes(diag({1.0, -1.0}));
  EXPECT_EQ(code_of([&] { project_state(m, CVec::Zero(3)); }), Errc::DimensionMismatch);
}

TEST(DecomposeModes, EigenRelationsAndResolution) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> N;
  Mat A(4, 4);
  for (int i = 0; i < 16; ++i) A(i / 4, i % 4) = N(rng);
  const Mat R0 = A + A.transpose();
  const ModeSplit m = decompose_modes(R0);
  const CMat Rt = companion(R0).cast<cdouble>();
  for (int k = 0; k < 8; ++k)
    EXPECT_LT((Rt * m.basis.col(k) - m.lambda[k] * m.basis.col(k)).norm(), 1e-10);
  EXPECT_LT((m.P_c + m.P_s + m.P_u + m.P_0 - CMat::Identity(8, 8)).norm(), 1e-10);
}

TEST(ProjectState, StableVectorIsItsOwnStablePart) {
  const ModeSplit m = decompose_modes(diag({4.0, -9.0}));
  const CVec u = stable_vector(Vec{{0.0, 1.0}}, 3.0);
  const ProjectedState p = project_state(m, u);
  EXPECT_LT((p.s - u).norm(), 1e-14);
  EXPECT_LT(p.u.norm() + p.c.norm() + p.zero.norm(), 1e-14);
}

TEST(ProjectState, ObliqueSplitOfPositionVector) {
  const ModeSplit m = decompose_modes(diag({4.0, -9.0}));
  const Vec w{{0.0, 1.0}};
  const ProjectedState p = project_state(m, CVec(Vec{{0.0, 1.0, 0.0, 0.0}}.cast<cdouble>()));
  EXPECT_LT((p.s - 0.5 * stable_vector(w, 3.0)).norm(), 1e-14);
  EXPECT_LT((p.u - 0.5 * unstable_vector(w, 3.0)).norm(), 1e-14);
}

TEST(ProjectState, RandomReassembly) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> N;
  const ModeSplit m = decompose_modes(diag({0.0, 2.0, -0.5}));
  CVec z(6);
  for (int i = 0; i < 6; ++i) z[i] = {N(rng), N(rng)};
  const ProjectedState p = project_state(m, z);
  EXPECT_LT((p.c + p.s + p.u + p.zero - z).norm(), 1e-10);
}

TEST(FrozenEvolution, Examples) {
  const ModeSplit m = decompose_modes(diag({4.0, -9.0}));
  const CVec um = stable_vector(Vec{{0.0, 1.0}}, 3.0);
  EXPECT_LT((frozen_evolution(m, um, 0.0) - um).norm(), 1e-15);
  EXPECT_LT((frozen_evolution(m, um, 1.0) - std::exp(-3.0) * um).norm(), 1e-14);
  EXPECT_NEAR(std::exp(-3.0), 0.049787, 1e-6);
  const CVec u = oscillating_vector(Vec{{1.0, 0.0}}, 2.0);
  EXPECT_LT((frozen_evolution(m, u, kPi) - u).norm(), 1e-10);
}

TEST(FrozenEvolution, MatchesDenseExponentialWithJordanBlock) {
  const Mat R0 = diag({0.0, 1.5, -2.0});
  const ModeSplit m = decompose_modes(R0);
  CVec z(6);
  z << 1.0, -0.5, 0.25, cdouble(0.0, 1.0), 2.0, -1.0;
  for (double s : {-1.0, 0.3, 2.0}) {
    const CVec dense = (companion(R0) * s).exp().cast<cdouble>() * z;
    EXPECT_LT((frozen_evolution(m, z, s) - dense).cwiseAbs().maxCoeff(), 1e-8) << "s = " << s;
  }
}
