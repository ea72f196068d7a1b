#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "geodev/deviation.hpp"
#include "geodev/dilation.hpp"

using namespace geodev;

namespace {

Mat diag(std::initializer_list<double> d) {
  Vec v(static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double x : d) v[i++] = x;
  return v.asDiagonal();
}

ContractiveSemigroup semigroup(std::initializer_list<double> d, Branch b = Branch::StableForward) {
  return make_semigroup(decompose_modes(diag(d)), b);
}

CVec unit1() { return CVec::Ones(1); }

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

TEST(Semigroup, HyperbolicFixture) {
  const ContractiveSemigroup sg = semigroup({0.0, -1.0});
  ASSERT_EQ(sg.dim(), 1);
  EXPECT_NEAR((-sg.B_minus)(0, 0).real(), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(sg.Z(2.0)(0, 0) - std::exp(-2.0)), 0.0, 1e-15);
}

TEST(Semigroup, RateThreeAndErrors) {
  const ContractiveSemigroup sg = semigroup({4.0, -9.0});
  EXPECT_EQ(sg.dim(), 1);
  EXPECT_NEAR(sg.rates[0], 3.0, 1e-14);
  EXPECT_EQ(code_of([] { semigroup({0.0, 0.0}); }), Errc::EmptySubspace);
  EXPECT_EQ(code_of([] { semigroup({0.0, 1.0}, Branch::UnstableBackward); }), Errc::EmptySubspace);
  EXPECT_EQ(code_of([&] { sg.Z(-1.0); }), Errc::WrongTimeDirection);
  const ContractiveSemigroup ug = semigroup({4.0, -9.0}, Branch::UnstableBackward);
  EXPECT_EQ(code_of([&] { ug.Z(1.0); }), Errc::WrongTimeDirection);
  EXPECT_NEAR(ug.Z(-1.0)(0, 0).real(), std::exp(-3.0), 1e-15);
}

TEST(Semigroup, CoordinatesOfSubspaceStates) {
  const ModeSplit split = decompose_modes(diag({4.0, -9.0}));
  const ContractiveSemigroup sg = make_semigroup(split, Branch::StableForward);
  const CVec u = 2.0 * split.stable_basis.col(0);
  EXPECT_NEAR(std::abs(sg.coordinates(u)[0]), 2.0, 1e-14);
  EXPECT_EQ(code_of([&] { sg.coordinates(split.unstable_basis.col(0)); }), Errc::NotInSubspace);
}

TEST(Embed, OutgoingAndIncoming) {
  const ContractiveSemigroup sg = semigroup({0.0, -1.0});
  const ExpSegmentFunction out = embed(sg, unit1());
  ASSERT_EQ(out.terms().size(), 1u);
  EXPECT_EQ(out.terms()[0].a, -kInf);
  EXPECT_EQ(out.terms()[0].b, 0.0);
  EXPECT_EQ(out.terms()[0].rate, cdouble(1.0));
  EXPECT_NEAR(std::abs(out.terms()[0].coeff[0] - std::sqrt(2.0)), 0.0, 1e-15);
  const ExpSegmentFunction in = embed(sg, unit1(), Embedding::Incoming);
  ASSERT_EQ(in.terms().size(), 1u);
  EXPECT_EQ(in.terms()[0].a, 0.0);
  EXPECT_EQ(in.terms()[0].b, kInf);
  EXPECT_EQ(in.terms()[0].rate, cdouble(-1.0));
  EXPECT_NEAR(l2_norm(out), 1.0, 1e-15);
  EXPECT_NEAR(l2_norm(in), 1.0, 1e-15);
  EXPECT_EQ(code_of([&] { embed(sg, CVec::Ones(2)); }), Errc::NotInSubspace);
}

TEST(ExpSegment, TranslateShiftsSupportAndScales) {
  const ContractiveSemigroup sg = semigroup({0.0, -1.0});
  const ExpSegmentFunction f = embed(sg, unit1());
  const ExpSegmentFunction g = translate(f, 0.5);
  ASSERT_EQ(g.terms().size(), 1u);
  EXPECT_EQ(g.terms()[0].b, 0.5);
  EXPECT_NEAR(std::abs(g.terms()[0].coeff[0] - std::sqrt(2.0) * std::exp(-0.5)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(g(0.25)[0] - f(-0.25)[0]), 0.0, 1e-15);
  const ExpSegmentFunction same = translate(f, 0.0);
  EXPECT_EQ(same.terms()[0].b, 0.0);
  EXPECT_NEAR(l2_norm(same), l2_norm(f), 1e-15);
}

TEST(ExpSegment, TranslateIsIsometric) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> N;
  for (int trial = 0; trial < 20; ++trial) {
    ExpSegmentFunction f(2);
    f.add_term({-kInf, N(rng), cdouble(0.5 + std::abs(N(rng)), N(rng)), CVec::Random(2)});
    f.add_term({-1.0, 1.5, cdouble(N(rng), N(rng)), CVec::Random(2)});
    f.add_term({N(rng), kInf, cdouble(-0.3 - std::abs(N(rng)), 0.0), CVec::Random(2)});
    EXPECT_NEAR(l2_norm(translate(f, 3.0 * N(rng))), l2_norm(f), 1e-12 * std::max(1.0, l2_norm(f)));
  }
}

TEST(ExpSegment, InnerProducts) {
  const ContractiveSemigroup sg = semigroup({0.0, -1.0});
  const ExpSegmentFunction f = embed(sg, unit1());
  EXPECT_NEAR(std::abs(l2_inner(f, f) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(l2_inner(f, translate(f, 0.5)) - std::exp(-0.5)), 0.0, 1e-15);
  EXPECT_NEAR(std::exp(-0.5), 0.606531, 1e-6);
  ExpSegmentFunction bump(1);
  bump.add_term({1.0, 2.0, cdouble(0.3), CVec::Ones(1)});
  EXPECT_EQ(l2_inner(f, bump), cdouble(0.0));
  EXPECT_EQ(l2_inner(translate(f, -0.5), translate(bump, 0.4)), cdouble(0.0));
}

TEST(ExpSegment, DivergentTermRejected) {
  ExpSegmentFunction f(1);
  EXPECT_EQ(code_of([&] { f.add_term({0.0, kInf, cdouble(1.0), CVec::Ones(1)}); }), Errc::DivergentIntegral);
  EXPECT_EQ(code_of([&] { f.add_term({-kInf, 0.0, cdouble(0.0), CVec::Ones(1)}); }), Errc::DivergentIntegral);
}

TEST(ExpSegment, ExpIntegralIsStableNearZeroRate) {
  EXPECT_NEAR(std::abs(exp_integral(cdouble(1e-14), 0.0, 2.0) - 2.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(exp_integral(cdouble(-2.0), 0.0, kInf) - 0.5), 0.0, 1e-15);
}

TEST(Dilation, ResidualExamples) {
  const ContractiveSemigroup one = semigroup({0.0, -1.0});
  EXPECT_LE(dilation_residual(one, unit1(), unit1(), 0.5), 1e-12);
  EXPECT_LE(dilation_residual(one, unit1(), unit1(), 0.0), 1e-14);
  EXPECT_LE(dilation_residual(one, unit1(), unit1(), 0.5, Embedding::Incoming), 1e-12);
  const ContractiveSemigroup two = semigroup({-1.0, -4.0, 1.0});
  std::mt19937_64 rng(1);
  std::normal_distribution<double> N;
  const CVec phi = (CVec(2) << cdouble(N(rng), N(rng)), cdouble(N(rng), N(rng))).finished();
  const CVec psi = (CVec(2) << cdouble(N(rng), N(rng)), cdouble(N(rng), N(rng))).finished();
  EXPECT_LE(dilation_residual(two, phi, psi, 1.0), 1e-10);
  EXPECT_LE(dilation_residual_grid(two, phi, psi, 1.0), 1e-6);
  EXPECT_EQ(code_of([&] { dilation_residual(two, phi, psi, -1.0); }), Errc::WrongTimeDirection);
}

TEST(Dilation, UnstableMirror) {
  const ContractiveSemigroup ug = semigroup({-1.0, 2.0}, Branch::UnstableBackward);
  for (double tau : {0.0, -0.5, -2.0}) {
    EXPECT_LE(dilation_residual(ug, unit1(), unit1(), tau), 1e-12);
    EXPECT_LE(dilation_residual(ug, unit1(), unit1(), tau, Embedding::Incoming), 1e-12);
  }
}

TEST(ProjectL2, EmbeddedVectorLivesInHOut) {
  const ContractiveSemigroup sg = semigroup({0.0, -1.0});
  const ExpSegmentFunction f = embed(sg, unit1());
  EXPECT_NEAR(l2_norm(project_l2(f, sg, L2Part::HOut) - f), 0.0, 1e-15);
  EXPECT_NEAR(l2_norm(project_l2(f, sg, L2Part::DPlus)), 0.0, 1e-15);
}

TEST(ProjectL2, TranslatedSplit) {
  const ContractiveSemigroup sg = semigroup({0.0, -1.0});
  const ExpSegmentFunction f = translate(embed(sg, unit1()), 1.0);
  const double dplus = std::pow(l2_norm(project_l2(f, sg, L2Part::DPlus)), 2);
  const double hout = std::pow(l2_norm(project_l2(f, sg, L2Part::HOut)), 2);
  EXPECT_NEAR(dplus, 1.0 - std::exp(-2.0), 1e-14);
  EXPECT_NEAR(dplus, 0.864665, 1e-6);
  EXPECT_NEAR(hout, std::exp(-2.0), 1e-14);
  EXPECT_NEAR(l2_norm(project_l2(f, sg, L2Part::DMinus)), 0.0, 1e-14);
}

TEST(ProjectL2, Pythagoras) {
  const ContractiveSemigroup sg = semigroup({-1.0, -2.25});
  std::mt19937_64 rng(2);
  std::normal_distribution<double> N;
  for (int trial = 0; trial < 10; ++trial) {
    ExpSegmentFunction f(2);
    f.add_term({-3.0, 2.0, 0.3 * cdouble(N(rng), N(rng)), CVec::Random(2)});
    f.add_term({-kInf, -1.0, cdouble(0.7, N(rng)), CVec::Random(2)});
    double parts = 0.0;
    for (L2Part p : {L2Part::DPlus, L2Part::HOut, L2Part::DMinus}) parts += std::pow(l2_norm(project_l2(f, sg, p)), 2);
    EXPECT_NEAR(parts, std::pow(l2_norm(f), 2), 1e-10);
  }
}

namespace {

TransportFrame frame_of(const std::string& name, double K, const Vec& p0, const Vec& v0, double lo, double hi) {
  const MetricModel m = build_builtin_manifold(name, {2, K});
  return transport_frame(m, integrate_geodesic(m, p0, v0, lo, hi));
}

}  // namespace

TEST(GeodesicRepresentation, FlatSectionEqualsFunction) {
  const TransportFrame fr = frame_of("flat", 0.0, Vec::Zero(2), Vec{{1.0, 0.0}}, -8.0, 1.0);
  const ContractiveSemigroup sg = semigroup({0.0, -1.0});
  const ExpSegmentFunction f = embed(sg, unit1());
  const SampledSection sec = geodesic_representation(fr, f, sg);
  for (std::size_t k = 0; k < fr.size(); k += 97) {
    const CVec expect = sg.mode_basis * f(sec.s[k]);
    EXPECT_LT((sec.value[k] - expect).norm(), 1e-14);
  }
}

TEST(GeodesicRepresentation, SphereEquatorSection) {
  const TransportFrame fr = frame_of("sphere", 1.0, Vec{{kPi / 2, 0.0}}, Vec{{0.0, 1.0}}, -3.0, 0.5);
  const ContractiveSemigroup sg = semigroup({0.0, -1.0});
  const SampledSection sec = geodesic_representation(fr, embed(sg, unit1()), sg, {0.1});
  CMat phi = CMat::Zero(4, 4);
  phi.topLeftCorner(2, 2) = fr.base_frame.cast<cdouble>();
  phi.bottomRightCorner(2, 2) = fr.base_frame.cast<cdouble>();
  const CVec mode = phi * sg.mode_basis.col(0);
  for (std::size_t k = 0; k < fr.size(); k += 50) {
    const double s = sec.s[k];
    const CVec expect = s <= 0.0 ? CVec(std::sqrt(2.0) * std::exp(s) * mode) : CVec(CVec::Zero(4));
    EXPECT_LT((sec.value[k] - expect).norm(), 1e-10) << "s = " << s;
  }
  EXPECT_NEAR(sec.truncation_mass, std::exp(-6.0), 1e-12);
}

TEST(GeodesicRepresentation, HyperbolicInnerProductWithTail) {
  const TransportFrame fr = frame_of("hyperbolic", -1.0, Vec{{0.0, 1.0}}, Vec{{0.6, 0.8}}, -5.0, 0.0);
  const ContractiveSemigroup sg = semigroup({0.0, -1.0});
  const ExpSegmentFunction f = embed(sg, unit1());
  const SampledSection a = geodesic_representation(fr, f, sg);
  EXPECT_NEAR(a.truncation_mass, std::exp(-10.0), 1e-15);
  const cdouble q = section_inner(fr, a, a);
  EXPECT_LE(std::abs(q - l2_inner(f, f)), 1e-6 + a.truncation_mass);
  EXPECT_LE(std::abs(q - l2_inner(restrict_to(f, -5.0, 0.0), f)), 1e-6);
}

TEST(GeodesicRepresentation, RangeNotCoveredAndGridMismatch) {
  const TransportFrame fr = frame_of("hyperbolic", -1.0, Vec{{0.0, 1.0}}, Vec{{0.0, 1.0}}, 0.0, 1.0);
  const ContractiveSemigroup sg = semigroup({0.0, -1.0});
  try {
    geodesic_representation(fr, embed(sg, unit1()), sg);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::RangeNotCovered);
    EXPECT_NE(std::string(e.what()).find("mass"), std::string::npos);
  }
  ExpSegmentFunction off(1);
  off.add_term({0.10005, 0.5, cdouble(0.0), CVec::Ones(1)});
  EXPECT_EQ(code_of([&] { geodesic_representation(fr, off, sg); }), Errc::GridMismatch);
}

TEST(GeodesicRepresentation, TransportShiftConjugation) {
  const TransportFrame fr = frame_of("hyperbolic", -1.0, Vec{{0.0, 1.0}}, Vec{{0.6, 0.8}}, -6.0, 3.0);
  const ContractiveSemigroup sg = semigroup({0.0, -1.0});
  const ExpSegmentFunction f = embed(sg, unit1());
  const SampledSection a = geodesic_representation(fr, f, sg);
  std::vector<bool> valid;
  const SampledSection shifted = transport_shift(fr, a, 1.0, &valid);
  const SampledSection direct = geodesic_representation(fr, translate(f, 1.0), sg);
  int checked = 0;
  for (std::size_t k = 0; k < fr.size(); ++k)
    if (valid[k]) {
      EXPECT_LT((shifted.value[k] - direct.value[k]).norm(), 1e-6);
      ++checked;
    }
  EXPECT_GT(checked, 8000);
}
