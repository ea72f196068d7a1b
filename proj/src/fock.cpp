#include "geodev/fock.hpp"

#include <Eigen/SVD>
#include <sstream>

#include "geodev/truncated_fock.hpp"

namespace geodev {

ExponentialVector<CVec> second_quantize_contraction(const CMat& C, const ExponentialVector<CVec>& E) {
  if (C.cols() != E.argument.size() || C.rows() != C.cols())
    throw Error(Errc::SpaceMismatch, "contraction does not act on the argument space");
  const double norm = C.rows() == 0 ? 0.0 : Eigen::JacobiSVD<CMat>(C).singularValues()[0];
  if (norm > 1.0 + 1e-12) {
    std::ostringstream os;
    os << "operator norm " << norm << " exceeds 1";
    throw Error(Errc::NotContraction, os.str());
  }
  return {E.prefactor, C * E.argument};
}

ExponentialVector<ExpSegmentFunction> second_quantize_contraction(const Translation& C,
                                                                  const ExponentialVector<ExpSegmentFunction>& E) {
  return {E.prefactor, translate(E.argument, C.tau)};
}

void check_projection(const CMat& P, double tol) {
  if (P.rows() != P.cols()) throw Error(Errc::NotProjection, "projection must be square");
  const double herm = (P - P.adjoint()).cwiseAbs().maxCoeff();
  const double idem = (P * P - P).cwiseAbs().maxCoeff();
  if (herm > tol || idem > tol) {
    std::ostringstream os;
    os << "not an orthogonal projection (|P - P*| = " << herm << ", |P^2 - P| = " << idem << ")";
    throw Error(Errc::NotProjection, os.str());
  }
}

NumberExpectation number_expectation(const ExponentialVector<CVec>& E, const CMat& P) {
  if (P.cols() != E.argument.size()) throw Error(Errc::SpaceMismatch, "projection and argument differ in dimension");
  check_projection(P);
  const CVec& u = E.argument;
  const double upu = u.dot(P * u).real();
  return {std::norm(E.prefactor) * upu * std::exp(u.squaredNorm()), upu};
}

NumberExpectation number_expectation(const ExponentialVector<ExpSegmentFunction>& E, const ContractiveSemigroup& sg,
                                     L2Part part) {
  const ExpSegmentFunction& u = E.argument;
  const double upu = l2_inner(u, project_l2(u, sg, part)).real();
  return {std::norm(E.prefactor) * upu * std::exp(l2_inner(u, u).real()), upu};
}

namespace {

GeneratingValue generating_function(const ContractiveSemigroup& sg, const CVec& psi, double tau, double s,
                                    double tol) {
  if (!(s > 0.0 && s <= 1.0)) {
    std::ostringstream os;
    os << "s = " << s << " is outside (0, 1]";
    throw Error(Errc::SOutOfRange, os.str());
  }
  sg.check_direction(tau);
  const ExpSegmentFunction w = translate(embed(sg, psi), tau);
  const ExpSegmentFunction sys = project_l2(w, sg, L2Part::HOut);
  // C_s w = s P_H w + (w - P_H w)
  ExpSegmentFunction cw = w - sys;
  cw += cdouble(s) * sys;
  GeneratingValue out;
  out.value = fock_inner(exponential(w), exponential(cw.simplified())).real();
  out.system_quanta = l2_inner(sys, sys).real();
  const ExpSegmentFunction env = project_l2(w, sg, L2Part::DPlus);
  out.environment_quanta = l2_inner(env, env).real();

  double expo = 0.0;
  for (int j = 0; j < sg.dim(); ++j)
    expo += std::norm(psi[j]) * (1.0 - std::exp(-2.0 * sg.rates[j] * std::abs(tau)) * (1.0 - s));
  out.closed_form = std::exp(expo);
  out.normalized = out.value / std::exp(psi.squaredNorm());
  out.delta = std::abs(out.value - out.closed_form);
  if (out.delta > tol * std::max(1.0, std::abs(out.closed_form))) {
    std::ostringstream os;
    os << "generating function mismatch: structural " << out.value << " vs closed form " << out.closed_form;
    throw Error(Errc::InvariantViolation, os.str());
  }
  return out;
}

}  // namespace

GeneratingValue death_generating_function(const ContractiveSemigroup& sg, const CVec& psi, double tau, double s,
                                          double tol) {
  if (sg.branch != Branch::StableForward)
    throw Error(Errc::WrongBranch, "death process needs the stable forward semigroup");
  return generating_function(sg, psi, tau, s, tol);
}

GeneratingValue absorption_generating_function(const ContractiveSemigroup& sg, const CVec& psi, double tau,
                                               double s, double tol) {
  if (sg.branch != Branch::UnstableBackward)
    throw Error(Errc::WrongBranch, "absorption process needs the unstable backward semigroup");
  return generating_function(sg, psi, tau, s, tol);
}

TruncatedGeneratingValue truncated_generating_function(const ContractiveSemigroup& sg, const CVec& psi, double tau,
                                                       double s, int n_max) {
  sg.check_direction(tau);
  const int d = sg.dim();
  const ExpSegmentFunction w = translate(embed(sg, psi), tau);
  CVec c(d + 1);
  for (int j = 0; j < d; ++j) c[j] = l2_inner(embed(sg, CVec::Unit(d, j)), w);
  const ExpSegmentFunction env = project_l2(w, sg, L2Part::DPlus);
  c[d] = l2_norm(env);
  const TruncatedFock space(d + 1, n_max);
  const CVec e = space.coherent(c);
  double value = 0.0;
  for (long i = 0; i < space.size(); ++i) {
    const int quanta = space.total(i) - space.occupation(i)[d];
    value += std::norm(e[i]) * std::pow(s, quanta);
  }
  return {value, space.tail(c)};
}

}  // namespace geodev
