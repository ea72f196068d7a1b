#pragma once

#include <cmath>
#include <string>

#include "geodev/dilation.hpp"
#include "geodev/error.hpp"

namespace geodev {

/// One-particle inner products, conjugate-linear in the first argument.
inline cdouble inner(const CVec& a, const CVec& b) {
  if (a.size() != b.size()) throw Error(Errc::SpaceMismatch, "one-particle vectors differ in dimension");
  return a.dot(b);
}
inline cdouble inner(const ExpSegmentFunction& a, const ExpSegmentFunction& b) {
  if (a.dim() != b.dim()) throw Error(Errc::SpaceMismatch, "one-particle functions differ in dimension");
  return l2_inner(a, b);
}

/// Right translation on L^2(R; C^d).
struct Translation {
  double tau = 0.0;
};

inline CVec apply(const CMat& U, const CVec& v) {
  if (U.cols() != v.size()) throw Error(Errc::SpaceMismatch, "operator and vector differ in dimension");
  return U * v;
}
inline ExpSegmentFunction apply(const Translation& U, const ExpSegmentFunction& v) { return translate(v, U.tau); }
inline CMat compose(const CMat& U2, const CMat& U1) { return U2 * U1; }
inline Translation compose(const Translation& U2, const Translation& U1) { return {U2.tau + U1.tau}; }

/// c e(u) with e(u) = sum_n u^{(x)n} / sqrt(n!).
template <typename V>
struct ExponentialVector {
  cdouble prefactor{1.0, 0.0};
  V argument;
};

template <typename V>
ExponentialVector<V> exponential(const V& u, cdouble c = 1.0) {
  return {c, u};
}

/// <c1 e(u), c2 e(v)> = conj(c1) c2 exp(<u, v>).
template <typename V>
cdouble fock_inner(const ExponentialVector<V>& a, const ExponentialVector<V>& b) {
  return std::conj(a.prefactor) * b.prefactor * std::exp(inner(a.argument, b.argument));
}

template <typename V>
double fock_norm_squared(const ExponentialVector<V>& a) {
  return std::norm(a.prefactor) * std::exp(inner(a.argument, a.argument).real());
}

/// Weyl operator W(u, U) with U a unitary on the one-particle space.
template <typename V, typename Op>
struct WeylDescriptor {
  V u;
  Op U;
};

/// Sign of <u, U v> in the Weyl exponent. Unitary is the only convention
/// under which W preserves Fock inner products; Flipped exists for negative
/// tests.
enum class WeylSign { Unitary, Flipped };

/// W(u, U) c e(v) = c exp(-|u|^2/2 - <u, U v>) e(U v + u).
template <typename V, typename Op>
ExponentialVector<V> weyl_apply(const WeylDescriptor<V, Op>& w, const ExponentialVector<V>& E,
                                WeylSign sign = WeylSign::Unitary) {
  const V Uv = apply(w.U, E.argument);
  const cdouble cross = inner(w.u, Uv);
  const double sgn = sign == WeylSign::Unitary ? -1.0 : 1.0;
  const cdouble factor = std::exp(-0.5 * inner(w.u, w.u).real() + sgn * cross);
  V arg = Uv;
  arg += w.u;
  return {E.prefactor * factor, arg};
}

template <typename V, typename Op>
struct WeylComposition {
  cdouble phase;
  WeylDescriptor<V, Op> w;
};

/// W(u2, U2) W(u1, U1) = exp(-i Im<u2, U2 u1>) W(U2 u1 + u2, U2 U1).
template <typename V, typename Op>
WeylComposition<V, Op> weyl_compose(const WeylDescriptor<V, Op>& w2, const WeylDescriptor<V, Op>& w1) {
  V u = apply(w2.U, w1.u);
  const double im = inner(w2.u, u).imag();
  u += w2.u;
  return {std::exp(cdouble(0.0, -im)), {u, compose(w2.U, w1.U)}};
}

/// Gamma_0(C) c e(v) = c e(C v) for a contraction C.
ExponentialVector<CVec> second_quantize_contraction(const CMat& C, const ExponentialVector<CVec>& E);
ExponentialVector<ExpSegmentFunction> second_quantize_contraction(const Translation& C,
                                                                  const ExponentialVector<ExpSegmentFunction>& E);

/// Throws NotProjection unless P is self-adjoint and idempotent to tol.
void check_projection(const CMat& P, double tol = 1e-10);

struct NumberExpectation {
  double unnormalized = 0.0;  ///< <E, lambda(P) E> = |c|^2 <u, P u> e^{|u|^2}
  double normalized = 0.0;    ///< <u, P u>
};

NumberExpectation number_expectation(const ExponentialVector<CVec>& E, const CMat& P);
/// P is one of the orthogonal projections of project_l2.
NumberExpectation number_expectation(const ExponentialVector<ExpSegmentFunction>& E, const ContractiveSemigroup& sg,
                                     L2Part part);

/// E[s^N] of the number of quanta remaining in the system subspace.
struct GeneratingValue {
  double value = 0.0;        ///< structural: <e(w), e(C_s w)>, C_s = s P_H + (I - P_H)
  double normalized = 0.0;   ///< value / e^{|psi|^2}
  double closed_form = 0.0;  ///< exp(sum_j |psi_j|^2 (1 - e^{-2 eta_j |tau|}(1 - s)))
  double delta = 0.0;
  double system_quanta = 0.0;       ///< |P_H w|^2
  double environment_quanta = 0.0;  ///< |P_D w|^2
};

/// Forward (stable) branch: w = U(tau) V psi with tau >= 0. Throws
/// InvariantViolation if the structural and closed forms differ by more than
/// tol max(1, value).
GeneratingValue death_generating_function(const ContractiveSemigroup& sg, const CVec& psi, double tau, double s,
                                          double tol = 1e-10);

/// Backward (unstable) mirror with tau <= 0: quanta absorbed from the
/// environment as tau runs to -inf.
GeneratingValue absorption_generating_function(const ContractiveSemigroup& sg, const CVec& psi, double tau,
                                               double s, double tol = 1e-10);

struct TruncatedGeneratingValue {
  double value = 0.0;
  double tail = 0.0;  ///< bound on the discarded mass
};

/// Brute-force E[s^N] on the occupation basis of the (d+1)-mode closure
/// spanned by the embedded modes and the normalized environment part of
/// w = U(tau) V psi.
TruncatedGeneratingValue truncated_generating_function(const ContractiveSemigroup& sg, const CVec& psi, double tau,
                                                       double s, int n_max);

}  // namespace geodev
