#pragma once

#include <limits>
#include <vector>

#include "geodev/types.hpp"

namespace geodev {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// c e^{rate t} on the half-open interval (a, b]; a may be -inf, b may be +inf.
struct ExpTerm {
  double a = -kInf;
  double b = kInf;
  cdouble rate{0.0, 0.0};
  CVec coeff;
};

/// Finite sum of vector-valued exponential segments, an exact element of
/// L^2(R; C^d).
class ExpSegmentFunction {
 public:
  ExpSegmentFunction() = default;
  explicit ExpSegmentFunction(int dim) : dim_(dim) {}
  ExpSegmentFunction(int dim, std::vector<ExpTerm> terms);

  int dim() const noexcept { return dim_; }
  const std::vector<ExpTerm>& terms() const noexcept { return terms_; }

  /// Appends a term after checking its dimension and square integrability.
  void add_term(ExpTerm term);

  CVec operator()(double t) const;
  /// Right limit f(t+).
  CVec right_limit(double t) const;

  /// Merges terms sharing interval and rate and drops zero coefficients.
  ExpSegmentFunction simplified() const;

  ExpSegmentFunction& operator+=(const ExpSegmentFunction& other);
  ExpSegmentFunction& operator-=(const ExpSegmentFunction& other);
  ExpSegmentFunction& operator*=(cdouble k);

  /// Applies a linear map to every coefficient (dimension may change).
  ExpSegmentFunction mapped(const CMat& m) const;

 private:
  int dim_ = 0;
  std::vector<ExpTerm> terms_;
};

ExpSegmentFunction operator+(ExpSegmentFunction f, const ExpSegmentFunction& g);
ExpSegmentFunction operator-(ExpSegmentFunction f, const ExpSegmentFunction& g);
ExpSegmentFunction operator*(cdouble k, ExpSegmentFunction f);

/// [U(tau) f](t) = f(t - tau).
ExpSegmentFunction translate(const ExpSegmentFunction& f, double tau);

/// f restricted to (lo, hi].
ExpSegmentFunction restrict_to(const ExpSegmentFunction& f, double lo, double hi);

/// Closed-form integral of <f(t), g(t)>, conjugate-linear in f.
cdouble l2_inner(const ExpSegmentFunction& f, const ExpSegmentFunction& g);
double l2_norm(const ExpSegmentFunction& f);

/// Integral of e^{mu t} over (lo, hi]; throws DivergentIntegral.
cdouble exp_integral(cdouble mu, double lo, double hi);

/// Uniform-grid sampling of an L^2 function on [t_min, t_max]: for every cell
/// the right limit at its left node, the midpoint and the value at its right
/// node, so jumps on nodes are resolved and Simpson's rule applies per cell.
struct GridSpec {
  double t_min = -30.0;
  double t_max = 30.0;
  double step = 1e-3;

  long cells() const;
};

struct GridFunction {
  GridSpec grid;
  CMat left, mid, right;  ///< d x cells

  int dim() const noexcept { return static_cast<int>(left.rows()); }
  long cells() const noexcept { return static_cast<long>(left.cols()); }
};

GridFunction sample_on_grid(const ExpSegmentFunction& f, const GridSpec& grid = {});
/// Shift by round(tau / step) cells; zero is shifted in.
GridFunction translate(const GridFunction& f, double tau);
cdouble l2_inner(const GridFunction& f, const GridFunction& g);

}  // namespace geodev
