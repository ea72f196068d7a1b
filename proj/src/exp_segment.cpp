#include "geodev/exp_segment.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

#include "geodev/error.hpp"

namespace geodev {

namespace {

// (e^x - 1) / x for complex x without cancellation.
cdouble expm1_over_x(cdouble x) {
  if (x == cdouble(0.0, 0.0)) return 1.0;
  const double a = x.real(), b = x.imag();
  const double sh = std::sin(0.5 * b);
  const cdouble em1(std::expm1(a) * std::cos(b) - 2.0 * sh * sh, std::exp(a) * std::sin(b));
  return em1 / x;
}

void check_integrable(const ExpTerm& t) {
  if (std::isinf(t.a) && std::isinf(t.b))
    throw Error(Errc::DivergentIntegral, "term on the whole line is not square integrable");
  if (std::isinf(t.a) && !(t.rate.real() > 0.0))
    throw Error(Errc::DivergentIntegral, "term on (-inf, b] needs Re(rate) > 0");
  if (std::isinf(t.b) && !(t.rate.real() < 0.0))
    throw Error(Errc::DivergentIntegral, "term on (a, +inf) needs Re(rate) < 0");
}

bool contains(const ExpTerm& t, double x) { return t.a < x && x <= t.b; }
bool contains_right_of(const ExpTerm& t, double x) { return t.a <= x && x < t.b; }

}  // namespace

ExpSegmentFunction::ExpSegmentFunction(int dim, std::vector<ExpTerm> terms) : dim_(dim) {
  for (auto& t : terms) add_term(std::move(t));
}

void ExpSegmentFunction::add_term(ExpTerm term) {
  if (term.coeff.size() != dim_)
    throw Error(Errc::DimensionMismatch, "term coefficient has length " + std::to_string(term.coeff.size()) +
                                             ", expected " + std::to_string(dim_));
  if (!(term.a < term.b)) return;
  check_integrable(term);
  terms_.push_back(std::move(term));
}

CVec ExpSegmentFunction::operator()(double t) const {
  CVec out = CVec::Zero(dim_);
  for (const auto& term : terms_)
    if (contains(term, t)) out += std::exp(term.rate * t) * term.coeff;
  return out;
}

CVec ExpSegmentFunction::right_limit(double t) const {
  CVec out = CVec::Zero(dim_);
  for (const auto& term : terms_)
    if (contains_right_of(term, t)) out += std::exp(term.rate * t) * term.coeff;
  return out;
}

ExpSegmentFunction ExpSegmentFunction::simplified() const {
  using Key = std::tuple<double, double, double, double>;
  std::map<Key, CVec> merged;
  std::vector<Key> order;
  for (const auto& t : terms_) {
    const Key k{t.a, t.b, t.rate.real(), t.rate.imag()};
    auto it = merged.find(k);
    if (it == merged.end()) {
      merged.emplace(k, t.coeff);
      order.push_back(k);
    } else {
      it->second += t.coeff;
    }
  }
  ExpSegmentFunction out(dim_);
  for (const auto& k : order) {
    const CVec& c = merged.at(k);
    if (c.cwiseAbs().maxCoeff() == 0.0) continue;
    out.terms_.push_back({std::get<0>(k), std::get<1>(k), {std::get<2>(k), std::get<3>(k)}, c});
  }
  return out;
}

ExpSegmentFunction& ExpSegmentFunction::operator+=(const ExpSegmentFunction& other) {
  if (other.dim_ != dim_) throw Error(Errc::DimensionMismatch, "adding functions of different dimension");
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  return *this;
}

ExpSegmentFunction& ExpSegmentFunction::operator-=(const ExpSegmentFunction& other) {
  if (other.dim_ != dim_) throw Error(Errc::DimensionMismatch, "subtracting functions of different dimension");
  for (const auto& t : other.terms_) terms_.push_back({t.a, t.b, t.rate, -t.coeff});
  return *this;
}

ExpSegmentFunction& ExpSegmentFunction::operator*=(cdouble k) {
  for (auto& t : terms_) t.coeff *= k;
  return *this;
}

ExpSegmentFunction ExpSegmentFunction::mapped(const CMat& m) const {
  if (m.cols() != dim_) throw Error(Errc::DimensionMismatch, "map does not match function dimension");
  ExpSegmentFunction out(static_cast<int>(m.rows()));
  for (const auto& t : terms_) out.terms_.push_back({t.a, t.b, t.rate, m * t.coeff});
  return out;
}

ExpSegmentFunction operator+(ExpSegmentFunction f, const ExpSegmentFunction& g) { return f += g; }
ExpSegmentFunction operator-(ExpSegmentFunction f, const ExpSegmentFunction& g) { return f -= g; }
ExpSegmentFunction operator*(cdouble k, ExpSegmentFunction f) { return f *= k; }

ExpSegmentFunction translate(const ExpSegmentFunction& f, double tau) {
  std::vector<ExpTerm> terms;
  terms.reserve(f.terms().size());
  for (const auto& t : f.terms()) terms.push_back({t.a + tau, t.b + tau, t.rate, std::exp(-t.rate * tau) * t.coeff});
  return ExpSegmentFunction(f.dim(), std::move(terms));
}

ExpSegmentFunction restrict_to(const ExpSegmentFunction& f, double lo, double hi) {
  ExpSegmentFunction out(f.dim());
  for (const auto& t : f.terms()) {
    const double a = std::max(t.a, lo), b = std::min(t.b, hi);
    if (a < b) out.add_term({a, b, t.rate, t.coeff});
  }
  return out;
}

cdouble exp_integral(cdouble mu, double lo, double hi) {
  if (!(lo < hi)) return 0.0;
  if (std::isinf(lo) && std::isinf(hi)) throw Error(Errc::DivergentIntegral, "integral over the whole line");
  if (std::isinf(lo)) {
    if (!(mu.real() > 0.0)) throw Error(Errc::DivergentIntegral, "divergent integral at -inf");
    return std::exp(mu * hi) / mu;
  }
  if (std::isinf(hi)) {
    if (!(mu.real() < 0.0)) throw Error(Errc::DivergentIntegral, "divergent integral at +inf");
    return -std::exp(mu * lo) / mu;
  }
  const double L = hi - lo;
  if (mu.real() >= 0.0) return std::exp(mu * hi) * L * expm1_over_x(-mu * L);
  return std::exp(mu * lo) * L * expm1_over_x(mu * L);
}

cdouble l2_inner(const ExpSegmentFunction& f, const ExpSegmentFunction& g) {
  if (f.dim() != g.dim()) throw Error(Errc::DimensionMismatch, "inner product of functions of different dimension");
  cdouble sum = 0.0;
  for (const auto& p : f.terms())
    for (const auto& q : g.terms()) {
      const double lo = std::max(p.a, q.a), hi = std::min(p.b, q.b);
      if (!(lo < hi)) continue;
      const cdouble c = p.coeff.dot(q.coeff);
      if (c == cdouble(0.0, 0.0)) continue;
      sum += c * exp_integral(std::conj(p.rate) + q.rate, lo, hi);
    }
  return sum;
}

double l2_norm(const ExpSegmentFunction& f) {
  const ExpSegmentFunction g = f.simplified();
  return std::sqrt(std::max(0.0, l2_inner(g, g).real()));
}

long GridSpec::cells() const { return std::lround((t_max - t_min) / step); }

GridFunction sample_on_grid(const ExpSegmentFunction& f, const GridSpec& grid) {
  const long m = grid.cells();
  if (m <= 0) throw Error(Errc::InvalidParams, "empty grid");
  GridFunction out{grid, CMat(f.dim(), m), CMat(f.dim(), m), CMat(f.dim(), m)};
  for (long k = 0; k < m; ++k) {
    const double t0 = grid.t_min + static_cast<double>(k) * grid.step;
    const double t1 = grid.t_min + static_cast<double>(k + 1) * grid.step;
    out.left.col(k) = f.right_limit(t0);
    out.mid.col(k) = f(0.5 * (t0 + t1));
    out.right.col(k) = f(t1);
  }
  return out;
}

GridFunction translate(const GridFunction& f, double tau) {
  const long shift = std::lround(tau / f.grid.step);
  const long m = f.cells();
  GridFunction out{f.grid, CMat::Zero(f.dim(), m), CMat::Zero(f.dim(), m), CMat::Zero(f.dim(), m)};
  for (long k = 0; k < m; ++k) {
    const long src = k - shift;
    if (src < 0 || src >= m) continue;
    out.left.col(k) = f.left.col(src);
    out.mid.col(k) = f.mid.col(src);
    out.right.col(k) = f.right.col(src);
  }
  return out;
}

cdouble l2_inner(const GridFunction& f, const GridFunction& g) {
  if (f.cells() != g.cells() || f.dim() != g.dim()) throw Error(Errc::GridMismatch, "grid functions differ in shape");
  cdouble sum = 0.0;
  for (long k = 0; k < f.cells(); ++k)
    sum += f.left.col(k).dot(g.left.col(k)) + 4.0 * f.mid.col(k).dot(g.mid.col(k)) +
           f.right.col(k).dot(g.right.col(k));
  return sum * (f.grid.step / 6.0);
}

}  // namespace geodev
