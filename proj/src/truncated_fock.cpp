#include "geodev/truncated_fock.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "geodev/error.hpp"

namespace geodev {

namespace {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

cdouble ipow(cdouble z, int k) {
  cdouble r = 1.0;
  for (int i = 0; i < k; ++i) r *= z;
  return r;
}

// generalized Laguerre L_n^{(a)}(x) by the three-term recurrence
double laguerre(int n, int a, double x) {
  if (n == 0) return 1.0;
  double l0 = 1.0, l1 = 1.0 + a - x;
  for (int k = 1; k < n; ++k) {
    const double l2 = ((2.0 * k + 1.0 + a - x) * l1 - (k + a) * l0) / (k + 1.0);
    l0 = l1;
    l1 = l2;
  }
  return l1;
}

}  // namespace

cdouble displacement_element(cdouble alpha, int m, int n) {
  const double r = std::norm(alpha);
  const double damp = std::exp(-0.5 * r);
  if (m >= n) {
    const double pref = std::exp(0.5 * (std::lgamma(n + 1.0) - std::lgamma(m + 1.0)));
    return pref * ipow(alpha, m - n) * damp * laguerre(n, m - n, r);
  }
  const double pref = std::exp(0.5 * (std::lgamma(m + 1.0) - std::lgamma(n + 1.0)));
  return pref * ipow(-std::conj(alpha), n - m) * damp * laguerre(m, n - m, r);
}

double exponential_tail(double r, int n) {
  if (r == 0.0) return 0.0;
  // sum from m = n+1 until terms stop contributing
  double term = std::exp((n + 1) * std::log(r) - std::lgamma(n + 2.0));
  double sum = 0.0;
  for (int m = n + 1; m < n + 2000; ++m) {
    sum += term;
    term *= r / (m + 1.0);
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

TruncatedFock::TruncatedFock(int d, int n_max) : d_(d), n_max_(n_max) {
  if (d < 1 || n_max < 0) throw Error(Errc::InvalidParams, "truncated Fock space needs d >= 1 and N_max >= 0");
  const double count = binomial(n_max + d, d);
  if (count > static_cast<double>(kMaxBasis)) {
    std::ostringstream os;
    os << "basis of " << count << " states exceeds " << kMaxBasis;
    throw Error(Errc::TooLarge, os.str());
  }
  std::vector<int> occ(d, 0);
  // enumerate by total, then lexicographically
  for (int total = 0; total <= n_max; ++total) {
    std::function<void(int, int)> rec = [&](int k, int left) {
      if (k == d - 1) {
        occ[k] = left;
        index_.emplace(occ, static_cast<long>(states_.size()));
        states_.push_back(occ);
        totals_.push_back(total);
        return;
      }
      for (int v = left; v >= 0; --v) {
        occ[k] = v;
        rec(k + 1, left - v);
      }
    };
    rec(0, total);
  }
}

long TruncatedFock::index_of(const std::vector<int>& occ) const {
  auto it = index_.find(occ);
  return it == index_.end() ? -1 : it->second;
}

SpMat TruncatedFock::annihilation(int k) const {
  std::vector<Eigen::Triplet<cdouble>> trip;
  for (long i = 0; i < size(); ++i) {
    const int nk = states_[i][k];
    if (nk == 0) continue;
    std::vector<int> o = states_[i];
    --o[k];
    trip.emplace_back(index_of(o), i, std::sqrt(static_cast<double>(nk)));
  }
  SpMat m(size(), size());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

SpMat TruncatedFock::creation(int k) const { return SpMat(annihilation(k).adjoint()); }

SpMat TruncatedFock::a(const CVec& u) const {
  if (u.size() != d_) throw Error(Errc::SpaceMismatch, "vector does not match the mode count");
  SpMat m(size(), size());
  for (int k = 0; k < d_; ++k)
    if (u[k] != cdouble(0.0)) m += std::conj(u[k]) * annihilation(k);
  return m;
}

SpMat TruncatedFock::a_dagger(const CVec& u) const { return SpMat(a(u).adjoint()); }

SpMat TruncatedFock::p(const CVec& u) const { return cdouble(0.0, 1.0) * (a_dagger(u) - a(u)); }

SpMat TruncatedFock::q(const CVec& u) const { return a(u) + a_dagger(u); }

SpMat TruncatedFock::number(const CMat& P) const {
  if (P.rows() != d_ || P.cols() != d_) throw Error(Errc::SpaceMismatch, "projection does not match the mode count");
  std::vector<SpMat> ann;
  for (int k = 0; k < d_; ++k) ann.push_back(annihilation(k));
  SpMat m(size(), size());
  for (int j = 0; j < d_; ++j)
    for (int k = 0; k < d_; ++k)
      if (P(j, k) != cdouble(0.0)) m += P(j, k) * SpMat(SpMat(ann[j].adjoint()) * ann[k]);
  return m;
}

CMat TruncatedFock::weyl(const CVec& u) const {
  if (u.size() != d_) throw Error(Errc::SpaceMismatch, "vector does not match the mode count");
  // per-mode displacement tables
  std::vector<CMat> D(d_, CMat(n_max_ + 1, n_max_ + 1));
  for (int k = 0; k < d_; ++k)
    for (int m = 0; m <= n_max_; ++m)
      for (int n = 0; n <= n_max_; ++n) D[k](m, n) = displacement_element(u[k], m, n);
  CMat W(size(), size());
  for (long i = 0; i < size(); ++i)
    for (long j = 0; j < size(); ++j) {
      cdouble v = 1.0;
      for (int k = 0; k < d_; ++k) v *= D[k](states_[i][k], states_[j][k]);
      W(i, j) = v;
    }
  return W;
}

CMat TruncatedFock::gamma(const CMat& U) const {
  if (U.rows() != d_ || U.cols() != d_) throw Error(Errc::SpaceMismatch, "unitary does not match the mode count");
  std::vector<SpMat> cr;
  for (int k = 0; k < d_; ++k) cr.push_back(a_dagger(U.col(k)));
  CMat G = CMat::Zero(size(), size());
  for (long j = 0; j < size(); ++j) {
    CVec v = CVec::Unit(size(), 0);
    for (int k = 0; k < d_; ++k) {
      const int nk = states_[j][k];
      for (int r = 0; r < nk; ++r) v = cr[k] * v;
      v /= std::exp(0.5 * std::lgamma(nk + 1.0));
    }
    G.col(j) = v;
  }
  return G;
}

CVec TruncatedFock::coherent(const CVec& u) const {
  if (u.size() != d_) throw Error(Errc::SpaceMismatch, "vector does not match the mode count");
  CVec c(size());
  for (long i = 0; i < size(); ++i) {
    cdouble v = 1.0;
    for (int k = 0; k < d_; ++k) {
      const int nk = states_[i][k];
      v *= ipow(u[k], nk) / std::exp(0.5 * std::lgamma(nk + 1.0));
    }
    c[i] = v;
  }
  return c;
}

double TruncatedFock::tail(const CVec& u) const { return exponential_tail(u.squaredNorm(), n_max_); }

}  // namespace geodev
