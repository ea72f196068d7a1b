#pragma once

#include <Eigen/SparseCore>
#include <map>
#include <vector>

#include "geodev/types.hpp"

namespace geodev {

using SpMat = Eigen::SparseMatrix<cdouble>;

/// Occupation-number basis of the symmetric Fock space over C^d, cut off at
/// N_max total quanta.
class TruncatedFock {
 public:
  static constexpr long kMaxBasis = 2'000'000;

  /// Throws TooLarge if the basis exceeds kMaxBasis states.
  TruncatedFock(int d, int n_max);

  int modes() const noexcept { return d_; }
  int cutoff() const noexcept { return n_max_; }
  long size() const noexcept { return static_cast<long>(states_.size()); }
  const std::vector<int>& occupation(long i) const { return states_[i]; }
  int total(long i) const noexcept { return totals_[i]; }
  /// -1 if the occupation is not in the basis.
  long index_of(const std::vector<int>& occ) const;

  /// Annihilation and creation of mode k.
  SpMat annihilation(int k) const;
  SpMat creation(int k) const;

  /// a(u) = sum_k conj(u_k) a_k, a^dag(u) = sum_k u_k a_k^dag.
  SpMat a(const CVec& u) const;
  SpMat a_dagger(const CVec& u) const;
  /// p(u) = i (a^dag(u) - a(u)), the generator of t -> W(t u) = exp(-i t p(u)).
  SpMat p(const CVec& u) const;
  /// q(u) = -p(i u) = a(u) + a^dag(u).
  SpMat q(const CVec& u) const;
  /// lambda(P) = sum_{jk} P_jk a_j^dag a_k.
  SpMat number(const CMat& P) const;

  /// Compression of W(u, I) to the basis, from exact displacement matrix
  /// elements <m|D(alpha)|n> (generalized Laguerre polynomials).
  CMat weyl(const CVec& u) const;
  /// Gamma(U)|n> = prod_k (a^dag(U e_k))^{n_k} / sqrt(n_k!) |0>; number preserving.
  CMat gamma(const CMat& U) const;

  /// Truncated e(u): coefficients prod_k u_k^{n_k} / sqrt(n_k!).
  CVec coherent(const CVec& u) const;

  /// Squared norm of the discarded part of e(u): sum_{m > N_max} |u|^{2m} / m!.
  double tail(const CVec& u) const;

 private:
  int d_;
  int n_max_;
  std::vector<std::vector<int>> states_;
  std::vector<int> totals_;
  std::map<std::vector<int>, long> index_;
};

/// <m|D(alpha)|n> with D(alpha) e(v) = exp(-|alpha|^2/2 - conj(alpha) v) e(v + alpha).
cdouble displacement_element(cdouble alpha, int m, int n);

/// sum_{m > n} r^m / m!.
double exponential_tail(double r, int n);

}  // namespace geodev
