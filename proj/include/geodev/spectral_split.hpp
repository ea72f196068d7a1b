#pragma once

#include <vector>

#include "geodev/types.hpp"

namespace geodev {

/// Eigenvalues of R0 sharing one rate (omega or eta), with an orthonormal
/// basis of the eigenspace in the columns of `basis`.
struct ModeGroup {
  double rate = 0.0;
  Mat basis;

  int multiplicity() const noexcept { return static_cast<int>(basis.cols()); }
};

enum class Subspace { Central, Stable, Unstable, Neutral };

/// Spectral data of a frozen curvature operator R0 and of its companion
/// Rtilde0 = [[0, I], [-R0, 0]].
///
/// Companion eigenvectors per mode:
///   omega > 0:  u = (v, i omega v) and conj(u)   (H^c)
///   eta > 0:    u+ = (w, eta w), u- = (w, -eta w) (H^u, H^s)
///   zero:       (e, 0), (0, e) spanning a Jordan block (neutral)
struct ModeSplit {
  int n = 0;
  double frozen_s = 0.0;
  double eps_kernel = 0.0;
  Vec eigenvalues;  ///< of R0, ascending
  Mat eigenvectors;

  std::vector<ModeGroup> positive;  ///< rate = omega
  std::vector<ModeGroup> negative;  ///< rate = eta
  Mat zero;                         ///< kernel basis, columns

  /// Companion eigenbasis (columns) with its generalized eigenvalues; for the
  /// neutral block the pair ((e,0), (0,e)) is stored consecutively with
  /// eigenvalue 0.
  CMat basis;
  CVec lambda;
  std::vector<Subspace> tag;
  CMat basis_inverse;

  CMat P_c, P_s, P_u, P_0;

  /// Orthonormal bases of H^s (normalized u-) and H^u (normalized u+), one
  /// column per eigenvector, with rates aligned.
  CMat stable_basis;
  CMat unstable_basis;
  Vec stable_rates;
  Vec unstable_rates;

  int dim_c() const noexcept;
  int dim_s() const noexcept { return static_cast<int>(stable_basis.cols()); }
  int dim_u() const noexcept { return static_cast<int>(unstable_basis.cols()); }
  int zero_count() const noexcept { return static_cast<int>(zero.cols()); }
  const CMat& projection(Subspace which) const;
};

struct SplitTolerances {
  double eps_kernel = -1.0;  ///< < 0: 1e-9 max(1, spectral radius)
  double symmetry = 1e-10;
  double grouping = 1e-8;
};

ModeSplit decompose_modes(const Mat& R0, const SplitTolerances& tol = {}, double frozen_s = 0.0);

struct ProjectedState {
  CVec c, s, u, zero;
};

ProjectedState project_state(const ModeSplit& split, const CVec& z);

/// exp(Rtilde0 s) z evaluated mode by mode.
CVec frozen_evolution(const ModeSplit& split, const CVec& z, double s);

/// Companion eigenvectors in the paper-free convention above, unnormalized.
CVec oscillating_vector(const Vec& v, double omega);
CVec stable_vector(const Vec& w, double eta);
CVec unstable_vector(const Vec& w, double eta);

}  // namespace geodev
