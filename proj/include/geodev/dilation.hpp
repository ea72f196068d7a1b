#pragma once

#include <vector>

#include "geodev/exp_segment.hpp"
#include "geodev/geodesic_flow.hpp"
#include "geodev/spectral_split.hpp"

namespace geodev {

enum class Branch { StableForward, UnstableBackward };
enum class Embedding { Outgoing, Incoming };
enum class L2Part { DPlus, HOut, DMinus };

/// Restriction of exp(Rtilde0 tau) to H^s (tau >= 0) or H^u (tau <= 0),
/// written in an orthonormal basis of eigenvectors psi_j with rates eta_j.
///
/// The generator is taken in contraction time |tau|, Z = exp(-i B |tau|), so
/// B = -i diag(eta) and B_minus = (B - B^*)/(2i) = -diag(eta) on both branches.
struct ContractiveSemigroup {
  Branch branch = Branch::StableForward;
  CMat mode_basis;  ///< 2n x d, orthonormal columns
  Vec rates;        ///< eta_j > 0
  CMat B;
  CMat B_minus;

  int dim() const noexcept { return static_cast<int>(rates.size()); }
  /// Z(tau) in mode coordinates; throws WrongTimeDirection.
  CMat Z(double tau) const;
  /// Maps a 2n-state in the subspace to mode coordinates; throws NotInSubspace.
  CVec coordinates(const CVec& z, double tol = 1e-10) const;
  void check_direction(double tau) const;
};

ContractiveSemigroup make_semigroup(const ModeSplit& split, Branch branch);

/// Component j is sqrt(2 eta_j) psi_j e^{+-eta_j t} on a half-line:
///   stable   / outgoing: (-inf, 0], rate  eta
///   stable   / incoming: (0, inf),  rate -eta
///   unstable / outgoing: (0, inf),  rate -eta
///   unstable / incoming: (-inf, 0], rate  eta
ExpSegmentFunction embed(const ContractiveSemigroup& sg, const CVec& psi,
                         Embedding representation = Embedding::Outgoing);

/// |<V phi, U(tau) V psi> - <phi, Z(tau) psi>|.
double dilation_residual(const ContractiveSemigroup& sg, const CVec& phi, const CVec& psi, double tau,
                         Embedding representation = Embedding::Outgoing);

/// Same identity evaluated on the sampled grid backend.
double dilation_residual_grid(const ContractiveSemigroup& sg, const CVec& phi, const CVec& psi, double tau,
                              Embedding representation = Embedding::Outgoing, const GridSpec& grid = {});

/// Orthogonal pieces of f relative to the outgoing representation: H_out is
/// the embedded subspace, D_plus the half-line the translates move into and
/// D_minus the rest of the embedding half-line.
ExpSegmentFunction project_l2(const ExpSegmentFunction& f, const ContractiveSemigroup& sg, L2Part part);

/// Section along a geodesic sampled on the frame grid. Values are 2n complex
/// coordinate vectors at gamma(s); `right` holds right limits so jumps on
/// nodes are integrated exactly.
struct SampledSection {
  std::vector<double> s;
  std::vector<CVec> value;
  std::vector<CVec> right;
  std::vector<double> breakpoints;  ///< nodes where the section may jump
  double truncation_mass = 0.0;     ///< |f|^2 outside the sampled range
};

struct RepresentationOptions {
  double max_truncation_mass = 1e-3;
};

/// (Phi(s) + Phi(s)) Psi f(s) at every frame sample.
SampledSection geodesic_representation(const TransportFrame& frame, const ExpSegmentFunction& f,
                                       const ContractiveSemigroup& sg, const RepresentationOptions& opts = {});

/// Integral of <A(s), (g + g) B(s)> over the frame range, piecewise Simpson
/// between breakpoints.
cdouble section_inner(const TransportFrame& frame, const SampledSection& a, const SampledSection& b);

/// (U_gamma(tau) G)(s) = Phi(s) Phi(s - tau)^{-1} G(s - tau); samples whose
/// source lies outside the grid are zero. `valid` flags the others.
SampledSection transport_shift(const TransportFrame& frame, const SampledSection& g, double tau,
                               std::vector<bool>* valid = nullptr);

}  // namespace geodev
