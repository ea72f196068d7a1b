#pragma once

#include <vector>

#include "geodev/geodesic_flow.hpp"

namespace geodev {

/// Companion generator [[0, I], [-R, 0]] of the first-order deviation system.
template <typename Derived>
MatrixX<typename Derived::Scalar> companion(const Eigen::MatrixBase<Derived>& R) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = R.rows();
  MatrixX<Scalar> out = MatrixX<Scalar>::Zero(2 * n, 2 * n);
  out.topRightCorner(n, n).setIdentity();
  out.bottomLeftCorner(n, n) = -R;
  return out;
}

/// Curvature operator R_s X = Phi(s)^{-1} R(Phi(s) X, T) T along a geodesic,
/// in the orthonormal frame at p0.
struct OperatorPath {
  std::vector<double> s;
  std::vector<Mat> R;       ///< symmetrized
  std::vector<Mat> Rtilde;  ///< companion(R)
  double step = 0.0;
  int origin = 0;
  double symmetrization_defect = 0.0;  ///< max |R - R^T| before symmetrizing
  double tangential_residual = 0.0;    ///< max |R e_1|

  std::size_t size() const noexcept { return s.size(); }
  int dim() const noexcept { return R.empty() ? 0 : static_cast<int>(R.front().rows()); }
  /// R at a grid node.
  const Mat& at(double s_node) const;
};

OperatorPath curvature_operator_path(const MetricModel& model, const TransportFrame& frame);

/// R_s = R0 on the uniform grid covering [s_min, s_max] (0 included).
OperatorPath constant_operator_path(const Mat& R0, double s_min, double s_max, double step);

enum class Representation { OscillatorFrame, Covariant };

/// z(s) = (J(s), J'(s)) as complex 2n-vectors.
struct StateTrajectory {
  std::vector<double> s;
  std::vector<CVec> z;
  Representation representation = Representation::OscillatorFrame;
  int origin = 0;

  std::size_t size() const noexcept { return s.size(); }
};

/// Integrates dz/ds = Rtilde_s z from s = 0 over [s_min, s_max] (defaults to
/// the whole path). Rtilde at RK midpoints is cubic-interpolated from the grid.
StateTrajectory solve_deviation_system(const OperatorPath& path, const CVec& z0);
StateTrajectory solve_deviation_system(const OperatorPath& path, const CVec& z0, double s_min, double s_max);

/// Covariant Jacobi system nabla J = K, nabla K = -R(J, T) T integrated in
/// coordinates jointly with the geodesic; independent of the frames.
StateTrajectory solve_jacobi_covariant(const MetricModel& model, const TransportFrame& frame, const Vec& J0,
                                       const Vec& DJ0);

/// Pulls a covariant trajectory back into the oscillator frame (Phi^{-1} on
/// both halves).
StateTrajectory to_oscillator_frame(const TransportFrame& frame, const StateTrajectory& covariant);

struct AdiabaticityProfile {
  std::vector<double> s;
  std::vector<double> epsilon;
  double max = 0.0;
  double mean = 0.0;
};

/// eps(s) = |R_{s+h} - R_s|_F / (h (|R_s|_F + eps0)).
AdiabaticityProfile adiabaticity_profile(const OperatorPath& path, double eps0 = 1e-9);

/// J1 . V2 - V1 . J2 for two states (J, V).
cdouble symplectic_pairing(const CVec& z1, const CVec& z2);

}  // namespace geodev
