#include "geodev/deviation.hpp"

#include <cmath>
#include <sstream>

#include "geodev/ode.hpp"

namespace geodev {

const Mat& OperatorPath::at(double s_node) const {
  const long k = std::lround(s_node / step) + origin;
  if (k < 0 || k >= static_cast<long>(s.size()) || std::abs(s[k] - s_node) > 1e-3 * step)
    throw Error(Errc::GridExceeded, "s = " + std::to_string(s_node) + " is not a node of the operator path");
  return R[k];
}

OperatorPath curvature_operator_path(const MetricModel& model, const TransportFrame& frame) {
  const int n = frame.dim();
  OperatorPath path;
  path.step = frame.record.step();
  path.origin = frame.record.origin;
  path.s.reserve(frame.size());
  for (std::size_t k = 0; k < frame.size(); ++k) {
    const GeodesicSample& smp = frame.record.samples[k];
    const LocalGeometry loc = geometry_at(model, smp.x);
    Mat Y(n, n);
    for (int j = 0; j < n; ++j) Y.col(j) = curvature_transform(loc, frame.frames[k].col(j), smp.v, smp.v);
    const Mat R = frame.inverse_frames[k] * Y;
    const double defect = (R - R.transpose()).cwiseAbs().maxCoeff();
    path.symmetrization_defect = std::max(path.symmetrization_defect, defect);
    Mat Rs = 0.5 * (R + R.transpose());
    path.tangential_residual = std::max(path.tangential_residual, Rs.col(0).norm());
    path.s.push_back(smp.s);
    path.Rtilde.push_back(companion(Rs));
    path.R.push_back(std::move(Rs));
  }
  if (path.symmetrization_defect > 1e-3) {
    std::ostringstream os;
    os << "curvature operator asymmetry " << path.symmetrization_defect << " exceeds 1e-3";
    throw Error(Errc::AsymmetryTooLarge, os.str());
  }
  return path;
}

OperatorPath constant_operator_path(const Mat& R0, double s_min, double s_max, double step) {
  if (!(s_min <= 0.0 && s_max >= 0.0 && step > 0.0))
    throw Error(Errc::InvalidParams, "constant path needs s_min <= 0 <= s_max and step > 0");
  OperatorPath path;
  const int nb = static_cast<int>(std::ceil(-s_min / step - 1e-9));
  const int nf = static_cast<int>(std::ceil(s_max / step - 1e-9));
  path.step = step;
  path.origin = nb;
  const Mat Rs = 0.5 * (R0 + R0.transpose());
  path.symmetrization_defect = (R0 - R0.transpose()).cwiseAbs().maxCoeff();
  path.tangential_residual = Rs.col(0).norm();
  for (int k = -nb; k <= nf; ++k) {
    path.s.push_back(k * step);
    path.R.push_back(Rs);
    path.Rtilde.push_back(companion(Rs));
  }
  return path;
}

namespace {

// Rtilde at the midpoint between nodes k and k+1 (4-point Lagrange).
Mat midpoint_generator(const OperatorPath& path, int k) {
  const int m = static_cast<int>(path.size());
  if (m < 4) return 0.5 * (path.Rtilde[k] + path.Rtilde[k + 1]);
  if (k == 0)
    return (5.0 * path.Rtilde[0] + 15.0 * path.Rtilde[1] - 5.0 * path.Rtilde[2] + path.Rtilde[3]) / 16.0;
  if (k == m - 2)
    return (path.Rtilde[m - 4] - 5.0 * path.Rtilde[m - 3] + 15.0 * path.Rtilde[m - 2] + 5.0 * path.Rtilde[m - 1]) /
           16.0;
  return (-path.Rtilde[k - 1] + 9.0 * path.Rtilde[k] + 9.0 * path.Rtilde[k + 1] - path.Rtilde[k + 2]) / 16.0;
}

CVec rk4_linear(const CMat& a0, const CMat& amid, const CMat& a1, const CVec& z, double h) {
  const CVec k1 = a0 * z;
  const CVec k2 = amid * (z + 0.5 * h * k1);
  const CVec k3 = amid * (z + 0.5 * h * k2);
  const CVec k4 = a1 * (z + h * k3);
  return z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

StateTrajectory solve_deviation_system(const OperatorPath& path, const CVec& z0) {
  return solve_deviation_system(path, z0, path.s.front(), path.s.back());
}

StateTrajectory solve_deviation_system(const OperatorPath& path, const CVec& z0, double s_min, double s_max) {
  const int n = path.dim();
  if (z0.size() != 2 * n) throw Error(Errc::DimensionMismatch, "initial state must have length 2n");
  if (!z0.allFinite()) throw Error(Errc::InvalidParams, "initial state is not finite");
  const double h = path.step;
  const int last = static_cast<int>(path.size()) - 1;
  const int k_lo = path.origin + static_cast<int>(std::lround(s_min / h));
  const int k_hi = path.origin + static_cast<int>(std::lround(s_max / h));
  if (k_lo < 0 || k_hi > last || s_min > 0.0 || s_max < 0.0) {
    std::ostringstream os;
    os << "requested span [" << s_min << ", " << s_max << "] exceeds path range [" << path.s.front() << ", "
       << path.s.back() << "]";
    throw Error(Errc::GridExceeded, os.str());
  }
  std::vector<CVec> z(path.size());
  z[path.origin] = z0;
  for (int k = path.origin; k < k_hi; ++k)
    z[k + 1] = rk4_linear(path.Rtilde[k].cast<cdouble>(), midpoint_generator(path, k).cast<cdouble>(),
                          path.Rtilde[k + 1].cast<cdouble>(), z[k], h);
  for (int k = path.origin; k > k_lo; --k)
    z[k - 1] = rk4_linear(path.Rtilde[k].cast<cdouble>(), midpoint_generator(path, k - 1).cast<cdouble>(),
                          path.Rtilde[k - 1].cast<cdouble>(), z[k], -h);
  StateTrajectory traj;
  traj.representation = Representation::OscillatorFrame;
  traj.origin = path.origin - k_lo;
  for (int k = k_lo; k <= k_hi; ++k) {
    traj.s.push_back(path.s[k]);
    traj.z.push_back(std::move(z[k]));
  }
  return traj;
}

StateTrajectory solve_jacobi_covariant(const MetricModel& model, const TransportFrame& frame, const Vec& J0,
                                       const Vec& DJ0) {
  const int n = model.dim;
  if (J0.size() != n || DJ0.size() != n) throw Error(Errc::DimensionMismatch, "J0/DJ0 dimension mismatch");
  const GeodesicRecord& rec = frame.record;
  // state (x, v, J, K) with dJ/ds = K - Gamma(v, J), dK/ds = -R(J, v) v - Gamma(v, K)
  auto rhs = [&model, n](double, const Vec& y) {
    const Vec x = y.head(n), v = y.segment(n, n), J = y.segment(2 * n, n), K = y.segment(3 * n, n);
    const LocalGeometry loc = geometry_at(model, x);
    Vec dy(4 * n);
    dy.head(n) = v;
    dy.segment(n, n) = -loc.gamma.contract(v, v);
    dy.segment(2 * n, n) = K - loc.gamma.contract(v, J);
    dy.segment(3 * n, n) = -curvature_transform(loc, J, v, v) - loc.gamma.contract(v, K);
    return dy;
  };
  const GeodesicSample& o = rec.samples[rec.origin];
  Vec y0(4 * n);
  y0 << o.x, o.v, J0, DJ0;
  const double h = rec.step();
  const int m = static_cast<int>(rec.size());
  std::vector<Vec> ys(m);
  ys[rec.origin] = y0;
  for (int k = rec.origin; k + 1 < m; ++k) ys[k + 1] = rk4_step(rhs, rec.samples[k].s, ys[k], h);
  for (int k = rec.origin; k > 0; --k) ys[k - 1] = rk4_step(rhs, rec.samples[k].s, ys[k], -h);

  StateTrajectory traj;
  traj.representation = Representation::Covariant;
  traj.origin = rec.origin;
  for (int k = 0; k < m; ++k) {
    traj.s.push_back(rec.samples[k].s);
    CVec z(2 * n);
    z.head(n) = ys[k].segment(2 * n, n).cast<cdouble>();
    z.tail(n) = ys[k].segment(3 * n, n).cast<cdouble>();
    traj.z.push_back(std::move(z));
  }
  return traj;
}

StateTrajectory to_oscillator_frame(const TransportFrame& frame, const StateTrajectory& covariant) {
  if (covariant.representation != Representation::Covariant)
    throw Error(Errc::InvalidParams, "trajectory is already in the oscillator frame");
  if (covariant.size() != frame.size()) throw Error(Errc::GridMismatch, "trajectory/frame size mismatch");
  const int n = frame.dim();
  StateTrajectory out = covariant;
  out.representation = Representation::OscillatorFrame;
  for (std::size_t k = 0; k < covariant.size(); ++k) {
    const CMat inv = frame.inverse_frames[k].cast<cdouble>();
    out.z[k].head(n) = inv * covariant.z[k].head(n);
    out.z[k].tail(n) = inv * covariant.z[k].tail(n);
  }
  return out;
}

AdiabaticityProfile adiabaticity_profile(const OperatorPath& path, double eps0) {
  AdiabaticityProfile prof;
  if (path.size() < 3) return prof;
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const double e = (path.R[k + 1] - path.R[k]).norm() / (path.step * (path.R[k].norm() + eps0));
    prof.s.push_back(path.s[k]);
    prof.epsilon.push_back(e);
    prof.max = std::max(prof.max, e);
    sum += e;
  }
  prof.mean = sum / static_cast<double>(prof.epsilon.size());
  return prof;
}

cdouble symplectic_pairing(const CVec& z1, const CVec& z2) {
  const Eigen::Index n = z1.size() / 2;
  return (z1.head(n).transpose() * z2.tail(n))(0) - (z1.tail(n).transpose() * z2.head(n))(0);
}

}  // namespace geodev
