#include "geodev/spectral_split.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "geodev/error.hpp"

namespace geodev {

namespace {

constexpr cdouble kI{0.0, 1.0};

CVec stack(const CVec& top, const CVec& bottom) {
  CVec out(top.size() + bottom.size());
  out << top, bottom;
  return out;
}

}  // namespace

CVec oscillating_vector(const Vec& v, double omega) {
  const CVec c = v.cast<cdouble>();
  return stack(c, kI * omega * c);
}

CVec stable_vector(const Vec& w, double eta) {
  const CVec c = w.cast<cdouble>();
  return stack(c, -eta * c);
}

CVec unstable_vector(const Vec& w, double eta) {
  const CVec c = w.cast<cdouble>();
  return stack(c, eta * c);
}

int ModeSplit::dim_c() const noexcept {
  int d = 0;
  for (const auto& g : positive) d += 2 * g.multiplicity();
  return d;
}

const CMat& ModeSplit::projection(Subspace which) const {
  switch (which) {
    case Subspace::Central: return P_c;
    case Subspace::Stable: return P_s;
    case Subspace::Unstable: return P_u;
    case Subspace::Neutral: break;
  }
  return P_0;
}

ModeSplit decompose_modes(const Mat& R0, const SplitTolerances& tol, double frozen_s) {
  if (R0.rows() != R0.cols() || R0.rows() == 0) throw Error(Errc::DimensionMismatch, "R0 must be square");
  const double asym = (R0 - R0.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol.symmetry * std::max(1.0, R0.cwiseAbs().maxCoeff())) {
    std::ostringstream os;
    os << "R0 asymmetry " << asym << " exceeds " << tol.symmetry;
    throw Error(Errc::NotSymmetric, os.str());
  }
  const int n = static_cast<int>(R0.rows());
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (R0 + R0.transpose()));

  ModeSplit split;
  split.n = n;
  split.frozen_s = frozen_s;
  split.eigenvalues = es.eigenvalues();
  split.eigenvectors = es.eigenvectors();
  const double rho = split.eigenvalues.cwiseAbs().maxCoeff();
  split.eps_kernel = tol.eps_kernel >= 0.0 ? tol.eps_kernel : 1e-9 * std::max(1.0, rho);
  const double group_tol = tol.grouping * std::max(1.0, rho);

  std::vector<int> zero_idx;
  auto add_to = [&](std::vector<ModeGroup>& groups, double rate, int j) {
    if (!groups.empty() && std::abs(groups.back().rate - rate) <= group_tol) {
      ModeGroup& g = groups.back();
      g.basis.conservativeResize(n, g.basis.cols() + 1);
      g.basis.col(g.basis.cols() - 1) = split.eigenvectors.col(j);
      const double m = static_cast<double>(g.basis.cols());
      g.rate = ((m - 1.0) * g.rate + rate) / m;
    } else {
      groups.push_back({rate, split.eigenvectors.col(j)});
    }
  };
  // eigenvalues ascend: negative modes come out with decreasing eta; reverse afterwards
  for (int j = 0; j < n; ++j) {
    const double lam = split.eigenvalues[j];
    if (lam > split.eps_kernel)
      add_to(split.positive, std::sqrt(lam), j);
    else if (lam < -split.eps_kernel)
      add_to(split.negative, std::sqrt(-lam), j);
    else
      zero_idx.push_back(j);
  }
  std::reverse(split.negative.begin(), split.negative.end());
  split.zero.resize(n, static_cast<Eigen::Index>(zero_idx.size()));
  for (std::size_t k = 0; k < zero_idx.size(); ++k) split.zero.col(k) = split.eigenvectors.col(zero_idx[k]);

  split.basis.resize(2 * n, 2 * n);
  split.lambda.resize(2 * n);
  int col = 0;
  auto push = [&](const CVec& u, cdouble lam, Subspace t) {
    split.basis.col(col) = u;
    split.lambda[col] = lam;
    split.tag.push_back(t);
    ++col;
  };
  for (const auto& g : split.positive)
    for (int k = 0; k < g.multiplicity(); ++k) {
      const CVec u = oscillating_vector(g.basis.col(k), g.rate);
      push(u, kI * g.rate, Subspace::Central);
      push(u.conjugate(), -kI * g.rate, Subspace::Central);
    }
  std::vector<CVec> s_vecs, u_vecs;
  std::vector<double> s_rates;
  for (const auto& g : split.negative)
    for (int k = 0; k < g.multiplicity(); ++k) {
      const CVec um = stable_vector(g.basis.col(k), g.rate);
      const CVec up = unstable_vector(g.basis.col(k), g.rate);
      push(um, -g.rate, Subspace::Stable);
      push(up, g.rate, Subspace::Unstable);
      s_vecs.push_back(um.normalized());
      u_vecs.push_back(up.normalized());
      s_rates.push_back(g.rate);
    }
  for (Eigen::Index k = 0; k < split.zero.cols(); ++k) {
    const CVec e = split.zero.col(k).cast<cdouble>();
    const CVec z = CVec::Zero(n);
    push(stack(e, z), 0.0, Subspace::Neutral);
    push(stack(z, e), 0.0, Subspace::Neutral);
  }

  split.basis_inverse = split.basis.partialPivLu().inverse();
  auto proj = [&](Subspace t) {
    CMat E = CMat::Zero(2 * n, 2 * n);
    for (int k = 0; k < 2 * n; ++k)
      if (split.tag[k] == t) E(k, k) = 1.0;
    return CMat(split.basis * E * split.basis_inverse);
  };
  split.P_c = proj(Subspace::Central);
  split.P_s = proj(Subspace::Stable);
  split.P_u = proj(Subspace::Unstable);
  split.P_0 = proj(Subspace::Neutral);

  const auto d = static_cast<Eigen::Index>(s_vecs.size());
  split.stable_basis.resize(2 * n, d);
  split.unstable_basis.resize(2 * n, d);
  split.stable_rates.resize(d);
  split.unstable_rates.resize(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    split.stable_basis.col(k) = s_vecs[k];
    split.unstable_basis.col(k) = u_vecs[k];
    split.stable_rates[k] = split.unstable_rates[k] = s_rates[k];
  }
  return split;
}

ProjectedState project_state(const ModeSplit& split, const CVec& z) {
  if (z.size() != 2 * split.n) throw Error(Errc::DimensionMismatch, "state must have length 2n");
  return {split.P_c * z, split.P_s * z, split.P_u * z, split.P_0 * z};
}

CVec frozen_evolution(const ModeSplit& split, const CVec& z, double s) {
  if (z.size() != 2 * split.n) throw Error(Errc::DimensionMismatch, "state must have length 2n");
  CVec c = split.basis_inverse * z;
  const int m = 2 * split.n;
  for (int k = 0; k < m; ++k) {
    if (split.tag[k] == Subspace::Neutral) {
      // Jordan pair: a = (e, 0), b = (0, e) with Rtilde b = a
      c[k] += s * c[k + 1];
      ++k;
      continue;
    }
    c[k] *= std::exp(split.lambda[k] * s);
  }
  return split.basis * c;
}

}  // namespace geodev
