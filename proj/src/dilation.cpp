#include "geodev/dilation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace geodev {

namespace {

constexpr cdouble kI{0.0, 1.0};

bool outgoing_on_negative_axis(Branch b, Embedding e) {
  return (b == Branch::StableForward) == (e == Embedding::Outgoing);
}

}  // namespace

void ContractiveSemigroup::check_direction(double tau) const {
  const bool ok = branch == Branch::StableForward ? tau >= 0.0 : tau <= 0.0;
  if (!ok) {
    std::ostringstream os;
    os << "tau = " << tau << " is outside the "
       << (branch == Branch::StableForward ? "forward (tau >= 0)" : "backward (tau <= 0)") << " half-line";
    throw Error(Errc::WrongTimeDirection, os.str());
  }
}

CMat ContractiveSemigroup::Z(double tau) const {
  check_direction(tau);
  CMat out = CMat::Zero(dim(), dim());
  for (int j = 0; j < dim(); ++j) out(j, j) = std::exp(-rates[j] * std::abs(tau));
  return out;
}

CVec ContractiveSemigroup::coordinates(const CVec& z, double tol) const {
  if (z.size() != mode_basis.rows()) throw Error(Errc::DimensionMismatch, "state has the wrong length");
  const CVec c = mode_basis.adjoint() * z;
  const double res = (z - mode_basis * c).norm();
  if (res > tol * std::max(1.0, z.norm())) {
    std::ostringstream os;
    os << "state is not in the semigroup subspace (residual " << res << ")";
    throw Error(Errc::NotInSubspace, os.str());
  }
  return c;
}

ContractiveSemigroup make_semigroup(const ModeSplit& split, Branch branch) {
  ContractiveSemigroup sg;
  sg.branch = branch;
  const bool stable = branch == Branch::StableForward;
  sg.mode_basis = stable ? split.stable_basis : split.unstable_basis;
  sg.rates = stable ? split.stable_rates : split.unstable_rates;
  if (sg.rates.size() == 0)
    throw Error(Errc::EmptySubspace, std::string(stable ? "stable" : "unstable") +
                                         " subspace is empty (flat or purely elliptic curvature)");
  // companion generator restricted to the subspace; B = i Rtilde0 in the
  // forward direction, sign-flipped for the backward branch
  const int n = split.n;
  CMat Rt = CMat::Zero(2 * n, 2 * n);
  Rt.topRightCorner(n, n).setIdentity();
  CMat R0 = (split.eigenvectors * split.eigenvalues.asDiagonal() * split.eigenvectors.transpose()).cast<cdouble>();
  Rt.bottomLeftCorner(n, n) = -R0;
  sg.B = kI * (sg.mode_basis.adjoint() * Rt * sg.mode_basis);
  if (!stable) sg.B = -sg.B;
  sg.B_minus = (sg.B - sg.B.adjoint()) / (2.0 * kI);
  return sg;
}

ExpSegmentFunction embed(const ContractiveSemigroup& sg, const CVec& psi, Embedding representation) {
  const int d = sg.dim();
  if (psi.size() != d)
    throw Error(Errc::NotInSubspace, "vector has " + std::to_string(psi.size()) + " coordinates, subspace has " +
                                         std::to_string(d));
  const bool neg = outgoing_on_negative_axis(sg.branch, representation);
  ExpSegmentFunction f(d);
  for (int j = 0; j < d; ++j) {
    if (psi[j] == cdouble(0.0, 0.0)) continue;
    const double eta = sg.rates[j];
    CVec c = CVec::Zero(d);
    c[j] = std::sqrt(2.0 * eta) * psi[j];
    if (neg)
      f.add_term({-kInf, 0.0, eta, c});
    else
      f.add_term({0.0, kInf, -eta, c});
  }
  return f;
}

double dilation_residual(const ContractiveSemigroup& sg, const CVec& phi, const CVec& psi, double tau,
                         Embedding representation) {
  sg.check_direction(tau);
  const cdouble lhs = l2_inner(embed(sg, phi, representation), translate(embed(sg, psi, representation), tau));
  const cdouble rhs = phi.dot(sg.Z(tau) * psi);
  return std::abs(lhs - rhs);
}

double dilation_residual_grid(const ContractiveSemigroup& sg, const CVec& phi, const CVec& psi, double tau,
                              Embedding representation, const GridSpec& grid) {
  sg.check_direction(tau);
  const GridFunction f = sample_on_grid(embed(sg, phi, representation), grid);
  const GridFunction g = translate(sample_on_grid(embed(sg, psi, representation), grid), tau);
  return std::abs(l2_inner(f, g) - phi.dot(sg.Z(tau) * psi));
}

ExpSegmentFunction project_l2(const ExpSegmentFunction& f, const ContractiveSemigroup& sg, L2Part part) {
  if (f.dim() != sg.dim()) throw Error(Errc::DimensionMismatch, "function and semigroup dimensions differ");
  const bool neg = sg.branch == Branch::StableForward;
  auto h_out = [&] {
    ExpSegmentFunction out(f.dim());
    for (int j = 0; j < sg.dim(); ++j) {
      const ExpSegmentFunction e = embed(sg, CVec::Unit(sg.dim(), j));
      out += l2_inner(e, f) * e;
    }
    return out;
  };
  switch (part) {
    case L2Part::DPlus:
      return (neg ? restrict_to(f, 0.0, kInf) : restrict_to(f, -kInf, 0.0)).simplified();
    case L2Part::HOut:
      return h_out().simplified();
    case L2Part::DMinus:
      return ((neg ? restrict_to(f, -kInf, 0.0) : restrict_to(f, 0.0, kInf)) - h_out()).simplified();
  }
  return f;
}

SampledSection geodesic_representation(const TransportFrame& frame, const ExpSegmentFunction& f,
                                       const ContractiveSemigroup& sg, const RepresentationOptions& opts) {
  const int n = frame.dim();
  if (sg.mode_basis.rows() != 2 * n || f.dim() != sg.dim())
    throw Error(Errc::DimensionMismatch, "frame, semigroup and function dimensions do not agree");
  const double lo = frame.s(0), hi = frame.s(frame.size() - 1);
  SampledSection out;
  const double total = l2_inner(f, f).real();
  const double inside = l2_inner(restrict_to(f, lo, hi), restrict_to(f, lo, hi)).real();
  out.truncation_mass = std::max(0.0, total - inside);
  if (out.truncation_mass > opts.max_truncation_mass) {
    std::ostringstream os;
    os << "function support extends beyond the geodesic range [" << lo << ", " << hi
       << "]; truncation mass " << out.truncation_mass;
    throw Error(Errc::RangeNotCovered, os.str());
  }
  const double h = frame.record.step();
  for (const auto& t : f.terms())
    for (double edge : {t.a, t.b})
      if (std::isfinite(edge) && edge > lo && edge < hi) {
        const double node = lo + std::round((edge - lo) / h) * h;
        if (std::abs(node - edge) > 1e-9 * std::max(1.0, std::abs(edge)))
          throw Error(Errc::GridMismatch, "segment endpoint " + std::to_string(edge) + " is not a grid node");
        out.breakpoints.push_back(node);
      }
  std::sort(out.breakpoints.begin(), out.breakpoints.end());
  out.breakpoints.erase(std::unique(out.breakpoints.begin(), out.breakpoints.end(),
                                    [h](double a, double b) { return std::abs(a - b) < 1e-3 * h; }),
                        out.breakpoints.end());
  out.s.reserve(frame.size());
  for (std::size_t k = 0; k < frame.size(); ++k) {
    CMat M = CMat::Zero(2 * n, 2 * n);
    M.topLeftCorner(n, n) = frame.frames[k].cast<cdouble>();
    M.bottomRightCorner(n, n) = frame.frames[k].cast<cdouble>();
    const CMat A = M * sg.mode_basis;
    const double s = frame.s(k);
    out.s.push_back(s);
    out.value.push_back(A * f(s));
    out.right.push_back(A * f.right_limit(s));
  }
  return out;
}

namespace {

// Weighted integral over nodes [i0, i1] of a smooth sampled function:
// composite Simpson, closed with Simpson 3/8 when the cell count is odd.
cdouble simpson(const std::vector<cdouble>& y, long i0, long i1, double h) {
  const long m = i1 - i0;
  if (m <= 0) return 0.0;
  if (m == 1) return 0.5 * h * (y[i0] + y[i1]);
  cdouble sum = 0.0;
  long end = i1;
  if (m % 2 == 1) {
    end = i1 - 3;
    sum += 3.0 * h / 8.0 * (y[end] + 3.0 * y[end + 1] + 3.0 * y[end + 2] + y[i1]);
  }
  for (long k = i0; k + 2 <= end; k += 2) sum += h / 3.0 * (y[k] + 4.0 * y[k + 1] + y[k + 2]);
  return sum;
}

}  // namespace

cdouble section_inner(const TransportFrame& frame, const SampledSection& a, const SampledSection& b) {
  if (a.s.size() != frame.size() || b.s.size() != frame.size())
    throw Error(Errc::GridMismatch, "sections are not sampled on the frame grid");
  const int n = frame.dim();
  const double h = frame.record.step();
  const double lo = frame.s(0);
  std::vector<double> br = a.breakpoints;
  br.insert(br.end(), b.breakpoints.begin(), b.breakpoints.end());
  std::vector<long> cuts{0};
  for (double x : br) cuts.push_back(std::lround((x - lo) / h));
  cuts.push_back(static_cast<long>(frame.size()) - 1);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  auto pointwise = [&](const CVec& x, const CVec& y, std::size_t k) {
    const CMat g = frame.metrics[k].cast<cdouble>();
    return cdouble(x.head(n).dot(g * y.head(n)) + x.tail(n).dot(g * y.tail(n)));
  };
  cdouble total = 0.0;
  std::vector<cdouble> y(frame.size());
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const long i0 = cuts[c], i1 = cuts[c + 1];
    for (long k = i0; k <= i1; ++k) {
      // right limit at the segment start, ordinary value elsewhere
      const CVec& x = k == i0 ? a.right[k] : a.value[k];
      const CVec& z = k == i0 ? b.right[k] : b.value[k];
      y[k] = pointwise(x, z, static_cast<std::size_t>(k));
    }
    total += simpson(y, i0, i1, h);
  }
  return total;
}

SampledSection transport_shift(const TransportFrame& frame, const SampledSection& g, double tau,
                               std::vector<bool>* valid) {
  if (g.s.size() != frame.size()) throw Error(Errc::GridMismatch, "section is not sampled on the frame grid");
  const int n = frame.dim();
  const double h = frame.record.step();
  const long shift = std::lround(tau / h);
  const long m = static_cast<long>(frame.size());
  SampledSection out;
  out.s = g.s;
  out.truncation_mass = g.truncation_mass;
  for (double x : g.breakpoints) out.breakpoints.push_back(x + static_cast<double>(shift) * h);
  if (valid) valid->assign(frame.size(), false);
  for (long k = 0; k < m; ++k) {
    const long src = k - shift;
    if (src < 0 || src >= m) {
      out.value.push_back(CVec::Zero(2 * n));
      out.right.push_back(CVec::Zero(2 * n));
      continue;
    }
    const CMat T = (frame.frames[k] * frame.inverse_frames[src]).cast<cdouble>();
    auto apply = [&](const CVec& v) {
      CVec r(2 * n);
      r.head(n) = T * v.head(n);
      r.tail(n) = T * v.tail(n);
      return r;
    };
    out.value.push_back(apply(g.value[src]));
    out.right.push_back(apply(g.right[src]));
    if (valid) (*valid)[k] = true;
  }
  return out;
}

}  // namespace geodev
