#include "geodev/geometry.hpp"

#include <cmath>
#include <sstream>

namespace geodev {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::UnsupportedName: return "UnsupportedName";
    case Errc::InvalidParams: return "InvalidParams";
    case Errc::EnergyBelowPotential: return "EnergyBelowPotential";
    case Errc::OutsideChart: return "OutsideChart";
    case Errc::IllConditionedMetric: return "IllConditionedMetric";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::LeftChart: return "LeftChart";
    case Errc::BlowUp: return "BlowUp";
    case Errc::NotUnitSpeed: return "NotUnitSpeed";
    case Errc::FrameDrift: return "FrameDrift";
    case Errc::GridMismatch: return "GridMismatch";
    case Errc::AsymmetryTooLarge: return "AsymmetryTooLarge";
    case Errc::GridExceeded: return "GridExceeded";
    case Errc::NotSymmetric: return "NotSymmetric";
    case Errc::EmptySubspace: return "EmptySubspace";
    case Errc::NotInSubspace: return "NotInSubspace";
    case Errc::DivergentIntegral: return "DivergentIntegral";
    case Errc::WrongTimeDirection: return "WrongTimeDirection";
    case Errc::RangeNotCovered: return "RangeNotCovered";
    case Errc::SpaceMismatch: return "SpaceMismatch";
    case Errc::NotContraction: return "NotContraction";
    case Errc::NotProjection: return "NotProjection";
    case Errc::WrongBranch: return "WrongBranch";
    case Errc::SOutOfRange: return "SOutOfRange";
    case Errc::TooLarge: return "TooLarge";
    case Errc::InvariantViolation: return "InvariantViolation";
    case Errc::ConfigParse: return "ConfigParse";
    case Errc::ConfigMissingKey: return "ConfigMissingKey";
    case Errc::ConfigInvalidValue: return "ConfigInvalidValue";
  }
  return "Unknown";
}

Mat Christoffel::along(const Vec& a) const {
  Mat m = Mat::Zero(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k) m(i, k) += (*this)(i, j, k) * a[j];
  return m;
}

BuiltinManifold parse_builtin_name(std::string_view name) {
  if (name == "flat") return BuiltinManifold::Flat;
  if (name == "sphere") return BuiltinManifold::Sphere;
  if (name == "hyperbolic") return BuiltinManifold::Hyperbolic;
  throw Error(Errc::UnsupportedName, "unknown built-in manifold '" + std::string(name) + "'");
}

std::string_view to_string(BuiltinManifold m) noexcept {
  switch (m) {
    case BuiltinManifold::Flat: return "flat";
    case BuiltinManifold::Sphere: return "sphere";
    case BuiltinManifold::Hyperbolic: return "hyperbolic";
  }
  return "unknown";
}

namespace {

Riemann constant_curvature_riemann(const Mat& g, double K) {
  const int n = static_cast<int>(g.rows());
  Riemann r(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          r(i, j, k, l) = K * ((i == k ? g(l, j) : 0.0) - (i == l ? g(k, j) : 0.0));
  return r;
}

Mat sphere_metric(const Vec& x, double K) {
  const int n = static_cast<int>(x.size());
  Mat g = Mat::Zero(n, n);
  double w = 1.0 / K;
  for (int i = 0; i < n; ++i) {
    g(i, i) = w;
    const double s = std::sin(x[i]);
    w *= s * s;
  }
  return g;
}

Christoffel sphere_christoffel(const Vec& x, double K) {
  const int n = static_cast<int>(x.size());
  const Mat g = sphere_metric(x, K);
  // d_k log g_ii = 2 cot x_k for k < i
  auto dlog = [&](int i, int k) { return k < i ? 2.0 * std::cos(x[k]) / std::sin(x[k]) : 0.0; };
  Christoffel c(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      c(i, i, j) += 0.5 * dlog(i, j);
      if (j != i) {
        c(i, j, i) += 0.5 * dlog(i, j);
        c(i, j, j) += -0.5 * g(j, j) / g(i, i) * dlog(j, i);
      }
    }
  }
  return c;
}

Christoffel conformal_christoffel(const Vec& dsigma) {
  const int n = static_cast<int>(dsigma.size());
  Christoffel c(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        c(i, j, k) = (i == j ? dsigma[k] : 0.0) + (i == k ? dsigma[j] : 0.0) - (j == k ? dsigma[i] : 0.0);
  return c;
}

Christoffel christoffel_fd(const MetricModel& model, const Vec& x) {
  const int n = model.dim;
  const double h = model.fd.step;
  std::vector<Mat> dg(n);
  for (int m = 0; m < n; ++m) {
    Vec xp = x, xm = x;
    xp[m] += h;
    xm[m] -= h;
    dg[m] = (model.metric_at(xp) - model.metric_at(xm)) / (2.0 * h);
  }
  const Mat ginv = model.metric_at(x).inverse();
  Christoffel c(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += ginv(i, l) * (dg[j](l, k) + dg[k](l, j) - dg[l](j, k));
        c(i, j, k) = 0.5 * s;
        c(i, k, j) = 0.5 * s;
      }
  return c;
}

Christoffel christoffel_raw(const MetricModel& model, const Vec& x) {
  return model.christoffel ? model.christoffel(x) : christoffel_fd(model, x);
}

Riemann riemann_from_christoffel(const MetricModel& model, const Vec& x, const Christoffel& gamma) {
  const int n = model.dim;
  const double h = model.fd.riemann_step;
  std::vector<Christoffel> dgamma;
  dgamma.reserve(n);
  for (int m = 0; m < n; ++m) {
    Vec p1 = x, p2 = x, m1 = x, m2 = x;
    p1[m] += h;
    p2[m] += 2 * h;
    m1[m] -= h;
    m2[m] -= 2 * h;
    const Christoffel a = christoffel_raw(model, p2), b = christoffel_raw(model, p1);
    const Christoffel c = christoffel_raw(model, m1), d = christoffel_raw(model, m2);
    Christoffel dm(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          dm(i, j, k) = (-a(i, j, k) + 8.0 * b(i, j, k) - 8.0 * c(i, j, k) + d(i, j, k)) / (12.0 * h);
    dgamma.push_back(std::move(dm));
  }
  Riemann r(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double v = dgamma[k](i, j, l) - dgamma[l](i, j, k);
          for (int m = 0; m < n; ++m) v += gamma(i, k, m) * gamma(m, j, l) - gamma(i, l, m) * gamma(m, j, k);
          r(i, j, k, l) = v;
        }
  return r;
}

void check_point(const MetricModel& model, const Vec& x) {
  if (x.size() != model.dim)
    throw Error(Errc::DimensionMismatch, "point has " + std::to_string(x.size()) + " coordinates, model '" +
                                             model.name + "' has dimension " + std::to_string(model.dim));
  if (!model.contains(x)) {
    std::ostringstream os;
    os << "point (" << x.transpose() << ") outside chart of '" << model.name << "'";
    throw Error(model.domain_error, os.str());
  }
}

}  // namespace

MetricModel build_builtin_manifold(BuiltinManifold which, const BuiltinParams& params) {
  const int n = params.dim;
  if (n < 2) throw Error(Errc::InvalidParams, "dimension must be >= 2, got " + std::to_string(n));
  MetricModel m;
  m.dim = n;
  switch (which) {
    case BuiltinManifold::Flat: {
      m.name = "flat";
      m.metric_at = [n](const Vec&) { return Mat(Mat::Identity(n, n)); };
      m.christoffel = [n](const Vec&) { return Christoffel(n); };
      m.riemann = [n](const Vec&) { return Riemann(n); };
      m.declared_curvature = 0.0;
      break;
    }
    case BuiltinManifold::Sphere: {
      const double K = params.curvature;
      if (!(K > 0.0)) throw Error(Errc::InvalidParams, "sphere requires curvature > 0");
      m.name = "sphere";
      m.metric_at = [K](const Vec& x) { return sphere_metric(x, K); };
      m.christoffel = [K](const Vec& x) { return sphere_christoffel(x, K); };
      m.riemann = [K](const Vec& x) { return constant_curvature_riemann(sphere_metric(x, K), K); };
      m.chart_domain = [](const Vec& x) {
        constexpr double pole_margin = 1e-6;
        for (int i = 0; i + 1 < x.size(); ++i)
          if (!(x[i] > pole_margin && x[i] < kPi - pole_margin)) return false;
        return x.allFinite();
      };
      m.declared_curvature = K;
      break;
    }
    case BuiltinManifold::Hyperbolic: {
      const double K = params.curvature;
      if (!(K < 0.0)) throw Error(Errc::InvalidParams, "hyperbolic requires curvature < 0");
      const double scale = 1.0 / std::abs(K);
      m.name = "hyperbolic";
      m.metric_at = [n, scale](const Vec& x) {
        const double y = x[n - 1];
        return Mat(Mat::Identity(n, n) * (scale / (y * y)));
      };
      m.christoffel = [n](const Vec& x) {
        Vec ds = Vec::Zero(n);
        ds[n - 1] = -1.0 / x[n - 1];
        return conformal_christoffel(ds);
      };
      m.riemann = [n, scale, K](const Vec& x) {
        const double y = x[n - 1];
        return constant_curvature_riemann(Mat::Identity(n, n) * (scale / (y * y)), K);
      };
      m.chart_domain = [n](const Vec& x) { return x.allFinite() && x[n - 1] > 0.0; };
      m.declared_curvature = K;
      break;
    }
  }
  return m;
}

MetricModel build_builtin_manifold(std::string_view name, const BuiltinParams& params) {
  return build_builtin_manifold(parse_builtin_name(name), params);
}

MetricModel jacobi_metric_from_potential(std::function<double(const Vec&)> potential, double energy, int dim,
                                         double eps_energy) {
  if (dim < 1) throw Error(Errc::InvalidParams, "dimension must be positive");
  MetricModel m;
  m.name = "jacobi";
  m.dim = dim;
  m.domain_error = Errc::EnergyBelowPotential;
  m.metric_at = [potential, energy, dim, eps_energy](const Vec& x) {
    const double kinetic = energy - potential(x);
    if (!(kinetic > eps_energy)) {
      std::ostringstream os;
      os << "E - V = " << kinetic << " at (" << x.transpose() << ")";
      throw Error(Errc::EnergyBelowPotential, os.str());
    }
    return Mat(Mat::Identity(dim, dim) * (2.0 * kinetic));
  };
  m.chart_domain = [potential, energy, eps_energy](const Vec& x) {
    return x.allFinite() && energy - potential(x) > eps_energy;
  };
  return m;
}

MetricModel jacobi_metric_from_potential(const Expression& potential, double energy, double eps_energy) {
  MetricModel m = jacobi_metric_from_potential([potential](const Vec& x) { return potential(x); }, energy,
                                               potential.num_vars(), eps_energy);
  m.name = "jacobi[" + potential.source() + "]";
  return m;
}

Mat metric_checked(const MetricModel& model, const Vec& x) {
  check_point(model, x);
  const Mat g = model.metric_at(x);
  const double gnorm = g.norm();
  if ((g - g.transpose()).norm() > 1e-12 * gnorm)
    throw Error(Errc::IllConditionedMetric, "metric of '" + model.name + "' is not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > model.condition_bound) {
    std::ostringstream os;
    os << "metric eigenvalues [" << lo << ", " << hi << "] exceed condition bound " << model.condition_bound;
    throw Error(Errc::IllConditionedMetric, os.str());
  }
  return g;
}

Christoffel christoffel_at(const MetricModel& model, const Vec& x) {
  check_point(model, x);
  return christoffel_raw(model, x);
}

LocalGeometry geometry_at(const MetricModel& model, const Vec& x) {
  LocalGeometry loc;
  loc.point = x;
  loc.g = metric_checked(model, x);
  loc.gamma = christoffel_raw(model, x);
  loc.riemann = model.riemann ? model.riemann(x) : riemann_from_christoffel(model, x, loc.gamma);
  return loc;
}

Vec curvature_transform(const LocalGeometry& loc, const Vec& X, const Vec& Y, const Vec& Z) {
  const int n = loc.dim();
  if (X.size() != n || Y.size() != n || Z.size() != n)
    throw Error(Errc::DimensionMismatch, "curvature_transform expects vectors of length " + std::to_string(n));
  Vec out = Vec::Zero(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) out[i] += loc.riemann(i, j, k, l) * X[k] * Y[l] * Z[j];
  return out;
}

double sectional_curvature(const LocalGeometry& loc, const Vec& X, const Vec& Y) {
  const double num = loc.inner(curvature_transform(loc, X, Y, Y), X);
  const double xy = loc.inner(X, Y);
  const double den = loc.inner(X, X) * loc.inner(Y, Y) - xy * xy;
  return num / den;
}

double torsion_residual(const Christoffel& gamma) {
  const int n = gamma.dim();
  double r = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) r = std::max(r, std::abs(gamma(i, j, k) - gamma(i, k, j)));
  return r;
}

double bianchi_residual(const Riemann& riemann) {
  const int n = riemann.dim();
  double r = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          r = std::max(r, std::abs(riemann(i, j, k, l) + riemann(i, k, l, j) + riemann(i, l, j, k)));
  return r;
}

}  // namespace geodev
