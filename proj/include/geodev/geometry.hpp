#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geodev/error.hpp"
#include "geodev/expression.hpp"
#include "geodev/types.hpp"

namespace geodev {

/// Connection coefficients Gamma^i_{jk}, stored densely.
class Christoffel {
 public:
  Christoffel() = default;
  explicit Christoffel(int n) : n_(n), data_(static_cast<std::size_t>(n) * n * n, 0.0) {}

  int dim() const noexcept { return n_; }
  double& operator()(int i, int j, int k) { return data_[(static_cast<std::size_t>(i) * n_ + j) * n_ + k]; }
  double operator()(int i, int j, int k) const { return data_[(static_cast<std::size_t>(i) * n_ + j) * n_ + k]; }

  /// Gamma^i_{jk} a^j b^k.
  template <typename Derived1, typename Derived2>
  auto contract(const Eigen::MatrixBase<Derived1>& a, const Eigen::MatrixBase<Derived2>& b) const {
    using Scalar = typename Derived2::Scalar;
    VectorX<Scalar> out = VectorX<Scalar>::Zero(n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k) out[i] += (*this)(i, j, k) * a[j] * b[k];
    return out;
  }

  /// Matrix M with M(i,k) = Gamma^i_{jk} a^j, so that Gamma(a, b) = M b.
  Mat along(const Vec& a) const;

 private:
  int n_ = 0;
  std::vector<double> data_;
};

/// Riemann tensor R^i_{jkl} with R(d_k, d_l) d_j = R^i_{jkl} d_i.
class Riemann {
 public:
  Riemann() = default;
  explicit Riemann(int n) : n_(n), data_(static_cast<std::size_t>(n) * n * n * n, 0.0) {}

  int dim() const noexcept { return n_; }
  double& operator()(int i, int j, int k, int l) { return data_[idx(i, j, k, l)]; }
  double operator()(int i, int j, int k, int l) const { return data_[idx(i, j, k, l)]; }

 private:
  std::size_t idx(int i, int j, int k, int l) const {
    return ((static_cast<std::size_t>(i) * n_ + j) * n_ + k) * n_ + l;
  }
  int n_ = 0;
  std::vector<double> data_;
};

enum class BuiltinManifold { Flat, Sphere, Hyperbolic };

BuiltinManifold parse_builtin_name(std::string_view name);
std::string_view to_string(BuiltinManifold m) noexcept;

struct FiniteDifferenceSpec {
  double step = 1e-5;          ///< central-difference step for metric derivatives
  double riemann_step = 1e-3;  ///< step for differentiating Christoffels (4th order stencil)
};

/// A Riemannian metric on a single chart together with its connection and
/// curvature providers. Either provider may be analytic; missing ones are
/// derived by finite differences.
struct MetricModel {
  using MetricFn = std::function<Mat(const Vec&)>;
  using ChristoffelFn = std::function<Christoffel(const Vec&)>;
  using RiemannFn = std::function<Riemann(const Vec&)>;
  using DomainFn = std::function<bool(const Vec&)>;

  std::string name;
  int dim = 0;
  MetricFn metric_at;
  ChristoffelFn christoffel;  ///< empty: finite differences of metric_at
  RiemannFn riemann;          ///< empty: derived from the Christoffel provider
  DomainFn chart_domain;
  Errc domain_error = Errc::OutsideChart;
  FiniteDifferenceSpec fd;
  double condition_bound = 1e12;
  std::optional<double> declared_curvature;

  bool analytic() const noexcept { return static_cast<bool>(christoffel) && static_cast<bool>(riemann); }
  bool contains(const Vec& x) const { return !chart_domain || chart_domain(x); }
};

struct BuiltinParams {
  int dim = 2;
  double curvature = 1.0;  ///< sectional curvature K; ignored for flat
};

struct LocalGeometry {
  Vec point;
  Mat g;
  Christoffel gamma;
  Riemann riemann;

  int dim() const noexcept { return static_cast<int>(point.size()); }
  double inner(const Vec& a, const Vec& b) const { return a.dot(g * b); }
};

/// Built-in constant-curvature fixtures.
///   flat:       Cartesian chart, g = I.
///   sphere:     hyperspherical angles (theta_1..theta_{n-1}, phi),
///               g = K^{-1}(dtheta_1^2 + sin^2 theta_1 dtheta_2^2 + ...);
///               poles excluded from the chart.
///   hyperbolic: upper half space x_n > 0, g = I / (|K| x_n^2).
MetricModel build_builtin_manifold(BuiltinManifold which, const BuiltinParams& params);
MetricModel build_builtin_manifold(std::string_view name, const BuiltinParams& params);

/// Jacobi metric g = 2(E - V) I of a natural Hamiltonian with unit mass.
/// Providers are finite-difference; the chart is {x : E - V(x) > eps_energy}.
MetricModel jacobi_metric_from_potential(std::function<double(const Vec&)> potential, double energy,
                                         int dim, double eps_energy = 1e-9);
MetricModel jacobi_metric_from_potential(const Expression& potential, double energy,
                                         double eps_energy = 1e-9);

/// Metric with validation of chart membership, symmetry and conditioning.
Mat metric_checked(const MetricModel& model, const Vec& x);

Christoffel christoffel_at(const MetricModel& model, const Vec& x);

LocalGeometry geometry_at(const MetricModel& model, const Vec& x);

/// R_p(X, Y) Z = R^i_{jkl} X^k Y^l Z^j d_i.
Vec curvature_transform(const LocalGeometry& loc, const Vec& X, const Vec& Y, const Vec& Z);

/// <R(X,Y)Y, X> / (|X|^2 |Y|^2 - <X,Y>^2).
double sectional_curvature(const LocalGeometry& loc, const Vec& X, const Vec& Y);

/// max |Gamma^i_{jk} - Gamma^i_{kj}|.
double torsion_residual(const Christoffel& gamma);

/// max |R^i_{jkl} + R^i_{klj} + R^i_{ljk}|.
double bianchi_residual(const Riemann& riemann);

}  // namespace geodev
