#pragma once

#include <vector>

#include "geodev/geometry.hpp"

namespace geodev {

struct IntegratorOptions {
  double step = 1e-3;
  bool verify_refinement = true;  ///< re-run at step/2 and record the difference
  double unit_speed_slack = 0.1;  ///< |speed - 1| accepted (and normalized) up to this
  double blowup_speed = 1e12;     ///< coordinate speed treated as step collapse
};

struct GeodesicSample {
  double s;
  Vec x;
  Vec v;
};

struct IntegratorMeta {
  int order = 4;
  double step = 0.0;             ///< effective uniform spacing
  double refinement_error = 0;   ///< max |x_h - x_{h/2}| on shared nodes (0 when not run)
  double speed_defect = 0;       ///< max |g(v,v) - 1|
  bool normalized_initial = false;
};

/// Unit-speed geodesic sampled on a uniform grid that contains s = 0.
struct GeodesicRecord {
  MetricModel model;
  std::vector<GeodesicSample> samples;  ///< ascending in s
  int origin = 0;                       ///< index of s = 0
  double s_min = 0.0;
  double s_max = 0.0;
  IntegratorMeta meta;

  std::size_t size() const noexcept { return samples.size(); }
  double step() const noexcept { return meta.step; }
  /// Index of the sample at arc length s (must lie on the grid within step/1000).
  int index_of(double s) const;
};

GeodesicRecord integrate_geodesic(const MetricModel& model, const Vec& p0, const Vec& v0, double s_min,
                                  double s_max, const IntegratorOptions& opts = {});

struct TransportOptions {
  double tolerance = 1e-8;   ///< isometry tolerance; FrameDrift above 10x this
  double drift_factor = 10.0;
  bool reorthonormalize = false;
};

/// Parallel-transported orthonormal frames Phi(s) along a geodesic. Column j of
/// Phi(s) is the transport of base vector j (coordinates at gamma(s)); column 0
/// is the transported unit tangent.
struct TransportFrame {
  GeodesicRecord record;
  Mat base_frame;
  std::vector<Mat> frames;
  std::vector<Mat> inverse_frames;
  std::vector<Mat> metrics;  ///< g(gamma(s)) at each sample
  double max_drift = 0.0;    ///< max |Phi^T g Phi - Phi0^T g0 Phi0|
  double drift_at = 0.0;

  int dim() const noexcept { return static_cast<int>(base_frame.rows()); }
  std::size_t size() const noexcept { return frames.size(); }
  double s(std::size_t k) const { return record.samples[k].s; }
};

/// Gram-Schmidt against g at p0, seeded with the tangent.
Mat orthonormal_frame(const Mat& g, const Vec& tangent);

TransportFrame transport_frame(const MetricModel& model, const GeodesicRecord& record,
                               const TransportOptions& opts = {});

enum class WDirection { Push, Pull };

/// Pointwise W_gamma (push: Phi(s) a(s)) or its inverse (pull: Phi(s)^{-1} X(s)).
template <typename Scalar>
std::vector<VectorX<Scalar>> map_w_gamma(const TransportFrame& frame, const std::vector<VectorX<Scalar>>& field,
                                         WDirection direction) {
  if (field.size() != frame.size())
    throw Error(Errc::GridMismatch, "field has " + std::to_string(field.size()) + " samples, frame has " +
                                        std::to_string(frame.size()));
  std::vector<VectorX<Scalar>> out;
  out.reserve(field.size());
  for (std::size_t k = 0; k < field.size(); ++k) {
    const Mat& m = direction == WDirection::Push ? frame.frames[k] : frame.inverse_frames[k];
    if (field[k].size() != m.cols()) throw Error(Errc::GridMismatch, "field dimension does not match frame");
    out.push_back(m.template cast<Scalar>() * field[k]);
  }
  return out;
}

/// Covariant derivative along the geodesic of a sampled vector field:
/// central differences of the components plus Gamma(v, X). End samples use
/// one-sided second-order stencils.
std::vector<Vec> covariant_derivative(const GeodesicRecord& record, const std::vector<Vec>& field);

}  // namespace geodev
