#include "geodev/geodesic_flow.hpp"

#include <cmath>
#include <sstream>

#include "geodev/ode.hpp"

namespace geodev {

int GeodesicRecord::index_of(double s) const {
  const double h = meta.step;
  const long k = std::lround(s / h) + origin;
  if (k < 0 || k >= static_cast<long>(samples.size()) || std::abs(samples[k].s - s) > 1e-3 * h)
    throw Error(Errc::GridMismatch, "arc length " + std::to_string(s) + " is not a grid node");
  return static_cast<int>(k);
}

namespace {

struct Grid {
  double h;
  int n_back;
  int n_fwd;
};

Grid make_grid(double s_min, double s_max, double step) {
  if (!(s_min <= 0.0 && s_max >= 0.0) || !(step > 0.0))
    throw Error(Errc::InvalidParams, "arc-length span must contain 0 and step must be positive");
  Grid g{step, 0, 0};
  if (s_max > 0.0) {
    g.n_fwd = static_cast<int>(std::ceil(s_max / step - 1e-9));
    g.h = s_max / g.n_fwd;
  } else if (s_min < 0.0) {
    g.n_back = static_cast<int>(std::ceil(-s_min / step - 1e-9));
    g.h = -s_min / g.n_back;
  }
  if (s_min < 0.0) g.n_back = static_cast<int>(std::ceil(-s_min / g.h - 1e-9));
  return g;
}

// Integrates y' = f(s, y) from s = 0 both ways on the grid. `check` is called
// at each accepted node and may throw.
template <typename Rhs, typename Check>
std::vector<Vec> integrate_both_ways(const Rhs& f, const Vec& y0, const Grid& grid, const Check& check) {
  std::vector<Vec> fwd{y0}, back{y0};
  for (int k = 0; k < grid.n_fwd; ++k) {
    const double s = k * grid.h;
    fwd.push_back(rk4_step(f, s, fwd.back(), grid.h));
    check((k + 1) * grid.h, fwd.back());
  }
  for (int k = 0; k < grid.n_back; ++k) {
    const double s = -k * grid.h;
    back.push_back(rk4_step(f, s, back.back(), -grid.h));
    check(-(k + 1) * grid.h, back.back());
  }
  std::vector<Vec> out;
  out.reserve(fwd.size() + back.size() - 1);
  for (int k = grid.n_back; k >= 1; --k) out.push_back(back[k]);
  for (auto& y : fwd) out.push_back(std::move(y));
  return out;
}

// Evaluates the connection; chart exits inside RK stages are reported as LeftChart.
Christoffel connection(const MetricModel& model, const Vec& x, double s) {
  if (!model.contains(x) || !x.allFinite()) {
    std::ostringstream os;
    os << "trajectory left the chart of '" << model.name << "' near s = " << s;
    throw Error(Errc::LeftChart, os.str());
  }
  return christoffel_at(model, x);
}

auto node_check(const MetricModel& model, int n, double blowup) {
  return [&model, n, blowup](double s, const Vec& y) {
    const Vec x = y.head(n);
    if (!y.allFinite() || y.segment(n, n).norm() > blowup) {
      std::ostringstream os;
      os << "step collapse / blow-up at s = " << s;
      throw Error(Errc::BlowUp, os.str());
    }
    if (!model.contains(x)) {
      std::ostringstream os;
      os << "trajectory left the chart of '" << model.name << "' at s = " << s;
      throw Error(Errc::LeftChart, os.str());
    }
  };
}

std::vector<Vec> run_geodesic(const MetricModel& model, const Vec& p0, const Vec& v0, const Grid& grid,
                              double blowup) {
  const int n = model.dim;
  auto rhs = [&model, n](double s, const Vec& y) {
    const Vec x = y.head(n);
    const Vec v = y.segment(n, n);
    Vec dy(2 * n);
    dy.head(n) = v;
    dy.segment(n, n) = -connection(model, x, s).contract(v, v);
    return dy;
  };
  Vec y0(2 * n);
  y0 << p0, v0;
  return integrate_both_ways(rhs, y0, grid, node_check(model, n, blowup));
}

}  // namespace

GeodesicRecord integrate_geodesic(const MetricModel& model, const Vec& p0, const Vec& v0, double s_min,
                                  double s_max, const IntegratorOptions& opts) {
  const int n = model.dim;
  if (p0.size() != n || v0.size() != n) throw Error(Errc::DimensionMismatch, "p0/v0 dimension mismatch");
  const Mat g0 = metric_checked(model, p0);
  const double speed = std::sqrt(v0.dot(g0 * v0));
  GeodesicRecord rec;
  rec.model = model;
  Vec v = v0;
  if (std::abs(speed - 1.0) > 1e-12) {
    if (std::abs(speed - 1.0) > opts.unit_speed_slack)
      throw Error(Errc::NotUnitSpeed, "initial speed " + std::to_string(speed) + " is not within " +
                                          std::to_string(opts.unit_speed_slack) + " of 1");
    v /= speed;
    rec.meta.normalized_initial = true;
  }
  const Grid grid = make_grid(s_min, s_max, opts.step);
  const std::vector<Vec> ys = run_geodesic(model, p0, v, grid, opts.blowup_speed);
  rec.meta.step = grid.h;
  rec.origin = grid.n_back;
  rec.samples.reserve(ys.size());
  for (std::size_t k = 0; k < ys.size(); ++k) {
    const double s = (static_cast<int>(k) - grid.n_back) * grid.h;
    rec.samples.push_back({s, ys[k].head(n), ys[k].segment(n, n)});
    const Vec& vk = rec.samples.back().v;
    rec.meta.speed_defect =
        std::max(rec.meta.speed_defect, std::abs(vk.dot(model.metric_at(rec.samples.back().x) * vk) - 1.0));
  }
  rec.s_min = rec.samples.front().s;
  rec.s_max = rec.samples.back().s;

  if (opts.verify_refinement) {
    const Grid fine{grid.h / 2, grid.n_back * 2, grid.n_fwd * 2};
    const std::vector<Vec> yf = run_geodesic(model, p0, v, fine, opts.blowup_speed);
    for (std::size_t k = 0; k < ys.size(); ++k)
      rec.meta.refinement_error =
          std::max(rec.meta.refinement_error, (ys[k].head(n) - yf[2 * k].head(n)).cwiseAbs().maxCoeff());
  }
  return rec;
}

Mat orthonormal_frame(const Mat& g, const Vec& tangent) {
  const int n = static_cast<int>(g.rows());
  Mat frame(n, n);
  int filled = 0;
  auto try_add = [&](Vec w) {
    for (int j = 0; j < filled; ++j) w -= frame.col(j).dot(g * w) * frame.col(j);
    // second pass for numerical orthogonality
    for (int j = 0; j < filled; ++j) w -= frame.col(j).dot(g * w) * frame.col(j);
    const double norm = std::sqrt(w.dot(g * w));
    if (norm < 1e-8) return;
    frame.col(filled++) = w / norm;
  };
  try_add(tangent);
  for (int i = 0; i < n && filled < n; ++i) try_add(Vec::Unit(n, i));
  return frame;
}

TransportFrame transport_frame(const MetricModel& model, const GeodesicRecord& record, const TransportOptions& opts) {
  const int n = model.dim;
  const GeodesicSample& origin = record.samples.at(record.origin);
  TransportFrame tf;
  tf.record = record;
  tf.base_frame = orthonormal_frame(metric_checked(model, origin.x), origin.v);

  // augmented state (x, v, X_1..X_n)
  auto rhs = [&model, n](double s, const Vec& y) {
    const Vec x = y.head(n);
    const Vec v = y.segment(n, n);
    const Christoffel c = connection(model, x, s);
    Vec dy(y.size());
    dy.head(n) = v;
    dy.segment(n, n) = -c.contract(v, v);
    const Mat a = c.along(v);
    for (int j = 0; j < n; ++j) dy.segment(2 * n + j * n, n) = -a * y.segment(2 * n + j * n, n);
    return dy;
  };
  Vec y0(2 * n + n * n);
  y0.head(n) = origin.x;
  y0.segment(n, n) = origin.v;
  for (int j = 0; j < n; ++j) y0.segment(2 * n + j * n, n) = tf.base_frame.col(j);
  const Grid grid{record.meta.step, record.origin, static_cast<int>(record.size()) - 1 - record.origin};
  const std::vector<Vec> ys = integrate_both_ways(rhs, y0, grid, node_check(model, n, 1e300));

  const Mat reference = tf.base_frame.transpose() * model.metric_at(origin.x) * tf.base_frame;
  tf.frames.reserve(ys.size());
  for (std::size_t k = 0; k < ys.size(); ++k) {
    Mat phi(n, n);
    for (int j = 0; j < n; ++j) phi.col(j) = ys[k].segment(2 * n + j * n, n);
    const Mat g = model.metric_at(record.samples[k].x);
    if (opts.reorthonormalize) {
      // Loewdin: Phi (Phi^T g Phi)^{-1/2}
      Eigen::SelfAdjointEigenSolver<Mat> es(phi.transpose() * g * phi);
      phi = phi * es.operatorInverseSqrt();
    }
    const double drift = (phi.transpose() * g * phi - reference).cwiseAbs().maxCoeff();
    if (drift > tf.max_drift) {
      tf.max_drift = drift;
      tf.drift_at = record.samples[k].s;
    }
    tf.inverse_frames.push_back(phi.inverse());
    tf.frames.push_back(std::move(phi));
    tf.metrics.push_back(g);
  }
  if (tf.max_drift > opts.drift_factor * opts.tolerance) {
    std::ostringstream os;
    os << "frame isometry drift " << tf.max_drift << " at s = " << tf.drift_at;
    throw Error(Errc::FrameDrift, os.str());
  }
  return tf;
}

std::vector<Vec> covariant_derivative(const GeodesicRecord& record, const std::vector<Vec>& field) {
  const std::size_t m = record.size();
  if (field.size() != m) throw Error(Errc::GridMismatch, "field/record size mismatch");
  if (m < 3) throw Error(Errc::GridMismatch, "need at least three samples");
  const double h = record.step();
  std::vector<Vec> out(m);
  for (std::size_t k = 0; k < m; ++k) {
    Vec d;
    if (k == 0) d = (-3.0 * field[0] + 4.0 * field[1] - field[2]) / (2 * h);
    else if (k == m - 1) d = (3.0 * field[m - 1] - 4.0 * field[m - 2] + field[m - 3]) / (2 * h);
    else d = (field[k + 1] - field[k - 1]) / (2 * h);
    const auto& smp = record.samples[k];
    out[k] = d + christoffel_at(record.model, smp.x).contract(smp.v, field[k]);
  }
  return out;
}

}  // namespace geodev
