#include "geodev/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

namespace geodev {

namespace {

// Runs one stage, prefixing failures with its name.
template <typename F>
auto stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.code(), std::string("stage ") + name + ": " + e.message());
  }
}

json check(const std::string& name, const std::string& op, double value, double tolerance) {
  return {{"name", name}, {"op", op}, {"value", value}, {"tolerance", tolerance}, {"pass", value <= tolerance}};
}

std::string out_path(const PipelineConfig& c, const PipelineOptions& o, const std::string& file) {
  return (std::filesystem::path(o.out_dir.value_or(c.output.directory)) / file).string();
}

bool wants(const PipelineConfig& c, const std::string& fmt) {
  for (const auto& f : c.output.formats)
    if (f == fmt) return true;
  return false;
}

json tolerances(const PipelineOptions& o, double step, const TransportOptions& t) {
  return {{"profile", o.strict ? "strict" : "default"},
          {"step", step},
          {"frame_isometry", t.tolerance},
          {"frame_drift_factor", t.drift_factor},
          {"eps_kernel_factor", 1e-9},
          {"generating_function", 1e-10}};
}

}  // namespace

MetricModel build_model(const PipelineConfig::Manifold& manifold) {
  if (!manifold.builtin.empty()) return build_builtin_manifold(manifold.builtin, {manifold.dim, manifold.curvature});
  return jacobi_metric_from_potential(Expression::parse(manifold.potential, manifold.dim), manifold.energy);
}

AnalyzeResult run_analyze(const PipelineConfig& config, const PipelineOptions& opts) {
  AnalyzeResult r;
  const int n = config.manifold.dim;
  double step = opts.step.value_or(config.geodesic.step);
  if (opts.strict) step *= 0.5;
  TransportOptions topts;
  if (opts.strict) topts.drift_factor = 1.0;

  r.model = stage("geometry", [&] { return build_model(config.manifold); });
  const Vec p0 = Eigen::Map<const Vec>(config.geodesic.p0.data(), n);
  const Vec v0 = Eigen::Map<const Vec>(config.geodesic.v0.data(), n);
  const GeodesicRecord record = stage("geodesic_flow", [&] {
    IntegratorOptions io;
    io.step = step;
    return integrate_geodesic(r.model, p0, v0, config.geodesic.s_min, config.geodesic.s_max, io);
  });
  r.frame = stage("geodesic_flow", [&] { return transport_frame(r.model, record, topts); });
  r.path = stage("deviation", [&] { return curvature_operator_path(r.model, r.frame); });
  r.adiabaticity = adiabaticity_profile(r.path);

  const int k_freeze = stage("spectral_split", [&] { return record.index_of(config.freeze_s); });
  r.split = stage("spectral_split", [&] { return decompose_modes(r.path.R[k_freeze], {}, r.path.s[k_freeze]); });

  // deviation trajectory: default J(0) = 0, J'(0) = first normal direction
  Vec j0 = Vec::Zero(n), dj0 = Vec::Unit(n, 1);
  if (!config.deviation.j0.empty()) j0 = Eigen::Map<const Vec>(config.deviation.j0.data(), n);
  if (!config.deviation.dj0.empty()) dj0 = Eigen::Map<const Vec>(config.deviation.dj0.data(), n);
  CVec z0(2 * n);
  z0 << j0.cast<cdouble>(), dj0.cast<cdouble>();
  r.oscillator = stage("deviation", [&] { return solve_deviation_system(r.path, z0); });
  r.covariant_pulled = stage("deviation", [&] {
    const Mat& phi0 = r.frame.frames[record.origin];
    return to_oscillator_frame(r.frame, solve_jacobi_covariant(r.model, r.frame, phi0 * j0, phi0 * dj0));
  });
  double equivalence = 0.0;
  for (std::size_t k = 0; k < r.oscillator.size(); ++k)
    equivalence = std::max(equivalence, (r.oscillator.z[k] - r.covariant_pulled.z[k]).cwiseAbs().maxCoeff());

  json& rep = r.report;
  rep["command"] = "analyze";
  rep["version"] = kVersion;
  rep["config"] = serialize_config(config);
  rep["tolerances"] = tolerances(opts, record.step(), topts);
  rep["geodesic"] = {{"op", "integrate_geodesic"},
                     {"samples", record.size()},
                     {"step", record.step()},
                     {"s_min", record.s_min},
                     {"s_max", record.s_max},
                     {"order", record.meta.order},
                     {"refinement_error", record.meta.refinement_error},
                     {"speed_defect", record.meta.speed_defect},
                     {"normalized_initial", record.meta.normalized_initial}};
  rep["transport"] = {{"op", "transport_frame"}, {"max_drift", r.frame.max_drift}, {"drift_at", r.frame.drift_at}};
  rep["operator_path"] = {{"op", "curvature_operator_path"},
                          {"symmetrization_defect", r.path.symmetrization_defect},
                          {"tangential_residual", r.path.tangential_residual}};
  rep["adiabaticity"] = {{"op", "adiabaticity_profile"},
                         {"max", r.adiabaticity.max},
                         {"mean", r.adiabaticity.mean},
                         {"eps0", 1e-9}};
  rep["modes"] = mode_split_json(r.split);
  rep["checks"] = json::array({
      check("unit_speed", "integrate_geodesic", record.meta.speed_defect, 1e-8),
      check("frame_isometry", "transport_frame", r.frame.max_drift, topts.tolerance * topts.drift_factor),
      check("tangential_zero_mode", "curvature_operator_path", r.path.tangential_residual, 1e-6),
      check("operator_symmetry", "curvature_operator_path", r.path.symmetrization_defect, 1e-6),
      check("unitary_equivalence", "solve_jacobi_covariant", equivalence, 1e-6),
  });

  if (opts.write_files) {
    if (wants(config, "json")) {
      write_file_atomic(out_path(config, opts, "report.json"), rep.dump(2) + "\n");
      write_file_atomic(out_path(config, opts, "modes.json"), rep["modes"].dump(2) + "\n");
    }
    if (wants(config, "csv")) {
      write_file_atomic(out_path(config, opts, "geodesic.csv"), geodesic_csv(r.frame));
      write_file_atomic(out_path(config, opts, "adiabaticity.csv"), adiabaticity_csv(r.adiabaticity));
      write_file_atomic(out_path(config, opts, "trajectory_oscillator.csv"), trajectory_csv(r.oscillator));
      write_file_atomic(out_path(config, opts, "trajectory_covariant.csv"), trajectory_csv(r.covariant_pulled));
    }
  }
  return r;
}

json run_quantize(const PipelineConfig& config, const PipelineOptions& opts) {
  PipelineOptions inner = opts;
  inner.write_files = false;
  AnalyzeResult a = run_analyze(config, inner);
  const Branch branch = config.dilation.branch;
  const ContractiveSemigroup sg = stage("dilation", [&] { return make_semigroup(a.split, branch); });
  const int d = sg.dim();

  CVec psi = CVec::Constant(d, 1.0 / std::sqrt(static_cast<double>(d)));
  if (!config.quantization.psi.empty()) {
    if (static_cast<int>(config.quantization.psi.size()) != d)
      throw Error(Errc::ConfigInvalidValue, "quantization.psi has " + std::to_string(config.quantization.psi.size()) +
                                                " entries but the subspace has dimension " + std::to_string(d));
    psi = Eigen::Map<const Vec>(config.quantization.psi.data(), d).cast<cdouble>();
  }

  json rep;
  rep["command"] = "quantize";
  rep["version"] = kVersion;
  rep["config"] = serialize_config(config);
  rep["tolerances"] = a.report["tolerances"];
  rep["modes"] = a.report["modes"];
  Vec neg_bm = (-sg.B_minus).selfadjointView<Eigen::Lower>().eigenvalues();
  rep["semigroup"] = {{"op", "make_semigroup"},
                      {"branch", branch == Branch::StableForward ? "stable_forward" : "unstable_backward"},
                      {"dim", d},
                      {"rates", std::vector<double>(sg.rates.data(), sg.rates.data() + d)},
                      {"min_eig_minus_B_minus", neg_bm.minCoeff()}};

  json dil = json::array();
  const double gf_tol = 1e-10;
  for (double tau : config.dilation.tau) {
    const double out = stage("dilation", [&] { return dilation_residual(sg, psi, psi, tau, Embedding::Outgoing); });
    const double in = stage("dilation", [&] { return dilation_residual(sg, psi, psi, tau, Embedding::Incoming); });
    dil.push_back({{"op", "dilation_residual"}, {"tau", tau}, {"outgoing", out}, {"incoming", in},
                   {"tolerance", gf_tol}, {"pass", out <= gf_tol && in <= gf_tol}});
  }
  rep["dilation"] = dil;

  std::ostringstream csv;
  csv << "tau,s,value_unnormalized,value_normalized,oracle_delta\n";
  json gf = json::array();
  const bool small = d + 1 <= 3;
  for (double tau : config.dilation.tau)
    for (double s : config.quantization.s) {
      const GeneratingValue g = stage("fock", [&] {
        return branch == Branch::StableForward ? death_generating_function(sg, psi, tau, s)
                                               : absorption_generating_function(sg, psi, tau, s);
      });
      json row = {{"op", branch == Branch::StableForward ? "death_generating_function"
                                                          : "absorption_generating_function"},
                  {"tau", tau},
                  {"s", s},
                  {"value_unnormalized", g.value},
                  {"value_normalized", g.normalized},
                  {"closed_form", g.closed_form},
                  {"oracle_delta", g.delta},
                  {"tolerance", gf_tol},
                  {"system_quanta", g.system_quanta},
                  {"environment_quanta", g.environment_quanta}};
      if (small) {
        const auto t = stage("fock", [&] {
          return truncated_generating_function(sg, psi, tau, s, config.quantization.n_max);
        });
        row["truncated_op"] = "truncated_generating_function";
        row["truncated_delta"] = std::abs(t.value - g.value);
        row["truncated_tail"] = t.tail;
      }
      gf.push_back(row);
      csv << format_double(tau) << "," << format_double(s) << "," << format_double(g.value) << ","
          << format_double(g.normalized) << "," << format_double(g.delta) << "\n";
    }
  rep["generating_function"] = gf;

  if (opts.write_files) {
    if (wants(config, "json")) write_file_atomic(out_path(config, opts, "quantize_report.json"), rep.dump(2) + "\n");
    if (wants(config, "csv")) write_file_atomic(out_path(config, opts, "generating_function.csv"), csv.str());
  }
  return rep;
}

std::map<std::string, PipelineConfig> fixture_configs() {
  std::map<std::string, PipelineConfig> out;
  PipelineConfig sphere;
  sphere.manifold = {"sphere", "", 2, 1.0, 0.0};
  sphere.geodesic = {{kPi / 2, 0.0}, {0.0, 1.0}, 0.0, kPi, 1e-3};
  sphere.output.directory = "out/sphere";
  out["sphere"] = sphere;

  PipelineConfig hyper;
  hyper.manifold = {"hyperbolic", "", 2, -1.0, 0.0};
  hyper.geodesic = {{0.0, 1.0}, {0.0, 1.0}, -5.0, 3.0, 1e-3};
  hyper.output.directory = "out/hyperbolic";
  out["hyperbolic"] = hyper;

  PipelineConfig flat;
  flat.manifold = {"flat", "", 2, 0.0, 0.0};
  flat.geodesic = {{0.0, 0.0}, {1.0, 0.0}, -1.0, 1.0, 1e-3};
  flat.output.directory = "out/flat";
  out["flat"] = flat;

  PipelineConfig hh;
  hh.manifold = {"", "0.5*(x1^2 + x2^2) + x1^2*x2 - x2^3/3", 2, 1.0, 0.125};
  // unit speed in g = 2(E - V) I at p0
  const double v_p0 = 0.5 * 0.01 - 0.001 / 3.0;
  hh.geodesic = {{0.0, 0.1}, {1.0 / std::sqrt(2.0 * (0.125 - v_p0)), 0.0}, 0.0, 0.15, 1e-3};
  hh.output.directory = "out/henon_heiles";
  out["henon_heiles"] = hh;
  return out;
}

}  // namespace geodev
