#pragma once

#include <map>
#include <optional>
#include <string>

#include "geodev/config.hpp"
#include "geodev/deviation.hpp"
#include "geodev/fock.hpp"
#include "geodev/io.hpp"

namespace geodev {

inline constexpr const char* kVersion = "0.1.0";

struct PipelineOptions {
  std::optional<std::string> out_dir;  ///< overrides output.directory
  std::optional<double> step;          ///< overrides geodesic.step
  bool strict = false;                 ///< half step, frame drift limit without slack
  bool write_files = true;
};

/// Every stage of the classical pipeline, kept for callers that need more
/// than the report.
struct AnalyzeResult {
  MetricModel model;
  TransportFrame frame;
  OperatorPath path;
  AdiabaticityProfile adiabaticity;
  ModeSplit split;
  StateTrajectory oscillator;
  StateTrajectory covariant_pulled;
  json report;
};

MetricModel build_model(const PipelineConfig::Manifold& manifold);

/// geometry -> geodesic -> frames -> operator path -> mode split at freeze.s.
/// Writes report.json, modes.json, geodesic.csv, adiabaticity.csv,
/// trajectory_oscillator.csv and trajectory_covariant.csv.
AnalyzeResult run_analyze(const PipelineConfig& config, const PipelineOptions& opts = {});

/// Analyze, then semigroup, dilation residuals and the generating-function
/// sweep. Writes quantize_report.json and generating_function.csv.
json run_quantize(const PipelineConfig& config, const PipelineOptions& opts = {});

/// Named example configurations (sphere, hyperbolic, flat, henon_heiles).
std::map<std::string, PipelineConfig> fixture_configs();

}  // namespace geodev
