#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geodev/dilation.hpp"

namespace geodev {

/// Pipeline configuration read from a sectioned key/value text file:
///
///   [manifold]      builtin = sphere|hyperbolic|flat, dim, curvature
///                   or potential = <expression in x1..xn>, energy, dim
///   [geodesic]      p0, v0 (comma separated), s_min, s_max, step
///   [deviation]     j0, dj0 (optional, oscillator-frame coefficients)
///   [freeze]        s
///   [dilation]      branch = stable|unstable, tau (list)
///   [quantization]  s (list in (0, 1]), n_max, psi (optional, mode coordinates)
///   [output]        directory, formats (list of json, csv)
///
/// Lines starting with '#' or ';' are comments.
struct PipelineConfig {
  struct Manifold {
    std::string builtin;    ///< empty when a potential is given
    std::string potential;  ///< expression source
    int dim = 2;
    double curvature = 1.0;
    double energy = 0.0;

    bool operator==(const Manifold&) const = default;
  } manifold;

  struct Geodesic {
    std::vector<double> p0;
    std::vector<double> v0;
    double s_min = 0.0;
    double s_max = 1.0;
    double step = 1e-3;

    bool operator==(const Geodesic&) const = default;
  } geodesic;

  struct Deviation {
    std::vector<double> j0;
    std::vector<double> dj0;

    bool operator==(const Deviation&) const = default;
  } deviation;

  double freeze_s = 0.0;

  struct Dilation {
    Branch branch = Branch::StableForward;
    std::vector<double> tau{0.0, 1.0};

    bool operator==(const Dilation&) const = default;
  } dilation;

  struct Quantization {
    std::vector<double> s{0.5, 1.0};
    int n_max = 40;
    std::vector<double> psi;

    bool operator==(const Quantization&) const = default;
  } quantization;

  struct Output {
    std::string directory = "out";
    std::vector<std::string> formats{"json", "csv"};

    bool operator==(const Output&) const = default;
  } output;

  bool operator==(const PipelineConfig&) const = default;
};

/// Throws ConfigParse, ConfigMissingKey (naming "section.key") or
/// ConfigInvalidValue.
PipelineConfig parse_config(std::string_view text);
PipelineConfig load_config(const std::string& path);

/// Text that parses back to an equal config (doubles printed with 17
/// significant digits).
std::string serialize_config(const PipelineConfig& config);

}  // namespace geodev
