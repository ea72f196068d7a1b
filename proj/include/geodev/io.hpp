#pragma once

#include <json.hpp>
#include <string>

#include "geodev/deviation.hpp"
#include "geodev/dilation.hpp"
#include "geodev/spectral_split.hpp"

namespace geodev {

using json = nlohmann::ordered_json;

/// Shortest round-trip decimal form ("%.17g").
std::string format_double(double v);

/// Writes to a temporary sibling and renames it into place.
void write_file_atomic(const std::string& path, const std::string& content);

/// Columns: s, x1..xn, v1..vn, phi_11, phi_12, ..., phi_nn (row-major).
std::string geodesic_csv(const TransportFrame& frame);

/// Columns: s, re_z1, im_z1, ..., re_z2n, im_z2n.
std::string trajectory_csv(const StateTrajectory& traj);

/// Columns: s, eps.
std::string adiabaticity_csv(const AdiabaticityProfile& profile);

/// Columns: s, re_1, im_1, ... for the node values of a section.
std::string section_csv(const SampledSection& section);

json mode_split_json(const ModeSplit& split);
json exp_segment_json(const ExpSegmentFunction& f);

}  // namespace geodev
