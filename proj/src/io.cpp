#include "geodev/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "geodev/error.hpp"

namespace geodev {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, target);
}

std::string geodesic_csv(const TransportFrame& frame) {
  const int n = frame.dim();
  std::ostringstream os;
  os << "s";
  for (int i = 1; i <= n; ++i) os << ",x" << i;
  for (int i = 1; i <= n; ++i) os << ",v" << i;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) os << ",phi_" << i << "_" << j;
  os << "\n";
  for (std::size_t k = 0; k < frame.size(); ++k) {
    const GeodesicSample& smp = frame.record.samples[k];
    os << format_double(smp.s);
    for (int i = 0; i < n; ++i) os << "," << format_double(smp.x[i]);
    for (int i = 0; i < n; ++i) os << "," << format_double(smp.v[i]);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) os << "," << format_double(frame.frames[k](i, j));
    os << "\n";
  }
  return os.str();
}

std::string trajectory_csv(const StateTrajectory& traj) {
  std::ostringstream os;
  const Eigen::Index m = traj.z.empty() ? 0 : traj.z.front().size();
  os << "s";
  for (Eigen::Index i = 1; i <= m; ++i) os << ",re_z" << i << ",im_z" << i;
  os << "\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    os << format_double(traj.s[k]);
    for (Eigen::Index i = 0; i < m; ++i)
      os << "," << format_double(traj.z[k][i].real()) << "," << format_double(traj.z[k][i].imag());
    os << "\n";
  }
  return os.str();
}

std::string adiabaticity_csv(const AdiabaticityProfile& profile) {
  std::ostringstream os;
  os << "s,eps\n";
  for (std::size_t k = 0; k < profile.s.size(); ++k)
    os << format_double(profile.s[k]) << "," << format_double(profile.epsilon[k]) << "\n";
  return os.str();
}

std::string section_csv(const SampledSection& section) {
  std::ostringstream os;
  const Eigen::Index m = section.value.empty() ? 0 : section.value.front().size();
  os << "s";
  for (Eigen::Index i = 1; i <= m; ++i) os << ",re_" << i << ",im_" << i;
  os << "\n";
  for (std::size_t k = 0; k < section.s.size(); ++k) {
    os << format_double(section.s[k]);
    for (Eigen::Index i = 0; i < m; ++i)
      os << "," << format_double(section.value[k][i].real()) << "," << format_double(section.value[k][i].imag());
    os << "\n";
  }
  return os.str();
}

json mode_split_json(const ModeSplit& split) {
  json j;
  j["op"] = "decompose_modes";
  j["frozen_s"] = split.frozen_s;
  j["eps_kernel"] = split.eps_kernel;
  j["eigenvalues"] = std::vector<double>(split.eigenvalues.data(), split.eigenvalues.data() + split.n);
  json table = json::array();
  if (split.zero_count() > 0) table.push_back({{"kind", "zero"}, {"rate", 0.0}, {"multiplicity", split.zero_count()}});
  for (const auto& g : split.positive)
    table.push_back({{"kind", "omega"}, {"rate", g.rate}, {"multiplicity", g.multiplicity()}});
  for (const auto& g : split.negative)
    table.push_back({{"kind", "eta"}, {"rate", g.rate}, {"multiplicity", g.multiplicity()}});
  j["modes"] = table;
  j["dimensions"] = {{"central", split.dim_c()},
                     {"stable", split.dim_s()},
                     {"unstable", split.dim_u()},
                     {"neutral", 2 * split.zero_count()}};
  return j;
}

json exp_segment_json(const ExpSegmentFunction& f) {
  json terms = json::array();
  auto edge = [](double x) -> json {
    if (std::isinf(x)) return x < 0 ? "-inf" : "inf";
    return x;
  };
  for (const auto& t : f.terms()) {
    json coeff = json::array();
    for (Eigen::Index i = 0; i < t.coeff.size(); ++i) coeff.push_back({t.coeff[i].real(), t.coeff[i].imag()});
    terms.push_back({{"a", edge(t.a)}, {"b", edge(t.b)}, {"rate_re", t.rate.real()}, {"rate_im", t.rate.imag()},
                     {"coeff", coeff}});
  }
  return {{"dim", f.dim()}, {"terms", terms}};
}

}  // namespace geodev
