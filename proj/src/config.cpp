#include "geodev/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace geodev {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

using Table = std::map<std::string, std::map<std::string, std::string>>;

const std::set<std::string> kSections{"manifold",   "geodesic",     "deviation", "freeze",
                                      "dilation",   "quantization", "output"};

Table tokenize(std::string_view text) {
  Table table;
  std::string section;
  int lineno = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw Error(Errc::ConfigParse, "line " + std::to_string(lineno) + ": unclosed section");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!kSections.count(section))
        throw Error(Errc::ConfigParse, "line " + std::to_string(lineno) + ": unknown section [" + section + "]");
      table[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::ConfigParse, "line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty())
      throw Error(Errc::ConfigParse, "line " + std::to_string(lineno) + ": key outside of a section");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    if (key.empty()) throw Error(Errc::ConfigParse, "line " + std::to_string(lineno) + ": empty key");
    if (!table[section].emplace(key, trim(std::string_view(line).substr(eq + 1))).second)
      throw Error(Errc::ConfigParse, "line " + std::to_string(lineno) + ": duplicate key " + section + "." + key);
  }
  return table;
}

class Reader {
 public:
  explicit Reader(Table t) : t_(std::move(t)) {}

  const std::string* find(const std::string& sec, const std::string& key) {
    auto s = t_.find(sec);
    if (s == t_.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    used_.insert(sec + "." + key);
    return &k->second;
  }

  const std::string& require(const std::string& sec, const std::string& key) {
    const std::string* v = find(sec, key);
    if (!v) throw Error(Errc::ConfigMissingKey, "missing required key " + sec + "." + key);
    return *v;
  }

  static double to_double(const std::string& s, const std::string& name) {
    const std::string t = trim(s);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v))
      throw Error(Errc::ConfigInvalidValue, name + ": '" + s + "' is not a finite number");
    return v;
  }

  static std::vector<double> to_list(const std::string& s, const std::string& name) {
    std::vector<double> out;
    if (trim(s).empty()) return out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(item, name));
    return out;
  }

  static int to_int(const std::string& s, const std::string& name) {
    const double v = to_double(s, name);
    if (v != std::floor(v) || std::abs(v) > 1e9)
      throw Error(Errc::ConfigInvalidValue, name + ": '" + s + "' is not an integer");
    return static_cast<int>(v);
  }

  void opt_double(const std::string& sec, const std::string& key, double& out) {
    if (const std::string* v = find(sec, key)) out = to_double(*v, sec + "." + key);
  }
  void opt_list(const std::string& sec, const std::string& key, std::vector<double>& out) {
    if (const std::string* v = find(sec, key)) out = to_list(*v, sec + "." + key);
  }

  void check_all_used() const {
    for (const auto& [sec, keys] : t_)
      for (const auto& kv : keys)
        if (!used_.count(sec + "." + kv.first))
          throw Error(Errc::ConfigParse, "unknown key " + sec + "." + kv.first);
  }

 private:
  Table t_;
  std::set<std::string> used_;
};

void invalid(const std::string& what) { throw Error(Errc::ConfigInvalidValue, what); }

void validate(const PipelineConfig& c) {
  const int n = c.manifold.dim;
  if (n < 2) invalid("manifold.dim must be >= 2");
  if (static_cast<int>(c.geodesic.p0.size()) != n) invalid("geodesic.p0 must have manifold.dim entries");
  if (static_cast<int>(c.geodesic.v0.size()) != n) invalid("geodesic.v0 must have manifold.dim entries");
  if (!(c.geodesic.s_min <= 0.0 && c.geodesic.s_max >= 0.0)) invalid("geodesic span must contain 0");
  if (!(c.geodesic.step > 0.0)) invalid("geodesic.step must be positive");
  if (!c.deviation.j0.empty() && static_cast<int>(c.deviation.j0.size()) != n)
    invalid("deviation.j0 must have manifold.dim entries");
  if (!c.deviation.dj0.empty() && static_cast<int>(c.deviation.dj0.size()) != n)
    invalid("deviation.dj0 must have manifold.dim entries");
  if (c.freeze_s < c.geodesic.s_min || c.freeze_s > c.geodesic.s_max) invalid("freeze.s must lie in the geodesic span");
  for (double s : c.quantization.s)
    if (!(s > 0.0 && s <= 1.0)) invalid("quantization.s values must lie in (0, 1]");
  if (c.quantization.n_max < 0) invalid("quantization.n_max must be >= 0");
  for (const auto& f : c.output.formats)
    if (f != "json" && f != "csv") invalid("output.formats accepts json and csv, got '" + f + "'");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt(v[i]);
  return out;
}

}  // namespace

PipelineConfig parse_config(std::string_view text) {
  Reader r(tokenize(text));
  PipelineConfig c;

  const std::string* builtin = r.find("manifold", "builtin");
  const std::string* potential = r.find("manifold", "potential");
  if (builtin && potential) invalid("manifold accepts either builtin or potential, not both");
  if (!builtin && !potential) throw Error(Errc::ConfigMissingKey, "missing required key manifold.builtin");
  if (const std::string* d = r.find("manifold", "dim")) c.manifold.dim = Reader::to_int(*d, "manifold.dim");
  if (builtin) {
    c.manifold.builtin = *builtin;
    parse_builtin_name(c.manifold.builtin);
    r.opt_double("manifold", "curvature", c.manifold.curvature);
  } else {
    c.manifold.potential = *potential;
    c.manifold.energy = Reader::to_double(r.require("manifold", "energy"), "manifold.energy");
  }

  c.geodesic.p0 = Reader::to_list(r.require("geodesic", "p0"), "geodesic.p0");
  c.geodesic.v0 = Reader::to_list(r.require("geodesic", "v0"), "geodesic.v0");
  r.opt_double("geodesic", "s_min", c.geodesic.s_min);
  c.geodesic.s_max = Reader::to_double(r.require("geodesic", "s_max"), "geodesic.s_max");
  r.opt_double("geodesic", "step", c.geodesic.step);

  r.opt_list("deviation", "j0", c.deviation.j0);
  r.opt_list("deviation", "dj0", c.deviation.dj0);

  r.opt_double("freeze", "s", c.freeze_s);

  if (const std::string* b = r.find("dilation", "branch")) {
    if (*b == "stable")
      c.dilation.branch = Branch::StableForward;
    else if (*b == "unstable")
      c.dilation.branch = Branch::UnstableBackward;
    else
      invalid("dilation.branch must be stable or unstable, got '" + *b + "'");
  }
  r.opt_list("dilation", "tau", c.dilation.tau);

  r.opt_list("quantization", "s", c.quantization.s);
  if (const std::string* v = r.find("quantization", "n_max"))
    c.quantization.n_max = Reader::to_int(*v, "quantization.n_max");
  r.opt_list("quantization", "psi", c.quantization.psi);

  if (const std::string* v = r.find("output", "directory")) c.output.directory = *v;
  if (const std::string* v = r.find("output", "formats")) {
    c.output.formats.clear();
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) c.output.formats.push_back(trim(item));
  }
  r.check_all_used();
  validate(c);
  return c;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ConfigParse, "cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const PipelineConfig& c) {
  std::ostringstream os;
  os << "[manifold]\n";
  if (!c.manifold.builtin.empty()) {
    os << "builtin = " << c.manifold.builtin << "\n";
    os << "dim = " << c.manifold.dim << "\n";
    os << "curvature = " << fmt(c.manifold.curvature) << "\n";
  } else {
    os << "potential = " << c.manifold.potential << "\n";
    os << "energy = " << fmt(c.manifold.energy) << "\n";
    os << "dim = " << c.manifold.dim << "\n";
  }
  os << "\n[geodesic]\n";
  os << "p0 = " << fmt(c.geodesic.p0) << "\n";
  os << "v0 = " << fmt(c.geodesic.v0) << "\n";
  os << "s_min = " << fmt(c.geodesic.s_min) << "\n";
  os << "s_max = " << fmt(c.geodesic.s_max) << "\n";
  os << "step = " << fmt(c.geodesic.step) << "\n";
  if (!c.deviation.j0.empty() || !c.deviation.dj0.empty()) {
    os << "\n[deviation]\n";
    if (!c.deviation.j0.empty()) os << "j0 = " << fmt(c.deviation.j0) << "\n";
    if (!c.deviation.dj0.empty()) os << "dj0 = " << fmt(c.deviation.dj0) << "\n";
  }
  os << "\n[freeze]\ns = " << fmt(c.freeze_s) << "\n";
  os << "\n[dilation]\n";
  os << "branch = " << (c.dilation.branch == Branch::StableForward ? "stable" : "unstable") << "\n";
  os << "tau = " << fmt(c.dilation.tau) << "\n";
  os << "\n[quantization]\n";
  os << "s = " << fmt(c.quantization.s) << "\n";
  os << "n_max = " << c.quantization.n_max << "\n";
  if (!c.quantization.psi.empty()) os << "psi = " << fmt(c.quantization.psi) << "\n";
  os << "\n[output]\n";
  os << "directory = " << c.output.directory << "\n";
  os << "formats = ";
  for (std::size_t i = 0; i < c.output.formats.size(); ++i) os << (i ? ", " : "") << c.output.formats[i];
  os << "\n";
  return os.str();
}

}  // namespace geodev
