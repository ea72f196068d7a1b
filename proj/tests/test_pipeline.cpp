#include <gtest/gtest.h>
#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "geodev/pipeline.hpp"

using namespace geodev;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("geodev_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct CliRun {
  int code;
  std::string out;
};

CliRun cli(const std::string& args, const fs::path& dir) {
  const fs::path log = dir / "cli.log";
  const std::string cmd = std::string(GEODEV_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(log)};
}

const char* kHyperbolic = R"(# upper half-plane, vertical geodesic
[manifold]
builtin = hyperbolic
dim = 2
curvature = -1

[geodesic]
p0 = 0, 1
v0 = 0, 1
s_min = -5
s_max = 3
step = 0.001

[freeze]
s = 0

[dilation]
branch = stable
tau = 0, 1

[quantization]
s = 0.5, 1
n_max = 40
)";

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no geodev::Error thrown";
  return Errc::InvalidParams;
}

}  // namespace

TEST(Config, ParsesSectionsAndComments) {
  const PipelineConfig c = parse_config(kHyperbolic);
  EXPECT_EQ(c.manifold.builtin, "hyperbolic");
  EXPECT_EQ(c.manifold.curvature, -1.0);
  EXPECT_EQ(c.geodesic.p0, (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(c.geodesic.s_min, -5.0);
  EXPECT_EQ(c.dilation.branch, Branch::StableForward);
  EXPECT_EQ(c.quantization.s, (std::vector<double>{0.5, 1.0}));
  EXPECT_EQ(c.output.directory, "out");
}

TEST(Config, RoundTripsLosslessly) {
  for (const auto& [name, cfg] : fixture_configs()) {
    const PipelineConfig back = parse_config(serialize_config(cfg));
    EXPECT_TRUE(back == cfg) << name;
    EXPECT_EQ(serialize_config(back), serialize_config(cfg)) << name;
  }
  PipelineConfig odd = parse_config(kHyperbolic);
  odd.geodesic.v0 = {0.1 + 0.2, 1.0 / 3.0};
  odd.quantization.psi = {0.7};
  odd.dilation.tau = {0.0, 0.25, 1e-7};
  EXPECT_TRUE(parse_config(serialize_config(odd)) == odd);
}

TEST(Config, MissingKeyIsNamed) {
  std::string text = kHyperbolic;
  text.erase(text.find("v0 = 0, 1\n"), 10);
  try {
    parse_config(text);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ConfigMissingKey);
    EXPECT_NE(std::string(e.what()).find("geodesic.v0"), std::string::npos);
  }
}

TEST(Config, InvalidValues) {
  auto with = [](const std::string& from, const std::string& to) {
    std::string t = kHyperbolic;
    t.replace(t.find(from), from.size(), to);
    return t;
  };
  EXPECT_EQ(code_of([&] { parse_config(with("s = 0.5, 1", "s = 0, 1")); }), Errc::ConfigInvalidValue);
  EXPECT_EQ(code_of([&] { parse_config(with("step = 0.001", "step = -1")); }), Errc::ConfigInvalidValue);
  EXPECT_EQ(code_of([&] { parse_config(with("branch = stable", "branch = sideways")); }), Errc::ConfigInvalidValue);
  EXPECT_EQ(code_of([&] { parse_config(with("p0 = 0, 1", "p0 = 0, one")); }), Errc::ConfigInvalidValue);
  EXPECT_EQ(code_of([&] { parse_config(with("[freeze]", "[thaw]")); }), Errc::ConfigParse);
  EXPECT_EQ(code_of([&] { parse_config(with("dim = 2", "dim = 2\ndim = 3")); }), Errc::ConfigParse);
  EXPECT_EQ(code_of([] { load_config("/nonexistent/geodev.ini"); }), Errc::ConfigParse);
}

TEST(Pipeline, SphereModeTable) {
  PipelineOptions o;
  o.write_files = false;
  const AnalyzeResult r = run_analyze(fixture_configs().at("sphere"), o);
  const json& modes = r.report["modes"]["modes"];
  ASSERT_EQ(modes.size(), 2u);
  EXPECT_EQ(modes[0]["kind"], "zero");
  EXPECT_EQ(modes[0]["multiplicity"], 1);
  EXPECT_EQ(modes[1]["kind"], "omega");
  EXPECT_NEAR(modes[1]["rate"].get<double>(), 1.0, 1e-8);
  EXPECT_EQ(modes[1]["multiplicity"], 1);
  EXPECT_EQ(r.report["modes"]["dimensions"]["unstable"], 0);
}

TEST(Pipeline, HyperbolicModeTable) {
  PipelineOptions o;
  o.write_files = false;
  const AnalyzeResult r = run_analyze(parse_config(kHyperbolic), o);
  const json& modes = r.report["modes"]["modes"];
  ASSERT_EQ(modes.size(), 2u);
  EXPECT_EQ(modes[0]["kind"], "zero");
  EXPECT_EQ(modes[1]["kind"], "eta");
  EXPECT_NEAR(modes[1]["rate"].get<double>(), 1.0, 1e-8);
  for (const auto& c : r.report["checks"]) {
    EXPECT_TRUE(c.contains("op"));
    EXPECT_TRUE(c.contains("tolerance"));
  }
}

TEST(Pipeline, QuantizeSweep) {
  PipelineOptions o;
  o.write_files = false;
  const json q = run_quantize(parse_config(kHyperbolic), o);
  const json& rows = q["generating_function"];
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& row : rows) {
    EXPECT_TRUE(row.contains("op"));
    EXPECT_TRUE(row.contains("tolerance"));
    if (row["tau"] == 0.0 && row["s"] == 1.0) EXPECT_NEAR(row["value_unnormalized"].get<double>(), std::exp(1.0), 1e-12);
    if (row["tau"] == 1.0 && row["s"] == 0.5) {
      EXPECT_NEAR(std::log(row["value_unnormalized"].get<double>()), 0.932332, 1e-6);
      EXPECT_LE(row["truncated_delta"].get<double>(), 1e-8);
    }
  }
  EXPECT_GT(q["semigroup"]["min_eig_minus_B_minus"].get<double>(), 0.0);
}

TEST(Pipeline, SphereQuantizeHasNoStableSubspace) {
  PipelineOptions o;
  o.write_files = false;
  try {
    run_quantize(fixture_configs().at("sphere"), o);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EmptySubspace);
    EXPECT_NE(std::string(e.what()).find("stage dilation"), std::string::npos);
  }
}

TEST(Cli, AnalyzeWritesFilesDeterministically) {
  const fs::path dir = scratch("analyze");
  std::ofstream(dir / "h.ini") << kHyperbolic;
  ASSERT_EQ(cli("analyze " + (dir / "h.ini").string() + " --out " + (dir / "a").string(), dir).code, 0);
  ASSERT_EQ(cli("analyze " + (dir / "h.ini").string() + " --out " + (dir / "b").string(), dir).code, 0);
  for (const char* f : {"report.json", "modes.json", "geodesic.csv", "adiabaticity.csv", "trajectory_oscillator.csv",
                        "trajectory_covariant.csv"}) {
    ASSERT_TRUE(fs::exists(dir / "a" / f)) << f;
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  }
  EXPECT_EQ(slurp(dir / "a" / "geodesic.csv").substr(0, 10), "s,x1,x2,v1");
}

TEST(Cli, QuantizeWritesCsv) {
  const fs::path dir = scratch("quantize");
  std::ofstream(dir / "h.ini") << kHyperbolic;
  ASSERT_EQ(cli("quantize " + (dir / "h.ini").string() + " --out " + dir.string(), dir).code, 0);
  const std::string csv = slurp(dir / "generating_function.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "tau,s,value_unnormalized,value_normalized,oracle_delta");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  EXPECT_TRUE(fs::exists(dir / "quantize_report.json"));
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("exit");
  std::string text = kHyperbolic;
  text.erase(text.find("v0 = 0, 1\n"), 10);
  std::ofstream(dir / "bad.ini") << text;
  const CliRun bad = cli("analyze " + (dir / "bad.ini").string(), dir);
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.out.find("geodesic.v0"), std::string::npos);

  ASSERT_EQ(cli("export-fixtures --out " + (dir / "fx").string(), dir).code, 0);
  const CliRun sphere = cli("quantize " + (dir / "fx" / "sphere.ini").string() + " --out " + dir.string(), dir);
  EXPECT_EQ(sphere.code, 4);
  EXPECT_NE(sphere.out.find("elliptic"), std::string::npos);

  std::ofstream(dir / "far.ini") << std::string(kHyperbolic).replace(std::string(kHyperbolic).find("s = 0\n"), 6,
                                                                      "s = 7\n");
  EXPECT_EQ(cli("analyze " + (dir / "far.ini").string() + " --out " + dir.string(), dir).code, 2);

  std::ofstream(dir / "well.ini") << "[manifold]\npotential = x1^2 + x2^2\nenergy = 0.1\n"
                                     "[geodesic]\np0 = 1, 0\nv0 = 0, 1\ns_max = 1\n";
  const CliRun well = cli("analyze " + (dir / "well.ini").string() + " --out " + dir.string(), dir);
  EXPECT_EQ(well.code, 3);
  EXPECT_NE(well.out.find("EnergyBelowPotential"), std::string::npos) << well.out;
  EXPECT_EQ(cli("analyze", dir).code, 2);
  EXPECT_EQ(cli("analyze " + (dir / "h.ini").string() + " --tolerance-profile loose", dir).code, 2);
}

TEST(Cli, ExportedFixturesRunClean) {
  const fs::path dir = scratch("fixtures");
  ASSERT_EQ(cli("export-fixtures --out " + dir.string(), dir).code, 0);
  for (const char* name : {"sphere", "hyperbolic", "flat", "henon_heiles"}) {
    ASSERT_TRUE(fs::exists(dir / (std::string(name) + ".ini")));
    const CliRun r = cli("analyze " + (dir / (std::string(name) + ".ini")).string() + " --out " + (dir / name).string(), dir);
    EXPECT_EQ(r.code, 0) << name << ": " << r.out;
  }
  EXPECT_EQ(cli("analyze " + (dir / "hyperbolic.ini").string() + " --tolerance-profile strict --out " +
                    (dir / "strict").string(),
                dir)
                .code,
            0);
}

TEST(Cli, VerifyFastAndCorruptedWeylSign) {
  const fs::path dir = scratch("verify");
  const CliRun ok = cli("verify", dir);
  EXPECT_EQ(ok.code, 0) << ok.out;
  const CliRun bad = cli("verify --corrupt-weyl-sign", dir);
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.out.find("failed invariant weyl_unitarity"), std::string::npos) << bad.out;
}
