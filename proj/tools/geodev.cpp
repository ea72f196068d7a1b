// geodev: analyze, quantize and verify geodesic deviation pipelines.
#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "geodev/pipeline.hpp"
#include "geodev/verification.hpp"

namespace {

using namespace geodev;

enum Exit { kOk = 0, kVerifyFailed = 1, kConfigError = 2, kNumericalError = 3, kEmptySubspace = 4 };

int exit_code(Errc code) {
  switch (code) {
    case Errc::ConfigParse:
    case Errc::ConfigMissingKey:
    case Errc::ConfigInvalidValue:
    case Errc::UnsupportedName:
      return kConfigError;
    case Errc::EmptySubspace:
      return kEmptySubspace;
    default:
      return kNumericalError;
  }
}

struct Globals {
  std::string out_dir;
  std::uint64_t seed = VerifyOptions{}.seed;
  double step = 0.0;
  std::string profile = "default";
  bool corrupt_weyl_sign = false;
};

PipelineOptions pipeline_options(const Globals& g) {
  PipelineOptions o;
  if (!g.out_dir.empty()) o.out_dir = g.out_dir;
  if (g.step > 0.0) o.step = g.step;
  o.strict = g.profile == "strict";
  return o;
}

void print_group(const CheckGroup& g, bool verbose) {
  const std::string label = g.id > 0 ? "criterion " + std::to_string(g.id) : std::string("suite");
  std::printf("%-4s %-12s %-48s %7.2fs\n", g.pass() ? "PASS" : "FAIL", label.c_str(), g.title.c_str(), g.seconds);
  for (const auto& c : g.checks)
    if (!c.pass || verbose)
      std::printf("     %s invariant %s: value %.3e, tolerance %.3e%s%s\n", c.pass ? "passed" : "failed", c.name.c_str(),
                  c.value, c.tolerance, c.detail.empty() ? "" : " -- ", c.detail.c_str());
}

int run_verify(const Globals& g, bool full, bool verbose) {
  VerifyOptions opts;
  opts.full = full;
  opts.seed = g.seed;
  if (g.corrupt_weyl_sign) opts.weyl_sign = WeylSign::Flipped;
  int failures = 0;
  auto report = [&](const CheckGroup& grp) {
    print_group(grp, verbose);
    std::fflush(stdout);
    if (!grp.pass()) ++failures;
  };
  for (int id = 1; id <= 8; ++id) report(run_criterion(id, opts));
  if (full)
    for (const auto& grp : run_invariant_suites(opts)) report(grp);
  std::printf("%s: %d group(s) failed\n", failures == 0 ? "verify ok" : "verify failed", failures);
  return failures == 0 ? kOk : kVerifyFailed;
}

int run_export(const Globals& g) {
  const std::filesystem::path dir = g.out_dir.empty() ? "fixtures" : g.out_dir;
  std::filesystem::create_directories(dir);
  for (const auto& [name, cfg] : fixture_configs()) {
    const auto path = dir / (name + ".ini");
    write_file_atomic(path.string(), serialize_config(cfg));
    std::cout << path.string() << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local stability of geodesic flows: deviation, spectral split, dilation and Fock quantization"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Globals g;
  app.add_option("--out", g.out_dir, "output directory (overrides output.directory)");
  app.add_option("--seed", g.seed, "seed for randomized checks");
  app.add_option("--step", g.step, "geodesic step (overrides geodesic.step)")->check(CLI::PositiveNumber);
  app.add_option("--tolerance-profile", g.profile, "strict halves the step and drops frame-drift slack")
      ->check(CLI::IsMember({"strict", "default"}));
  app.add_flag("--corrupt-weyl-sign", g.corrupt_weyl_sign)->group("");  // negative-test hook

  std::string config_path;
  auto* analyze = app.add_subcommand("analyze", "geometry to mode split; writes report.json, modes.json and CSVs");
  analyze->add_option("config", config_path)->required();
  auto* quantize = app.add_subcommand("quantize", "dilation and generating-function sweep");
  quantize->add_option("config", config_path)->required();
  bool full = false;
  auto* verify = app.add_subcommand("verify", "run the acceptance checks");
  verify->add_flag("--full", full, "add grid cross-checks and module invariant suites");
  bool verbose = false;
  verify->add_flag("-v,--verbose", verbose, "list every check, not only failures");
  auto* exportf = app.add_subcommand("export-fixtures", "write the example configurations");

  // global flags are accepted after the subcommand as well
  for (auto* sub : {analyze, quantize, verify, exportf}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (*verify) return run_verify(g, full, verbose);
    if (*exportf) return run_export(g);
    const PipelineConfig cfg = load_config(config_path);
    const PipelineOptions opts = pipeline_options(g);
    if (*analyze) {
      const AnalyzeResult r = run_analyze(cfg, opts);
      std::cout << r.report["modes"].dump(2) << "\n";
    } else {
      const json r = run_quantize(cfg, opts);
      std::cout << "quantize ok: " << r["generating_function"].size() << " generating-function rows\n";
    }
    return kOk;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.code() == Errc::EmptySubspace)
      std::cerr << "hint: the frozen operator has no negative eigenvalue on this branch; flat or elliptic regions "
                   "carry no contraction semigroup\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericalError;
  }
}
