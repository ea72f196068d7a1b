// One PASS/FAIL line per acceptance criterion; exit status is the number of failures.
#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "geodev/verification.hpp"

using namespace geodev;

namespace {

void line(int id, bool pass, double seconds, const std::string& note) {
  std::printf("criterion %d: %s (%.2fs) %s%s\n", id, pass ? "PASS" : "FAIL", seconds, criterion_title(id).c_str(),
              note.empty() ? "" : (" -- " + note).c_str());
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  const bool skip_full_run = argc > 1 && std::string(argv[1]) == "--skip-9";
  VerifyOptions opts;
  opts.full = true;
  int failures = 0;
  for (int id = 1; id <= 8; ++id) {
    const CheckGroup g = run_criterion(id, opts);
    std::string note;
    if (const Check* c = g.first_failure()) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "%s = %.3e (tolerance %.3e) %s", c->name.c_str(), c->value, c->tolerance,
                    c->detail.c_str());
      note = buf;
    } else {
      note = std::to_string(g.checks.size()) + " checks";
    }
    line(id, g.pass(), g.seconds, note);
    if (!g.pass()) ++failures;
  }

  if (skip_full_run) return failures;
  const auto t0 = std::chrono::steady_clock::now();
  const std::string cmd = std::string(GEODEV_CLI) + " verify --full > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  const bool pass = code == 0 && seconds <= 900.0;
  line(9, pass, seconds, "exit status " + std::to_string(code) + ", limit 900 s");
  if (!pass) ++failures;
  return failures;
}
