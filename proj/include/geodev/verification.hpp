#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "geodev/fock.hpp"

namespace geodev {

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

struct CheckGroup {
  int id = 0;  ///< acceptance criterion number, 0 for invariant suites
  std::string title;
  std::vector<Check> checks;
  double seconds = 0.0;

  bool pass() const;
  const Check* first_failure() const;
};

struct VerifyOptions {
  bool full = false;  ///< adds grid-backend cross-checks and the invariant suites
  std::uint64_t seed = 20240607;
  WeylSign weyl_sign = WeylSign::Unitary;
};

/// Acceptance criteria 1-8 (criterion 9 is the timed CLI run itself).
CheckGroup run_criterion(int id, const VerifyOptions& opts);
std::string criterion_title(int id);

/// Module invariant suites: geometry, geodesic_flow, deviation,
/// spectral_split, dilation, fock.
std::vector<CheckGroup> run_invariant_suites(const VerifyOptions& opts);

/// Criteria 1-8, then (full only) the invariant suites.
std::vector<CheckGroup> run_verification(const VerifyOptions& opts);

}  // namespace geodev
