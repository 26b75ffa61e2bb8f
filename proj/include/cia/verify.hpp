#pragma once

// Self-contained verification harness: seeded fixtures checked for the CIA
// inequalities, invariance under rigid motions and cell changes, the 4*epsilon
// continuity bound, exact zeros on symmetric sets and the cell-jump family.

#include "cia/asymmetry.hpp"
#include "cia/fixtures.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cia {

struct VerifyOptions {
  std::uint64_t seed = 42;
  int k = 100;
  int inequalityFixtures = 100;
  int invarianceFixtures = 100;
  int continuityFixtures = 20;
  int trials = 100;
  std::vector<double> epsilonFractions{0.001, 0.01, 0.1};
  int zeroFixtures = 20;
  double tolerance = 1e-9;
};

struct VerifyFailure {
  std::string suite;
  std::uint64_t fixtureSeed = 0;
  std::string detail;
};

struct SuiteResult {
  std::string name;
  std::size_t checks = 0;
  std::size_t failures = 0;
  /// Largest observed violation measure: absolute difference for equality
  /// checks, |delta| / (4 epsilon) for continuity (passes while <= 1).
  double worst = 0.0;
};

struct VerifyReport {
  std::uint64_t seed = 0;
  std::vector<SuiteResult> suites;
  std::vector<VerifyFailure> failures;

  bool allPass() const { return failures.empty(); }
};

/// Deterministic per-fixture seed for suite `suite` and fixture index `index`.
std::uint64_t fixtureSeed(std::uint64_t seed, std::uint64_t suite, std::uint64_t index);

/// Multi-block fixture used by the inequality and invariance suites.
fixtures::BlockFixture verifyFixture(std::uint64_t fixtureSeed);

/// Continuity fixtures: the first three are the cell-jump family, the rest
/// are random multi-block fixtures.
fixtures::BlockFixture continuityFixture(std::uint64_t fixtureSeed, int index);

VerifyReport runVerification(const VerifyOptions& options);

std::string verifyReportJson(const VerifyReport& report);

}  // namespace cia
