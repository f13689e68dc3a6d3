#pragma once

#include "hamalg/core/json.hpp"
#include "hamalg/core/session.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hamalg {

enum class SuiteProfile { Quick, Full };

struct SuiteOptions {
  SuiteProfile profile = SuiteProfile::Full;
  std::uint64_t seed = 42;
  Fault fault = Fault::None;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;  // one line: measured values against thresholds
  Json data;           // machine-readable measurements (no timings)
  double seconds = 0;
};

struct SuiteReport {
  SuiteOptions options;
  std::vector<CriterionResult> criteria;
  bool passed() const;
  /// One line per criterion: "[PASS] 3 oracle: ... (7.1 s)".
  std::string text() const;
  /// Byte-identical for identical options.
  std::string json() const;
};

/// Runs the nine acceptance checks. Quick shrinks sample counts and grids;
/// Full uses the acceptance values and enforces the runtime budgets.
SuiteReport run_suite(const SuiteOptions& opt);

// Individual checks (Full values unless `quick`).
CriterionResult check_algebra_laws(const Session& s, std::uint64_t seed, bool quick,
                                   CriterionResult* grading = nullptr);
CriterionResult check_oracle(const Session& s, std::uint64_t seed, bool quick);
CriterionResult check_residual_identity(const Session& s);
CriterionResult check_divergence(const Session& s);
CriterionResult check_quadratic_contract(const Session& s, std::uint64_t seed, bool quick);
CriterionResult check_kg(bool quick);
CriterionResult check_quasiclassics(bool quick);
CriterionResult check_infrastructure(const Session& s, std::uint64_t seed, bool quick);

}  // namespace hamalg
