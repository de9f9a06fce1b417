// Randomized invariant audit behind `pobs audit`. Every trial draws from its
// own generator stream (seed, dim, suite, trial), so the report does not
// depend on how trials are scheduled across threads.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "pobs/report.hpp"

namespace pobs {

struct AuditOptions {
  std::vector<int> dims{4, 8, 16};
  std::uint64_t seed = 0;
  int trials = 100;          // automorphism, invariance, duality
  int light_trials = 20;     // generatrix, trace/inner product, spectrum
  int reversal_trials = 5;
  long reversal_steps = 100;
  bool plant_failure = false;
  bool parallel = true;
};

struct AuditReport {
  AuditOptions options;
  std::vector<CheckReport> suites;  // one per (suite, dim), in fixed order

  bool pass() const;
  nlohmann::ordered_json to_json() const;
};

/// Throws InvalidArgument for dims < 2 or non-positive trial counts.
AuditReport run_audit(const AuditOptions& options);

}  // namespace pobs
