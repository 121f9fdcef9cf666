#pragma once

// Compares a pipeline run on a synthetic corpus against its ground truth.

#include <span>
#include <string>
#include <vector>

#include "hatmatch/did.hpp"
#include "hatmatch/synthgen.hpp"

namespace hatmatch {

struct ValidationTolerances {
  double did_abs = 1e-6;    // noiseless publication DID and event-study effects
  double cite_abs = 0.1;    // citation DID (log scale, not exactly specified)
  double noisy_z = 3.29;    // noisy runs: |estimate - truth| <= z * se
};

struct ValidationCheck {
  std::string name;
  bool passed = false;
  double observed = 0.0;
  double expected = 0.0;
  double deviation = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::string status;  // "pass", "fail" or "incomplete"
  std::vector<ValidationCheck> checks;
  std::vector<std::string> missing;  // artifacts that were not found

  bool passed() const { return status == "pass"; }
  const ValidationCheck* find(const std::string& name) const;
};

ValidationReport validate_run(const std::string& artifact_dir, const GroundTruth& truth,
                              const ValidationTolerances& tolerances = {});

// Share of 95% intervals (beta +/- 1.96 se) that cover delta, checked
// against [lo, hi].
ValidationCheck coverage_check(std::span<const DIDEstimate> replications, double delta,
                               double lo = 0.90, double hi = 0.99);

std::string format_validation_report(const ValidationReport& report);

}  // namespace hatmatch
