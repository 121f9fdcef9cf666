#pragma once

// Text summary of an artifact directory. Every number is copied from a CSV
// cell; nothing is re-estimated here.

#include <string>
#include <vector>

namespace hatmatch {

struct RunReport {
  std::string text;
  std::vector<std::string> missing;  // expected artifacts that were not found
};

RunReport build_report(const std::string& dir);

// Writes report.txt plus the plot-data bundle (subgroups.csv, event_series.csv)
// into dir. Missing artifacts are listed, never fatal.
RunReport write_report(const std::string& dir);

}  // namespace hatmatch
