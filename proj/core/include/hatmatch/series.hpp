#pragma once

// Relative-year views over an author panel.

#include <string>
#include <vector>

#include "hatmatch/corpus.hpp"

namespace hatmatch {

enum class OutcomeKind { Publications, Citations };

std::string to_string(OutcomeKind kind);        // "pubs" / "cites"
OutcomeKind parse_outcome_kind(const std::string& s);

// Raw yearly counts for relative years from..to (inclusive) around align_year.
std::vector<double> relative_counts(const AuthorYearPanel& panel, OutcomeKind kind,
                                    Year align_year, int from, int to);

// Regression outcome scale: publications stay counts, citations use log(1 + C).
double outcome_value(OutcomeKind kind, double raw_count);

// Pre-period yearly publications and citations at t = -4..0.
struct PreSeries {
  std::vector<double> pubs;
  std::vector<double> cites;
};
PreSeries pre_series(const AuthorYearPanel& panel, Year align_year);

struct WindowTotals {
  std::int64_t pubs = 0;
  std::int64_t cites = 0;
};
WindowTotals window_totals(const AuthorYearPanel& panel, Year first, Year last);

}  // namespace hatmatch
