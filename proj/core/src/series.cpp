#include "hatmatch/series.hpp"

#include <cmath>

#include "hatmatch/error.hpp"

namespace hatmatch {

std::string to_string(OutcomeKind kind) {
  return kind == OutcomeKind::Publications ? "pubs" : "cites";
}

OutcomeKind parse_outcome_kind(const std::string& s) {
  if (s == "pubs" || s == "publications") return OutcomeKind::Publications;
  if (s == "cites" || s == "citations") return OutcomeKind::Citations;
  throw InvalidInput("unknown outcome '" + s + "' (expected pubs or cites)");
}

std::vector<double> relative_counts(const AuthorYearPanel& panel, OutcomeKind kind,
                                    Year align_year, int from, int to) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(to - from + 1));
  for (int t = from; t <= to; ++t) {
    const Year y = align_year + t;
    out.push_back(kind == OutcomeKind::Publications ? panel.pubs(y)
                                                    : static_cast<double>(panel.cites(y)));
  }
  return out;
}

double outcome_value(OutcomeKind kind, double raw_count) {
  return kind == OutcomeKind::Publications ? raw_count : std::log1p(raw_count);
}

PreSeries pre_series(const AuthorYearPanel& panel, Year align_year) {
  return {relative_counts(panel, OutcomeKind::Publications, align_year, -4, 0),
          relative_counts(panel, OutcomeKind::Citations, align_year, -4, 0)};
}

WindowTotals window_totals(const AuthorYearPanel& panel, Year first, Year last) {
  WindowTotals t;
  for (Year y = first; y <= last; ++y) {
    t.pubs += panel.pubs(y);
    t.cites += panel.cites(y);
  }
  return t;
}

}  // namespace hatmatch
