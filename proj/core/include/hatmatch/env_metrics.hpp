#pragma once

// Environment change around the move (collaborators, institutions, topics,
// team size) and binary post-move success outcomes.

#include <set>
#include <string>
#include <vector>

#include "hatmatch/corpus.hpp"
#include "hatmatch/series.hpp"

namespace hatmatch {

// |after \ before| / |after|. Throws UndefinedRateError when after is empty.
double change_rate(const std::set<std::string>& before, const std::set<std::string>& after);

struct EnvironmentDelta {
  AuthorId author_id;
  double d_a = 0.0;
  double d_i = 0.0;
  double d_c = 0.0;
  double d_size = 0.0;
  Year pre_first = 0, pre_last = 0;
  Year post_first = 0, post_last = 0;
};

struct DeltaWindows {
  int pre_years = 5;   // [Y_w - pre_years, Y_w - 1]
  int post_years = 5;  // [Y_w, Y_w + post_years - 1]
};

// Throws UndefinedRateError whose what() is a short reason code:
// empty_pre_window, empty_post_window, undefined_d_a, undefined_d_i, undefined_d_c.
EnvironmentDelta environment_delta(const AuthorYearPanel& panel, Year y_w,
                                   const DeltaWindows& windows = {});

// Midpoint of the two central values for even counts. Empty input -> NaN.
double median(std::vector<double> values);

struct SuccessWindow {
  int first_offset = 1;  // [Y_w + 1, Y_w + 5]
  int last_offset = 5;
};

// Post-move total of publications or raw citations over the success window.
double success_value(const AuthorYearPanel& panel, Year y_w, OutcomeKind metric,
                     const SuccessWindow& window = {});

struct SuccessOutcome {
  AuthorId author_id;
  OutcomeKind metric = OutcomeKind::Publications;
  double value = 0.0;
  double median = 0.0;
  int label = 0;           // 1 iff value > median
  bool truncated = false;  // window runs past the corpus horizon
};

SuccessOutcome success_outcome(const AuthorYearPanel& panel, Year y_w, OutcomeKind metric,
                               double reference_median, Year horizon_end,
                               const SuccessWindow& window = {});

struct DeltaRow {
  AuthorId author_id;
  std::string group;
  Year align_year = 0;
  EnvironmentDelta delta;
  std::string flags;  // empty when the delta is defined
};

void write_deltas_csv(const std::string& path, const std::vector<DeltaRow>& rows);
void write_outcomes_csv(const std::string& path, const std::vector<SuccessOutcome>& rows);

}  // namespace hatmatch
