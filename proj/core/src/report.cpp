#include "hatmatch/report.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "hatmatch/csv.hpp"
#include "hatmatch/error.hpp"

namespace hatmatch {

namespace {

namespace fs = std::filesystem;

std::string cell(const csv::Table& t, const csv::Row& row, const std::string& name) {
  const int c = t.column(name);
  return c < 0 || c >= static_cast<int>(row.size()) ? std::string{} : row[c];
}

// "coef*** (se)" built from the literal cell text.
std::string coef_cell(const csv::Table& t, const csv::Row& row) {
  const std::string beta = cell(t, row, "beta").empty() ? cell(t, row, "coef") : cell(t, row, "beta");
  if (beta.empty()) return "n/a";
  const std::string se = cell(t, row, "se");
  return beta + cell(t, row, "stars") + (se.empty() ? "" : " (" + se + ")");
}

struct Layout {
  std::vector<std::size_t> widths;
  std::vector<csv::Row> rows;
  void add(csv::Row r) {
    widths.resize(std::max(widths.size(), r.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i) widths[i] = std::max(widths[i], r[i].size());
    rows.push_back(std::move(r));
  }
  void print(std::ostream& out) const {
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i)
        out << (i ? "  " : "") << std::left << std::setw(static_cast<int>(widths[i])) << r[i];
      out << '\n';
    }
  }
};

bool load(const fs::path& dir, const std::string& name, csv::Table& t, RunReport& report) {
  const fs::path p = dir / name;
  if (!fs::exists(p)) {
    report.missing.push_back(name);
    return false;
  }
  try {
    t = csv::read_file(p.string());
  } catch (const Error&) {
    report.missing.push_back(name + " (unreadable)");
    return false;
  }
  return true;
}

const char* kPools[] = {"moved", "unmoved"};
const char* kOutcomes[] = {"pubs", "cites"};

}  // namespace

RunReport build_report(const std::string& dir_name) {
  RunReport report;
  const fs::path dir(dir_name);
  std::ostringstream out;
  out << "Run summary: " << dir_name << "\n";

  if (fs::exists(dir / "FAILED")) {
    std::ifstream in(dir / "FAILED");
    std::stringstream ss;
    ss << in.rdbuf();
    out << "\nRun did not complete:\n" << ss.str();
  }

  csv::Table est;
  if (load(dir, "estimates.csv", est, report)) {
    out << "\nDifference-in-differences (two-way fixed effects)\n";
    Layout t;
    t.add({"Comparison", "Method", "Outcome", "Talent hat×Movement", "#Pairs", "N", "R² (overall)", "Flags"});
    for (const auto& r : est.rows) {
      if (cell(est, r, "subset") != "all") continue;
      t.add({cell(est, r, "comparison"), cell(est, r, "method"), cell(est, r, "outcome"),
             coef_cell(est, r), cell(est, r, "n_pairs"), cell(est, r, "n_obs"), cell(est, r, "r2"),
             cell(est, r, "flags")});
    }
    t.print(out);

    for (const std::string kind : {"discipline=", "cohort="}) {
      out << "\nBreakdown by " << kind.substr(0, kind.size() - 1) << " (separate fits on subset panels)\n";
      Layout b;
      b.add({"Comparison", "Outcome", kind.substr(0, kind.size() - 1), "Estimate", "#Pairs", "N"});
      for (const auto& r : est.rows) {
        const std::string subset = cell(est, r, "subset");
        if (subset.rfind(kind, 0) != 0) continue;
        b.add({cell(est, r, "comparison"), cell(est, r, "outcome"), subset.substr(kind.size()),
               coef_cell(est, r), cell(est, r, "n_pairs"), cell(est, r, "n_obs")});
      }
      if (b.rows.size() == 1) out << "(none)\n";
      else b.print(out);
    }
  }

  for (const char* pool : kPools)
    for (const char* outcome : kOutcomes) {
      const std::string name = std::string("event_") + pool + "_" + outcome + ".csv";
      csv::Table ev;
      if (!load(dir, name, ev, report)) continue;
      out << "\nEvent study, " << (std::string(pool) == "moved" ? "G_w vs G_1" : "G_w vs G_2")
          << ", " << outcome << "\n";
      Layout t;
      t.add({"T", "Estimate", "95% CI", "Flags"});
      for (const auto& r : ev.rows) {
        const std::string lo = cell(ev, r, "ci_lo"), hi = cell(ev, r, "ci_hi");
        t.add({cell(ev, r, "T"), coef_cell(ev, r), lo.empty() ? "" : "[" + lo + ", " + hi + "]",
               cell(ev, r, "flags")});
      }
      t.print(out);
    }

  for (const char* pool : kPools)
    for (const char* outcome : kOutcomes) {
      const std::string name = std::string("balance_") + pool + "_" + outcome + ".csv";
      csv::Table bal;
      if (!load(dir, name, bal, report)) continue;
      out << "\nPre-period balance, " << pool << " pool, " << outcome << "\n";
      Layout t;
      t.add({"Year", "Exact stage", "Refined", "N exact", "N refined"});
      for (const auto& r : bal.rows) {
        auto pair = [&](const char* coef, const char* se, const char* stars) {
          const std::string c = cell(bal, r, coef);
          return c.empty() ? std::string("n/a") : c + cell(bal, r, stars) + " (" + cell(bal, r, se) + ")";
        };
        t.add({cell(bal, r, "year"), pair("coef_exact", "se_exact", "stars_exact"),
               pair("coef_refined", "se_refined", "stars_refined"), cell(bal, r, "n_exact"),
               cell(bal, r, "n_refined")});
      }
      t.print(out);
    }

  // A logit that could not be fitted leaves an error file instead of tables.
  auto logit_error = [&](const std::string& outcome) {
    std::ifstream in(dir / ("logit_" + outcome + ".error.txt"));
    std::string line;
    return in && std::getline(in, line) ? line : std::string{};
  };

  for (const char* outcome : kOutcomes) {
    const std::string name = std::string("logit_") + outcome + ".csv";
    if (const auto why = logit_error(outcome); !why.empty() && !fs::exists(dir / name)) {
      out << "\nLogit (" << outcome << "): not estimated: " << why << "\n";
      continue;
    }
    csv::Table lg;
    if (!load(dir, name, lg, report)) continue;
    out << "\nLogit, success above the talent median (" << outcome << ")\n";
    Layout t;
    t.add({"Term", "Estimate"});
    for (const auto& r : lg.rows) t.add({cell(lg, r, "term"), coef_cell(lg, r)});
    if (!lg.rows.empty()) {
      t.add({"N", cell(lg, lg.rows.front(), "n_obs")});
      t.add({"Pseudo-R² (McFadden)", cell(lg, lg.rows.front(), "pseudo_r2")});
    }
    t.print(out);
  }

  for (const char* outcome : kOutcomes) {
    const std::string name = std::string("margins_") + outcome + ".csv";
    if (!logit_error(outcome).empty() && !fs::exists(dir / name)) continue;
    csv::Table m;
    if (load(dir, name, m, report))
      out << "\nMargins curves (" << outcome << "): " << m.rows.size() << " points in " << name << "\n";
  }

  out << "\nMissing artifacts: ";
  if (report.missing.empty()) {
    out << "none\n";
  } else {
    out << report.missing.size() << "\n";
    for (const auto& m : report.missing) out << "  - " << m << "\n";
  }
  report.text = out.str();
  return report;
}

RunReport write_report(const std::string& dir_name) {
  const fs::path dir(dir_name);
  fs::create_directories(dir);
  RunReport report = build_report(dir_name);
  {
    std::ofstream out(dir / "report.txt");
    if (!out) throw IoError("cannot write report.txt in " + dir_name);
    out << report.text;
  }

  if (fs::exists(dir / "estimates.csv")) {
    const csv::Table est = csv::read_file((dir / "estimates.csv").string());
    csv::Table sub{{"comparison", "outcome", "dimension", "level", "beta", "se", "stars", "n_pairs", "n_obs"}, {}};
    for (const auto& r : est.rows) {
      const std::string subset = cell(est, r, "subset");
      const auto eq = subset.find('=');
      if (eq == std::string::npos) continue;
      sub.rows.push_back({cell(est, r, "comparison"), cell(est, r, "outcome"), subset.substr(0, eq),
                          subset.substr(eq + 1), cell(est, r, "beta"), cell(est, r, "se"),
                          cell(est, r, "stars"), cell(est, r, "n_pairs"), cell(est, r, "n_obs")});
    }
    csv::write_file((dir / "subgroups.csv").string(), sub);
  }

  csv::Table series{{"comparison", "outcome", "T", "beta", "se", "ci_lo", "ci_hi", "flags"}, {}};
  bool any = false;
  for (const char* pool : kPools)
    for (const char* outcome : kOutcomes) {
      const fs::path p = dir / (std::string("event_") + pool + "_" + outcome + ".csv");
      if (!fs::exists(p)) continue;
      any = true;
      const csv::Table ev = csv::read_file(p.string());
      for (const auto& r : ev.rows)
        series.rows.push_back({std::string(pool) == "moved" ? "G_w vs G_1" : "G_w vs G_2", outcome,
                               cell(ev, r, "T"), cell(ev, r, "beta"), cell(ev, r, "se"),
                               cell(ev, r, "ci_lo"), cell(ev, r, "ci_hi"), cell(ev, r, "flags")});
    }
  if (any) csv::write_file((dir / "event_series.csv").string(), series);
  return report;
}

}  // namespace hatmatch
