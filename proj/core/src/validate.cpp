#include "hatmatch/validate.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

#include "hatmatch/csv.hpp"
#include "hatmatch/mobility.hpp"

namespace hatmatch {

const ValidationCheck* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

namespace fs = std::filesystem;

double cell(const csv::Table& t, const csv::Row& row, const char* name) {
  const int c = t.column(name);
  if (c < 0 || c >= static_cast<int>(row.size()) || row[c].empty()) return std::nan("");
  return std::stod(row[c]);
}

std::string text(const csv::Table& t, const csv::Row& row, const char* name) {
  const int c = t.column(name);
  return c < 0 || c >= static_cast<int>(row.size()) ? std::string{} : row[c];
}

const char* comparison_for(const std::string& pool) {
  return pool == "moved" ? "G_w vs G_1" : "G_w vs G_2";
}

bool constant_profile(const std::vector<double>& effects) {
  return std::all_of(effects.begin(), effects.end(), [&](double e) { return e == effects.front(); });
}

}  // namespace

ValidationReport validate_run(const std::string& dir, const GroundTruth& truth,
                              const ValidationTolerances& tol) {
  ValidationReport report;
  auto path = [&](const std::string& name) { return (fs::path(dir) / name).string(); };
  auto present = [&](const std::string& name) {
    if (fs::exists(path(name))) return true;
    report.missing.push_back(name);
    return false;
  };

  if (present("labels.csv")) {
    const GroupAssignment labels = read_labels_csv(path("labels.csv"));
    std::set<AuthorId> planted;
    for (const auto& id : truth.movers()) planted.insert(id);
    std::set<AuthorId> detected;
    for (const auto& l : labels.labels)
      if (l.group == Group::Gw || l.group == Group::G1 || (l.group == Group::None && l.y_w))
        detected.insert(l.author_id);
    int hits = 0;
    for (const auto& id : detected) hits += static_cast<int>(planted.count(id));
    const double precision = detected.empty() ? (planted.empty() ? 1.0 : 0.0)
                                              : static_cast<double>(hits) / detected.size();
    const double recall = planted.empty() ? 1.0 : static_cast<double>(hits) / planted.size();
    ValidationCheck c{"movers_recovered", precision == 1.0 && recall == 1.0, std::min(precision, recall),
                      1.0, 1.0 - std::min(precision, recall), ""};
    std::ostringstream d;
    d << "precision=" << precision << " recall=" << recall << " planted=" << planted.size()
      << " detected=" << detected.size();
    c.detail = d.str();
    report.checks.push_back(std::move(c));
  }

  if (present("estimates.csv")) {
    const csv::Table est = csv::read_file(path("estimates.csv"));
    for (const std::string pool : {"moved", "unmoved"}) {
      for (const std::string outcome : {"pubs", "cites"}) {
        const csv::Row* row = nullptr;
        for (const auto& r : est.rows)
          if (text(est, r, "model") == "did" && text(est, r, "comparison") == comparison_for(pool) &&
              text(est, r, "outcome") == outcome && text(est, r, "subset") == "all")
            row = &r;
        if (!row) {
          report.missing.push_back("estimates.csv:did/" + pool + "/" + outcome);
          continue;
        }
        const double beta = cell(est, *row, "beta"), se = cell(est, *row, "se");
        ValidationCheck c;
        c.name = "did_" + outcome + "_" + pool;
        c.observed = beta;
        if (outcome == "pubs") {
          if (!constant_profile(truth.pub_effects)) continue;  // checked through the event study
          c.expected = truth.pub_effects.front();
          c.deviation = std::abs(beta - c.expected);
          const double bound = truth.noiseless ? tol.did_abs : tol.noisy_z * se;
          c.passed = std::isfinite(beta) && c.deviation <= bound;
          c.detail = "bound=" + csv::num(bound, 8);
        } else {
          c.expected = truth.delta_cite;
          c.deviation = std::abs(beta - c.expected);
          const double bound = truth.noiseless ? tol.cite_abs : std::max(tol.cite_abs, tol.noisy_z * se);
          const bool sign_ok = truth.delta_cite == 0.0 || (beta > 0) == (truth.delta_cite > 0);
          c.passed = std::isfinite(beta) && sign_ok && c.deviation <= bound;
          c.detail = "bound=" + csv::num(bound, 8) + (sign_ok ? "" : " wrong_sign");
        }
        report.checks.push_back(std::move(c));
      }
    }
  }

  for (const std::string pool : {"moved", "unmoved"}) {
    const std::string name = "event_" + pool + "_pubs.csv";
    if (!present(name)) continue;
    const csv::Table ev = csv::read_file(path(name));
    ValidationCheck c;
    c.name = "event_profile_" + pool;
    c.passed = true;
    int used = 0;
    for (const auto& r : ev.rows) {
      const int h = std::stoi(text(ev, r, "T"));
      const double beta = cell(ev, r, "beta"), se = cell(ev, r, "se");
      if (!std::isfinite(beta) || h < 1 || h > static_cast<int>(truth.pub_effects.size())) continue;
      ++used;
      const double expected = truth.pub_effects[static_cast<std::size_t>(h - 1)];
      const double dev = std::abs(beta - expected);
      const double bound = truth.noiseless ? tol.did_abs : tol.noisy_z * se;
      if (dev > c.deviation) {
        c.deviation = dev;
        c.observed = beta;
        c.expected = expected;
      }
      if (dev > bound) c.passed = false;
    }
    if (used == 0) c.passed = false;
    c.detail = "horizons=" + std::to_string(used);
    report.checks.push_back(std::move(c));
  }

  if (present("logit_pubs.csv")) {
    const csv::Table lg = csv::read_file(path("logit_pubs.csv"));
    for (const auto& [predictor, sign] : truth.logit_signs) {
      ValidationCheck c;
      c.name = "logit_sign_" + predictor;
      c.expected = sign;
      c.passed = false;
      c.detail = "term absent";
      for (const auto& r : lg.rows) {
        if (text(lg, r, "term") != predictor) continue;
        c.observed = cell(lg, r, "coef");
        c.passed = std::isfinite(c.observed) && (c.observed > 0 ? 1 : -1) == sign && c.observed != 0.0;
        c.deviation = c.passed ? 0.0 : 1.0;
        c.detail = "coef=" + csv::num(c.observed, 4);
      }
      report.checks.push_back(std::move(c));
    }
  }

  const bool all_pass = std::all_of(report.checks.begin(), report.checks.end(),
                                    [](const ValidationCheck& c) { return c.passed; });
  if (!all_pass) report.status = "fail";
  else if (!report.missing.empty()) report.status = "incomplete";
  else report.status = "pass";
  return report;
}

ValidationCheck coverage_check(std::span<const DIDEstimate> reps, double delta, double lo, double hi) {
  int covered = 0;
  for (const auto& r : reps)
    if (r.ci_lo <= delta && delta <= r.ci_hi) ++covered;
  ValidationCheck c;
  c.name = "did_coverage";
  c.observed = reps.empty() ? 0.0 : static_cast<double>(covered) / reps.size();
  c.expected = 0.95;
  c.deviation = std::abs(c.observed - c.expected);
  c.passed = !reps.empty() && c.observed >= lo && c.observed <= hi;
  c.detail = std::to_string(covered) + "/" + std::to_string(reps.size()) + " intervals cover";
  return c;
}

std::string format_validation_report(const ValidationReport& report) {
  std::ostringstream out;
  out << "validation: " << report.status << '\n';
  for (const auto& c : report.checks)
    out << (c.passed ? "PASS " : "FAIL ") << c.name << " observed=" << csv::num(c.observed, 8)
        << " expected=" << csv::num(c.expected, 8) << " deviation=" << csv::num(c.deviation, 10)
        << (c.detail.empty() ? "" : " (" + c.detail + ")") << '\n';
  for (const auto& m : report.missing) out << "MISSING " << m << '\n';
  return out.str();
}

}  // namespace hatmatch
