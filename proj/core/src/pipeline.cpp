#include "hatmatch/pipeline.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "hatmatch/balance.hpp"
#include "hatmatch/cem.hpp"
#include "hatmatch/csv.hpp"
#include "hatmatch/dom.hpp"
#include "hatmatch/error.hpp"
#include "hatmatch/report.hpp"
#include "json.hpp"

#ifndef HATMATCH_VERSION
#define HATMATCH_VERSION "dev"
#endif

namespace hatmatch {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::set<std::string> kTopLevelKeys{"inputs", "destination_country", "caps", "window",
                                          "match", "estimate", "seed", "output", "corpus",
                                          "eligibility"};

const json* object_at(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) return nullptr;
  if (!it->is_object()) throw ConfigError(std::string("config key '") + key + "' must be an object");
  return &*it;
}

template <typename T>
void read(const json* j, const char* section, const char* key, T& out) {
  if (!j) return;
  auto it = j->find(key);
  if (it == j->end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + section + key + "' has the wrong type");
  }
}

std::string resolve(const std::string& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path.string() : (fs::path(base) / path).lexically_normal().string();
}

std::pair<int, int> read_range(const json* window, const char* key, std::pair<int, int> fallback) {
  if (!window || !window->contains(key)) return fallback;
  const json& v = window->at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
    throw ConfigError(std::string("config key 'window.") + key + "' must be [first, last]");
  return {v[0].get<int>(), v[1].get<int>()};
}

}  // namespace

PipelineConfig pipeline_config_from_json(const std::string& text, const std::string& base_dir) {
  const json j = json::parse(text, nullptr, false, true);
  if (j.is_discarded() || !j.is_object()) throw ConfigError("config is not a JSON object");
  for (const auto& [key, value] : j.items())
    if (!kTopLevelKeys.count(key)) throw ConfigError("unknown config key '" + key + "'");

  PipelineConfig c;
  const json* inputs = object_at(j, "inputs");
  if (!inputs) throw ConfigError("config key 'inputs' is required");
  if (!inputs->contains("works")) throw ConfigError("config key 'inputs.works' is required");
  const json& works = inputs->at("works");
  if (works.is_string()) {
    c.works_as_written.push_back(works.get<std::string>());
  } else if (works.is_array() && !works.empty()) {
    for (const auto& w : works) {
      if (!w.is_string()) throw ConfigError("config key 'inputs.works' must list file paths");
      c.works_as_written.push_back(w.get<std::string>());
    }
  } else {
    throw ConfigError("config key 'inputs.works' must be a path or a non-empty list of paths");
  }
  for (const auto& w : c.works_as_written) c.works.push_back(resolve(base_dir, w));
  std::string format = "flat";
  read(inputs, "inputs.", "format", format);
  try {
    c.format = parse_works_format(format);
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("inputs.format: ") + e.what());
  }
  read(inputs, "inputs.", "roster", c.roster_as_written);
  if (c.roster_as_written.empty()) throw ConfigError("config key 'inputs.roster' is required");
  c.roster = resolve(base_dir, c.roster_as_written);

  read(&j, "", "destination_country", c.destination);
  if (c.destination.empty()) throw ConfigError("config key 'destination_country' must not be empty");
  const json* caps = object_at(j, "caps");
  read(caps, "caps.", "moved", c.caps.moved);
  read(caps, "caps.", "unmoved", c.caps.unmoved);
  if (c.caps.moved < 1 || c.caps.unmoved < 1) throw ConfigError("caps must be >= 1");

  const json* window = object_at(j, "window");
  const auto pre = read_range(window, "pre", {-4, 0});
  const auto post = read_range(window, "post", {1, 9});
  if (pre.first > pre.second || post.first > post.second || pre.second != 0 || post.first != 1)
    throw ConfigError("window.pre must end at 0 and window.post must start at 1");
  c.window = {pre.first, post.second};

  const json* match = object_at(j, "match");
  std::string method = "scm";
  read(match, "match.", "method", method);
  try {
    c.method = parse_match_method(method);
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("match.method: ") + e.what());
  }
  read(match, "match.", "gate", c.gate_factor);
  read(match, "match.", "dom_k", c.dom_k);
  read(match, "match.", "y0_tolerance", c.tolerances.y0);
  read(match, "match.", "y_w_tolerance", c.tolerances.y_w);
  if (c.gate_factor < 0 || c.dom_k < 1) throw ConfigError("match.gate must be >= 0 and match.dom_k >= 1");

  const json* estimate = object_at(j, "estimate");
  std::string se = "clustered";
  read(estimate, "estimate.", "se", se);
  try {
    c.se = parse_se_type(se);
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("estimate.se: ") + e.what());
  }

  if (j.contains("seed")) {
    const json& s = j.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0))
      throw ConfigError("config key 'seed' must be a non-negative integer");
    c.seed = s.get<std::uint64_t>();
  }
  std::string output = "out";
  read(&j, "", "output", output);
  c.output_dir = resolve(base_dir, output);

  const json* corpus = object_at(j, "corpus");
  read(corpus, "corpus.", "first_year", c.ingest.first_year);
  read(corpus, "corpus.", "last_year", c.ingest.last_year);
  read(corpus, "corpus.", "include_self_citations", c.include_self_citations);
  if (c.ingest.first_year > c.ingest.last_year) throw ConfigError("corpus.first_year > corpus.last_year");
  c.eligibility.start_min = c.ingest.first_year;
  c.eligibility.other_start_max = c.ingest.last_year;
  const json* elig = object_at(j, "eligibility");
  read(elig, "eligibility.", "min_pubs", c.eligibility.min_pubs);
  read(elig, "eligibility.", "roster_start_max", c.eligibility.roster_start_max);

  c.canonical_json = j.dump();
  return c;
}

PipelineConfig load_pipeline_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  PipelineConfig c = pipeline_config_from_json(ss.str(), fs::path(path).parent_path().string());
  c.config_path = path;
  return c;
}

void check_inputs(const PipelineConfig& config) {
  for (const auto& w : config.works)
    if (!fs::is_regular_file(w)) throw InvalidInput("works file not found: " + w);
  if (!fs::is_regular_file(config.roster)) throw InvalidInput("roster file not found: " + config.roster);
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 computation failed");
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return out.str();
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read file for digest: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

IngestOutput run_ingest(const PipelineConfig& config) {
  check_inputs(config);
  IngestOutput out;
  const auto records = read_works_files(config.works, config.format, out.stats, config.ingest);
  const PanelMap all = build_panels(records, out.stats, {config.include_self_citations});
  std::set<AuthorId> roster_ids;
  for (const auto& r : read_roster_csv(config.roster)) roster_ids.insert(r.author_id);
  out.panels = filter_eligible(all, config.eligibility, roster_ids, &out.stats);
  return out;
}

GroupAssignment run_groups(const PipelineConfig& config, const PanelMap& panels) {
  MobilityOptions options;
  options.destination = config.destination;
  return assign_groups(panels, read_roster_csv(config.roster), options);
}

std::vector<CandidatePool> build_pools(const PanelMap& panels, const GroupAssignment& groups,
                                       PoolKind kind, const PipelineConfig& config) {
  std::vector<Contender> contenders;
  for (const auto& l : groups.labels) {
    if (l.group != Group::G1 && l.group != Group::G2) continue;
    auto it = panels.find(l.author_id);
    if (it != panels.end()) contenders.push_back({&it->second, l.group, l.y_w});
  }
  std::vector<CandidatePool> pools;
  for (const auto* talent : groups.members(Group::Gw)) {
    auto it = panels.find(talent->author_id);
    if (it == panels.end() || !talent->y_w) continue;
    pools.push_back(exact_match(it->second, *talent->y_w, contenders, kind, config.caps,
                                config.tolerances, config.seed));
  }
  return pools;
}

MatchedSet refine_pools(const std::vector<CandidatePool>& pools, const PanelMap& panels,
                        OutcomeKind kind, const PipelineConfig& config) {
  MatchedSet set;
  switch (config.method) {
    case MatchMethod::Exact:
      set = exact_stage_set(pools, kind);
      break;
    case MatchMethod::SCM: {
      RefineOptions options;
      options.gate_factor = config.gate_factor;
      set = refine_scm(pools, panels, kind, options).matched;
      break;
    }
    case MatchMethod::CEM:
      set = refine_cem(pools, panels, kind);
      break;
    case MatchMethod::DOM:
      set = refine_dom(pools, panels, kind, config.dom_k);
      break;
  }
  if (!pools.empty()) set.pool_kind = pools.front().kind;
  return set;
}

std::string comparison_label(PoolKind kind) {
  return kind == PoolKind::Moved ? "G_w vs G_1" : "G_w vs G_2";
}

std::string matches_file(PoolKind kind, OutcomeKind outcome) {
  return "matches_" + to_string(kind) + "_" + to_string(outcome) + ".jsonl";
}
std::string balance_file(PoolKind kind, OutcomeKind outcome) {
  return "balance_" + to_string(kind) + "_" + to_string(outcome) + ".csv";
}
std::string event_file(PoolKind kind, OutcomeKind outcome) {
  return "event_" + to_string(kind) + "_" + to_string(outcome) + ".csv";
}

namespace {

EstimateRow fit_row(const MatchedSet& matched, const PanelMap& panels, const PipelineConfig& config,
                    const std::string& subset, DidPanel* panel_out = nullptr) {
  EstimateRow row{"did", comparison_label(matched.pool_kind), to_string(matched.method),
                  to_string(matched.outcome_kind), subset, {}};
  DidPanel panel = build_did_panel(matched, panels, config.ingest.first_year,
                                   config.ingest.last_year, config.window);
  auto& e = row.estimate;
  e.n_pairs = panel.n_pairs;
  e.n_obs = static_cast<int>(panel.rows.size());
  const double nan = std::nan("");
  if (panel.rows.empty()) {
    e.beta1 = e.se = e.p = e.r2 = nan;
    e.flags.push_back("no_pairs");
  } else {
    try {
      e = twfe_did(panel.rows, {config.se, FeSolver::Within});
      e.n_pairs = panel.n_pairs;
    } catch (const DegenerateFitError& err) {
      e.beta1 = e.se = e.p = e.r2 = nan;
      e.flags.push_back("degenerate:" + err.dimension());
    }
  }
  if (panel.truncated_units > 0) e.flags.push_back("truncated_units=" + std::to_string(panel.truncated_units));
  if (panel.short_post_units > 0) e.flags.push_back("short_post=" + std::to_string(panel.short_post_units));
  if (panel_out) *panel_out = std::move(panel);
  return row;
}

MatchedSet subset_by(const MatchedSet& matched, const std::function<bool(const MatchedEntry&)>& keep) {
  MatchedSet out = matched;
  out.entries.clear();
  for (const auto& e : matched.entries)
    if (keep(e)) out.entries.push_back(e);
  return out;
}

}  // namespace

ModelRun estimate_models(const MatchedSet& matched, const PanelMap& panels, const PipelineConfig& config) {
  ModelRun run;
  DidPanel panel;
  run.main = fit_row(matched, panels, config, "all", &panel);
  run.n_obs = static_cast<int>(panel.rows.size());
  const int last_h = config.window.last;
  if (panel.rows.empty()) {
    for (int h = 1; h <= last_h; ++h) run.event.horizons.push_back({h, 0, 0, 1, 0, 0, false});
    run.event.flags.push_back("no_pairs");
  } else {
    try {
      run.event = event_study(panel.rows, 1, last_h, {config.se, FeSolver::Within});
    } catch (const DegenerateFitError& err) {
      run.event = {};
      for (int h = 1; h <= last_h; ++h) run.event.horizons.push_back({h, 0, 0, 1, 0, 0, false});
      run.event.flags.push_back("degenerate:" + err.dimension());
    }
  }

  auto lead = [&](const MatchedEntry& e) -> const AuthorYearPanel* {
    if (e.treated.empty()) return nullptr;
    auto it = panels.find(e.treated.front().id);
    return it == panels.end() ? nullptr : &it->second;
  };
  std::set<std::string> disciplines;
  std::set<Year> cohorts;
  for (const auto& e : matched.entries) {
    if (e.controls.empty()) continue;
    if (const auto* p = lead(e)) disciplines.insert(p->discipline);
    cohorts.insert(e.treated.front().align_year);
  }
  for (const auto& d : disciplines)
    run.subgroups.push_back(fit_row(
        subset_by(matched, [&](const MatchedEntry& e) { const auto* p = lead(e); return p && p->discipline == d; }),
        panels, config, "discipline=" + d));
  for (Year y : cohorts)
    run.subgroups.push_back(fit_row(
        subset_by(matched, [&](const MatchedEntry& e) { return !e.treated.empty() && e.treated.front().align_year == y; }),
        panels, config, "cohort=" + std::to_string(y)));
  return run;
}

SuccessData build_success_data(const PanelMap& panels, const GroupAssignment& groups,
                               const std::vector<CandidatePool>& moved,
                               const std::vector<CandidatePool>& unmoved,
                               const PipelineConfig& config) {
  SuccessData out;
  struct Obs {
    AuthorId id;
    Year align;
    Group group;
  };
  std::vector<Obs> pooled;
  for (const auto* t : groups.members(Group::Gw))
    if (t->y_w && panels.count(t->author_id)) pooled.push_back({t->author_id, *t->y_w, Group::Gw});
  for (const auto* pools : {&moved, &unmoved})
    for (const auto& pool : *pools)
      for (const auto& c : pool.contenders)
        pooled.push_back({c.id, c.align_year, pool.kind == PoolKind::Moved ? Group::G1 : Group::G2});

  std::vector<double> pub_values, cite_values;
  for (const auto& o : pooled) {
    if (o.group != Group::Gw) continue;
    const auto& p = panels.at(o.id);
    pub_values.push_back(success_value(p, o.align, OutcomeKind::Publications));
    cite_values.push_back(success_value(p, o.align, OutcomeKind::Citations));
  }
  out.median_pubs = median(pub_values);
  out.median_cites = median(cite_values);

  std::map<std::pair<AuthorId, Year>, std::optional<EnvironmentDelta>> cache;
  std::set<std::pair<AuthorId, Year>> written;
  for (const auto& o : pooled) {
    const auto& panel = panels.at(o.id);
    const auto key = std::make_pair(o.id, o.align);
    auto it = cache.find(key);
    std::string reason;
    if (it == cache.end()) {
      std::optional<EnvironmentDelta> delta;
      try {
        delta = environment_delta(panel, o.align);
      } catch (const UndefinedRateError& e) {
        reason = e.what();
      }
      it = cache.emplace(key, delta).first;
      DeltaRow row{o.id, to_string(o.group), o.align, delta.value_or(EnvironmentDelta{o.id}), reason};
      out.deltas.push_back(row);
      if (!std::isnan(out.median_pubs))
        out.outcomes.push_back(success_outcome(panel, o.align, OutcomeKind::Publications,
                                               out.median_pubs, config.ingest.last_year));
      if (!std::isnan(out.median_cites))
        out.outcomes.push_back(success_outcome(panel, o.align, OutcomeKind::Citations,
                                               out.median_cites, config.ingest.last_year));
    }
    if (!it->second) {
      for (const auto& d : out.deltas)
        if (d.author_id == o.id && d.align_year == o.align) reason = d.flags;
      ++out.excluded[reason];
      continue;
    }
    const auto& d = *it->second;
    LogitDesignRow row{o.id, 0, d.d_a, d.d_i, d.d_c, d.d_size, std::to_string(panel.y0),
                       std::to_string(o.align), panel.discipline, to_string(o.group)};
    if (!std::isnan(out.median_pubs)) {
      row.label = success_value(panel, o.align, OutcomeKind::Publications) > out.median_pubs ? 1 : 0;
      out.rows_pubs.push_back(row);
    }
    if (!std::isnan(out.median_cites)) {
      row.label = success_value(panel, o.align, OutcomeKind::Citations) > out.median_cites ? 1 : 0;
      out.rows_cites.push_back(row);
    }
  }
  return out;
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
}

std::vector<MarginPoint> all_margins(const LogitEstimate& est) {
  std::vector<MarginPoint> points;
  for (std::size_t c = 0; c < est.continuous.size(); ++c) {
    const bool rate = est.continuous[c] != "D_size";
    const auto grid = rate ? linear_grid(0.0, 1.0, 11) : linear_grid(est.mins[c], est.maxs[c], 11);
    auto m = margins(est, est.continuous[c], grid);
    points.insert(points.end(), m.begin(), m.end());
  }
  for (const auto& f : est.factors)
    if (f.name == "group") {
      auto m = margins_by_level(est, "group");
      points.insert(points.end(), m.begin(), m.end());
    }
  return points;
}

std::string run_key(PoolKind pool, OutcomeKind outcome) {
  return to_string(pool) + "/" + to_string(outcome);
}

const std::vector<CandidatePool>& pools_of(const std::vector<MatchRun>& runs, PoolKind kind) {
  static const std::vector<CandidatePool> none;
  for (const auto& r : runs)
    if (r.pool == kind) return r.pools;
  return none;
}

}  // namespace

IngestOutput stage_ingest(const PipelineConfig& config, StageLog& log) {
  const fs::path dir(config.output_dir);
  IngestOutput ingest = run_ingest(config);
  write_panels_file((dir / "panels.jsonl").string(), ingest.panels);
  log.counts["records_read"] = ingest.stats.records_read;
  log.counts["records_dropped"] = ingest.stats.total_dropped();
  for (const auto& [reason, n] : ingest.stats.records_dropped) log.counts["records_dropped/" + reason] = n;
  log.counts["authors_built"] = ingest.stats.authors_built;
  log.counts["authors_eligible"] = ingest.stats.authors_eligible;
  log.counts["unknown_country_institutions"] = ingest.stats.unknown_country_institutions;
  if (ingest.stats.citations_from_counts_by_year)
    log.warnings.push_back("no reference links in corpus; citations taken from counts_by_year");
  if (ingest.panels.empty()) log.warnings.push_back("no eligible authors");
  return ingest;
}

GroupAssignment stage_groups(const PipelineConfig& config, const PanelMap& panels, StageLog& log) {
  const fs::path dir(config.output_dir);
  GroupAssignment groups = run_groups(config, panels);
  write_labels_csv((dir / "labels.csv").string(), groups);
  std::string audit;
  for (const auto& line : groups.audit_log) audit += line + "\n";
  write_text(dir / "groups_audit.txt", audit);
  for (auto g : {Group::Gw, Group::G1, Group::G2, Group::None})
    log.counts["authors/" + to_string(g)] = static_cast<std::int64_t>(groups.members(g).size());
  log.counts["all_unknown_country"] = groups.all_unknown_country;
  if (groups.members(Group::Gw).empty()) log.warnings.push_back("no treated authors (G_w is empty)");
  return groups;
}

std::vector<MatchRun> stage_match(const PipelineConfig& config, const PanelMap& panels,
                                  const GroupAssignment& groups, StageLog& log) {
  const fs::path dir(config.output_dir);
  std::vector<MatchRun> runs;
  for (auto kind : {PoolKind::Moved, PoolKind::Unmoved}) {
    auto pools = build_pools(panels, groups, kind, config);
    std::int64_t non_empty = 0, contenders = 0, capped = 0;
    for (const auto& p : pools) {
      non_empty += !p.contenders.empty();
      contenders += static_cast<std::int64_t>(p.contenders.size());
      capped += p.caps_applied;
    }
    const std::string k = "pools/" + to_string(kind);
    log.counts[k + "/treated"] = static_cast<std::int64_t>(pools.size());
    log.counts[k + "/non_empty"] = non_empty;
    log.counts[k + "/contenders"] = contenders;
    log.counts[k + "/caps_applied"] = capped;
    for (auto outcome : {OutcomeKind::Publications, OutcomeKind::Citations})
      runs.push_back({kind, outcome, pools, {}, {}});
  }

  std::vector<std::vector<BalanceRow>> balance(runs.size());
  std::vector<std::future<void>> futures;
  for (std::size_t i = 0; i < runs.size(); ++i)
    futures.push_back(std::async(std::launch::async, [&, i] {
      auto& run = runs[i];
      run.exact = exact_stage_set(run.pools, run.outcome);
      run.exact.pool_kind = run.pool;
      run.refined = refine_pools(run.pools, panels, run.outcome, config);
      run.refined.pool_kind = run.pool;
      if (!run.exact.entries.empty() || !run.refined.entries.empty())
        balance[i] = balance_table(run.exact, run.refined, panels, run.outcome, config.window.first, 0);
    }));
  for (auto& f : futures) f.get();

  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& run = runs[i];
    const std::string key = run_key(run.pool, run.outcome);
    write_matches_jsonl((dir / matches_file(run.pool, run.outcome)).string(), run.refined, run.pools);
    if (balance[i].empty())
      log.warnings.push_back("balance " + key + ": no matched entries");
    else
      write_balance_csv((dir / balance_file(run.pool, run.outcome)).string(), balance[i]);
    log.counts["pairs/" + key] = run.refined.n_pairs();
    for (const auto& [reason, n] : run.refined.failures) log.counts["failures/" + key + "/" + reason] = n;
    if (run.refined.n_pairs() == 0) log.warnings.push_back("no matched pairs for " + key);
  }
  return runs;
}

std::vector<MatchRun> load_match_runs(const PipelineConfig& config) {
  const fs::path dir(config.output_dir);
  std::vector<MatchRun> runs;
  for (auto kind : {PoolKind::Moved, PoolKind::Unmoved})
    for (auto outcome : {OutcomeKind::Publications, OutcomeKind::Citations}) {
      const fs::path p = dir / matches_file(kind, outcome);
      if (!fs::exists(p)) throw InvalidInput("missing match artifact: " + p.string() + " (run the match stage first)");
      MatchesFile file = read_matches_jsonl(p.string());
      MatchRun run{kind, outcome, std::move(file.pools), {}, std::move(file.matched)};
      run.exact = exact_stage_set(run.pools, outcome);
      run.exact.pool_kind = kind;
      run.refined.pool_kind = kind;
      runs.push_back(std::move(run));
    }
  return runs;
}

void stage_estimate(const PipelineConfig& config, const PanelMap& panels,
                    const GroupAssignment& groups, const std::vector<MatchRun>& runs,
                    StageLog& log) {
  const fs::path dir(config.output_dir);
  std::vector<ModelRun> models(runs.size());
  {
    std::vector<std::future<void>> futures;
    for (std::size_t i = 0; i < runs.size(); ++i)
      futures.push_back(std::async(std::launch::async, [&, i] {
        models[i] = estimate_models(runs[i].refined, panels, config);
      }));
    for (auto& f : futures) f.get();
  }
  std::vector<EstimateRow> rows;
  for (const auto& m : models) rows.push_back(m.main);
  for (const auto& m : models) rows.insert(rows.end(), m.subgroups.begin(), m.subgroups.end());
  write_estimates_csv((dir / "estimates.csv").string(), rows);
  for (std::size_t i = 0; i < runs.size(); ++i) {
    write_event_csv((dir / event_file(runs[i].pool, runs[i].outcome)).string(), models[i].event);
    log.counts["observations/did/" + run_key(runs[i].pool, runs[i].outcome)] = models[i].n_obs;
    for (const auto& f : models[i].main.estimate.flags)
      if (f.rfind("degenerate", 0) == 0)
        log.warnings.push_back("did " + run_key(runs[i].pool, runs[i].outcome) + ": " + f);
  }

  const SuccessData success = build_success_data(panels, groups, pools_of(runs, PoolKind::Moved),
                                                  pools_of(runs, PoolKind::Unmoved), config);
  write_deltas_csv((dir / "deltas.csv").string(), success.deltas);
  write_outcomes_csv((dir / "outcomes.csv").string(), success.outcomes);
  for (const auto& [reason, n] : success.excluded) log.counts["logit_excluded/" + reason] = n;
  for (auto metric : {OutcomeKind::Publications, OutcomeKind::Citations}) {
    const auto& lrows = metric == OutcomeKind::Publications ? success.rows_pubs : success.rows_cites;
    const std::string tag = to_string(metric);
    fs::remove(dir / ("logit_" + tag + ".error.txt"));
    try {
      const LogitEstimate est = logit_fit(lrows);
      write_logit_csv((dir / ("logit_" + tag + ".csv")).string(), est);
      write_margins_csv((dir / ("margins_" + tag + ".csv")).string(), all_margins(est));
      log.counts["observations/logit/" + tag] = est.n_obs;
      for (const auto& line : est.log) log.warnings.push_back("logit " + tag + ": " + line);
      if (est.quasi_separation) log.warnings.push_back("logit " + tag + ": fitted probabilities at 0 or 1");
    } catch (const Error& e) {
      // A separated or empty design is reported, not fatal.
      log.warnings.push_back("logit " + tag + " not estimated: " + e.what());
      write_text(dir / ("logit_" + tag + ".error.txt"), std::string(e.what()) + "\n");
    }
  }
}

PipelineStatus run_pipeline(const PipelineConfig& config, std::ostream* log) {
  std::ostream& say = log ? *log : std::clog;
  try {
    check_inputs(config);
  } catch (const Error& e) {
    return {2, "config", e.what()};
  }
  const fs::path dir(config.output_dir);
  std::string stage = "setup";
  StageLog stages;
  std::map<std::string, double> timings;
  auto start = std::chrono::steady_clock::now();
  auto lap = [&](const std::string& name) {
    const auto now = std::chrono::steady_clock::now();
    timings[name] = std::chrono::duration<double, std::milli>(now - start).count();
    start = now;
  };
  try {
    fs::create_directories(dir);
    fs::remove(dir / "FAILED");

    stage = "ingest";
    const IngestOutput ingest = stage_ingest(config, stages);
    say << "[ingest] " << ingest.panels.size() << " eligible authors\n";
    lap(stage);

    stage = "groups";
    const GroupAssignment groups = stage_groups(config, ingest.panels, stages);
    say << "[groups] G_w=" << groups.members(Group::Gw).size()
        << " G_1=" << groups.members(Group::G1).size() << " G_2=" << groups.members(Group::G2).size() << '\n';
    lap(stage);

    stage = "match";
    const auto runs = stage_match(config, ingest.panels, groups, stages);
    say << "[match] method=" << to_string(config.method) << '\n';
    lap(stage);

    stage = "estimate";
    stage_estimate(config, ingest.panels, groups, runs, stages);
    say << "[estimate] estimates.csv written\n";
    lap(stage);

    stage = "manifest";
    json manifest;
    manifest["tool"] = "hatmatch";
    manifest["version"] = HATMATCH_VERSION;
    manifest["config_sha256"] = sha256_hex(config.canonical_json);
    manifest["seed"] = config.seed;
    manifest["method"] = to_string(config.method);
    manifest["se"] = to_string(config.se);
    json inputs = json::array();
    for (std::size_t i = 0; i < config.works.size(); ++i)
      inputs.push_back({{"path", config.works_as_written[i]}, {"sha256", sha256_file(config.works[i])}});
    inputs.push_back({{"path", config.roster_as_written}, {"sha256", sha256_file(config.roster)}});
    manifest["inputs"] = std::move(inputs);
    manifest["counts"] = stages.counts;
    manifest["warnings"] = stages.warnings;
    manifest["timings_ms"] = timings;
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");

    stage = "report";
    write_report(config.output_dir);
    for (const auto& w : stages.warnings) say << "[warn] " << w << '\n';
    say << "[done] artifacts in " << config.output_dir << '\n';
  } catch (const std::exception& e) {
    try {
      fs::create_directories(dir);
      write_text(dir / "FAILED", "stage: " + stage + "\nerror: " + e.what() + "\n");
    } catch (const std::exception&) {
    }
    return {1, stage, e.what()};
  }
  return {};
}

}  // namespace hatmatch
