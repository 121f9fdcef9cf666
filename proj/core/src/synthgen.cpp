#include "hatmatch/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include "hatmatch/error.hpp"
#include "hatmatch/rng.hpp"
#include "json.hpp"

namespace hatmatch {

using nlohmann::json;

namespace {

constexpr Year kAnchor = 2005;  // start of the linear baseline
constexpr int kBands = 2;       // career-start bands per discipline
constexpr Year kBandStart[kBands] = {2000, 2003};

struct Offset {
  double p, c;
};
// Corner donors: every interior talent is a bilinear (convex) combination.
constexpr Offset kCorners[4] = {{-2, -4}, {2, -4}, {-2, 4}, {2, 4}};
// Extra pool members: mostly low decoys plus a few strong performers.
constexpr Offset kMoverExtras[] = {{-2, -4}, {3, 0}, {-2, -4}, {-1, -2}};
constexpr Offset kStayerExtras[] = {{-2, -4}, {3, 0}, {-2, -4}, {-1, -2}, {-2, -4},
                                    {3, 0},   {0, -4}, {-2, 0}, {-2, -4}};
constexpr Offset kOutsideTalent{3, 5};
constexpr double kTalentP[3] = {-1, 0, 1};
constexpr double kTalentC[3] = {-2, 0, 2};

std::string pad(int v, int width) {
  std::string s = std::to_string(v);
  return std::string(width > static_cast<int>(s.size()) ? width - s.size() : 0, '0') + s;
}

bool is_integer(double v) { return std::abs(v - std::round(v)) < 1e-12; }

template <typename T>
void read_key(const json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("synthetic config key '") + key + "' has the wrong type");
  }
}

}  // namespace

double SynthConfig::effect_at(int horizon) const {
  if (horizon < 1) return 0.0;
  if (delta_pub_profile.empty()) return delta_pub;
  const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(horizon - 1),
                                              delta_pub_profile.size() - 1);
  return delta_pub_profile[i];
}

SynthConfig synth_config_from_json(const std::string& text) {
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ConfigError("synthetic config is not a JSON object");
  SynthConfig c;
  if (!j.contains("seed")) throw ConfigError("synthetic config key 'seed' is required");
  read_key(j, "seed", c.seed);
  c.has_seed = true;
  read_key(j, "n_talents", c.n_talents);
  read_key(j, "n_movers", c.n_movers);
  read_key(j, "n_stayers", c.n_stayers);
  read_key(j, "n_near_miss", c.n_near_miss);
  read_key(j, "n_disciplines", c.n_disciplines);
  read_key(j, "first_year", c.first_year);
  read_key(j, "last_year", c.last_year);
  read_key(j, "cohorts", c.cohorts);
  read_key(j, "destination", c.destination);
  read_key(j, "origins", c.origins);
  read_key(j, "delta_pub", c.delta_pub);
  read_key(j, "delta_pub_profile", c.delta_pub_profile);
  read_key(j, "delta_cite", c.delta_cite);
  read_key(j, "noiseless", c.noiseless);
  read_key(j, "pub_slope", c.pub_slope);
  read_key(j, "cite_slope", c.cite_slope);
  read_key(j, "pub_level", c.pub_level);
  read_key(j, "cite_level", c.cite_level);
  read_key(j, "convex_fraction", c.convex_fraction);
  if (auto t = j.find("turnover"); t != j.end()) {
    if (!t->is_object()) throw ConfigError("synthetic config key 'turnover' must be an object");
    read_key(*t, "a_slope", c.turnover_a_slope);
    read_key(*t, "c_slope", c.turnover_c_slope);
    read_key(*t, "noise", c.turnover_noise);
  }
  validate_synth_config(c);
  return c;
}

SynthConfig read_synth_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open synthetic config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return synth_config_from_json(ss.str());
}

void validate_synth_config(const SynthConfig& c) {
  if (!c.has_seed) throw ConfigError("synthetic config: seed is mandatory");
  if (c.n_talents < 0 || c.n_movers < 0 || c.n_stayers < 0 || c.n_near_miss < 0)
    throw ConfigError("synthetic config: author counts must be >= 0");
  if (c.n_disciplines < 1) throw ConfigError("synthetic config: n_disciplines must be >= 1");
  if (c.cohorts.empty()) throw ConfigError("synthetic config: cohorts must not be empty");
  if (c.origins.empty()) throw ConfigError("synthetic config: origins must not be empty");
  for (const auto& o : c.origins)
    if (o == c.destination) throw ConfigError("synthetic config: origin equals destination " + o);
  if (c.first_year > kBandStart[0] || c.last_year < kAnchor + 10)
    throw ConfigError("synthetic config: year range must cover 2000.." + std::to_string(kAnchor + 10));
  for (Year y : c.cohorts)
    if (y - 6 < kAnchor - 1 || y + 1 > c.last_year)
      throw ConfigError("synthetic config: cohort " + std::to_string(y) + " outside [" +
                        std::to_string(kAnchor + 5) + ", last_year - 1]");
  if (c.pub_slope < 0 || c.cite_slope < 0 || c.pub_level < 0 || c.cite_level < 0)
    throw ConfigError("synthetic config: rates must be >= 0");
  if (c.convex_fraction < 0 || c.convex_fraction > 1)
    throw ConfigError("synthetic config: convex_fraction must lie in [0, 1]");
  if (c.delta_pub_profile.size() > 9)
    throw ConfigError("synthetic config: delta_pub_profile has more than 9 horizons");
  if (c.noiseless) {
    bool ok = is_integer(c.pub_slope) && is_integer(c.cite_slope) && is_integer(c.pub_level) &&
              is_integer(c.cite_level) && is_integer(c.delta_pub);
    for (double d : c.delta_pub_profile) ok = ok && is_integer(d);
    if (!ok)
      throw ConfigError(
          "synthetic config: noiseless mode needs integer levels, slopes and publication effects");
  }
  const int cells = c.n_disciplines * kBands;
  if (c.n_talents > 0 && c.convex_fraction > 0 &&
      (c.n_movers < 4 * cells || c.n_stayers < 4 * cells))
    throw ConfigError("synthetic config infeasible: convex_fraction > 0 needs at least " +
                      std::to_string(4 * cells) + " movers and stayers (4 donors per cell)");
  // Smallest yearly mean inside the linear region.
  const Year latest_align = *std::max_element(c.cohorts.begin(), c.cohorts.end()) + 1;
  const double p_min = c.pub_level - 2 - c.pub_slope * (latest_align - kAnchor);
  const double c_min = c.cite_level - 4 - c.cite_slope * (latest_align - kAnchor);
  if (p_min < 1 || c_min < 0)
    throw ConfigError("synthetic config: baseline rates drop below one paper a year; raise "
                      "pub_level / cite_level or use earlier cohorts");
}

std::string to_string(SynthRole role) {
  switch (role) {
    case SynthRole::Talent: return "talent";
    case SynthRole::Mover: return "mover";
    case SynthRole::Stayer: return "stayer";
    case SynthRole::NearMiss: return "near_miss";
  }
  return "stayer";
}

namespace {

SynthRole parse_role(const std::string& s) {
  if (s == "talent") return SynthRole::Talent;
  if (s == "mover") return SynthRole::Mover;
  if (s == "stayer") return SynthRole::Stayer;
  if (s == "near_miss") return SynthRole::NearMiss;
  throw InvalidInput("unknown synthetic role '" + s + "'");
}

std::string discipline_name(int d) { return "disc" + pad(d + 1, 2); }

struct AuthorOutput {
  std::vector<PublicationRecord> records;
  std::map<Year, double> pub_means, cite_means;
  std::map<Year, std::int64_t> cites;
  std::string first_paper;
  SynthAuthor author;
};

AuthorOutput build_author(SynthAuthor a, const SynthConfig& cfg) {
  SplitMix rng(keyed_hash(cfg.seed, a.id, "papers"));
  AuthorOutput out;
  const bool near_miss = a.role == SynthRole::NearMiss;
  const bool moves = a.move_year.has_value();
  const Year align = a.align_year;

  // Yearly means and counts.
  const double pub_intercept = cfg.pub_level + a.pub_offset - cfg.pub_slope * (align - kAnchor);
  const double cite_intercept = cfg.cite_level + a.cite_offset - cfg.cite_slope * (align - kAnchor);
  std::map<Year, int> pubs;
  for (Year y = a.y0; y <= cfg.last_year; ++y) {
    double mp = 1.0, mc = 1.0;
    if (near_miss) {
      mp = 2.0;
      mc = 2.0;
    } else if (y >= kAnchor) {
      mp = pub_intercept + cfg.pub_slope * (y - kAnchor);
      mc = cite_intercept + cfg.cite_slope * (y - kAnchor);
      if (a.role == SynthRole::Talent && y > *a.move_year) {
        mp += cfg.effect_at(y - *a.move_year);
        mc *= std::exp(cfg.delta_cite);
      }
    }
    if (mp < 0 || mc < 0) throw ConfigError("synthetic config produces negative rates for " + a.id);
    out.pub_means[y] = mp;
    out.cite_means[y] = mc;
    if (cfg.noiseless) {
      pubs[y] = std::max(1, static_cast<int>(std::llround(mp)));
      out.cites[y] = std::llround(mc);
    } else {
      pubs[y] = std::max(1, rng.poisson(mp));
      out.cites[y] = rng.poisson(mc);
    }
  }

  const Year pre_first = align - 5, pre_last = align - 1;
  const Year post_first = align, post_last = align + 4;
  int n_pre = 0, n_post = 0;
  for (const auto& [y, n] : pubs) {
    if (y >= pre_first && y <= pre_last) n_pre += n;
    if (y >= post_first && y <= post_last) n_post += n;
  }

  // Institutions (own affiliations).
  struct Inst {
    std::string id, country;
  };
  auto inst = [&](int k, const std::string& cc) { return Inst{"I" + a.id + "-" + std::to_string(k), cc}; };
  std::vector<Inst> inst_pre{inst(1, a.origin), inst(2, a.origin)};
  std::vector<Inst> inst_post;
  int new_inst = 0;
  if (moves) {
    new_inst = a.tau_i < 0.5 ? 1 : 2;
    inst_post.push_back(inst(3, cfg.destination));
    if (new_inst == 2) inst_post.push_back(inst(4, cfg.destination));
    else inst_post.push_back(inst_pre[0]);
  } else {
    new_inst = a.tau_i < 1.0 / 3 ? 0 : (a.tau_i < 2.0 / 3 ? 1 : 2);
    for (int k = 0; k < new_inst; ++k) inst_post.push_back(inst(3 + k, a.origin));
    for (int k = 0; k < 2 - new_inst; ++k) inst_post.push_back(inst_pre[static_cast<std::size_t>(k)]);
  }

  // Level >= 2 topics.
  const int n_topics = 10;
  const int new_topics = static_cast<int>(std::lround(a.tau_c * n_topics));
  std::vector<std::string> topic_pre, topic_post;
  for (int k = 0; k < n_topics; ++k) topic_pre.push_back("K" + a.id + "-" + std::to_string(k));
  for (int k = 0; k < n_topics - new_topics; ++k) topic_post.push_back(topic_pre[static_cast<std::size_t>(k)]);
  for (int k = 0; k < new_topics; ++k) topic_post.push_back("K" + a.id + "-" + std::to_string(n_topics + k));

  // Collaborators: each filler stays under four papers per window.
  const int m0 = a.team_pre, m1 = a.team_post;
  const int k0 = std::max(m0, (n_pre * m0 + 3) / 4);
  const int k1 = std::max(m1, (n_post * m1 + 3) / 4);
  int new_collab = static_cast<int>(std::lround(a.tau_a * k1));
  new_collab = std::clamp(new_collab, std::max(0, k1 - k0), k1);
  std::vector<std::string> collab_pre, collab_post;
  for (int k = 0; k < k0; ++k) collab_pre.push_back("F" + a.id + "-" + std::to_string(k));
  for (int k = 0; k < k1 - new_collab; ++k) collab_post.push_back(collab_pre[static_cast<std::size_t>(k)]);
  for (int k = 0; k < new_collab; ++k) collab_post.push_back("F" + a.id + "-" + std::to_string(k0 + k));

  if (!near_miss) {
    a.d_a = static_cast<double>(new_collab) / k1;
    a.d_i = static_cast<double>(new_inst) / 2.0;
    a.d_c = static_cast<double>(new_topics) / n_topics;
    a.d_size = static_cast<double>(m1 - m0);
  }

  const std::string level0 = "T" + a.discipline;
  int pre_index = 0, post_index = 0;
  for (const auto& [y, n] : pubs) {
    for (int k = 0; k < n; ++k) {
      PublicationRecord r;
      r.paper_id = "W" + a.id + "-" + std::to_string(y) + "-" + pad(k, 3);
      r.year = y;
      r.topics.push_back({level0, 0});
      const bool in_pre = y >= pre_first && y <= pre_last;
      const bool in_post = y >= post_first && y <= post_last;
      const bool after = y >= post_first;
      Inst own;
      if (near_miss) {
        own = (y >= 2008 && y <= 2009) ? inst(1, a.origin) : inst(2, cfg.destination);
      } else if (in_pre) {
        own = inst_pre[static_cast<std::size_t>(pre_index % 2)];
      } else if (in_post) {
        own = inst_post[static_cast<std::size_t>(post_index % 2)];
      } else {
        own = after ? inst_post[static_cast<std::size_t>(k % 2)] : inst_pre[static_cast<std::size_t>(k % 2)];
      }
      r.authorships.push_back({a.id, {own.id}});
      r.institution_countries[own.id] = own.country;

      const auto& topics = after ? topic_post : topic_pre;
      const int ti = in_pre ? pre_index : (in_post ? post_index : k);
      r.topics.push_back({topics[static_cast<std::size_t>((2 * ti) % n_topics)], 2});
      r.topics.push_back({topics[static_cast<std::size_t>((2 * ti + 1) % n_topics)], 2});

      if (!near_miss && (in_pre || in_post)) {
        const auto& set = in_pre ? collab_pre : collab_post;
        const int m = in_pre ? m0 : m1;
        const int i = in_pre ? pre_index : post_index;
        for (int q = 0; q < m; ++q)
          r.authorships.push_back({set[static_cast<std::size_t>((i * m + q) % static_cast<int>(set.size()))], {}});
      }
      if (in_pre) ++pre_index;
      if (in_post) ++post_index;
      if (out.first_paper.empty()) out.first_paper = r.paper_id;
      out.records.push_back(std::move(r));
    }
  }
  out.author = std::move(a);
  return out;
}

}  // namespace

std::vector<AuthorId> GroundTruth::movers() const {
  std::vector<AuthorId> ids;
  for (const auto& a : authors)
    if (a.move_year) ids.push_back(a.id);
  return ids;
}

const SynthAuthor* GroundTruth::find(const AuthorId& id) const {
  for (const auto& a : authors)
    if (a.id == id) return &a;
  return nullptr;
}

SynthCorpus generate(const SynthConfig& cfg) {
  validate_synth_config(cfg);
  const int n_cells = cfg.n_disciplines * kBands;
  struct CellInfo {
    std::string discipline;
    Year band;
    Year cohort;
  };
  std::vector<CellInfo> cells;
  for (int c = 0; c < n_cells; ++c)
    cells.push_back({discipline_name(c / kBands), kBandStart[c % kBands],
                     cfg.cohorts[static_cast<std::size_t>(c) % cfg.cohorts.size()]});

  std::vector<SynthAuthor> plan;
  int serial = 0;
  auto next_id = [&] { return "A" + pad(++serial, 4); };
  auto base_author = [&](SynthRole role, int cell) {
    SynthAuthor a;
    a.id = next_id();
    a.role = role;
    a.cell = cell;
    SplitMix rng(keyed_hash(cfg.seed, a.id, "plan"));
    if (cell >= 0) {
      a.discipline = cells[static_cast<std::size_t>(cell)].discipline;
      a.y0 = cells[static_cast<std::size_t>(cell)].band + rng.uniform_int(0, 1);
      a.align_year = cells[static_cast<std::size_t>(cell)].cohort;
    }
    a.origin = cfg.origins[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(cfg.origins.size()) - 1))];
    a.tau_i = rng.uniform();
    a.team_pre = rng.uniform_int(1, 3);
    a.team_post = rng.uniform_int(1, 4);
    return std::pair{a, rng};
  };
  auto turnover = [&](SynthAuthor& a, SplitMix& rng) {
    const double z = a.pub_offset / 2.0;
    a.tau_a = std::clamp(0.5 + cfg.turnover_a_slope * z + cfg.turnover_noise * rng.normal(), 0.0, 1.0);
    a.tau_c = std::clamp(0.5 + cfg.turnover_c_slope * z + cfg.turnover_noise * rng.normal(), 0.0, 1.0);
  };

  const int n_convex = static_cast<int>(std::lround(cfg.convex_fraction * cfg.n_talents));
  for (int i = 0; i < cfg.n_talents; ++i) {
    auto [a, rng] = base_author(SynthRole::Talent, i % n_cells);
    a.move_year = a.align_year;
    a.convex = i < n_convex;
    if (a.convex) {
      a.pub_offset = kTalentP[rng.uniform_int(0, 2)];
      a.cite_offset = kTalentC[rng.uniform_int(0, 2)];
    } else {
      a.pub_offset = kOutsideTalent.p;
      a.cite_offset = kOutsideTalent.c;
    }
    turnover(a, rng);
    plan.push_back(a);
  }
  for (int i = 0; i < cfg.n_movers; ++i) {
    auto [a, rng] = base_author(SynthRole::Mover, i % n_cells);
    const int slot = i / n_cells;
    Offset o;
    if (slot < 4) {
      o = kCorners[slot];
    } else {
      const int e = (slot - 4) % static_cast<int>(std::size(kMoverExtras));
      o = kMoverExtras[e];
      a.align_year += (slot % 3) - 1;  // -1, 0, +1 around the cohort
    }
    a.pub_offset = o.p;
    a.cite_offset = o.c;
    a.move_year = a.align_year;
    turnover(a, rng);
    plan.push_back(a);
  }
  for (int i = 0; i < cfg.n_stayers; ++i) {
    auto [a, rng] = base_author(SynthRole::Stayer, i % n_cells);
    const int slot = i / n_cells;
    const Offset o = slot < 4 ? kCorners[slot]
                              : kStayerExtras[(slot - 4) % static_cast<int>(std::size(kStayerExtras))];
    a.pub_offset = o.p;
    a.cite_offset = o.c;
    turnover(a, rng);
    plan.push_back(a);
  }
  for (int i = 0; i < cfg.n_near_miss; ++i) {
    auto [a, rng] = base_author(SynthRole::NearMiss, -1);
    a.discipline = discipline_name(i % cfg.n_disciplines);
    a.y0 = 2004;
    a.align_year = 2010;
    plan.push_back(a);
  }

  // Per-author generation on independent streams; merged in author order.
  std::vector<std::future<std::vector<AuthorOutput>>> tasks;
  const std::size_t chunk = 32;
  for (std::size_t start = 0; start < plan.size(); start += chunk) {
    tasks.push_back(std::async(std::launch::async, [&, start] {
      std::vector<AuthorOutput> part;
      for (std::size_t i = start; i < std::min(plan.size(), start + chunk); ++i)
        part.push_back(build_author(plan[i], cfg));
      return part;
    }));
  }
  std::vector<AuthorOutput> outputs;
  for (auto& t : tasks)
    for (auto& o : t.get()) outputs.push_back(std::move(o));

  SynthCorpus corpus;
  GroundTruth& truth = corpus.truth;
  truth.seed = cfg.seed;
  truth.noiseless = cfg.noiseless;
  for (int h = 1; h <= 9; ++h) truth.pub_effects.push_back(cfg.effect_at(h));
  truth.delta_cite = cfg.delta_cite;
  if (cfg.turnover_a_slope != 0) truth.logit_signs["D_A"] = cfg.turnover_a_slope > 0 ? 1 : -1;
  if (cfg.turnover_c_slope != 0) truth.logit_signs["D_C"] = cfg.turnover_c_slope > 0 ? 1 : -1;

  // Citations: one single-paper citing author per (year, rank).
  std::map<Year, std::int64_t> max_cites;
  for (const auto& o : outputs)
    for (const auto& [y, n] : o.cites) max_cites[y] = std::max(max_cites[y], n);
  for (auto& o : outputs) {
    for (auto& r : o.records) corpus.records.push_back(std::move(r));
    truth.pub_means[o.author.id] = o.pub_means;
    truth.cite_means[o.author.id] = o.cite_means;
    truth.authors.push_back(o.author);
    if (o.author.role == SynthRole::Talent)
      corpus.roster.push_back({o.author.id, *o.author.move_year});
  }
  for (const auto& [y, k_max] : max_cites) {
    for (std::int64_t k = 0; k < k_max; ++k) {
      PublicationRecord r;
      r.paper_id = "Z" + std::to_string(y) + "-" + pad(static_cast<int>(k), 4);
      r.year = y;
      r.authorships.push_back({r.paper_id, {}});
      for (const auto& o : outputs) {
        auto it = o.cites.find(y);
        if (it != o.cites.end() && it->second > k) r.references.push_back(o.first_paper);
      }
      corpus.records.push_back(std::move(r));
    }
  }

  // Planted convex combinations over the cell's corner donors.
  std::map<std::pair<int, SynthRole>, std::vector<const SynthAuthor*>> corners;
  for (const auto& a : truth.authors) {
    auto& list = corners[{a.cell, a.role}];
    if ((a.role == SynthRole::Mover || a.role == SynthRole::Stayer) && list.size() < 4) list.push_back(&a);
  }
  for (const auto& a : truth.authors) {
    if (a.role != SynthRole::Talent || !a.convex) continue;
    const double u = (a.pub_offset + 2) / 4, v = (a.cite_offset + 4) / 8;
    const double w[4] = {(1 - u) * (1 - v), u * (1 - v), (1 - u) * v, u * v};
    for (auto role : {SynthRole::Mover, SynthRole::Stayer}) {
      const auto& list = corners[{a.cell, role}];
      if (list.size() < 4) continue;
      PlantedCombination pc;
      pc.treated = a.id;
      pc.pool = role == SynthRole::Mover ? "moved" : "unmoved";
      for (int k = 0; k < 4; ++k) {
        pc.donors.push_back(list[static_cast<std::size_t>(k)]->id);
        pc.weights.push_back(w[k]);
      }
      truth.combinations.push_back(std::move(pc));
    }
  }
  return corpus;
}

std::string ground_truth_to_json(const GroundTruth& truth) {
  json j;
  j["seed"] = truth.seed;
  j["noiseless"] = truth.noiseless;
  j["pub_effects"] = truth.pub_effects;
  j["delta_cite"] = truth.delta_cite;
  j["logit_signs"] = truth.logit_signs;
  json authors = json::array();
  for (const auto& a : truth.authors) {
    json x{{"id", a.id},
           {"role", to_string(a.role)},
           {"cell", a.cell},
           {"discipline", a.discipline},
           {"y0", a.y0},
           {"align_year", a.align_year},
           {"origin", a.origin},
           {"pub_offset", a.pub_offset},
           {"cite_offset", a.cite_offset},
           {"tau_a", a.tau_a},
           {"tau_i", a.tau_i},
           {"tau_c", a.tau_c},
           {"team_pre", a.team_pre},
           {"team_post", a.team_post},
           {"d_a", a.d_a},
           {"d_i", a.d_i},
           {"d_c", a.d_c},
           {"d_size", a.d_size},
           {"convex", a.convex}};
    x["move_year"] = a.move_year ? json(*a.move_year) : json(nullptr);
    auto means = [](const std::map<Year, double>& m) {
      json o = json::object();
      for (const auto& [y, v] : m) o[std::to_string(y)] = v;
      return o;
    };
    if (auto it = truth.pub_means.find(a.id); it != truth.pub_means.end()) x["pub_means"] = means(it->second);
    if (auto it = truth.cite_means.find(a.id); it != truth.cite_means.end()) x["cite_means"] = means(it->second);
    authors.push_back(std::move(x));
  }
  j["authors"] = std::move(authors);
  json combos = json::array();
  for (const auto& c : truth.combinations)
    combos.push_back({{"treated", c.treated}, {"pool", c.pool}, {"donors", c.donors}, {"weights", c.weights}});
  j["combinations"] = std::move(combos);
  return j.dump(1);
}

GroundTruth read_ground_truth(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open ground truth: " + path);
  const json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw InvalidInput("ground truth is not valid JSON: " + path);
  GroundTruth t;
  try {
    t.seed = j.at("seed").get<std::uint64_t>();
    t.noiseless = j.at("noiseless").get<bool>();
    t.pub_effects = j.at("pub_effects").get<std::vector<double>>();
    t.delta_cite = j.at("delta_cite").get<double>();
    t.logit_signs = j.at("logit_signs").get<std::map<std::string, int>>();
    for (const auto& x : j.at("authors")) {
      SynthAuthor a;
      a.id = x.at("id").get<std::string>();
      a.role = parse_role(x.at("role").get<std::string>());
      a.cell = x.at("cell").get<int>();
      a.discipline = x.at("discipline").get<std::string>();
      a.y0 = x.at("y0").get<int>();
      a.align_year = x.at("align_year").get<int>();
      if (!x.at("move_year").is_null()) a.move_year = x.at("move_year").get<int>();
      a.origin = x.at("origin").get<std::string>();
      a.pub_offset = x.at("pub_offset").get<double>();
      a.cite_offset = x.at("cite_offset").get<double>();
      a.tau_a = x.at("tau_a").get<double>();
      a.tau_i = x.at("tau_i").get<double>();
      a.tau_c = x.at("tau_c").get<double>();
      a.team_pre = x.at("team_pre").get<int>();
      a.team_post = x.at("team_post").get<int>();
      a.d_a = x.at("d_a").get<double>();
      a.d_i = x.at("d_i").get<double>();
      a.d_c = x.at("d_c").get<double>();
      a.d_size = x.at("d_size").get<double>();
      a.convex = x.at("convex").get<bool>();
      auto means = [](const json& o) {
        std::map<Year, double> m;
        for (const auto& [k, v] : o.items()) m[std::stoi(k)] = v.get<double>();
        return m;
      };
      if (x.contains("pub_means")) t.pub_means[a.id] = means(x["pub_means"]);
      if (x.contains("cite_means")) t.cite_means[a.id] = means(x["cite_means"]);
      t.authors.push_back(std::move(a));
    }
    for (const auto& c : j.at("combinations"))
      t.combinations.push_back({c.at("treated").get<std::string>(), c.at("pool").get<std::string>(),
                                c.at("donors").get<std::vector<std::string>>(),
                                c.at("weights").get<std::vector<double>>()});
  } catch (const json::exception& e) {
    throw InvalidInput("ground truth " + path + ": " + e.what());
  }
  return t;
}

void write_synth_corpus(const std::string& dir, const SynthCorpus& corpus) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir + "/works.jsonl");
    if (!out) throw IoError("cannot write " + dir + "/works.jsonl");
    write_flat_works(out, corpus.records);
  }
  write_roster_csv(dir + "/roster.csv", corpus.roster);
  std::ofstream out(dir + "/truth.json");
  if (!out) throw IoError("cannot write " + dir + "/truth.json");
  out << ground_truth_to_json(corpus.truth) << '\n';
}

std::vector<PanelObservation> planted_did_panel(const PlantedPanelConfig& cfg) {
  SplitMix rng(mix64(cfg.seed));
  std::map<int, double> period;
  for (int t = cfg.first_t; t <= cfg.last_t; ++t) period[t] = 2.0 * rng.normal();
  auto effect = [&](int t) {
    return t >= 1 && static_cast<std::size_t>(t - 1) < cfg.effects.size()
               ? cfg.effects[static_cast<std::size_t>(t - 1)]
               : 0.0;
  };
  std::vector<PanelObservation> rows;
  for (int s = 0; s < cfg.n_treated; ++s) {
    std::vector<double> w(static_cast<std::size_t>(cfg.controls), 1.0 / std::max(1, cfg.controls));
    if (cfg.random_weights && cfg.controls > 0) {
      double sum = 0;
      for (auto& x : w) sum += (x = 0.05 + rng.uniform());
      for (auto& x : w) x /= sum;
    }
    for (int u = 0; u <= cfg.controls; ++u) {
      const bool treated = u == 0;
      const std::string id = "s" + pad(s, 4) + (treated ? "-T" : "-C" + std::to_string(u));
      const double alpha = 5.0 * rng.normal();
      const double innovation = cfg.sigma * std::sqrt(std::max(0.0, 1.0 - cfg.ar1 * cfg.ar1));
      double e = cfg.sigma * rng.normal();
      for (int t = cfg.first_t; t <= cfg.last_t; ++t) {
        if (t > cfg.first_t) e = cfg.ar1 * e + innovation * rng.normal();
        PanelObservation o;
        o.scientist_id = id;
        o.cluster_id = id;
        o.t = t;
        o.treat = treated;
        o.post = t >= 1;
        o.weight = treated ? 1.0 : w[static_cast<std::size_t>(u - 1)];
        o.y = alpha + period[t] + (treated && t >= 1 ? effect(t) : 0.0) + e;
        rows.push_back(std::move(o));
      }
    }
  }
  return rows;
}

}  // namespace hatmatch
