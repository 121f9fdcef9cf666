#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "hatmatch/error.hpp"
#include "hatmatch/matching.hpp"
#include "hatmatch/rng.hpp"

namespace hatmatch {

std::string to_string(PoolKind kind) { return kind == PoolKind::Moved ? "moved" : "unmoved"; }

PoolKind parse_pool_kind(const std::string& s) {
  if (s == "moved" || s == "g1") return PoolKind::Moved;
  if (s == "unmoved" || s == "g2") return PoolKind::Unmoved;
  throw InvalidInput("unknown pool '" + s + "' (expected moved or unmoved)");
}

int log2_bin(double x) {
  if (x < 0.0) x = 0.0;
  return static_cast<int>(std::floor(std::log2(1.0 + x)));
}

CandidatePool exact_match(const AuthorYearPanel& treated, Year treated_y_w,
                          std::span<const Contender> pool, PoolKind kind, const PoolCaps& caps,
                          const ExactTolerances& tol, std::uint64_t seed) {
  CandidatePool out;
  out.treated_id = treated.author_id;
  out.treated_y_w = treated_y_w;
  out.kind = kind;

  const auto treated_totals =
      window_totals(treated, treated_y_w - tol.pre_years, treated_y_w - 1);
  const int pub_bin = log2_bin(static_cast<double>(treated_totals.pubs));
  const int cite_bin = log2_bin(static_cast<double>(treated_totals.cites));
  const Group wanted = kind == PoolKind::Moved ? Group::G1 : Group::G2;

  std::vector<PoolMember> survivors;
  for (const auto& c : pool) {
    if (!c.panel || c.group != wanted) continue;
    const auto& p = *c.panel;
    if (p.author_id == treated.author_id) continue;
    if (p.discipline != treated.discipline) continue;
    if (std::abs(p.y0 - treated.y0) > tol.y0) continue;
    Year align = treated_y_w;
    if (kind == PoolKind::Moved) {
      if (!c.y_w || std::abs(*c.y_w - treated_y_w) > tol.y_w) continue;
      align = *c.y_w;
    } else if (p.last_year() <= treated_y_w) {
      continue;
    }
    const auto totals = window_totals(p, align - tol.pre_years, align - 1);
    if (log2_bin(static_cast<double>(totals.pubs)) != pub_bin) continue;
    if (log2_bin(static_cast<double>(totals.cites)) != cite_bin) continue;
    survivors.push_back({p.author_id, align});
  }

  out.survivors = static_cast<int>(survivors.size());
  const int cap = caps.for_kind(kind);
  if (static_cast<int>(survivors.size()) > cap) {
    out.caps_applied = true;
    std::vector<std::pair<std::uint64_t, std::size_t>> keyed;
    keyed.reserve(survivors.size());
    for (std::size_t i = 0; i < survivors.size(); ++i)
      keyed.emplace_back(keyed_hash(seed, treated.author_id, survivors[i].id), i);
    std::sort(keyed.begin(), keyed.end(), [&](const auto& a, const auto& b) {
      return a.first != b.first ? a.first < b.first : survivors[a.second].id < survivors[b.second].id;
    });
    std::vector<PoolMember> kept;
    kept.reserve(static_cast<std::size_t>(cap));
    for (int i = 0; i < cap; ++i) kept.push_back(survivors[keyed[static_cast<std::size_t>(i)].second]);
    survivors = std::move(kept);
  }
  std::sort(survivors.begin(), survivors.end(),
            [](const PoolMember& a, const PoolMember& b) { return a.id < b.id; });
  out.contenders = std::move(survivors);
  return out;
}

std::string to_string(MatchMethod m) {
  switch (m) {
    case MatchMethod::Exact: return "exact";
    case MatchMethod::SCM: return "scm";
    case MatchMethod::CEM: return "cem";
    case MatchMethod::DOM: return "dom";
  }
  return "scm";
}

MatchMethod parse_match_method(const std::string& s) {
  if (s == "exact") return MatchMethod::Exact;
  if (s == "scm") return MatchMethod::SCM;
  if (s == "cem") return MatchMethod::CEM;
  if (s == "dom") return MatchMethod::DOM;
  throw InvalidInput("unknown match method '" + s + "' (expected scm, cem or dom)");
}

int MatchedSet::n_pairs() const {
  int n = 0;
  for (const auto& e : entries)
    if (!e.controls.empty()) n += static_cast<int>(e.treated.size());
  return n;
}

MatchedSet exact_stage_set(std::span<const CandidatePool> pools, OutcomeKind kind) {
  MatchedSet set;
  set.method = MatchMethod::Exact;
  set.outcome_kind = kind;
  if (!pools.empty()) set.pool_kind = pools.front().kind;
  for (const auto& pool : pools) {
    if (pool.contenders.empty()) {
      ++set.failures["empty_pool"];
      continue;
    }
    MatchedEntry e;
    e.key = pool.treated_id;
    e.treated.push_back({pool.treated_id, pool.treated_y_w, 1.0});
    for (const auto& c : pool.contenders) e.controls.push_back({c.id, c.align_year, 1.0});
    set.entries.push_back(std::move(e));
  }
  return set;
}

}  // namespace hatmatch
