#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "communitylens/common.hpp"
#include "communitylens/corpus.hpp"
#include "communitylens/indicators.hpp"

namespace communitylens {

enum class ThresholdRule {
  kNearestRankPromoted,  // value >= P75, promoted past the minimum on ties
  kStrict,               // value > P75
  kInclusive,            // value >= P75
};

inline std::string_view to_string(ThresholdRule r) {
  switch (r) {
    case ThresholdRule::kNearestRankPromoted: return "nearest_rank_promoted";
    case ThresholdRule::kStrict: return "strict";
    case ThresholdRule::kInclusive: return "inclusive";
  }
  return "?";
}

inline std::optional<ThresholdRule> parse_threshold_rule(std::string_view s) {
  if (s == "nearest_rank_promoted" || s == "promoted") return ThresholdRule::kNearestRankPromoted;
  if (s == "strict") return ThresholdRule::kStrict;
  if (s == "inclusive") return ThresholdRule::kInclusive;
  return std::nullopt;
}

/// How one cutoff was resolved.
struct CutoffTrace {
  std::size_t n = 0;
  std::size_t rank = 0;      // 1-based nearest rank, ceil(0.75 n)
  double percentile = 0.0;   // raw P75 value
  double cutoff = 0.0;       // final cutoff
  bool promoted = false;
  bool strict = false;       // high means value > cutoff rather than >=

  bool high(double v) const { return strict ? v > cutoff : v >= cutoff; }

  friend bool operator==(const CutoffTrace&, const CutoffTrace&) = default;
};

struct QuadrantThresholds {
  ThresholdRule rule = ThresholdRule::kNearestRankPromoted;
  CutoffTrace production;
  CutoffTrace focus;

  double production_cutoff() const { return production.cutoff; }
  double focus_cutoff() const { return focus.cutoff; }
  bool high_production(std::int64_t v) const { return production.high(static_cast<double>(v)); }
  bool high_focus(double v) const { return focus.high(v); }

  friend bool operator==(const QuadrantThresholds&, const QuadrantThresholds&) = default;
};

/// Top-25% cutoff of one distribution. Nearest-rank P75 over the ascending
/// values; under the promoted rule a P75 equal to the minimum moves up to the
/// smallest value above the minimum.
inline CutoffTrace resolve_cutoff(std::vector<double> values, ThresholdRule rule, std::string_view what) {
  if (values.empty()) throw AnalysisError("cannot resolve " + std::string(what) + " cutoff: no authors");
  std::sort(values.begin(), values.end());
  if (values.front() == values.back())
    throw AnalysisError("degenerate " + std::string(what) + " distribution: all " + std::to_string(values.size()) +
                        " values equal " + format_raw(values.front()) + "; no meaningful quartile");
  CutoffTrace t;
  t.n = values.size();
  t.rank = (3 * t.n + 3) / 4;
  t.percentile = values[t.rank - 1];
  t.cutoff = t.percentile;
  t.strict = rule == ThresholdRule::kStrict;
  if (rule == ThresholdRule::kNearestRankPromoted && t.percentile == values.front()) {
    t.cutoff = *std::upper_bound(values.begin(), values.end(), values.front());
    t.promoted = true;
  }
  return t;
}

inline QuadrantThresholds resolve_thresholds(std::span<const std::int64_t> production, std::span<const double> focus,
                                             ThresholdRule rule = ThresholdRule::kNearestRankPromoted) {
  QuadrantThresholds q;
  q.rule = rule;
  q.production = resolve_cutoff(std::vector<double>(production.begin(), production.end()), rule, "production");
  q.focus = resolve_cutoff(std::vector<double>(focus.begin(), focus.end()), rule, "focus");
  return q;
}

inline QuadrantThresholds resolve_thresholds(const ProfileSet& profiles,
                                             ThresholdRule rule = ThresholdRule::kNearestRankPromoted) {
  std::vector<std::int64_t> production;
  std::vector<double> focus;
  for (const auto& p : profiles) {
    production.push_back(p.production_total);
    focus.push_back(p.focus_overall);
  }
  return resolve_thresholds(production, focus, rule);
}

/// Thresholds over the concatenation of several communities.
inline QuadrantThresholds resolve_pooled_thresholds(std::span<const ProfileSet* const> sets,
                                                    ThresholdRule rule = ThresholdRule::kNearestRankPromoted) {
  std::vector<std::int64_t> production;
  std::vector<double> focus;
  for (const auto* s : sets)
    for (const auto& p : *s) {
      production.push_back(p.production_total);
      focus.push_back(p.focus_overall);
    }
  return resolve_thresholds(production, focus, rule);
}

// ---- assignment ------------------------------------------------------------------

enum class Group : std::uint8_t { kSpecialist, kInterested, kCasual, kIncidental };

inline constexpr std::array<std::string_view, 4> kGroupNames = {"specialist", "interested", "casual", "incidental"};

inline std::string_view group_name(Group g) { return kGroupNames[static_cast<std::size_t>(g)]; }

inline Group quadrant(bool high_production, bool high_focus) {
  if (high_production) return high_focus ? Group::kSpecialist : Group::kCasual;
  return high_focus ? Group::kInterested : Group::kIncidental;
}

struct QuadrantAssignment {
  AuthorIndex author = 0;
  Group group = Group::kIncidental;
  std::int64_t production_total = 0;
  double focus_overall = 0.0;

  friend bool operator==(const QuadrantAssignment&, const QuadrantAssignment&) = default;
};

struct GroupShares {
  std::array<std::int64_t, 4> counts{};
  std::int64_t total = 0;

  Share share(Group g) const { return {counts[static_cast<std::size_t>(g)], total}; }
  void add(Group g) {
    ++counts[static_cast<std::size_t>(g)];
    ++total;
  }

  friend bool operator==(const GroupShares&, const GroupShares&) = default;
};

struct Classification {
  QuadrantThresholds thresholds;
  std::vector<QuadrantAssignment> assignments;  // ordered by author id
  GroupShares community;
  // Full counting: an author counts once in every area with a clustered topic publication.
  std::array<GroupShares, kAreaCount> by_area{};

  friend bool operator==(const Classification&, const Classification&) = default;
};

inline Classification classify_authors(const ProfileSet& profiles, const QuadrantThresholds& thresholds) {
  Classification c;
  c.thresholds = thresholds;
  c.assignments.reserve(profiles.size());
  for (const auto& p : profiles) {
    Group g = quadrant(thresholds.high_production(p.production_total), thresholds.high_focus(p.focus_overall));
    c.assignments.push_back({p.author, g, p.production_total, p.focus_overall});
    c.community.add(g);
    for (std::size_t a = 0; a < kAreaCount; ++a)
      if ((p.areas >> a) & 1u) c.by_area[a].add(g);
  }
  return c;
}

// ---- emission --------------------------------------------------------------------

inline std::string quadrants_csv(const Corpus& corpus, const Classification& c, bool raw = false) {
  std::vector<std::string> header{"author_id", "production_total", "focus_overall", "group"};
  if (raw) header.push_back("focus_overall_raw");
  CsvWriter w(header);
  for (const auto& a : c.assignments) {
    std::vector<std::string> cells{corpus.author_ids[a.author], std::to_string(a.production_total),
                                   format_1dp(a.focus_overall), std::string(group_name(a.group))};
    if (raw) cells.push_back(format_raw(a.focus_overall));
    w.row(cells);
  }
  return w.release();
}

/// Long format: scope,group,authors,share. Scope is "community" or an area name.
inline std::string quadrant_summary_csv(const Classification& c) {
  CsvWriter w{"scope", "group", "authors", "share"};
  auto emit = [&](std::string_view scope, const GroupShares& s) {
    for (std::size_t g = 0; g < 4; ++g)
      w.row({std::string(scope), std::string(kGroupNames[g]), std::to_string(s.counts[g]),
             format_1dp(s.share(static_cast<Group>(g)))});
  };
  emit("community", c.community);
  for (std::size_t a = 0; a < kAreaCount; ++a)
    if (c.by_area[a].total > 0) emit(kAreaNames[a], c.by_area[a]);
  return w.release();
}

inline std::string thresholds_json_fragment(const QuadrantThresholds& t) {
  auto trace = [](const CutoffTrace& c) {
    return "{\"n\":" + std::to_string(c.n) + ",\"rank\":" + std::to_string(c.rank) +
           ",\"percentile\":" + format_raw(c.percentile) + ",\"cutoff\":" + format_raw(c.cutoff) +
           ",\"promoted\":" + (c.promoted ? "true" : "false") + ",\"comparison\":\"" + (c.strict ? ">" : ">=") + "\"}";
  };
  return "{\"rule\":\"" + std::string(to_string(t.rule)) + "\",\"production\":" + trace(t.production) +
         ",\"focus\":" + trace(t.focus) + "}";
}

}  // namespace communitylens
