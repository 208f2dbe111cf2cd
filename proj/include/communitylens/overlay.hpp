#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "communitylens/cohorts.hpp"
#include "communitylens/common.hpp"
#include "communitylens/corpus.hpp"
#include "communitylens/indicators.hpp"
#include "communitylens/io.hpp"

namespace communitylens {

struct ClusterOverlayRow {
  std::int32_t cluster = kNoCluster;
  std::string cluster_id;
  std::string label;
  Area area = Area::kMathematicsComputerScience;
  std::optional<double> x;
  std::optional<double> y;
  std::int64_t total_authors = 0;
  std::int64_t n_topic_authors = 0;
  std::optional<Share> p_au;  // absent when total_authors is 0
  Share p_stay;               // undefined when no eligible new authors
  ExactMean mean_yfp;
  ExactMean mean_yfp_topic;
  ExactMean mean_production;
  std::optional<double> mean_focus;

  bool exceeds_total() const { return n_topic_authors > total_authors; }

  friend bool operator==(const ClusterOverlayRow&, const ClusterOverlayRow&) = default;
};

struct OverlayResult {
  std::vector<ClusterOverlayRow> rows;  // ordered by cluster_id
  std::vector<std::string> warnings;
};

namespace detail {

struct ClusterMembership {
  std::int32_t cluster;
  std::uint32_t author;  // position in the timeline
  bool entry;            // has a topic publication in this cluster in the entry year
};

inline std::vector<ClusterMembership> cluster_memberships(const Corpus& corpus, const TopicTimeline& tl) {
  std::vector<ClusterMembership> m;
  for (std::size_t i = 0; i < tl.size(); ++i) {
    const Year entry = tl.entry_year(i);
    for (std::uint32_t pi : corpus.publications_of(tl.authors[i])) {
      const auto& p = corpus.publications[pi];
      if (p.cluster == kNoCluster || !p.has_topic(tl.topic) || !tl.horizon.contains(p.year)) continue;
      m.push_back({p.cluster, static_cast<std::uint32_t>(i), p.year == entry});
    }
  }
  std::sort(m.begin(), m.end(), [](const auto& a, const auto& b) {
    return a.cluster != b.cluster ? a.cluster < b.cluster : a.author < b.author;
  });
  std::vector<ClusterMembership> unique;
  for (const auto& x : m) {
    if (!unique.empty() && unique.back().cluster == x.cluster && unique.back().author == x.author)
      unique.back().entry = unique.back().entry || x.entry;
    else
      unique.push_back(x);
  }
  return unique;
}

// Stayer status of a new author at their entry year: nullopt when the entry
// year's stay window is incomplete.
inline std::optional<bool> stayer_status(std::span<const YearCohorts> series, Year entry, AuthorIndex a) {
  for (const auto& row : series) {
    if (row.year != entry) continue;
    if (!row.stayers) return std::nullopt;
    return std::binary_search(row.stayers->begin(), row.stayers->end(), a);
  }
  return std::nullopt;
}

inline bool share_greater(const Share& a, const Share& b) {
  return a.numerator * b.denominator > b.numerator * a.denominator;
}

}  // namespace detail

/// Topic-author statistics per micro-cluster. Authors count once in every
/// cluster where they have a topic publication. The stayer share follows
/// the cluster-level definition: stayers over new authors, summed over entry
/// years whose stay window is complete, with new authors attributed to the
/// clusters of their entry-year topic publications.
inline OverlayResult cluster_overlay(const Corpus& corpus, const TopicTimeline& tl, const ProfileSet& profiles,
                                     std::span<const YearCohorts> series) {
  OverlayResult out;
  auto members = detail::cluster_memberships(corpus, tl);
  std::size_t i = 0;
  while (i < members.size()) {
    const std::int32_t c = members[i].cluster;
    const ClusterMeta& meta = corpus.clusters[static_cast<std::size_t>(c)];
    ClusterOverlayRow row;
    row.cluster = c;
    row.cluster_id = meta.cluster_id;
    row.label = meta.label;
    row.area = meta.area;
    row.x = meta.x;
    row.y = meta.y;
    row.total_authors = meta.total_authors;
    std::vector<double> focus;
    for (; i < members.size() && members[i].cluster == c; ++i) {
      const std::size_t pos = members[i].author;
      const AuthorIndex a = tl.authors[pos];
      const AuthorProfile* p = profiles.find(a);
      if (!p) throw AnalysisError("overlay: missing profile for author " + corpus.author_ids[a]);
      ++row.n_topic_authors;
      row.mean_yfp.add(p->yfp);
      row.mean_yfp_topic.add(p->yfp_topic);
      row.mean_production.add(p->production_total);
      focus.push_back(p->focus_overall);
      if (members[i].entry) {
        if (auto stays = detail::stayer_status(series, tl.entry_year(pos), a)) {
          ++row.p_stay.denominator;
          if (*stays) ++row.p_stay.numerator;
        }
      }
    }
    row.mean_focus = mean_of(focus);
    if (row.total_authors == 0)
      out.warnings.push_back("cluster " + row.cluster_id + " has total_authors 0; p_au omitted");
    else
      row.p_au = Share{row.n_topic_authors, row.total_authors};
    if (row.total_authors > 0 && row.exceeds_total())
      out.warnings.push_back("cluster " + row.cluster_id + ": " + std::to_string(row.n_topic_authors) +
                             " topic authors exceed total_authors " + std::to_string(row.total_authors));
    out.rows.push_back(std::move(row));
  }
  return out;
}

// ---- area rollups -------------------------------------------------------------------

struct AreaRollup {
  Area area = Area::kMathematicsComputerScience;
  std::int64_t n_clusters = 0;
  std::int64_t n_authors = 0;       // deduplicated within the area
  std::int64_t n_authors_full = 0;  // summed over the area's clusters
  Share author_share;               // n_authors over distinct clustered topic authors
  std::optional<double> avg_p_au;
  std::optional<double> avg_p_stay;
  Share pooled_p_stay;
  std::string top_cluster;
  ExactMean mean_yfp;
  ExactMean mean_yfp_topic;
  ExactMean mean_time_lag;
  ExactMean mean_production;
  std::optional<double> mean_focus;

  friend bool operator==(const AreaRollup&, const AreaRollup&) = default;
};

/// Per-area aggregates for every area with at least one topic-relevant cluster.
/// Cluster averages are unweighted; the pooled stayer share deduplicates
/// authors within the area.
inline std::vector<AreaRollup> area_rollup(const Corpus& corpus, const TopicTimeline& tl, const ProfileSet& profiles,
                                           std::span<const YearCohorts> series,
                                           std::span<const ClusterOverlayRow> rows) {
  std::array<AreaRollup, kAreaCount> acc{};
  std::array<std::vector<double>, kAreaCount> p_au, p_stay, focus;
  std::array<const ClusterOverlayRow*, kAreaCount> top{};
  for (std::size_t a = 0; a < kAreaCount; ++a) acc[a].area = static_cast<Area>(a);

  for (const auto& r : rows) {
    auto a = static_cast<std::size_t>(r.area);
    ++acc[a].n_clusters;
    acc[a].n_authors_full += r.n_topic_authors;
    if (r.p_au) {
      p_au[a].push_back(r.p_au->percent());
      if (!top[a] || !top[a]->p_au || detail::share_greater(*r.p_au, *top[a]->p_au)) top[a] = &r;
    } else if (!top[a]) {
      top[a] = &r;
    }
    if (r.p_stay.defined()) p_stay[a].push_back(r.p_stay.percent());
  }

  // Entry-year areas per author, for the pooled stayer share.
  std::vector<std::uint8_t> entry_areas(tl.size(), 0);
  for (std::size_t i = 0; i < tl.size(); ++i) {
    const Year entry = tl.entry_year(i);
    for (std::uint32_t pi : corpus.publications_of(tl.authors[i])) {
      const auto& p = corpus.publications[pi];
      if (p.cluster == kNoCluster || !p.has_topic(tl.topic) || p.year != entry) continue;
      entry_areas[i] |= static_cast<std::uint8_t>(1u << static_cast<unsigned>(corpus.clusters[p.cluster].area));
    }
  }

  std::int64_t clustered_authors = 0;
  for (std::size_t i = 0; i < tl.size(); ++i) {
    const AuthorIndex author = tl.authors[i];
    const AuthorProfile* p = profiles.find(author);
    if (!p) throw AnalysisError("area rollup: missing profile for author " + corpus.author_ids[author]);
    if (p->areas) ++clustered_authors;
    std::optional<bool> stays;
    if (entry_areas[i]) stays = detail::stayer_status(series, tl.entry_year(i), author);
    for (std::size_t a = 0; a < kAreaCount; ++a) {
      if ((p->areas >> a) & 1u) {
        ++acc[a].n_authors;
        acc[a].mean_yfp.add(p->yfp);
        acc[a].mean_yfp_topic.add(p->yfp_topic);
        acc[a].mean_time_lag.add(p->time_lag());
        acc[a].mean_production.add(p->production_total);
        focus[a].push_back(p->focus_overall);
      }
      if (((entry_areas[i] >> a) & 1u) && stays) {
        ++acc[a].pooled_p_stay.denominator;
        if (*stays) ++acc[a].pooled_p_stay.numerator;
      }
    }
  }

  std::vector<AreaRollup> out;
  for (std::size_t a = 0; a < kAreaCount; ++a) {
    if (acc[a].n_clusters == 0) continue;
    acc[a].author_share = Share{acc[a].n_authors, clustered_authors};
    acc[a].avg_p_au = mean_of(p_au[a]);
    acc[a].avg_p_stay = mean_of(p_stay[a]);
    acc[a].mean_focus = mean_of(focus[a]);
    acc[a].top_cluster = top[a] ? top[a]->cluster_id : "";
    out.push_back(std::move(acc[a]));
  }
  return out;
}

// ---- emission ----------------------------------------------------------------------

inline std::string optional_share_cell(const std::optional<Share>& s) { return s ? format_1dp(*s) : ""; }
inline std::string share_cell(const Share& s) { return s.defined() ? format_1dp(s) : ""; }
inline std::string coordinate_cell(const std::optional<double>& v) { return v ? format_raw(*v) : ""; }

/// cluster_id,label,area,x,y,n_topic_authors,p_au,p_stay,mean_yfp,mean_yfp_topic,mean_production,mean_focus
///
/// p_stay uses new authors as denominator, summed over complete stay windows;
/// the per-year cohort tables may use either denominator.
inline std::string overlay_csv(std::span<const ClusterOverlayRow> rows) {
  CsvWriter w{"cluster_id", "label",  "area",     "x",              "y",               "n_topic_authors",
              "p_au",       "p_stay", "mean_yfp", "mean_yfp_topic", "mean_production", "mean_focus"};
  for (const auto& r : rows)
    w.row({r.cluster_id, r.label, std::string(area_name(r.area)), coordinate_cell(r.x), coordinate_cell(r.y),
           std::to_string(r.n_topic_authors), optional_share_cell(r.p_au), share_cell(r.p_stay), mean_cell(r.mean_yfp),
           mean_cell(r.mean_yfp_topic), mean_cell(r.mean_production), mean_cell(r.mean_focus)});
  return w.release();
}

inline std::string areas_csv(std::span<const AreaRollup> rollups) {
  CsvWriter w{"area",          "n_clusters",   "n_authors",  "n_authors_full", "author_share",  "avg_p_au",
              "avg_p_stay",    "pooled_p_stay", "top_cluster", "mean_yfp",      "mean_yfp_topic", "mean_time_lag",
              "mean_production", "mean_focus"};
  for (const auto& r : rollups)
    w.row({std::string(area_name(r.area)), std::to_string(r.n_clusters), std::to_string(r.n_authors),
           std::to_string(r.n_authors_full), share_cell(r.author_share), mean_cell(r.avg_p_au),
           mean_cell(r.avg_p_stay), share_cell(r.pooled_p_stay), r.top_cluster, mean_cell(r.mean_yfp),
           mean_cell(r.mean_yfp_topic), mean_cell(r.mean_time_lag), mean_cell(r.mean_production),
           mean_cell(r.mean_focus)});
  return w.release();
}

enum class ColorMetric { kPAu, kPStay };

inline std::optional<ColorMetric> parse_color_metric(std::string_view s) {
  if (s == "p_au") return ColorMetric::kPAu;
  if (s == "p_stay") return ColorMetric::kPStay;
  return std::nullopt;
}

inline std::string_view to_string(ColorMetric m) { return m == ColorMetric::kPAu ? "p_au" : "p_stay"; }

namespace detail {
inline std::string color_cell(const ClusterOverlayRow& r, ColorMetric m) {
  return m == ColorMetric::kPAu ? optional_share_cell(r.p_au) : share_cell(r.p_stay);
}
}  // namespace detail

/// Map overlay for network-visualisation tools: cluster_id,label,area,x,y,size,color.
/// Size is the number of topic authors.
inline std::string map_csv(std::span<const ClusterOverlayRow> rows, ColorMetric color = ColorMetric::kPAu) {
  CsvWriter w{"cluster_id", "label", "area", "x", "y", "size", "color"};
  for (const auto& r : rows)
    w.row({r.cluster_id, r.label, std::string(area_name(r.area)), coordinate_cell(r.x), coordinate_cell(r.y),
           std::to_string(r.n_topic_authors), detail::color_cell(r, color)});
  return w.release();
}

inline std::string map_json(std::span<const ClusterOverlayRow> rows, ColorMetric color = ColorMetric::kPAu) {
  std::string out = "{\"size_metric\":\"n_topic_authors\",\"color_metric\":\"";
  out += to_string(color);
  out += "\",\"items\":[";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (i) out.push_back(',');
    out += "\n{\"cluster_id\":";
    append_json_string(out, r.cluster_id);
    out += ",\"label\":";
    append_json_string(out, r.label);
    out += ",\"area\":";
    append_json_string(out, area_name(r.area));
    out += ",\"x\":" + (r.x ? format_raw(*r.x) : std::string("null"));
    out += ",\"y\":" + (r.y ? format_raw(*r.y) : std::string("null"));
    out += ",\"size\":" + std::to_string(r.n_topic_authors);
    auto c = detail::color_cell(r, color);
    out += ",\"color\":" + (c.empty() ? std::string("null") : c);
    out.push_back('}');
  }
  out += rows.empty() ? "]}\n" : "\n]}\n";
  return out;
}

}  // namespace communitylens
