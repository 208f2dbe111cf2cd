#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "communitylens/classify.hpp"
#include "communitylens/cohorts.hpp"
#include "communitylens/common.hpp"
#include "communitylens/corpus.hpp"
#include "communitylens/indicators.hpp"
#include "communitylens/overlay.hpp"
#include "communitylens/parallel.hpp"

namespace communitylens {

struct CommunityConfig {
  CohortOptions cohort;
  FocusMode focus_mode = FocusMode::kTotalRatio;
  ThresholdRule threshold_rule = ThresholdRule::kNearestRankPromoted;
  bool pooled_thresholds = false;  // compare only: resolve cutoffs over both communities
  bool raw = false;
  bool both_stay_denominators = false;

  CohortCsvOptions csv() const { return {raw, both_stay_denominators}; }
};

/// Everything the pipeline reports for one topic community.
struct CommunityReport {
  std::string topic;
  TopicTimeline timeline;
  std::vector<YearCohorts> series;
  ProfileSet profiles;
  std::vector<YearIndicatorSummary> summaries;
  std::array<ProductionBand, 5> bands{};
  std::optional<Classification> classification;
  std::string classification_error;  // set when the distributions are degenerate
  std::optional<OverlayResult> overlay;
  std::vector<AreaRollup> areas;
};

/// The standalone pipeline: cohorts, profiles, summaries, bands, quadrants
/// and, when cluster metadata is loaded, the overlay.
inline CommunityReport analyze(const Corpus& corpus, std::string_view topic, const CommunityConfig& config,
                               const Executor& exec = Executor{}) {
  CommunityReport r;
  r.topic = std::string(topic);
  r.timeline = build_timeline(corpus, topic, exec);
  r.series = cohort_series(corpus, r.timeline, config.cohort);
  r.profiles = author_profiles(corpus, r.timeline, config.focus_mode, exec);
  r.summaries = summary_series(r.profiles, r.series);
  r.bands = production_bands(r.profiles);
  try {
    r.classification = classify_authors(r.profiles, resolve_thresholds(r.profiles, config.threshold_rule));
  } catch (const AnalysisError& e) {
    r.classification_error = e.what();
  }
  if (!corpus.clusters.empty()) {
    r.overlay = cluster_overlay(corpus, r.timeline, r.profiles, r.series);
    r.areas = area_rollup(corpus, r.timeline, r.profiles, r.series, r.overlay->rows);
  }
  return r;
}

struct ComparisonReport {
  CommunityReport a;
  CommunityReport b;
  std::int64_t overlap = 0;  // authors in both communities, matched by author id
  bool pooled_thresholds = false;
};

/// Number of author ids present in both communities.
inline std::int64_t community_overlap(const Corpus& ca, const TopicTimeline& a, const Corpus& cb, const TopicTimeline& b) {
  // Timelines are ordered by author index, which is the author-id order.
  std::int64_t n = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const std::string& x = ca.author_ids[a.authors[i]];
    const std::string& y = cb.author_ids[b.authors[j]];
    if (x < y) ++i;
    else if (y < x) ++j;
    else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

/// Both communities analysed independently with one configuration. Authors in
/// both communities are counted on both sides.
inline ComparisonReport compare(const Corpus& corpus_a, std::string_view topic_a, const Corpus& corpus_b,
                                std::string_view topic_b, const CommunityConfig& config,
                                const Executor& exec = Executor{}) {
  corpus_a.require_topic(topic_a);
  corpus_b.require_topic(topic_b);
  ComparisonReport out;
  out.pooled_thresholds = config.pooled_thresholds;
  out.a = analyze(corpus_a, topic_a, config, exec);
  out.b = analyze(corpus_b, topic_b, config, exec);
  out.overlap = community_overlap(corpus_a, out.a.timeline, corpus_b, out.b.timeline);
  if (config.pooled_thresholds) {
    const std::array<const ProfileSet*, 2> sets{&out.a.profiles, &out.b.profiles};
    auto t = resolve_pooled_thresholds(sets, config.threshold_rule);
    out.a.classification = classify_authors(out.a.profiles, t);
    out.b.classification = classify_authors(out.b.profiles, t);
    out.a.classification_error.clear();
    out.b.classification_error.clear();
  }
  return out;
}

inline ComparisonReport compare(const Corpus& corpus, std::string_view topic_a, std::string_view topic_b,
                                const CommunityConfig& config, const Executor& exec = Executor{}) {
  return compare(corpus, topic_a, corpus, topic_b, config, exec);
}

// ---- differences ---------------------------------------------------------------------

namespace detail {

// (p/q - r/s) * scale, rounded half-up to tenths.
inline std::int64_t rational_diff_tenths(std::int64_t p, std::int64_t q, std::int64_t r, std::int64_t s,
                                         std::int64_t scale) {
  using I = __int128;
  I num = (static_cast<I>(p) * s - static_cast<I>(r) * q) * scale * 10;
  I den = static_cast<I>(q) * s;
  I twice = 2 * num + den, d2 = 2 * den;
  I quot = twice / d2;
  if ((twice % d2 != 0) && ((twice < 0) != (d2 < 0))) --quot;
  return static_cast<std::int64_t>(quot);
}

inline std::string diff_cell(const Share& a, const Share& b) {
  // Undefined shares are reported as 0 on both sides of the difference.
  Share x = a.defined() ? a : Share{0, 1};
  Share y = b.defined() ? b : Share{0, 1};
  return format_tenths(rational_diff_tenths(x.numerator, x.denominator, y.numerator, y.denominator, 100));
}

inline std::string diff_cell(const std::optional<Share>& a, const std::optional<Share>& b) {
  return a && b ? diff_cell(*a, *b) : "";
}

inline std::string diff_cell(const ExactMean& a, const ExactMean& b) {
  if (!a.defined() || !b.defined()) return "";
  return format_tenths(rational_diff_tenths(a.sum, a.count, b.sum, b.count, 1));
}

inline std::string diff_cell(const std::optional<double>& a, const std::optional<double>& b) {
  return a && b ? format_1dp(*a - *b) : "";
}

inline std::string count_diff(std::int64_t a, std::int64_t b) { return std::to_string(a - b); }

inline std::string count_diff(const std::optional<std::int64_t>& a, const std::optional<std::int64_t>& b) {
  return a && b ? std::to_string(*a - *b) : "";
}

}  // namespace detail

/// Per-year cohort differences (a - b). Rows are paired by year; a year
/// present on one side only is skipped.
inline std::string diff_cohorts_csv(std::span<const YearCohorts> a, std::span<const YearCohorts> b) {
  CsvWriter w{"year",  "N_AU",  "N_old",     "N_new",  "N_newborn", "N_stay",
              "P_old", "P_new", "P_newborn", "P_stay", "P_stay_new", "P_stay_all"};
  for (const auto& x : a)
    for (const auto& y : b) {
      if (x.year != y.year) continue;
      using detail::count_diff;
      using detail::diff_cell;
      w.row({std::to_string(x.year), count_diff(x.n_all(), y.n_all()), count_diff(x.n_old(), y.n_old()),
             count_diff(x.n_new(), y.n_new()), count_diff(x.n_new_born(), y.n_new_born()),
             count_diff(x.n_stay(), y.n_stay()), diff_cell(x.p_old(), y.p_old()), diff_cell(x.p_new(), y.p_new()),
             diff_cell(x.p_new_born(), y.p_new_born()), diff_cell(x.p_stay(), y.p_stay()),
             diff_cell(x.p_stay(StayDenominator::kNewAuthors), y.p_stay(StayDenominator::kNewAuthors)),
             diff_cell(x.p_stay(StayDenominator::kAllAuthors), y.p_stay(StayDenominator::kAllAuthors))});
    }
  return w.release();
}

inline std::string diff_indicators_csv(std::span<const YearIndicatorSummary> a, std::span<const YearIndicatorSummary> b) {
  CsvWriter w{"year", "N_AU", "YFP_all", "YFP_new", "YFP_old", "YFP_topic", "N_p", "P_f"};
  for (const auto& x : a)
    for (const auto& y : b) {
      if (x.year != y.year) continue;
      using detail::diff_cell;
      w.row({std::to_string(x.year), detail::count_diff(x.n_authors, y.n_authors),
             diff_cell(x.mean_yfp_all, y.mean_yfp_all), diff_cell(x.mean_yfp_new, y.mean_yfp_new),
             diff_cell(x.mean_yfp_old, y.mean_yfp_old), diff_cell(x.mean_yfp_topic, y.mean_yfp_topic),
             diff_cell(x.mean_n_p, y.mean_n_p), diff_cell(x.mean_p_f, y.mean_p_f)});
    }
  return w.release();
}

inline std::string diff_bands_csv(const std::array<ProductionBand, 5>& a, const std::array<ProductionBand, 5>& b) {
  CsvWriter w{"band", "authors", "share", "mean_focus"};
  for (std::size_t i = 0; i < a.size(); ++i)
    w.row({std::string(a[i].label), detail::count_diff(a[i].authors, b[i].authors),
           detail::diff_cell(a[i].share, b[i].share), detail::diff_cell(a[i].mean_focus, b[i].mean_focus)});
  return w.release();
}

/// Group differences for the community and for every area classified on both sides.
inline std::string diff_quadrants_csv(const Classification& a, const Classification& b) {
  CsvWriter w{"scope", "group", "authors", "share"};
  auto emit = [&](std::string_view scope, const GroupShares& x, const GroupShares& y) {
    for (std::size_t g = 0; g < 4; ++g) {
      auto group = static_cast<Group>(g);
      w.row({std::string(scope), std::string(kGroupNames[g]), detail::count_diff(x.counts[g], y.counts[g]),
             detail::diff_cell(x.share(group), y.share(group))});
    }
  };
  emit("community", a.community, b.community);
  for (std::size_t i = 0; i < kAreaCount; ++i)
    if (a.by_area[i].total > 0 && b.by_area[i].total > 0) emit(kAreaNames[i], a.by_area[i], b.by_area[i]);
  return w.release();
}

// ---- report files ----------------------------------------------------------------------

using ReportFiles = std::vector<std::pair<std::string, std::string>>;

/// Report files of one community, unprefixed: cohorts, indicators, profiles,
/// bands, quadrants, quadrant summary and, with clusters, overlay
/// and areas.
inline ReportFiles community_files(const Corpus& corpus, const CommunityReport& r, const CommunityConfig& config) {
  ReportFiles files;
  files.emplace_back("cohorts.csv", cohorts_csv(r.series, config.csv()));
  files.emplace_back("indicators.csv", indicators_csv(r.summaries, config.raw));
  files.emplace_back("profiles.csv", profiles_csv(corpus, r.profiles, config.raw));
  files.emplace_back("bands.csv", bands_csv(r.bands, config.raw));
  if (r.classification) {
    files.emplace_back("quadrants.csv", quadrants_csv(corpus, *r.classification, config.raw));
    files.emplace_back("quadrant_summary.csv", quadrant_summary_csv(*r.classification));
  }
  if (r.overlay) {
    files.emplace_back("overlay.csv", overlay_csv(r.overlay->rows));
    files.emplace_back("areas.csv", areas_csv(r.areas));
  }
  return files;
}

inline std::string comparison_json(const ComparisonReport& r) {
  auto side = [](std::string& out, const CommunityReport& c) {
    out += "{\"topic\":";
    append_json_string(out, c.topic);
    out += ",\"authors\":" + std::to_string(c.profiles.size());
    out += ",\"pooled_stay\":";
    auto pooled = pooled_stay_share(c.series);
    out += pooled.defined() ? format_1dp(pooled) : "null";
    out += ",\"thresholds\":";
    if (c.classification) {
      out += thresholds_json_fragment(c.classification->thresholds);
    } else {
      out += "null,\"classification_error\":";
      append_json_string(out, c.classification_error);
    }
    out += "}";
  };
  std::string out = "{\"a\":";
  side(out, r.a);
  out += ",\"b\":";
  side(out, r.b);
  out += ",\"overlap\":" + std::to_string(r.overlap);
  out += ",\"pooled_thresholds\":";
  out += r.pooled_thresholds ? "true" : "false";
  out += "}\n";
  return out;
}

/// a_*, b_* and diff_* tables plus comparison.json.
inline ReportFiles comparison_files(const Corpus& corpus_a, const Corpus& corpus_b, const ComparisonReport& r,
                                    const CommunityConfig& config) {
  ReportFiles files;
  for (auto& [name, body] : community_files(corpus_a, r.a, config)) files.emplace_back("a_" + name, std::move(body));
  for (auto& [name, body] : community_files(corpus_b, r.b, config)) files.emplace_back("b_" + name, std::move(body));
  files.emplace_back("diff_cohorts.csv", diff_cohorts_csv(r.a.series, r.b.series));
  files.emplace_back("diff_indicators.csv", diff_indicators_csv(r.a.summaries, r.b.summaries));
  files.emplace_back("diff_bands.csv", diff_bands_csv(r.a.bands, r.b.bands));
  if (r.a.classification && r.b.classification)
    files.emplace_back("diff_quadrants.csv", diff_quadrants_csv(*r.a.classification, *r.b.classification));
  files.emplace_back("comparison.json", comparison_json(r));
  return files;
}

}  // namespace communitylens
