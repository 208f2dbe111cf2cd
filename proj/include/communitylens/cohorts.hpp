#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "communitylens/common.hpp"
#include "communitylens/corpus.hpp"
#include "communitylens/parallel.hpp"

namespace communitylens {

/// Topic activity of every topic author inside the horizon: for each author,
/// the years with topic publications and their counts, ascending.
struct TopicTimeline {
  Horizon horizon;
  int topic = 0;
  std::string topic_label;
  std::vector<AuthorIndex> authors;
  std::vector<std::uint32_t> offsets{0};
  std::vector<YearCount> entries;
  // Research areas in which each author has a clustered topic publication.
  std::vector<std::uint8_t> area_masks;

  std::size_t size() const { return authors.size(); }

  std::span<const YearCount> years_of(std::size_t i) const {
    return std::span<const YearCount>(entries).subspan(offsets[i], offsets[i + 1] - offsets[i]);
  }

  Year entry_year(std::size_t i) const { return entries[offsets[i]].year; }

  std::optional<std::size_t> position(AuthorIndex a) const {
    auto it = std::lower_bound(authors.begin(), authors.end(), a);
    if (it == authors.end() || *it != a) return std::nullopt;
    return static_cast<std::size_t>(it - authors.begin());
  }
};

inline TopicTimeline build_timeline(const Corpus& corpus, std::string_view topic, const Executor& exec = Executor{}) {
  TopicTimeline tl;
  tl.horizon = corpus.horizon;
  tl.topic = corpus.require_topic(topic);
  tl.topic_label = std::string(topic);

  struct Part {
    std::vector<AuthorIndex> authors;
    std::vector<std::uint32_t> lengths;
    std::vector<YearCount> entries;
    std::vector<std::uint8_t> areas;
  };
  constexpr std::size_t kChunk = 1 << 14;
  std::vector<Part> parts(Executor::chunk_count(corpus.author_count(), kChunk));
  exec.for_chunks(corpus.author_count(), kChunk, [&](std::size_t c, std::size_t b, std::size_t e) {
    Part& part = parts[c];
    std::vector<Year> years;
    for (std::size_t a = b; a < e; ++a) {
      years.clear();
      std::uint8_t mask = 0;
      for (std::uint32_t pi : corpus.publications_of(static_cast<AuthorIndex>(a))) {
        const auto& p = corpus.publications[pi];
        if (!p.has_topic(tl.topic) || !corpus.horizon.contains(p.year)) continue;
        years.push_back(p.year);
        if (p.cluster != kNoCluster) mask |= static_cast<std::uint8_t>(1u << static_cast<unsigned>(corpus.clusters[p.cluster].area));
      }
      if (years.empty()) continue;
      std::sort(years.begin(), years.end());
      std::uint32_t len = 0;
      for (Year y : years) {
        if (len && part.entries.back().year == y) {
          ++part.entries.back().count;
        } else {
          part.entries.push_back({y, 1});
          ++len;
        }
      }
      part.authors.push_back(static_cast<AuthorIndex>(a));
      part.lengths.push_back(len);
      part.areas.push_back(mask);
    }
  });
  for (auto& part : parts) {
    tl.authors.insert(tl.authors.end(), part.authors.begin(), part.authors.end());
    for (auto len : part.lengths) tl.offsets.push_back(tl.offsets.back() + len);
    tl.entries.insert(tl.entries.end(), part.entries.begin(), part.entries.end());
    tl.area_masks.insert(tl.area_masks.end(), part.areas.begin(), part.areas.end());
  }
  return tl;
}

// ---- cohorts -----------------------------------------------------------------

enum class StayDenominator { kNewAuthors, kAllAuthors };

inline std::string_view to_string(StayDenominator d) { return d == StayDenominator::kNewAuthors ? "new" : "all"; }

inline std::optional<StayDenominator> parse_stay_denominator(std::string_view s) {
  if (s == "new" || s == "new_authors") return StayDenominator::kNewAuthors;
  if (s == "all" || s == "all_authors") return StayDenominator::kAllAuthors;
  return std::nullopt;
}

struct CohortOptions {
  int stay_window = 2;
  StayDenominator stay_denominator = StayDenominator::kNewAuthors;
};

/// Composition of a topic community in one year. All sets are sorted author
/// indices. `stayers` is empty (undetermined) when the stay window runs past
/// the horizon.
struct YearCohorts {
  Year year = 0;
  std::vector<AuthorIndex> all_authors;
  std::vector<AuthorIndex> old_authors;
  std::vector<AuthorIndex> new_authors;
  std::vector<AuthorIndex> new_born;
  std::optional<std::vector<AuthorIndex>> stayers;
  StayDenominator stay_denominator = StayDenominator::kNewAuthors;

  std::int64_t n_all() const { return static_cast<std::int64_t>(all_authors.size()); }
  std::int64_t n_old() const { return static_cast<std::int64_t>(old_authors.size()); }
  std::int64_t n_new() const { return static_cast<std::int64_t>(new_authors.size()); }
  std::int64_t n_new_born() const { return static_cast<std::int64_t>(new_born.size()); }
  std::optional<std::int64_t> n_stay() const {
    if (!stayers) return std::nullopt;
    return static_cast<std::int64_t>(stayers->size());
  }

  Share p_old() const { return {n_old(), n_all()}; }
  Share p_new() const { return {n_new(), n_all()}; }
  Share p_new_born() const { return {n_new_born(), n_new()}; }
  std::optional<Share> p_stay(StayDenominator d) const {
    if (!stayers) return std::nullopt;
    return Share{*n_stay(), d == StayDenominator::kNewAuthors ? n_new() : n_all()};
  }
  std::optional<Share> p_stay() const { return p_stay(stay_denominator); }

  friend bool operator==(const YearCohorts&, const YearCohorts&) = default;
};

namespace detail {

inline void check_cohort_options(const CohortOptions& o) {
  if (o.stay_window < 1) throw AnalysisError("stay window must be at least 1 year");
}

inline bool has_topic_in(std::span<const YearCount> years, Year from, Year to) {
  return std::any_of(years.begin(), years.end(), [&](const YearCount& yc) { return yc.year >= from && yc.year <= to; });
}

inline Year career_yfp(const Corpus& corpus, AuthorIndex a) {
  const auto& c = corpus.careers[a];
  if (!c) throw AnalysisError("author " + corpus.author_ids[a] + " has no career entry");
  return c->yfp;
}

}  // namespace detail

/// Cohort series for every horizon year, computed in one pass over the timeline.
inline std::vector<YearCohorts> cohort_series(const Corpus& corpus, const TopicTimeline& tl, const CohortOptions& options) {
  detail::check_cohort_options(options);
  const Horizon h = tl.horizon;
  std::vector<YearCohorts> series(static_cast<std::size_t>(h.span()));
  for (int i = 0; i < h.span(); ++i) {
    series[i].year = h.first + i;
    series[i].stay_denominator = options.stay_denominator;
    if (series[i].year + options.stay_window <= h.last) series[i].stayers.emplace();
  }
  for (std::size_t i = 0; i < tl.size(); ++i) {
    const AuthorIndex a = tl.authors[i];
    const auto years = tl.years_of(i);
    const Year entry = years.front().year;
    for (const auto& yc : years) {
      auto& row = series[static_cast<std::size_t>(yc.year - h.first)];
      row.all_authors.push_back(a);
      (yc.year == entry ? row.new_authors : row.old_authors).push_back(a);
    }
    auto& entry_row = series[static_cast<std::size_t>(entry - h.first)];
    if (detail::career_yfp(corpus, a) == entry) entry_row.new_born.push_back(a);
    if (entry_row.stayers && detail::has_topic_in(years, entry + 1, entry + options.stay_window))
      entry_row.stayers->push_back(a);
  }
  return series;
}

inline std::vector<YearCohorts> cohort_series(const Corpus& corpus, std::string_view topic, const CohortOptions& options,
                                              const Executor& exec = Executor{}) {
  return cohort_series(corpus, build_timeline(corpus, topic, exec), options);
}

inline YearCohorts year_cohorts(const Corpus& corpus, const TopicTimeline& tl, Year year, const CohortOptions& options) {
  detail::check_cohort_options(options);
  if (!tl.horizon.contains(year))
    throw AnalysisError("year " + std::to_string(year) + " outside horizon " + to_string(tl.horizon));
  YearCohorts row;
  row.year = year;
  row.stay_denominator = options.stay_denominator;
  if (year + options.stay_window <= tl.horizon.last) row.stayers.emplace();
  for (std::size_t i = 0; i < tl.size(); ++i) {
    const auto years = tl.years_of(i);
    if (!detail::has_topic_in(years, year, year)) continue;
    const AuthorIndex a = tl.authors[i];
    row.all_authors.push_back(a);
    if (years.front().year < year) {
      row.old_authors.push_back(a);
      continue;
    }
    row.new_authors.push_back(a);
    if (detail::career_yfp(corpus, a) == year) row.new_born.push_back(a);
    if (row.stayers && detail::has_topic_in(years, year + 1, year + options.stay_window)) row.stayers->push_back(a);
  }
  return row;
}

inline YearCohorts year_cohorts(const Corpus& corpus, std::string_view topic, Year year, const CohortOptions& options) {
  return year_cohorts(corpus, build_timeline(corpus, topic), year, options);
}

/// Stayers over new authors, pooled across every year whose stay window is
/// complete.
inline Share pooled_stay_share(std::span<const YearCohorts> series) {
  Share s;
  for (const auto& row : series) {
    if (!row.stayers) continue;
    s.numerator += *row.n_stay();
    s.denominator += row.n_new();
  }
  return s;
}

// ---- emission ------------------------------------------------------------------

struct CohortCsvOptions {
  bool raw = false;
  // Adds P_stay_new and P_stay_all so both stayer conventions sit side by side.
  bool both_stay_denominators = false;
};

inline std::vector<std::string> cohort_csv_header(const CohortCsvOptions& o) {
  std::vector<std::string> h{"year",  "N_AU",  "N_old",     "N_new",  "N_newborn", "N_stay",
                             "P_old", "P_new", "P_newborn", "P_stay", "zero_denominator"};
  if (o.both_stay_denominators) {
    h.push_back("P_stay_new");
    h.push_back("P_stay_all");
  }
  if (o.raw)
    for (auto name : {"P_old_raw", "P_new_raw", "P_newborn_raw", "P_stay_raw"}) h.push_back(name);
  return h;
}

inline std::vector<std::string> cohort_csv_cells(const YearCohorts& r, const CohortCsvOptions& o) {
  auto stay = r.p_stay();
  bool zero = !r.p_old().defined() || !r.p_new_born().defined() || (stay && !stay->defined());
  std::vector<std::string> cells{std::to_string(r.year),
                                 std::to_string(r.n_all()),
                                 std::to_string(r.n_old()),
                                 std::to_string(r.n_new()),
                                 std::to_string(r.n_new_born()),
                                 r.n_stay() ? std::to_string(*r.n_stay()) : "",
                                 format_1dp(r.p_old()),
                                 format_1dp(r.p_new()),
                                 format_1dp(r.p_new_born()),
                                 stay ? format_1dp(*stay) : "",
                                 zero ? "1" : "0"};
  if (o.both_stay_denominators) {
    auto sn = r.p_stay(StayDenominator::kNewAuthors);
    auto sa = r.p_stay(StayDenominator::kAllAuthors);
    cells.push_back(sn ? format_1dp(*sn) : "");
    cells.push_back(sa ? format_1dp(*sa) : "");
  }
  if (o.raw) {
    cells.push_back(format_raw(r.p_old().percent()));
    cells.push_back(format_raw(r.p_new().percent()));
    cells.push_back(format_raw(r.p_new_born().percent()));
    cells.push_back(stay ? format_raw(stay->percent()) : "");
  }
  return cells;
}

/// One row per year; undetermined stayer cells are empty.
inline std::string cohorts_csv(std::span<const YearCohorts> series, const CohortCsvOptions& o = {}) {
  CsvWriter w(cohort_csv_header(o));
  for (const auto& r : series) w.row(cohort_csv_cells(r, o));
  return w.release();
}

}  // namespace communitylens
