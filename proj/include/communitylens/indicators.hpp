#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "communitylens/cohorts.hpp"
#include "communitylens/common.hpp"
#include "communitylens/corpus.hpp"
#include "communitylens/parallel.hpp"

namespace communitylens {

/// How an author's whole-horizon research focus is aggregated.
enum class FocusMode {
  kTotalRatio,  // 100 * topic publications / all publications in the horizon
  kMeanAnnual,  // mean of the annual percentages
};

inline std::string_view to_string(FocusMode m) { return m == FocusMode::kTotalRatio ? "total_ratio" : "mean_annual"; }

inline std::optional<FocusMode> parse_focus_mode(std::string_view s) {
  if (s == "total_ratio") return FocusMode::kTotalRatio;
  if (s == "mean_annual") return FocusMode::kMeanAnnual;
  return std::nullopt;
}

struct YearPercent {
  Year year = 0;
  double percent = 0.0;

  friend bool operator==(const YearPercent&, const YearPercent&) = default;
};

struct AuthorProfile {
  AuthorIndex author = 0;
  Year yfp = 0;
  Year yfp_topic = 0;
  std::vector<YearCount> n_p_by_year;     // topic publications per active year
  std::vector<YearPercent> p_f_by_year;   // every horizon year with output > 0
  std::int64_t production_total = 0;
  std::int64_t output_total = 0;          // all publications within the horizon
  double focus_overall = 0.0;
  std::uint8_t areas = 0;

  int time_lag() const { return yfp_topic - yfp; }

  std::int64_t n_p(Year y) const {
    for (const auto& yc : n_p_by_year)
      if (yc.year == y) return yc.count;
    return 0;
  }
  std::optional<double> p_f(Year y) const {
    for (const auto& yp : p_f_by_year)
      if (yp.year == y) return yp.percent;
    return std::nullopt;
  }

  friend bool operator==(const AuthorProfile&, const AuthorProfile&) = default;
};

/// Profiles of one topic community, ordered by author id.
class ProfileSet {
 public:
  ProfileSet() = default;
  ProfileSet(std::vector<AuthorProfile> profiles, std::size_t author_count)
      : profiles_(std::move(profiles)), position_(author_count, -1) {
    for (std::size_t i = 0; i < profiles_.size(); ++i) position_[profiles_[i].author] = static_cast<std::int32_t>(i);
  }

  const std::vector<AuthorProfile>& all() const { return profiles_; }
  std::size_t size() const { return profiles_.size(); }
  bool empty() const { return profiles_.empty(); }
  auto begin() const { return profiles_.begin(); }
  auto end() const { return profiles_.end(); }
  const AuthorProfile& operator[](std::size_t i) const { return profiles_[i]; }

  const AuthorProfile* find(AuthorIndex a) const {
    if (a >= position_.size() || position_[a] < 0) return nullptr;
    return &profiles_[static_cast<std::size_t>(position_[a])];
  }

 private:
  std::vector<AuthorProfile> profiles_;
  std::vector<std::int32_t> position_;
};

inline ProfileSet author_profiles(const Corpus& corpus, const TopicTimeline& tl, FocusMode mode = FocusMode::kTotalRatio,
                                  const Executor& exec = Executor{}) {
  std::vector<AuthorProfile> profiles(tl.size());
  constexpr std::size_t kChunk = 1 << 12;
  exec.for_chunks(tl.size(), kChunk, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const AuthorIndex a = tl.authors[i];
      const auto& career = corpus.careers[a];
      const std::string& id = corpus.author_ids[a];
      if (!career) throw AnalysisError("author " + id + " has no career entry");
      AuthorProfile& p = profiles[i];
      p.author = a;
      p.yfp = career->yfp;
      p.areas = tl.area_masks[i];
      auto years = tl.years_of(i);
      p.yfp_topic = years.front().year;
      p.n_p_by_year.assign(years.begin(), years.end());
      for (const auto& yc : years) {
        std::int64_t total = career->count_in(yc.year);
        if (total < yc.count)
          throw AnalysisError("career of author " + id + " records " + std::to_string(total) + " publications in " +
                              std::to_string(yc.year) + " but the topic alone has " + std::to_string(yc.count));
        p.production_total += yc.count;
      }
      for (const auto& yc : career->pubs_per_year) {
        if (!tl.horizon.contains(yc.year) || yc.count <= 0) continue;
        p.output_total += yc.count;
        std::int64_t topic = 0;
        for (const auto& t : years)
          if (t.year == yc.year) topic = t.count;
        p.p_f_by_year.push_back({yc.year, 100.0 * static_cast<double>(topic) / static_cast<double>(yc.count)});
      }
      if (mode == FocusMode::kTotalRatio) {
        p.focus_overall = 100.0 * static_cast<double>(p.production_total) / static_cast<double>(p.output_total);
      } else {
        std::vector<double> annual;
        for (const auto& yp : p.p_f_by_year) annual.push_back(yp.percent);
        p.focus_overall = *mean_of(annual);
      }
    }
  });
  return ProfileSet(std::move(profiles), corpus.author_count());
}

inline ProfileSet author_profiles(const Corpus& corpus, std::string_view topic, FocusMode mode = FocusMode::kTotalRatio,
                                  const Executor& exec = Executor{}) {
  return author_profiles(corpus, build_timeline(corpus, topic, exec), mode, exec);
}

// ---- per-year summaries ------------------------------------------------------------

struct YearIndicatorSummary {
  Year year = 0;
  std::int64_t n_authors = 0;
  ExactMean mean_yfp_all;
  ExactMean mean_yfp_new;
  ExactMean mean_yfp_old;
  ExactMean mean_yfp_topic;
  ExactMean mean_n_p;
  std::optional<double> mean_p_f;
  std::optional<double> p_f_ci95;  // normal-approximation half-width; needs n >= 2

  friend bool operator==(const YearIndicatorSummary&, const YearIndicatorSummary&) = default;
};

/// Means over the topic authors active in `cohorts.year`. Group means follow
/// the cohort partition into new and old authors.
inline YearIndicatorSummary year_summary(const ProfileSet& profiles, const YearCohorts& cohorts) {
  YearIndicatorSummary s;
  s.year = cohorts.year;
  s.n_authors = cohorts.n_all();
  auto profile = [&](AuthorIndex a) -> const AuthorProfile& {
    const AuthorProfile* p = profiles.find(a);
    if (!p) throw AnalysisError("no profile for a topic author active in " + std::to_string(cohorts.year));
    return *p;
  };
  std::vector<double> focus;
  focus.reserve(cohorts.all_authors.size());
  for (AuthorIndex a : cohorts.all_authors) {
    const auto& p = profile(a);
    s.mean_yfp_all.add(p.yfp);
    s.mean_yfp_topic.add(p.yfp_topic);
    s.mean_n_p.add(p.n_p(cohorts.year));
    auto pf = p.p_f(cohorts.year);
    if (!pf) throw AnalysisError("no output recorded for an active author in " + std::to_string(cohorts.year));
    focus.push_back(*pf);
  }
  for (AuthorIndex a : cohorts.new_authors) s.mean_yfp_new.add(profile(a).yfp);
  for (AuthorIndex a : cohorts.old_authors) s.mean_yfp_old.add(profile(a).yfp);
  s.mean_p_f = mean_of(focus);
  if (focus.size() >= 2) {
    std::vector<double> sq(focus.size());
    for (std::size_t i = 0; i < focus.size(); ++i) sq[i] = (focus[i] - *s.mean_p_f) * (focus[i] - *s.mean_p_f);
    double var = pairwise_sum(sq) / static_cast<double>(focus.size() - 1);
    s.p_f_ci95 = 1.96 * std::sqrt(var) / std::sqrt(static_cast<double>(focus.size()));
  }
  return s;
}

inline YearIndicatorSummary year_summary(const ProfileSet& profiles, std::span<const YearCohorts> series, Year year) {
  for (const auto& row : series)
    if (row.year == year) return year_summary(profiles, row);
  throw AnalysisError("year " + std::to_string(year) + " outside horizon");
}

inline std::vector<YearIndicatorSummary> summary_series(const ProfileSet& profiles, std::span<const YearCohorts> series) {
  std::vector<YearIndicatorSummary> out;
  out.reserve(series.size());
  for (const auto& row : series) out.push_back(year_summary(profiles, row));
  return out;
}

// ---- production bands -------------------------------------------------------------

struct ProductionBand {
  std::string_view label;
  std::int64_t lo = 0;
  std::int64_t hi = 0;  // inclusive; INT64_MAX for the open band
  std::int64_t authors = 0;
  Share share;
  std::optional<double> mean_focus;

  friend bool operator==(const ProductionBand&, const ProductionBand&) = default;
};

inline constexpr std::array<std::pair<std::int64_t, std::int64_t>, 5> kBandBounds = {
    {{1, 1}, {2, 2}, {3, 5}, {6, 10}, {11, INT64_MAX}}};
inline constexpr std::array<std::string_view, 5> kBandLabels = {"1", "2", "3-5", "6-10", ">10"};

inline std::size_t band_of(std::int64_t production) {
  for (std::size_t b = 0; b < kBandBounds.size(); ++b)
    if (production >= kBandBounds[b].first && production <= kBandBounds[b].second) return b;
  throw AnalysisError("production must be at least 1");
}

/// Authors per production band {1, 2, 3-5, 6-10, >10} with mean focus per band.
inline std::array<ProductionBand, 5> production_bands(const ProfileSet& profiles) {
  std::array<ProductionBand, 5> bands;
  std::array<std::vector<double>, 5> focus;
  for (std::size_t b = 0; b < bands.size(); ++b)
  {
    bands[b].label = kBandLabels[b];
    bands[b].lo = kBandBounds[b].first;
    bands[b].hi = kBandBounds[b].second;
  }
  for (const auto& p : profiles) {
    auto b = band_of(p.production_total);
    ++bands[b].authors;
    focus[b].push_back(p.focus_overall);
  }
  for (std::size_t b = 0; b < bands.size(); ++b) {
    bands[b].share = Share{bands[b].authors, static_cast<std::int64_t>(profiles.size())};
    bands[b].mean_focus = mean_of(focus[b]);
  }
  return bands;
}

// ---- emission ------------------------------------------------------------------

inline std::string mean_cell(const ExactMean& m) { return m.defined() ? format_1dp(m) : ""; }
inline std::string mean_cell(const std::optional<double>& m) { return m ? format_1dp(*m) : ""; }
inline std::string raw_cell(const ExactMean& m) { return m.defined() ? format_raw(m.value()) : ""; }
inline std::string raw_cell(const std::optional<double>& m) { return m ? format_raw(*m) : ""; }

/// year,N_AU,YFP_all,YFP_new,YFP_old,YFP_topic,N_p,P_f,P_f_ci95
inline std::string indicators_csv(std::span<const YearIndicatorSummary> rows, bool raw = false) {
  std::vector<std::string> header{"year", "N_AU", "YFP_all", "YFP_new", "YFP_old", "YFP_topic", "N_p", "P_f", "P_f_ci95"};
  if (raw)
    for (auto h : {"YFP_all_raw", "YFP_new_raw", "YFP_old_raw", "YFP_topic_raw", "N_p_raw", "P_f_raw", "P_f_ci95_raw"})
      header.push_back(h);
  CsvWriter w(header);
  for (const auto& r : rows) {
    std::vector<std::string> cells{std::to_string(r.year),   std::to_string(r.n_authors), mean_cell(r.mean_yfp_all),
                                   mean_cell(r.mean_yfp_new), mean_cell(r.mean_yfp_old),   mean_cell(r.mean_yfp_topic),
                                   mean_cell(r.mean_n_p),     mean_cell(r.mean_p_f),       mean_cell(r.p_f_ci95)};
    if (raw) {
      for (const auto* m : {&r.mean_yfp_all, &r.mean_yfp_new, &r.mean_yfp_old, &r.mean_yfp_topic, &r.mean_n_p})
        cells.push_back(raw_cell(*m));
      cells.push_back(raw_cell(r.mean_p_f));
      cells.push_back(raw_cell(r.p_f_ci95));
    }
    w.row(cells);
  }
  return w.release();
}

inline std::string profiles_csv(const Corpus& corpus, const ProfileSet& profiles, bool raw = false) {
  std::vector<std::string> header{"author_id", "yfp", "yfp_topic", "time_lag", "production_total", "focus_overall"};
  if (raw) header.push_back("focus_overall_raw");
  CsvWriter w(header);
  for (const auto& p : profiles) {
    std::vector<std::string> cells{corpus.author_ids[p.author], std::to_string(p.yfp), std::to_string(p.yfp_topic),
                                   std::to_string(p.time_lag()), std::to_string(p.production_total),
                                   format_1dp(p.focus_overall)};
    if (raw) cells.push_back(format_raw(p.focus_overall));
    w.row(cells);
  }
  return w.release();
}

inline std::string bands_csv(const std::array<ProductionBand, 5>& bands, bool raw = false) {
  std::vector<std::string> header{"band", "authors", "share", "mean_focus"};
  if (raw) {
    header.push_back("share_raw");
    header.push_back("mean_focus_raw");
  }
  CsvWriter w(header);
  for (const auto& b : bands) {
    std::vector<std::string> cells{std::string(b.label), std::to_string(b.authors), format_1dp(b.share),
                                   mean_cell(b.mean_focus)};
    if (raw) {
      cells.push_back(format_raw(b.share.percent()));
      cells.push_back(raw_cell(b.mean_focus));
    }
    w.row(cells);
  }
  return w.release();
}

}  // namespace communitylens
