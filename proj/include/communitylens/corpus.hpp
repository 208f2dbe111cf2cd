#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <limits>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "communitylens/common.hpp"

namespace communitylens {

// ---- research areas ---------------------------------------------------------

enum class Area : std::uint8_t {
  kMathematicsComputerScience,
  kBiomedicalHealthSciences,
  kSocialSciencesHumanities,
  kPhysicalSciencesEngineering,
  kLifeEarthSciences,
};

inline constexpr std::size_t kAreaCount = 5;

inline constexpr std::array<std::string_view, kAreaCount> kAreaNames = {
    "Mathematics & Computer Science", "Biomedical & Health Sciences", "Social Sciences & Humanities",
    "Physical Sciences & Engineering", "Life & Earth Sciences",
};

inline std::string_view area_name(Area a) { return kAreaNames[static_cast<std::size_t>(a)]; }

inline std::optional<Area> parse_area(std::string_view text) {
  auto lower = [](std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
  };
  const std::string needle = lower(text);
  for (std::size_t i = 0; i < kAreaCount; ++i)
    if (lower(kAreaNames[i]) == needle) return static_cast<Area>(i);
  return std::nullopt;
}

// ---- records ----------------------------------------------------------------

struct TextFields {
  std::string title;
  std::string abstract;
  std::vector<std::string> keywords;
};

using TopicMask = std::uint64_t;
inline constexpr std::size_t kMaxTopics = 64;

/// One publication. Author lists live in Corpus::author_refs; the record keeps
/// an offset/length pair so that large corpora stay compact.
struct PublicationRecord {
  std::string pub_id;
  Year year = 0;
  std::int32_t cluster = kNoCluster;
  TopicMask topics = 0;
  std::uint32_t first_author = 0;
  std::uint32_t author_count = 0;
  std::int32_t text = -1;
  std::uint32_t line = 0;
  std::uint8_t doc_type = 0;

  bool has_topic(int bit) const { return (topics >> bit) & 1u; }
};

struct YearCount {
  Year year = 0;
  std::int64_t count = 0;

  friend bool operator==(const YearCount&, const YearCount&) = default;
};

struct AuthorCareer {
  Year yfp = 0;
  std::vector<YearCount> pubs_per_year;  // ascending by year

  std::int64_t count_in(Year y) const {
    auto it = std::lower_bound(pubs_per_year.begin(), pubs_per_year.end(), y,
                               [](const YearCount& yc, Year v) { return yc.year < v; });
    return (it != pubs_per_year.end() && it->year == y) ? it->count : 0;
  }

  std::int64_t total_within(const Horizon& h) const {
    std::int64_t total = 0;
    for (const auto& yc : pubs_per_year)
      if (h.contains(yc.year)) total += yc.count;
    return total;
  }

  friend bool operator==(const AuthorCareer&, const AuthorCareer&) = default;
};

struct ClusterMeta {
  std::string cluster_id;
  std::string label;
  Area area = Area::kMathematicsComputerScience;
  std::int64_t total_authors = 0;
  std::optional<double> x;
  std::optional<double> y;

  friend bool operator==(const ClusterMeta&, const ClusterMeta&) = default;
};

/// String-keyed publication as read from a file or built by hand.
struct PublicationInput {
  std::string pub_id;
  Year year = 0;
  std::vector<std::string> authors;
  std::vector<std::string> topic_flags;
  std::optional<std::string> cluster_id;
  std::optional<std::string> doc_type;
  std::optional<TextFields> text;
  std::uint32_t line = 0;
};

// ---- corpus -----------------------------------------------------------------

/// Validated, immutable bibliographic corpus. Author indices are ranks in the
/// sorted author id table, so every author-ordered output is ordered by id.
class Corpus {
 public:
  Horizon horizon;
  std::vector<PublicationRecord> publications;
  std::vector<AuthorIndex> author_refs;
  std::vector<std::string> author_ids;
  std::vector<std::optional<AuthorCareer>> careers;
  std::vector<std::string> topics;
  std::vector<ClusterMeta> clusters;  // sorted by cluster_id
  std::vector<std::string> doc_types{std::string{}};
  std::vector<TextFields> texts;
  // Cluster references that matched no metadata, kept only by lenient loads.
  std::vector<std::pair<std::size_t, std::string>> unresolved_clusters;

  std::span<const AuthorIndex> authors_of(const PublicationRecord& p) const {
    return std::span<const AuthorIndex>(author_refs).subspan(p.first_author, p.author_count);
  }

  std::span<const std::uint32_t> publications_of(AuthorIndex a) const {
    return std::span<const std::uint32_t>(author_pubs_).subspan(author_pub_offsets_[a],
                                                               author_pub_offsets_[a + 1] - author_pub_offsets_[a]);
  }

  std::size_t author_count() const { return author_ids.size(); }

  std::optional<int> topic_bit(std::string_view label) const {
    for (std::size_t i = 0; i < topics.size(); ++i)
      if (topics[i] == label) return static_cast<int>(i);
    return std::nullopt;
  }

  int require_topic(std::string_view label) const {
    auto bit = topic_bit(label);
    if (!bit) throw AnalysisError("unknown topic label: " + std::string(label));
    return *bit;
  }

  std::optional<AuthorIndex> find_author(std::string_view id) const {
    auto it = std::lower_bound(author_ids.begin(), author_ids.end(), id);
    if (it == author_ids.end() || *it != id) return std::nullopt;
    return static_cast<AuthorIndex>(it - author_ids.begin());
  }

  std::optional<std::int32_t> find_cluster(std::string_view id) const {
    auto it = std::lower_bound(clusters.begin(), clusters.end(), id,
                               [](const ClusterMeta& c, std::string_view v) { return c.cluster_id < v; });
    if (it == clusters.end() || it->cluster_id != id) return std::nullopt;
    return static_cast<std::int32_t>(it - clusters.begin());
  }

  std::string_view doc_type(const PublicationRecord& p) const { return doc_types[p.doc_type]; }
  const TextFields* text(const PublicationRecord& p) const { return p.text < 0 ? nullptr : &texts[p.text]; }

  /// Rebuilds the author → publication index. Called once the record set is final.
  void index() {
    author_pub_offsets_.assign(author_ids.size() + 1, 0);
    for (const auto& p : publications)
      for (AuthorIndex a : authors_of(p)) ++author_pub_offsets_[a + 1];
    std::partial_sum(author_pub_offsets_.begin(), author_pub_offsets_.end(), author_pub_offsets_.begin());
    author_pubs_.assign(author_pub_offsets_.back(), 0);
    std::vector<std::size_t> cursor(author_pub_offsets_.begin(), author_pub_offsets_.end() - 1);
    for (std::size_t i = 0; i < publications.size(); ++i)
      for (AuthorIndex a : authors_of(publications[i])) author_pubs_[cursor[a]++] = static_cast<std::uint32_t>(i);
  }

 private:
  std::vector<std::size_t> author_pub_offsets_{0};
  std::vector<std::uint32_t> author_pubs_;
};

// ---- delineation ------------------------------------------------------------

/// Lower-cased tokens: maximal runs of ASCII letters/digits. Bytes >= 0x80 are
/// token characters so UTF-8 sequences never split a word.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c >= 0x80) {
      cur.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

namespace detail {

inline bool contains_phrase(const std::vector<std::string>& hay, const std::vector<std::string>& phrase) {
  if (phrase.empty() || phrase.size() > hay.size()) return false;
  for (std::size_t i = 0; i + phrase.size() <= hay.size(); ++i)
    if (std::equal(phrase.begin(), phrase.end(), hay.begin() + static_cast<std::ptrdiff_t>(i))) return true;
  return false;
}

}  // namespace detail

/// True iff any term occurs in the title, the abstract, or one keyword as a
/// contiguous, case-insensitive token sequence.
inline bool delineate(const TextFields& text, std::span<const std::string> terms) {
  if (terms.empty()) throw AnalysisError("delineate: term list is empty");
  std::vector<std::vector<std::string>> phrases;
  phrases.reserve(terms.size());
  for (const auto& t : terms) phrases.push_back(tokenize(t));

  auto field_matches = [&](std::string_view field) {
    if (field.empty()) return false;
    auto tokens = tokenize(field);
    return std::any_of(phrases.begin(), phrases.end(),
                       [&](const auto& ph) { return detail::contains_phrase(tokens, ph); });
  };
  if (field_matches(text.title) || field_matches(text.abstract)) return true;
  return std::any_of(text.keywords.begin(), text.keywords.end(), field_matches);
}

// ---- validation -------------------------------------------------------------

enum class DefectKind {
  kOutOfHorizon,
  kUnknownCluster,
  kCareerInconsistency,
  kDuplicateId,
  kMissingCareer,
  kInvalidRecord,
};

inline std::string_view defect_name(DefectKind k) {
  switch (k) {
    case DefectKind::kOutOfHorizon: return "out_of_horizon";
    case DefectKind::kUnknownCluster: return "unknown_cluster";
    case DefectKind::kCareerInconsistency: return "career_inconsistency";
    case DefectKind::kDuplicateId: return "duplicate_id";
    case DefectKind::kMissingCareer: return "missing_career";
    case DefectKind::kInvalidRecord: return "invalid_record";
  }
  return "?";
}

struct Defect {
  DefectKind kind;
  std::string subject;  // pub_id, author_id or cluster_id
  std::string detail;
};

struct ValidationReport {
  std::size_t out_of_horizon = 0;
  std::size_t unknown_clusters = 0;
  std::size_t career_inconsistencies = 0;  // authors
  std::size_t duplicate_ids = 0;           // repeated occurrences
  std::size_t missing_careers = 0;         // authors
  std::size_t invalid_records = 0;
  std::vector<Defect> defects;

  std::size_t total() const {
    return out_of_horizon + unknown_clusters + career_inconsistencies + duplicate_ids + missing_careers +
           invalid_records;
  }
  bool clean() const { return total() == 0; }
  // Defects that block analysis; out-of-horizon records and unknown clusters
  // are dropped or degraded by a strict load instead.
  bool has_hard_defects() const {
    return career_inconsistencies + duplicate_ids + missing_careers + invalid_records > 0;
  }
};

namespace detail {

// Per-year record counts of one author, from the records in `corpus`.
inline std::vector<YearCount> observed_year_counts(const Corpus& corpus, AuthorIndex a) {
  std::vector<Year> years;
  for (std::uint32_t pi : corpus.publications_of(a)) years.push_back(corpus.publications[pi].year);
  std::sort(years.begin(), years.end());
  std::vector<YearCount> out;
  for (Year y : years) {
    if (!out.empty() && out.back().year == y)
      ++out.back().count;
    else
      out.push_back({y, 1});
  }
  return out;
}

inline std::optional<std::string> career_problem(const AuthorCareer& career, std::span<const YearCount> observed) {
  std::optional<Year> first_positive;
  for (const auto& yc : career.pubs_per_year) {
    if (yc.count < 0) return "negative count in " + std::to_string(yc.year);
    if (yc.count > 0 && !first_positive) first_positive = yc.year;
  }
  if (!first_positive) return std::string("no positive publication count");
  if (career.yfp > *first_positive)
    return "yfp " + std::to_string(career.yfp) + " after first counted year " + std::to_string(*first_positive);
  if (!observed.empty() && career.yfp > observed.front().year)
    return "yfp " + std::to_string(career.yfp) + " after earliest publication year " +
           std::to_string(observed.front().year);
  for (const auto& yc : observed) {
    std::int64_t c = career.count_in(yc.year);
    if (c < yc.count)
      return "career count " + std::to_string(c) + " below " + std::to_string(yc.count) + " publications in " +
             std::to_string(yc.year);
  }
  return std::nullopt;
}

}  // namespace detail

/// Checks corpus invariants without modifying anything. Counts are exact.
inline ValidationReport validate(const Corpus& corpus) {
  ValidationReport r;
  // Duplicate ids: sort (hash, index) pairs, then confirm equal hashes exactly.
  std::vector<std::pair<std::size_t, std::uint32_t>> keyed(corpus.publications.size());
  for (std::size_t i = 0; i < keyed.size(); ++i)
    keyed[i] = {std::hash<std::string_view>{}(corpus.publications[i].pub_id), static_cast<std::uint32_t>(i)};
  std::sort(keyed.begin(), keyed.end());
  std::vector<bool> repeated(corpus.publications.size(), false);
  for (std::size_t i = 0; i < keyed.size();) {
    std::size_t j = i + 1;
    while (j < keyed.size() && keyed[j].first == keyed[i].first) ++j;
    for (std::size_t k = i + 1; k < j; ++k)
      for (std::size_t m = i; m < k; ++m)
        if (corpus.publications[keyed[k].second].pub_id == corpus.publications[keyed[m].second].pub_id) {
          repeated[keyed[k].second] = true;
          break;
        }
    i = j;
  }
  for (std::size_t i = 0; i < corpus.publications.size(); ++i) {
    const auto& p = corpus.publications[i];
    if (!corpus.horizon.contains(p.year)) {
      ++r.out_of_horizon;
      r.defects.push_back({DefectKind::kOutOfHorizon, p.pub_id, "year " + std::to_string(p.year)});
    }
    if (repeated[i]) {
      ++r.duplicate_ids;
      r.defects.push_back({DefectKind::kDuplicateId, p.pub_id, "line " + std::to_string(p.line)});
    }
    auto authors = corpus.authors_of(p);
    std::vector<AuthorIndex> sorted(authors.begin(), authors.end());
    std::sort(sorted.begin(), sorted.end());
    if (sorted.empty()) {
      ++r.invalid_records;
      r.defects.push_back({DefectKind::kInvalidRecord, p.pub_id, "empty author list"});
    } else if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      ++r.invalid_records;
      r.defects.push_back({DefectKind::kInvalidRecord, p.pub_id, "duplicate author in record"});
    }
  }
  for (const auto& [pub, cluster_id] : corpus.unresolved_clusters) {
    ++r.unknown_clusters;
    r.defects.push_back({DefectKind::kUnknownCluster, cluster_id, "publication " + corpus.publications[pub].pub_id});
  }
  for (AuthorIndex a = 0; a < corpus.author_count(); ++a) {
    const auto& career = corpus.careers[a];
    auto observed = detail::observed_year_counts(corpus, a);
    if (!career) {
      if (!observed.empty()) {
        ++r.missing_careers;
        r.defects.push_back({DefectKind::kMissingCareer, corpus.author_ids[a], "no career entry"});
      }
      continue;
    }
    if (auto problem = detail::career_problem(*career, observed)) {
      ++r.career_inconsistencies;
      r.defects.push_back({DefectKind::kCareerInconsistency, corpus.author_ids[a], *problem});
    }
  }
  return r;
}

// ---- building ---------------------------------------------------------------

struct BuildOptions {
  Horizon horizon;
  // Strict builds throw on hard defects, drop out-of-horizon records and
  // degrade unknown clusters to "no cluster". Lenient builds keep everything
  // so that validate() can report it.
  bool strict = true;
  std::vector<std::string> doc_types;  // empty: no doc_type filter
  std::vector<std::pair<std::string, std::vector<std::string>>> delineation;
};

struct LoadReport {
  std::size_t records_read = 0;
  std::size_t records_kept = 0;
  std::size_t out_of_horizon_dropped = 0;
  std::size_t doc_type_dropped = 0;
  std::size_t unknown_cluster_refs = 0;
  std::size_t delineated = 0;
  bool careers_derived = false;
  std::size_t supplied_career_differences = 0;
  std::vector<std::string> warnings;

  friend bool operator==(const LoadReport&, const LoadReport&) = default;
};

struct LoadResult {
  Corpus corpus;
  LoadReport report;
  ValidationReport validation;
};

/// Derives careers from the records of a corpus: yfp is the earliest record
/// year of each author and pubs_per_year counts records per year.
inline std::vector<std::optional<AuthorCareer>> derive_careers(const Corpus& corpus) {
  std::vector<std::optional<AuthorCareer>> out(corpus.author_count());
  for (AuthorIndex a = 0; a < corpus.author_count(); ++a) {
    auto observed = detail::observed_year_counts(corpus, a);
    if (observed.empty()) continue;
    AuthorCareer c;
    c.yfp = observed.front().year;
    c.pubs_per_year = std::move(observed);
    out[a] = std::move(c);
  }
  return out;
}

/// Accumulates string-keyed inputs and produces a Corpus.
class CorpusBuilder {
 public:
  void add_publication(const PublicationInput& in) {
    PublicationRecord rec;
    rec.pub_id = in.pub_id;
    rec.year = in.year;
    rec.line = in.line;
    rec.first_author = static_cast<std::uint32_t>(refs_.size());
    rec.author_count = static_cast<std::uint32_t>(in.authors.size());
    for (const auto& a : in.authors) refs_.push_back(intern_author(a));
    for (const auto& t : in.topic_flags) rec.topics |= TopicMask{1} << intern_topic(t);
    if (in.cluster_id) rec.cluster = intern_cluster_ref(*in.cluster_id);
    if (in.doc_type) rec.doc_type = intern_doc_type(*in.doc_type);
    if (in.text) {
      rec.text = static_cast<std::int32_t>(texts_.size());
      texts_.push_back(*in.text);
    }
    records_.push_back(std::move(rec));
  }

  /// One row of the long-format careers table.
  void add_career_row(std::string_view author, Year yfp, Year year, std::int64_t count) {
    careers_supplied_ = true;
    auto& c = supplied_slot(intern_author(author));
    if (!c) {
      c = AuthorCareer{yfp, {}};
    } else if (c->yfp != yfp) {
      throw LoadError("careers: conflicting yfp for author " + std::string(author));
    }
    auto it = std::lower_bound(c->pubs_per_year.begin(), c->pubs_per_year.end(), year,
                               [](const YearCount& yc, Year v) { return yc.year < v; });
    if (it != c->pubs_per_year.end() && it->year == year)
      throw LoadError("careers: duplicate row for author " + std::string(author) + " year " + std::to_string(year));
    c->pubs_per_year.insert(it, {year, count});
  }

  void add_career(std::string_view author, AuthorCareer career) {
    careers_supplied_ = true;
    std::sort(career.pubs_per_year.begin(), career.pubs_per_year.end(),
              [](const YearCount& a, const YearCount& b) { return a.year < b.year; });
    supplied_slot(intern_author(author)) = std::move(career);
  }

  /// Marks careers as supplied even when no rows were added (empty file).
  void mark_careers_supplied() { careers_supplied_ = true; }

  void add_cluster(ClusterMeta meta) {
    if (!cluster_ids_seen_.insert(meta.cluster_id).second)
      throw LoadError("clusters: duplicate cluster_id " + meta.cluster_id);
    clusters_.push_back(std::move(meta));
  }

  std::size_t size() const { return records_.size(); }

  LoadResult build(const BuildOptions& options) && {
    LoadResult result;
    LoadReport& report = result.report;
    Corpus& corpus = result.corpus;
    corpus.horizon = options.horizon;
    report.records_read = records_.size();

    // Author table sorted by id; remap provisional indices to ranks.
    std::vector<std::uint32_t> order(author_names_.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return author_names_[a] < author_names_[b]; });
    std::vector<AuthorIndex> rank(order.size());
    corpus.author_ids.reserve(order.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
      rank[order[r]] = static_cast<AuthorIndex>(r);
      corpus.author_ids.push_back(std::move(author_names_[order[r]]));
    }
    author_names_.clear();
    author_lookup_.clear();
    for (auto& ref : refs_) ref = rank[ref];

    // Topics, including any introduced by delineation rules.
    corpus.topics = std::move(topics_);
    std::vector<std::pair<int, const std::vector<std::string>*>> rules;
    for (const auto& [label, terms] : options.delineation) {
      auto bit = corpus.topic_bit(label);
      if (!bit) {
        if (corpus.topics.size() >= kMaxTopics) throw LoadError("too many topic labels");
        corpus.topics.push_back(label);
        bit = static_cast<int>(corpus.topics.size() - 1);
      }
      rules.emplace_back(*bit, &terms);
    }
    if (!rules.empty()) {
      for (auto& rec : records_) {
        if (rec.text < 0) continue;
        for (const auto& [bit, terms] : rules) {
          if (rec.has_topic(bit)) continue;
          if (delineate(texts_[rec.text], *terms)) {
            rec.topics |= TopicMask{1} << bit;
            ++report.delineated;
          }
        }
      }
    }

    // Clusters sorted by id; unresolved references remembered by record.
    std::sort(clusters_.begin(), clusters_.end(),
              [](const ClusterMeta& a, const ClusterMeta& b) { return a.cluster_id < b.cluster_id; });
    corpus.clusters = std::move(clusters_);
    std::vector<std::optional<std::int32_t>> cluster_map(cluster_refs_.size());
    for (std::size_t i = 0; i < cluster_refs_.size(); ++i) cluster_map[i] = corpus.find_cluster(cluster_refs_[i]);

    corpus.doc_types = std::move(doc_types_);
    corpus.texts = std::move(texts_);
    corpus.author_refs = std::move(refs_);
    corpus.publications = std::move(records_);
    for (std::size_t i = 0; i < corpus.publications.size(); ++i) {
      auto& rec = corpus.publications[i];
      if (rec.cluster == kNoCluster) continue;
      auto ref = static_cast<std::size_t>(rec.cluster);
      if (cluster_map[ref]) {
        rec.cluster = *cluster_map[ref];
      } else {
        rec.cluster = kNoCluster;
        corpus.unresolved_clusters.emplace_back(i, cluster_refs_[ref]);
      }
    }

    // Careers: supplied ones win; otherwise derived from every record read.
    corpus.index();
    if (careers_supplied_) {
      corpus.careers.assign(corpus.author_count(), std::nullopt);
      for (std::size_t prov = 0; prov < supplied_.size(); ++prov)
        if (supplied_[prov]) corpus.careers[rank[prov]] = std::move(supplied_[prov]);
      supplied_.clear();
      auto derived = derive_careers(corpus);
      for (AuthorIndex a = 0; a < corpus.author_count(); ++a)
        if (derived[a] && corpus.careers[a] && !(*derived[a] == *corpus.careers[a]))
          ++report.supplied_career_differences;
    } else {
      corpus.careers = derive_careers(corpus);
      report.careers_derived = true;
    }

    result.validation = validate(corpus);
    if (!options.strict) {
      report.records_kept = corpus.publications.size();
      return result;
    }

    if (result.validation.has_hard_defects()) throw LoadError(describe_hard_defects(result.validation));

    // Strict: degrade unknown clusters, apply doc_type and horizon filters.
    report.unknown_cluster_refs = corpus.unresolved_clusters.size();
    for (const auto& [pub, id] : corpus.unresolved_clusters)
      report.warnings.push_back("unknown cluster_id " + id + " in publication " + corpus.publications[pub].pub_id);
    corpus.unresolved_clusters.clear();

    std::vector<bool> allowed_doc(corpus.doc_types.size(), options.doc_types.empty());
    for (std::size_t i = 0; i < corpus.doc_types.size(); ++i)
      for (const auto& d : options.doc_types)
        if (i != 0 && corpus.doc_types[i] == d) allowed_doc[i] = true;

    std::size_t out = 0;
    std::uint32_t ref_out = 0;
    for (std::size_t i = 0; i < corpus.publications.size(); ++i) {
      auto& rec = corpus.publications[i];
      if (!allowed_doc[rec.doc_type]) {
        ++report.doc_type_dropped;
        continue;
      }
      if (!corpus.horizon.contains(rec.year)) {
        ++report.out_of_horizon_dropped;
        continue;
      }
      for (std::uint32_t k = 0; k < rec.author_count; ++k)
        corpus.author_refs[ref_out + k] = corpus.author_refs[rec.first_author + k];
      rec.first_author = ref_out;
      ref_out += rec.author_count;
      if (out != i) corpus.publications[out] = std::move(rec);
      ++out;
    }
    corpus.publications.resize(out);
    corpus.author_refs.resize(ref_out);
    corpus.index();
    report.records_kept = out;
    result.validation = ValidationReport{};
    return result;
  }

 private:
  static std::string describe_hard_defects(const ValidationReport& v) {
    std::string msg = "corpus validation failed:";
    std::size_t shown = 0;
    for (const auto& d : v.defects) {
      if (d.kind == DefectKind::kOutOfHorizon || d.kind == DefectKind::kUnknownCluster) continue;
      if (shown++ == 20) {
        msg += "\n  ...";
        break;
      }
      msg += "\n  " + std::string(defect_name(d.kind)) + ": " + d.subject + " (" + d.detail + ")";
    }
    return msg;
  }

  AuthorIndex intern_author(std::string_view id) {
    auto it = author_lookup_.find(std::string(id));
    if (it != author_lookup_.end()) return it->second;
    auto idx = static_cast<AuthorIndex>(author_names_.size());
    author_names_.emplace_back(id);
    author_lookup_.emplace(author_names_.back(), idx);
    return idx;
  }

  std::optional<AuthorCareer>& supplied_slot(AuthorIndex idx) {
    if (supplied_.size() <= idx) supplied_.resize(idx + 1);
    return supplied_[idx];
  }

  int intern_topic(std::string_view label) {
    for (std::size_t i = 0; i < topics_.size(); ++i)
      if (topics_[i] == label) return static_cast<int>(i);
    if (topics_.size() >= kMaxTopics) throw LoadError("too many topic labels (max 64)");
    topics_.emplace_back(label);
    return static_cast<int>(topics_.size() - 1);
  }

  std::int32_t intern_cluster_ref(std::string_view id) {
    auto [it, inserted] = cluster_ref_lookup_.try_emplace(std::string(id), static_cast<std::int32_t>(cluster_refs_.size()));
    if (inserted) cluster_refs_.emplace_back(id);
    return it->second;
  }

  std::uint8_t intern_doc_type(std::string_view d) {
    for (std::size_t i = 1; i < doc_types_.size(); ++i)
      if (doc_types_[i] == d) return static_cast<std::uint8_t>(i);
    if (doc_types_.size() >= 255) throw LoadError("too many distinct doc_type values");
    doc_types_.emplace_back(d);
    return static_cast<std::uint8_t>(doc_types_.size() - 1);
  }

  std::vector<PublicationRecord> records_;
  std::vector<AuthorIndex> refs_;
  std::vector<std::string> author_names_;
  std::unordered_map<std::string, AuthorIndex> author_lookup_;
  std::vector<std::string> topics_;
  std::vector<std::string> cluster_refs_;
  std::unordered_map<std::string, std::int32_t> cluster_ref_lookup_;
  std::vector<std::string> doc_types_{std::string{}};
  std::vector<TextFields> texts_;
  std::vector<ClusterMeta> clusters_;
  std::unordered_set<std::string> cluster_ids_seen_;
  std::vector<std::optional<AuthorCareer>> supplied_;  // by provisional author index
  bool careers_supplied_ = false;
};

}  // namespace communitylens
