#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "communitylens/common.hpp"
#include "communitylens/corpus.hpp"
#include "communitylens/io.hpp"

namespace communitylens {

struct GeneratorConfig {
  std::uint64_t seed = 42;
  Horizon horizon{};
  std::string topic = "t";
  // New topic entrants per horizon year; years not listed use entrants_per_year.
  std::map<Year, std::int64_t> authors_per_year;
  std::int64_t entrants_per_year = 1000;
  double p_newborn = 0.4;
  double stay_prob = 0.162;
  int stay_window = 2;
  double lotka_alpha = 2.0;
  std::int64_t lotka_max = 10000;
  std::int64_t n_clusters = 50;
  int n_areas = 5;
  double clustered_share = 0.85;     // topic papers carrying a cluster
  double secondary_cluster = 0.1;    // clustered papers outside the author's home cluster
  double topic_share = 0.5;          // expected on-topic fraction of output in active years
  int max_team = 3;
  int max_career_lag = 15;           // years between yfp and topic entry for non-new-born authors

  std::int64_t entrants(Year y) const {
    auto it = authors_per_year.find(y);
    return it == authors_per_year.end() ? entrants_per_year : it->second;
  }
  std::int64_t total_entrants() const {
    std::int64_t n = 0;
    for (Year y = horizon.first; y <= horizon.last; ++y) n += entrants(y);
    return n;
  }
};

inline void check_config(const GeneratorConfig& c) {
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw AnalysisError(std::string("generator: ") + name + " must lie in [0,1]");
  };
  prob(c.p_newborn, "p_newborn");
  prob(c.stay_prob, "stay_prob");
  prob(c.clustered_share, "clustered_share");
  prob(c.secondary_cluster, "secondary_cluster");
  if (!(c.topic_share > 0.0 && c.topic_share <= 1.0)) throw AnalysisError("generator: topic_share must lie in (0,1]");
  if (!c.horizon.valid()) throw AnalysisError("generator: empty horizon");
  if (!(c.lotka_alpha > 1.0)) throw AnalysisError("generator: lotka_alpha must exceed 1");
  if (c.lotka_max < 1) throw AnalysisError("generator: lotka_max must be at least 1");
  if (c.stay_window < 1) throw AnalysisError("generator: stay_window must be at least 1");
  if (c.max_team < 1) throw AnalysisError("generator: max_team must be at least 1");
  if (c.max_career_lag < 1) throw AnalysisError("generator: max_career_lag must be at least 1");
  if (c.n_clusters < 0) throw AnalysisError("generator: n_clusters must be non-negative");
  if (c.n_areas < 1 || c.n_areas > static_cast<int>(kAreaCount))
    throw AnalysisError("generator: n_areas must lie in [1,5]");
  if (c.n_clusters == 0 && c.clustered_share > 0.0)
    throw AnalysisError("generator: clustered output requested with zero clusters");
  for (const auto& [y, n] : c.authors_per_year) {
    if (!c.horizon.contains(y)) throw AnalysisError("generator: authors_per_year year " + std::to_string(y) + " outside horizon");
    if (n < 0) throw AnalysisError("generator: negative entrant count");
  }
  if (c.entrants_per_year < 0) throw AnalysisError("generator: negative entrant count");
}

// ---- JSON config ---------------------------------------------------------------------

inline nlohmann::ordered_json to_json(const GeneratorConfig& c) {
  nlohmann::ordered_json j;
  j["seed"] = c.seed;
  j["horizon"] = to_string(c.horizon);
  j["topic"] = c.topic;
  nlohmann::ordered_json per_year = nlohmann::ordered_json::object();
  for (const auto& [y, n] : c.authors_per_year) per_year[std::to_string(y)] = n;
  j["authors_per_year"] = per_year;
  j["entrants_per_year"] = c.entrants_per_year;
  j["p_newborn"] = c.p_newborn;
  j["stay_prob"] = c.stay_prob;
  j["stay_window"] = c.stay_window;
  j["lotka_alpha"] = c.lotka_alpha;
  j["lotka_max"] = c.lotka_max;
  j["n_clusters"] = c.n_clusters;
  j["n_areas"] = c.n_areas;
  j["clustered_share"] = c.clustered_share;
  j["secondary_cluster"] = c.secondary_cluster;
  j["topic_share"] = c.topic_share;
  j["max_team"] = c.max_team;
  j["max_career_lag"] = c.max_career_lag;
  return j;
}

/// Overlays the keys present in `j` onto `c`. Unknown keys are rejected.
inline void apply_json(GeneratorConfig& c, const nlohmann::json& j) {
  if (!j.is_object()) throw AnalysisError("generator config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "seed") c.seed = v.get<std::uint64_t>();
    else if (key == "horizon") {
      auto h = parse_horizon(v.get<std::string>());
      if (!h) throw AnalysisError("generator config: bad horizon " + v.get<std::string>());
      c.horizon = *h;
    } else if (key == "topic") c.topic = v.get<std::string>();
    else if (key == "authors_per_year") {
      c.authors_per_year.clear();
      for (const auto& [y, n] : v.items()) c.authors_per_year[std::stoi(y)] = n.get<std::int64_t>();
    } else if (key == "entrants_per_year") c.entrants_per_year = v.get<std::int64_t>();
    else if (key == "p_newborn") c.p_newborn = v.get<double>();
    else if (key == "stay_prob") c.stay_prob = v.get<double>();
    else if (key == "stay_window") c.stay_window = v.get<int>();
    else if (key == "lotka_alpha") c.lotka_alpha = v.get<double>();
    else if (key == "lotka_max") c.lotka_max = v.get<std::int64_t>();
    else if (key == "n_clusters") c.n_clusters = v.get<std::int64_t>();
    else if (key == "n_areas") c.n_areas = v.get<int>();
    else if (key == "clustered_share") c.clustered_share = v.get<double>();
    else if (key == "secondary_cluster") c.secondary_cluster = v.get<double>();
    else if (key == "topic_share") c.topic_share = v.get<double>();
    else if (key == "max_team") c.max_team = v.get<int>();
    else if (key == "max_career_lag") c.max_career_lag = v.get<int>();
    else throw AnalysisError("generator config: unknown key " + key);
  }
}

// ---- sampling primitives -----------------------------------------------------------

/// Platform-independent draws on top of mt19937_64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return uniform() < p; }
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(engine_()) * n) >> 64);
  }
  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }
  // Failures before the first success.
  std::int64_t geometric(double p) {
    if (p >= 1.0) return 0;
    double u = 1.0 - uniform();
    return static_cast<std::int64_t>(std::floor(std::log(u) / std::log1p(-p)));
  }

 private:
  std::mt19937_64 engine_;
};

inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Discrete power law on [1, max] sampled by inverse CDF.
class LotkaSampler {
 public:
  LotkaSampler(double alpha, std::int64_t max) : cdf_(static_cast<std::size_t>(max)) {
    double acc = 0.0;
    for (std::int64_t k = 1; k <= max; ++k) {
      acc += std::pow(static_cast<double>(k), -alpha);
      cdf_[static_cast<std::size_t>(k - 1)] = acc;
    }
    for (double& v : cdf_) v /= acc;
    cdf_.back() = 1.0;
  }

  std::int64_t operator()(Rng& rng) const {
    const double u = rng.uniform();
    return static_cast<std::int64_t>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin()) + 1;
  }

  double pmf(std::int64_t k) const {
    auto i = static_cast<std::size_t>(k - 1);
    return i == 0 ? cdf_[0] : cdf_[i] - cdf_[i - 1];
  }
  double mass_at_least_two() const { return 1.0 - cdf_[0]; }

 private:
  std::vector<double> cdf_;
};

/// check_config plus the stay probability against the Lotka mass of
/// authors with two or more papers.
inline void check_feasible(const GeneratorConfig& c) {
  check_config(c);
  const double p_two = LotkaSampler(c.lotka_alpha, c.lotka_max).mass_at_least_two();
  if (c.stay_prob > 0.0 && c.stay_prob / p_two > 1.0)
    throw AnalysisError("generator: stay_prob " + format_raw(c.stay_prob) +
                        " exceeds the mass of authors with two or more papers (" + format_raw(p_two) + ")");
}

// ---- ground truth --------------------------------------------------------------------

struct GroundTruthYear {
  Year year = 0;
  std::int64_t all = 0, old_authors = 0, new_authors = 0, new_born = 0;
  std::optional<std::int64_t> stayers;
};

struct GroundTruth {
  std::int64_t n_authors = 0;
  std::int64_t n_publications = 0;
  std::vector<GroundTruthYear> years;
  std::int64_t stayers_determined = 0;
  std::int64_t new_determined = 0;
  std::int64_t one_paper_authors = 0;
  std::array<std::int64_t, 5> band_authors{};
  struct Quadrants {
    std::int64_t production_cutoff = 0;
    double focus_cutoff = 0.0;
    std::array<std::int64_t, 4> counts{};  // specialist, interested, casual, incidental
  };
  std::optional<Quadrants> quadrants;  // absent for a degenerate distribution
};

inline nlohmann::ordered_json to_json(const GroundTruth& g, const GeneratorConfig& c) {
  nlohmann::ordered_json j;
  j["config"] = to_json(c);
  j["n_authors"] = g.n_authors;
  j["n_publications"] = g.n_publications;
  auto years = nlohmann::ordered_json::array();
  for (const auto& y : g.years) {
    nlohmann::ordered_json r;
    r["year"] = y.year;
    r["N_AU"] = y.all;
    r["N_old"] = y.old_authors;
    r["N_new"] = y.new_authors;
    r["N_newborn"] = y.new_born;
    r["N_stay"] = y.stayers ? nlohmann::ordered_json(*y.stayers) : nlohmann::ordered_json(nullptr);
    years.push_back(r);
  }
  j["years"] = years;
  j["stay"] = {{"configured", c.stay_prob},
               {"stayers", g.stayers_determined},
               {"new_authors", g.new_determined},
               {"realized", g.new_determined ? static_cast<double>(g.stayers_determined) / g.new_determined : 0.0}};
  j["one_paper"] = {{"authors", g.one_paper_authors},
                    {"share", g.n_authors ? static_cast<double>(g.one_paper_authors) / g.n_authors : 0.0}};
  auto bands = nlohmann::ordered_json::array();
  static constexpr std::array<const char*, 5> kLabels = {"1", "2", "3-5", "6-10", ">10"};
  for (std::size_t b = 0; b < 5; ++b) bands.push_back({{"band", kLabels[b]}, {"authors", g.band_authors[b]}});
  j["bands"] = bands;
  if (g.quadrants) {
    const auto& q = *g.quadrants;
    j["quadrants"] = {{"production_cutoff", q.production_cutoff},
                      {"focus_cutoff", q.focus_cutoff},
                      {"specialist", q.counts[0]},
                      {"interested", q.counts[1]},
                      {"casual", q.counts[2]},
                      {"incidental", q.counts[3]}};
  } else {
    j["quadrants"] = nullptr;
  }
  return j;
}

namespace detail {

struct SynthAuthor {
  std::uint32_t offset = 0;  // into topic year list
  std::uint32_t count = 0;   // topic papers
  Year yfp = 0;
  std::int32_t home = kNoCluster;
};

struct Slot {
  Year year;
  std::int32_t cluster;
  std::uint32_t key;
  std::uint32_t author;
};

inline std::string numbered(char prefix, std::uint64_t i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%0*llu", prefix, width, static_cast<unsigned long long>(i));
  return buf;
}

// Top-quartile cutoff by nearest rank, moved above the minimum when the rank lands on it.
template <class T>
std::optional<T> quartile_cutoff(std::vector<T> v) {
  if (v.empty()) return std::nullopt;
  std::sort(v.begin(), v.end());
  if (v.front() == v.back()) return std::nullopt;
  std::size_t rank = (3 * v.size() + 3) / 4;
  T cut = v[rank - 1];
  if (cut == v.front()) cut = *std::upper_bound(v.begin(), v.end(), v.front());
  return cut;
}

class BufferedFile {
 public:
  explicit BufferedFile(const std::filesystem::path& p) : out_(p, std::ios::binary) {
    if (!out_) throw LoadError("cannot write " + p.string());
    buf_.reserve(1 << 20);
  }
  std::string& buffer() { return buf_; }
  void maybe_flush() {
    if (buf_.size() >= (1u << 20)) flush();
  }
  void flush() {
    out_.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
    buf_.clear();
  }
  void close() {
    flush();
    out_.close();
    if (!out_) throw LoadError("write failed");
  }

 private:
  std::ofstream out_;
  std::string buf_;
};

}  // namespace detail

/// Writes publications.jsonl, careers.csv, clusters.csv and ground_truth.json
/// into `dir`. Output depends only on the config.
inline GroundTruth generate(const GeneratorConfig& config, const std::filesystem::path& dir) {
  check_feasible(config);
  const Horizon h = config.horizon;
  const int w = config.stay_window;
  const LotkaSampler lotka(config.lotka_alpha, config.lotka_max);
  const double p_two = lotka.mass_at_least_two();
  const double stay_given_two = config.stay_prob == 0.0 ? 0.0 : config.stay_prob / p_two;

  std::filesystem::create_directories(dir);
  GroundTruth truth;
  truth.years.resize(static_cast<std::size_t>(h.span()));
  for (int i = 0; i < h.span(); ++i) {
    truth.years[i].year = h.first + i;
    if (h.first + i + w <= h.last) truth.years[i].stayers = 0;
  }

  // Authors and their topic years.
  Rng rng(split_seed(config.seed, 0));
  std::vector<detail::SynthAuthor> authors;
  std::vector<Year> topic_years;
  std::vector<Year> later;
  for (Year e = h.first; e <= h.last; ++e) {
    for (std::int64_t n = config.entrants(e); n > 0; --n) {
      detail::SynthAuthor a;
      a.offset = static_cast<std::uint32_t>(topic_years.size());
      std::int64_t k = lotka(rng);
      a.yfp = rng.bernoulli(config.p_newborn) ? e : static_cast<Year>(e - rng.between(1, config.max_career_lag));
      if (config.n_clusters > 0) a.home = static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(config.n_clusters)));
      const bool stay_draw = k >= 2 && rng.bernoulli(stay_given_two);
      const Year window_end = std::min<Year>(e + w, h.last);
      topic_years.push_back(e);
      if (k >= 2) {
        std::int64_t rest = k - 1;
        if (stay_draw && window_end > e) {
          topic_years.push_back(static_cast<Year>(rng.between(e + 1, window_end)));
          for (--rest; rest > 0; --rest) topic_years.push_back(static_cast<Year>(rng.between(e, h.last)));
        } else {
          // Outside the stay window: the entry year itself or beyond the window.
          const std::int64_t beyond = std::max<std::int64_t>(0, h.last - (e + w));
          for (; rest > 0; --rest) {
            std::int64_t pick = rng.between(0, beyond);
            topic_years.push_back(pick == 0 ? e : static_cast<Year>(e + w + pick));
          }
        }
      }
      a.count = static_cast<std::uint32_t>(k);
      std::sort(topic_years.begin() + a.offset, topic_years.end());
      authors.push_back(a);
    }
  }
  truth.n_authors = static_cast<std::int64_t>(authors.size());
  if (authors.size() > 0xFFFFFFFFull) throw AnalysisError("generator: too many authors");

  // Ground-truth cohorts straight from the sampled years.
  for (const auto& a : authors) {
    const Year* ys = topic_years.data() + a.offset;
    const Year e = ys[0];
    auto& entry = truth.years[static_cast<std::size_t>(e - h.first)];
    ++entry.new_authors;
    if (a.yfp == e) ++entry.new_born;
    if (entry.stayers) {
      bool stays = std::any_of(ys, ys + a.count, [&](Year y) { return y > e && y <= e + w; });
      if (stays) ++*entry.stayers;
      ++truth.new_determined;
      if (stays) ++truth.stayers_determined;
    }
    for (std::uint32_t i = 0; i < a.count; ++i) {
      if (i && ys[i] == ys[i - 1]) continue;
      auto& row = truth.years[static_cast<std::size_t>(ys[i] - h.first)];
      ++row.all;
      if (ys[i] != e) ++row.old_authors;
    }
    if (a.count == 1) ++truth.one_paper_authors;
    std::size_t band = a.count == 1 ? 0 : a.count == 2 ? 1 : a.count <= 5 ? 2 : a.count <= 10 ? 3 : 4;
    ++truth.band_authors[band];
  }

  // Careers: topic output plus geometric off-topic output in active years.
  std::vector<std::int64_t> production(authors.size());
  std::vector<double> focus(authors.size());
  {
    Rng crng(split_seed(config.seed, 1));
    detail::BufferedFile careers(dir / "careers.csv");
    careers.buffer() += "author_id,yfp,year,count\n";
    const double p_topic = config.topic_share;
    for (std::size_t i = 0; i < authors.size(); ++i) {
      const auto& a = authors[i];
      const std::string id = detail::numbered('a', i + 1, 7);
      const Year* ys = topic_years.data() + a.offset;
      std::int64_t in_horizon = 0;
      auto row = [&](Year y, std::int64_t count) {
        std::string& b = careers.buffer();
        b += id;
        b += ',';
        b += std::to_string(a.yfp);
        b += ',';
        b += std::to_string(y);
        b += ',';
        b += std::to_string(count);
        b += '\n';
        if (h.contains(y)) in_horizon += count;
      };
      if (a.yfp < ys[0]) row(a.yfp, 1 + crng.geometric(0.5));
      for (std::uint32_t j = 0; j < a.count;) {
        std::uint32_t end = j;
        while (end < a.count && ys[end] == ys[j]) ++end;
        std::int64_t topic = end - j, extra = 0;
        for (std::int64_t t = 0; t < topic; ++t) extra += crng.geometric(p_topic);
        row(ys[j], topic + extra);
        j = end;
      }
      production[i] = a.count;
      focus[i] = 100.0 * static_cast<double>(a.count) / static_cast<double>(in_horizon);
      careers.maybe_flush();
    }
    careers.close();
  }

  auto pcut = detail::quartile_cutoff(production);
  auto fcut = detail::quartile_cutoff(focus);
  if (pcut && fcut) {
    GroundTruth::Quadrants q;
    q.production_cutoff = *pcut;
    q.focus_cutoff = *fcut;
    for (std::size_t i = 0; i < authors.size(); ++i) {
      bool hp = production[i] >= *pcut, hf = focus[i] >= *fcut;
      ++q.counts[hp ? (hf ? 0 : 2) : (hf ? 1 : 3)];
    }
    truth.quadrants = q;
  }

  // Paper slots: one per author and topic paper, each with a cluster.
  Rng srng(split_seed(config.seed, 2));
  std::vector<detail::Slot> slots;
  slots.reserve(topic_years.size());
  std::vector<std::int64_t> cluster_authors(static_cast<std::size_t>(config.n_clusters), 0);
  std::vector<std::int32_t> seen;
  for (std::size_t i = 0; i < authors.size(); ++i) {
    const auto& a = authors[i];
    seen.clear();
    for (std::uint32_t j = 0; j < a.count; ++j) {
      std::int32_t c = kNoCluster;
      if (config.n_clusters > 0 && srng.bernoulli(config.clustered_share)) {
        c = a.home;
        if (config.n_clusters > 1 && srng.bernoulli(config.secondary_cluster))
          c = static_cast<std::int32_t>(srng.below(static_cast<std::uint64_t>(config.n_clusters)));
      }
      if (c != kNoCluster && std::find(seen.begin(), seen.end(), c) == seen.end()) {
        seen.push_back(c);
        ++cluster_authors[static_cast<std::size_t>(c)];
      }
      slots.push_back({topic_years[a.offset + j], c, static_cast<std::uint32_t>(srng.next()), static_cast<std::uint32_t>(i)});
    }
  }
  std::sort(slots.begin(), slots.end(), [](const detail::Slot& x, const detail::Slot& y) {
    if (x.year != y.year) return x.year < y.year;
    if (x.cluster != y.cluster) return x.cluster < y.cluster;
    if (x.key != y.key) return x.key < y.key;
    return x.author < y.author;
  });

  // Group slots of one (year, cluster) into multi-author papers.
  {
    Rng prng(split_seed(config.seed, 3));
    detail::BufferedFile pubs(dir / "publications.jsonl");
    std::string topic_json;
    append_json_string(topic_json, config.topic);
    std::uint64_t next_pub = 0;
    std::vector<std::uint32_t> team;
    auto emit = [&](Year year, std::int32_t cluster, const std::vector<std::uint32_t>& members) {
      std::string& b = pubs.buffer();
      b += "{\"pub_id\":\"";
      b += detail::numbered('p', ++next_pub, 8);
      b += "\",\"year\":";
      b += std::to_string(year);
      b += ",\"authors\":[";
      for (std::size_t m = 0; m < members.size(); ++m) {
        if (m) b += ',';
        b += '"';
        b += detail::numbered('a', members[m] + 1ull, 7);
        b += '"';
      }
      b += "],\"topic_flags\":[";
      b += topic_json;
      b += ']';
      if (cluster != kNoCluster) {
        b += ",\"cluster_id\":\"";
        b += detail::numbered('c', static_cast<std::uint64_t>(cluster) + 1, 4);
        b += '"';
      }
      b += "}\n";
      pubs.maybe_flush();
    };
    std::size_t i = 0;
    while (i < slots.size()) {
      std::size_t end = i;
      while (end < slots.size() && slots[end].year == slots[i].year && slots[end].cluster == slots[i].cluster) ++end;
      team.clear();
      std::size_t want = 0;
      for (std::size_t s = i; s < end; ++s) {
        if (team.empty()) want = static_cast<std::size_t>(prng.between(1, config.max_team));
        const std::uint32_t author = slots[s].author;
        if (std::find(team.begin(), team.end(), author) != team.end()) {
          emit(slots[s].year, slots[s].cluster, {author});
          continue;
        }
        team.push_back(author);
        if (team.size() == want) {
          emit(slots[i].year, slots[i].cluster, team);
          team.clear();
        }
      }
      if (!team.empty()) emit(slots[i].year, slots[i].cluster, team);
      i = end;
    }
    pubs.close();
    truth.n_publications = static_cast<std::int64_t>(next_pub);
  }

  // Clusters with denominators comfortably above their topic-author counts.
  {
    Rng krng(split_seed(config.seed, 4));
    detail::BufferedFile clusters(dir / "clusters.csv");
    clusters.buffer() += "cluster_id,label,area,total_authors,x,y\n";
    for (std::int64_t c = 0; c < config.n_clusters; ++c) {
      const std::string id = detail::numbered('c', static_cast<std::uint64_t>(c) + 1, 4);
      const auto area = static_cast<std::size_t>(c % config.n_areas);
      const std::int64_t topic_authors = cluster_authors[static_cast<std::size_t>(c)];
      const std::int64_t total = topic_authors * krng.between(20, 200) + krng.between(50, 500);
      const double x = static_cast<double>(krng.between(-100000, 100000)) / 1000.0;
      const double y = static_cast<double>(krng.between(-100000, 100000)) / 1000.0;
      std::string& b = clusters.buffer();
      b += id + ",cluster " + std::to_string(c + 1) + ',' + csv_escape(kAreaNames[area]) + ',' +
           std::to_string(total) + ',' + format_raw(x) + ',' + format_raw(y) + '\n';
    }
    clusters.close();
  }

  write_text_file(dir / "ground_truth.json", to_json(truth, config).dump(2) + "\n");
  return truth;
}

}  // namespace communitylens
