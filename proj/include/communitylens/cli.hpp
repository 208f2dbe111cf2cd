#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <unistd.h>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "communitylens/communitylens.hpp"

namespace communitylens::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

inline constexpr std::string_view kVersion = "0.1.0";

/// Thrown for bad flags or missing inputs; maps to exit status 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::string corpus, careers, clusters;
  std::string corpus_b, careers_b, clusters_b;
  std::string topic, topic_b;
  std::string horizon = "2008:2017";
  int window = 2;
  std::string stay_denominator = "new";
  std::string threshold_rule = "nearest_rank_promoted";
  std::string focus_mode = "total_ratio";
  bool raw = false;
  bool both_stay = false;
  bool pooled_thresholds = false;
  std::vector<std::string> doc_types;
  std::vector<std::string> delineate;  // label=term|term
  std::string color = "p_au";
  std::string map_format = "csv";
  // synth
  std::uint64_t seed = 42;
  std::string synth_config;
  std::optional<std::int64_t> entrants;
  std::optional<double> stay_prob, lotka_alpha, p_newborn, topic_share;
  std::optional<std::int64_t> n_clusters;
  // Not part of the manifest: neither changes any output byte.
  unsigned threads = 1;
  std::string out;
};

inline ojson to_json(const RunConfig& c) {
  ojson j;
  j["corpus"] = c.corpus;
  j["careers"] = c.careers;
  j["clusters"] = c.clusters;
  j["corpus_b"] = c.corpus_b;
  j["careers_b"] = c.careers_b;
  j["clusters_b"] = c.clusters_b;
  j["topic"] = c.topic;
  j["topic_b"] = c.topic_b;
  j["horizon"] = c.horizon;
  j["window"] = c.window;
  j["stay_denominator"] = c.stay_denominator;
  j["threshold_rule"] = c.threshold_rule;
  j["focus_mode"] = c.focus_mode;
  j["raw"] = c.raw;
  j["both_stay"] = c.both_stay;
  j["pooled_thresholds"] = c.pooled_thresholds;
  j["doc_types"] = c.doc_types;
  j["delineate"] = c.delineate;
  j["color"] = c.color;
  j["map_format"] = c.map_format;
  j["rounding"] = "half_up_1dp";
  return j;
}

/// Applies a JSON config object; keys use the long flag names with underscores.
inline void apply_config(RunConfig& c, const nlohmann::json& j) {
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "corpus") c.corpus = v.get<std::string>();
      else if (key == "careers") c.careers = v.get<std::string>();
      else if (key == "clusters") c.clusters = v.get<std::string>();
      else if (key == "corpus_b") c.corpus_b = v.get<std::string>();
      else if (key == "careers_b") c.careers_b = v.get<std::string>();
      else if (key == "clusters_b") c.clusters_b = v.get<std::string>();
      else if (key == "topic") c.topic = v.get<std::string>();
      else if (key == "topic_b") c.topic_b = v.get<std::string>();
      else if (key == "horizon") c.horizon = v.get<std::string>();
      else if (key == "window") c.window = v.get<int>();
      else if (key == "stay_denominator") c.stay_denominator = v.get<std::string>();
      else if (key == "threshold_rule") c.threshold_rule = v.get<std::string>();
      else if (key == "focus_mode") c.focus_mode = v.get<std::string>();
      else if (key == "raw") c.raw = v.get<bool>();
      else if (key == "both_stay") c.both_stay = v.get<bool>();
      else if (key == "pooled_thresholds") c.pooled_thresholds = v.get<bool>();
      else if (key == "doc_types") c.doc_types = v.get<std::vector<std::string>>();
      else if (key == "delineate") c.delineate = v.get<std::vector<std::string>>();
      else if (key == "color") c.color = v.get<std::string>();
      else if (key == "map_format") c.map_format = v.get<std::string>();
      else if (key == "threads") c.threads = v.get<unsigned>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "rounding") {
        if (v.get<std::string>() != "half_up_1dp") throw UsageError("unsupported rounding profile");
      } else throw UsageError("unknown config key: " + key);
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("bad config value: ") + e.what());
  }
}

// ---- files ------------------------------------------------------------------------

inline std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot read " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 20);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned i = 0; i < len; ++i) {
    hex.push_back(kHex[md[i] >> 4]);
    hex.push_back(kHex[md[i] & 15]);
  }
  return hex;
}

/// Output directory written through a sibling staging directory. Nothing
/// reaches the target until commit(); an uncommitted stage is removed.
class StagedOutput {
 public:
  explicit StagedOutput(const fs::path& target) : target_(normalize(target)) {
    stage_ = target_.parent_path() / ("." + target_.filename().string() + ".staging-" + std::to_string(::getpid()));
    fs::remove_all(stage_);
    fs::create_directories(stage_);
  }
  StagedOutput(const StagedOutput&) = delete;
  StagedOutput& operator=(const StagedOutput&) = delete;
  ~StagedOutput() {
    std::error_code ec;
    if (!committed_) fs::remove_all(stage_, ec);
  }

  const fs::path& dir() const { return stage_; }
  void write(const std::string& name, std::string_view body) {
    write_text_file(stage_ / name, body);
    names_.push_back(name);
  }
  void adopt(const std::string& name) { names_.push_back(name); }
  const std::vector<std::string>& names() const { return names_; }

  void commit() {
    if (!fs::exists(target_)) {
      if (target_.has_parent_path()) fs::create_directories(target_.parent_path());
      fs::rename(stage_, target_);
    } else {
      for (const auto& n : names_) fs::rename(stage_ / n, target_ / n);
      fs::remove_all(stage_);
    }
    committed_ = true;
  }

 private:
  static fs::path normalize(const fs::path& p) {
    fs::path n = fs::absolute(p).lexically_normal();
    if (n.filename().empty()) n = n.parent_path();
    return n;
  }

  fs::path target_;
  fs::path stage_;
  std::vector<std::string> names_;
  bool committed_ = false;
};

// ---- run context -------------------------------------------------------------------

struct Inputs {
  std::vector<std::pair<std::string, fs::path>> files;  // role, path
};

inline Horizon horizon_of(const RunConfig& c) {
  auto h = parse_horizon(c.horizon);
  if (!h) throw UsageError("bad --horizon '" + c.horizon + "', expected Y0:Y1");
  return *h;
}

inline CommunityConfig community_config(const RunConfig& c) {
  CommunityConfig cc;
  if (c.window < 1) throw UsageError("--window must be at least 1");
  cc.cohort.stay_window = c.window;
  auto d = parse_stay_denominator(c.stay_denominator);
  if (!d) throw UsageError("bad --stay-denominator '" + c.stay_denominator + "', expected new or all");
  cc.cohort.stay_denominator = *d;
  auto r = parse_threshold_rule(c.threshold_rule);
  if (!r) throw UsageError("bad --threshold-rule '" + c.threshold_rule + "'");
  cc.threshold_rule = *r;
  auto f = parse_focus_mode(c.focus_mode);
  if (!f) throw UsageError("bad --focus-mode '" + c.focus_mode + "'");
  cc.focus_mode = *f;
  cc.pooled_thresholds = c.pooled_thresholds;
  cc.raw = c.raw;
  cc.both_stay_denominators = c.both_stay;
  return cc;
}

inline std::vector<std::pair<std::string, std::vector<std::string>>> delineation_rules(const RunConfig& c) {
  std::vector<std::pair<std::string, std::vector<std::string>>> rules;
  for (const auto& spec : c.delineate) {
    auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
      throw UsageError("bad --delineate '" + spec + "', expected label=term|term");
    std::vector<std::string> terms;
    std::string rest = spec.substr(eq + 1);
    std::size_t start = 0;
    for (;;) {
      auto bar = rest.find('|', start);
      auto term = rest.substr(start, bar == std::string::npos ? std::string::npos : bar - start);
      if (!term.empty()) terms.push_back(term);
      if (bar == std::string::npos) break;
      start = bar + 1;
    }
    if (terms.empty()) throw UsageError("bad --delineate '" + spec + "': no terms");
    rules.emplace_back(spec.substr(0, eq), std::move(terms));
  }
  return rules;
}

inline CorpusPaths corpus_paths(const std::string& corpus, const std::string& careers, const std::string& clusters) {
  if (corpus.empty()) throw UsageError("--corpus is required");
  if (!fs::exists(corpus)) throw UsageError("corpus not found: " + corpus);
  CorpusPaths p = resolve_corpus_paths(corpus);
  if (!fs::exists(p.publications)) throw UsageError("publications file not found: " + p.publications.string());
  if (!careers.empty()) {
    if (!fs::exists(careers)) throw UsageError("careers file not found: " + careers);
    p.careers = careers;
  }
  if (!clusters.empty()) {
    if (!fs::exists(clusters)) throw UsageError("clusters file not found: " + clusters);
    p.clusters = clusters;
  }
  return p;
}

inline void note_inputs(Inputs& in, const CorpusPaths& p, const std::string& suffix) {
  in.files.emplace_back("publications" + suffix, p.publications);
  if (p.careers) in.files.emplace_back("careers" + suffix, *p.careers);
  if (p.clusters) in.files.emplace_back("clusters" + suffix, *p.clusters);
}

inline ojson load_report_json(const LoadReport& r) {
  ojson j;
  j["records_read"] = r.records_read;
  j["records_kept"] = r.records_kept;
  j["out_of_horizon_dropped"] = r.out_of_horizon_dropped;
  j["doc_type_dropped"] = r.doc_type_dropped;
  j["unknown_cluster_refs"] = r.unknown_cluster_refs;
  j["delineated"] = r.delineated;
  j["careers_derived"] = r.careers_derived;
  j["supplied_career_differences"] = r.supplied_career_differences;
  return j;
}

inline ojson validation_json(const ValidationReport& v) {
  ojson j;
  j["out_of_horizon"] = v.out_of_horizon;
  j["unknown_clusters"] = v.unknown_clusters;
  j["career_inconsistencies"] = v.career_inconsistencies;
  j["duplicate_ids"] = v.duplicate_ids;
  j["missing_careers"] = v.missing_careers;
  j["invalid_records"] = v.invalid_records;
  j["total"] = v.total();
  auto defects = ojson::array();
  for (const auto& d : v.defects)
    defects.push_back({{"kind", std::string(defect_name(d.kind))}, {"subject", d.subject}, {"detail", d.detail}});
  j["defects"] = defects;
  return j;
}

struct Session {
  RunConfig config;
  std::string command;
  std::ostream& out;
  std::ostream& err;
  Inputs inputs;
  ojson loads = ojson::array();
  ojson generator = nullptr;

  Executor executor() const { return Executor(config.threads); }

  LoadResult load(const std::string& corpus, const std::string& careers, const std::string& clusters,
                  const std::string& suffix, bool strict = true) {
    CorpusPaths paths = corpus_paths(corpus, careers, clusters);
    note_inputs(inputs, paths, suffix);
    BuildOptions opts;
    opts.horizon = horizon_of(config);
    opts.strict = strict;
    opts.doc_types = config.doc_types;
    opts.delineation = delineation_rules(config);
    LoadResult r = load_corpus(paths, opts, executor());
    for (const auto& w : r.report.warnings) err << "warning: " << w << '\n';
    loads.push_back(load_report_json(r.report));
    return r;
  }

  /// Writes the manifest and moves the staged files into place.
  void finish(StagedOutput& stage) {
    ojson m;
    m["tool"] = "communitylens";
    m["version"] = std::string(kVersion);
    m["command"] = command;
    m["config"] = to_json(config);
    if (!generator.is_null()) m["generator"] = generator;
    auto ins = ojson::array();
    for (const auto& [role, path] : inputs.files)
      ins.push_back({{"role", role}, {"path", path.string()}, {"sha256", sha256_file(path)}});
    m["inputs"] = ins;
    m["load"] = loads;
    auto outs = ojson::array();
    for (const auto& name : stage.names())
      outs.push_back({{"file", name},
                      {"bytes", fs::file_size(stage.dir() / name)},
                      {"sha256", sha256_file(stage.dir() / name)}});
    m["outputs"] = outs;
    write_text_file(stage.dir() / "manifest.json", m.dump(2) + "\n");
    stage.commit();
  }

  const std::string& require_out() const {
    if (config.out.empty()) throw UsageError("--out is required");
    return config.out;
  }
  const std::string& require_topic() const {
    if (config.topic.empty()) throw UsageError("--topic is required");
    return config.topic;
  }
};

// ---- subcommands -------------------------------------------------------------------

inline int cmd_validate(Session& s) {
  LoadResult r = s.load(s.config.corpus, s.config.careers, s.config.clusters, "", false);
  const auto& v = r.validation;
  for (const auto& d : v.defects) s.err << defect_name(d.kind) << '\t' << d.subject << '\t' << d.detail << '\n';
  s.out << "records " << r.report.records_read << ", out_of_horizon " << v.out_of_horizon << ", unknown_clusters "
        << v.unknown_clusters << ", career_inconsistencies " << v.career_inconsistencies << ", duplicate_ids "
        << v.duplicate_ids << ", missing_careers " << v.missing_careers << ", invalid_records " << v.invalid_records
        << '\n';
  if (!s.config.out.empty()) {
    StagedOutput stage(s.config.out);
    stage.write("validation.json", validation_json(v).dump(2) + "\n");
    s.finish(stage);
  }
  return v.clean() ? 0 : 1;
}

inline int cmd_cohorts(Session& s) {
  auto cc = community_config(s.config);
  StagedOutput stage(s.require_out());
  const std::string topic = s.require_topic();
  LoadResult r = s.load(s.config.corpus, s.config.careers, s.config.clusters, "");
  auto series = cohort_series(r.corpus, build_timeline(r.corpus, topic, s.executor()), cc.cohort);
  stage.write("cohorts.csv", cohorts_csv(series, cc.csv()));
  s.finish(stage);
  return 0;
}

inline int cmd_indicators(Session& s) {
  auto cc = community_config(s.config);
  StagedOutput stage(s.require_out());
  const std::string topic = s.require_topic();
  LoadResult r = s.load(s.config.corpus, s.config.careers, s.config.clusters, "");
  const Executor exec = s.executor();
  auto tl = build_timeline(r.corpus, topic, exec);
  auto series = cohort_series(r.corpus, tl, cc.cohort);
  auto profiles = author_profiles(r.corpus, tl, cc.focus_mode, exec);
  stage.write("indicators.csv", indicators_csv(summary_series(profiles, series), cc.raw));
  stage.write("profiles.csv", profiles_csv(r.corpus, profiles, cc.raw));
  stage.write("bands.csv", bands_csv(production_bands(profiles), cc.raw));
  s.finish(stage);
  return 0;
}

inline int cmd_classify(Session& s) {
  auto cc = community_config(s.config);
  StagedOutput stage(s.require_out());
  const std::string topic = s.require_topic();
  LoadResult r = s.load(s.config.corpus, s.config.careers, s.config.clusters, "");
  const Executor exec = s.executor();
  auto profiles = author_profiles(r.corpus, build_timeline(r.corpus, topic, exec), cc.focus_mode, exec);
  auto c = classify_authors(profiles, resolve_thresholds(profiles, cc.threshold_rule));
  stage.write("quadrants.csv", quadrants_csv(r.corpus, c, cc.raw));
  stage.write("quadrant_summary.csv", quadrant_summary_csv(c));
  stage.write("thresholds.json", thresholds_json_fragment(c.thresholds) + "\n");
  s.finish(stage);
  return 0;
}

inline int cmd_overlay(Session& s) {
  auto cc = community_config(s.config);
  auto color = parse_color_metric(s.config.color);
  if (!color) throw UsageError("bad --color '" + s.config.color + "', expected p_au or p_stay");
  const auto& fmt = s.config.map_format;
  if (fmt != "csv" && fmt != "json" && fmt != "both") throw UsageError("bad --map-format '" + fmt + "'");
  StagedOutput stage(s.require_out());
  const std::string topic = s.require_topic();
  LoadResult r = s.load(s.config.corpus, s.config.careers, s.config.clusters, "");
  if (r.corpus.clusters.empty()) throw UsageError("overlay needs cluster metadata (--clusters)");
  const Executor exec = s.executor();
  auto tl = build_timeline(r.corpus, topic, exec);
  auto series = cohort_series(r.corpus, tl, cc.cohort);
  auto profiles = author_profiles(r.corpus, tl, cc.focus_mode, exec);
  auto overlay = cluster_overlay(r.corpus, tl, profiles, series);
  for (const auto& w : overlay.warnings) s.err << "warning: " << w << '\n';
  stage.write("overlay.csv", overlay_csv(overlay.rows));
  stage.write("areas.csv", areas_csv(area_rollup(r.corpus, tl, profiles, series, overlay.rows)));
  if (fmt != "json") stage.write("map.csv", map_csv(overlay.rows, *color));
  if (fmt != "csv") stage.write("map.json", map_json(overlay.rows, *color));
  s.finish(stage);
  return 0;
}

inline int cmd_compare(Session& s) {
  auto cc = community_config(s.config);
  StagedOutput stage(s.require_out());
  const std::string topic_a = s.require_topic();
  if (s.config.topic_b.empty()) throw UsageError("--topic-b is required");
  LoadResult a = s.load(s.config.corpus, s.config.careers, s.config.clusters, "_a");
  std::optional<LoadResult> b;
  if (!s.config.corpus_b.empty()) b = s.load(s.config.corpus_b, s.config.careers_b, s.config.clusters_b, "_b");
  const Corpus& corpus_b = b ? b->corpus : a.corpus;
  auto report = compare(a.corpus, topic_a, corpus_b, s.config.topic_b, cc, s.executor());
  for (auto& [name, body] : comparison_files(a.corpus, corpus_b, report, cc)) stage.write(name, body);
  s.finish(stage);
  return 0;
}

inline int cmd_synth(Session& s) {
  GeneratorConfig g;
  g.horizon = horizon_of(s.config);
  g.stay_window = s.config.window;
  if (!s.config.topic.empty()) g.topic = s.config.topic;
  if (!s.config.synth_config.empty()) {
    if (!fs::exists(s.config.synth_config)) throw UsageError("generator config not found: " + s.config.synth_config);
    try {
      apply_json(g, nlohmann::json::parse(read_text_file(s.config.synth_config)));
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(std::string("bad generator config: ") + e.what());
    }
    s.inputs.files.emplace_back("generator_config", s.config.synth_config);
  }
  g.seed = s.config.seed;
  if (s.config.entrants) g.entrants_per_year = *s.config.entrants;
  if (s.config.stay_prob) g.stay_prob = *s.config.stay_prob;
  if (s.config.lotka_alpha) g.lotka_alpha = *s.config.lotka_alpha;
  if (s.config.p_newborn) g.p_newborn = *s.config.p_newborn;
  if (s.config.topic_share) g.topic_share = *s.config.topic_share;
  if (s.config.n_clusters) g.n_clusters = *s.config.n_clusters;
  try {
    check_feasible(g);
  } catch (const AnalysisError& e) {
    throw UsageError(e.what());
  }
  StagedOutput stage(s.require_out());
  s.generator = to_json(g);
  generate(g, stage.dir());
  for (const char* f : {"publications.jsonl", "careers.csv", "clusters.csv", "ground_truth.json"}) stage.adopt(f);
  s.finish(stage);
  return 0;
}

// ---- entry point -------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Topic-community indicators from bibliographic corpora", "communitylens"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  RunConfig flags;
  std::string config_path;
  std::string seed_text;
  // Each subcommand registers the shared flags; the bound variables are shared.
  auto shared = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file (default: $COMMUNITYLENS_CONFIG)");
    sub->add_option("--corpus", flags.corpus, "publications JSONL file or corpus directory");
    sub->add_option("--careers", flags.careers, "careers CSV (author_id,yfp,year,count)");
    sub->add_option("--clusters", flags.clusters, "clusters CSV (cluster_id,label,area,total_authors,x,y)");
    sub->add_option("--topic", flags.topic, "topic label");
    sub->add_option("--horizon", flags.horizon, "analysis horizon Y0:Y1");
    sub->add_option("--window", flags.window, "stay window in years");
    sub->add_option("--stay-denominator", flags.stay_denominator, "stayer share denominator: new or all");
    sub->add_option("--threshold-rule", flags.threshold_rule, "nearest_rank_promoted, strict or inclusive");
    sub->add_option("--focus-mode", flags.focus_mode, "total_ratio or mean_annual");
    sub->add_option("--doc-types", flags.doc_types, "keep only these document types")->delimiter(',');
    sub->add_option("--delineate", flags.delineate, "flag records matching label=term|term");
    sub->add_option("--threads", flags.threads, "worker threads");
    sub->add_option("--out", flags.out, "output directory");
    sub->add_flag("--raw", flags.raw, "add full-precision columns");
    sub->add_flag("--both-stay", flags.both_stay, "emit stayer shares under both denominators");
  };
  struct Command {
    const char* name;
    const char* help;
    int (*fn)(Session&);
  };
  const std::vector<Command> commands = {
      {"validate", "check a corpus and list defects", cmd_validate},
      {"cohorts", "per-year community composition", cmd_cohorts},
      {"indicators", "academic age, production and focus", cmd_indicators},
      {"classify", "quadrant groups", cmd_classify},
      {"overlay", "micro-cluster and research-area overlay", cmd_overlay},
      {"compare", "two communities side by side", cmd_compare},
      {"synth", "generate a synthetic corpus with ground truth", cmd_synth},
  };
  std::vector<CLI::App*> subs;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    shared(sub);
    subs.push_back(sub);
  }
  CLI::App* compare_cmd = subs[5];
  compare_cmd->add_option("--topic-b", flags.topic_b, "second topic label");
  compare_cmd->add_option("--corpus-b", flags.corpus_b, "second corpus (default: the first)");
  compare_cmd->add_option("--careers-b", flags.careers_b, "careers CSV for the second corpus");
  compare_cmd->add_option("--clusters-b", flags.clusters_b, "clusters CSV for the second corpus");
  compare_cmd->add_flag("--pooled-thresholds", flags.pooled_thresholds, "resolve cutoffs over both communities");
  CLI::App* overlay_cmd = subs[4];
  overlay_cmd->add_option("--color", flags.color, "color metric: p_au or p_stay");
  overlay_cmd->add_option("--map-format", flags.map_format, "csv, json or both");
  CLI::App* synth_cmd = subs[6];
  synth_cmd->add_option("--seed", seed_text, "64-bit seed");
  synth_cmd->add_option("--synth-config", flags.synth_config, "generator config JSON");
  std::int64_t entrants = 0, n_clusters = 0;
  double stay_prob = 0, lotka_alpha = 0, p_newborn = 0, topic_share = 0;
  auto* o_entrants = synth_cmd->add_option("--entrants", entrants, "new topic authors per year");
  auto* o_stay = synth_cmd->add_option("--stay-prob", stay_prob, "stay probability");
  auto* o_alpha = synth_cmd->add_option("--lotka-alpha", lotka_alpha, "productivity exponent");
  auto* o_newborn = synth_cmd->add_option("--p-newborn", p_newborn, "share of entrants without prior career");
  auto* o_share = synth_cmd->add_option("--topic-share", topic_share, "on-topic share of output");
  auto* o_clusters = synth_cmd->add_option("--n-clusters", n_clusters, "number of micro-clusters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  CLI::App* chosen = nullptr;
  const Command* command = nullptr;
  for (std::size_t i = 0; i < subs.size(); ++i)
    if (subs[i]->parsed()) {
      chosen = subs[i];
      command = &commands[i];
    }

  try {
    RunConfig rc;
    rc.threads = std::max(1u, std::thread::hardware_concurrency());
    if (config_path.empty())
      if (const char* env = std::getenv("COMMUNITYLENS_CONFIG"); env && *env) config_path = env;
    if (!config_path.empty()) {
      if (!fs::exists(config_path)) throw UsageError("config file not found: " + config_path);
      try {
        apply_config(rc, nlohmann::json::parse(read_text_file(config_path)));
      } catch (const nlohmann::json::parse_error& e) {
        throw UsageError(std::string("config file is not valid JSON: ") + e.what());
      }
    }
    auto given = [&](const char* name) { return chosen->get_option_no_throw(name) && chosen->count(name) > 0; };
    if (given("--corpus")) rc.corpus = flags.corpus;
    if (given("--careers")) rc.careers = flags.careers;
    if (given("--clusters")) rc.clusters = flags.clusters;
    if (given("--topic")) rc.topic = flags.topic;
    if (given("--horizon")) rc.horizon = flags.horizon;
    if (given("--window")) rc.window = flags.window;
    if (given("--stay-denominator")) rc.stay_denominator = flags.stay_denominator;
    if (given("--threshold-rule")) rc.threshold_rule = flags.threshold_rule;
    if (given("--focus-mode")) rc.focus_mode = flags.focus_mode;
    if (given("--doc-types")) rc.doc_types = flags.doc_types;
    if (given("--delineate")) rc.delineate = flags.delineate;
    if (given("--threads")) rc.threads = std::max(1u, flags.threads);
    if (given("--out")) rc.out = flags.out;
    if (given("--raw")) rc.raw = flags.raw;
    if (given("--both-stay")) rc.both_stay = flags.both_stay;
    if (chosen == compare_cmd) {
      if (given("--topic-b")) rc.topic_b = flags.topic_b;
      if (given("--corpus-b")) rc.corpus_b = flags.corpus_b;
      if (given("--careers-b")) rc.careers_b = flags.careers_b;
      if (given("--clusters-b")) rc.clusters_b = flags.clusters_b;
      if (given("--pooled-thresholds")) rc.pooled_thresholds = flags.pooled_thresholds;
    }
    if (chosen == overlay_cmd) {
      if (given("--color")) rc.color = flags.color;
      if (given("--map-format")) rc.map_format = flags.map_format;
    }
    if (chosen == synth_cmd) {
      if (given("--seed")) {
        try {
          std::size_t used = 0;
          rc.seed = std::stoull(seed_text, &used, 0);
          if (used != seed_text.size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
          throw UsageError("bad --seed '" + seed_text + "'");
        }
      }
      if (given("--synth-config")) rc.synth_config = flags.synth_config;
      if (o_entrants->count()) rc.entrants = entrants;
      if (o_stay->count()) rc.stay_prob = stay_prob;
      if (o_alpha->count()) rc.lotka_alpha = lotka_alpha;
      if (o_newborn->count()) rc.p_newborn = p_newborn;
      if (o_share->count()) rc.topic_share = topic_share;
      if (o_clusters->count()) rc.n_clusters = n_clusters;
    }
    Session session{rc, command->name, out, err, {}, ojson::array(), nullptr};
    return command->fn(session);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace communitylens::cli
