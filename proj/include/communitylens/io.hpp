#pragma once

#include <rapidjson/error/en.h>
#include <rapidjson/reader.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "communitylens/common.hpp"
#include "communitylens/corpus.hpp"
#include "communitylens/parallel.hpp"

namespace communitylens {

namespace fs = std::filesystem;

struct CorpusPaths {
  fs::path publications;
  std::optional<fs::path> careers;
  std::optional<fs::path> clusters;
};

/// A directory resolves to publications.jsonl plus careers.csv and
/// clusters.csv when those exist; a file is taken as the publications file.
inline CorpusPaths resolve_corpus_paths(const fs::path& corpus) {
  CorpusPaths p;
  if (fs::is_directory(corpus)) {
    p.publications = corpus / "publications.jsonl";
    if (fs::exists(corpus / "careers.csv")) p.careers = corpus / "careers.csv";
    if (fs::exists(corpus / "clusters.csv")) p.clusters = corpus / "clusters.csv";
  } else {
    p.publications = corpus;
  }
  return p;
}

// ---- JSON text helpers ------------------------------------------------------

inline void append_json_string(std::string& out, std::string_view s) {
  out.push_back('"');
  for (char ch : s) {
    auto c = static_cast<unsigned char>(ch);
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out.push_back(ch);
        }
    }
  }
  out.push_back('"');
}

inline void append_json_string_array(std::string& out, const std::vector<std::string>& items) {
  out.push_back('[');
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out.push_back(',');
    append_json_string(out, items[i]);
  }
  out.push_back(']');
}

/// One JSONL line (without newline) in the canonical field order.
inline std::string publication_to_jsonl(const PublicationInput& p) {
  std::string out = "{\"pub_id\":";
  append_json_string(out, p.pub_id);
  out += ",\"year\":";
  out += std::to_string(p.year);
  out += ",\"authors\":";
  append_json_string_array(out, p.authors);
  if (!p.topic_flags.empty()) {
    out += ",\"topic_flags\":";
    append_json_string_array(out, p.topic_flags);
  }
  if (p.cluster_id) {
    out += ",\"cluster_id\":";
    append_json_string(out, *p.cluster_id);
  }
  if (p.doc_type) {
    out += ",\"doc_type\":";
    append_json_string(out, *p.doc_type);
  }
  if (p.text) {
    out += ",\"title\":";
    append_json_string(out, p.text->title);
    out += ",\"abstract\":";
    append_json_string(out, p.text->abstract);
    out += ",\"keywords\":";
    append_json_string_array(out, p.text->keywords);
  }
  out.push_back('}');
  return out;
}

// ---- JSONL publication parsing -----------------------------------------------

namespace detail {

/// SAX handler for one publication object with the fixed field set.
class PublicationHandler : public rapidjson::BaseReaderHandler<rapidjson::UTF8<>, PublicationHandler> {
 public:
  enum class Field { kNone, kPubId, kYear, kAuthors, kTopicFlags, kClusterId, kDocType, kTitle, kAbstract, kKeywords };

  PublicationInput record;
  std::string error;

  void reset() {
    record = PublicationInput{};
    error.clear();
    depth_ = 0;
    in_array_ = false;
    field_ = Field::kNone;
    seen_ = 0;
  }

  bool finish() {
    if (!(seen_ & bit(Field::kPubId))) return fail("missing pub_id");
    if (!(seen_ & bit(Field::kYear))) return fail("missing year");
    if (!(seen_ & bit(Field::kAuthors))) return fail("missing authors");
    if (record.authors.empty()) return fail("authors must be non-empty");
    std::vector<std::string_view> sorted(record.authors.begin(), record.authors.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      return fail("duplicate author within record");
    return true;
  }

  bool StartObject() {
    if (depth_ != 0) return fail("nested objects are not allowed");
    ++depth_;
    return true;
  }
  bool EndObject(rapidjson::SizeType) {
    --depth_;
    return true;
  }
  bool Key(const char* s, rapidjson::SizeType n, bool) {
    std::string_view k(s, n);
    Field f = Field::kNone;
    if (k == "pub_id") f = Field::kPubId;
    else if (k == "year") f = Field::kYear;
    else if (k == "authors") f = Field::kAuthors;
    else if (k == "topic_flags") f = Field::kTopicFlags;
    else if (k == "cluster_id") f = Field::kClusterId;
    else if (k == "doc_type") f = Field::kDocType;
    else if (k == "title") f = Field::kTitle;
    else if (k == "abstract") f = Field::kAbstract;
    else if (k == "keywords") f = Field::kKeywords;
    else return fail("unknown field '" + std::string(k) + "'");
    if (seen_ & bit(f)) return fail("repeated field '" + std::string(k) + "'");
    seen_ |= bit(f);
    field_ = f;
    return true;
  }
  bool StartArray() {
    if (in_array_) return fail("nested arrays are not allowed");
    if (field_ != Field::kAuthors && field_ != Field::kTopicFlags && field_ != Field::kKeywords)
      return fail("unexpected array");
    if (field_ == Field::kKeywords) text().keywords.clear();
    in_array_ = true;
    return true;
  }
  bool EndArray(rapidjson::SizeType) {
    in_array_ = false;
    field_ = Field::kNone;
    return true;
  }
  bool String(const char* s, rapidjson::SizeType n, bool) {
    std::string_view v(s, n);
    if (in_array_) {
      switch (field_) {
        case Field::kAuthors: record.authors.emplace_back(v); return true;
        case Field::kTopicFlags: record.topic_flags.emplace_back(v); return true;
        case Field::kKeywords: text().keywords.emplace_back(v); return true;
        default: return fail("unexpected string");
      }
    }
    switch (field_) {
      case Field::kPubId: record.pub_id.assign(v); break;
      case Field::kClusterId: record.cluster_id.emplace(v); break;
      case Field::kDocType: record.doc_type.emplace(v); break;
      case Field::kTitle: text().title.assign(v); break;
      case Field::kAbstract: text().abstract.assign(v); break;
      default: return fail("unexpected string value");
    }
    field_ = Field::kNone;
    return true;
  }
  bool Null() {
    if (in_array_) return fail("null inside array");
    switch (field_) {
      case Field::kTopicFlags:
      case Field::kClusterId:
      case Field::kDocType:
      case Field::kTitle:
      case Field::kAbstract:
      case Field::kKeywords: field_ = Field::kNone; return true;
      default: return fail("null not allowed here");
    }
  }
  bool Int(int v) { return integer(v); }
  bool Uint(unsigned v) { return integer(static_cast<std::int64_t>(v)); }
  bool Int64(std::int64_t v) { return integer(v); }
  bool Uint64(std::uint64_t) { return fail("integer out of range"); }
  bool Default() { return fail("unexpected value type"); }

 private:
  static unsigned bit(Field f) { return 1u << static_cast<unsigned>(f); }

  bool integer(std::int64_t v) {
    if (field_ != Field::kYear || in_array_) return fail("unexpected number");
    if (v < -100000 || v > 100000) return fail("year out of range");
    record.year = static_cast<Year>(v);
    field_ = Field::kNone;
    return true;
  }

  TextFields& text() {
    if (!record.text) record.text.emplace();
    return *record.text;
  }

  bool fail(std::string msg) {
    if (error.empty()) error = std::move(msg);
    return false;
  }

  int depth_ = 0;
  bool in_array_ = false;
  Field field_ = Field::kNone;
  unsigned seen_ = 0;
};

struct LineSpan {
  char* begin;
  std::size_t size;
  std::uint32_t line;
};

inline bool blank(const LineSpan& l) {
  for (std::size_t i = 0; i < l.size; ++i)
    if (!std::isspace(static_cast<unsigned char>(l.begin[i]))) return false;
  return true;
}

struct ChunkResult {
  std::vector<PublicationInput> records;
  std::optional<std::pair<std::uint32_t, std::string>> error;
};

// Parses lines in place; each line must be NUL-terminated.
inline void parse_lines(std::span<const LineSpan> lines, ChunkResult& out) {
  PublicationHandler handler;
  rapidjson::Reader reader;
  out.records.reserve(lines.size());
  for (const auto& l : lines) {
    if (blank(l)) continue;
    handler.reset();
    rapidjson::InsituStringStream ss(l.begin);
    auto ok = reader.Parse<rapidjson::kParseInsituFlag | rapidjson::kParseValidateEncodingFlag>(ss, handler);
    if (!ok || !handler.finish()) {
      std::string msg = handler.error;
      if (msg.empty()) msg = rapidjson::GetParseError_En(ok.Code());
      out.error = {l.line, msg};
      return;
    }
    handler.record.line = l.line;
    out.records.push_back(std::move(handler.record));
  }
}

}  // namespace detail

/// Streams a JSONL publications file into `builder`. Blocks are parsed in
/// parallel and merged in line order, so the result is independent of the
/// thread count. Malformed lines raise LoadError with the line number.
inline void read_publications(const fs::path& path, CorpusBuilder& builder, const Executor& exec,
                              std::size_t block_bytes = std::size_t{32} << 20) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open publications file: " + path.string());

  std::string carry;
  std::uint32_t next_line = 1;
  std::vector<char> block;
  bool eof = false;
  while (!eof) {
    block.assign(carry.begin(), carry.end());
    carry.clear();
    std::size_t old = block.size();
    block.resize(old + block_bytes);
    in.read(block.data() + old, static_cast<std::streamsize>(block_bytes));
    block.resize(old + static_cast<std::size_t>(in.gcount()));
    eof = !in;
    if (!eof) {
      auto last_nl = std::string_view(block.data(), block.size()).rfind('\n');
      if (last_nl == std::string_view::npos) {  // no complete line yet
        carry.assign(block.begin(), block.end());
        continue;
      }
      carry.assign(block.begin() + static_cast<std::ptrdiff_t>(last_nl + 1), block.end());
      block.resize(last_nl + 1);
    }
    if (block.empty()) break;
    block.push_back('\0');

    std::vector<detail::LineSpan> lines;
    std::size_t start = 0;
    for (std::size_t i = 0; i + 1 < block.size(); ++i) {
      if (block[i] == '\n') {
        block[i] = '\0';
        lines.push_back({block.data() + start, i - start, next_line++});
        start = i + 1;
      }
    }
    if (start + 1 < block.size()) lines.push_back({block.data() + start, block.size() - 1 - start, next_line++});

    constexpr std::size_t kLinesPerChunk = 8192;
    std::vector<detail::ChunkResult> results(Executor::chunk_count(lines.size(), kLinesPerChunk));
    exec.for_chunks(lines.size(), kLinesPerChunk, [&](std::size_t c, std::size_t b, std::size_t e) {
      detail::parse_lines(std::span<const detail::LineSpan>(lines).subspan(b, e - b), results[c]);
    });
    for (auto& r : results) {
      for (auto& rec : r.records) builder.add_publication(rec);
      if (r.error)
        throw LoadError(path.string() + ":" + std::to_string(r.error->first) + ": malformed record: " +
                        r.error->second);
    }
  }
}

// ---- CSV inputs ---------------------------------------------------------------

namespace detail {

inline std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open file: " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

template <typename Int>
Int parse_int(std::string_view s, const fs::path& path, std::size_t line, std::string_view what) {
  Int v{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw LoadError(path.string() + ":" + std::to_string(line) + ": invalid " + std::string(what) + " '" +
                    std::string(s) + "'");
  return v;
}

inline std::optional<double> parse_optional_double(std::string_view s, const fs::path& path, std::size_t line) {
  if (s.empty()) return std::nullopt;
  double v{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw LoadError(path.string() + ":" + std::to_string(line) + ": invalid coordinate '" + std::string(s) + "'");
  return v;
}

}  // namespace detail

/// Long-format careers table: author_id,yfp,year,count.
inline void read_careers(const fs::path& path, CorpusBuilder& builder) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open careers file: " + path.string());
  builder.mark_careers_supplied();
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string_view> cells;
  std::vector<std::string> quoted;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      if (line != "author_id,yfp,year,count")
        throw LoadError(path.string() + ":1: expected header author_id,yfp,year,count");
      continue;
    }
    if (line.empty()) continue;
    cells.clear();
    if (line.find('"') != std::string::npos) {
      quoted = split_csv_line(line);
      for (const auto& q : quoted) cells.emplace_back(q);
    } else {
      std::string_view rest(line);
      for (;;) {
        auto comma = rest.find(',');
        cells.push_back(rest.substr(0, comma));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
      }
    }
    if (cells.size() != 4)
      throw LoadError(path.string() + ":" + std::to_string(lineno) + ": expected 4 fields");
    auto yfp = detail::parse_int<Year>(cells[1], path, lineno, "yfp");
    auto year = detail::parse_int<Year>(cells[2], path, lineno, "year");
    auto count = detail::parse_int<std::int64_t>(cells[3], path, lineno, "count");
    if (cells[0].empty()) throw LoadError(path.string() + ":" + std::to_string(lineno) + ": empty author_id");
    builder.add_career_row(cells[0], yfp, year, count);
  }
}

/// cluster_id,label,area,total_authors,x,y with x,y optionally blank.
inline std::vector<ClusterMeta> read_clusters(const fs::path& path) {
  auto lines = detail::read_lines(path);
  if (lines.empty() || lines[0] != "cluster_id,label,area,total_authors,x,y")
    throw LoadError(path.string() + ":1: expected header cluster_id,label,area,total_authors,x,y");
  std::vector<ClusterMeta> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto cells = split_csv_line(lines[i]);
    if (cells.size() != 6) throw LoadError(path.string() + ":" + std::to_string(i + 1) + ": expected 6 fields");
    ClusterMeta m;
    m.cluster_id = cells[0];
    m.label = cells[1];
    auto area = parse_area(cells[2]);
    if (!area) throw LoadError(path.string() + ":" + std::to_string(i + 1) + ": unknown area '" + cells[2] + "'");
    m.area = *area;
    m.total_authors = detail::parse_int<std::int64_t>(cells[3], path, i + 1, "total_authors");
    if (m.total_authors < 0) throw LoadError(path.string() + ":" + std::to_string(i + 1) + ": negative total_authors");
    m.x = detail::parse_optional_double(cells[4], path, i + 1);
    m.y = detail::parse_optional_double(cells[5], path, i + 1);
    out.push_back(std::move(m));
  }
  return out;
}

/// Reads, validates and indexes a corpus.
inline LoadResult load_corpus(const CorpusPaths& paths, const BuildOptions& options, const Executor& exec = Executor{}) {
  if (!options.horizon.valid()) throw LoadError("invalid horizon " + to_string(options.horizon));
  CorpusBuilder builder;
  read_publications(paths.publications, builder, exec);
  if (paths.careers) read_careers(*paths.careers, builder);
  if (paths.clusters)
    for (auto& c : read_clusters(*paths.clusters)) builder.add_cluster(std::move(c));
  return std::move(builder).build(options);
}

// ---- writers --------------------------------------------------------------------

inline std::string careers_csv(const Corpus& corpus) {
  std::string out = "author_id,yfp,year,count\n";
  for (AuthorIndex a = 0; a < corpus.author_count(); ++a) {
    const auto& c = corpus.careers[a];
    if (!c) continue;
    for (const auto& yc : c->pubs_per_year) {
      out += csv_escape(corpus.author_ids[a]);
      out += ',' + std::to_string(c->yfp) + ',' + std::to_string(yc.year) + ',' + std::to_string(yc.count) + '\n';
    }
  }
  return out;
}

inline std::string clusters_csv(const std::vector<ClusterMeta>& clusters) {
  CsvWriter w{"cluster_id", "label", "area", "total_authors", "x", "y"};
  for (const auto& c : clusters)
    w.row({c.cluster_id, c.label, std::string(area_name(c.area)), std::to_string(c.total_authors),
           c.x ? format_raw(*c.x) : "", c.y ? format_raw(*c.y) : ""});
  return w.release();
}

inline void write_text_file(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("write failed: " + path.string());
}

inline std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace communitylens
