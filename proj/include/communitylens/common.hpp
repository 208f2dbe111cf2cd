#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace communitylens {

using Year = int;
using AuthorIndex = std::uint32_t;

inline constexpr std::int32_t kNoCluster = -1;

/// Closed range of calendar years that bounds an analysis.
struct Horizon {
  Year first = 2008;
  Year last = 2017;

  bool contains(Year y) const { return y >= first && y <= last; }
  int span() const { return last - first + 1; }
  bool valid() const { return first <= last; }

  friend bool operator==(const Horizon&, const Horizon&) = default;
};

// Parses "Y0:Y1".
inline std::optional<Horizon> parse_horizon(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  Horizon h;
  auto a = text.substr(0, colon);
  auto b = text.substr(colon + 1);
  auto whole = [](std::string_view s, Year& v) {
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    return r.ec == std::errc{} && r.ptr == s.data() + s.size();
  };
  if (!whole(a, h.first) || !whole(b, h.last)) return std::nullopt;
  if (!h.valid()) return std::nullopt;
  return h;
}

inline std::string to_string(const Horizon& h) {
  return std::to_string(h.first) + ":" + std::to_string(h.last);
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised while reading or building a corpus.
class LoadError : public Error {
 public:
  using Error::Error;
};

/// Raised by analysis operations on bad arguments or broken corpus invariants.
class AnalysisError : public Error {
 public:
  using Error::Error;
};

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

/// Exact ratio of two counts. Reported as a percentage; a zero denominator
/// yields 0 and is flagged through `defined()`.
struct Share {
  std::int64_t numerator = 0;
  std::int64_t denominator = 0;

  bool defined() const { return denominator > 0; }
  double percent() const {
    return defined() ? 100.0 * static_cast<double>(numerator) / static_cast<double>(denominator) : 0.0;
  }
  // 100*n/d rounded half-up to one decimal, in tenths.
  std::int64_t percent_tenths() const {
    if (!defined()) return 0;
    return floor_div(2000 * numerator + denominator, 2 * denominator);
  }

  friend bool operator==(const Share&, const Share&) = default;
};

/// Mean of integer observations, kept as an exact sum/count pair.
struct ExactMean {
  std::int64_t sum = 0;
  std::int64_t count = 0;

  bool defined() const { return count > 0; }
  double value() const { return defined() ? static_cast<double>(sum) / static_cast<double>(count) : 0.0; }
  std::int64_t tenths() const { return defined() ? floor_div(20 * sum + count, 2 * count) : 0; }
  void add(std::int64_t v) {
    sum += v;
    ++count;
  }

  friend bool operator==(const ExactMean&, const ExactMean&) = default;
};

// Pairwise summation; the result depends only on the order of `values`.
inline double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kBlock = 64;
  if (values.size() <= kBlock) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

inline std::optional<double> mean_of(std::span<const double> values) {
  if (values.empty()) return std::nullopt;
  return pairwise_sum(values) / static_cast<double>(values.size());
}

// ---- formatting -----------------------------------------------------------

inline std::string format_tenths(std::int64_t tenths) {
  std::string out;
  std::uint64_t mag = tenths < 0 ? static_cast<std::uint64_t>(-tenths) : static_cast<std::uint64_t>(tenths);
  if (tenths < 0) out.push_back('-');
  out += std::to_string(mag / 10);
  out.push_back('.');
  out.push_back(static_cast<char>('0' + mag % 10));
  return out;
}

/// Half-up rounding of a binary double to one decimal.
inline std::int64_t tenths_half_up(double x) {
  return static_cast<std::int64_t>(std::floor(x * 10.0 + 0.5));
}

inline std::string format_1dp(double x) { return format_tenths(tenths_half_up(x)); }
inline std::string format_1dp(const Share& s) { return format_tenths(s.percent_tenths()); }
inline std::string format_1dp(const ExactMean& m) { return format_tenths(m.tenths()); }

/// Shortest round-trip representation.
inline std::string format_raw(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline std::string csv_escape(std::string_view field) {
  bool quote = field.find_first_of(",\"\n\r") != std::string_view::npos;
  if (!quote) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

/// Appends rows of already-formatted cells.
class CsvWriter {
 public:
  explicit CsvWriter(std::initializer_list<std::string_view> header) {
    bool first = true;
    for (auto h : header) {
      if (!first) text_.push_back(',');
      text_ += h;
      first = false;
    }
    text_.push_back('\n');
  }
  explicit CsvWriter(const std::vector<std::string>& header) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) text_.push_back(',');
      text_ += header[i];
    }
    text_.push_back('\n');
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) text_.push_back(',');
      text_ += csv_escape(cells[i]);
    }
    text_.push_back('\n');
  }

  const std::string& str() const { return text_; }
  std::string release() { return std::move(text_); }

 private:
  std::string text_;
};

/// Splits one CSV line into fields, honouring double-quoted fields.
inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

}  // namespace communitylens
