#pragma once

// Document/summary pair ingestion, corpus length statistics and the
// mean + 2·SD outlier filter.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "lexsum/error.hpp"

namespace lexsum {

enum class Split { train, validation, test };

inline std::string_view to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::validation: return "validation";
    case Split::test: return "test";
  }
  return "train";
}

inline std::optional<Split> parse_split(std::string_view s) {
  if (s == "train") return Split::train;
  if (s == "validation") return Split::validation;
  if (s == "test") return Split::test;
  return std::nullopt;
}

struct DocumentPair {
  std::string id;
  std::string reference_text;
  std::string gold_summary;
  Split split = Split::train;

  bool operator==(const DocumentPair&) const = default;
};

enum class SdKind { population, sample };

struct CorpusStats {
  std::size_t count = 0;
  double mean_words = 0.0;
  double sd_words = 0.0;
  double outlier_threshold_words = 0.0;
};

enum class CorpusFormat { jsonl, directory };

/// Number of maximal runs of non-whitespace characters.
inline std::size_t word_count(std::string_view text) {
  std::size_t n = 0;
  bool in_word = false;
  for (unsigned char c : text) {
    const bool ws = std::isspace(c) != 0;
    if (!ws && !in_word) ++n;
    in_word = !ws;
  }
  return n;
}

namespace detail {

inline std::string required_string(const nlohmann::json& rec,
                                   const char* field, std::size_t line) {
  auto it = rec.find(field);
  if (it == rec.end())
    throw CorpusError(std::string("record missing required field \"") +
                          field + "\"",
                      line);
  if (!it->is_string())
    throw CorpusError(std::string("field \"") + field + "\" is not a string",
                      line);
  return it->get<std::string>();
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

}  // namespace detail

/// Parses one canonical JSONL record: {id, reference, summary, split}.
inline DocumentPair parse_record(const nlohmann::json& rec,
                                 std::size_t line = 0) {
  if (!rec.is_object()) throw CorpusError("record is not a JSON object", line);
  DocumentPair p;
  p.id = detail::required_string(rec, "id", line);
  p.reference_text = detail::required_string(rec, "reference", line);
  p.gold_summary = detail::required_string(rec, "summary", line);
  const auto split = detail::required_string(rec, "split", line);
  auto s = parse_split(split);
  if (!s) throw CorpusError("unknown split \"" + split + "\"", line);
  p.split = *s;
  if (detail::is_blank(p.reference_text))
    throw CorpusError("empty reference text for id \"" + p.id + "\"", line);
  return p;
}

inline nlohmann::json to_json(const DocumentPair& p) {
  return {{"id", p.id},
          {"reference", p.reference_text},
          {"summary", p.gold_summary},
          {"split", std::string(to_string(p.split))}};
}

inline std::vector<DocumentPair> read_jsonl_corpus(std::istream& in) {
  std::vector<DocumentPair> out;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::is_blank(line)) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw CorpusError(std::string("invalid JSON: ") + e.what(), lineno);
    }
    auto p = parse_record(rec, lineno);
    if (!seen.insert(p.id).second)
      throw CorpusError("duplicate id \"" + p.id + "\"", lineno);
    out.push_back(std::move(p));
  }
  return out;
}

/// Directory layout: <root>/<split>/<id>.reference.txt plus
/// <id>.summary.txt. Splits are read in train, validation, test order and
/// ids in lexicographic order within a split.
inline std::vector<DocumentPair> read_directory_corpus(
    const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  std::vector<DocumentPair> out;
  std::unordered_set<std::string> seen;
  constexpr std::string_view kRefSuffix = ".reference.txt";
  constexpr std::string_view kSumSuffix = ".summary.txt";
  for (Split split : {Split::train, Split::validation, Split::test}) {
    const fs::path dir = root / std::string(to_string(split));
    if (!fs::is_directory(dir)) continue;
    std::set<std::string> ids;
    for (const auto& entry : fs::directory_iterator(dir)) {
      const auto name = entry.path().filename().string();
      if (name.size() > kRefSuffix.size() && name.ends_with(kRefSuffix))
        ids.insert(name.substr(0, name.size() - kRefSuffix.size()));
    }
    for (const auto& id : ids) {
      const fs::path sum = dir / (id + std::string(kSumSuffix));
      if (!fs::exists(sum))
        throw CorpusError("record \"" + id + "\" has no summary file " +
                          sum.string());
      DocumentPair p;
      p.id = id;
      p.reference_text = detail::read_file(dir / (id + std::string(kRefSuffix)));
      p.gold_summary = detail::read_file(sum);
      p.split = split;
      if (detail::is_blank(p.reference_text))
        throw CorpusError("empty reference text for id \"" + id + "\"");
      if (!seen.insert(id).second)
        throw CorpusError("duplicate id \"" + id + "\" across splits");
      out.push_back(std::move(p));
    }
  }
  return out;
}

inline std::vector<DocumentPair> load_corpus(
    const std::filesystem::path& path,
    CorpusFormat format = CorpusFormat::jsonl) {
  namespace fs = std::filesystem;
  if (!fs::exists(path)) throw IoError("no such file: " + path.string());
  if (format == CorpusFormat::directory) {
    if (!fs::is_directory(path))
      throw IoError("not a directory: " + path.string());
    return read_directory_corpus(path);
  }
  std::ifstream in(path);
  if (!in || fs::is_directory(path))
    throw IoError("cannot read " + path.string());
  return read_jsonl_corpus(in);
}

inline void write_jsonl_corpus(std::ostream& out,
                               const std::vector<DocumentPair>& pairs) {
  for (const auto& p : pairs) out << to_json(p).dump() << '\n';
}

// Moments are accumulated in exact integer arithmetic, so the result does
// not depend on the order of `pairs`.
inline CorpusStats compute_stats(const std::vector<DocumentPair>& pairs,
                                 SdKind kind = SdKind::population) {
  if (pairs.empty()) throw CorpusError("cannot compute stats of empty corpus");
  unsigned __int128 sum = 0;
  unsigned __int128 sum_sq = 0;
  for (const auto& p : pairs) {
    const unsigned __int128 w = word_count(p.reference_text);
    sum += w;
    sum_sq += w * w;
  }
  const unsigned __int128 n = pairs.size();
  // n·Σx² − (Σx)² = n² · population variance, never negative.
  const unsigned __int128 scaled = n * sum_sq - sum * sum;
  const long double nl = static_cast<long double>(pairs.size());
  long double var = 0.0L;
  if (kind == SdKind::population)
    var = static_cast<long double>(scaled) / (nl * nl);
  else if (pairs.size() > 1)
    var = static_cast<long double>(scaled) / (nl * (nl - 1.0L));

  CorpusStats s;
  s.count = pairs.size();
  s.mean_words = static_cast<double>(static_cast<long double>(sum) / nl);
  s.sd_words = static_cast<double>(std::sqrt(var));
  s.outlier_threshold_words = s.mean_words + 2.0 * s.sd_words;
  return s;
}

struct FilterResult {
  std::vector<DocumentPair> kept;
  std::vector<DocumentPair> removed;
};

// Removal is strict: a document exactly at the threshold is kept.
inline FilterResult filter_outliers(const std::vector<DocumentPair>& pairs,
                                    const CorpusStats& stats) {
  FilterResult r;
  for (const auto& p : pairs) {
    if (static_cast<double>(word_count(p.reference_text)) >
        stats.outlier_threshold_words)
      r.removed.push_back(p);
    else
      r.kept.push_back(p);
  }
  return r;
}

inline std::map<Split, std::size_t> split_counts(
    const std::vector<DocumentPair>& pairs) {
  std::map<Split, std::size_t> m{
      {Split::train, 0}, {Split::validation, 0}, {Split::test, 0}};
  for (const auto& p : pairs) ++m[p.split];
  return m;
}

/// {count, mean_words, sd_words, threshold, removed_ids[]}
inline nlohmann::json stats_report(const CorpusStats& s,
                                   const std::vector<DocumentPair>& removed) {
  nlohmann::json ids = nlohmann::json::array();
  for (const auto& p : removed) ids.push_back(p.id);
  return {{"count", s.count},
          {"mean_words", s.mean_words},
          {"sd_words", s.sd_words},
          {"threshold", s.outlier_threshold_words},
          {"removed_ids", ids}};
}

}  // namespace lexsum
