#pragma once

// Sentence segmentation and greedy token-bounded chunking.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lexsum/error.hpp"
#include "lexsum/tokens.hpp"

namespace lexsum {

struct Sentence {
  std::size_t index = 0;
  std::string text;
  std::map<std::string, std::int64_t, std::less<>> token_count;

  bool operator==(const Sentence&) const = default;
};

struct Chunk {
  std::size_t chunk_index = 0;
  std::vector<Sentence> sentences;
  std::int64_t token_count = 0;
  // Set when a single sentence exceeded the limit on its own; token_count is
  // then clamped to the limit and the extractive model sees a truncated view.
  bool truncated = false;
};

using Segmenter = std::function<std::vector<Sentence>(std::string_view)>;

/// Rule-based splitter: a boundary is a run of `.`, `!` or `?` (optionally
/// followed by closing quotes or brackets), then whitespace, then an
/// uppercase letter, possibly behind an opening quote or bracket. A period
/// after a guarded abbreviation is never a boundary.
class SentenceSplitter {
 public:
  SentenceSplitter()
      : abbreviations_{"art",  "arts", "no",   "nos",  "para", "paras",
                       "e.g",  "i.e",  "etc",  "cf",   "vol",  "pp",
                       "p",    "ch",   "sec",  "mr",   "mrs",  "ms",
                       "dr",   "prof", "st",   "vs",   "viz",  "approx",
                       "fig",  "nr",   "ann",  "subpara", "op", "seq"} {}

  explicit SentenceSplitter(std::set<std::string> abbreviations)
      : abbreviations_(std::move(abbreviations)) {}

  std::vector<Sentence> operator()(std::string_view text) const {
    std::vector<Sentence> out;
    std::size_t start = 0;
    const std::size_t n = text.size();
    std::size_t i = 0;
    while (i < n) {
      const char c = text[i];
      if (c != '.' && c != '!' && c != '?') {
        ++i;
        continue;
      }
      std::size_t end = i + 1;
      while (end < n && (text[end] == '.' || text[end] == '!' || text[end] == '?'))
        ++end;
      while (end < n && is_closer(text[end])) ++end;
      if (end == n) break;
      if (!std::isspace(static_cast<unsigned char>(text[end]))) {
        i = end;
        continue;
      }
      std::size_t next = end;
      while (next < n && std::isspace(static_cast<unsigned char>(text[next])))
        ++next;
      const bool opens_sentence =
          next == n || std::isupper(static_cast<unsigned char>(text[next])) ||
          (is_opener(text[next]) && next + 1 < n &&
           std::isupper(static_cast<unsigned char>(text[next + 1])));
      if (opens_sentence && !(c == '.' && guarded(text.substr(start, i - start)))) {
        push(out, text.substr(start, end - start));
        start = next;
      }
      i = next;
    }
    if (start < n) push(out, text.substr(start));
    return out;
  }

 private:
  static bool is_closer(char c) {
    return c == '"' || c == '\'' || c == ')' || c == ']';
  }
  static bool is_opener(char c) { return c == '"' || c == '\'' || c == '('; }

  // True when the word immediately before the period is an abbreviation.
  bool guarded(std::string_view before) const {
    std::size_t b = before.size();
    while (b > 0 && !std::isspace(static_cast<unsigned char>(before[b - 1]))) --b;
    std::string word(before.substr(b));
    while (!word.empty() && (word.front() == '(' || word.front() == '"'))
      word.erase(word.begin());
    std::transform(word.begin(), word.end(), word.begin(),
                   [](unsigned char ch) { return std::tolower(ch); });
    return abbreviations_.count(word) > 0;
  }

  static void push(std::vector<Sentence>& out, std::string_view raw) {
    std::string norm;
    norm.reserve(raw.size());
    bool pending_space = false;
    for (unsigned char ch : raw) {
      if (std::isspace(ch)) {
        pending_space = !norm.empty();
        continue;
      }
      if (pending_space) norm.push_back(' ');
      pending_space = false;
      norm.push_back(static_cast<char>(ch));
    }
    if (norm.empty()) return;
    Sentence s;
    s.index = out.size();
    s.text = std::move(norm);
    out.push_back(std::move(s));
  }

  std::set<std::string> abbreviations_;
};

/// Splits with the default SentenceSplitter. Internal whitespace runs are
/// collapsed to a single space.
inline std::vector<Sentence> segment_sentences(std::string_view text) {
  static const SentenceSplitter splitter;
  return splitter(text);
}

inline std::string join_sentences(std::span<const Sentence> sentences) {
  std::string out;
  for (const auto& s : sentences) {
    if (!out.empty()) out.push_back(' ');
    out += s.text;
  }
  return out;
}

/// Collapses whitespace runs to single spaces and trims both ends.
inline std::string normalize_whitespace(std::string_view text) {
  std::string out;
  bool pending = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      pending = !out.empty();
      continue;
    }
    if (pending) out.push_back(' ');
    pending = false;
    out.push_back(static_cast<char>(c));
  }
  return out;
}

/// Records each sentence's count under `tokenizer_id`.
inline void annotate_token_counts(std::vector<Sentence>& sentences,
                                  std::string_view tokenizer_id,
                                  TokenCounter& counter) {
  for (auto& s : sentences)
    s.token_count.insert_or_assign(std::string(tokenizer_id),
                                   count_tokens(s.text, tokenizer_id, counter));
}

/// Greedy packing: each chunk is the longest run of remaining sentences whose
/// summed token count fits `limit`. Sentences are never split.
inline std::vector<Chunk> chunk_document(std::span<const Sentence> sentences,
                                         std::int64_t limit,
                                         std::string_view tokenizer_id) {
  if (limit < 1) throw Error("chunk limit must be at least 1 token");
  std::vector<Chunk> chunks;
  Chunk current;
  auto flush = [&] {
    if (current.sentences.empty()) return;
    current.chunk_index = chunks.size();
    chunks.push_back(std::move(current));
    current = Chunk{};
  };
  for (const auto& s : sentences) {
    auto it = s.token_count.find(tokenizer_id);
    if (it == s.token_count.end())
      throw Error("sentence " + std::to_string(s.index) +
                  " has no token count for tokenizer \"" +
                  std::string(tokenizer_id) + "\"");
    const std::int64_t t = it->second;
    if (t > limit) {
      flush();
      current.sentences.push_back(s);
      current.token_count = limit;
      current.truncated = true;
      flush();
      continue;
    }
    if (current.token_count + t > limit) flush();
    current.sentences.push_back(s);
    current.token_count += t;
  }
  flush();
  return chunks;
}

}  // namespace lexsum
