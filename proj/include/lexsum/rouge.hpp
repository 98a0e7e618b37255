#pragma once

// ROUGE-N and ROUGE-L precision/recall/F1.
//
// Normalisation: text is lowercased and split into maximal alphanumeric
// runs (bytes >= 0x80 count as word characters so UTF-8 letters stay inside
// words). No stemming, no stopword removal. ROUGE-L is the LCS over the
// whole token sequence, not the sentence-level union variant.

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lexsum {

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

inline std::vector<std::string> rouge_tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c >= 0x80) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

inline RougeScore prf(double overlap, double cand_total, double ref_total) {
  RougeScore s;
  if (cand_total <= 0.0 || ref_total <= 0.0) return s;
  s.precision = overlap / cand_total;
  s.recall = overlap / ref_total;
  if (s.precision + s.recall > 0.0)
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

namespace detail {

// N-grams keyed by their tokens joined with a separator that cannot occur
// inside a token.
inline std::unordered_map<std::string, std::size_t> ngram_counts(
    const std::vector<std::string>& tokens, std::size_t n) {
  std::unordered_map<std::string, std::size_t> counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (std::size_t k = 1; k < n; ++k) {
      key.push_back(' ');
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace detail

/// Clipped n-gram overlap on pre-tokenised input.
inline RougeScore rouge_n_tokens(const std::vector<std::string>& cand,
                                 const std::vector<std::string>& ref, std::size_t n) {
  if (n < 1) n = 1;
  const auto c = detail::ngram_counts(cand, n);
  const auto r = detail::ngram_counts(ref, n);
  std::size_t overlap = 0;
  for (const auto& [gram, count] : c)
    if (auto it = r.find(gram); it != r.end()) overlap += std::min(count, it->second);
  const double cand_total = cand.size() >= n ? static_cast<double>(cand.size() - n + 1) : 0.0;
  const double ref_total = ref.size() >= n ? static_cast<double>(ref.size() - n + 1) : 0.0;
  return prf(static_cast<double>(overlap), cand_total, ref_total);
}

inline RougeScore rouge_n(std::string_view candidate, std::string_view reference,
                          std::size_t n) {
  return rouge_n_tokens(rouge_tokenize(candidate), rouge_tokenize(reference), n);
}

/// LCS length by the bit-parallel recurrence (Allison–Dix / Hyyrö):
/// O(|a| · |b| / 64) words of work and O(|b| / 64) memory.
inline std::size_t lcs_length(const std::vector<std::string>& a,
                              const std::vector<std::string>& b) {
  if (a.empty() || b.empty()) return 0;
  const std::size_t words = (b.size() + 63) / 64;
  // Match masks: for each distinct token of b, the positions where it occurs.
  std::unordered_map<std::string_view, std::vector<std::uint64_t>> masks;
  for (std::size_t j = 0; j < b.size(); ++j) {
    auto& m = masks[b[j]];
    if (m.empty()) m.assign(words, 0);
    m[j / 64] |= std::uint64_t{1} << (j % 64);
  }
  std::vector<std::uint64_t> v(words, ~std::uint64_t{0});
  const std::vector<std::uint64_t> none(words, 0);
  for (const auto& tok : a) {
    auto it = masks.find(tok);
    const auto& m = it == masks.end() ? none : it->second;
    std::uint64_t carry = 0;
    for (std::size_t w = 0; w < words; ++w) {
      const std::uint64_t u = v[w] & m[w];
      // v' = (v + u) | (v - u), with the addition carried across words.
      const std::uint64_t sum1 = v[w] + u;
      const std::uint64_t c1 = sum1 < v[w] ? 1 : 0;
      const std::uint64_t sum = sum1 + carry;
      const std::uint64_t c2 = sum < sum1 ? 1 : 0;
      const std::uint64_t next = sum | (v[w] - u);
      carry = c1 | c2;
      v[w] = next;
    }
  }
  std::size_t zeros = 0;
  for (std::size_t w = 0; w < words; ++w) {
    std::uint64_t x = ~v[w];
    if (w == words - 1 && b.size() % 64 != 0) x &= (std::uint64_t{1} << (b.size() % 64)) - 1;
    zeros += static_cast<std::size_t>(std::popcount(x));
  }
  return zeros;
}

inline RougeScore rouge_l_tokens(const std::vector<std::string>& cand,
                                 const std::vector<std::string>& ref) {
  const double l = static_cast<double>(lcs_length(cand, ref));
  return prf(l, static_cast<double>(cand.size()), static_cast<double>(ref.size()));
}

inline RougeScore rouge_l(std::string_view candidate, std::string_view reference) {
  return rouge_l_tokens(rouge_tokenize(candidate), rouge_tokenize(reference));
}

}  // namespace lexsum
