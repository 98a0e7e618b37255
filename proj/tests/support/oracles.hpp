#pragma once

// Deliberately naive reference implementations. They share no code with the
// library beyond plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace oracle {

/// Two-pass population (or sample) standard deviation in long double.
inline long double two_pass_sd(const std::vector<std::size_t>& xs, bool sample = false) {
  long double mean = 0;
  for (auto x : xs) mean += x;
  mean /= xs.size();
  long double ss = 0;
  for (auto x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (sample ? xs.size() - 1 : xs.size()));
}

inline long double mean(const std::vector<std::size_t>& xs) {
  long double m = 0;
  for (auto x : xs) m += x;
  return m / xs.size();
}

/// Smallest N with |D|·R^N ≤ K, by repeated multiplication.
inline int cascade_min_steps(double doc, double k, double r) {
  int n = 0;
  double len = doc;
  while (len > k) {
    len *= r;
    ++n;
  }
  return n;
}

/// Classic O(nm) dynamic-programming LCS.
inline std::size_t lcs_dp(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::vector<std::size_t>> t(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      t[i][j] = a[i - 1] == b[j - 1] ? t[i - 1][j - 1] + 1 : std::max(t[i - 1][j], t[i][j - 1]);
  return t[a.size()][b.size()];
}

/// Clipped n-gram overlap: each candidate n-gram occurrence is matched
/// against a not-yet-used reference occurrence, by linear scan.
inline std::size_t ngram_overlap(const std::vector<std::string>& cand,
                                 const std::vector<std::string>& ref, std::size_t n) {
  auto grams = [n](const std::vector<std::string>& t) {
    std::vector<std::vector<std::string>> g;
    for (std::size_t i = 0; i + n <= t.size(); ++i)
      g.emplace_back(t.begin() + static_cast<std::ptrdiff_t>(i),
                     t.begin() + static_cast<std::ptrdiff_t>(i + n));
    return g;
  };
  const auto cg = grams(cand);
  const auto rg = grams(ref);
  std::vector<bool> used(rg.size(), false);
  std::size_t overlap = 0;
  for (const auto& g : cg)
    for (std::size_t j = 0; j < rg.size(); ++j)
      if (!used[j] && rg[j] == g) {
        used[j] = true;
        ++overlap;
        break;
      }
  return overlap;
}

struct Prf {
  double p = 0, r = 0, f = 0;
};

inline Prf prf(double overlap, double c, double r) {
  Prf s;
  if (c <= 0 || r <= 0) return s;
  s.p = overlap / c;
  s.r = overlap / r;
  if (s.p + s.r > 0) s.f = 2 * s.p * s.r / (s.p + s.r);
  return s;
}

/// Greedy packing on raw lengths; returns chunk membership as index lists.
inline std::vector<std::vector<std::size_t>> greedy_chunks(const std::vector<std::int64_t>& lens,
                                                           std::int64_t limit) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur;
  std::int64_t used = 0;
  for (std::size_t i = 0; i < lens.size(); ++i) {
    if (lens[i] > limit) {
      if (!cur.empty()) out.push_back(cur);
      out.push_back({i});
      cur.clear();
      used = 0;
      continue;
    }
    if (used + lens[i] > limit && !cur.empty()) {
      out.push_back(cur);
      cur.clear();
      used = 0;
    }
    cur.push_back(i);
    used += lens[i];
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

/// Canonical form of a partition: clusters as sorted index sets, sorted.
inline std::vector<std::vector<std::size_t>> partition(const std::vector<std::size_t>& labels) {
  std::map<std::size_t, std::vector<std::size_t>> by;
  for (std::size_t i = 0; i < labels.size(); ++i) by[labels[i]].push_back(i);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [l, v] : by) out.push_back(v);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace oracle
