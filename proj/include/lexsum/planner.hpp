#pragma once

// Number of extractive steps and per-step compression ratios for the fixed,
// dependent and hybrid ratio strategies.
//
// All lengths are token counts. A document triggers extraction only when it
// is strictly longer than the context length.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lexsum/error.hpp"

namespace lexsum {

enum class RatioKind { fixed, dependent, hybrid };

inline std::string_view to_string(RatioKind k) {
  switch (k) {
    case RatioKind::fixed: return "fixed";
    case RatioKind::dependent: return "dependent";
    case RatioKind::hybrid: return "hybrid";
  }
  return "fixed";
}

inline std::optional<RatioKind> parse_ratio_kind(std::string_view s) {
  if (s == "fixed") return RatioKind::fixed;
  if (s == "dependent") return RatioKind::dependent;
  if (s == "hybrid") return RatioKind::hybrid;
  return std::nullopt;
}

inline constexpr double kDefaultFixedRatio = 0.4;

struct RatioStrategy {
  RatioKind kind = RatioKind::fixed;
  double fixed_ratio = kDefaultFixedRatio;
};

struct CompressionPlan {
  RatioKind strategy = RatioKind::fixed;
  std::int64_t doc_length = 0;
  std::int64_t context_length = 0;
  int n_steps = 0;
  std::vector<double> step_ratios;
  // Hybrid plans with a single step have no fixed-ratio steps left and
  // become dependent plans; this records that it happened.
  bool degenerated_to_dependent = false;

  bool operator==(const CompressionPlan&) const = default;
};

namespace detail {

inline void check_lengths(std::int64_t doc_length, std::int64_t context_length) {
  if (doc_length < 1) throw Error("document length must be at least 1 token");
  if (context_length < 1) throw Error("context length must be at least 1 token");
}

inline void check_ratio(double r) {
  if (!(r > 0.0 && r < 1.0))
    throw Error("fixed compression ratio must lie in (0, 1), got " +
                std::to_string(r));
}

}  // namespace detail

/// Ideal intermediate lengths: lengths[j] = doc_length · ratio_0 · … · ratio_j,
/// multiplied left to right.
inline std::vector<double> simulate_cascade(double doc_length,
                                            const std::vector<double>& ratios) {
  std::vector<double> out;
  out.reserve(ratios.size());
  double len = doc_length;
  for (double r : ratios) {
    if (!(r > 0.0 && r <= 1.0)) throw Error("step ratio outside (0, 1]");
    len *= r;
    out.push_back(len);
  }
  return out;
}

/// Smallest n with doc_length · ratio^n ≤ context_length, by repeated
/// multiplication.
inline int cascade_steps(std::int64_t doc_length, std::int64_t context_length,
                         double ratio) {
  double len = static_cast<double>(doc_length);
  const double k = static_cast<double>(context_length);
  int n = 0;
  while (len > k) {
    len *= ratio;
    ++n;
  }
  return n;
}

/// N = ceil(log(K/|D|) / log(R)). When the quotient lands within 1e-9 of an
/// integer the ceiling is decided by the explicit cascade instead, so that the
/// result never depends on the last bit of a logarithm.
inline int fixed_step_count(std::int64_t doc_length,
                            std::int64_t context_length, double ratio) {
  if (doc_length <= context_length) return 0;
  const double q = std::log(static_cast<double>(context_length) /
                            static_cast<double>(doc_length)) /
                   std::log(ratio);
  if (std::abs(q - std::round(q)) < 1e-9)
    return cascade_steps(doc_length, context_length, ratio);
  return static_cast<int>(std::ceil(q));
}

inline CompressionPlan plan_fixed(std::int64_t doc_length,
                                  std::int64_t context_length, double ratio) {
  detail::check_lengths(doc_length, context_length);
  detail::check_ratio(ratio);
  CompressionPlan p;
  p.strategy = RatioKind::fixed;
  p.doc_length = doc_length;
  p.context_length = context_length;
  p.n_steps = fixed_step_count(doc_length, context_length, ratio);
  p.step_ratios.assign(static_cast<std::size_t>(p.n_steps), ratio);
  return p;
}

inline CompressionPlan plan_dependent(std::int64_t doc_length,
                                      std::int64_t context_length) {
  detail::check_lengths(doc_length, context_length);
  CompressionPlan p;
  p.strategy = RatioKind::dependent;
  p.doc_length = doc_length;
  p.context_length = context_length;
  if (doc_length > context_length) {
    p.n_steps = 1;
    p.step_ratios = {static_cast<double>(context_length) /
                     static_cast<double>(doc_length)};
  }
  return p;
}

/// N − 1 steps at the fixed ratio, then one step whose ratio brings the ideal
/// intermediate length exactly to the context length.
inline CompressionPlan plan_hybrid(std::int64_t doc_length,
                                   std::int64_t context_length, double ratio) {
  detail::check_lengths(doc_length, context_length);
  detail::check_ratio(ratio);
  const int n = fixed_step_count(doc_length, context_length, ratio);
  if (n <= 1) {
    CompressionPlan p = plan_dependent(doc_length, context_length);
    p.strategy = RatioKind::hybrid;
    p.degenerated_to_dependent = n == 1;
    return p;
  }
  CompressionPlan p;
  p.strategy = RatioKind::hybrid;
  p.doc_length = doc_length;
  p.context_length = context_length;
  p.n_steps = n;
  p.step_ratios.assign(static_cast<std::size_t>(n - 1), ratio);
  const double before_last =
      simulate_cascade(static_cast<double>(doc_length), p.step_ratios).back();
  double last = static_cast<double>(context_length) / before_last;
  if (last > 1.0) last = 1.0;
  p.step_ratios.push_back(last);
  return p;
}

inline CompressionPlan make_plan(const RatioStrategy& s, std::int64_t doc_length,
                                 std::int64_t context_length) {
  switch (s.kind) {
    case RatioKind::fixed: return plan_fixed(doc_length, context_length, s.fixed_ratio);
    case RatioKind::dependent: return plan_dependent(doc_length, context_length);
    case RatioKind::hybrid: return plan_hybrid(doc_length, context_length, s.fixed_ratio);
  }
  throw Error("unknown ratio strategy");
}

/// {strategy, K, doc_tokens, n_steps, ratios[], predicted_lengths[]}
inline nlohmann::json plan_to_json(const CompressionPlan& p) {
  return {{"strategy", std::string(to_string(p.strategy))},
          {"K", p.context_length},
          {"doc_tokens", p.doc_length},
          {"n_steps", p.n_steps},
          {"ratios", p.step_ratios},
          {"predicted_lengths",
           simulate_cascade(static_cast<double>(p.doc_length), p.step_ratios)}};
}

inline CompressionPlan plan_from_json(const nlohmann::json& j) {
  CompressionPlan p;
  auto kind = parse_ratio_kind(j.at("strategy").get<std::string>());
  if (!kind) throw Error("unknown strategy in plan");
  p.strategy = *kind;
  p.context_length = j.at("K").get<std::int64_t>();
  p.doc_length = j.at("doc_tokens").get<std::int64_t>();
  p.n_steps = j.at("n_steps").get<int>();
  p.step_ratios = j.at("ratios").get<std::vector<double>>();
  p.degenerated_to_dependent = j.value("degenerated_to_dependent", false);
  return p;
}

}  // namespace lexsum
