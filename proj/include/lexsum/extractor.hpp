#pragma once

// One extractive step: per chunk, embed the sentences, cluster them with
// k-means and keep the sentence nearest each centroid; the kept sentences of
// all chunks are joined in document order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "lexsum/backend.hpp"
#include "lexsum/error.hpp"
#include "lexsum/kmeans.hpp"
#include "lexsum/text.hpp"
#include "lexsum/tokens.hpp"

namespace lexsum {

inline constexpr std::uint64_t kDefaultSeed = 42;

enum class Metric { euclidean, cosine };

struct SentenceEmbedding {
  std::size_t sentence_index = 0;
  Vector vector;
};

struct ExtractionStepResult {
  int step_index = 0;
  double ratio = 1.0;
  std::vector<std::vector<std::size_t>> per_chunk_selected;
  std::string concatenated_text;
  std::int64_t input_tokens = 0;
  std::int64_t token_count = 0;
  std::size_t input_sentences = 0;
  std::size_t selected_sentences = 0;
  bool global_correction = false;

  bool operator==(const ExtractionStepResult&) const = default;
};

class ExtractionError : public Error {
 public:
  ExtractionError(std::size_t chunk_index, const std::string& what)
      : Error("chunk " + std::to_string(chunk_index) + ": " + what),
        chunk_index_(chunk_index) {}
  std::size_t chunk_index() const noexcept { return chunk_index_; }

 private:
  std::size_t chunk_index_;
};

/// Independent, reproducible per-stream seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// clamp(round(ratio · n), 1, n)
inline std::size_t cluster_count(std::size_t n, double ratio) {
  if (n == 0) return 0;
  const double k = std::round(ratio * static_cast<double>(n));
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(0.0, k)), 1, n);
}

/// Largest-remainder apportionment of round(ratio · Σn) selections over
/// chunks of the given sizes. Every non-empty chunk gets at least one and at
/// most all of its sentences, so the total is max(target, #non-empty chunks)
/// whenever the target does not exceed Σn.
inline std::vector<std::size_t> apportion(std::span<const std::size_t> sizes,
                                          double ratio) {
  const std::size_t m = sizes.size();
  std::vector<std::size_t> k(m, 0);
  std::vector<double> rem(m, 0.0);
  const std::size_t total = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
  if (total == 0) return k;
  const auto target = static_cast<std::size_t>(std::round(ratio * static_cast<double>(total)));
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (sizes[i] == 0) continue;
    const double quota = ratio * static_cast<double>(sizes[i]);
    const double fl = std::floor(quota);
    rem[i] = quota - fl;
    k[i] = std::clamp<std::size_t>(static_cast<std::size_t>(fl), 1, sizes[i]);
    assigned += k[i];
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  // Largest fractional remainder first; earlier chunk on ties.
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  while (assigned < target) {
    bool progressed = false;
    for (std::size_t i : order) {
      if (assigned == target) break;
      if (sizes[i] == 0 || k[i] >= sizes[i]) continue;
      ++k[i];
      ++assigned;
      progressed = true;
    }
    if (!progressed) break;
  }
  // Minimum-one bumps can overshoot; take back from the smallest remainders.
  for (auto it = order.rbegin(); it != order.rend() && assigned > target; ++it) {
    if (k[*it] > 1) {
      --k[*it];
      --assigned;
    }
  }
  return k;
}

namespace detail {

inline void l2_normalize(Vector& v) {
  double n = 0.0;
  for (double x : v) n += x * x;
  n = std::sqrt(n);
  if (n > 0.0)
    for (double& x : v) x /= n;
}

}  // namespace detail

/// Keeps `k` sentences of `chunk`: one per k-means cluster, the member
/// nearest its centroid, ties to the smaller sentence index. Returned
/// sentence indices are in document order.
inline std::vector<std::size_t> select_k_sentences(
    const Chunk& chunk, std::span<const SentenceEmbedding> embeddings, std::size_t k,
    std::uint64_t seed, Metric metric = Metric::euclidean) {
  const std::size_t n = chunk.sentences.size();
  if (n == 0) throw Error("cannot select sentences from an empty chunk");
  if (embeddings.size() != n)
    throw Error("expected " + std::to_string(n) + " embeddings, got " +
                std::to_string(embeddings.size()));
  k = std::clamp<std::size_t>(k, 1, n);

  std::vector<Vector> points;
  points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (embeddings[i].sentence_index != chunk.sentences[i].index)
      throw Error("embedding order does not match chunk sentences");
    points.push_back(embeddings[i].vector);
    if (metric == Metric::cosine) detail::l2_normalize(points.back());
  }
  if (k == n) {
    std::vector<std::size_t> all;
    for (const auto& s : chunk.sentences) all.push_back(s.index);
    return all;
  }

  const KMeansResult km = kmeans(points, k, seed);
  std::vector<std::size_t> best(k, n);
  std::vector<double> best_d(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = km.assignments[i];
    const double d = std::sqrt(detail::squared_distance(points[i], km.centroids[c]));
    // Members are visited in index order, so only a clearly smaller distance
    // displaces the incumbent.
    if (best[c] == n || d < best_d[c] - 1e-12 * (1.0 + best_d[c])) {
      best[c] = i;
      best_d[c] = d;
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < k; ++c)
    if (best[c] != n) out.push_back(chunk.sentences[best[c]].index);
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<std::size_t> select_sentences(
    const Chunk& chunk, std::span<const SentenceEmbedding> embeddings, double ratio,
    std::uint64_t seed, Metric metric = Metric::euclidean) {
  if (!(ratio > 0.0 && ratio <= 1.0)) throw Error("ratio must lie in (0, 1]");
  return select_k_sentences(chunk, embeddings, cluster_count(chunk.sentences.size(), ratio),
                            seed, metric);
}

struct ExtractorContext {
  Embedder& embedder;
  std::string model_id;
  TokenCounter* tokens = nullptr;  // optional; fills the token fields
  std::string tokenizer_id;
  Metric metric = Metric::euclidean;
};

inline std::vector<SentenceEmbedding> embed_chunk(Embedder& embedder,
                                                  std::string_view model_id,
                                                  const Chunk& chunk) {
  std::vector<std::string> texts;
  texts.reserve(chunk.sentences.size());
  for (const auto& s : chunk.sentences) texts.push_back(s.text);
  auto vectors = embedder.embed(model_id, texts);
  if (vectors.size() != texts.size())
    throw Error("embedder returned " + std::to_string(vectors.size()) +
                " vectors for " + std::to_string(texts.size()) + " sentences");
  std::vector<SentenceEmbedding> out;
  out.reserve(vectors.size());
  const std::size_t dim = vectors.empty() ? 0 : vectors.front().size();
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != dim) throw Error("embedding dimension mismatch");
    for (double x : vectors[i])
      if (!std::isfinite(x)) throw Error("non-finite embedding component");
    out.push_back({chunk.sentences[i].index, std::move(vectors[i])});
  }
  return out;
}

/// Runs selection over every chunk and joins the kept sentences with single
/// spaces. With `global_correction`, per-chunk cluster counts come from
/// apportion() instead of per-chunk rounding.
inline ExtractionStepResult extract_step(std::span<const Chunk> chunks, double ratio,
                                         bool global_correction, ExtractorContext& ctx,
                                         std::uint64_t seed = kDefaultSeed,
                                         int step_index = 0) {
  if (!(ratio > 0.0 && ratio <= 1.0)) throw Error("ratio must lie in (0, 1]");
  ExtractionStepResult r;
  r.step_index = step_index;
  r.ratio = ratio;
  r.global_correction = global_correction;

  std::vector<std::size_t> sizes;
  for (const auto& c : chunks) sizes.push_back(c.sentences.size());
  std::vector<std::size_t> ks;
  if (global_correction) {
    ks = apportion(sizes, ratio);
  } else {
    for (std::size_t n : sizes) ks.push_back(cluster_count(n, ratio));
  }

  std::vector<std::string_view> kept;
  for (std::size_t ci = 0; ci < chunks.size(); ++ci) {
    const Chunk& chunk = chunks[ci];
    r.input_sentences += chunk.sentences.size();
    if (chunk.sentences.empty()) {
      r.per_chunk_selected.emplace_back();
      continue;
    }
    std::vector<std::size_t> selected;
    try {
      if (ks[ci] >= chunk.sentences.size()) {
        for (const auto& s : chunk.sentences) selected.push_back(s.index);
      } else {
        const auto emb = embed_chunk(ctx.embedder, ctx.model_id, chunk);
        selected = select_k_sentences(chunk, emb, ks[ci],
                                      derive_seed(seed, chunk.chunk_index), ctx.metric);
      }
    } catch (const ExtractionError&) {
      throw;
    } catch (const std::exception& e) {
      throw ExtractionError(ci, e.what());
    }
    for (std::size_t idx : selected) {
      auto it = std::find_if(chunk.sentences.begin(), chunk.sentences.end(),
                             [&](const Sentence& s) { return s.index == idx; });
      kept.push_back(it->text);
    }
    r.selected_sentences += selected.size();
    r.per_chunk_selected.push_back(std::move(selected));
  }

  for (const auto& t : kept) {
    if (!r.concatenated_text.empty()) r.concatenated_text.push_back(' ');
    r.concatenated_text.append(t);
  }
  if (ctx.tokens) {
    std::string input;
    for (const auto& c : chunks)
      for (const auto& s : c.sentences) {
        if (!input.empty()) input.push_back(' ');
        input += s.text;
      }
    r.input_tokens = count_tokens(input, ctx.tokenizer_id, *ctx.tokens);
    r.token_count = count_tokens(r.concatenated_text, ctx.tokenizer_id, *ctx.tokens);
  }
  return r;
}

}  // namespace lexsum
