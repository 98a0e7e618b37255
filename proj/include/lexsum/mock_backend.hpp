#pragma once

// Deterministic in-process backends for hermetic runs: a whitespace word
// counter, a chars/4 counter, a feature-hashing embedder and two trivial
// generators.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lexsum/backend.hpp"
#include "lexsum/corpus.hpp"
#include "lexsum/text.hpp"

namespace lexsum::mock {

inline constexpr std::string_view kWordTokenizer = "word";
inline constexpr std::string_view kCharTokenizer = "char4";

inline std::int64_t word_tokens(std::string_view text) {
  return static_cast<std::int64_t>(word_count(text));
}

/// floor(bytes / 4), but never zero for non-empty text.
inline std::int64_t char4_tokens(std::string_view text) {
  if (text.empty()) return 0;
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(text.size() / 4));
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Bag-of-words feature hashing: each lowercased alphanumeric word adds a
/// pseudo-random ±1 pattern; the sum is L2-normalised. Depends only on the
/// text and the seed.
class HashEmbedder {
 public:
  explicit HashEmbedder(std::size_t dim = 16, std::uint64_t seed = 0x5eedULL)
      : dim_(dim), seed_(seed) {}

  std::vector<double> operator()(std::string_view text) const {
    std::vector<double> v(dim_, 0.0);
    std::string word;
    bool any = false;
    auto flush = [&] {
      if (word.empty()) return;
      add(v, fnv1a(word, seed_));
      any = true;
      word.clear();
    };
    for (unsigned char c : text) {
      if (std::isalnum(c) || c >= 0x80)
        word.push_back(static_cast<char>(std::tolower(c)));
      else
        flush();
    }
    flush();
    if (!any) add(v, fnv1a(text, seed_));
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 0.0)
      for (double& x : v) x /= norm;
    return v;
  }

  std::size_t dim() const { return dim_; }

 private:
  void add(std::vector<double>& v, std::uint64_t h) const {
    for (std::size_t d = 0; d < dim_; ++d)
      v[d] += (splitmix64(h + d) & 1ULL) ? 1.0 : -1.0;
  }

  std::size_t dim_;
  std::uint64_t seed_;
};

/// First `max_new_tokens` whitespace words of the prompt.
inline std::string echo(std::string_view prompt, int max_new_tokens) {
  std::string out;
  int taken = 0;
  std::size_t i = 0;
  while (i < prompt.size() && taken < max_new_tokens) {
    while (i < prompt.size() && std::isspace(static_cast<unsigned char>(prompt[i]))) ++i;
    const std::size_t b = i;
    while (i < prompt.size() && !std::isspace(static_cast<unsigned char>(prompt[i]))) ++i;
    if (b == i) break;
    if (!out.empty()) out.push_back(' ');
    out.append(prompt.substr(b, i - b));
    ++taken;
  }
  return out;
}

/// First `k` sentences of the prompt.
inline std::string lead(std::string_view prompt, std::size_t k) {
  auto sentences = segment_sentences(prompt);
  if (sentences.size() > k) sentences.resize(k);
  return join_sentences(sentences);
}

enum class GeneratorKind { lead, echo, empty };

struct MockOptions {
  GeneratorKind generator = GeneratorKind::lead;
  std::size_t lead_sentences = 3;
  std::size_t embedding_dim = 16;
  std::uint64_t embedding_seed = 0x5eedULL;
  // Called before every completion; throw from it to inject failures.
  std::function<void(std::string_view model, std::string_view prompt)> before_generate;
};

/// Serves every profile it is given. Extractive profiles count words,
/// abstractive profiles count chars/4; the tokenizer ids "word" and "char4"
/// are also accepted directly.
class MockBackend final : public ModelBackend {
 public:
  explicit MockBackend(std::vector<ModelProfile> profiles, MockOptions opts = {})
      : profiles_(std::move(profiles)),
        opts_(std::move(opts)),
        embedder_(opts_.embedding_dim, opts_.embedding_seed) {
    for (auto& p : profiles_)
      if (p.pooling.empty()) p.pooling = "hashed-bag-of-words";
  }

  std::int64_t count_tokens(std::string_view tokenizer_id,
                            std::string_view text) override {
    return resolve_tokenizer(tokenizer_id)(text);
  }

  std::vector<std::vector<double>> embed(std::string_view model_id,
                                         std::span<const std::string> texts) override {
    require_model(model_id);
    if (texts.empty()) throw Error("embed: empty text list");
    std::vector<std::vector<double>> out;
    out.reserve(texts.size());
    for (const auto& t : texts) {
      if (t.empty()) throw Error("embed: empty text");
      out.push_back(embedder_(t));
    }
    return out;
  }

  std::string complete(std::string_view model_id, std::string_view prompt,
                       int max_new_tokens) override {
    require_model(model_id);
    if (opts_.before_generate) opts_.before_generate(model_id, prompt);
    switch (opts_.generator) {
      case GeneratorKind::echo: return echo(prompt, max_new_tokens);
      case GeneratorKind::empty: return {};
      case GeneratorKind::lead: break;
    }
    // Generate from the text body only, never the instruction scaffolding.
    std::string_view body = prompt;
    if (auto t = body.find(kTextMarker); t != std::string_view::npos) {
      body.remove_prefix(t + kTextMarker.size());
      if (auto s = body.rfind(kSummaryMarker); s != std::string_view::npos)
        body = body.substr(0, s);
    }
    return echo(lead(body, opts_.lead_sentences), max_new_tokens);
  }

  std::vector<ModelProfile> models() override { return profiles_; }

  std::vector<std::string> model_ids() const {
    std::vector<std::string> ids;
    for (const auto& p : profiles_) ids.push_back(p.model_id);
    return ids;
  }

  const ModelProfile* find(std::string_view id) const {
    for (const auto& p : profiles_)
      if (p.model_id == id) return &p;
    return nullptr;
  }

 private:
  using CountFn = std::int64_t (*)(std::string_view);

  CountFn resolve_tokenizer(std::string_view id) const {
    if (id == kWordTokenizer) return &word_tokens;
    if (id == kCharTokenizer) return &char4_tokens;
    for (const auto& p : profiles_) {
      if (p.model_id != id && p.tokenizer() != id) continue;
      if (p.tokenizer() == kWordTokenizer) return &word_tokens;
      if (p.tokenizer() == kCharTokenizer) return &char4_tokens;
      return p.role == Role::extractive ? &word_tokens : &char4_tokens;
    }
    throw BackendError(BackendError::Kind::unknown_model,
                       "unknown tokenizer \"" + std::string(id) + "\"", model_ids());
  }

  void require_model(std::string_view id) const {
    if (!find(id))
      throw BackendError(BackendError::Kind::unknown_model,
                         "unknown model \"" + std::string(id) + "\"", model_ids());
  }

  std::vector<ModelProfile> profiles_;
  MockOptions opts_;
  HashEmbedder embedder_;
};

}  // namespace lexsum::mock
