#pragma once

// Deterministic synthetic legal-ish text for tests. Sentences are built from
// a fixed vocabulary so the word tokenizer count is known exactly.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lexsum/backend.hpp"
#include "lexsum/corpus.hpp"

namespace testsupport {

inline const std::vector<std::string>& vocabulary() {
  static const std::vector<std::string> v{
      "commission", "regulation", "member",    "states",     "shall",     "adopt",
      "measures",   "council",    "directive", "annex",      "provisions", "market",
      "authority",  "report",     "data",      "protection", "customs",   "tariff",
      "agricultural", "products", "financial", "assistance", "programme", "union",
      "implementing", "acts",     "procedure", "committee",  "opinion",   "period",
      "application", "import",    "export",    "licence",    "quota",     "fisheries",
      "vessels",    "catch",      "limits",    "environment", "emissions", "energy",
      "transport",  "safety",     "standards", "consumer",   "goods",     "services"};
  return v;
}

/// One sentence of exactly `words` words, capitalised, ending in a period.
inline std::string sentence(std::mt19937_64& rng, std::size_t words) {
  const auto& v = vocabulary();
  std::string s;
  for (std::size_t i = 0; i < words; ++i) {
    std::string w = v[rng() % v.size()];
    if (i == 0) w[0] = static_cast<char>(w[0] - 'a' + 'A');
    if (i) s.push_back(' ');
    s += w;
  }
  s.push_back('.');
  return s;
}

/// Document of exactly `tokens` whitespace words split into sentences of
/// `per_sentence` words (the last may be shorter).
inline std::string document(std::size_t tokens, std::uint64_t seed = 1,
                            std::size_t per_sentence = 20) {
  std::mt19937_64 rng(seed);
  std::string doc;
  std::size_t left = tokens;
  while (left > 0) {
    const std::size_t n = std::min(left, per_sentence);
    if (!doc.empty()) doc.push_back(' ');
    doc += sentence(rng, n);
    left -= n;
  }
  return doc;
}

/// Document of exactly `tokens` words with sentence lengths drawn from
/// [min_words, max_words].
inline std::string ragged_document(std::size_t tokens, std::uint64_t seed,
                                   std::size_t min_words = 8, std::size_t max_words = 40) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> len(min_words, max_words);
  std::string doc;
  std::size_t left = tokens;
  while (left > 0) {
    const std::size_t n = std::min(left, len(rng));
    if (!doc.empty()) doc.push_back(' ');
    doc += sentence(rng, n);
    left -= n;
  }
  return doc;
}

inline std::string words(std::size_t n, const std::string& w = "word") {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) s.push_back(' ');
    s += w;
  }
  return s;
}

inline lexsum::DocumentPair pair(std::string id, std::string reference,
                                 std::string summary = "Gold summary.",
                                 lexsum::Split split = lexsum::Split::test) {
  return {std::move(id), std::move(reference), std::move(summary), split};
}

/// Test profiles: both sides count words, so planner arithmetic carries over
/// to the abstractive side unchanged.
inline lexsum::ModelProfile profile(std::string id, lexsum::Role role, std::int64_t ctx,
                                    std::string tokenizer = "word") {
  lexsum::ModelProfile p;
  p.model_id = std::move(id);
  p.role = role;
  p.context_length = ctx;
  p.architecture = role == lexsum::Role::extractive ? lexsum::Architecture::encoder
                                                    : lexsum::Architecture::encoder_decoder;
  p.tokenizer_id = std::move(tokenizer);
  return p;
}

/// The three models behind the golden protocol fixtures.
inline std::vector<lexsum::ModelProfile> fixture_profiles() {
  using lexsum::Role;
  auto llm = profile("mock-llm", Role::abstractive, 8192, "char4");
  llm.architecture = lexsum::Architecture::decoder_only;
  llm.prompt_template = lexsum::PromptTemplate::llama3_instruct;
  return {profile("mock-ext", Role::extractive, 512, "word"),
          profile("mock-abs", Role::abstractive, 1024, "char4"), llm};
}

}  // namespace testsupport
