#pragma once

// End-to-end summarisation of one document: plan the extractive cascade,
// run it, fit the result to the abstractive model's window, generate.

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "lexsum/backend.hpp"
#include "lexsum/corpus.hpp"
#include "lexsum/error.hpp"
#include "lexsum/extractor.hpp"
#include "lexsum/planner.hpp"
#include "lexsum/text.hpp"
#include "lexsum/tokens.hpp"

namespace lexsum {

inline constexpr int kRecordVersion = 1;

enum class TruncationPolicy { drop_trailing_sentences, hard_token_cut };

inline std::string_view to_string(TruncationPolicy p) {
  return p == TruncationPolicy::drop_trailing_sentences ? "drop-trailing-sentences"
                                                        : "hard-token-cut";
}

inline std::optional<TruncationPolicy> parse_truncation_policy(std::string_view s) {
  if (s == "drop-trailing-sentences") return TruncationPolicy::drop_trailing_sentences;
  if (s == "hard-token-cut") return TruncationPolicy::hard_token_cut;
  return std::nullopt;
}

inline std::string_view to_string(Metric m) {
  return m == Metric::euclidean ? "euclidean" : "cosine";
}

struct PipelineConfig {
  ModelProfile extractive_profile;
  ModelProfile abstractive_profile;
  RatioStrategy strategy;
  std::uint64_t seed = kDefaultSeed;
  bool global_budget_correction = false;
  TruncationPolicy truncation_policy = TruncationPolicy::drop_trailing_sentences;
  Metric metric = Metric::euclidean;
  // Generation length for encoder-decoder models; decoder-only models use
  // their reserved_generation_tokens.
  int max_new_tokens = kDefaultMaxNewTokens;

  std::string label() const {
    return extractive_profile.model_id + "/" + std::string(to_string(strategy.kind)) + "/" +
           abstractive_profile.model_id;
  }

  void validate() const {
    if (extractive_profile.role != Role::extractive)
      throw ConfigError("profile " + extractive_profile.model_id + " is not extractive");
    if (abstractive_profile.role != Role::abstractive)
      throw ConfigError("profile " + abstractive_profile.model_id + " is not abstractive");
    if (!(strategy.fixed_ratio > 0.0 && strategy.fixed_ratio < 1.0))
      throw ConfigError("fixed ratio must lie in (0, 1)");
    if (input_budget(abstractive_profile) < 1)
      throw ConfigError("abstractive input budget of " + abstractive_profile.model_id +
                        " is below one token");
  }
};

struct Backends {
  TokenCounter& tokens;
  Embedder& embedder;
  Generator& generator;
};

struct StageTimings {
  double plan_ms = 0.0;
  std::vector<double> step_ms;
  double fit_ms = 0.0;
  double generate_ms = 0.0;
  double total_ms = 0.0;
};

struct RunRecord {
  std::string document_id;
  std::string config_label;
  CompressionPlan plan;
  std::vector<ExtractionStepResult> steps;
  std::int64_t doc_tokens_ext = 0;
  std::int64_t pre_abstractive_tokens_ext = 0;
  std::int64_t pre_abstractive_tokens_abs = 0;
  // Abstractive-tokenizer count of the cascade output before fitting.
  std::int64_t intermediate_tokens_abs = 0;
  std::int64_t abstractive_budget = 0;
  std::size_t truncated_sentences = 0;
  std::string final_summary;
  bool empty_summary = false;
  bool ok = true;
  std::string error;
  nlohmann::json provenance = nlohmann::json::object();
  StageTimings timings;
};

class PipelineError : public Error {
 public:
  PipelineError(const std::string& what, RunRecord partial)
      : Error(what), partial_(std::move(partial)) {}
  const RunRecord& partial() const noexcept { return partial_; }

 private:
  RunRecord partial_;
};

struct FitResult {
  std::string text;
  std::size_t dropped_sentences = 0;
};

namespace detail {

// Largest m in [0, n] with fits(m), assuming fits is monotone and fits(0).
template <typename Pred>
std::size_t largest_fitting(std::size_t n, Pred fits) {
  std::size_t lo = 0, hi = n;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo + 1) / 2;
    if (fits(mid))
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

inline std::vector<std::string_view> split_words(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t b = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > b) out.push_back(text.substr(b, i - b));
  }
  return out;
}

inline std::string join_words(const std::vector<std::string_view>& words, std::size_t n) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out.push_back(' ');
    out.append(words[i]);
  }
  return out;
}

// Longest whitespace-word prefix of `text` within `budget` tokens.
inline std::pair<std::string, std::size_t> cut_words(std::string_view text,
                                                     std::string_view tokenizer,
                                                     TokenCounter& tokens,
                                                     std::int64_t budget) {
  const auto words = split_words(text);
  const std::size_t w = largest_fitting(words.size(), [&](std::size_t m) {
    return count_tokens(join_words(words, m), tokenizer, tokens) <= budget;
  });
  return {join_words(words, w), w};
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

/// Shrinks `text` until its abstractive-tokenizer count fits `budget`.
/// drop-trailing-sentences removes whole sentences from the end; if even
/// the first sentence alone is too long it is cut at the word level rather
/// than returning nothing. hard-token-cut keeps the longest word prefix.
inline FitResult fit_to_budget(std::string_view text, std::string_view tokenizer,
                               std::int64_t budget, TokenCounter& tokens,
                               TruncationPolicy policy) {
  if (budget < 1) throw Error("abstractive budget must be at least 1 token");
  FitResult r;
  if (count_tokens(text, tokenizer, tokens) <= budget) {
    r.text = std::string(text);
    return r;
  }
  const auto sentences = segment_sentences(text);
  if (policy == TruncationPolicy::drop_trailing_sentences) {
    const std::size_t keep = detail::largest_fitting(sentences.size(), [&](std::size_t m) {
      return count_tokens(join_sentences(std::span(sentences).first(m)), tokenizer, tokens) <=
             budget;
    });
    if (keep > 0) {
      r.text = join_sentences(std::span(sentences).first(keep));
      r.dropped_sentences = sentences.size() - keep;
      return r;
    }
    r.text = detail::cut_words(sentences.front().text, tokenizer, tokens, budget).first;
    r.dropped_sentences = sentences.size();
    return r;
  }
  auto [cut, words_kept] = detail::cut_words(text, tokenizer, tokens, budget);
  r.text = std::move(cut);
  std::size_t cumulative = 0, whole = 0;
  for (const auto& s : sentences) {
    cumulative += word_count(s.text);
    if (cumulative > words_kept) break;
    ++whole;
  }
  r.dropped_sentences = sentences.size() - whole;
  return r;
}

inline FitResult fit_to_context(std::string_view text, const ModelProfile& abstractive,
                                TokenCounter& tokens,
                                TruncationPolicy policy = TruncationPolicy::drop_trailing_sentences) {
  return fit_to_budget(text, abstractive.tokenizer(), input_budget(abstractive), tokens, policy);
}

/// Runs the full cascade for one document. On failure throws PipelineError
/// carrying everything computed up to that point.
inline RunRecord summarize(const DocumentPair& doc, const PipelineConfig& cfg,
                           Backends& backends) {
  cfg.validate();
  detail::Stopwatch total;
  RunRecord rec;
  rec.document_id = doc.id;
  rec.config_label = cfg.label();
  const ModelProfile& ext = cfg.extractive_profile;
  const ModelProfile& abs = cfg.abstractive_profile;
  rec.abstractive_budget = input_budget(abs);
  rec.provenance = {
      {"extractive_model", ext.model_id},
      {"extractive_tokenizer", ext.tokenizer()},
      {"extractive_context_length", ext.context_length},
      {"abstractive_model", abs.model_id},
      {"abstractive_tokenizer", abs.tokenizer()},
      {"abstractive_budget", rec.abstractive_budget},
      {"strategy", std::string(to_string(cfg.strategy.kind))},
      {"fixed_ratio", cfg.strategy.fixed_ratio},
      {"seed", cfg.seed},
      {"global_budget_correction", cfg.global_budget_correction},
      {"truncation_policy", std::string(to_string(cfg.truncation_policy))},
      {"metric", std::string(to_string(cfg.metric))},
      {"clustering", "k-means per chunk; every step re-segments and re-chunks its input"},
      {"concatenation_separator", " "},
      {"pooling", ext.pooling.empty() ? "unspecified" : ext.pooling},
  };

  std::string stage = "plan";
  try {
    detail::Stopwatch sw;
    rec.doc_tokens_ext = count_tokens(doc.reference_text, ext.tokenizer(), backends.tokens);
    if (rec.doc_tokens_ext < 1) throw Error("document has no tokens");
    rec.plan = make_plan(cfg.strategy, rec.doc_tokens_ext, rec.abstractive_budget);
    rec.provenance["hybrid_degenerated_to_dependent"] = rec.plan.degenerated_to_dependent;
    rec.timings.plan_ms = sw.ms();

    std::string current = doc.reference_text;
    ExtractorContext ctx{backends.embedder, ext.model_id, &backends.tokens, ext.tokenizer(),
                         cfg.metric};
    for (int j = 0; j < rec.plan.n_steps; ++j) {
      stage = "extractive step " + std::to_string(j + 1);
      detail::Stopwatch step_sw;
      auto sentences = segment_sentences(current);
      annotate_token_counts(sentences, ext.tokenizer(), backends.tokens);
      const auto chunks = chunk_document(sentences, ext.context_length, ext.tokenizer());
      auto step = extract_step(chunks, rec.plan.step_ratios[static_cast<std::size_t>(j)],
                               cfg.global_budget_correction, ctx,
                               derive_seed(cfg.seed, static_cast<std::uint64_t>(j)), j + 1);
      current = step.concatenated_text;
      rec.steps.push_back(std::move(step));
      rec.timings.step_ms.push_back(step_sw.ms());
    }

    stage = "fit";
    detail::Stopwatch fit_sw;
    rec.intermediate_tokens_abs = count_tokens(current, abs.tokenizer(), backends.tokens);
    auto fit = fit_to_context(current, abs, backends.tokens, cfg.truncation_policy);
    rec.truncated_sentences = fit.dropped_sentences;
    rec.pre_abstractive_tokens_ext = count_tokens(fit.text, ext.tokenizer(), backends.tokens);
    rec.pre_abstractive_tokens_abs = count_tokens(fit.text, abs.tokenizer(), backends.tokens);
    rec.timings.fit_ms = fit_sw.ms();

    stage = "generate";
    detail::Stopwatch gen_sw;
    GenerationRequest req;
    req.model_id = abs.model_id;
    req.input_text = std::move(fit.text);
    req.prompt_template = abs.prompt_template;
    req.max_new_tokens = abs.architecture == Architecture::decoder_only
                             ? static_cast<int>(abs.reserved_generation_tokens)
                             : cfg.max_new_tokens;
    const auto out = checked_generate(backends.generator, backends.tokens, abs, req);
    rec.final_summary = out.text;
    rec.empty_summary = out.empty;
    rec.timings.generate_ms = gen_sw.ms();
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = stage + ": " + e.what();
    rec.timings.total_ms = total.ms();
    throw PipelineError(rec.error, std::move(rec));
  }
  rec.timings.total_ms = total.ms();
  return rec;
}

/// Summarises every pair on up to `parallelism` threads. Output order is
/// input order; a failing document yields a record with ok == false.
inline std::vector<RunRecord> run_batch(const std::vector<DocumentPair>& pairs,
                                        const PipelineConfig& cfg, Backends& backends,
                                        int parallelism = 1) {
  if (parallelism < 1) throw Error("parallelism must be at least 1");
  cfg.validate();
  std::vector<RunRecord> out(pairs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < pairs.size(); i = next++) {
      try {
        out[i] = summarize(pairs[i], cfg, backends);
      } catch (const PipelineError& e) {
        out[i] = e.partial();
      }
    }
  };
  const auto n_threads =
      std::min<std::size_t>(static_cast<std::size_t>(parallelism), std::max<std::size_t>(1, pairs.size()));
  if (n_threads == 1) {
    worker();
    return out;
  }
  std::vector<std::jthread> threads;
  for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  threads.clear();
  return out;
}

inline nlohmann::json to_json(const ExtractionStepResult& s) {
  return {{"step_index", s.step_index},
          {"ratio", s.ratio},
          {"per_chunk_selected", s.per_chunk_selected},
          {"concatenated_text", s.concatenated_text},
          {"input_tokens", s.input_tokens},
          {"token_count", s.token_count},
          {"input_sentences", s.input_sentences},
          {"selected_sentences", s.selected_sentences},
          {"global_correction", s.global_correction}};
}

inline ExtractionStepResult step_from_json(const nlohmann::json& j) {
  ExtractionStepResult s;
  s.step_index = j.at("step_index").get<int>();
  s.ratio = j.at("ratio").get<double>();
  s.per_chunk_selected = j.at("per_chunk_selected").get<std::vector<std::vector<std::size_t>>>();
  s.concatenated_text = j.at("concatenated_text").get<std::string>();
  s.input_tokens = j.at("input_tokens").get<std::int64_t>();
  s.token_count = j.at("token_count").get<std::int64_t>();
  s.input_sentences = j.at("input_sentences").get<std::size_t>();
  s.selected_sentences = j.at("selected_sentences").get<std::size_t>();
  s.global_correction = j.value("global_correction", false);
  return s;
}

/// Timings vary run to run; leave them out when records must compare
/// byte-for-byte.
inline nlohmann::json to_json(const RunRecord& r, bool include_timings = true) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : r.steps) steps.push_back(to_json(s));
  nlohmann::json plan = plan_to_json(r.plan);
  plan["degenerated_to_dependent"] = r.plan.degenerated_to_dependent;
  nlohmann::json j{{"record_version", kRecordVersion},
                   {"document_id", r.document_id},
                   {"config_label", r.config_label},
                   {"status", r.ok ? "ok" : "failed"},
                   {"plan", plan},
                   {"steps", steps},
                   {"doc_tokens_ext", r.doc_tokens_ext},
                   {"pre_abstractive_tokens_ext", r.pre_abstractive_tokens_ext},
                   {"pre_abstractive_tokens_abs", r.pre_abstractive_tokens_abs},
                   {"intermediate_tokens_abs", r.intermediate_tokens_abs},
                   {"abstractive_budget", r.abstractive_budget},
                   {"truncated_sentences", r.truncated_sentences},
                   {"final_summary", r.final_summary},
                   {"empty_summary", r.empty_summary},
                   {"provenance", r.provenance}};
  if (!r.ok) j["error"] = r.error;
  if (include_timings)
    j["timings"] = {{"plan_ms", r.timings.plan_ms},
                    {"step_ms", r.timings.step_ms},
                    {"fit_ms", r.timings.fit_ms},
                    {"generate_ms", r.timings.generate_ms},
                    {"total_ms", r.timings.total_ms}};
  return j;
}

inline RunRecord record_from_json(const nlohmann::json& j) {
  const int version = j.at("record_version").get<int>();
  if (version != kRecordVersion)
    throw Error("unsupported record_version " + std::to_string(version));
  RunRecord r;
  r.document_id = j.at("document_id").get<std::string>();
  r.config_label = j.at("config_label").get<std::string>();
  r.ok = j.at("status").get<std::string>() == "ok";
  r.error = j.value("error", std::string());
  if (j.contains("plan") && !j["plan"].is_null()) r.plan = plan_from_json(j["plan"]);
  for (const auto& s : j.at("steps")) r.steps.push_back(step_from_json(s));
  r.doc_tokens_ext = j.at("doc_tokens_ext").get<std::int64_t>();
  r.pre_abstractive_tokens_ext = j.at("pre_abstractive_tokens_ext").get<std::int64_t>();
  r.pre_abstractive_tokens_abs = j.at("pre_abstractive_tokens_abs").get<std::int64_t>();
  r.intermediate_tokens_abs = j.value("intermediate_tokens_abs", std::int64_t{0});
  r.abstractive_budget = j.value("abstractive_budget", std::int64_t{0});
  r.truncated_sentences = j.at("truncated_sentences").get<std::size_t>();
  r.final_summary = j.at("final_summary").get<std::string>();
  r.empty_summary = j.value("empty_summary", false);
  r.provenance = j.value("provenance", nlohmann::json::object());
  if (j.contains("timings")) {
    const auto& t = j["timings"];
    r.timings.plan_ms = t.value("plan_ms", 0.0);
    r.timings.step_ms = t.value("step_ms", std::vector<double>{});
    r.timings.fit_ms = t.value("fit_ms", 0.0);
    r.timings.generate_ms = t.value("generate_ms", 0.0);
    r.timings.total_ms = t.value("total_ms", 0.0);
  }
  return r;
}

inline std::vector<RunRecord> read_records(std::istream& in) {
  std::vector<RunRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw CorpusError(std::string("bad run record: ") + e.what(), lineno);
    }
  }
  return out;
}

}  // namespace lexsum
