#pragma once

// Application configuration: backend endpoint, model profiles, pipeline
// defaults. Loaded from TOML; endpoint and credentials can be overridden by
// LEXSUM_BACKEND_URL / LEXSUM_AUTH_TOKEN.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <toml.hpp>

#include "lexsum/backend.hpp"
#include "lexsum/error.hpp"
#include "lexsum/http_backend.hpp"
#include "lexsum/pipeline.hpp"

namespace lexsum {

/// Context lengths of the summarisation models compared in the EUR-Lex
/// experiments. Tokenizer ids default to the model id.
inline std::vector<ModelProfile> default_profiles() {
  auto p = [](std::string id, Role role, std::int64_t ctx, Architecture arch) {
    ModelProfile m;
    m.model_id = id;
    m.role = role;
    m.context_length = ctx;
    m.architecture = arch;
    m.tokenizer_id = id;
    return m;
  };
  using enum Role;
  using enum Architecture;
  std::vector<ModelProfile> v{
      p("roberta", extractive, 512, encoder),
      p("longformer", extractive, 4096, encoder),
      p("legalbert", extractive, 512, encoder),
      p("lexlm", extractive, 512, encoder),
      p("lexlm-longformer", extractive, 4096, encoder),
      p("bart", abstractive, 1024, encoder_decoder),
      p("t5", abstractive, 512, encoder_decoder),
      p("longt5", abstractive, 16384, encoder_decoder),
      p("pegasus", abstractive, 1024, encoder_decoder),
      p("pegasusx", abstractive, 16384, encoder_decoder),
      p("llama3", abstractive, 8192, decoder_only),
  };
  v.back().reserved_generation_tokens = kDefaultReservedGenerationTokens;
  v.back().prompt_template = PromptTemplate::llama3_instruct;
  return v;
}

struct PipelineDefaults {
  RatioStrategy strategy;
  std::uint64_t seed = kDefaultSeed;
  TruncationPolicy truncation_policy = TruncationPolicy::drop_trailing_sentences;
  bool global_budget_correction = false;
  Metric metric = Metric::euclidean;
  std::string extractive;
  std::string abstractive;
};

struct AppConfig {
  HttpBackendOptions backend;
  std::vector<ModelProfile> profiles = default_profiles();
  PipelineDefaults pipeline;
  std::filesystem::path corpus_path;
  std::filesystem::path output_dir;

  const ModelProfile& profile(std::string_view id) const {
    for (const auto& p : profiles)
      if (p.model_id == id) return p;
    std::string known;
    for (const auto& p : profiles) known += (known.empty() ? "" : ", ") + p.model_id;
    throw ConfigError("unknown model profile \"" + std::string(id) + "\" (known: " + known + ")");
  }

  void upsert(ModelProfile p) {
    for (auto& q : profiles)
      if (q.model_id == p.model_id) {
        q = std::move(p);
        return;
      }
    profiles.push_back(std::move(p));
  }
};

namespace detail {

template <typename T>
T toml_or(const toml::table& t, std::string_view key, T fallback) {
  if (auto v = t[key].value<T>()) return *v;
  if (t.contains(key))
    throw ConfigError("config key \"" + std::string(key) + "\" has the wrong type");
  return fallback;
}

}  // namespace detail

inline AppConfig parse_config(std::string_view toml_text, std::string_view source = "config") {
  toml::table root;
  try {
    root = toml::parse(toml_text, source);
  } catch (const toml::parse_error& e) {
    throw ConfigError(std::string(source) + ": " + std::string(e.description()));
  }
  AppConfig cfg;
  if (auto* b = root["backend"].as_table()) {
    cfg.backend.base_url = detail::toml_or<std::string>(*b, "url", cfg.backend.base_url);
    cfg.backend.auth_token = detail::toml_or<std::string>(*b, "auth_token", cfg.backend.auth_token);
    cfg.backend.connect_timeout = std::chrono::milliseconds(
        detail::toml_or<std::int64_t>(*b, "connect_timeout_ms", cfg.backend.connect_timeout.count()));
    cfg.backend.read_timeout = std::chrono::milliseconds(
        detail::toml_or<std::int64_t>(*b, "read_timeout_ms", cfg.backend.read_timeout.count()));
    cfg.backend.max_in_flight =
        static_cast<int>(detail::toml_or<std::int64_t>(*b, "max_in_flight", cfg.backend.max_in_flight));
    cfg.backend.max_attempts =
        static_cast<int>(detail::toml_or<std::int64_t>(*b, "max_attempts", cfg.backend.max_attempts));
  }
  if (auto* arr = root["profiles"].as_array()) {
    for (auto& node : *arr) {
      auto* t = node.as_table();
      if (!t) throw ConfigError("[[profiles]] entries must be tables");
      ModelProfile p;
      p.model_id = detail::toml_or<std::string>(*t, "model_id", "");
      if (p.model_id.empty()) throw ConfigError("profile without model_id");
      p.role = parse_role(detail::toml_or<std::string>(*t, "role", "extractive"));
      p.context_length = detail::toml_or<std::int64_t>(*t, "context_length", 0);
      if (p.context_length < 1)
        throw ConfigError("profile " + p.model_id + ": context_length must be >= 1");
      p.architecture = parse_architecture(detail::toml_or<std::string>(
          *t, "architecture", p.role == Role::extractive ? "encoder" : "encoder-decoder"));
      p.tokenizer_id = detail::toml_or<std::string>(*t, "tokenizer_id", p.model_id);
      p.reserved_generation_tokens = detail::toml_or<std::int64_t>(
          *t, "reserved_generation_tokens", kDefaultReservedGenerationTokens);
      p.prompt_template = parse_prompt_template(detail::toml_or<std::string>(
          *t, "prompt_template",
          p.architecture == Architecture::decoder_only ? "llama3-instruct" : "plain"));
      p.pooling = detail::toml_or<std::string>(*t, "pooling", "");
      cfg.upsert(std::move(p));
    }
  }
  if (auto* pl = root["pipeline"].as_table()) {
    auto kind = parse_ratio_kind(detail::toml_or<std::string>(*pl, "strategy", "fixed"));
    if (!kind) throw ConfigError("pipeline.strategy must be fixed, dependent or hybrid");
    cfg.pipeline.strategy.kind = *kind;
    cfg.pipeline.strategy.fixed_ratio =
        detail::toml_or<double>(*pl, "fixed_ratio", kDefaultFixedRatio);
    cfg.pipeline.seed =
        static_cast<std::uint64_t>(detail::toml_or<std::int64_t>(*pl, "seed", kDefaultSeed));
    auto policy = parse_truncation_policy(
        detail::toml_or<std::string>(*pl, "truncation_policy", "drop-trailing-sentences"));
    if (!policy) throw ConfigError("unknown pipeline.truncation_policy");
    cfg.pipeline.truncation_policy = *policy;
    cfg.pipeline.global_budget_correction =
        detail::toml_or<bool>(*pl, "global_budget_correction", false);
    const auto metric = detail::toml_or<std::string>(*pl, "metric", "euclidean");
    if (metric != "euclidean" && metric != "cosine")
      throw ConfigError("pipeline.metric must be euclidean or cosine");
    cfg.pipeline.metric = metric == "cosine" ? Metric::cosine : Metric::euclidean;
    cfg.pipeline.extractive = detail::toml_or<std::string>(*pl, "extractive", "");
    cfg.pipeline.abstractive = detail::toml_or<std::string>(*pl, "abstractive", "");
  }
  if (!(cfg.pipeline.strategy.fixed_ratio > 0.0 && cfg.pipeline.strategy.fixed_ratio < 1.0))
    throw ConfigError("pipeline.fixed_ratio must lie in (0, 1)");
  if (auto* paths = root["paths"].as_table()) {
    cfg.corpus_path = detail::toml_or<std::string>(*paths, "corpus", "");
    cfg.output_dir = detail::toml_or<std::string>(*paths, "output_dir", "");
  }
  return cfg;
}

inline AppConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

}  // namespace lexsum
