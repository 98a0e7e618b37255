#pragma once

// Model-service contracts: profiles, embedding, generation, and the JSON
// bodies of the /v1 wire protocol.
//
//   POST /v1/embed        {model, texts[]}                 -> {vectors[][], dim}
//   POST /v1/generate     {model, prompt, max_new_tokens}  -> {text}
//   POST /v1/count_tokens {model, text}                    -> {count}
//   GET  /v1/models                                        -> {profiles[]}
//   POST /v1/score        reserved, answered with 501
//
// Bodies are compact JSON with keys in lexicographic order (nlohmann's
// default object ordering), so identical requests are identical bytes.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lexsum/error.hpp"
#include "lexsum/tokens.hpp"

namespace lexsum {

enum class Role { extractive, abstractive };
enum class Architecture { encoder, encoder_decoder, decoder_only };
enum class PromptTemplate { plain, llama3_instruct };

inline std::string_view to_string(Role r) {
  return r == Role::extractive ? "extractive" : "abstractive";
}

inline std::string_view to_string(Architecture a) {
  switch (a) {
    case Architecture::encoder: return "encoder";
    case Architecture::encoder_decoder: return "encoder-decoder";
    case Architecture::decoder_only: return "decoder-only";
  }
  return "encoder";
}

inline std::string_view to_string(PromptTemplate t) {
  return t == PromptTemplate::plain ? "plain" : "llama3-instruct";
}

inline Role parse_role(std::string_view s) {
  if (s == "extractive") return Role::extractive;
  if (s == "abstractive") return Role::abstractive;
  throw ConfigError("unknown model role \"" + std::string(s) + "\"");
}

inline Architecture parse_architecture(std::string_view s) {
  if (s == "encoder") return Architecture::encoder;
  if (s == "encoder-decoder") return Architecture::encoder_decoder;
  if (s == "decoder-only" || s == "decoder") return Architecture::decoder_only;
  throw ConfigError("unknown architecture \"" + std::string(s) + "\"");
}

inline PromptTemplate parse_prompt_template(std::string_view s) {
  if (s == "plain") return PromptTemplate::plain;
  if (s == "llama3-instruct") return PromptTemplate::llama3_instruct;
  throw ConfigError("unknown prompt template \"" + std::string(s) + "\"");
}

inline constexpr std::int64_t kDefaultReservedGenerationTokens = 1500;
inline constexpr int kDefaultMaxNewTokens = 1500;

struct ModelProfile {
  std::string model_id;
  Role role = Role::extractive;
  std::int64_t context_length = 512;
  Architecture architecture = Architecture::encoder;
  std::string tokenizer_id;
  std::int64_t reserved_generation_tokens = kDefaultReservedGenerationTokens;
  PromptTemplate prompt_template = PromptTemplate::plain;
  // Declared by the serving side; informational.
  std::string pooling;

  bool operator==(const ModelProfile&) const = default;

  const std::string& tokenizer() const {
    return tokenizer_id.empty() ? model_id : tokenizer_id;
  }
};

/// Input tokens the model accepts. Decoder-only models share one window
/// between prompt and generation, so the reserved generation length comes
/// off the top.
inline std::int64_t input_budget(const ModelProfile& p) {
  if (p.architecture == Architecture::decoder_only)
    return p.context_length - p.reserved_generation_tokens;
  return p.context_length;
}

inline nlohmann::json to_json(const ModelProfile& p) {
  nlohmann::json j{{"model_id", p.model_id},
                   {"role", std::string(to_string(p.role))},
                   {"context_length", p.context_length},
                   {"architecture", std::string(to_string(p.architecture))},
                   {"tokenizer_id", p.tokenizer()}};
  if (p.architecture == Architecture::decoder_only) {
    j["reserved_generation_tokens"] = p.reserved_generation_tokens;
    j["prompt_template"] = std::string(to_string(p.prompt_template));
  }
  if (!p.pooling.empty()) j["pooling"] = p.pooling;
  return j;
}

inline ModelProfile profile_from_json(const nlohmann::json& j) {
  ModelProfile p;
  p.model_id = j.at("model_id").get<std::string>();
  p.role = parse_role(j.at("role").get<std::string>());
  p.context_length = j.at("context_length").get<std::int64_t>();
  p.architecture = parse_architecture(j.at("architecture").get<std::string>());
  p.tokenizer_id = j.value("tokenizer_id", p.model_id);
  p.reserved_generation_tokens =
      j.value("reserved_generation_tokens", kDefaultReservedGenerationTokens);
  p.prompt_template =
      parse_prompt_template(j.value("prompt_template", std::string("plain")));
  p.pooling = j.value("pooling", std::string());
  if (p.context_length < 1) throw ConfigError("context_length must be >= 1");
  return p;
}

struct GenerationRequest {
  std::string model_id;
  std::string input_text;
  int max_new_tokens = kDefaultMaxNewTokens;
  PromptTemplate prompt_template = PromptTemplate::plain;
};

struct GenerationResult {
  std::string text;
  // The backend produced nothing; kept rather than treated as an error.
  bool empty = false;
};

inline constexpr std::string_view kLlama3Instruction = "Summarise the following text.";
inline constexpr std::string_view kTextMarker = "### Text:";
inline constexpr std::string_view kSummaryMarker = "### Summary:";

inline std::string apply_prompt_template(PromptTemplate t, std::string_view input) {
  if (t == PromptTemplate::plain) return std::string(input);
  std::string out;
  out.reserve(input.size() + 64);
  out.append(kLlama3Instruction).push_back('\n');
  out.append(kTextMarker).push_back('\n');
  out.append(input).push_back('\n');
  out.append(kSummaryMarker).push_back('\n');
  return out;
}

/// Text after the last "### Summary:" marker, leading whitespace removed.
/// Output without the marker is returned unchanged.
inline std::string strip_to_summary(std::string_view output) {
  const auto pos = output.rfind(kSummaryMarker);
  if (pos == std::string_view::npos) return std::string(output);
  std::string_view rest = output.substr(pos + kSummaryMarker.size());
  while (!rest.empty() && (rest.front() == '\n' || rest.front() == ' ' ||
                           rest.front() == '\r' || rest.front() == '\t'))
    rest.remove_prefix(1);
  return std::string(rest);
}

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::vector<std::vector<double>> embed(
      std::string_view model_id, std::span<const std::string> texts) = 0;
};

/// Raw completion: the prompt is sent as-is.
class Generator {
 public:
  virtual ~Generator() = default;
  virtual std::string complete(std::string_view model_id, std::string_view prompt,
                               int max_new_tokens) = 0;
};

/// One service that counts, embeds, generates and lists its models.
class ModelBackend : public TokenCounter, public Embedder, public Generator {
 public:
  virtual std::vector<ModelProfile> models() = 0;
};

/// Applies the request's prompt template, completes, and strips the
/// template's scaffolding from the output.
inline GenerationResult generate(Generator& gen, const GenerationRequest& req) {
  if (req.max_new_tokens < 1) throw Error("max_new_tokens must be >= 1");
  const std::string prompt = apply_prompt_template(req.prompt_template, req.input_text);
  std::string raw = gen.complete(req.model_id, prompt, req.max_new_tokens);
  GenerationResult r;
  r.text = req.prompt_template == PromptTemplate::llama3_instruct
               ? strip_to_summary(raw)
               : std::move(raw);
  r.empty = r.text.find_first_not_of(" \t\r\n") == std::string::npos;
  return r;
}

/// Enforces the context window before generating: decoder-only models need
/// room for input plus max_new_tokens, encoder-decoder models for the input.
inline GenerationResult checked_generate(Generator& gen, TokenCounter& tokens,
                                         const ModelProfile& profile,
                                         const GenerationRequest& req) {
  const std::int64_t in = count_tokens(req.input_text, profile.tokenizer(), tokens);
  const std::int64_t need =
      profile.architecture == Architecture::decoder_only ? in + req.max_new_tokens : in;
  if (need > profile.context_length)
    throw ContextOverflowError("input of " + std::to_string(in) +
                                   " tokens does not fit the context of " +
                                   profile.model_id,
                               need, profile.context_length);
  return generate(gen, req);
}

namespace wire {

inline nlohmann::json embed_request(std::string_view model,
                                    std::span<const std::string> texts) {
  return {{"model", model}, {"texts", std::vector<std::string>(texts.begin(), texts.end())}};
}

inline nlohmann::json embed_response(const std::vector<std::vector<double>>& vectors) {
  const std::size_t dim = vectors.empty() ? 0 : vectors.front().size();
  return {{"vectors", vectors}, {"dim", dim}};
}

inline nlohmann::json generate_request(std::string_view model, std::string_view prompt,
                                       int max_new_tokens) {
  return {{"model", model}, {"prompt", prompt}, {"max_new_tokens", max_new_tokens}};
}

inline nlohmann::json generate_response(std::string_view text) { return {{"text", text}}; }

inline nlohmann::json count_request(std::string_view model, std::string_view text) {
  return {{"model", model}, {"text", text}};
}

inline nlohmann::json count_response(std::int64_t count) { return {{"count", count}}; }

inline nlohmann::json models_response(const std::vector<ModelProfile>& profiles) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : profiles) arr.push_back(to_json(p));
  return {{"profiles", arr}};
}

inline nlohmann::json error_body(std::string_view message,
                                 const std::vector<std::string>& models = {}) {
  nlohmann::json j{{"error", message}};
  if (!models.empty()) j["models"] = models;
  return j;
}

// Response parsers validate types strictly: a number sent as a string is a
// protocol error, not something to coerce.

inline std::vector<std::vector<double>> parse_embed_response(const nlohmann::json& j,
                                                             std::size_t expected) {
  if (!j.is_object() || !j.contains("vectors") || !j["vectors"].is_array())
    throw BackendError(BackendError::Kind::protocol, "embed response lacks vectors[]");
  std::vector<std::vector<double>> out;
  for (const auto& row : j["vectors"]) {
    if (!row.is_array())
      throw BackendError(BackendError::Kind::protocol, "embed vector is not an array");
    std::vector<double> v;
    v.reserve(row.size());
    for (const auto& x : row) {
      if (!x.is_number())
        throw BackendError(BackendError::Kind::protocol,
                           "embed component is not a number");
      v.push_back(x.get<double>());
    }
    if (!out.empty() && v.size() != out.front().size())
      throw BackendError(BackendError::Kind::protocol, "embed vectors differ in dimension");
    out.push_back(std::move(v));
  }
  if (out.size() != expected)
    throw BackendError(BackendError::Kind::protocol,
                       "embed returned " + std::to_string(out.size()) +
                           " vectors for " + std::to_string(expected) + " texts");
  if (j.contains("dim")) {
    if (!j["dim"].is_number_integer())
      throw BackendError(BackendError::Kind::protocol, "embed dim is not an integer");
    const auto dim = j["dim"].get<std::size_t>();
    for (const auto& v : out)
      if (v.size() != dim)
        throw BackendError(BackendError::Kind::protocol, "embed vector dimension mismatch");
  }
  return out;
}

inline std::string parse_generate_response(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("text") || !j["text"].is_string())
    throw BackendError(BackendError::Kind::protocol, "generate response lacks text");
  return j["text"].get<std::string>();
}

inline std::int64_t parse_count_response(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("count") || !j["count"].is_number_integer())
    throw BackendError(BackendError::Kind::protocol, "count response lacks integer count");
  return j["count"].get<std::int64_t>();
}

inline std::vector<ModelProfile> parse_models_response(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("profiles") || !j["profiles"].is_array())
    throw BackendError(BackendError::Kind::protocol, "models response lacks profiles[]");
  std::vector<ModelProfile> out;
  for (const auto& p : j["profiles"]) out.push_back(profile_from_json(p));
  return out;
}

}  // namespace wire

}  // namespace lexsum
