#pragma once

// Client side of the /v1 wire protocol.

#include <chrono>
#include <cstdlib>
#include <semaphore>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "lexsum/backend.hpp"
#include "lexsum/error.hpp"

namespace lexsum {

struct HttpBackendOptions {
  std::string base_url = "http://127.0.0.1:8080";
  std::string auth_token;
  std::chrono::milliseconds connect_timeout{5000};
  std::chrono::milliseconds read_timeout{600000};
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{200};
  int max_in_flight = 4;
};

inline constexpr const char* kBaseUrlEnv = "LEXSUM_BACKEND_URL";
inline constexpr const char* kAuthTokenEnv = "LEXSUM_AUTH_TOKEN";

/// Environment variables take precedence over configured values.
inline void apply_env_overrides(HttpBackendOptions& opts) {
  if (const char* url = std::getenv(kBaseUrlEnv); url && *url) opts.base_url = url;
  if (const char* tok = std::getenv(kAuthTokenEnv); tok && *tok) opts.auth_token = tok;
}

class HttpBackend final : public ModelBackend {
 public:
  explicit HttpBackend(HttpBackendOptions opts)
      : opts_(std::move(opts)), in_flight_(std::max(1, opts_.max_in_flight)) {}

  std::int64_t count_tokens(std::string_view tokenizer_id, std::string_view text) override {
    if (text.empty()) return 0;
    auto body = wire::count_request(tokenizer_id, text);
    return wire::parse_count_response(post("/v1/count_tokens", body, true));
  }

  std::vector<std::vector<double>> embed(std::string_view model_id,
                                         std::span<const std::string> texts) override {
    if (texts.empty()) throw Error("embed: empty text list");
    auto body = wire::embed_request(model_id, texts);
    return wire::parse_embed_response(post("/v1/embed", body, true), texts.size());
  }

  std::string complete(std::string_view model_id, std::string_view prompt,
                       int max_new_tokens) override {
    auto body = wire::generate_request(model_id, prompt, max_new_tokens);
    return wire::parse_generate_response(post("/v1/generate", body, false));
  }

  std::vector<ModelProfile> models() override {
    return wire::parse_models_response(request("GET", "/v1/models", nullptr, true));
  }

  const HttpBackendOptions& options() const { return opts_; }

 private:
  nlohmann::json post(const char* path, const nlohmann::json& body, bool idempotent) {
    return request("POST", path, &body, idempotent);
  }

  // Transport failures (no response at all) are retried for every endpoint,
  // since nothing reached the caller yet. A 503 is retried only for
  // idempotent calls.
  nlohmann::json request(const char* method, const char* path,
                         const nlohmann::json* body, bool idempotent) {
    const std::string payload = body ? body->dump() : std::string();
    std::string last_error;
    auto backoff = opts_.initial_backoff;
    for (int attempt = 1; attempt <= opts_.max_attempts; ++attempt) {
      if (attempt > 1) {
        std::this_thread::sleep_for(backoff);
        backoff *= 2;
      }
      httplib::Result res = send(method, path, payload);
      if (!res) {
        last_error = httplib::to_string(res.error());
        continue;
      }
      if (res->status == 503 && idempotent) {
        last_error = "503 Service Unavailable";
        continue;
      }
      return decode(*res, path);
    }
    throw BackendError(BackendError::Kind::transport,
                       std::string(method) + " " + path + " failed after " +
                           std::to_string(opts_.max_attempts) + " attempts: " + last_error);
  }

  httplib::Result send(const char* method, const char* path, const std::string& payload) {
    in_flight_.acquire();
    struct Release {
      std::counting_semaphore<>& s;
      ~Release() { s.release(); }
    } release{in_flight_};
    httplib::Client cli(opts_.base_url);
    cli.set_connection_timeout(opts_.connect_timeout);
    cli.set_read_timeout(opts_.read_timeout);
    if (!opts_.auth_token.empty()) cli.set_bearer_token_auth(opts_.auth_token);
    if (std::string_view(method) == "GET") return cli.Get(path);
    return cli.Post(path, payload, "application/json");
  }

  static nlohmann::json decode(const httplib::Response& res, const char* path) {
    nlohmann::json j = nlohmann::json::parse(res.body, nullptr, false);
    if (res.status == 200) {
      if (j.is_discarded())
        throw BackendError(BackendError::Kind::protocol,
                           std::string(path) + ": response is not JSON");
      return j;
    }
    std::string message = std::string(path) + ": HTTP " + std::to_string(res.status);
    std::vector<std::string> models;
    if (!j.is_discarded() && j.is_object()) {
      if (j.contains("error") && j["error"].is_string())
        message += ": " + j["error"].get<std::string>();
      if (j.contains("models") && j["models"].is_array())
        for (const auto& m : j["models"])
          if (m.is_string()) models.push_back(m.get<std::string>());
    }
    if (res.status == 404)
      throw BackendError(BackendError::Kind::unknown_model, message, std::move(models));
    if (res.status == 422 || res.status == 400)
      throw BackendError(BackendError::Kind::protocol, message);
    throw BackendError(BackendError::Kind::server, message);
  }

  HttpBackendOptions opts_;
  std::counting_semaphore<> in_flight_;
};

}  // namespace lexsum
