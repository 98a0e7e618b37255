#pragma once

// Serves any ModelBackend over the /v1 wire protocol. Used to exercise
// HttpBackend end to end and as a stand-in service for local runs.

#include <atomic>
#include <memory>
#include <stdexcept>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "lexsum/backend.hpp"

namespace lexsum {

class ProtocolServer {
 public:
  explicit ProtocolServer(ModelBackend& backend) : backend_(backend) { routes(); }

  ProtocolServer(const ProtocolServer&) = delete;
  ProtocolServer& operator=(const ProtocolServer&) = delete;

  ~ProtocolServer() { stop(); }

  /// Binds and serves on a background thread. Port 0 picks a free port.
  int start(const std::string& host = "127.0.0.1", int port = 0) {
    port_ = port == 0 ? server_.bind_to_any_port(host) : (server_.bind_to_port(host, port) ? port : -1);
    if (port_ < 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
    host_ = host;
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return port_;
  }

  /// Serves on the calling thread until stop().
  void listen(const std::string& host, int port) {
    host_ = host;
    port_ = port;
    if (!server_.listen(host, port)) throw Error("cannot listen on " + host + ":" + std::to_string(port));
  }

  void stop() {
    if (server_.is_running()) server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  std::string url() const { return "http://" + host_ + ":" + std::to_string(port_); }

  /// The next `n` requests are answered with `status` before reaching the
  /// backend.
  void inject_failures(int n, int status = 503) {
    injected_status_ = status;
    injected_ = n;
  }

  int requests_seen() const { return seen_.load(); }

  /// Requests must then carry "Authorization: Bearer <token>"; others get 401.
  void require_token(std::string token) { token_ = std::move(token); }

 private:
  template <typename Fn>
  void handle(const httplib::Request& req, httplib::Response& res, Fn&& fn) {
    ++seen_;
    if (!token_.empty() && req.get_header_value("Authorization") != "Bearer " + token_) {
      reply(res, 401, wire::error_body("missing or invalid bearer token"));
      return;
    }
    if (injected_.load() > 0) {
      --injected_;
      reply(res, injected_status_, wire::error_body("injected failure"));
      return;
    }
    try {
      nlohmann::json body;
      if (req.method == "POST") {
        body = nlohmann::json::parse(req.body, nullptr, false);
        if (body.is_discarded() || !body.is_object()) {
          reply(res, 422, wire::error_body("malformed JSON body"));
          return;
        }
      }
      reply(res, 200, fn(body));
    } catch (const BackendError& e) {
      if (e.kind() == BackendError::Kind::unknown_model)
        reply(res, 404, wire::error_body(e.what(), e.available_models()));
      else
        reply(res, 500, wire::error_body(e.what()));
    } catch (const nlohmann::json::exception& e) {
      reply(res, 422, wire::error_body(e.what()));
    } catch (const std::exception& e) {
      reply(res, 422, wire::error_body(e.what()));
    }
  }

  static void reply(httplib::Response& res, int status, const nlohmann::json& j) {
    res.status = status;
    res.set_content(j.dump(), "application/json");
  }

  static std::string str(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_string())
      throw std::invalid_argument(std::string("field \"") + key + "\" must be a string");
    return j[key].get<std::string>();
  }

  void routes() {
    server_.Get("/v1/models", [this](const httplib::Request& q, httplib::Response& r) {
      handle(q, r, [&](const nlohmann::json&) { return wire::models_response(backend_.models()); });
    });
    server_.Post("/v1/count_tokens", [this](const httplib::Request& q, httplib::Response& r) {
      handle(q, r, [&](const nlohmann::json& b) {
        return wire::count_response(backend_.count_tokens(str(b, "model"), str(b, "text")));
      });
    });
    server_.Post("/v1/embed", [this](const httplib::Request& q, httplib::Response& r) {
      handle(q, r, [&](const nlohmann::json& b) {
        const auto texts = b.at("texts").get<std::vector<std::string>>();
        return wire::embed_response(backend_.embed(str(b, "model"), texts));
      });
    });
    server_.Post("/v1/generate", [this](const httplib::Request& q, httplib::Response& r) {
      handle(q, r, [&](const nlohmann::json& b) {
        const int max_new = b.value("max_new_tokens", kDefaultMaxNewTokens);
        return wire::generate_response(backend_.complete(str(b, "model"), str(b, "prompt"), max_new));
      });
    });
    server_.Post("/v1/score", [](const httplib::Request&, httplib::Response& r) {
      reply(r, 501, wire::error_body("scoring is not implemented"));
    });
  }

  ModelBackend& backend_;
  httplib::Server server_;
  std::thread thread_;
  std::string host_ = "127.0.0.1";
  int port_ = -1;
  std::atomic<int> injected_{0};
  int injected_status_ = 503;
  std::atomic<int> seen_{0};
  std::string token_;
};

}  // namespace lexsum
