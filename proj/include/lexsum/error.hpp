#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace lexsum {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent corpus input. `line` is 1-based, 0 when the
// failure is not tied to a line of a JSONL file.
class CorpusError : public Error {
 public:
  CorpusError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class BackendError : public Error {
 public:
  enum class Kind { transport, unknown_model, protocol, server };

  BackendError(Kind kind, const std::string& what,
               std::vector<std::string> available_models = {})
      : Error(what), kind_(kind), models_(std::move(available_models)) {}

  Kind kind() const noexcept { return kind_; }
  // Populated for unknown_model: the model ids the server does know.
  const std::vector<std::string>& available_models() const noexcept {
    return models_;
  }

 private:
  Kind kind_;
  std::vector<std::string> models_;
};

// Input would not fit the model's context window. Raised before any request
// is issued; text is never silently truncated at the client.
class ContextOverflowError : public Error {
 public:
  ContextOverflowError(const std::string& what, long long tokens,
                       long long limit)
      : Error(what), tokens_(tokens), limit_(limit) {}

  long long tokens() const noexcept { return tokens_; }
  long long limit() const noexcept { return limit_; }

 private:
  long long tokens_;
  long long limit_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace lexsum
