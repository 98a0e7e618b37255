#pragma once

#include <cstdint>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>

namespace lexsum {

/// Counts tokens of `text` under the tokenizer named `tokenizer_id`.
/// Implementations must be safe to call concurrently.
class TokenCounter {
 public:
  virtual ~TokenCounter() = default;
  virtual std::int64_t count_tokens(std::string_view tokenizer_id,
                                    std::string_view text) = 0;
};

/// Memoizing decorator. Lookups take a shared lock; a miss computes outside
/// any lock and publishes with try_emplace, so the first published value
/// wins and every later reader sees it (linearizable get-or-compute).
class CachedTokenCounter final : public TokenCounter {
 public:
  explicit CachedTokenCounter(TokenCounter& inner) : inner_(inner) {}

  std::int64_t count_tokens(std::string_view tokenizer_id,
                            std::string_view text) override {
    if (text.empty()) return 0;
    std::string key;
    key.reserve(tokenizer_id.size() + 1 + text.size());
    key.append(tokenizer_id).push_back('\0');
    key.append(text);
    {
      std::shared_lock lock(mu_);
      if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    const std::int64_t n = inner_.count_tokens(tokenizer_id, text);
    std::unique_lock lock(mu_);
    return cache_.try_emplace(std::move(key), n).first->second;
  }

  std::size_t size() const {
    std::shared_lock lock(mu_);
    return cache_.size();
  }

 private:
  TokenCounter& inner_;
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, std::int64_t> cache_;
};

/// Empty text is zero tokens under every tokenizer.
inline std::int64_t count_tokens(std::string_view text,
                                 std::string_view tokenizer_id,
                                 TokenCounter& backend) {
  if (text.empty()) return 0;
  return backend.count_tokens(tokenizer_id, text);
}

}  // namespace lexsum
