#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace pv {

struct ChatMessage {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;
};

struct ChatRequest {
  std::string endpoint;
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;  // default 0 for reproducibility
  int max_tokens = 1024;
};

struct TokenUsage {
  long prompt_tokens = 0;
  long completion_tokens = 0;
  long total_tokens = 0;
};

struct ChatResponse {
  std::string content;
  TokenUsage usage;
  double latency_ms = 0.0;
  int retries = 0;    // failed attempts before this response
  bool cached = false;
};

class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual ChatResponse send(const ChatRequest& request) = 0;
  virtual std::string name() const { return "transport"; }
};

struct RetryPolicy {
  int max_retries = 3;
  int backoff_base_ms = 250;
  double backoff_factor = 2.0;
};

/// Cache key: sha256 over (model label, full message list, temperature).
std::string chat_cache_key(const ChatRequest& request);
/// sha256 over the complete request, endpoint and limits included.
std::string request_hash(const ChatRequest& request);
std::string sha256_hex(std::string_view data);

/// Append-only response cache: one JSON record per line,
/// {key, model, request_hash, content, usage, timestamp}. Records are
/// validated on load; any malformed or mistyped record raises CacheCorrupt.
/// Readers may run concurrently; appends are serialized.
class ChatCache {
 public:
  explicit ChatCache(std::filesystem::path file);

  std::optional<ChatResponse> lookup(const std::string& key) const;
  void append(const std::string& key, const ChatRequest& request,
              const ChatResponse& response);
  std::size_t size() const;
  const std::filesystem::path& path() const { return file_; }

 private:
  struct Entry {
    std::string content;
    TokenUsage usage;
  };

  std::filesystem::path file_;
  std::map<std::string, Entry> entries_;
  mutable std::shared_mutex mutex_;
};

/// Cache-first completion. On a miss, sends with bounded retries and
/// exponential backoff for transient failures and rate-limit signals, then
/// appends the response to the cache. AuthError is never retried.
ChatResponse chat_complete(const ChatRequest& request, ChatTransport& transport,
                           ChatCache* cache = nullptr, const RetryPolicy& retry = {});

/// OpenAI-style chat-completions client over HTTP(S) with a bearer token.
class HttpChatTransport : public ChatTransport {
 public:
  explicit HttpChatTransport(std::string api_key, int timeout_seconds = 120);
  ChatResponse send(const ChatRequest& request) override;
  std::string name() const override { return "http"; }

 private:
  std::string api_key_;
  int timeout_seconds_;
};

}  // namespace pv
