#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "planverify/chat.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "planverify/errors.hpp"
#include "planverify/log.hpp"

namespace pv {

using json = nlohmann::json;

namespace {

json messages_json(const std::vector<ChatMessage>& messages) {
  json arr = json::array();
  for (const auto& m : messages) arr.push_back({{"role", m.role}, {"content", m.content}});
  return arr;
}

std::string iso_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string chat_cache_key(const ChatRequest& request) {
  json j{{"model", request.model},
         {"messages", messages_json(request.messages)},
         {"temperature", request.temperature}};
  return sha256_hex(j.dump());
}

std::string request_hash(const ChatRequest& request) {
  json j{{"endpoint", request.endpoint},
         {"model", request.model},
         {"messages", messages_json(request.messages)},
         {"temperature", request.temperature},
         {"max_tokens", request.max_tokens}};
  return sha256_hex(j.dump());
}

ChatCache::ChatCache(std::filesystem::path file) : file_(std::move(file)) {
  if (!std::filesystem::exists(file_)) return;
  std::ifstream in(file_);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json record = json::parse(line, nullptr, false);
    auto corrupt = [&](const std::string& why) {
      throw CacheCorrupt("cache record at " + file_.string() + ":" +
                         std::to_string(line_no) + " " + why);
    };
    if (record.is_discarded() || !record.is_object()) corrupt("is not a JSON object");
    for (const char* field : {"key", "model", "request_hash", "content", "timestamp"}) {
      if (!record.contains(field) || !record[field].is_string()) {
        corrupt(std::string("lacks string field '") + field + "'");
      }
    }
    if (!record.contains("usage") || !record["usage"].is_object()) corrupt("lacks usage object");
    Entry e;
    e.content = record["content"].get<std::string>();
    const auto& u = record["usage"];
    e.usage.prompt_tokens = u.value("prompt_tokens", 0L);
    e.usage.completion_tokens = u.value("completion_tokens", 0L);
    e.usage.total_tokens = u.value("total_tokens", 0L);
    entries_[record["key"].get<std::string>()] = std::move(e);
  }
}

std::optional<ChatResponse> ChatCache::lookup(const std::string& key) const {
  std::shared_lock lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  ChatResponse resp;
  resp.content = it->second.content;
  resp.usage = it->second.usage;
  resp.cached = true;
  return resp;
}

void ChatCache::append(const std::string& key, const ChatRequest& request,
                       const ChatResponse& response) {
  std::unique_lock lock(mutex_);
  json record{{"key", key},
              {"model", request.model},
              {"request_hash", request_hash(request)},
              {"content", response.content},
              {"usage",
               {{"prompt_tokens", response.usage.prompt_tokens},
                {"completion_tokens", response.usage.completion_tokens},
                {"total_tokens", response.usage.total_tokens}}},
              {"timestamp", iso_timestamp()}};
  if (!file_.parent_path().empty()) std::filesystem::create_directories(file_.parent_path());
  std::ofstream out(file_, std::ios::app);
  out << record.dump() << '\n';
  out.flush();
  entries_[key] = Entry{response.content, response.usage};
}

std::size_t ChatCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

ChatResponse chat_complete(const ChatRequest& request, ChatTransport& transport,
                           ChatCache* cache, const RetryPolicy& retry) {
  std::string key;
  if (cache) {
    key = chat_cache_key(request);
    if (auto hit = cache->lookup(key)) return *hit;
  }
  int attempt = 0;
  double backoff_ms = retry.backoff_base_ms;
  while (true) {
    try {
      ChatResponse resp = transport.send(request);
      resp.retries = attempt;
      if (cache) cache->append(key, request, resp);
      return resp;
    } catch (const AuthError&) {
      throw;
    } catch (const TransportError& e) {
      if (!e.retryable() || attempt >= retry.max_retries) throw;
      ++attempt;
      log::warn("transient transport failure (attempt " + std::to_string(attempt) +
                "): " + e.what());
      if (backoff_ms > 0) {
        std::this_thread::sleep_for(
            std::chrono::milliseconds(static_cast<long>(backoff_ms)));
      }
      backoff_ms *= retry.backoff_factor;
    }
  }
}

HttpChatTransport::HttpChatTransport(std::string api_key, int timeout_seconds)
    : api_key_(std::move(api_key)), timeout_seconds_(timeout_seconds) {}

ChatResponse HttpChatTransport::send(const ChatRequest& request) {
  if (api_key_.empty()) {
    throw AuthError("no API key configured (set PV_LLM_API_KEY)");
  }
  // Split "scheme://host[:port]/path" into client base and request path.
  std::string endpoint = request.endpoint;
  std::size_t scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw TransportError("endpoint is not a URL: " + endpoint, false);
  }
  std::size_t path_start = endpoint.find('/', scheme_end + 3);
  std::string base = path_start == std::string::npos ? endpoint : endpoint.substr(0, path_start);
  std::string path =
      path_start == std::string::npos ? "/v1/chat/completions" : endpoint.substr(path_start);

  httplib::Client client(base);
  client.set_connection_timeout(timeout_seconds_);
  client.set_read_timeout(timeout_seconds_);
  client.set_bearer_token_auth(api_key_);

  json body{{"model", request.model},
            {"messages", messages_json(request.messages)},
            {"temperature", request.temperature},
            {"max_tokens", request.max_tokens}};

  auto started = std::chrono::steady_clock::now();
  auto result = client.Post(path, body.dump(), "application/json");
  auto elapsed = std::chrono::duration<double, std::milli>(
                     std::chrono::steady_clock::now() - started)
                     .count();

  if (!result) {
    throw TransportError("request failed: " + httplib::to_string(result.error()), true);
  }
  int status = result->status;
  if (status == 401 || status == 403) {
    throw AuthError("endpoint rejected credentials (HTTP " + std::to_string(status) + ")");
  }
  if (status == 408 || status == 429 || status >= 500) {
    throw TransportError("HTTP " + std::to_string(status), true);
  }
  if (status != 200) {
    throw TransportError("HTTP " + std::to_string(status) + ": " +
                             result->body.substr(0, 200),
                         false);
  }

  json reply = json::parse(result->body, nullptr, false);
  if (reply.is_discarded() || !reply.contains("choices") || reply["choices"].empty()) {
    throw TransportError("response body is not a chat completion", false);
  }
  ChatResponse resp;
  resp.content = reply["choices"][0]["message"]["content"].get<std::string>();
  if (reply.contains("usage") && reply["usage"].is_object()) {
    const auto& u = reply["usage"];
    resp.usage.prompt_tokens = u.value("prompt_tokens", 0L);
    resp.usage.completion_tokens = u.value("completion_tokens", 0L);
    resp.usage.total_tokens = u.value("total_tokens", 0L);
  }
  resp.latency_ms = elapsed;
  return resp;
}

}  // namespace pv
