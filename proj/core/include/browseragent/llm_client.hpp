#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace browseragent {

struct ChatMessage {
  std::string role;
  std::string content;
  bool operator==(const ChatMessage &) const = default;
};

/// Where in a rollout a completion is requested. Live endpoints ignore it;
/// scripted clients key on it.
struct TurnContext {
  std::string question;
  std::size_t step = 0;
  std::size_t candidate = 0;
};

/// Chat-completion policy. Implementations must be safe to call from many
/// episodes at once. Failures surface as Error(LLMError).
class LLMClient {
public:
  virtual ~LLMClient() = default;
  virtual std::string complete(const std::vector<ChatMessage> &messages,
                               const TurnContext &context) = 0;
};

struct HttpClientConfig {
  /// Base url, e.g. `http://localhost:8001`; requests go to
  /// `<endpoint>/v1/chat/completions` unless `path` overrides it.
  std::string endpoint;
  std::string path = "/v1/chat/completions";
  std::string model;
  double temperature = 0.0;
  std::optional<int> max_tokens;
  std::chrono::seconds timeout{120};
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  std::string api_key;
};

/// OpenAI-style chat completions over HTTP(S) with exponential backoff.
class HttpChatClient : public LLMClient {
public:
  explicit HttpChatClient(HttpClientConfig config);
  std::string complete(const std::vector<ChatMessage> &messages,
                       const TurnContext &context) override;

private:
  HttpClientConfig config_;
};

/// Replays canned completions keyed by (question, step).
class ScriptedClient : public LLMClient {
public:
  ScriptedClient() = default;

  /// JSONL lines `{"question": str, "step": int, "output": str}`; steps are
  /// zero-based. Throws Error(IOError | SchemaError).
  static ScriptedClient from_jsonl(const std::filesystem::path &path);

  void add(std::string question, std::size_t step, std::string output);
  std::string complete(const std::vector<ChatMessage> &messages,
                       const TurnContext &context) override;

  /// Distinct questions in first-seen order.
  const std::vector<std::string> &questions() const { return questions_; }

private:
  std::map<std::pair<std::string, std::size_t>, std::string> outputs_;
  std::vector<std::string> questions_;
};

/// Adapts a callable; handy for generated policies and judges.
class FunctionClient : public LLMClient {
public:
  using Fn = std::function<std::string(const std::vector<ChatMessage> &, const TurnContext &)>;
  explicit FunctionClient(Fn fn) : fn_(std::move(fn)) {}
  std::string complete(const std::vector<ChatMessage> &messages,
                       const TurnContext &context) override {
    return fn_(messages, context);
  }

private:
  Fn fn_;
};

} // namespace browseragent
