#include "browseragent/llm_client.hpp"

#include "browseragent/errors.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <thread>

namespace browseragent {

HttpChatClient::HttpChatClient(HttpClientConfig config) : config_(std::move(config)) {
  if (config_.endpoint.empty()) throw Error(ErrorCode::ConfigError, "LLM endpoint is empty");
  if (config_.max_attempts < 1) throw Error(ErrorCode::ConfigError, "max_attempts must be >= 1");
}

std::string HttpChatClient::complete(const std::vector<ChatMessage> &messages,
                                     const TurnContext &) {
  nlohmann::json body;
  body["model"] = config_.model;
  body["temperature"] = config_.temperature;
  if (config_.max_tokens) body["max_tokens"] = *config_.max_tokens;
  body["messages"] = nlohmann::json::array();
  for (const auto &m : messages) {
    body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  }
  const auto payload = body.dump();

  std::string last_error;
  auto backoff = config_.initial_backoff;
  for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    try {
      httplib::Client cli(config_.endpoint);
      cli.set_connection_timeout(config_.timeout);
      cli.set_read_timeout(config_.timeout);
      cli.set_write_timeout(config_.timeout);
      httplib::Headers headers;
      if (!config_.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + config_.api_key);
      }
      auto res = cli.Post(config_.path, headers, payload, "application/json");
      if (!res) {
        last_error = "transport error: " + httplib::to_string(res.error());
      } else if (res->status != 200) {
        last_error = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200);
      } else {
        const auto reply = nlohmann::json::parse(res->body);
        const auto &content = reply.at("choices").at(0).at("message").at("content");
        if (content.is_string()) return content.get<std::string>();
        last_error = "completion content is not a string";
      }
    } catch (const std::exception &e) {
      last_error = e.what();
    }
    if (attempt < config_.max_attempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw Error(ErrorCode::LLMError, "giving up after " + std::to_string(config_.max_attempts) +
                                       " attempt(s): " + last_error);
}

ScriptedClient ScriptedClient::from_jsonl(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IOError, "cannot open " + path.string());
  ScriptedClient client;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      client.add(j.at("question").get<std::string>(), j.at("step").get<std::size_t>(),
                 j.at("output").get<std::string>());
    } catch (const nlohmann::json::exception &e) {
      throw Error(ErrorCode::SchemaError,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return client;
}

void ScriptedClient::add(std::string question, std::size_t step, std::string output) {
  if (std::find(questions_.begin(), questions_.end(), question) == questions_.end()) {
    questions_.push_back(question);
  }
  outputs_[{std::move(question), step}] = std::move(output);
}

std::string ScriptedClient::complete(const std::vector<ChatMessage> &,
                                     const TurnContext &context) {
  const auto it = outputs_.find({context.question, context.step});
  if (it == outputs_.end()) {
    throw Error(ErrorCode::LLMError, "no scripted output for step " +
                                         std::to_string(context.step) + " of '" +
                                         context.question + "'");
  }
  return it->second;
}

} // namespace browseragent
