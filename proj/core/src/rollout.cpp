#include "browseragent/rollout.hpp"

#include "browseragent/action.hpp"
#include "browseragent/errors.hpp"
#include "browseragent/prompts.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <random>
#include <thread>

namespace browseragent {

namespace {

void append_section(std::string &out, std::string_view label,
                    const std::vector<std::string> &entries) {
  out += label;
  out += ":\n";
  if (entries.empty()) {
    out += "(none)";
    return;
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i > 0) out += '\n';
    out += entries[i];
  }
}

std::string_view trim_trailing_newlines(std::string_view s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

} // namespace

RolloutConfig::RolloutConfig() : system_prompt(default_system_prompt()) {}

void RolloutConfig::validate() const {
  if (max_steps < 1) throw Error(ErrorCode::ConfigError, "max_steps must be >= 1");
  if (parallelism < 1) throw Error(ErrorCode::ConfigError, "parallelism must be >= 1");
}

StepResponse InProcessEndpoint::step(const std::string &trace_id, const std::string &action) {
  try {
    return table_->step(trace_id, action);
  } catch (const Error &e) {
    throw Error(ErrorCode::ServerError, e.what());
  }
}

HttpEndpoint::HttpEndpoint(std::string base_url) : base_url_(std::move(base_url)) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

StepResponse HttpEndpoint::step(const std::string &trace_id, const std::string &action) {
  httplib::Client cli(base_url_);
  cli.set_read_timeout(std::chrono::seconds(60));
  const nlohmann::json body{{"trace_id", trace_id}, {"action", action}};
  auto res = cli.Post("/step", body.dump(), "application/json");
  if (!res) {
    throw Error(ErrorCode::ServerError, "POST /step failed: " + httplib::to_string(res.error()));
  }
  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::ServerError, std::string("malformed /step reply: ") + e.what());
  }
  if (res->status != 200) {
    throw Error(ErrorCode::ServerError, "HTTP " + std::to_string(res->status) + ": " +
                                            reply.value("error", std::string("unknown")));
  }
  StepResponse r;
  r.observation = reply.value("observation", std::string());
  r.terminated = reply.value("terminated", false);
  if (reply.contains("error") && reply["error"].is_string()) r.error = reply["error"].get<std::string>();
  return r;
}

std::optional<std::size_t> HttpEndpoint::capacity() {
  httplib::Client cli(base_url_);
  auto res = cli.Get("/health");
  if (!res || res->status != 200) return std::nullopt;
  try {
    return nlohmann::json::parse(res->body).at("capacity").get<std::size_t>();
  } catch (const nlohmann::json::exception &) {
    return std::nullopt;
  }
}

std::string render_user_message(std::string_view question, std::string_view observation,
                                const std::vector<std::string> &history,
                                const std::vector<std::string> &memory) {
  std::string out = "OBJECTIVE:\n";
  out += question;
  out += "\n\nOBSERVATION:\n";
  out += trim_trailing_newlines(observation);
  out += "\n\n";
  append_section(out, "PREVIOUS ACTIONS", history);
  out += "\n\n";
  append_section(out, "INFORMATION ALREADY FOUND", memory);
  return out;
}

std::vector<ChatMessage> assemble_prompt(std::string_view system, std::string_view question,
                                         std::string_view observation,
                                         const std::vector<std::string> &history,
                                         const std::vector<std::string> &memory) {
  return {{"system", std::string(system)},
          {"user", render_user_message(question, observation, history, memory)}};
}

std::string make_trace_id(std::optional<std::uint64_t> seed, std::size_t index) {
  std::uint64_t hi = 0;
  std::uint64_t lo = 0;
  if (seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(*seed), static_cast<std::uint32_t>(*seed >> 32),
                      static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(static_cast<std::uint64_t>(index) >> 32)};
    std::mt19937_64 rng(seq);
    hi = rng();
    lo = rng();
  } else {
    std::random_device rd;
    hi = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    lo = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(32, '0');
  for (int i = 0; i < 16; ++i) {
    out[15 - i] = kHex[(hi >> (4 * i)) & 0xF];
    out[31 - i] = kHex[(lo >> (4 * i)) & 0xF];
  }
  return out;
}

Trajectory run_episode(const EpisodeRequest &request, const RolloutConfig &config,
                       LLMClient &client, SessionEndpoint &server, const std::string &trace_id) {
  config.validate();
  Trajectory t;
  t.trace_id = trace_id;
  t.sample_id = request.sample_id;
  t.question = request.question;

  auto finish = [&t] {
    t.num_steps = t.steps.size();
    return t;
  };

  std::string observation;
  try {
    observation = server.step(trace_id, "").observation;
  } catch (const Error &e) {
    t.failed = true;
    t.error = e.what();
    return finish();
  }

  for (std::size_t s = 0; s < config.max_steps; ++s) {
    StepRecord record;
    const auto messages = assemble_prompt(config.system_prompt, request.question, observation,
                                          t.history_actions, t.memory);
    record.prompt = messages.back().content;
    record.observation_before = observation;

    std::string output;
    try {
      output = client.complete(messages, {request.question, s, request.candidate});
    } catch (const std::exception &e) {
      t.failed = true;
      t.error = e.what();
      return finish();
    }
    auto turn = parse_model_output(output);
    record.model_output = std::move(output);
    if (turn.conclusion) {
      t.memory.push_back(*turn.conclusion);
      record.conclusion = turn.conclusion;
    }
    std::string to_send;
    if (turn.action) {
      to_send = render_action(*turn.action);
      t.history_actions.push_back(to_send);
      record.action = to_send;
    } else if (turn.fence_body) {
      // Unparsable fence: send an empty action.
      record.error = turn.diagnostics.empty() ? std::string("ParseError") : turn.diagnostics.back();
    }
    t.steps.push_back(std::move(record));

    if (turn.action && is_stop(*turn.action)) {
      t.final_answer = std::get<Stop>(*turn.action).answer;
      try {
        server.step(trace_id, to_send);
      } catch (const Error &) {
      }
      return finish();
    }

    try {
      auto reply = server.step(trace_id, to_send);
      if (reply.error) t.steps.back().error = reply.error;
      observation = std::move(reply.observation);
    } catch (const Error &e) {
      t.failed = true;
      t.error = e.what();
      return finish();
    }
  }
  return finish();
}

Trajectory run_episode(std::string_view question, const RolloutConfig &config, LLMClient &client,
                       SessionEndpoint &server) {
  return run_episode(EpisodeRequest{std::string(question), {}, 0}, config, client, server,
                     make_trace_id(config.seed, 0));
}

BatchResult run_batch(const std::vector<EpisodeRequest> &requests, const RolloutConfig &config,
                      LLMClient &client, SessionEndpoint &server) {
  config.validate();
  if (const auto cap = server.capacity(); cap && config.parallelism > *cap) {
    throw Error(ErrorCode::ConfigError, "parallelism " + std::to_string(config.parallelism) +
                                            " exceeds server capacity " + std::to_string(*cap));
  }
  BatchResult result;
  result.trajectories.resize(requests.size());
  std::atomic<std::size_t> next{0};

  const auto started = std::chrono::steady_clock::now();
  auto worker = [&] {
    for (auto i = next.fetch_add(1); i < requests.size(); i = next.fetch_add(1)) {
      const auto trace_id = make_trace_id(config.seed, i);
      try {
        result.trajectories[i] = run_episode(requests[i], config, client, server, trace_id);
      } catch (const std::exception &e) {
        Trajectory t;
        t.trace_id = trace_id;
        t.sample_id = requests[i].sample_id;
        t.question = requests[i].question;
        t.failed = true;
        t.error = e.what();
        result.trajectories[i] = std::move(t);
      }
    }
  };
  const auto workers = std::min(config.parallelism, requests.size());
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto &th : pool) th.join();
  const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started);

  auto &stats = result.stats;
  stats.episodes = requests.size();
  stats.seconds = elapsed.count();
  for (const auto &t : result.trajectories) {
    if (t.failed) ++stats.failed;
    if (t.final_answer) ++stats.answered;
  }
  stats.episodes_per_minute =
      stats.seconds > 0.0 ? 60.0 * static_cast<double>(stats.episodes) / stats.seconds : 0.0;
  return result;
}

} // namespace browseragent
