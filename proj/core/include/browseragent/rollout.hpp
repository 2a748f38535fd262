#pragma once

#include "browseragent/llm_client.hpp"
#include "browseragent/session_server.hpp"
#include "browseragent/trajectory.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace browseragent {

/// Step budgets used for basic data collection, the mid ablation point, and
/// challenging data / evaluation.
inline constexpr std::size_t kStepsBasic = 6;
inline constexpr std::size_t kStepsMedium = 15;
inline constexpr std::size_t kStepsChallenging = 30;

struct RolloutConfig {
  std::size_t max_steps = kStepsChallenging;
  std::string system_prompt;
  std::size_t parallelism = 1;
  /// When set, trace ids are derived from (seed, episode index); otherwise
  /// they are random.
  std::optional<std::uint64_t> seed;

  RolloutConfig();
  /// Throws Error(ConfigError).
  void validate() const;
};

/// Transport to the environment's step contract.
class SessionEndpoint {
public:
  virtual ~SessionEndpoint() = default;
  /// Throws Error(ServerError) when the step cannot be delivered.
  virtual StepResponse step(const std::string &trace_id, const std::string &action) = 0;
  /// Maximum concurrent sessions, when known.
  virtual std::optional<std::size_t> capacity() { return std::nullopt; }
};

/// Calls a SessionTable directly.
class InProcessEndpoint : public SessionEndpoint {
public:
  explicit InProcessEndpoint(std::shared_ptr<SessionTable> table) : table_(std::move(table)) {}
  StepResponse step(const std::string &trace_id, const std::string &action) override;
  std::optional<std::size_t> capacity() override { return table_->config().capacity; }

private:
  std::shared_ptr<SessionTable> table_;
};

/// Talks to `serve-env` over HTTP.
class HttpEndpoint : public SessionEndpoint {
public:
  explicit HttpEndpoint(std::string base_url);
  StepResponse step(const std::string &trace_id, const std::string &action) override;
  std::optional<std::size_t> capacity() override;

private:
  std::string base_url_;
};

/// Byte-exact user message: labeled OBJECTIVE / OBSERVATION / PREVIOUS
/// ACTIONS / INFORMATION ALREADY FOUND sections, `(none)` for empty lists.
std::string render_user_message(std::string_view question, std::string_view observation,
                                const std::vector<std::string> &history,
                                const std::vector<std::string> &memory);

std::vector<ChatMessage> assemble_prompt(std::string_view system, std::string_view question,
                                         std::string_view observation,
                                         const std::vector<std::string> &history,
                                         const std::vector<std::string> &memory);

/// 32 lowercase hex digits.
std::string make_trace_id(std::optional<std::uint64_t> seed, std::size_t index);

struct EpisodeRequest {
  std::string question;
  std::string sample_id;
  std::size_t candidate = 0;
};

/// Runs one think / conclude / act loop until stop or the step budget.
Trajectory run_episode(const EpisodeRequest &request, const RolloutConfig &config,
                       LLMClient &client, SessionEndpoint &server, const std::string &trace_id);

/// Convenience overload with a fresh random trace id.
Trajectory run_episode(std::string_view question, const RolloutConfig &config, LLMClient &client,
                       SessionEndpoint &server);

struct BatchStats {
  std::size_t episodes = 0;
  std::size_t failed = 0;
  std::size_t answered = 0;
  double seconds = 0.0;
  double episodes_per_minute = 0.0;
};

struct BatchResult {
  std::vector<Trajectory> trajectories; // same order as the requests
  BatchStats stats;
};

/// Runs episodes with at most `config.parallelism` in flight.
/// Throws Error(ConfigError) when parallelism exceeds server capacity.
BatchResult run_batch(const std::vector<EpisodeRequest> &requests, const RolloutConfig &config,
                      LLMClient &client, SessionEndpoint &server);

} // namespace browseragent
