#pragma once

#include "browseragent/browser_env.hpp"
#include "browseragent/corpus.hpp"
#include "browseragent/errors.hpp"

#include <atomic>
#include <chrono>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

namespace browseragent {

using SteadyTime = std::chrono::steady_clock::time_point;
using ClockFn = std::function<SteadyTime()>;

struct ServerConfig {
  std::string bind_host = "127.0.0.1";
  int port = 8000;
  std::size_t capacity = 64;
  std::chrono::seconds session_ttl{300};
  std::size_t viewport_height = kDefaultViewportHeight;

  /// Throws Error(ConfigError) unless capacity >= 1 and ttl > 0.
  void validate() const;
};

/// Wire shape of one /step reply.
struct StepResponse {
  std::string observation;
  bool terminated = false;
  std::optional<std::string> error;
};

struct Health {
  std::size_t active_sessions = 0;
  std::size_t capacity = 0;
};

/// trace_id -> Session map. Sessions are created on first touch and removed
/// once a stop has been answered. Each session is stepped under its own lock;
/// the corpus is shared read-only.
class SessionTable {
public:
  SessionTable(std::shared_ptr<const Corpus> corpus, ServerConfig config,
               ClockFn clock = [] { return std::chrono::steady_clock::now(); });

  /// Empty action_text returns the current observation unchanged. Action
  /// parse and environment errors are reported in `error` and leave the
  /// episode alive. Throws Error(CapacityExceeded | SessionTerminated).
  StepResponse step(const std::string &trace_id, std::string_view action_text);

  /// Removes sessions idle longer than the ttl; returns how many.
  std::size_t reap_stale();

  Health health() const;
  const ServerConfig &config() const { return config_; }

private:
  struct Entry {
    std::mutex mutex;
    std::unique_ptr<Session> session;
    std::atomic<std::int64_t> last_touch_ns{0};
    bool finished = false;
  };

  void touch(Entry &entry);
  void retire(const std::string &trace_id);

  std::shared_ptr<const Corpus> corpus_;
  ServerConfig config_;
  ClockFn clock_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, std::shared_ptr<Entry>> entries_;
  // Recently finished ids, bounded FIFO.
  std::unordered_set<std::string> finished_;
  std::deque<std::string> finished_order_;
};

inline constexpr std::size_t kFinishedIdMemory = 65536;

/// HTTP front end: `POST /step`, `GET /health`.
class SessionServer {
public:
  explicit SessionServer(std::shared_ptr<SessionTable> table);
  ~SessionServer();
  SessionServer(const SessionServer &) = delete;
  SessionServer &operator=(const SessionServer &) = delete;

  /// Binds (port 0 picks a free port) and returns the bound port, or -1.
  int bind(const std::string &host, int port);
  /// Serves until stop(); also runs the stale-session reaper.
  void serve();
  /// Blocks until serve() is accepting connections.
  void wait_until_ready();
  void stop();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

} // namespace browseragent
