#include "browseragent/session_server.hpp"

#include "browseragent/action.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <condition_variable>
#include <thread>
#include <vector>

namespace browseragent {

namespace {

std::int64_t to_ns(SteadyTime t) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(t.time_since_epoch()).count();
}

bool blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

} // namespace

void ServerConfig::validate() const {
  if (capacity < 1) throw Error(ErrorCode::ConfigError, "capacity must be >= 1");
  if (session_ttl.count() <= 0) throw Error(ErrorCode::ConfigError, "session ttl must be > 0");
  if (viewport_height < 1) throw Error(ErrorCode::ConfigError, "viewport height must be >= 1");
}

SessionTable::SessionTable(std::shared_ptr<const Corpus> corpus, ServerConfig config,
                           ClockFn clock)
    : corpus_(std::move(corpus)), config_(std::move(config)), clock_(std::move(clock)) {
  config_.validate();
}

void SessionTable::touch(Entry &entry) { entry.last_touch_ns.store(to_ns(clock_())); }

void SessionTable::retire(const std::string &trace_id) {
  std::lock_guard lock(mutex_);
  entries_.erase(trace_id);
  if (finished_.insert(trace_id).second) {
    finished_order_.push_back(trace_id);
    if (finished_order_.size() > kFinishedIdMemory) {
      finished_.erase(finished_order_.front());
      finished_order_.pop_front();
    }
  }
}

StepResponse SessionTable::step(const std::string &trace_id, std::string_view action_text) {
  std::shared_ptr<Entry> entry;
  std::unique_lock<std::mutex> entry_lock;
  {
    std::lock_guard lock(mutex_);
    if (finished_.contains(trace_id)) {
      throw Error(ErrorCode::SessionTerminated, "trace_id " + trace_id + " already stopped");
    }
    auto it = entries_.find(trace_id);
    if (it == entries_.end()) {
      if (entries_.size() >= config_.capacity) {
        throw Error(ErrorCode::CapacityExceeded,
                    "session table full (" + std::to_string(config_.capacity) + ")");
      }
      entry = std::make_shared<Entry>();
      entry_lock = std::unique_lock(entry->mutex);
      entries_.emplace(trace_id, entry);
    } else {
      entry = it->second;
    }
  }
  if (!entry_lock.owns_lock()) entry_lock = std::unique_lock(entry->mutex);

  if (entry->finished) {
    throw Error(ErrorCode::SessionTerminated, "trace_id " + trace_id + " already stopped");
  }
  if (!entry->session) {
    try {
      entry->session = std::make_unique<Session>(corpus_, trace_id,
                                                 EnvConfig{config_.viewport_height});
    } catch (...) {
      std::lock_guard lock(mutex_);
      entries_.erase(trace_id);
      throw;
    }
  }
  touch(*entry);

  auto &session = *entry->session;
  StepResponse response;
  if (blank(action_text)) {
    response.observation = session.observe();
    return response;
  }
  try {
    const auto action = parse_action(action_text);
    response.observation = session.execute(action).observation;
  } catch (const ActionParseError &e) {
    response.error = std::string("ParseError: ") + e.what();
    response.observation = session.observe();
  } catch (const Error &e) {
    if (e.code() == ErrorCode::SessionTerminated) throw;
    response.error = e.what();
    response.observation = session.observe();
  }
  if (session.terminated()) {
    response.terminated = true;
    entry->finished = true;
    retire(trace_id);
  }
  return response;
}

std::size_t SessionTable::reap_stale() {
  const auto now = to_ns(clock_());
  const auto ttl_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(config_.session_ttl).count();
  std::lock_guard lock(mutex_);
  std::size_t removed = 0;
  for (auto it = entries_.begin(); it != entries_.end();) {
    if (now - it->second->last_touch_ns.load() > ttl_ns) {
      it = entries_.erase(it);
      ++removed;
    } else {
      ++it;
    }
  }
  return removed;
}

Health SessionTable::health() const {
  std::lock_guard lock(mutex_);
  return {entries_.size(), config_.capacity};
}

struct SessionServer::Impl {
  std::shared_ptr<SessionTable> table;
  httplib::Server http;
  std::thread reaper;
  std::mutex reaper_mutex;
  std::condition_variable reaper_cv;
  bool stopping = false;
};

namespace {

nlohmann::json to_json(const StepResponse &r) {
  nlohmann::json j;
  j["observation"] = r.observation;
  j["terminated"] = r.terminated;
  j["error"] = r.error ? nlohmann::json(*r.error) : nlohmann::json(nullptr);
  return j;
}

void reply(httplib::Response &res, int status, const StepResponse &r) {
  res.status = status;
  res.set_content(to_json(r).dump(), "application/json");
}

} // namespace

SessionServer::SessionServer(std::shared_ptr<SessionTable> table) : impl_(std::make_unique<Impl>()) {
  impl_->table = std::move(table);
  const auto workers = std::max<std::size_t>(8, impl_->table->config().capacity + 4);
  impl_->http.new_task_queue = [workers] { return new httplib::ThreadPool(workers); };

  auto *impl = impl_.get();
  impl->http.Post("/step", [impl](const httplib::Request &req, httplib::Response &res) {
    nlohmann::json body;
    try {
      body = nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::exception &e) {
      reply(res, 400, {"", false, std::string("BadRequest: ") + e.what()});
      return;
    }
    if (!body.is_object() || !body.contains("trace_id") || !body["trace_id"].is_string()) {
      reply(res, 400, {"", false, "BadRequest: trace_id (string) is required"});
      return;
    }
    std::string action;
    if (body.contains("action") && !body["action"].is_null()) {
      if (!body["action"].is_string()) {
        reply(res, 400, {"", false, "BadRequest: action must be a string"});
        return;
      }
      action = body["action"].get<std::string>();
    }
    try {
      reply(res, 200, impl->table->step(body["trace_id"].get<std::string>(), action));
    } catch (const Error &e) {
      if (e.code() == ErrorCode::CapacityExceeded) {
        reply(res, 429, {"", false, e.what()});
      } else if (e.code() == ErrorCode::SessionTerminated) {
        reply(res, 409, {std::string(kTerminalObservation), true, e.what()});
      } else {
        reply(res, 500, {"", false, e.what()});
      }
    } catch (const std::exception &e) {
      reply(res, 500, {"", false, std::string("ServerError: ") + e.what()});
    }
  });
  impl->http.Get("/health", [impl](const httplib::Request &, httplib::Response &res) {
    const auto h = impl->table->health();
    nlohmann::json j{{"active_sessions", h.active_sessions}, {"capacity", h.capacity}};
    res.set_content(j.dump(), "application/json");
  });
}

SessionServer::~SessionServer() { stop(); }

int SessionServer::bind(const std::string &host, int port) {
  if (port == 0) return impl_->http.bind_to_any_port(host);
  return impl_->http.bind_to_port(host, port) ? port : -1;
}

void SessionServer::serve() {
  auto *impl = impl_.get();
  const auto ttl = impl->table->config().session_ttl;
  const auto period = std::min<std::chrono::milliseconds>(
      std::chrono::duration_cast<std::chrono::milliseconds>(ttl) / 4, std::chrono::seconds(5));
  impl->reaper = std::thread([impl, period] {
    std::unique_lock lock(impl->reaper_mutex);
    while (!impl->stopping) {
      impl->reaper_cv.wait_for(lock, std::max(period, std::chrono::milliseconds(10)));
      if (!impl->stopping) impl->table->reap_stale();
    }
  });
  impl->http.listen_after_bind();
}

void SessionServer::wait_until_ready() { impl_->http.wait_until_ready(); }

void SessionServer::stop() {
  if (!impl_) return;
  {
    std::lock_guard lock(impl_->reaper_mutex);
    impl_->stopping = true;
  }
  impl_->reaper_cv.notify_all();
  impl_->http.stop();
  if (impl_->reaper.joinable()) impl_->reaper.join();
}

} // namespace browseragent
