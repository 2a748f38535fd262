#include "browseragent/errors.hpp"
#include "browseragent/rollout.hpp"

#include "support.hpp"

#include <doctest.h>

#include <mutex>
#include <thread>

using namespace browseragent;

namespace {

std::shared_ptr<SessionTable> table_for(std::shared_ptr<const Corpus> corpus, std::size_t cap = 64) {
  ServerConfig cfg;
  cfg.capacity = cap;
  return std::make_shared<SessionTable>(std::move(corpus), cfg);
}

std::string fenced(const std::string &action, const std::string &conclusion = {}) {
  std::string out = "<think>\nstep\n</think>\n";
  if (!conclusion.empty()) out += "<conclusion>\n" + conclusion + "\n</conclusion>\n";
  return out + "```\n" + action + "\n```";
}

// Records every server call.
class RecordingEndpoint : public SessionEndpoint {
public:
  explicit RecordingEndpoint(std::shared_ptr<SessionTable> t) : inner_(std::move(t)) {}
  StepResponse step(const std::string &trace_id, const std::string &action) override {
    sent.push_back(action);
    return inner_.step(trace_id, action);
  }
  std::optional<std::size_t> capacity() override { return inner_.capacity(); }
  std::vector<std::string> sent;

private:
  InProcessEndpoint inner_;
};

} // namespace

TEST_CASE("user message template") {
  CHECK(render_user_message("Q?", "obs line\n", {}, {}) ==
        "OBJECTIVE:\nQ?\n\nOBSERVATION:\nobs line\n\nPREVIOUS ACTIONS:\n(none)\n\n"
        "INFORMATION ALREADY FOUND:\n(none)");
  CHECK(render_user_message("Q?", "o", {"type [331] [x] [1]", "go_back"}, {"fact one"}) ==
        "OBJECTIVE:\nQ?\n\nOBSERVATION:\no\n\nPREVIOUS ACTIONS:\ntype [331] [x] [1]\ngo_back\n\n"
        "INFORMATION ALREADY FOUND:\nfact one");
  const auto msgs = assemble_prompt("SYS", "Q", "o", {}, {});
  REQUIRE(msgs.size() == 2);
  CHECK(msgs[0] == ChatMessage{"system", "SYS"});
  CHECK(msgs[1].role == "user");
}

TEST_CASE("trace ids") {
  const auto a = make_trace_id(7, 0);
  CHECK(a.size() == 32);
  CHECK(a.find_first_not_of("0123456789abcdef") == std::string::npos);
  CHECK(make_trace_id(7, 0) == a);
  CHECK(make_trace_id(7, 1) != a);
  CHECK(make_trace_id(8, 0) != a);
  CHECK(make_trace_id(std::nullopt, 0) != make_trace_id(std::nullopt, 0));
}

TEST_CASE("config validation") {
  RolloutConfig cfg;
  CHECK(cfg.max_steps == kStepsChallenging);
  CHECK_FALSE(cfg.system_prompt.empty());
  CHECK_NOTHROW(cfg.validate());
  cfg.parallelism = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.parallelism = 1;
  cfg.max_steps = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("step budget exhaustion") {
  auto table = table_for(testsupport::toy_corpus());
  InProcessEndpoint ep(table);
  FunctionClient client([](auto &, auto &) { return fenced("scroll [down]"); });
  RolloutConfig cfg;
  cfg.max_steps = 1;
  const auto t = run_episode("q", cfg, client, ep);
  CHECK(t.num_steps == 1);
  CHECK_FALSE(t.final_answer);
  CHECK_FALSE(t.failed);
  CHECK(t.history_actions == std::vector<std::string>{"scroll [down]"});
}

TEST_CASE("unparsable turn sends an empty action, then stop is delivered") {
  auto table = table_for(testsupport::toy_corpus());
  RecordingEndpoint ep(table);
  FunctionClient client([](const std::vector<ChatMessage> &, const TurnContext &ctx) {
    if (ctx.step == 0) return std::string("<think>no fence here</think>");
    if (ctx.step == 1) return fenced("jump [3]");
    return fenced("stop [done]", "found it");
  });
  RolloutConfig cfg;
  const auto t = run_episode(EpisodeRequest{"q", "id1", 0}, cfg, client, ep, make_trace_id(1, 0));
  CHECK(t.num_steps == 3);
  CHECK(t.final_answer == "done");
  CHECK(t.memory == std::vector<std::string>{"found it"});
  CHECK(t.history_actions == std::vector<std::string>{"stop [done]"});
  CHECK(ep.sent == std::vector<std::string>{"", "", "", "stop [done]"});
  CHECK_FALSE(t.steps[0].action);
  CHECK(t.steps[1].error);
  CHECK(t.sample_id == "id1");
  CHECK(table->health().active_sessions == 0);
}

TEST_CASE("prompts carry history and memory") {
  auto table = table_for(testsupport::toy_corpus());
  InProcessEndpoint ep(table);
  std::vector<std::string> prompts;
  std::mutex m;
  FunctionClient client([&](const std::vector<ChatMessage> &msgs, const TurnContext &ctx) {
    std::lock_guard lock(m);
    prompts.push_back(msgs.back().content);
    if (ctx.step == 0) return fenced("scroll [down]", "first");
    return fenced("stop [x]");
  });
  const auto t = run_episode("Q", RolloutConfig{}, client, ep);
  REQUIRE(prompts.size() == 2);
  CHECK(prompts[0].find("PREVIOUS ACTIONS:\n(none)") != std::string::npos);
  CHECK(prompts[1].find("PREVIOUS ACTIONS:\nscroll [down]\n\n") != std::string::npos);
  CHECK(prompts[1].find("INFORMATION ALREADY FOUND:\nfirst") != std::string::npos);
  CHECK(t.steps[1].prompt == prompts[1]);
}

TEST_CASE("client failure marks the trajectory failed") {
  auto table = table_for(testsupport::toy_corpus());
  InProcessEndpoint ep(table);
  FunctionClient client([](auto &, auto &) -> std::string { throw Error(ErrorCode::LLMError, "down"); });
  const auto t = run_episode("q", RolloutConfig{}, client, ep);
  CHECK(t.failed);
  REQUIRE(t.error);
  CHECK(t.error->find("LLMError") != std::string::npos);
}

TEST_CASE("batch results do not depend on parallelism") {
  const auto corpus = testsupport::toy_corpus();
  FunctionClient client([](const std::vector<ChatMessage> &, const TurnContext &ctx) {
    if (ctx.step < 3) return fenced(ctx.step % 2 ? "scroll [up]" : "scroll [down]", "n" + std::to_string(ctx.step));
    return fenced("stop [" + ctx.question + "]");
  });
  std::vector<EpisodeRequest> reqs;
  for (int i = 0; i < 40; ++i) reqs.push_back({"q" + std::to_string(i), "s" + std::to_string(i), 0});
  RolloutConfig cfg;
  cfg.seed = 42;
  cfg.parallelism = 1;
  auto t1 = table_for(corpus);
  InProcessEndpoint e1(t1);
  const auto serial = run_batch(reqs, cfg, client, e1);
  cfg.parallelism = 10;
  auto t2 = table_for(corpus);
  InProcessEndpoint e2(t2);
  const auto parallel = run_batch(reqs, cfg, client, e2);
  CHECK(serial.trajectories == parallel.trajectories);
  CHECK(parallel.stats.episodes == 40);
  CHECK(parallel.stats.answered == 40);
  CHECK(parallel.stats.failed == 0);
  CHECK(parallel.trajectories[5].final_answer == "q5");
}

TEST_CASE("parallelism above capacity is rejected") {
  auto table = table_for(testsupport::toy_corpus(), 4);
  InProcessEndpoint ep(table);
  FunctionClient client([](auto &, auto &) { return fenced("stop [x]"); });
  RolloutConfig cfg;
  cfg.parallelism = 5;
  CHECK_THROWS_AS(run_batch({{"q", "s", 0}}, cfg, client, ep), Error);
  cfg.parallelism = 4;
  CHECK(run_batch({{"q", "s", 0}}, cfg, client, ep).stats.answered == 1);
}

TEST_CASE("scripted client replays the golden episodes") {
  auto client = ScriptedClient::from_jsonl(testsupport::fixture("mock.jsonl"));
  REQUIRE(client.questions().size() == 2);
  auto table = table_for(testsupport::fixture_corpus());
  InProcessEndpoint ep(table);
  const auto t = run_episode(client.questions()[0], RolloutConfig{}, client, ep);
  CHECK(t.history_actions == std::vector<std::string>{"type [331] [Princes in the Tower] [1]",
                                                      "click [1459] [Princes in the Tower]",
                                                      "stop [King Edward IV]"});
  CHECK(t.final_answer == "King Edward IV");
  CHECK(t.memory.size() == 2);
  for (const auto &s : t.steps) CHECK_FALSE(s.error);
}

TEST_CASE("http endpoint against a live server") {
  auto table = table_for(testsupport::toy_corpus());
  SessionServer server(table);
  const int port = server.bind("127.0.0.1", 0);
  REQUIRE(port > 0);
  std::thread serving([&] { server.serve(); });
  server.wait_until_ready();
  HttpEndpoint ep("http://127.0.0.1:" + std::to_string(port));
  CHECK(ep.capacity() == 64);
  FunctionClient client([](auto &, const TurnContext &ctx) {
    return ctx.step == 0 ? fenced("scroll [down]") : fenced("stop [ok]");
  });
  const auto t = run_episode("q", RolloutConfig{}, client, ep);
  CHECK(t.final_answer == "ok");
  CHECK_FALSE(t.failed);
  server.stop();
  serving.join();

  HttpEndpoint dead("http://127.0.0.1:1");
  CHECK_THROWS_AS(dead.step("x", ""), Error);
}
