#include "browseragent/errors.hpp"
#include "browseragent/trajectory.hpp"

#include "generators.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>

using namespace browseragent;

namespace {

std::optional<std::string> maybe_text(testsupport::Rng &rng) {
  if (testsupport::pick(rng, 2) == 0) return std::nullopt;
  return testsupport::random_text(rng);
}

Trajectory random_trajectory(testsupport::Rng &rng) {
  Trajectory t;
  t.trace_id = testsupport::random_text(rng);
  t.sample_id = testsupport::random_text(rng);
  t.question = testsupport::random_text(rng) + "\n\xC3\xA9\t\"";
  const auto n = testsupport::pick(rng, 5);
  for (std::size_t i = 0; i < n; ++i) {
    t.steps.push_back({testsupport::random_text(rng, 80), testsupport::random_text(rng, 80),
                       testsupport::random_text(rng, 80), maybe_text(rng), maybe_text(rng),
                       maybe_text(rng)});
    if (t.steps.back().conclusion) t.memory.push_back(*t.steps.back().conclusion);
    if (t.steps.back().action) t.history_actions.push_back(*t.steps.back().action);
  }
  t.num_steps = n;
  t.final_answer = maybe_text(rng);
  t.failed = testsupport::pick(rng, 4) == 0;
  t.error = maybe_text(rng);
  return t;
}

std::filesystem::path temp_path(const std::string &name) {
  return std::filesystem::temp_directory_path() / ("browseragent_" + name);
}

ErrorCode read_error(const std::filesystem::path &p, std::string *message = nullptr) {
  try {
    read_trajectories(p);
  } catch (const Error &e) {
    if (message) *message = e.what();
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::ConfigError;
}

} // namespace

TEST_CASE("json round trip fuzz") {
  testsupport::Rng rng(17);
  for (int i = 0; i < 500; ++i) {
    const auto t = random_trajectory(rng);
    CHECK(trajectory_from_json(to_json(t)) == t);
    CHECK(trajectory_from_json(nlohmann::json::parse(to_json(t).dump())) == t);
  }
}

TEST_CASE("jsonl file round trip") {
  testsupport::Rng rng(2);
  std::vector<Trajectory> ts;
  for (int i = 0; i < 20; ++i) ts.push_back(random_trajectory(rng));
  const auto p = temp_path("traj.jsonl");
  CHECK(write_trajectories(ts, p) == 20);
  CHECK(read_trajectories(p) == ts);
  std::filesystem::remove(p);
}

TEST_CASE("schema errors") {
  Trajectory t;
  t.trace_id = "x";
  t.question = "q";
  auto j = to_json(t);
  j["num_steps"] = 2;
  CHECK_THROWS_AS(trajectory_from_json(j), Error);
  j = to_json(t);
  j.erase("question");
  CHECK_THROWS_AS(trajectory_from_json(j), Error);
  j = to_json(t);
  j["steps"] = "nope";
  CHECK_THROWS_AS(trajectory_from_json(j), Error);
}

TEST_CASE("read errors name the line") {
  const auto p = temp_path("bad.jsonl");
  {
    Trajectory t;
    t.trace_id = "x";
    t.question = "q";
    std::ofstream out(p);
    out << to_json(t).dump() << "\n\n{not json\n";
  }
  std::string message;
  CHECK(read_error(p, &message) == ErrorCode::SchemaError);
  CHECK(message.find("3") != std::string::npos);
  std::filesystem::remove(p);
  CHECK(read_error(temp_path("missing.jsonl")) == ErrorCode::IOError);
}

TEST_CASE("case study fixture parses") {
  const auto ts = read_trajectories(testsupport::fixture("case_study_trajectories.jsonl"));
  REQUIRE(ts.size() == 2);
  CHECK(ts[0].final_answer == "King Edward IV");
  CHECK(ts[1].history_actions.size() == 3);
}
