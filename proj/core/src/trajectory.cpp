#include "browseragent/trajectory.hpp"

#include "browseragent/errors.hpp"

#include <fstream>

namespace browseragent {

namespace {

nlohmann::json opt(const std::optional<std::string> &v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<std::string> read_opt(const nlohmann::json &j, const char *key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::string>();
}

} // namespace

nlohmann::json to_json(const Trajectory &t) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto &s : t.steps) {
    steps.push_back({{"prompt", s.prompt},
                     {"model_output", s.model_output},
                     {"observation_before", s.observation_before},
                     {"action", opt(s.action)},
                     {"conclusion", opt(s.conclusion)},
                     {"error", opt(s.error)}});
  }
  return {{"trace_id", t.trace_id},
          {"sample_id", t.sample_id},
          {"question", t.question},
          {"steps", steps},
          {"memory", t.memory},
          {"history_actions", t.history_actions},
          {"final_answer", opt(t.final_answer)},
          {"num_steps", t.num_steps},
          {"failed", t.failed},
          {"error", opt(t.error)}};
}

Trajectory trajectory_from_json(const nlohmann::json &j) {
  try {
    Trajectory t;
    t.trace_id = j.at("trace_id").get<std::string>();
    t.sample_id = j.value("sample_id", std::string());
    t.question = j.at("question").get<std::string>();
    for (const auto &s : j.at("steps")) {
      StepRecord r;
      r.prompt = s.at("prompt").get<std::string>();
      r.model_output = s.at("model_output").get<std::string>();
      r.observation_before = s.at("observation_before").get<std::string>();
      r.action = read_opt(s, "action");
      r.conclusion = read_opt(s, "conclusion");
      r.error = read_opt(s, "error");
      t.steps.push_back(std::move(r));
    }
    t.memory = j.value("memory", std::vector<std::string>{});
    t.history_actions = j.value("history_actions", std::vector<std::string>{});
    t.final_answer = read_opt(j, "final_answer");
    t.num_steps = j.at("num_steps").get<std::size_t>();
    t.failed = j.value("failed", false);
    t.error = read_opt(j, "error");
    if (t.num_steps != t.steps.size()) {
      throw Error(ErrorCode::SchemaError, "num_steps " + std::to_string(t.num_steps) +
                                              " does not match " +
                                              std::to_string(t.steps.size()) + " steps");
    }
    return t;
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::SchemaError, e.what());
  }
}

std::size_t write_trajectories(const std::vector<Trajectory> &ts,
                               const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IOError, "cannot write " + path.string());
  for (const auto &t : ts) out << to_json(t).dump() << '\n';
  if (!out) throw Error(ErrorCode::IOError, "write failed for " + path.string());
  return ts.size();
}

std::vector<Trajectory> read_trajectories(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IOError, "cannot open " + path.string());
  std::vector<Trajectory> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(trajectory_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception &e) {
      throw Error(ErrorCode::SchemaError, "line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error &e) {
      throw Error(ErrorCode::SchemaError, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

} // namespace browseragent
