#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace browseragent {

/// One loop iteration: what the model saw and said, and what was executed.
struct StepRecord {
  std::string prompt; // user message content
  std::string model_output;
  std::string observation_before;
  std::optional<std::string> action;     // canonical rendering
  std::optional<std::string> conclusion;
  std::optional<std::string> error;      // environment or parse error
  bool operator==(const StepRecord &) const = default;
};

/// Full episode record.
struct Trajectory {
  std::string trace_id;
  std::string sample_id;
  std::string question;
  std::vector<StepRecord> steps;
  std::vector<std::string> memory;          // conclusions, in order
  std::vector<std::string> history_actions; // executed actions, in order
  std::optional<std::string> final_answer;
  std::size_t num_steps = 0;
  bool failed = false;
  std::optional<std::string> error;
  bool operator==(const Trajectory &) const = default;
};

nlohmann::json to_json(const Trajectory &t);

/// Throws Error(SchemaError) on missing or mistyped fields, or when
/// num_steps disagrees with the recorded steps.
Trajectory trajectory_from_json(const nlohmann::json &j);

/// JSONL, one trajectory per line. Returns the number written.
/// Throws Error(IOError).
std::size_t write_trajectories(const std::vector<Trajectory> &ts,
                               const std::filesystem::path &path);

/// Throws Error(IOError) or Error(SchemaError) naming the line number.
std::vector<Trajectory> read_trajectories(const std::filesystem::path &path);

} // namespace browseragent
