#pragma once

#include "browseragent/data_pipeline.hpp"
#include "browseragent/llm_client.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace browseragent {

inline constexpr std::size_t kJudgesPerItem = 3;

/// First alphabetic token equals "yes", ignoring case.
bool parse_verdict(std::string_view reply);

struct Judge {
  std::string id;
  std::shared_ptr<LLMClient> client;
};

struct JudgeVerdict {
  std::string judge_id;
  bool yes = false;
  std::string raw;
  std::optional<std::string> error; // set when the call failed
  bool operator==(const JudgeVerdict &) const = default;
};

struct JudgeOutcome {
  bool valid = false;
  std::vector<JudgeVerdict> verdicts;
};

/// Golden answers as they appear in the judge prompt's ground-truth slot.
std::string join_golds(const std::vector<std::string> &golds);

/// Asks all three judges concurrently; valid iff at least two say yes.
/// Failed calls count as no. Throws Error(ConfigError) unless exactly three
/// judges are given.
JudgeOutcome judge_item(std::string_view question, std::string_view gold, std::string_view answer,
                        const std::vector<Judge> &judges);

struct ItemResult {
  std::string id;
  std::string answer;
  bool em = false;
  std::optional<bool> valid; // present when judged
  std::vector<JudgeVerdict> verdicts;
};

struct EvalReport {
  std::string dataset;
  std::size_t n = 0;
  std::optional<double> em;        // null for an empty dataset
  std::optional<double> llm_judge; // null when unjudged or empty
  std::vector<ItemResult> per_item;
};

struct EvalOptions {
  std::size_t fan_out = 8; // items scored concurrently
};

/// Missing answers score as the empty string.
EvalReport evaluate(std::string dataset, const std::vector<QASample> &samples,
                    const std::map<std::string, std::string> &answers,
                    const std::vector<Judge> *judges = nullptr, EvalOptions options = {});

nlohmann::json to_json(const EvalReport &report);

/// Fixed-width table: one column per dataset plus Avg, rows EM and LLM-judge.
std::string format_table(const std::vector<EvalReport> &reports);

/// JSONL QA samples. Throws Error(IOError | SchemaError).
std::vector<QASample> load_benchmark(const std::filesystem::path &path);

/// JSONL lines with `id` + `answer`, or trajectory lines (`sample_id` +
/// `final_answer`). Throws Error(IOError | SchemaError).
std::map<std::string, std::string> load_answers(const std::filesystem::path &path);

/// `{"judges": [{"id", "endpoint", "model", ...} | {"id", "mock": reply}]}`.
/// Throws Error(IOError | ConfigError).
std::vector<Judge> load_judges(const std::filesystem::path &path);

} // namespace browseragent
