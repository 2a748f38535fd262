#pragma once

#include <string>
#include <string_view>

namespace browseragent {

/// Default agent system prompt (action set, output format and rules).
std::string_view default_system_prompt();

/// Correctness-judge prompt with three `{}` slots: question, ground truth,
/// answer.
std::string_view judge_prompt_template();

/// Fills the judge template slots in order.
std::string fill_judge_prompt(std::string_view question, std::string_view gold,
                              std::string_view answer);

} // namespace browseragent
