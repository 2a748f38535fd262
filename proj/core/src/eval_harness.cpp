#include "browseragent/eval_harness.hpp"

#include "browseragent/errors.hpp"
#include "browseragent/prompts.hpp"

#include <atomic>
#include <cctype>
#include <fstream>
#include <future>
#include <iomanip>
#include <sstream>
#include <thread>

namespace browseragent {

bool parse_verdict(std::string_view reply) {
  std::size_t i = 0;
  while (i < reply.size() && !std::isalpha(static_cast<unsigned char>(reply[i]))) ++i;
  std::string token;
  while (i < reply.size() && std::isalpha(static_cast<unsigned char>(reply[i]))) {
    token += static_cast<char>(std::tolower(static_cast<unsigned char>(reply[i])));
    ++i;
  }
  return token == "yes";
}

std::string join_golds(const std::vector<std::string> &golds) {
  std::string out;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    if (i > 0) out += "; ";
    out += golds[i];
  }
  return out;
}

JudgeOutcome judge_item(std::string_view question, std::string_view gold, std::string_view answer,
                        const std::vector<Judge> &judges) {
  if (judges.size() != kJudgesPerItem) {
    throw Error(ErrorCode::ConfigError,
                "expected 3 judges, got " + std::to_string(judges.size()));
  }
  const std::vector<ChatMessage> messages{{"user", fill_judge_prompt(question, gold, answer)}};
  const TurnContext context{std::string(question), 0, 0};

  std::vector<std::future<JudgeVerdict>> pending;
  for (const auto &judge : judges) {
    pending.push_back(std::async(std::launch::async, [&judge, &messages, &context] {
      JudgeVerdict v;
      v.judge_id = judge.id;
      try {
        if (!judge.client) throw Error(ErrorCode::ConfigError, "judge has no client");
        v.raw = judge.client->complete(messages, context);
        v.yes = parse_verdict(v.raw);
      } catch (const std::exception &e) {
        v.error = e.what();
      }
      return v;
    }));
  }
  JudgeOutcome outcome;
  std::size_t yes = 0;
  for (auto &f : pending) {
    outcome.verdicts.push_back(f.get());
    if (outcome.verdicts.back().yes) ++yes;
  }
  outcome.valid = yes >= 2;
  return outcome;
}

EvalReport evaluate(std::string dataset, const std::vector<QASample> &samples,
                    const std::map<std::string, std::string> &answers,
                    const std::vector<Judge> *judges, EvalOptions options) {
  if (judges && judges->size() != kJudgesPerItem) {
    throw Error(ErrorCode::ConfigError,
                "expected 3 judges, got " + std::to_string(judges->size()));
  }
  EvalReport report;
  report.dataset = std::move(dataset);
  report.n = samples.size();
  report.per_item.resize(samples.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (auto i = next.fetch_add(1); i < samples.size(); i = next.fetch_add(1)) {
      const auto &s = samples[i];
      auto &item = report.per_item[i];
      item.id = s.id;
      if (const auto it = answers.find(s.id); it != answers.end()) item.answer = it->second;
      item.em = em_match(item.answer, s.golden_answers);
      if (judges) {
        auto outcome = judge_item(s.question, join_golds(s.golden_answers), item.answer, *judges);
        item.valid = outcome.valid;
        item.verdicts = std::move(outcome.verdicts);
      }
    }
  };
  const auto workers = std::min(std::max<std::size_t>(options.fan_out, 1), samples.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto &th : pool) th.join();

  if (report.n > 0) {
    std::size_t em = 0;
    std::size_t valid = 0;
    for (const auto &item : report.per_item) {
      em += item.em;
      valid += item.valid.value_or(false);
    }
    report.em = static_cast<double>(em) / static_cast<double>(report.n);
    if (judges) report.llm_judge = static_cast<double>(valid) / static_cast<double>(report.n);
  }
  return report;
}

nlohmann::json to_json(const EvalReport &report) {
  auto opt = [](const std::optional<double> &v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  nlohmann::json items = nlohmann::json::array();
  for (const auto &item : report.per_item) {
    nlohmann::json verdicts = nlohmann::json::array();
    for (const auto &v : item.verdicts) {
      verdicts.push_back({{"judge_id", v.judge_id},
                          {"verdict", v.yes ? "yes" : "no"},
                          {"raw", v.raw},
                          {"error", v.error ? nlohmann::json(*v.error) : nlohmann::json(nullptr)}});
    }
    items.push_back({{"id", item.id},
                     {"answer", item.answer},
                     {"em", item.em},
                     {"valid", item.valid ? nlohmann::json(*item.valid) : nlohmann::json(nullptr)},
                     {"verdicts", verdicts}});
  }
  return {{"dataset", report.dataset},
          {"n", report.n},
          {"em", opt(report.em)},
          {"llm_judge", opt(report.llm_judge)},
          {"per_item", items}};
}

namespace {

std::string cell(const std::optional<double> &v) {
  if (!v) return "-";
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << *v;
  return os.str();
}

std::optional<double> average(const std::vector<std::optional<double>> &values) {
  double sum = 0.0;
  for (const auto &v : values) {
    if (!v) return std::nullopt;
    sum += *v;
  }
  if (values.empty()) return std::nullopt;
  return sum / static_cast<double>(values.size());
}

} // namespace

std::string format_table(const std::vector<EvalReport> &reports) {
  std::vector<std::string> header{"Metric"};
  for (const auto &r : reports) header.push_back(r.dataset);
  header.push_back("Avg");

  std::vector<std::vector<std::string>> rows;
  for (int metric = 0; metric < 2; ++metric) {
    std::vector<std::string> row{metric == 0 ? "EM" : "LLM-judge"};
    std::vector<std::optional<double>> values;
    for (const auto &r : reports) values.push_back(metric == 0 ? r.em : r.llm_judge);
    for (const auto &v : values) row.push_back(cell(v));
    row.push_back(cell(average(values)));
    rows.push_back(std::move(row));
  }

  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto &row : rows) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream os;
  auto emit = [&](const std::vector<std::string> &row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) os << "  ";
      if (c == 0) {
        os << std::left << std::setw(static_cast<int>(width[c])) << row[c];
      } else {
        os << std::right << std::setw(static_cast<int>(width[c])) << row[c];
      }
    }
    os << '\n';
  };
  emit(header);
  std::size_t total = 0;
  for (auto w : width) total += w;
  os << std::string(total + 2 * (width.size() - 1), '-') << '\n';
  for (const auto &row : rows) emit(row);
  return os.str();
}

std::vector<QASample> load_benchmark(const std::filesystem::path &path) {
  return read_qa_samples(path);
}

std::map<std::string, std::string> load_answers(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IOError, "cannot open " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (j.contains("answer")) {
        const auto &a = j.at("answer");
        out[j.at("id").get<std::string>()] = a.is_null() ? "" : a.get<std::string>();
      } else {
        const auto &a = j.at("final_answer");
        out[j.at("sample_id").get<std::string>()] = a.is_null() ? "" : a.get<std::string>();
      }
    } catch (const nlohmann::json::exception &e) {
      throw Error(ErrorCode::SchemaError,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<Judge> load_judges(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IOError, "cannot open " + path.string());
  std::vector<Judge> judges;
  try {
    const auto cfg = nlohmann::json::parse(in);
    for (const auto &j : cfg.at("judges")) {
      Judge judge;
      judge.id = j.at("id").get<std::string>();
      if (j.contains("mock")) {
        const auto reply = j.at("mock").get<std::string>();
        judge.client = std::make_shared<FunctionClient>(
            [reply](const std::vector<ChatMessage> &, const TurnContext &) { return reply; });
      } else {
        HttpClientConfig http;
        http.endpoint = j.at("endpoint").get<std::string>();
        http.model = j.value("model", std::string());
        http.path = j.value("path", http.path);
        http.temperature = j.value("temperature", 0.0);
        http.api_key = j.value("api_key", std::string());
        http.timeout = std::chrono::seconds(j.value("timeout_secs", 120));
        judge.client = std::make_shared<HttpChatClient>(std::move(http));
      }
      judges.push_back(std::move(judge));
    }
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
  if (judges.size() != kJudgesPerItem) {
    throw Error(ErrorCode::ConfigError,
                path.string() + ": expected 3 judges, got " + std::to_string(judges.size()));
  }
  return judges;
}

} // namespace browseragent
