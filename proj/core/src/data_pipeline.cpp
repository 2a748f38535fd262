#include "browseragent/data_pipeline.hpp"

#include "browseragent/action.hpp"
#include "browseragent/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_map>

namespace browseragent {

namespace {

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) { return lower(x) == lower(y); });
}

// Unbiased draw in [0, n) by rejection.
std::size_t draw(std::mt19937_64 &rng, std::size_t n) {
  const std::uint64_t bound = n;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

template <typename T> void shuffle(std::vector<T> &v, std::mt19937_64 &rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[draw(rng, i)]);
}

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, std::mt19937_64 &rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + draw(rng, n - i)]);
  idx.resize(k);
  return idx;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

} // namespace

std::string_view to_string(QASource source) {
  switch (source) {
  case QASource::NQ: return "NQ";
  case QASource::HotpotQA: return "HotpotQA";
  case QASource::Other: return "other";
  }
  return "other";
}

QASource parse_source(std::string_view name) {
  if (iequals(name, "NQ")) return QASource::NQ;
  if (iequals(name, "HotpotQA")) return QASource::HotpotQA;
  if (iequals(name, "other")) return QASource::Other;
  throw Error(ErrorCode::SchemaError, "unknown source '" + std::string(name) + "'");
}

nlohmann::json to_json(const QASample &s) {
  return {{"id", s.id},
          {"question", s.question},
          {"golden_answers", s.golden_answers},
          {"source", to_string(s.source)}};
}

QASample qa_sample_from_json(const nlohmann::json &j) {
  if (!j.is_object()) throw Error(ErrorCode::SchemaError, "sample is not an object");
  QASample s;
  try {
    s.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
    s.question = j.at("question").get<std::string>();
    s.golden_answers = j.at("golden_answers").get<std::vector<std::string>>();
    if (j.contains("source")) s.source = parse_source(j.at("source").get<std::string>());
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::SchemaError, e.what());
  }
  if (s.golden_answers.empty()) throw Error(ErrorCode::SchemaError, "golden_answers is empty");
  return s;
}

std::vector<QASample> read_qa_samples(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IOError, "cannot open " + path.string());
  std::vector<QASample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      out.push_back(qa_sample_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception &e) {
      throw Error(ErrorCode::SchemaError,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const Error &e) {
      throw Error(ErrorCode::SchemaError,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::size_t write_qa_samples(const std::vector<QASample> &samples,
                             const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IOError, "cannot write " + path.string());
  for (const auto &s : samples) out << to_json(s).dump() << '\n';
  if (!out) throw Error(ErrorCode::IOError, "write failed: " + path.string());
  return samples.size();
}

std::string normalize_answer(std::string_view answer) {
  std::string cleaned;
  cleaned.reserve(answer.size());
  for (char c : answer) {
    if (std::ispunct(static_cast<unsigned char>(c))) continue;
    cleaned += lower(c);
  }
  std::istringstream words(cleaned);
  std::string word;
  std::string out;
  while (words >> word) {
    if (word == "a" || word == "an" || word == "the") continue;
    if (!out.empty()) out += ' ';
    out += word;
  }
  return out;
}

bool em_match(std::string_view pred, const std::vector<std::string> &golds) {
  const auto p = normalize_answer(pred);
  return std::any_of(golds.begin(), golds.end(),
                     [&](const std::string &g) { return normalize_answer(g) == p; });
}

std::optional<std::size_t> rft_select(const std::vector<bool> &correct,
                                      const std::vector<std::size_t> &steps) {
  if (correct.size() != steps.size()) {
    throw Error(ErrorCode::SchemaError, "label and step vectors differ in length");
  }
  const auto n_correct = std::count(correct.begin(), correct.end(), true);
  if (n_correct == 0 || n_correct == static_cast<std::ptrdiff_t>(correct.size())) return std::nullopt;
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < correct.size(); ++i) {
    if (correct[i] && (!best || steps[i] > steps[*best])) best = i;
  }
  return best;
}

std::optional<Trajectory> rft_filter(const CandidateSet &cs) {
  if (cs.candidates.size() != kCandidatesPerSample) {
    throw Error(ErrorCode::SchemaError, "candidate set for '" + cs.sample.id + "' has " +
                                            std::to_string(cs.candidates.size()) +
                                            " candidates, expected 4");
  }
  std::vector<bool> correct;
  std::vector<std::size_t> steps;
  for (const auto &t : cs.candidates) {
    correct.push_back(t.final_answer && em_match(*t.final_answer, cs.sample.golden_answers));
    steps.push_back(t.num_steps);
  }
  const auto pick = rft_select(correct, steps);
  if (!pick) return std::nullopt;
  return cs.candidates[*pick];
}

bool format_filter(const Trajectory &t) {
  if (t.steps.empty()) return false;
  for (const auto &step : t.steps) {
    const auto turn = parse_model_output(step.model_output);
    if (!turn.think) return false;
    if (step.action && !turn.action) return false;
  }
  const auto last = parse_model_output(t.steps.back().model_output);
  return last.action && is_stop(*last.action);
}

std::vector<CandidateSet> group_candidates(const std::vector<QASample> &samples,
                                           const std::vector<Trajectory> &trajectories) {
  std::unordered_map<std::string, std::vector<const Trajectory *>> by_id;
  for (const auto &t : trajectories) by_id[t.sample_id].push_back(&t);
  std::vector<CandidateSet> out;
  for (const auto &s : samples) {
    const auto it = by_id.find(s.id);
    if (it == by_id.end()) continue;
    CandidateSet cs{s, {}};
    for (const auto *t : it->second) cs.candidates.push_back(*t);
    out.push_back(std::move(cs));
  }
  return out;
}

nlohmann::json to_json(const RftItem &item) {
  auto j = to_json(item.trajectory);
  j["source"] = to_string(item.source);
  return j;
}

std::vector<RftItem> read_rft_items(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IOError, "cannot open " + path.string());
  std::vector<RftItem> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      RftItem item;
      item.source = parse_source(j.at("source").get<std::string>());
      item.trajectory = trajectory_from_json(j);
      out.push_back(std::move(item));
    } catch (const std::exception &e) {
      throw Error(ErrorCode::SchemaError,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

namespace {

template <typename T>
std::size_t write_jsonl(const std::vector<T> &items, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IOError, "cannot write " + path.string());
  for (const auto &item : items) out << to_json(item).dump() << '\n';
  if (!out) throw Error(ErrorCode::IOError, "write failed: " + path.string());
  return items.size();
}

} // namespace

std::size_t write_rft_items(const std::vector<RftItem> &items, const std::filesystem::path &path) {
  return write_jsonl(items, path);
}

std::size_t write_mixed_items(const std::vector<MixedItem> &items,
                              const std::filesystem::path &path) {
  return write_jsonl(items, path);
}

void MixSpec::validate() const {
  if (!(sft_fraction > 0.0 && sft_fraction <= 1.0)) {
    throw Error(ErrorCode::ConfigError, "sft_fraction must be in (0, 1]");
  }
}

nlohmann::json to_json(const MixedItem &item) {
  auto j = to_json(item.trajectory);
  j["provenance"] = item.provenance == Provenance::SFT ? "sft" : "rft";
  if (item.source) j["source"] = to_string(*item.source);
  return j;
}

std::vector<MixedItem> mix_datasets(const std::vector<Trajectory> &sft,
                                    const std::vector<RftItem> &rft, const MixSpec &spec) {
  spec.validate();
  std::map<QASource, std::vector<const RftItem *>> pools;
  for (const auto &item : rft) pools[item.source].push_back(&item);
  for (const auto &[source, quota] : spec.rft_quota) {
    const auto have = pools[source].size();
    if (have < quota) {
      throw Error(ErrorCode::QuotaError, std::string(to_string(source)) + " quota " +
                                             std::to_string(quota) + " exceeds " +
                                             std::to_string(have) + " filtered items");
    }
  }

  std::mt19937_64 rng(spec.seed);
  const auto n_sft = static_cast<std::size_t>(
      std::floor(spec.sft_fraction * static_cast<double>(sft.size()) + 1e-9));
  std::vector<MixedItem> out;
  for (auto i : sample_indices(sft.size(), n_sft, rng)) {
    out.push_back({Provenance::SFT, std::nullopt, sft[i]});
  }
  for (const auto &[source, quota] : spec.rft_quota) {
    const auto &pool = pools[source];
    for (auto i : sample_indices(pool.size(), quota, rng)) {
      out.push_back({Provenance::RFT, source, pool[i]->trajectory});
    }
  }
  shuffle(out, rng);
  return out;
}

std::map<QASource, std::size_t> parse_quotas(std::string_view text) {
  std::map<QASource, std::size_t> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto part = trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (part.empty()) continue;
    const auto colon = part.find(':');
    if (colon == std::string::npos) {
      throw Error(ErrorCode::ConfigError, "quota '" + part + "' is not SOURCE:COUNT");
    }
    QASource source;
    try {
      source = parse_source(trim(part.substr(0, colon)));
    } catch (const Error &e) {
      throw Error(ErrorCode::ConfigError, e.what());
    }
    const auto count_text = trim(part.substr(colon + 1));
    std::size_t count = 0;
    const auto [ptr, ec] =
        std::from_chars(count_text.data(), count_text.data() + count_text.size(), count);
    if (ec != std::errc() || ptr != count_text.data() + count_text.size() || count_text.empty()) {
      throw Error(ErrorCode::ConfigError, "bad quota count '" + count_text + "'");
    }
    out[source] = count;
  }
  return out;
}

} // namespace browseragent
