#include "browseragent/data_pipeline.hpp"
#include "browseragent/errors.hpp"

#include "generators.hpp"
#include "support.hpp"

#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>

using namespace browseragent;

namespace {

std::optional<std::size_t> rft_oracle(const std::vector<bool> &correct,
                                      const std::vector<std::size_t> &steps) {
  const auto yes = std::count(correct.begin(), correct.end(), true);
  if (yes == 0 || yes == static_cast<long>(correct.size())) return std::nullopt;
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < correct.size(); ++i) {
    if (correct[i] && (!best || steps[i] > steps[*best])) best = i;
  }
  return best;
}

Trajectory answered(const std::string &answer, std::size_t steps, const std::string &tag = {}) {
  Trajectory t;
  t.trace_id = tag;
  t.question = "q";
  for (std::size_t i = 0; i < steps; ++i) {
    StepRecord r;
    r.model_output = i + 1 == steps ? "<think>t</think>\n```stop [" + answer + "]```"
                                    : "<think>t</think>\n```scroll [down]```";
    r.action = i + 1 == steps ? "stop [" + answer + "]" : "scroll [down]";
    t.steps.push_back(r);
  }
  t.num_steps = steps;
  t.final_answer = answer;
  return t;
}

std::filesystem::path temp_path(const std::string &name) {
  return std::filesystem::temp_directory_path() / ("browseragent_" + name);
}

std::string file_bytes(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST_CASE("normalize_answer and em") {
  CHECK(normalize_answer("The  Beatles!") == "beatles");
  CHECK(normalize_answer("an Apple, a day") == "apple day");
  CHECK(normalize_answer("U.S.") == "us");
  CHECK(normalize_answer("") == "");
  CHECK(em_match("edward iv of England.", {"Edward IV of England"}));
  CHECK_FALSE(em_match("King Edward IV", {"Edward IV of England"}));
  CHECK(em_match("No", {"yes", "no"}));
  CHECK_FALSE(em_match("", {"x"}));
}

TEST_CASE("sources") {
  CHECK(to_string(QASource::NQ) == "NQ");
  CHECK(to_string(QASource::HotpotQA) == "HotpotQA");
  CHECK(parse_source("hotpotqa") == QASource::HotpotQA);
  CHECK(parse_source("nq") == QASource::NQ);
  CHECK(parse_source("other") == QASource::Other);
  CHECK_THROWS_AS(parse_source("trivia"), Error);
}

TEST_CASE("rft_select: examples") {
  CHECK(rft_select({true, false, true, false}, {3, 2, 5, 1}) == 2u);
  CHECK(rft_select({true, true, true, true}, {1, 2, 3, 4}) == std::nullopt);
  CHECK(rft_select({false, false, false, false}, {1, 2, 3, 4}) == std::nullopt);
  CHECK(rft_select({false, true, true, false}, {9, 4, 4, 1}) == 1u);
}

TEST_CASE("rft_select agrees with the oracle on every label pattern") {
  testsupport::Rng rng(8);
  for (int trial = 0; trial < 400; ++trial) {
    const auto mask = static_cast<unsigned>(trial % 16);
    std::vector<bool> correct(4);
    std::vector<std::size_t> steps(4);
    for (int i = 0; i < 4; ++i) {
      correct[i] = (mask >> i) & 1;
      steps[i] = 1 + testsupport::pick(rng, 6);
    }
    CHECK(rft_select(correct, steps) == rft_oracle(correct, steps));
  }
}

TEST_CASE("rft_filter labels by EM") {
  CandidateSet cs{{"id", "q", {"Paris"}, QASource::NQ},
                  {answered("paris", 2, "a"), answered("London", 5, "b"), answered("The Paris", 4, "c"),
                   answered("Rome", 1, "d")}};
  const auto kept = rft_filter(cs);
  REQUIRE(kept);
  CHECK(kept->trace_id == "c");
  cs.candidates[1].final_answer.reset();
  cs.candidates[3] = answered("paris", 1);
  cs.candidates[1] = answered("Paris", 1);
  CHECK_FALSE(rft_filter(cs));
  cs.candidates.pop_back();
  CHECK_THROWS_AS(rft_filter(cs), Error);
}

TEST_CASE("format_filter") {
  CHECK(format_filter(answered("x", 3)));
  auto t = answered("x", 2);
  t.steps[0].model_output = "```scroll [down]```";
  CHECK_FALSE(format_filter(t));
  t = answered("x", 2);
  t.steps[0].model_output = "<think>t</think>\n```jump```";
  CHECK_FALSE(format_filter(t));
  t = answered("x", 2);
  t.steps.pop_back();
  t.num_steps = 1;
  CHECK_FALSE(format_filter(t));
  CHECK_FALSE(format_filter(Trajectory{}));
}

TEST_CASE("group_candidates") {
  const std::vector<QASample> samples{{"a", "qa", {"x"}, QASource::NQ},
                                      {"b", "qb", {"y"}, QASource::HotpotQA},
                                      {"c", "qc", {"z"}, QASource::NQ}};
  std::vector<Trajectory> ts;
  for (const auto *id : {"b", "a", "b", "a"}) {
    auto t = answered("x", 1, std::to_string(ts.size()));
    t.sample_id = id;
    ts.push_back(t);
  }
  const auto groups = group_candidates(samples, ts);
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].sample.id == "a");
  CHECK(groups[0].candidates[0].trace_id == "1");
  CHECK(groups[0].candidates[1].trace_id == "3");
  CHECK(groups[1].sample.id == "b");
}

TEST_CASE("qa sample io") {
  const auto samples = read_qa_samples(testsupport::fixture("qa/case_studies.jsonl"));
  REQUIRE(samples.size() == 2);
  CHECK(samples[0].source == QASource::NQ);
  CHECK(samples[1].golden_answers == std::vector<std::string>{"no"});
  const auto p = temp_path("qa.jsonl");
  write_qa_samples(samples, p);
  CHECK(read_qa_samples(p) == samples);
  {
    std::ofstream out(p);
    out << to_json(samples[0]).dump() << "\n{\"id\":\"x\",\"question\":\"q\",\"golden_answers\":[]}\n";
  }
  try {
    read_qa_samples(p);
    FAIL("expected a schema error");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::SchemaError);
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
  std::filesystem::remove(p);
}

TEST_CASE("parse_quotas") {
  const auto q = parse_quotas("NQ:400, HotpotQA:673");
  CHECK(q.at(QASource::NQ) == 400);
  CHECK(q.at(QASource::HotpotQA) == 673);
  CHECK_THROWS_AS(parse_quotas("NQ=4"), Error);
  CHECK_THROWS_AS(parse_quotas("NQ:x"), Error);
  CHECK_THROWS_AS(parse_quotas("Bogus:1"), Error);
}

TEST_CASE("mix counts, provenance and determinism") {
  std::vector<Trajectory> sft;
  for (int i = 0; i < 1000; ++i) sft.push_back(answered("s", 1, "sft" + std::to_string(i)));
  std::vector<RftItem> rft;
  for (int i = 0; i < 500; ++i) rft.push_back({QASource::NQ, answered("r", 1, "nq" + std::to_string(i))});
  for (int i = 0; i < 700; ++i) rft.push_back({QASource::HotpotQA, answered("r", 1, "hp" + std::to_string(i))});

  MixSpec spec;
  spec.seed = 3;
  const auto mixed = mix_datasets(sft, rft, spec);
  CHECK(mixed.size() == 800 + 1073);
  std::map<std::string, std::size_t> counts;
  std::set<std::string> ids;
  for (const auto &m : mixed) {
    ids.insert(m.trajectory.trace_id);
    if (m.provenance == Provenance::SFT) {
      ++counts["sft"];
      CHECK_FALSE(m.source);
    } else {
      ++counts[std::string(to_string(*m.source))];
    }
  }
  CHECK(ids.size() == mixed.size());
  CHECK(counts["sft"] == 800);
  CHECK(counts["NQ"] == 400);
  CHECK(counts["HotpotQA"] == 673);

  const auto a = temp_path("mix_a.jsonl");
  const auto b = temp_path("mix_b.jsonl");
  write_mixed_items(mixed, a);
  write_mixed_items(mix_datasets(sft, rft, spec), b);
  CHECK(file_bytes(a) == file_bytes(b));
  spec.seed = 4;
  write_mixed_items(mix_datasets(sft, rft, spec), b);
  CHECK(file_bytes(a) != file_bytes(b));
  std::filesystem::remove(a);
  std::filesystem::remove(b);
  CHECK(to_json(mixed.front()).contains("provenance"));
}

TEST_CASE("mix floor and errors") {
  std::vector<Trajectory> sft(7, answered("s", 1));
  MixSpec spec;
  spec.rft_quota.clear();
  spec.sft_fraction = 0.7;
  std::vector<Trajectory> ten(10, answered("s", 1));
  CHECK(mix_datasets(ten, {}, spec).size() == 7);
  spec.sft_fraction = 0.8;
  CHECK(mix_datasets(sft, {}, spec).size() == 5);
  spec.sft_fraction = 0.0;
  CHECK_THROWS_AS(mix_datasets(sft, {}, spec), Error);
  spec = MixSpec{};
  try {
    mix_datasets(sft, {{QASource::NQ, answered("r", 1)}}, spec);
    FAIL("expected a quota error");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::QuotaError);
  }
}

TEST_CASE("rft items io") {
  std::vector<RftItem> items{{QASource::NQ, answered("a", 2)}, {QASource::HotpotQA, answered("b", 1)}};
  const auto p = temp_path("rft.jsonl");
  write_rft_items(items, p);
  const auto back = read_rft_items(p);
  REQUIRE(back.size() == 2);
  CHECK(back[1].source == QASource::HotpotQA);
  CHECK(back[0].trajectory == items[0].trajectory);
  std::filesystem::remove(p);
}
