#include "browseragent/action.hpp"
#include "browseragent/ax_tree.hpp"
#include "browseragent/corpus.hpp"
#include "browseragent/rollout.hpp"

#include <benchmark/benchmark.h>

#include <filesystem>

using namespace browseragent;

namespace {

std::filesystem::path fixture(const std::string &rel) {
  return std::filesystem::path(BROWSERAGENT_FIXTURE_DIR) / rel;
}

std::shared_ptr<const Corpus> corpus() {
  static const auto c = std::make_shared<const Corpus>(load_corpus(fixture("corpus/manifest.json")));
  return c;
}

void BM_ParseAction(benchmark::State &state) {
  const std::string text = "type [331] [Princes in the Tower] [1]";
  for (auto _ : state) benchmark::DoNotOptimize(parse_action(text));
}
BENCHMARK(BM_ParseAction);

void BM_ParseModelOutput(benchmark::State &state) {
  const std::string text =
      "<think>\nThe first result is the article.\n</think>\n<conclusion>\nFound it.\n</conclusion>\n"
      "```\nclick [1459] [Princes in the Tower]\n```";
  for (auto _ : state) benchmark::DoNotOptimize(parse_model_output(text));
}
BENCHMARK(BM_ParseModelOutput);

void BM_BuildAxTree(benchmark::State &state) {
  const auto &html = *corpus()->page(corpus()->home_url());
  for (auto _ : state) {
    auto tree = merge_consecutive_text(build_ax_tree(html, 1, corpus()->home_url()));
    benchmark::DoNotOptimize(render_observation(tree, Viewport{}));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * html.size()));
}
BENCHMARK(BM_BuildAxTree);

void BM_Search(benchmark::State &state) {
  const auto c = corpus();
  for (auto _ : state) benchmark::DoNotOptimize(search(*c, "Princes in the Tower", 0));
}
BENCHMARK(BM_Search);

void BM_Episode(benchmark::State &state) {
  auto client = ScriptedClient::from_jsonl(fixture("mock_princes.jsonl"));
  auto table = std::make_shared<SessionTable>(corpus(), ServerConfig{});
  InProcessEndpoint ep(table);
  RolloutConfig cfg;
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_episode({client.questions()[0], "", 0}, cfg, client, ep,
                                         make_trace_id(1, i++)));
  }
}
BENCHMARK(BM_Episode);

} // namespace

BENCHMARK_MAIN();
