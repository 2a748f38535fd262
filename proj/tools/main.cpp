#include "browseragent/corpus.hpp"
#include "browseragent/data_pipeline.hpp"
#include "browseragent/errors.hpp"
#include "browseragent/eval_harness.hpp"
#include "browseragent/rollout.hpp"
#include "browseragent/session_server.hpp"
#include "browseragent/trajectory.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

using namespace browseragent;
using nlohmann::json;

namespace {

struct Globals {
  bool pretty = false;
};

void emit(const Globals &g, const json &j) {
  std::cout << (g.pretty ? j.dump(2) : j.dump()) << '\n';
}

std::optional<std::string> env(const char *name) {
  const char *v = std::getenv(name);
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

std::size_t env_count(const char *name, std::size_t fallback) {
  const auto v = env(name);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    const auto n = std::stoull(*v, &used);
    if (used != v->size()) throw std::invalid_argument(*v);
    return n;
  } catch (const std::exception &) {
    throw Error(ErrorCode::ConfigError, std::string(name) + " is not a count: " + *v);
  }
}

std::pair<std::string, int> split_bind(const std::string &bind) {
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos) throw Error(ErrorCode::ConfigError, "bind must be HOST:PORT");
  try {
    return {bind.substr(0, colon), std::stoi(bind.substr(colon + 1))};
  } catch (const std::exception &) {
    throw Error(ErrorCode::ConfigError, "bad port in '" + bind + "'");
  }
}

json stats_json(const BatchStats &s) {
  return {{"episodes", s.episodes},
          {"failed", s.failed},
          {"answered", s.answered},
          {"seconds", s.seconds},
          {"episodes_per_minute", s.episodes_per_minute}};
}

// serve-env

struct ServeOptions {
  std::string corpus;
  std::string bind = "0.0.0.0:8000";
  std::size_t capacity = 64;
  std::size_t ttl_secs = 300;
  std::size_t viewport_height = kDefaultViewportHeight;
};

int run_serve(const Globals &g, ServeOptions o) {
  o.corpus = env("CORPUS_MANIFEST").value_or(o.corpus);
  o.bind = env("BIND").value_or(o.bind);
  o.capacity = env_count("CAPACITY", o.capacity);
  o.ttl_secs = env_count("TTL_SECS", o.ttl_secs);
  if (o.corpus.empty()) throw Error(ErrorCode::ConfigError, "--corpus or CORPUS_MANIFEST is required");

  ServerConfig cfg;
  std::tie(cfg.bind_host, cfg.port) = split_bind(o.bind);
  cfg.capacity = o.capacity;
  cfg.session_ttl = std::chrono::seconds(o.ttl_secs);
  cfg.viewport_height = o.viewport_height;
  cfg.validate();

  auto corpus = std::make_shared<const Corpus>(load_corpus(o.corpus));
  auto table = std::make_shared<SessionTable>(corpus, cfg);
  SessionServer server(table);

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  const int port = server.bind(cfg.bind_host, cfg.port);
  if (port < 0) throw Error(ErrorCode::ServerError, "cannot bind " + o.bind);
  emit(g, {{"listening", cfg.bind_host + ":" + std::to_string(port)},
           {"pages", corpus->size()},
           {"capacity", cfg.capacity},
           {"ttl_secs", o.ttl_secs}});
  std::cout.flush();

  std::thread([&server, signals] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  }).detach();
  server.serve();
  return 0;
}

// rollout

struct RolloutOptions {
  std::string mock;
  std::string endpoint;
  std::string model;
  double temperature = 0.0;
  std::string server;
  std::string corpus;
  std::string questions;
  std::size_t samples = 1;
  std::size_t max_steps = kStepsChallenging;
  std::size_t parallelism = 1;
  std::size_t capacity = 64;
  std::optional<std::uint64_t> seed;
  std::string system_prompt;
  std::string out = "trajectories.jsonl";
};

int run_rollout(const Globals &g, const RolloutOptions &o) {
  std::shared_ptr<LLMClient> client;
  std::vector<EpisodeRequest> requests;
  std::vector<std::string> questions;
  std::vector<std::string> ids;

  if (!o.mock.empty()) {
    auto scripted = std::make_shared<ScriptedClient>(ScriptedClient::from_jsonl(o.mock));
    questions = scripted->questions();
    client = scripted;
  } else {
    HttpClientConfig http;
    http.endpoint = o.endpoint;
    http.model = o.model;
    http.temperature = o.temperature;
    http.api_key = env("OPENAI_API_KEY").value_or("");
    client = std::make_shared<HttpChatClient>(http);
  }
  if (!o.questions.empty()) {
    questions.clear();
    for (const auto &s : read_qa_samples(o.questions)) {
      questions.push_back(s.question);
      ids.push_back(s.id);
    }
  }
  if (questions.empty()) throw Error(ErrorCode::ConfigError, "no questions (use --questions)");
  for (std::size_t i = 0; i < questions.size(); ++i) {
    for (std::size_t c = 0; c < o.samples; ++c) {
      requests.push_back({questions[i], ids.empty() ? std::to_string(i) : ids[i], c});
    }
  }

  RolloutConfig cfg;
  cfg.max_steps = o.max_steps;
  cfg.parallelism = o.parallelism;
  cfg.seed = o.seed;
  if (!o.system_prompt.empty()) {
    std::ifstream in(o.system_prompt);
    if (!in) throw Error(ErrorCode::IOError, "cannot open " + o.system_prompt);
    cfg.system_prompt.assign(std::istreambuf_iterator<char>(in), {});
  }
  cfg.validate();

  std::unique_ptr<SessionEndpoint> endpoint;
  if (!o.server.empty()) {
    endpoint = std::make_unique<HttpEndpoint>(o.server);
  } else {
    const auto manifest = o.corpus.empty() ? env("CORPUS_MANIFEST").value_or("") : o.corpus;
    if (manifest.empty()) {
      throw Error(ErrorCode::ConfigError, "--server, --corpus or CORPUS_MANIFEST is required");
    }
    ServerConfig sc;
    sc.capacity = o.capacity;
    auto corpus = std::make_shared<const Corpus>(load_corpus(manifest));
    endpoint = std::make_unique<InProcessEndpoint>(std::make_shared<SessionTable>(corpus, sc));
  }

  const auto result = run_batch(requests, cfg, *client, *endpoint);
  write_trajectories(result.trajectories, o.out);
  auto j = stats_json(result.stats);
  j["out"] = o.out;
  emit(g, j);
  return 0;
}

// filter-rft

struct FilterOptions {
  std::string samples;
  std::string trajectories;
  std::string out = "rft.jsonl";
  bool skip_format = false;
};

int run_filter(const Globals &g, const FilterOptions &o) {
  const auto samples = read_qa_samples(o.samples);
  const auto trajectories = read_trajectories(o.trajectories);
  std::vector<RftItem> kept;
  std::size_t homogeneous = 0;
  std::size_t bad_format = 0;
  std::size_t skipped = 0;
  const auto sets = group_candidates(samples, trajectories);
  for (const auto &cs : sets) {
    if (cs.candidates.size() != kCandidatesPerSample) {
      ++skipped;
      continue;
    }
    auto pick = rft_filter(cs);
    if (!pick) {
      ++homogeneous;
      continue;
    }
    if (!o.skip_format && !format_filter(*pick)) {
      ++bad_format;
      continue;
    }
    kept.push_back({cs.sample.source, std::move(*pick)});
  }
  write_rft_items(kept, o.out);
  emit(g, {{"candidate_sets", sets.size()},
           {"kept", kept.size()},
           {"homogeneous", homogeneous},
           {"format_rejected", bad_format},
           {"wrong_size", skipped},
           {"out", o.out}});
  return 0;
}

// mix

struct MixOptions {
  std::string sft;
  std::string rft;
  double fraction = 0.8;
  std::string quotas = "NQ:400,HotpotQA:673";
  std::uint64_t seed = 0;
  std::string out = "mixed.jsonl";
};

int run_mix(const Globals &g, const MixOptions &o) {
  MixSpec spec;
  spec.sft_fraction = o.fraction;
  spec.rft_quota = parse_quotas(o.quotas);
  spec.seed = o.seed;
  spec.validate();
  const auto mixed = mix_datasets(read_trajectories(o.sft), read_rft_items(o.rft), spec);
  write_mixed_items(mixed, o.out);
  std::size_t n_sft = 0;
  for (const auto &m : mixed) n_sft += m.provenance == Provenance::SFT;
  emit(g, {{"items", mixed.size()}, {"sft", n_sft}, {"rft", mixed.size() - n_sft}, {"out", o.out}});
  return 0;
}

// eval

struct EvalCliOptions {
  std::vector<std::string> datasets;
  std::vector<std::string> answers;
  std::vector<std::string> names;
  std::string judges;
  std::size_t fan_out = 8;
  std::string out;
};

int run_eval(const Globals &g, const EvalCliOptions &o) {
  if (o.datasets.size() != o.answers.size()) {
    throw Error(ErrorCode::ConfigError, "--dataset and --answers must pair up");
  }
  if (!o.names.empty() && o.names.size() != o.datasets.size()) {
    throw Error(ErrorCode::ConfigError, "--name must be given once per dataset");
  }
  std::optional<std::vector<Judge>> judges;
  if (!o.judges.empty()) judges = load_judges(o.judges);

  std::vector<EvalReport> reports;
  for (std::size_t i = 0; i < o.datasets.size(); ++i) {
    const auto name = o.names.empty() ? std::filesystem::path(o.datasets[i]).stem().string()
                                      : o.names[i];
    reports.push_back(evaluate(name, load_benchmark(o.datasets[i]), load_answers(o.answers[i]),
                               judges ? &*judges : nullptr, {o.fan_out}));
  }
  json j = json::array();
  for (const auto &r : reports) j.push_back(to_json(r));
  if (!o.out.empty()) {
    std::ofstream out(o.out);
    if (!out) throw Error(ErrorCode::IOError, "cannot write " + o.out);
    out << j.dump(2) << '\n';
  }
  if (g.pretty) {
    std::cout << format_table(reports);
  } else {
    std::cout << j.dump() << '\n';
  }
  return 0;
}

// build-corpus

int run_build_corpus(const Globals &g, const std::string &manifest, bool strict) {
  const auto corpus = load_corpus(manifest);
  emit(g, {{"manifest", manifest},
           {"home_url", corpus.home_url()},
           {"content", corpus.content()},
           {"pages", corpus.size()},
           {"vocabulary", corpus.vocabulary_size()},
           {"warnings", corpus.warnings()}});
  return strict && !corpus.warnings().empty() ? 1 : 0;
}

// replay

int run_replay(const Globals &g, const std::string &file, std::size_t index) {
  const auto ts = read_trajectories(file);
  if (index >= ts.size()) {
    throw Error(ErrorCode::BadParameter, "index " + std::to_string(index) + " out of range (" +
                                             std::to_string(ts.size()) + " trajectories)");
  }
  const auto &t = ts[index];
  if (g.pretty) {
    std::cout << "question: " << t.question << '\n';
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
      const auto &s = t.steps[i];
      std::cout << "step " << i + 1 << ": " << s.action.value_or("(no action)") << '\n';
      if (s.conclusion) std::cout << "  conclusion: " << *s.conclusion << '\n';
      if (s.error) std::cout << "  error: " << *s.error << '\n';
    }
    std::cout << "final answer: " << t.final_answer.value_or("(none)") << '\n';
    return 0;
  }
  json steps = json::array();
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const auto &s = t.steps[i];
    steps.push_back({{"step", i + 1},
                     {"action", s.action ? json(*s.action) : json(nullptr)},
                     {"conclusion", s.conclusion ? json(*s.conclusion) : json(nullptr)}});
  }
  emit(g, {{"trace_id", t.trace_id},
           {"question", t.question},
           {"num_steps", t.num_steps},
           {"steps", steps},
           {"final_answer", t.final_answer ? json(*t.final_answer) : json(nullptr)}});
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Offline wiki browsing agent: environment, rollouts, data and evaluation"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_flag("--pretty", g.pretty, "Human-readable output");

  ServeOptions serve;
  auto *serve_cmd = app.add_subcommand("serve-env", "Serve the browser environment over HTTP");
  serve_cmd->add_option("--corpus", serve.corpus, "Corpus manifest (env CORPUS_MANIFEST)");
  serve_cmd->add_option("--bind", serve.bind, "HOST:PORT (env BIND)")->capture_default_str();
  serve_cmd->add_option("--capacity", serve.capacity, "Max concurrent sessions (env CAPACITY)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  serve_cmd->add_option("--ttl-secs", serve.ttl_secs, "Idle session ttl (env TTL_SECS)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  serve_cmd->add_option("--viewport-height", serve.viewport_height, "Lines per observation")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  RolloutOptions rollout;
  auto *rollout_cmd = app.add_subcommand("rollout", "Run episodes and write trajectories");
  auto *mock_opt = rollout_cmd->add_option("--mock", rollout.mock, "Scripted outputs JSONL");
  auto *endpoint_opt =
      rollout_cmd->add_option("--endpoint", rollout.endpoint, "Chat-completion base url");
  mock_opt->excludes(endpoint_opt);
  rollout_cmd->add_option("--model", rollout.model, "Model name");
  rollout_cmd->add_option("--temperature", rollout.temperature, "Sampling temperature");
  auto *server_opt = rollout_cmd->add_option("--server", rollout.server, "Session server url");
  rollout_cmd->add_option("--corpus", rollout.corpus, "Corpus manifest for an in-process server")
      ->excludes(server_opt);
  rollout_cmd->add_option("--questions", rollout.questions, "QA samples JSONL");
  rollout_cmd->add_option("--samples", rollout.samples, "Episodes per question")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  rollout_cmd->add_option("--max-steps", rollout.max_steps, "Step budget (6, 15, 30)")
      ->capture_default_str();
  rollout_cmd->add_option("--parallelism", rollout.parallelism, "Episodes in flight")
      ->capture_default_str();
  rollout_cmd->add_option("--capacity", rollout.capacity, "In-process session capacity")
      ->capture_default_str();
  rollout_cmd->add_option("--seed", rollout.seed, "Derive trace ids from this seed");
  rollout_cmd->add_option("--system-prompt", rollout.system_prompt, "Override system prompt file");
  rollout_cmd->add_option("--out", rollout.out, "Trajectory JSONL")->capture_default_str();

  FilterOptions filter;
  auto *filter_cmd = app.add_subcommand("filter-rft", "Select RFT trajectories from 4-sample sets");
  filter_cmd->add_option("--samples", filter.samples, "QA samples JSONL")->required();
  filter_cmd->add_option("--trajectories", filter.trajectories, "Candidate trajectories JSONL")
      ->required();
  filter_cmd->add_option("--out", filter.out)->capture_default_str();
  filter_cmd->add_flag("--skip-format-filter", filter.skip_format, "Keep malformed outputs");

  MixOptions mix;
  auto *mix_cmd = app.add_subcommand("mix", "Mix SFT and filtered RFT data");
  mix_cmd->add_option("--sft", mix.sft, "SFT trajectories JSONL")->required();
  mix_cmd->add_option("--rft", mix.rft, "filter-rft output JSONL")->required();
  mix_cmd->add_option("--fraction", mix.fraction, "SFT fraction")->capture_default_str();
  mix_cmd->add_option("--quotas", mix.quotas, "Per-source RFT counts")->capture_default_str();
  mix_cmd->add_option("--seed", mix.seed)->capture_default_str();
  mix_cmd->add_option("--out", mix.out)->capture_default_str();

  EvalCliOptions eval;
  auto *eval_cmd = app.add_subcommand("eval", "Score answers with EM and LLM judges");
  eval_cmd->add_option("--dataset", eval.datasets, "Benchmark JSONL (repeatable)")->required();
  eval_cmd->add_option("--answers", eval.answers, "Answers JSONL, one per --dataset")->required();
  eval_cmd->add_option("--name", eval.names, "Dataset label, one per --dataset");
  eval_cmd->add_option("--judges", eval.judges, "Judge config JSON");
  eval_cmd->add_option("--fan-out", eval.fan_out, "Items scored concurrently")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  eval_cmd->add_option("--out", eval.out, "Also write the report JSON here");

  std::string manifest;
  bool strict = false;
  auto *corpus_cmd = app.add_subcommand("build-corpus", "Index a corpus manifest and report");
  corpus_cmd->add_option("--manifest", manifest)->required();
  corpus_cmd->add_flag("--strict", strict, "Fail on dangling links");

  std::string replay_file;
  std::size_t replay_index = 0;
  auto *replay_cmd = app.add_subcommand("replay", "Print a recorded trajectory");
  replay_cmd->add_option("--file", replay_file)->required();
  replay_cmd->add_option("--index", replay_index)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*serve_cmd) return run_serve(g, serve);
    if (*rollout_cmd) {
      if (rollout.mock.empty() && rollout.endpoint.empty()) {
        std::cerr << "rollout: one of --mock or --endpoint is required\n";
        return 2;
      }
      return run_rollout(g, rollout);
    }
    if (*filter_cmd) return run_filter(g, filter);
    if (*mix_cmd) return run_mix(g, mix);
    if (*eval_cmd) return run_eval(g, eval);
    if (*corpus_cmd) return run_build_corpus(g, manifest, strict);
    if (*replay_cmd) return run_replay(g, replay_file, replay_index);
  } catch (const Error &e) {
    std::cerr << e.what() << '\n';
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
