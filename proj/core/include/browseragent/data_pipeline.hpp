#pragma once

#include "browseragent/trajectory.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace browseragent {

enum class QASource { NQ, HotpotQA, Other };

/// "NQ", "HotpotQA", "other".
std::string_view to_string(QASource source);
/// Case-insensitive; unknown names throw Error(SchemaError).
QASource parse_source(std::string_view name);

struct QASample {
  std::string id;
  std::string question;
  std::vector<std::string> golden_answers; // nonempty
  QASource source = QASource::Other;
  bool operator==(const QASample &) const = default;
};

nlohmann::json to_json(const QASample &s);
/// Throws Error(SchemaError).
QASample qa_sample_from_json(const nlohmann::json &j);

/// JSONL `{"id", "question", "golden_answers", "source"}`.
/// Throws Error(IOError) or Error(SchemaError) naming the line number.
std::vector<QASample> read_qa_samples(const std::filesystem::path &path);
std::size_t write_qa_samples(const std::vector<QASample> &samples,
                             const std::filesystem::path &path);

/// Lowercase, strip ASCII punctuation, drop a/an/the, collapse whitespace.
std::string normalize_answer(std::string_view answer);

/// True iff normalize(pred) equals normalize(g) for some gold g.
bool em_match(std::string_view pred, const std::vector<std::string> &golds);

inline constexpr std::size_t kCandidatesPerSample = 4;

struct CandidateSet {
  QASample sample;
  std::vector<Trajectory> candidates; // exactly kCandidatesPerSample
};

/// Index of the correct candidate with the most steps (lowest index on
/// ties), or none when the labels are homogeneous.
std::optional<std::size_t> rft_select(const std::vector<bool> &correct,
                                      const std::vector<std::size_t> &steps);

/// Labels by EM (missing final answer is incorrect) and applies rft_select.
/// Throws Error(SchemaError) unless the set holds exactly 4 candidates.
std::optional<Trajectory> rft_filter(const CandidateSet &cs);

/// Every output has a think block, every executed step a well-formed fence,
/// and the last turn is a stop.
bool format_filter(const Trajectory &t);

/// Pairs trajectories with samples by sample_id, preserving candidate
/// order. Samples without candidates are skipped.
std::vector<CandidateSet> group_candidates(const std::vector<QASample> &samples,
                                           const std::vector<Trajectory> &trajectories);

struct RftItem {
  QASource source = QASource::Other;
  Trajectory trajectory;
};

/// Trajectory JSON plus `"source"`.
nlohmann::json to_json(const RftItem &item);
/// Throws Error(IOError) or Error(SchemaError) naming the line number.
std::vector<RftItem> read_rft_items(const std::filesystem::path &path);
std::size_t write_rft_items(const std::vector<RftItem> &items, const std::filesystem::path &path);

struct MixSpec {
  double sft_fraction = 0.8;
  std::map<QASource, std::size_t> rft_quota{{QASource::NQ, 400}, {QASource::HotpotQA, 673}};
  std::uint64_t seed = 0;

  /// Throws Error(ConfigError).
  void validate() const;
};

enum class Provenance { SFT, RFT };

struct MixedItem {
  Provenance provenance = Provenance::SFT;
  std::optional<QASource> source; // set for RFT items
  Trajectory trajectory;
};

/// Trajectory JSON plus `"provenance": "sft" | "rft"` (and `"source"`).
nlohmann::json to_json(const MixedItem &item);

std::size_t write_mixed_items(const std::vector<MixedItem> &items,
                              const std::filesystem::path &path);

/// Samples floor(fraction * |sft|) SFT items and the per-source RFT quotas
/// without replacement, then shuffles the concatenation. Deterministic in
/// spec.seed. Throws Error(QuotaError) when a source is short.
std::vector<MixedItem> mix_datasets(const std::vector<Trajectory> &sft,
                                    const std::vector<RftItem> &rft, const MixSpec &spec);

/// Parses "NQ:400,HotpotQA:673". Throws Error(ConfigError).
std::map<QASource, std::size_t> parse_quotas(std::string_view text);

} // namespace browseragent
