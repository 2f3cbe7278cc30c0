#pragma once

// Sparse rule encoding, per-instance NPZ records, split planning and the
// corpus manifest.
//
// Instance file: <corpus>/<configuration>/RAVEN_<id>_<split>.npz with members
//   image.npy   uint8  (16, 80, 80)   context panels then answers
//   target.npy  int64  ()             index of the correct answer
//   rules.npy   uint8  (d_r,)         multi-hot rule encoding
//   meta        JSON text             optional; configuration, split, seed
//                                      and the symbolic description

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ravenforge/model.hpp"
#include "ravenforge/panel.hpp"
#include "ravenforge/rules.hpp"

namespace ravenforge {

inline constexpr std::string_view kGeneratorVersion = "ravenforge 1.0.0";
inline constexpr int kImagePanels = kContextPanels + kAnswerPanels;

struct RuleEncoding {
  std::vector<std::uint8_t> bits;

  int dimension() const { return static_cast<int>(bits.size()); }
  int popcount() const;
  bool test(int index) const { return bits.at(static_cast<std::size_t>(index)) != 0; }

  friend bool operator==(const RuleEncoding&, const RuleEncoding&) = default;
};

// OR of the one-hot vectors of the assignments. Throws UnknownSlot for an
// assignment outside the canonical table of `kind`.
RuleEncoding encode_rules(std::span<const RuleAssignment> assignments, DatasetKind kind);
std::vector<RuleSlot> decode_rules(const RuleEncoding& encoding, DatasetKind kind);

// Whether the encoding honours the held-out attribute of an Attributeless
// regime: Constant on every governable component in train/val, never
// Constant (and some other rule) in test. Other regimes always pass.
bool regime_respected(const RegimeSpec& regime, Split split, Configuration configuration,
                      const RuleEncoding& encoding);

struct InstanceMeta {
  std::string dataset;  // regime name, e.g. "a-size"
  Configuration configuration = Configuration::Center;
  Split split = Split::Train;
  std::int64_t id = 0;
  std::uint64_t seed = 0;
  std::string generator{kGeneratorVersion};
  // Symbolic description; absent in foreign files.
  std::optional<SymbolicMatrix> matrix;
};

std::string meta_to_json(const InstanceMeta& meta);
// Throws SchemaMismatch.
InstanceMeta meta_from_json(std::string_view text);

struct InstanceRecord {
  std::vector<std::uint8_t> image;  // 16 * 80 * 80
  std::int64_t target = 0;
  RuleEncoding rules;
  std::optional<InstanceMeta> meta;

  friend bool operator==(const InstanceRecord&, const InstanceRecord&);
};

std::string instance_filename(std::int64_t id, Split split);
std::filesystem::path instance_path(const std::filesystem::path& corpus, Configuration configuration,
                                    std::int64_t id, Split split);

std::vector<std::uint8_t> encode_instance(const InstanceRecord& record);
InstanceRecord decode_instance(std::span<const std::uint8_t> bytes);

// Writes under corpus/<configuration>/; the record must carry meta.
std::filesystem::path write_instance(const InstanceRecord& record, const std::filesystem::path& corpus);
// Throws IoFailure, CorruptArchive or SchemaMismatch.
InstanceRecord read_instance(const std::filesystem::path& path);

struct IdRange {
  std::int64_t begin = 0;
  std::int64_t end = 0;

  std::int64_t size() const { return end - begin; }
};

struct ConfigurationPlan {
  Configuration configuration;
  std::array<IdRange, 3> ranges;  // train, val, test; disjoint, contiguous from 0
};

struct SplitPlan {
  std::array<std::int64_t, 3> totals{};
  std::vector<ConfigurationPlan> configurations;
};

// 3:1:1 split of `total`, each split spread evenly over the configurations
// (earlier configurations take the remainder). Throws BadTotal unless
// total is a positive multiple of 5.
SplitPlan plan_splits(std::int64_t total, std::span<const Configuration> configurations);

struct CorpusManifest {
  std::string dataset;  // regime name
  RegimeSpec regime = RegimeSpec::iraven();
  int rule_dimension = 40;
  std::array<std::int64_t, 3> split_counts{};
  std::vector<std::pair<Configuration, std::array<std::int64_t, 3>>> configurations;
  std::uint64_t seed = 0;
  std::string generator{kGeneratorVersion};
  GeneratorPolicy policy;
  std::int64_t rejected_attempts = 0;

  std::int64_t total() const { return split_counts[0] + split_counts[1] + split_counts[2]; }
};

std::string manifest_to_json(const CorpusManifest& m);
CorpusManifest manifest_from_json(std::string_view text);
void write_manifest(const CorpusManifest& m, const std::filesystem::path& corpus);
CorpusManifest read_manifest(const std::filesystem::path& corpus);

}  // namespace ravenforge
