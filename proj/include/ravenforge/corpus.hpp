#pragma once

// End-to-end generation of matrices and corpora, corpus validation and
// summary statistics.

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ravenforge/dataset.hpp"
#include "ravenforge/model.hpp"
#include "ravenforge/panel.hpp"
#include "ravenforge/rules.hpp"

namespace ravenforge {

struct InstanceSpec {
  Configuration configuration = Configuration::Center;
  Split split = Split::Train;
  std::int64_t id = 0;
  std::uint64_t seed = 0;
};

std::uint64_t instance_seed(std::uint64_t corpus_seed, Configuration configuration, std::int64_t id);

// All instances of a split plan, configuration-major then by id.
std::vector<InstanceSpec> plan_instances(const SplitPlan& plan, std::uint64_t corpus_seed);

struct GeneratedMatrix {
  SymbolicMatrix matrix;
  int attempts = 1;  // 1 + number of rejected drafts
};

// Draws rules, context, mesh overlay and answers from the instance seed and
// redraws until the solver certifies a unique answer. Throws
// GenerationRetryExhausted after policy.retry_cap drafts, InfeasibleRegime
// when the regime cannot be realised at all.
GeneratedMatrix generate_matrix(const RegimeSpec& regime, const InstanceSpec& spec,
                                const GeneratorPolicy& policy = {});

InstanceRecord make_record(const SymbolicMatrix& matrix, const InstanceSpec& spec);

struct BatchItem {
  InstanceRecord record;
  int attempts = 1;
};

// Reference implementation, one instance after another.
std::vector<BatchItem> generate_batch_serial(const RegimeSpec& regime, std::span<const InstanceSpec> specs,
                                             const GeneratorPolicy& policy = {});
// Same output, instances spread over `workers` threads (0: OpenMP default).
std::vector<BatchItem> generate_batch(const RegimeSpec& regime, std::span<const InstanceSpec> specs,
                                      const GeneratorPolicy& policy = {}, int workers = 0);

struct CorpusJob {
  RegimeSpec regime = RegimeSpec::iraven();
  std::vector<Configuration> configurations{kConfigurations.begin(), kConfigurations.end()};
  std::int64_t total = 70;
  std::uint64_t seed = 0;
  std::filesystem::path out;
  int workers = 0;
  bool force = false;
  GeneratorPolicy policy;
};

struct GenerateSummary {
  CorpusManifest manifest;
  double seconds = 0;
  std::int64_t attempts = 0;

  double instances_per_second() const;
  double rejection_rate() const;
};

// Writes every instance and then manifest.json. Refuses (IoFailure) to
// touch a directory that already holds a manifest unless job.force.
GenerateSummary generate_corpus(const CorpusJob& job);

struct ValidationReport {
  std::int64_t instances = 0;
  std::int64_t schema_errors = 0;
  std::int64_t count_mismatches = 0;
  std::int64_t solver_failures = 0;
  std::int64_t regime_violations = 0;
  std::int64_t mesh_violations = 0;
  std::int64_t encoding_errors = 0;
  std::int64_t impartiality_violations = 0;
  std::int64_t render_mismatches = 0;
  std::vector<std::string> diagnostics;  // first few problems, in file order

  std::int64_t problems() const;
  bool ok() const { return problems() == 0; }
  std::string to_json() const;
};

// Per-instance checks of a stored record against its own symbolic meta.
ValidationReport validate_record(const InstanceRecord& record, const RegimeSpec& regime);
ValidationReport validate_corpus(const std::filesystem::path& corpus, int workers = 0);

struct CorpusStats {
  std::int64_t instances = 0;
  std::vector<std::pair<Configuration, std::int64_t>> configurations;
  std::array<std::int64_t, 3> splits{};
  std::array<std::int64_t, 4> rules{};                    // by RuleType
  std::array<std::array<std::int64_t, 4>, 5> attributes{};  // [Attribute][RuleType], base components
  std::array<std::int64_t, 2> mesh_attributes{};          // Position, Number
  std::array<std::int64_t, kAnswerPanels> targets{};
  double target_chi_square = 0;
  double target_p_value = 1;

  std::string to_json() const;
  std::string to_text() const;
};

CorpusStats corpus_stats(const std::filesystem::path& corpus);

// Sorted instance files below corpus/<configuration>/.
std::vector<std::filesystem::path> list_instances(const std::filesystem::path& corpus);

}  // namespace ravenforge
