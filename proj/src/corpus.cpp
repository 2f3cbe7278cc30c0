#include "ravenforge/corpus.hpp"

#include <omp.h>

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <chrono>
#include <exception>
#include <iomanip>
#include <map>
#include <sstream>

#include "json.hpp"
#include "ravenforge/answers.hpp"
#include "ravenforge/error.hpp"
#include "ravenforge/mesh.hpp"
#include "ravenforge/random.hpp"
#include "ravenforge/render.hpp"
#include "ravenforge/solver.hpp"

namespace ravenforge {

using nlohmann::json;

std::uint64_t instance_seed(std::uint64_t corpus_seed, Configuration configuration, std::int64_t id) {
  return derive_seed(corpus_seed, static_cast<std::uint64_t>(configuration), static_cast<std::uint64_t>(id));
}

std::vector<InstanceSpec> plan_instances(const SplitPlan& plan, std::uint64_t corpus_seed) {
  std::vector<InstanceSpec> specs;
  for (const ConfigurationPlan& cp : plan.configurations)
    for (std::size_t s = 0; s < kSplits.size(); ++s)
      for (std::int64_t id = cp.ranges[s].begin; id < cp.ranges[s].end; ++id)
        specs.push_back({cp.configuration, kSplits[s], id, instance_seed(corpus_seed, cp.configuration, id)});
  return specs;
}

GeneratedMatrix generate_matrix(const RegimeSpec& regime, const InstanceSpec& spec, const GeneratorPolicy& policy) {
  Rng rng(spec.seed);
  for (int attempt = 1; attempt <= policy.retry_cap; ++attempt) {
    try {
      SymbolicMatrix m;
      m.configuration = spec.configuration;
      m.regime = regime;
      m.split = spec.split;
      m.seed = spec.seed;
      m.assignments = sample_assignments(regime, spec.configuration, spec.split, rng, policy);
      ContextGrid grid = generate_context(m.assignments, spec.configuration, rng, policy);
      if (regime.has_mesh()) {
        const RuleAssignment mesh_rule = sample_mesh_assignment(rng);
        const MeshGrid lines = apply_mesh_rule(mesh_rule, rng, policy.retry_cap);
        for (int i = 0; i < kContextPanels; ++i) grid.context[static_cast<std::size_t>(i)].mesh = lines[static_cast<std::size_t>(i)];
        grid.correct.mesh = lines[8];
        m.assignments.push_back(mesh_rule);
      }
      m.context = grid.context;
      AnswerSet answers = generate_answers(grid.correct, m.assignments, spec.configuration, regime.has_mesh(), rng);
      m.answers = answers.answers;
      m.target = answers.target;
      if (assert_unique(m)) return {std::move(m), attempt};
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::InfeasibleRegime) throw;
    }
  }
  throw Error(ErrorKind::GenerationRetryExhausted,
              "no uniquely solvable matrix for " + std::string(to_string(spec.configuration)) + " id " +
                  std::to_string(spec.id) + " after " + std::to_string(policy.retry_cap) + " drafts");
}

InstanceRecord make_record(const SymbolicMatrix& matrix, const InstanceSpec& spec) {
  InstanceRecord r;
  const auto panels = render_matrix(matrix);
  r.image.reserve(static_cast<std::size_t>(kImagePanels * kPanelPixels));
  for (const PanelImage& p : panels) r.image.insert(r.image.end(), p.pixels.begin(), p.pixels.end());
  r.target = matrix.target;
  r.rules = encode_rules(matrix.assignments, matrix.regime.kind());
  InstanceMeta meta;
  meta.dataset = to_string(matrix.regime);
  meta.configuration = spec.configuration;
  meta.split = spec.split;
  meta.id = spec.id;
  meta.seed = spec.seed;
  meta.matrix = matrix;
  r.meta = std::move(meta);
  return r;
}

namespace {

BatchItem generate_item(const RegimeSpec& regime, const InstanceSpec& spec, const GeneratorPolicy& policy) {
  GeneratedMatrix g = generate_matrix(regime, spec, policy);
  return {make_record(g.matrix, spec), g.attempts};
}

// Runs body(i) for i in [0, n) on `workers` threads and rethrows the first
// (lowest index) failure.
template <class Body>
void parallel_for(std::size_t n, int workers, Body body) {
  std::vector<std::exception_ptr> errors(n);
  const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

std::vector<BatchItem> generate_batch_serial(const RegimeSpec& regime, std::span<const InstanceSpec> specs,
                                             const GeneratorPolicy& policy) {
  std::vector<BatchItem> out;
  out.reserve(specs.size());
  for (const InstanceSpec& s : specs) out.push_back(generate_item(regime, s, policy));
  return out;
}

std::vector<BatchItem> generate_batch(const RegimeSpec& regime, std::span<const InstanceSpec> specs,
                                      const GeneratorPolicy& policy, int workers) {
  std::vector<BatchItem> out(specs.size());
  parallel_for(specs.size(), workers, [&](std::size_t i) { out[i] = generate_item(regime, specs[i], policy); });
  return out;
}

double GenerateSummary::instances_per_second() const {
  return seconds > 0 ? static_cast<double>(manifest.total()) / seconds : 0.0;
}

double GenerateSummary::rejection_rate() const {
  return attempts > 0 ? static_cast<double>(manifest.rejected_attempts) / static_cast<double>(attempts) : 0.0;
}

GenerateSummary generate_corpus(const CorpusJob& job) {
  namespace fs = std::filesystem;
  const auto start = std::chrono::steady_clock::now();
  const SplitPlan plan = plan_splits(job.total, job.configurations);

  std::error_code ec;
  if (fs::exists(job.out / "manifest.json", ec)) {
    if (!job.force)
      throw Error(ErrorKind::IoFailure, (job.out / "manifest.json").string() + " exists; pass --force to overwrite");
    fs::remove(job.out / "manifest.json", ec);
    for (Configuration c : kConfigurations) fs::remove_all(job.out / std::string(to_string(c)), ec);
  }
  fs::create_directories(job.out, ec);
  if (ec) throw Error(ErrorKind::IoFailure, "cannot create " + job.out.string());
  for (const ConfigurationPlan& cp : plan.configurations)
    fs::create_directories(job.out / std::string(to_string(cp.configuration)), ec);

  const std::vector<InstanceSpec> specs = plan_instances(plan, job.seed);
  std::vector<int> attempts(specs.size(), 0);
  parallel_for(specs.size(), job.workers, [&](std::size_t i) {
    BatchItem item = generate_item(job.regime, specs[i], job.policy);
    write_instance(item.record, job.out);
    attempts[i] = item.attempts;
  });

  GenerateSummary summary;
  CorpusManifest& m = summary.manifest;
  m.dataset = to_string(job.regime);
  m.regime = job.regime;
  m.rule_dimension = rule_dimension(job.regime.kind());
  m.split_counts = plan.totals;
  for (const ConfigurationPlan& cp : plan.configurations)
    m.configurations.push_back({cp.configuration, {cp.ranges[0].size(), cp.ranges[1].size(), cp.ranges[2].size()}});
  m.seed = job.seed;
  m.policy = job.policy;
  for (int a : attempts) {
    summary.attempts += a;
    m.rejected_attempts += a - 1;
  }
  write_manifest(m, job.out);
  summary.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return summary;
}

std::int64_t ValidationReport::problems() const {
  return schema_errors + count_mismatches + solver_failures + regime_violations + mesh_violations +
         encoding_errors + impartiality_violations + render_mismatches;
}

std::string ValidationReport::to_json() const {
  const json j = {{"instances", instances},
                  {"schema_errors", schema_errors},
                  {"count_mismatches", count_mismatches},
                  {"solver_failures", solver_failures},
                  {"regime_violations", regime_violations},
                  {"mesh_violations", mesh_violations},
                  {"encoding_errors", encoding_errors},
                  {"impartiality_violations", impartiality_violations},
                  {"render_mismatches", render_mismatches},
                  {"diagnostics", diagnostics},
                  {"ok", ok()}};
  return j.dump(2);
}

namespace {

constexpr std::size_t kMaxDiagnostics = 20;

void merge(ValidationReport& into, const ValidationReport& r) {
  into.instances += r.instances;
  into.schema_errors += r.schema_errors;
  into.count_mismatches += r.count_mismatches;
  into.solver_failures += r.solver_failures;
  into.regime_violations += r.regime_violations;
  into.mesh_violations += r.mesh_violations;
  into.encoding_errors += r.encoding_errors;
  into.impartiality_violations += r.impartiality_violations;
  into.render_mismatches += r.render_mismatches;
  for (const auto& d : r.diagnostics)
    if (into.diagnostics.size() < kMaxDiagnostics) into.diagnostics.push_back(d);
}

std::span<const std::uint8_t> stored_panel(const InstanceRecord& r, int panel) {
  return std::span<const std::uint8_t>(r.image).subspan(static_cast<std::size_t>(panel * kPanelPixels),
                                                         kPanelPixels);
}

// A mesh-only distractor must differ from the correct answer somewhere, and
// only where either of the two mesh patterns is drawn.
bool mesh_pixels_ok(const InstanceRecord& r, const SymbolicMatrix& m, int distractor) {
  const auto correct = stored_panel(r, kContextPanels + m.target);
  const auto other = stored_panel(r, kContextPanels + distractor);
  const PanelImage a = mesh_mask(m.correct().mesh.value_or(MeshState{}));
  const PanelImage b = mesh_mask(m.answers[static_cast<std::size_t>(distractor)].mesh.value_or(MeshState{}));
  bool differs = false;
  for (std::size_t i = 0; i < kPanelPixels; ++i) {
    if (correct[i] == other[i]) continue;
    if (!a.pixels[i] && !b.pixels[i]) return false;
    differs = true;
  }
  return differs;
}

}  // namespace

ValidationReport validate_record(const InstanceRecord& record, const RegimeSpec& regime) {
  ValidationReport rep;
  rep.instances = 1;
  if (!record.meta || !record.meta->matrix) {
    ++rep.schema_errors;
    rep.diagnostics.push_back("no symbolic meta");
    return rep;
  }
  const SymbolicMatrix& m = *record.meta->matrix;
  const std::string where = std::string(to_string(m.configuration)) + "/" +
                            instance_filename(record.meta->id, record.meta->split) + ": ";
  if (record.meta->dataset != to_string(regime)) {
    ++rep.schema_errors;
    rep.diagnostics.push_back(where + "dataset " + record.meta->dataset);
    return rep;
  }

  try {
    const int answer = solve(solver_input(m));
    if (answer != record.target) {
      ++rep.solver_failures;
      rep.diagnostics.push_back(where + "solver picks " + std::to_string(answer) + ", target is " +
                                std::to_string(record.target));
    }
  } catch (const Error& e) {
    ++rep.solver_failures;
    rep.diagnostics.push_back(where + e.what());
  }

  try {
    const RuleEncoding expected = encode_rules(m.assignments, regime.kind());
    const bool round_trip = encode_rules([&] {
                              std::vector<RuleAssignment> back;
                              for (const RuleSlot& s : decode_rules(record.rules, regime.kind()))
                                back.push_back({s.component, s.attribute, RuleKind{s.rule, 0, ArithOp::Plus}});
                              return back;
                            }(), regime.kind()) == record.rules;
    if (record.rules != expected || !round_trip ||
        record.rules.popcount() != static_cast<int>(m.assignments.size())) {
      ++rep.encoding_errors;
      rep.diagnostics.push_back(where + "rules vector disagrees with assignments");
    }
  } catch (const Error& e) {
    ++rep.encoding_errors;
    rep.diagnostics.push_back(where + e.what());
  }

  if (!regime_respected(regime, m.split, m.configuration, record.rules)) {
    ++rep.regime_violations;
    rep.diagnostics.push_back(where + "held-out attribute rule breaks the regime");
  }

  if (regime.has_mesh()) {
    const auto distractors = mesh_only_distractors(m);
    const bool pixels = std::any_of(distractors.begin(), distractors.end(),
                                    [&](int d) { return mesh_pixels_ok(record, m, d); });
    if (distractors.empty() || !pixels) {
      ++rep.mesh_violations;
      rep.diagnostics.push_back(where + "no mesh-only distractor");
    }
  }

  if (!impartial(m)) {
    ++rep.impartiality_violations;
    rep.diagnostics.push_back(where + "answer set is not impartial");
  }

  const auto panels = render_matrix(m);
  for (int p = 0; p < kImagePanels; ++p) {
    const auto stored = stored_panel(record, p);
    if (!std::equal(stored.begin(), stored.end(), panels[static_cast<std::size_t>(p)].pixels.begin())) {
      ++rep.render_mismatches;
      rep.diagnostics.push_back(where + "panel " + std::to_string(p) + " differs from its symbolic render");
      break;
    }
  }
  return rep;
}

std::vector<std::filesystem::path> list_instances(const std::filesystem::path& corpus) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  for (Configuration c : kConfigurations) {
    const fs::path dir = corpus / std::string(to_string(c));
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) continue;
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.is_regular_file() && entry.path().extension() == ".npz") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

namespace {

struct ParsedName {
  std::int64_t id;
  Split split;
};

std::optional<ParsedName> parse_instance_name(const std::string& name) {
  constexpr std::string_view prefix = "RAVEN_";
  constexpr std::string_view suffix = ".npz";
  if (!name.starts_with(prefix) || !name.ends_with(suffix)) return std::nullopt;
  const std::string core = name.substr(prefix.size(), name.size() - prefix.size() - suffix.size());
  const auto us = core.find('_');
  if (us == std::string::npos || us == 0) return std::nullopt;
  const auto split = parse_split(core.substr(us + 1));
  if (!split || !std::all_of(core.begin(), core.begin() + static_cast<std::ptrdiff_t>(us), ::isdigit))
    return std::nullopt;
  return ParsedName{std::stoll(core.substr(0, us)), *split};
}

}  // namespace

ValidationReport validate_corpus(const std::filesystem::path& corpus, int workers) {
  ValidationReport total;
  CorpusManifest manifest;
  try {
    manifest = read_manifest(corpus);
  } catch (const Error& e) {
    ++total.schema_errors;
    total.diagnostics.push_back(std::string("manifest: ") + e.what());
    return total;
  }

  const auto files = list_instances(corpus);
  std::vector<ValidationReport> reports(files.size());
  std::vector<std::optional<std::pair<Configuration, Split>>> placement(files.size());
  const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(files.size()); ++i) {
    const auto& path = files[static_cast<std::size_t>(i)];
    ValidationReport& rep = reports[static_cast<std::size_t>(i)];
    const auto name = parse_instance_name(path.filename().string());
    const auto configuration = parse_configuration(path.parent_path().filename().string());
    try {
      const InstanceRecord record = read_instance(path);
      if (!name || !configuration || !record.meta || record.meta->id != name->id ||
          record.meta->split != name->split || record.meta->configuration != *configuration) {
        rep.instances = 1;
        ++rep.schema_errors;
        rep.diagnostics.push_back(path.string() + ": file name disagrees with meta");
        continue;
      }
      if (record.rules.dimension() != manifest.rule_dimension) {
        rep.instances = 1;
        ++rep.encoding_errors;
        rep.diagnostics.push_back(path.string() + ": rules vector length " +
                                  std::to_string(record.rules.dimension()));
        continue;
      }
      rep = validate_record(record, manifest.regime);
      placement[static_cast<std::size_t>(i)] = {{*configuration, name->split}};
    } catch (const Error& e) {
      rep.instances = 1;
      ++rep.schema_errors;
      rep.diagnostics.push_back(path.string() + ": " + e.what());
    }
  }

  std::map<Configuration, std::array<std::int64_t, 3>> counts;
  for (std::size_t i = 0; i < files.size(); ++i) {
    merge(total, reports[i]);
    if (placement[i]) ++counts[placement[i]->first][static_cast<std::size_t>(placement[i]->second)];
  }
  std::map<Configuration, std::array<std::int64_t, 3>> expected;
  for (const auto& [c, n] : manifest.configurations) expected[c] = n;
  for (Configuration c : kConfigurations) {
    const auto have = counts.count(c) ? counts[c] : std::array<std::int64_t, 3>{};
    const auto want = expected.count(c) ? expected[c] : std::array<std::int64_t, 3>{};
    for (std::size_t s = 0; s < 3; ++s) {
      if (have[s] == want[s]) continue;
      total.count_mismatches += std::abs(have[s] - want[s]);
      if (total.diagnostics.size() < kMaxDiagnostics)
        total.diagnostics.push_back(std::string(to_string(c)) + " " + std::string(to_string(kSplits[s])) + ": " +
                                    std::to_string(have[s]) + " files, manifest says " + std::to_string(want[s]));
    }
  }
  return total;
}

CorpusStats corpus_stats(const std::filesystem::path& corpus) {
  CorpusStats st;
  const CorpusManifest manifest = read_manifest(corpus);
  const DatasetKind kind = manifest.regime.kind();
  std::map<Configuration, std::int64_t> per_configuration;
  for (const auto& path : list_instances(corpus)) {
    const InstanceRecord r = read_instance(path);
    ++st.instances;
    if (r.meta) {
      ++per_configuration[r.meta->configuration];
      ++st.splits[static_cast<std::size_t>(r.meta->split)];
    }
    ++st.targets[static_cast<std::size_t>(r.target)];
    for (const RuleSlot& s : decode_rules(r.rules, kind)) {
      const auto rule = static_cast<std::size_t>(s.rule);
      ++st.rules[rule];
      if (s.component == kMeshComponent)
        ++st.mesh_attributes[s.attribute == Attribute::Position ? 0 : 1];
      else
        ++st.attributes[static_cast<std::size_t>(s.attribute)][rule];
    }
  }
  for (Configuration c : kConfigurations)
    if (per_configuration.count(c)) st.configurations.push_back({c, per_configuration[c]});

  if (st.instances > 0) {
    const double expected = static_cast<double>(st.instances) / kAnswerPanels;
    for (std::int64_t n : st.targets) st.target_chi_square += (static_cast<double>(n) - expected) * (static_cast<double>(n) - expected) / expected;
    st.target_p_value = boost::math::gamma_q((kAnswerPanels - 1) / 2.0, st.target_chi_square / 2.0);
  }
  return st;
}

std::string CorpusStats::to_json() const {
  json cfg = json::object();
  for (const auto& [c, n] : configurations) cfg[std::string(to_string(c))] = n;
  json rule = json::object();
  for (RuleType t : kRuleTypes) rule[std::string(to_string(t))] = rules[static_cast<std::size_t>(t)];
  json attr = json::object();
  for (Attribute a : kAttributes) {
    json row = json::object();
    for (RuleType t : kRuleTypes) row[std::string(to_string(t))] = attributes[static_cast<std::size_t>(a)][static_cast<std::size_t>(t)];
    attr[std::string(to_string(a))] = row;
  }
  const json j = {{"instances", instances},
                  {"configurations", cfg},
                  {"splits", {{"train", splits[0]}, {"val", splits[1]}, {"test", splits[2]}}},
                  {"rules", rule},
                  {"attributes", attr},
                  {"mesh_attributes", {{"Position", mesh_attributes[0]}, {"Number", mesh_attributes[1]}}},
                  {"targets", targets},
                  {"target_chi_square", target_chi_square},
                  {"target_p_value", target_p_value}};
  return j.dump(2);
}

std::string CorpusStats::to_text() const {
  std::ostringstream os;
  const double n = instances > 0 ? static_cast<double>(instances) : 1.0;
  os << "instances " << instances << "  (train " << splits[0] << ", val " << splits[1] << ", test " << splits[2]
     << ")\n\n";
  os << std::left << std::setw(44) << "configuration" << std::right << std::setw(8) << "count" << std::setw(10)
     << "share" << "\n";
  os << std::fixed << std::setprecision(4);
  for (const auto& [c, k] : configurations)
    os << std::left << std::setw(44) << to_string(c) << std::right << std::setw(8) << k << std::setw(10)
       << static_cast<double>(k) / n << "\n";
  os << "\n" << std::left << std::setw(12) << "attribute";
  for (RuleType t : kRuleTypes) os << std::right << std::setw(17) << to_string(t);
  os << "\n";
  for (Attribute a : kAttributes) {
    os << std::left << std::setw(12) << to_string(a);
    for (RuleType t : kRuleTypes)
      os << std::right << std::setw(17) << attributes[static_cast<std::size_t>(a)][static_cast<std::size_t>(t)];
    os << "\n";
  }
  if (mesh_attributes[0] + mesh_attributes[1] > 0)
    os << "mesh        Position " << mesh_attributes[0] << ", Number " << mesh_attributes[1] << "\n";
  os << "\ntarget ";
  for (std::size_t i = 0; i < targets.size(); ++i) os << " " << i << ":" << targets[i];
  os << "\nchi-square " << std::setprecision(3) << target_chi_square << " (df 7), p = " << target_p_value << "\n";
  return os.str();
}

}  // namespace ravenforge
