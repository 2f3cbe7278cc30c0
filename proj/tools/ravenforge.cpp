// ravenforge: generate, validate, render, summarise and inspect RPM corpora.
//
// Exit codes: 0 ok, 1 usage or I/O error, 2 validation failure.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "ravenforge/corpus.hpp"
#include "ravenforge/dataset.hpp"
#include "ravenforge/error.hpp"
#include "ravenforge/render.hpp"

namespace rf = ravenforge;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInvalid = 2;

struct GenerateArgs {
  std::string dataset;
  std::int64_t n = 70;
  std::uint64_t seed = 0;
  std::string out;
  int workers = 0;
  std::vector<std::string> configurations;
  bool force = false;
  std::string a_position_target = "either";
  int retry_cap = 100;
};

int run_generate(const GenerateArgs& a) {
  rf::CorpusJob job;
  job.regime = *rf::parse_regime(a.dataset);
  if (!a.configurations.empty()) {
    job.configurations.clear();
    for (const auto& name : a.configurations) job.configurations.push_back(*rf::parse_configuration(name));
  }
  job.total = a.n;
  job.seed = a.seed;
  job.out = a.out;
  job.workers = a.workers;
  job.force = a.force;
  job.policy.a_position_test_target = a.a_position_target == "position" ? rf::HeldOutLayoutTarget::Position
                                      : a.a_position_target == "number" ? rf::HeldOutLayoutTarget::Number
                                                                        : rf::HeldOutLayoutTarget::Either;
  job.policy.retry_cap = a.retry_cap;

  const rf::GenerateSummary s = rf::generate_corpus(job);
  const auto& m = s.manifest;
  std::cout << "generated " << m.total() << " " << m.dataset << " instances into " << a.out << " (train "
            << m.split_counts[0] << ", val " << m.split_counts[1] << ", test " << m.split_counts[2] << ")\n"
            << "d_r " << m.rule_dimension << ", " << s.instances_per_second() << " instances/s, rejection rate "
            << s.rejection_rate() << " (" << m.rejected_attempts << " of " << s.attempts << " drafts)\n";
  return kExitOk;
}

int run_validate(const std::string& dir, int workers, bool as_json) {
  const rf::ValidationReport r = rf::validate_corpus(dir, workers);
  if (as_json) {
    std::cout << r.to_json() << "\n";
  } else {
    std::cout << "instances                " << r.instances << "\n"
              << "schema errors            " << r.schema_errors << "\n"
              << "count mismatches         " << r.count_mismatches << "\n"
              << "solver failures          " << r.solver_failures << "\n"
              << "regime violations        " << r.regime_violations << "\n"
              << "mesh violations          " << r.mesh_violations << "\n"
              << "encoding errors          " << r.encoding_errors << "\n"
              << "impartiality violations  " << r.impartiality_violations << "\n"
              << "render mismatches        " << r.render_mismatches << "\n";
    for (const auto& d : r.diagnostics) std::cout << "  " << d << "\n";
    std::cout << (r.ok() ? "OK" : "FAILED") << "\n";
  }
  return r.ok() ? kExitOk : kExitInvalid;
}

int run_render(const std::string& file, const std::string& png) {
  const rf::InstanceRecord r = rf::read_instance(file);
  std::array<rf::PanelImage, 16> panels;
  for (std::size_t p = 0; p < panels.size(); ++p)
    std::copy_n(r.image.begin() + static_cast<std::ptrdiff_t>(p * rf::kPanelPixels), rf::kPanelPixels,
                panels[p].pixels.begin());
  rf::write_png(png, rf::render_sheet(panels));
  std::cout << "wrote " << png << "\n";
  return kExitOk;
}

int run_stats(const std::string& dir, const std::string& json_path) {
  const rf::CorpusStats st = rf::corpus_stats(dir);
  std::cout << st.to_text();
  if (json_path == "-") {
    std::cout << st.to_json() << "\n";
  } else if (!json_path.empty()) {
    std::ofstream f(json_path);
    if (!(f << st.to_json() << "\n")) throw rf::Error(rf::ErrorKind::IoFailure, "cannot write " + json_path);
  }
  return kExitOk;
}

std::string describe(const rf::SymbolicPanel& p) {
  std::string s;
  for (int c = 0; c < p.component_count; ++c) {
    const auto& st = p.components[static_cast<std::size_t>(c)];
    if (c) s += " | ";
    s += "slots " + std::to_string(st.positions) + " n " + std::to_string(st.number()) + " type " +
         std::to_string(st.type) + " size " + std::to_string(st.size) + " color " + std::to_string(st.color);
  }
  if (p.mesh) s += " | mesh " + std::to_string(p.mesh->lines);
  return s;
}

int run_inspect(const std::string& file) {
  const rf::InstanceRecord r = rf::read_instance(file);
  std::cout << "target " << r.target << "\n";
  const auto kind = r.rules.dimension() == rf::rule_dimension(rf::DatasetKind::IRavenMesh)
                        ? rf::DatasetKind::IRavenMesh
                        : rf::DatasetKind::IRaven;
  std::cout << "rules (" << r.rules.dimension() << " slots, " << r.rules.popcount() << " set)\n";
  for (const rf::RuleSlot& s : rf::decode_rules(r.rules, kind))
    std::cout << "  component " << s.component << " " << rf::to_string(s.attribute) << " "
              << rf::to_string(s.rule) << "\n";
  if (!r.meta) {
    std::cout << "no meta member\n";
    return kExitOk;
  }
  const auto& m = *r.meta;
  std::cout << "dataset " << m.dataset << ", " << rf::display_name(m.configuration) << ", "
            << rf::to_string(m.split) << ", id " << m.id << ", seed " << m.seed << ", " << m.generator << "\n";
  if (m.matrix) {
    for (const auto& a : m.matrix->assignments)
      std::cout << "  rule: component " << a.component << " " << rf::to_string(a.attribute) << " "
                << rf::to_string(a.rule) << "\n";
    for (int i = 0; i < rf::kContextPanels; ++i)
      std::cout << "  context " << i << ": " << describe(m.matrix->context[static_cast<std::size_t>(i)]) << "\n";
    for (int i = 0; i < rf::kAnswerPanels; ++i)
      std::cout << (i == r.target ? "* answer  " : "  answer  ") << i << ": "
                << describe(m.matrix->answers[static_cast<std::size_t>(i)]) << "\n";
  }
  return kExitOk;
}

// Expands `generate --config FILE` into the equivalent flags, inserted
// before the command line so that explicit flags win.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  auto cfg = std::find(args.begin(), args.end(), "--config");
  const auto generate = std::find(args.begin(), args.end(), "generate");
  if (generate == args.end() || cfg == args.end() || cfg < generate || cfg + 1 == args.end()) return args;
  const std::string path = *(cfg + 1);
  args.erase(cfg, cfg + 2);
  std::vector<std::string> extra;
  for (const CLI::ConfigItem& item : CLI::ConfigTOML().from_file(path)) {
    if (!item.parents.empty() || item.name == "++" || item.name == "--") continue;
    const std::string flag = "--" + item.name;
    if (std::find(args.begin(), args.end(), flag) != args.end()) continue;
    if (item.name == "force") {
      if (!item.inputs.empty() && (item.inputs[0] == "true" || item.inputs[0] == "1")) extra.push_back(flag);
      continue;
    }
    std::string value;
    for (const auto& v : item.inputs) value += (value.empty() ? "" : ",") + v;
    extra.push_back(flag);
    extra.push_back(value);
  }
  args.insert(std::find(args.begin(), args.end(), "generate") + 1, extra.begin(), extra.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Procedural generator and auditor for Raven-style matrix corpora"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Generate a corpus");
  std::string config_path;
  generate->add_option("--config", config_path, "TOML-style key = value file mirroring the flags; flags win");
  generate->add_option("--dataset", gen.dataset, "iraven, mesh, a-color, a-position, a-size or a-type")
      ->required()
      ->check(CLI::IsMember({"iraven", "mesh", "a-color", "a-position", "a-size", "a-type"}));
  generate->add_option("--n", gen.n, "Total instances, a multiple of 5")->capture_default_str();
  generate->add_option("--seed", gen.seed, "Corpus seed")->envname("RAVENFORGE_SEED")->capture_default_str();
  generate->add_option("--out", gen.out, "Output directory")->required();
  generate->add_option("--workers", gen.workers, "Worker threads (0: all cores)")->capture_default_str();
  generate->add_option("--configurations", gen.configurations, "Subset of configurations")
      ->delimiter(',')
      ->check([](const std::string& s) {
        return rf::parse_configuration(s) ? std::string() : "unknown configuration " + s;
      });
  generate->add_flag("--force", gen.force, "Overwrite an existing corpus");
  generate->add_option("--a-position-target", gen.a_position_target,
                       "Which of Position/Number carries the test rule in a-position")
      ->check(CLI::IsMember({"either", "position", "number"}))
      ->capture_default_str();
  generate->add_option("--retry-cap", gen.retry_cap, "Drafts per instance before giving up")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  std::string dir;
  int workers = 0;
  bool as_json = false;
  auto* validate = app.add_subcommand("validate", "Audit a corpus; exit 2 on any violation");
  validate->add_option("directory", dir)->required();
  validate->add_option("--workers", workers)->capture_default_str();
  validate->add_flag("--json", as_json, "Print the report as JSON");

  std::string file;
  std::string png;
  auto* render = app.add_subcommand("render", "Render one instance to a PNG sheet");
  render->add_option("file", file)->required();
  render->add_option("output", png)->required();

  std::string json_path;
  auto* stats = app.add_subcommand("stats", "Rule, attribute, configuration and target frequencies");
  stats->add_option("directory", dir)->required();
  stats->add_option("--json", json_path, "Also write the JSON form to this file ('-' for stdout)");

  auto* inspect = app.add_subcommand("inspect", "Print the contents of one instance");
  inspect->add_option("file", file)->required();

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*generate) return run_generate(gen);
    if (*validate) return run_validate(dir, workers, as_json);
    if (*render) return run_render(file, png);
    if (*stats) return run_stats(dir, json_path);
    if (*inspect) return run_inspect(file);
  } catch (const rf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
