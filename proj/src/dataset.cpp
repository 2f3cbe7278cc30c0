#include "ravenforge/dataset.hpp"

#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "ravenforge/error.hpp"
#include "ravenforge/npz.hpp"
#include "ravenforge/render.hpp"

namespace ravenforge {

using nlohmann::json;

int RuleEncoding::popcount() const {
  return static_cast<int>(std::count_if(bits.begin(), bits.end(), [](std::uint8_t b) { return b != 0; }));
}

RuleEncoding encode_rules(std::span<const RuleAssignment> assignments, DatasetKind kind) {
  RuleEncoding enc;
  enc.bits.assign(static_cast<std::size_t>(rule_dimension(kind)), 0);
  for (const RuleAssignment& a : assignments) {
    const auto idx = slot_index(kind, a.component, a.attribute, a.rule.type);
    if (!idx)
      throw Error(ErrorKind::UnknownSlot, "component " + std::to_string(a.component) + " " +
                                              std::string(to_string(a.attribute)));
    enc.bits[static_cast<std::size_t>(*idx)] |= 1;
  }
  return enc;
}

std::vector<RuleSlot> decode_rules(const RuleEncoding& encoding, DatasetKind kind) {
  const auto slots = rule_attribute_slots(kind, Configuration::Center);
  if (encoding.bits.size() != slots.size())
    throw Error(ErrorKind::SchemaMismatch, "rule vector of length " + std::to_string(encoding.bits.size()));
  std::vector<RuleSlot> out;
  for (std::size_t i = 0; i < slots.size(); ++i)
    if (encoding.bits[i]) out.push_back(slots[i]);
  return out;
}

bool regime_respected(const RegimeSpec& regime, Split split, Configuration configuration,
                      const RuleEncoding& enc) {
  if (regime.kind() != DatasetKind::Attributeless) return true;
  const DatasetKind kind = regime.kind();
  const auto& layouts = component_layouts(configuration);
  const bool coupled = is_coupled(*regime.held_out());
  auto bit = [&](int c, Attribute a, RuleType r) {
    const auto idx = slot_index(kind, c, a, r);
    return idx && *idx < enc.dimension() && enc.test(*idx);
  };
  for (int c = 0; c < static_cast<int>(layouts.size()); ++c) {
    if (coupled && !layouts[static_cast<std::size_t>(c)].layout_governable()) continue;
    const std::vector<Attribute> held =
        coupled ? std::vector<Attribute>{Attribute::Position, Attribute::Number}
                : std::vector<Attribute>{*regime.held_out()};
    bool any_constant = false;
    bool any_other = false;
    for (Attribute a : held)
      for (RuleType r : kRuleTypes) {
        if (!bit(c, a, r)) continue;
        (r == RuleType::Constant ? any_constant : any_other) = true;
      }
    if (split == Split::Test) {
      if (any_constant || !any_other) return false;
    } else {
      const Attribute constant_on = coupled ? Attribute::Position : *regime.held_out();
      if (!bit(c, constant_on, RuleType::Constant) || any_other) return false;
    }
  }
  return true;
}

namespace {

json rule_json(const RuleAssignment& a) {
  json j = {{"component", a.component},
            {"attribute", std::string(to_string(a.attribute))},
            {"rule", std::string(to_string(a.rule.type))}};
  if (a.rule.type == RuleType::Progression) j["increment"] = a.rule.increment;
  if (a.rule.type == RuleType::Arithmetic) j["op"] = a.rule.op == ArithOp::Plus ? "plus" : "minus";
  return j;
}

[[noreturn]] void schema(const std::string& why) { throw Error(ErrorKind::SchemaMismatch, why); }

RuleAssignment rule_from_json(const json& j) {
  RuleAssignment a;
  a.component = j.at("component").get<int>();
  const auto attr = parse_attribute(j.at("attribute").get<std::string>());
  const auto type = parse_rule_type(j.at("rule").get<std::string>());
  if (!attr || !type) schema("unknown rule or attribute in meta");
  a.attribute = *attr;
  a.rule.type = *type;
  if (*type == RuleType::Progression) a.rule.increment = static_cast<std::int8_t>(j.at("increment").get<int>());
  if (*type == RuleType::Arithmetic) a.rule.op = j.at("op").get<std::string>() == "plus" ? ArithOp::Plus : ArithOp::Minus;
  return a;
}

json panel_json(const SymbolicPanel& p) {
  json comps = json::array();
  for (int c = 0; c < p.component_count; ++c) {
    const ComponentState& s = p.components[static_cast<std::size_t>(c)];
    comps.push_back({{"positions", s.positions},
                     {"type", s.type},
                     {"size", s.size},
                     {"color", s.color},
                     {"angles", s.angles}});
  }
  json j = {{"components", comps}};
  j["mesh"] = p.mesh ? json(p.mesh->lines) : json(nullptr);
  return j;
}

SymbolicPanel panel_from_json(const json& j) {
  SymbolicPanel p;
  const auto& comps = j.at("components");
  if (comps.empty() || comps.size() > kMaxComponents) schema("bad component count");
  p.component_count = static_cast<std::uint8_t>(comps.size());
  for (std::size_t c = 0; c < comps.size(); ++c) {
    ComponentState& s = p.components[c];
    s.positions = comps[c].at("positions").get<SlotMask>();
    s.type = comps[c].at("type").get<std::uint8_t>();
    s.size = comps[c].at("size").get<std::uint8_t>();
    s.color = comps[c].at("color").get<std::uint8_t>();
    s.angles = comps[c].at("angles").get<std::array<std::uint8_t, kMaxSlots>>();
  }
  if (!j.at("mesh").is_null()) p.mesh = MeshState{j.at("mesh").get<SlotMask>()};
  return p;
}

json policy_json(const GeneratorPolicy& p) {
  const char* target = p.a_position_test_target == HeldOutLayoutTarget::Either     ? "either"
                       : p.a_position_test_target == HeldOutLayoutTarget::Position ? "position"
                                                                                   : "number";
  return {{"a_position_test_target", target}, {"retry_cap", p.retry_cap}};
}

GeneratorPolicy policy_from_json(const json& j) {
  GeneratorPolicy p;
  const auto t = j.value("a_position_test_target", std::string("either"));
  p.a_position_test_target = t == "position" ? HeldOutLayoutTarget::Position
                             : t == "number" ? HeldOutLayoutTarget::Number
                                             : HeldOutLayoutTarget::Either;
  p.retry_cap = j.value("retry_cap", 100);
  return p;
}

RegimeSpec regime_named(const std::string& name) {
  const auto r = parse_regime(name);
  if (!r) schema("unknown dataset " + name);
  return *r;
}

}  // namespace

std::string meta_to_json(const InstanceMeta& meta) {
  json j = {{"dataset", meta.dataset},
            {"configuration", std::string(to_string(meta.configuration))},
            {"split", std::string(to_string(meta.split))},
            {"id", meta.id},
            {"seed", meta.seed},
            {"generator", meta.generator}};
  if (meta.matrix) {
    json rules = json::array();
    for (const auto& a : meta.matrix->assignments) rules.push_back(rule_json(a));
    json panels = json::array();
    for (const auto& p : meta.matrix->context) panels.push_back(panel_json(p));
    for (const auto& p : meta.matrix->answers) panels.push_back(panel_json(p));
    j["assignments"] = rules;
    j["panels"] = panels;
  }
  return j.dump();
}

InstanceMeta meta_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    InstanceMeta m;
    m.dataset = j.at("dataset").get<std::string>();
    const auto cfg = parse_configuration(j.at("configuration").get<std::string>());
    const auto split = parse_split(j.at("split").get<std::string>());
    if (!cfg || !split) schema("unknown configuration or split in meta");
    m.configuration = *cfg;
    m.split = *split;
    m.id = j.at("id").get<std::int64_t>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.generator = j.value("generator", std::string());
    if (j.contains("panels")) {
      SymbolicMatrix mx;
      mx.configuration = m.configuration;
      mx.regime = regime_named(m.dataset);
      mx.split = m.split;
      mx.seed = m.seed;
      const auto& panels = j.at("panels");
      if (panels.size() != kImagePanels) schema("meta must describe 16 panels");
      for (std::size_t i = 0; i < kContextPanels; ++i) mx.context[i] = panel_from_json(panels[i]);
      for (std::size_t i = 0; i < kAnswerPanels; ++i) mx.answers[i] = panel_from_json(panels[kContextPanels + i]);
      for (const auto& r : j.at("assignments")) mx.assignments.push_back(rule_from_json(r));
      m.matrix = std::move(mx);
    }
    return m;
  } catch (const json::exception& e) {
    schema(std::string("meta: ") + e.what());
  }
}

bool operator==(const InstanceRecord& a, const InstanceRecord& b) {
  if (a.image != b.image || a.target != b.target || a.rules != b.rules) return false;
  if (a.meta.has_value() != b.meta.has_value()) return false;
  return !a.meta || meta_to_json(*a.meta) == meta_to_json(*b.meta);
}

std::string instance_filename(std::int64_t id, Split split) {
  return "RAVEN_" + std::to_string(id) + "_" + std::string(to_string(split)) + ".npz";
}

std::filesystem::path instance_path(const std::filesystem::path& corpus, Configuration configuration,
                                    std::int64_t id, Split split) {
  return corpus / std::string(to_string(configuration)) / instance_filename(id, split);
}

std::vector<std::uint8_t> encode_instance(const InstanceRecord& r) {
  if (r.image.size() != static_cast<std::size_t>(kImagePanels * kPanelPixels))
    schema("image must hold 16 x 80 x 80 bytes");
  std::vector<ZipEntry> entries;
  entries.push_back({"image.npy", encode_npy({"|u1", false, {kImagePanels, kPanelSize, kPanelSize}, r.image})});
  std::vector<std::uint8_t> target(8);
  for (int i = 0; i < 8; ++i)
    target[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(static_cast<std::uint64_t>(r.target) >> (8 * i));
  entries.push_back({"target.npy", encode_npy({"<i8", false, {}, target})});
  entries.push_back({"rules.npy", encode_npy({"|u1", false, {r.rules.bits.size()}, r.rules.bits})});
  if (r.meta) {
    const std::string text = meta_to_json(*r.meta);
    entries.push_back({"meta", std::vector<std::uint8_t>(text.begin(), text.end())});
  }
  return encode_zip(entries);
}

InstanceRecord decode_instance(std::span<const std::uint8_t> bytes) {
  const auto entries = decode_zip(bytes);
  auto member = [&](std::string_view name) -> const ZipEntry* {
    for (const auto& e : entries)
      if (e.name == name || e.name == std::string(name) + ".npy") return &e;
    return nullptr;
  };
  const ZipEntry* image = member("image");
  const ZipEntry* target = member("target");
  const ZipEntry* rules = member("rules");
  if (!image || !target || !rules) schema("archive lacks image, target or rules");

  InstanceRecord r;
  const NpyArray img = decode_npy(image->data);
  if (img.descr != "|u1" || img.fortran_order ||
      img.shape != std::vector<std::size_t>{kImagePanels, kPanelSize, kPanelSize})
    schema("image must be uint8 (16, 80, 80)");
  r.image = img.data;

  const NpyArray tgt = decode_npy(target->data);
  if (tgt.descr != "<i8" || tgt.element_count() != 1) schema("target must be an int64 scalar");
  std::uint64_t t = 0;
  for (int i = 0; i < 8; ++i) t |= static_cast<std::uint64_t>(tgt.data[static_cast<std::size_t>(i)]) << (8 * i);
  r.target = static_cast<std::int64_t>(t);
  if (r.target < 0 || r.target >= kAnswerPanels) schema("target out of range");

  const NpyArray rl = decode_npy(rules->data);
  if (rl.descr != "|u1" || rl.shape.size() != 1 || (rl.shape[0] != 40 && rl.shape[0] != 48))
    schema("rules must be uint8 of length 40 or 48");
  r.rules.bits = rl.data;

  if (const ZipEntry* meta = member("meta")) {
    r.meta = meta_from_json(std::string_view(reinterpret_cast<const char*>(meta->data.data()), meta->data.size()));
    if (r.meta->matrix) r.meta->matrix->target = static_cast<int>(r.target);
  }
  return r;
}

std::filesystem::path write_instance(const InstanceRecord& record, const std::filesystem::path& corpus) {
  if (!record.meta) schema("record without meta cannot be placed in a corpus");
  const auto path = instance_path(corpus, record.meta->configuration, record.meta->id, record.meta->split);
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw Error(ErrorKind::IoFailure, "cannot create " + path.parent_path().string());
  write_file(path, encode_instance(record));
  return path;
}

InstanceRecord read_instance(const std::filesystem::path& path) { return decode_instance(read_file(path)); }

SplitPlan plan_splits(std::int64_t total, std::span<const Configuration> configurations) {
  if (total < 5 || total % 5 != 0)
    throw Error(ErrorKind::BadTotal, std::to_string(total) + " is not a positive multiple of 5");
  if (configurations.empty()) throw Error(ErrorKind::BadTotal, "no configurations");
  SplitPlan plan;
  plan.totals = {total / 5 * 3, total / 5, total / 5};
  const auto n = static_cast<std::int64_t>(configurations.size());
  std::vector<std::array<std::int64_t, 3>> counts(configurations.size());
  for (std::size_t s = 0; s < 3; ++s)
    for (std::int64_t c = 0; c < n; ++c)
      counts[static_cast<std::size_t>(c)][s] = plan.totals[s] / n + (c < plan.totals[s] % n ? 1 : 0);
  for (std::size_t c = 0; c < configurations.size(); ++c) {
    ConfigurationPlan cp{configurations[c], {}};
    std::int64_t next = 0;
    for (std::size_t s = 0; s < 3; ++s) {
      cp.ranges[s] = {next, next + counts[c][s]};
      next += counts[c][s];
    }
    plan.configurations.push_back(cp);
  }
  return plan;
}

std::string manifest_to_json(const CorpusManifest& m) {
  json cfgs = json::object();
  for (const auto& [c, counts] : m.configurations)
    cfgs[std::string(to_string(c))] = {{"train", counts[0]}, {"val", counts[1]}, {"test", counts[2]}};
  const json j = {{"dataset", m.dataset},
                  {"dataset_kind", std::string(to_string(m.regime.kind()))},
                  {"held_out", m.regime.held_out() ? json(std::string(to_string(*m.regime.held_out()))) : json(nullptr)},
                  {"rule_dimension", m.rule_dimension},
                  {"splits", {{"train", m.split_counts[0]}, {"val", m.split_counts[1]}, {"test", m.split_counts[2]}}},
                  {"configurations", cfgs},
                  {"seed", m.seed},
                  {"generator", m.generator},
                  {"policy", policy_json(m.policy)},
                  {"rejected_attempts", m.rejected_attempts}};
  return j.dump(2) + "\n";
}

CorpusManifest manifest_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    CorpusManifest m;
    m.dataset = j.at("dataset").get<std::string>();
    m.regime = regime_named(m.dataset);
    m.rule_dimension = j.at("rule_dimension").get<int>();
    const auto& sp = j.at("splits");
    m.split_counts = {sp.at("train").get<std::int64_t>(), sp.at("val").get<std::int64_t>(),
                      sp.at("test").get<std::int64_t>()};
    // Keep the canonical configuration order rather than the JSON key order.
    for (Configuration c : kConfigurations) {
      const std::string name(to_string(c));
      if (!j.at("configurations").contains(name)) continue;
      const auto& cj = j.at("configurations").at(name);
      m.configurations.push_back({c, {cj.at("train").get<std::int64_t>(), cj.at("val").get<std::int64_t>(),
                                      cj.at("test").get<std::int64_t>()}});
    }
    m.seed = j.at("seed").get<std::uint64_t>();
    m.generator = j.value("generator", std::string());
    if (j.contains("policy")) m.policy = policy_from_json(j.at("policy"));
    m.rejected_attempts = j.value("rejected_attempts", std::int64_t{0});
    return m;
  } catch (const json::exception& e) {
    schema(std::string("manifest: ") + e.what());
  }
}

void write_manifest(const CorpusManifest& m, const std::filesystem::path& corpus) {
  const std::string text = manifest_to_json(m);
  write_file(corpus / "manifest.json",
             std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

CorpusManifest read_manifest(const std::filesystem::path& corpus) {
  const auto bytes = read_file(corpus / "manifest.json");
  return manifest_from_json(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

}  // namespace ravenforge
