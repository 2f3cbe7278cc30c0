#include "ravenforge/model.hpp"

#include <algorithm>

namespace ravenforge {

std::vector<RuleKind> all_rule_kinds() {
  std::vector<RuleKind> out;
  out.push_back(RuleKind::constant());
  for (int k : kIncrements) out.push_back(RuleKind::progression(k));
  out.push_back(RuleKind::arithmetic(ArithOp::Plus));
  out.push_back(RuleKind::arithmetic(ArithOp::Minus));
  out.push_back(RuleKind::distribute_three());
  return out;
}

std::vector<RuleType> RuleSet::members() const {
  std::vector<RuleType> out;
  for (RuleType t : kRuleTypes)
    if (contains(t)) out.push_back(t);
  return out;
}

namespace {

std::vector<SlotGeometry> grid(int n, int lo, int hi, int extent) {
  std::vector<SlotGeometry> out;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const int step = n == 1 ? 0 : (hi - lo) / (n - 1);
      out.push_back({lo + c * step, lo + r * step, extent});
    }
  return out;
}

const std::array<std::vector<ComponentLayout>, 7>& layout_table() {
  static const std::array<std::vector<ComponentLayout>, 7> table = {{
      {{{{500, 500, 1000}}}},
      {{grid(2, 250, 750, 500)}},
      {{grid(3, 167, 833, 333)}},
      {{{{250, 500, 500}}}, {{{750, 500, 500}}}},
      {{{{500, 250, 500}}}, {{{500, 750, 500}}}},
      {{{{500, 500, 1000}}}, {{{500, 500, 330}}}},
      {{{{500, 500, 1000}}}, {grid(2, 420, 580, 160)}},
  }};
  return table;
}

}  // namespace

const std::vector<ComponentLayout>& component_layouts(Configuration c) {
  return layout_table()[static_cast<std::size_t>(c)];
}

int component_count(Configuration c) {
  return static_cast<int>(component_layouts(c).size());
}

bool RegimeSpec::is_held_out(Attribute a) const {
  if (kind_ != DatasetKind::Attributeless || !held_out_) return false;
  if (*held_out_ == a) return true;
  return is_coupled(*held_out_) && is_coupled(a);
}

RuleSet allowed_rules(const RegimeSpec& regime, Attribute attribute, Split split) {
  if (!regime.is_held_out(attribute)) return RuleSet::all();
  if (split == Split::Test) return RuleSet::all().without(RuleType::Constant);
  return RuleSet::only(RuleType::Constant);
}

int rule_dimension(DatasetKind kind) { return kind == DatasetKind::IRavenMesh ? 48 : 40; }

std::optional<int> slot_index(DatasetKind kind, int component, Attribute attribute,
                              RuleType rule) {
  const int r = static_cast<int>(rule);
  if (component == kMeshComponent) {
    if (kind != DatasetKind::IRavenMesh || !is_coupled(attribute)) return std::nullopt;
    return 40 + (attribute == Attribute::Position ? 0 : 4) + r;
  }
  if (component < 0 || component >= kMaxComponents) return std::nullopt;
  return component * 20 + static_cast<int>(attribute) * 4 + r;
}

std::vector<RuleSlot> rule_attribute_slots(DatasetKind kind, Configuration /*configuration*/) {
  std::vector<RuleSlot> out;
  for (int c = 0; c < kMaxComponents; ++c)
    for (Attribute a : kAttributes)
      for (RuleType r : kRuleTypes) out.push_back({c, a, r});
  if (kind == DatasetKind::IRavenMesh)
    for (Attribute a : {Attribute::Position, Attribute::Number})
      for (RuleType r : kRuleTypes) out.push_back({kMeshComponent, a, r});
  return out;
}

std::string_view to_string(Attribute a) {
  switch (a) {
    case Attribute::Position: return "Position";
    case Attribute::Number: return "Number";
    case Attribute::Type: return "Type";
    case Attribute::Size: return "Size";
    case Attribute::Color: return "Color";
  }
  return "?";
}

std::string_view to_string(RuleType r) {
  switch (r) {
    case RuleType::Constant: return "Constant";
    case RuleType::Progression: return "Progression";
    case RuleType::Arithmetic: return "Arithmetic";
    case RuleType::DistributeThree: return "DistributeThree";
  }
  return "?";
}

std::string_view to_string(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Validation: return "val";
    case Split::Test: return "test";
  }
  return "?";
}

namespace {
constexpr std::array<std::string_view, 7> kDirNames = {
    "center_single",
    "distribute_four",
    "distribute_nine",
    "left_center_single_right_center_single",
    "up_center_single_down_center_single",
    "in_center_single_out_center_single",
    "in_distribute_four_out_center_single"};
constexpr std::array<std::string_view, 7> kDisplayNames = {
    "Center", "2x2Grid", "3x3Grid", "L-R", "U-D", "O-IC", "O-IG"};
constexpr std::array<std::string_view, 7> kShortNames = {
    "center", "2x2", "3x3", "lr", "ud", "oic", "oig"};
}  // namespace

std::string_view to_string(Configuration c) { return kDirNames[static_cast<std::size_t>(c)]; }

std::string_view display_name(Configuration c) {
  return kDisplayNames[static_cast<std::size_t>(c)];
}

std::string_view to_string(DatasetKind k) {
  switch (k) {
    case DatasetKind::IRaven: return "iraven";
    case DatasetKind::IRavenMesh: return "iraven-mesh";
    case DatasetKind::Attributeless: return "attributeless";
  }
  return "?";
}

std::string to_string(const RuleKind& r) {
  std::string s(to_string(r.type));
  if (r.type == RuleType::Progression)
    s += (r.increment > 0 ? "(+" : "(") + std::to_string(r.increment) + ")";
  if (r.type == RuleType::Arithmetic) s += r.op == ArithOp::Plus ? "(plus)" : "(minus)";
  return s;
}

std::string to_string(const RegimeSpec& r) {
  switch (r.kind()) {
    case DatasetKind::IRaven: return "iraven";
    case DatasetKind::IRavenMesh: return "mesh";
    case DatasetKind::Attributeless: {
      std::string s = "a-";
      for (char ch : to_string(*r.held_out()))
        s += static_cast<char>(ch >= 'A' && ch <= 'Z' ? ch - 'A' + 'a' : ch);
      return s;
    }
  }
  return "?";
}

std::optional<Attribute> parse_attribute(std::string_view s) {
  for (Attribute a : kAttributes)
    if (to_string(a) == s) return a;
  return std::nullopt;
}

std::optional<RuleType> parse_rule_type(std::string_view s) {
  for (RuleType r : kRuleTypes)
    if (to_string(r) == s) return r;
  return std::nullopt;
}

std::optional<Split> parse_split(std::string_view s) {
  for (Split sp : kSplits)
    if (to_string(sp) == s) return sp;
  if (s == "validation") return Split::Validation;
  return std::nullopt;
}

std::optional<Configuration> parse_configuration(std::string_view s) {
  for (std::size_t i = 0; i < kConfigurations.size(); ++i)
    if (kDirNames[i] == s || kDisplayNames[i] == s || kShortNames[i] == s)
      return kConfigurations[i];
  return std::nullopt;
}

std::optional<RegimeSpec> parse_regime(std::string_view s) {
  if (s == "iraven") return RegimeSpec::iraven();
  if (s == "mesh") return RegimeSpec::mesh();
  if (s == "a-color") return RegimeSpec::attributeless(Attribute::Color);
  if (s == "a-position") return RegimeSpec::attributeless(Attribute::Position);
  if (s == "a-size") return RegimeSpec::attributeless(Attribute::Size);
  if (s == "a-type") return RegimeSpec::attributeless(Attribute::Type);
  return std::nullopt;
}

}  // namespace ravenforge
