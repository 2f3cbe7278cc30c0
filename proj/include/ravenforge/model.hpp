#pragma once

// Symbolic vocabulary shared by every stage of the generator: attributes,
// rules, splits, configurations, dataset regimes and the rule-availability
// function.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ravenforge {

enum class Attribute : std::uint8_t { Position, Number, Type, Size, Color };

inline constexpr std::array<Attribute, 5> kAttributes = {
    Attribute::Position, Attribute::Number, Attribute::Type, Attribute::Size,
    Attribute::Color};

// Position and Number constrain each other: changing the entity count
// necessarily changes the occupied slots.
constexpr bool is_coupled(Attribute a) {
  return a == Attribute::Position || a == Attribute::Number;
}

constexpr Attribute coupled_partner(Attribute a) {
  return a == Attribute::Position ? Attribute::Number : Attribute::Position;
}

enum class RuleType : std::uint8_t { Constant, Progression, Arithmetic, DistributeThree };

inline constexpr std::array<RuleType, 4> kRuleTypes = {
    RuleType::Constant, RuleType::Progression, RuleType::Arithmetic,
    RuleType::DistributeThree};

enum class ArithOp : std::uint8_t { Plus, Minus };

// A rule together with its parameters. Progression carries a nonzero
// increment in {-2,-1,+1,+2}; Arithmetic carries an operator. On set-valued
// attributes Plus is union and Minus is difference.
struct RuleKind {
  RuleType type = RuleType::Constant;
  std::int8_t increment = 0;
  ArithOp op = ArithOp::Plus;

  static constexpr RuleKind constant() { return {RuleType::Constant, 0, ArithOp::Plus}; }
  static constexpr RuleKind progression(int k) {
    return {RuleType::Progression, static_cast<std::int8_t>(k), ArithOp::Plus};
  }
  static constexpr RuleKind arithmetic(ArithOp o) { return {RuleType::Arithmetic, 0, o}; }
  static constexpr RuleKind distribute_three() {
    return {RuleType::DistributeThree, 0, ArithOp::Plus};
  }

  friend constexpr bool operator==(const RuleKind&, const RuleKind&) = default;
};

inline constexpr std::array<int, 4> kIncrements = {-2, -1, 1, 2};

// Every parameterised rule, in a fixed order.
std::vector<RuleKind> all_rule_kinds();

enum class Split : std::uint8_t { Train, Validation, Test };

inline constexpr std::array<Split, 3> kSplits = {Split::Train, Split::Validation, Split::Test};

enum class Configuration : std::uint8_t {
  Center,
  Grid2x2,
  Grid3x3,
  LeftRight,
  UpDown,
  OutInCenter,
  OutInGrid
};

inline constexpr std::array<Configuration, 7> kConfigurations = {
    Configuration::Center,    Configuration::Grid2x2,     Configuration::Grid3x3,
    Configuration::LeftRight, Configuration::UpDown,      Configuration::OutInCenter,
    Configuration::OutInGrid};

inline constexpr int kMaxComponents = 2;
inline constexpr int kMeshComponent = 2;  // component index used by mesh assignments
inline constexpr int kMaxSlots = 9;

// Slot geometry in permille of the panel edge.
struct SlotGeometry {
  int cx;
  int cy;
  int extent;
};

struct ComponentLayout {
  std::vector<SlotGeometry> slots;

  int slot_count() const { return static_cast<int>(slots.size()); }
  // Position/Number can only vary when the layout has more than one slot.
  bool layout_governable() const { return slots.size() > 1; }
};

const std::vector<ComponentLayout>& component_layouts(Configuration c);
int component_count(Configuration c);

enum class DatasetKind : std::uint8_t { IRaven, IRavenMesh, Attributeless };

// Which generation regime a corpus follows. For Attributeless the held-out
// attribute is set; holding out Position (or Number) holds out both.
class RegimeSpec {
 public:
  static RegimeSpec iraven() { return RegimeSpec(DatasetKind::IRaven, std::nullopt); }
  static RegimeSpec mesh() { return RegimeSpec(DatasetKind::IRavenMesh, std::nullopt); }
  static RegimeSpec attributeless(Attribute held_out) {
    return RegimeSpec(DatasetKind::Attributeless, held_out);
  }

  DatasetKind kind() const { return kind_; }
  std::optional<Attribute> held_out() const { return held_out_; }
  bool has_mesh() const { return kind_ == DatasetKind::IRavenMesh; }
  bool is_held_out(Attribute a) const;

  friend bool operator==(const RegimeSpec&, const RegimeSpec&) = default;

 private:
  RegimeSpec(DatasetKind k, std::optional<Attribute> h) : kind_(k), held_out_(h) {}
  DatasetKind kind_;
  std::optional<Attribute> held_out_;
};

// Small bitset over RuleType.
class RuleSet {
 public:
  constexpr RuleSet() = default;
  static constexpr RuleSet all() { return RuleSet(0b1111); }
  static constexpr RuleSet only(RuleType t) { return RuleSet(bit(t)); }

  constexpr bool contains(RuleType t) const { return (bits_ & bit(t)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return __builtin_popcount(bits_); }
  constexpr RuleSet without(RuleType t) const { return RuleSet(bits_ & ~bit(t)); }
  constexpr RuleSet intersect(RuleSet o) const { return RuleSet(bits_ & o.bits_); }
  constexpr RuleSet unite(RuleSet o) const { return RuleSet(bits_ | o.bits_); }
  std::vector<RuleType> members() const;

  friend constexpr bool operator==(RuleSet, RuleSet) = default;

 private:
  constexpr explicit RuleSet(unsigned b) : bits_(b) {}
  static constexpr unsigned bit(RuleType t) { return 1u << static_cast<unsigned>(t); }
  unsigned bits_ = 0;
};

// The rule-availability function: which rules may govern `attribute` in
// `split` under `regime`.
RuleSet allowed_rules(const RegimeSpec& regime, Attribute attribute, Split split);

// One governed (component, attribute) pair. Mesh rules use component
// kMeshComponent with attribute Number or Position.
struct RuleAssignment {
  int component = 0;
  Attribute attribute = Attribute::Type;
  RuleKind rule;

  friend constexpr bool operator==(const RuleAssignment&, const RuleAssignment&) = default;
};

struct RuleSlot {
  int component;
  Attribute attribute;
  RuleType rule;

  friend constexpr bool operator==(const RuleSlot&, const RuleSlot&) = default;
};

// Canonical index order of the sparse rule encoding. Slot index is
//   component * 20 + attribute * 4 + rule        for base components 0 and 1
//   40 + (Position ? 0 : 4) + rule              for the mesh component
// giving 40 slots without a mesh and 48 with one, independent of the
// configuration.
std::vector<RuleSlot> rule_attribute_slots(DatasetKind kind, Configuration configuration);
int rule_dimension(DatasetKind kind);
std::optional<int> slot_index(DatasetKind kind, int component, Attribute attribute,
                              RuleType rule);

// Names.
std::string_view to_string(Attribute a);
std::string_view to_string(RuleType r);
std::string_view to_string(Split s);
std::string_view to_string(Configuration c);  // directory name
std::string_view display_name(Configuration c);
std::string_view to_string(DatasetKind k);
std::string to_string(const RuleKind& r);
std::string to_string(const RegimeSpec& r);  // "iraven", "mesh", "a-color", ...

std::optional<Attribute> parse_attribute(std::string_view s);
std::optional<RuleType> parse_rule_type(std::string_view s);
std::optional<Split> parse_split(std::string_view s);
std::optional<Configuration> parse_configuration(std::string_view s);
std::optional<RegimeSpec> parse_regime(std::string_view s);

}  // namespace ravenforge
