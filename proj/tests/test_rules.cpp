#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "oracle.hpp"
#include "ravenforge/error.hpp"
#include "ravenforge/rules.hpp"

using namespace ravenforge;

namespace {

const ComponentLayout& layout(Configuration c, int component = 0) {
  return component_layouts(c)[static_cast<std::size_t>(component)];
}

std::vector<RegimeSpec> all_regimes() {
  std::vector<RegimeSpec> r = {RegimeSpec::iraven(), RegimeSpec::mesh()};
  for (Attribute a : {Attribute::Color, Attribute::Position, Attribute::Size, Attribute::Type})
    r.push_back(RegimeSpec::attributeless(a));
  return r;
}

struct Draft {
  Configuration configuration;
  std::vector<RuleAssignment> assignments;
  std::array<SymbolicPanel, kContextPanels> context;
};

}  // namespace

TEST_CASE("apply_rule_row examples") {
  const ScalarDomain type = scalar_domain(Attribute::Type, layout(Configuration::Center));
  const ScalarDomain size = scalar_domain(Attribute::Size, layout(Configuration::Center));
  const ScalarDomain number = scalar_domain(Attribute::Number, layout(Configuration::Grid3x3));
  CHECK(apply_rule_row(RuleKind::constant(), type, 1) == Triple{1, 1, 1});
  CHECK(apply_rule_row(RuleKind::progression(1), size, 2) == Triple{2, 3, 4});
  CHECK(apply_rule_row(RuleKind::progression(-2), size, 5) == Triple{5, 3, 1});
  CHECK(apply_rule_row(RuleKind::arithmetic(ArithOp::Minus), number, 3, 1) == Triple{3, 1, 2});
  CHECK(apply_rule_row(RuleKind::arithmetic(ArithOp::Plus), number, 4, 5) == Triple{4, 5, 9});
  CHECK_THROWS_AS(apply_rule_row(RuleKind::progression(2), size, 3), Error);
  CHECK_THROWS_AS(apply_rule_row(RuleKind::arithmetic(ArithOp::Plus), number, 5, 5), Error);
  CHECK_THROWS_AS(apply_rule_row(RuleKind::arithmetic(ArithOp::Minus), number, 2, 2), Error);
}

TEST_CASE("set rules on positions") {
  const SetDomain grid{4, false};
  CHECK(apply_set_rule_row(RuleKind::arithmetic(ArithOp::Plus), grid, 0b0011, 0b0100) ==
        Triple{0b0011, 0b0100, 0b0111});
  CHECK(apply_set_rule_row(RuleKind::arithmetic(ArithOp::Minus), grid, 0b0111, 0b0100) ==
        Triple{0b0111, 0b0100, 0b0011});
  try {
    apply_set_rule_row(RuleKind::arithmetic(ArithOp::Minus), grid, 0b0011, 0b0011);
    FAIL("empty difference accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyResult);
  }
  for (int k : kIncrements)
    for (int m = 1; m < 16; ++m) CHECK(shift_slots(static_cast<SlotMask>(m), 4, k) == oracle::shift_mask(m, 4, k));
}

TEST_CASE("distribute_three: every row is a permutation, columns distinct") {
  for (int shift : {1, 2}) {
    const ValueGrid g = distribute_three_rows({4, 7, 9}, shift);
    CHECK(oracle::grid_ok(RuleKind::distribute_three(), false, false, 0, g));
  }
}

TEST_CASE("Type never takes Arithmetic, single-slot layouts have no layout rule") {
  for (Configuration c : kConfigurations)
    for (const ComponentLayout& l : component_layouts(c)) {
      const auto types = feasible_rules(Attribute::Type, l, RuleSet::all());
      CHECK(std::none_of(types.begin(), types.end(), [](const RuleKind& r) { return r.type == RuleType::Arithmetic; }));
      if (!l.layout_governable()) {
        // Brute force: no non-constant Number rule can produce three in-range counts on one slot.
        const ScalarDomain d = scalar_domain(Attribute::Number, l);
        for (const RuleKind& r : all_rule_kinds()) {
          if (r.type == RuleType::Constant) continue;
          bool realisable = false;
          for (int a = d.lo; a <= d.hi; ++a)
            for (int b = d.lo; b <= d.hi; ++b)
              for (int x = d.lo; x <= d.hi; ++x)
                if (r.type != RuleType::DistributeThree && oracle::row_ok(r, false, false, 1, a, b, x)) realisable = true;
          CHECK_FALSE(realisable);
        }
      }
    }
}

TEST_CASE("sample_assignments examples") {
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    const auto a = sample_assignments(RegimeSpec::attributeless(Attribute::Color), Configuration::Center, Split::Train, rng);
    const RuleAssignment* color = find_assignment(a, 0, Attribute::Color);
    REQUIRE(color);
    CHECK(color->rule.type == RuleType::Constant);

    const auto t = sample_assignments(RegimeSpec::attributeless(Attribute::Color), Configuration::LeftRight, Split::Test, rng);
    for (int c = 0; c < 2; ++c) {
      const RuleAssignment* r = find_assignment(t, c, Attribute::Color);
      REQUIRE(r);
      CHECK(r->rule.type != RuleType::Constant);
    }

    for (const auto& x : sample_assignments(RegimeSpec::iraven(), Configuration::Center, Split::Train, rng))
      CHECK_FALSE(is_coupled(x.attribute));
  }
}

TEST_CASE("assignments: one per governable pair, rules allowed") {
  Rng rng(5);
  for (const RegimeSpec& regime : all_regimes())
    for (Configuration c : kConfigurations)
      for (Split s : kSplits)
        for (int i = 0; i < 20; ++i) {
          const auto as = sample_assignments(regime, c, s, rng);
          for (int comp = 0; comp < component_count(c); ++comp) {
            int layout_rules = 0;
            for (Attribute a : kAttributes) {
              const auto n = std::count_if(as.begin(), as.end(), [&](const RuleAssignment& x) {
                return x.component == comp && x.attribute == a;
              });
              CHECK(n <= 1);
              if (is_coupled(a)) layout_rules += static_cast<int>(n);
              else CHECK(n == 1);
            }
            CHECK(layout_rules == (layout(c, comp).layout_governable() ? 1 : 0));
          }
          for (const auto& x : as) CHECK(allowed_rules(regime, x.attribute, s).contains(x.rule.type));
        }
}

TEST_CASE("generated grids obey every assignment and stay in range") {
  Rng rng(2024);
  int checked = 0;
  for (int i = 0; i < 10000; ++i) {
    const Configuration c = kConfigurations[static_cast<std::size_t>(i % 7)];
    const RegimeSpec regime = all_regimes()[static_cast<std::size_t>(i / 7 % 6)];
    const Split s = kSplits[static_cast<std::size_t>(i % 3)];
    Draft d{c, sample_assignments(regime, c, s, rng), {}};
    const ContextGrid g = generate_context(d.assignments, c, rng);
    d.context = g.context;
    REQUIRE(oracle::satisfies_all(d, g.correct));
    for (int cell = 0; cell < 9; ++cell) {
      const SymbolicPanel& p = cell < 8 ? g.context[static_cast<std::size_t>(cell)] : g.correct;
      REQUIRE(p.component_count == component_count(c));
      for (int comp = 0; comp < p.component_count; ++comp) {
        const ComponentState& st = p.components[static_cast<std::size_t>(comp)];
        REQUIRE(st.positions != 0);
        REQUIRE(st.positions <= full_mask(layout(c, comp).slot_count()));
        REQUIRE(st.type < kTypeCount);
        REQUIRE(st.size < kSizeCount);
        REQUIRE(st.color < kColorCount);
        for (auto angle : st.angles) REQUIRE(angle < kAngleCount);
      }
    }
    ++checked;
  }
  CHECK(checked == 10000);
}

TEST_CASE("all-Constant assignment gives identical panels up to angles") {
  std::vector<RuleAssignment> as = {{0, Attribute::Position, RuleKind::constant()},
                                    {0, Attribute::Type, RuleKind::constant()},
                                    {0, Attribute::Size, RuleKind::constant()},
                                    {0, Attribute::Color, RuleKind::constant()}};
  Rng rng(3);
  const ContextGrid g = generate_context(as, Configuration::Grid2x2, rng);
  auto strip = [](SymbolicPanel p) {
    for (auto& c : p.components) c.angles = {};
    return p;
  };
  for (const auto& p : g.context) CHECK(strip(p) == strip(g.correct));
}

TEST_CASE("Position Constant keeps positions identical along rows") {
  Rng rng(8);
  for (int i = 0; i < 100; ++i) {
    const auto as = sample_assignments(RegimeSpec::attributeless(Attribute::Position), Configuration::Grid3x3,
                                       Split::Train, rng);
    const ContextGrid g = generate_context(as, Configuration::Grid3x3, rng);
    for (int r = 0; r < 2; ++r)
      for (int c = 1; c < 3; ++c)
        CHECK(g.context[static_cast<std::size_t>(r * 3 + c)].components[0].positions ==
              g.context[static_cast<std::size_t>(r * 3)].components[0].positions);
  }
}

TEST_CASE("same seed, same grid") {
  for (Configuration c : kConfigurations) {
    Rng a(99), b(99);
    const auto as = sample_assignments(RegimeSpec::iraven(), c, Split::Test, a);
    const auto bs = sample_assignments(RegimeSpec::iraven(), c, Split::Test, b);
    CHECK(as == bs);
    const ContextGrid ga = generate_context(as, c, a);
    const ContextGrid gb = generate_context(bs, c, b);
    CHECK(ga.context == gb.context);
    CHECK(ga.correct == gb.correct);
  }
}

TEST_CASE("pick_rule is uniform over rule types first") {
  const std::vector<RuleKind> cands = {RuleKind::constant(), RuleKind::progression(-2), RuleKind::progression(-1),
                                       RuleKind::progression(1), RuleKind::progression(2)};
  Rng rng(1);
  int constant = 0;
  constexpr int n = 20000;
  for (int i = 0; i < n; ++i) constant += pick_rule(cands, rng).type == RuleType::Constant;
  CHECK(constant == doctest::Approx(n / 2).epsilon(0.05));
}
