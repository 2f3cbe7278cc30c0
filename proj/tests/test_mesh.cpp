#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracle.hpp"
#include "ravenforge/mesh.hpp"

using namespace ravenforge;

TEST_CASE("mesh slots are the twelve half segments of a 2x2 grid") {
  const auto& segs = mesh_segments();
  const auto expected = oracle::mesh_geometry();
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const oracle::Seg s{segs[i].x0, segs[i].y0, segs[i].x1, segs[i].y1};
    CHECK(s == expected[i]);
  }
}

TEST_CASE("rotate90 examples") {
  CHECK(rotate90(MeshState{0}).lines == 0);
  CHECK(rotate90(MeshState{full_mask(12)}).lines == full_mask(12));
  // Top edge, left half: after a clockwise turn it is the right edge, upper half.
  CHECK(rotate90(MeshState{1u << 0}).lines == (1u << 10));
}

TEST_CASE("rotate90 matches the geometric rotation on every slot and has order 4") {
  for (int slot = 0; slot < 12; ++slot)
    CHECK(rotate90_mask(static_cast<SlotMask>(1u << slot)) == (1u << oracle::rotate_slot(slot)));
  for (int m = 0; m < 4096; ++m) {
    const auto s = static_cast<SlotMask>(m);
    CHECK(rotate90_mask(rotate90_mask(rotate90_mask(rotate90_mask(s)))) == s);
    CHECK(popcount(rotate90_mask(s)) == popcount(s));
  }
}

TEST_CASE("mesh rule rows") {
  CHECK(apply_rule_row(RuleKind::progression(2), kMeshNumberDomain, 2) == Triple{2, 4, 6});
  CHECK(apply_rule_row(RuleKind::arithmetic(ArithOp::Minus), kMeshNumberDomain, 3, 1) == Triple{3, 1, 2});
  CHECK(apply_set_rule_row(RuleKind::arithmetic(ArithOp::Plus), kMeshPositionDomain, 0b11, 1u << 5) ==
        Triple{0b11, 1u << 5, 0b100011});
  const Triple rotated = apply_set_rule_row(RuleKind::progression(1), kMeshPositionDomain, 0b000100010011);
  CHECK(rotated[2] == rotate90_mask(rotate90_mask(0b000100010011)));
  CHECK(rotated[1] == oracle::rotate_mask(0b000100010011));
}

TEST_CASE("sampled mesh grids obey their rule and never go empty") {
  Rng rng(77);
  int position = 0;
  for (int i = 0; i < 5000; ++i) {
    const RuleAssignment a = sample_mesh_assignment(rng);
    REQUIRE(a.component == kMeshComponent);
    REQUIRE(is_coupled(a.attribute));
    if (a.attribute == Attribute::Position && a.rule.type == RuleType::Progression) CHECK(a.rule.increment == 1);
    position += a.attribute == Attribute::Position;
    const MeshGrid g = apply_mesh_rule(a, rng);
    oracle::Grid values{};
    for (int c = 0; c < 9; ++c) {
      REQUIRE(g[static_cast<std::size_t>(c)].count() >= 1);
      REQUIRE(g[static_cast<std::size_t>(c)].lines <= full_mask(12));
      const int v = a.attribute == Attribute::Position ? g[static_cast<std::size_t>(c)].lines
                                                       : g[static_cast<std::size_t>(c)].count();
      values[static_cast<std::size_t>(c / 3)][static_cast<std::size_t>(c % 3)] = v;
    }
    REQUIRE(oracle::grid_ok(a.rule, a.attribute == Attribute::Position, true, 12, values));
  }
  // One of the two attributes is sampled per matrix.
  CHECK(position == doctest::Approx(2500).epsilon(0.1));
}
