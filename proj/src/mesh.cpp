#include "ravenforge/mesh.hpp"

#include <stdexcept>

namespace ravenforge {

const std::array<MeshSegment, kMeshSlots>& mesh_segments() {
  static const std::array<MeshSegment, kMeshSlots> segments = [] {
    std::array<MeshSegment, kMeshSlots> s{};
    for (int line = 0; line < 3; ++line)
      for (int half = 0; half < 2; ++half) {
        s[static_cast<std::size_t>(line * 2 + half)] = {half, line, half + 1, line};
        s[static_cast<std::size_t>(6 + line * 2 + half)] = {line, half, line, half + 1};
      }
    return s;
  }();
  return segments;
}

namespace {
// Image of each slot under (x, y) -> (1 - y, x).
constexpr std::array<int, kMeshSlots> kRotate90 = {10, 11, 8, 9, 6, 7, 1, 0, 3, 2, 5, 4};
}  // namespace

SlotMask rotate90_mask(SlotMask lines) {
  SlotMask out = 0;
  for (int i = 0; i < kMeshSlots; ++i)
    if ((lines >> i) & 1u) out |= static_cast<SlotMask>(1u << kRotate90[static_cast<std::size_t>(i)]);
  return out;
}

MeshState rotate90(MeshState state) { return MeshState{rotate90_mask(state.lines)}; }

RuleAssignment sample_mesh_assignment(Rng& rng) {
  const Attribute a = rng.coin() ? Attribute::Number : Attribute::Position;
  std::vector<RuleKind> candidates;
  for (const RuleKind& r : all_rule_kinds()) {
    if (a == Attribute::Position) {
      // Rotation has no increment; keep a single Progression parameterisation.
      if (r.type == RuleType::Progression && r.increment != 1) continue;
      if (rule_feasible(r, kMeshPositionDomain)) candidates.push_back(r);
    } else if (rule_feasible(r, kMeshNumberDomain)) {
      candidates.push_back(r);
    }
  }
  return {kMeshComponent, a, pick_rule(candidates, rng)};
}

MeshGrid apply_mesh_rule(const RuleAssignment& assignment, Rng& rng, int retry_cap) {
  if (assignment.component != kMeshComponent || !is_coupled(assignment.attribute))
    throw std::invalid_argument("not a mesh assignment");
  MeshGrid out{};
  if (assignment.attribute == Attribute::Number) {
    const ValueGrid counts = sample_scalar_grid(assignment.rule, kMeshNumberDomain, rng);
    for (int i = 0; i < 9; ++i)
      out[static_cast<std::size_t>(i)].lines = random_subset_of_size(
          kMeshSlots, counts[static_cast<std::size_t>(i / 3)][static_cast<std::size_t>(i % 3)], rng);
  } else {
    const ValueGrid sets = sample_set_grid(assignment.rule, kMeshPositionDomain, rng, retry_cap);
    for (int i = 0; i < 9; ++i)
      out[static_cast<std::size_t>(i)].lines = static_cast<SlotMask>(
          sets[static_cast<std::size_t>(i / 3)][static_cast<std::size_t>(i % 3)]);
  }
  return out;
}

}  // namespace ravenforge
