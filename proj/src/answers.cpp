#include "ravenforge/answers.hpp"

#include <stdexcept>

#include "ravenforge/error.hpp"
#include "ravenforge/rules.hpp"
#include "ravenforge/solver.hpp"

namespace ravenforge {

void Modification::apply(SymbolicPanel& panel) const {
  if (component == kMeshComponent) {
    if (!panel.mesh) throw std::invalid_argument("panel has no mesh");
    panel.mesh->lines = set;
    return;
  }
  ComponentState& s = panel.components[static_cast<std::size_t>(component)];
  switch (attribute) {
    case Attribute::Position:
    case Attribute::Number: s.positions = set; break;
    case Attribute::Type: s.type = static_cast<std::uint8_t>(value); break;
    case Attribute::Size: s.size = static_cast<std::uint8_t>(value); break;
    case Attribute::Color: s.color = static_cast<std::uint8_t>(value); break;
  }
}

std::array<SymbolicPanel, 8> BisectionTree::leaves() const {
  std::array<SymbolicPanel, 8> out{};
  for (int i = 0; i < 8; ++i) {
    SymbolicPanel p = root;
    for (int l = 0; l < kTreeDepth; ++l)
      if ((i >> l) & 1) levels[static_cast<std::size_t>(l)].apply(p);
    out[static_cast<std::size_t>(i)] = p;
  }
  return out;
}

int modified_value(const SymbolicPanel& panel, const Modification& m) {
  if (m.component == kMeshComponent) {
    const SlotMask lines = panel.mesh ? panel.mesh->lines : SlotMask{0};
    return m.attribute == Attribute::Position ? lines : popcount(lines);
  }
  return attribute_value(panel.components[static_cast<std::size_t>(m.component)], m.attribute);
}

namespace {

// Any different value breaks a rule here: every rule fixes the third
// column of a row given the first two.
Modification alternative(const SymbolicPanel& correct, int component, Attribute a,
                         Configuration configuration, Rng& rng) {
  Modification m{component, a, 0, 0};
  if (component == kMeshComponent) {
    const SlotMask cur = correct.mesh->lines;
    if (a == Attribute::Number) {
      int n;
      do n = rng.between(1, kMeshSlots);
      while (n == popcount(cur));
      m.value = n;
      m.set = random_subset_of_size(kMeshSlots, n, rng);
    } else {
      do m.set = random_nonempty_subset(kMeshSlots, rng);
      while (m.set == cur);
      m.value = m.set;
    }
    return m;
  }
  const ComponentLayout& layout = component_layouts(configuration)[static_cast<std::size_t>(component)];
  const ComponentState& s = correct.components[static_cast<std::size_t>(component)];
  const int slots = layout.slot_count();
  switch (a) {
    case Attribute::Position:
      do m.set = random_nonempty_subset(slots, rng);
      while (m.set == s.positions);
      m.value = m.set;
      break;
    case Attribute::Number: {
      int n;
      do n = rng.between(1, slots);
      while (n == s.number());
      m.value = n;
      m.set = random_subset_of_size(slots, n, rng);
      break;
    }
    default: {
      const ScalarDomain d = scalar_domain(a, layout);
      const int cur = attribute_value(s, a);
      int v;
      do v = rng.between(d.lo, d.hi);
      while (v == cur);
      m.value = v;
      break;
    }
  }
  return m;
}

}  // namespace

AnswerSet generate_answers(const SymbolicPanel& correct,
                           std::span<const RuleAssignment> assignments,
                           Configuration configuration, bool has_mesh, Rng& rng) {
  std::vector<RuleAssignment> base;
  for (const RuleAssignment& a : assignments)
    if (a.component != kMeshComponent) base.push_back(a);
  const int needed = has_mesh ? kTreeDepth - 1 : kTreeDepth;
  if (static_cast<int>(base.size()) < needed)
    throw Error(ErrorKind::CannotDiversify,
                std::to_string(base.size()) + " modifiable attributes, need " + std::to_string(needed));
  if (has_mesh && (!correct.mesh || (!find_assignment(assignments, kMeshComponent, Attribute::Number) &&
                                         !find_assignment(assignments, kMeshComponent, Attribute::Position))))
    throw std::invalid_argument("mesh dataset without mesh rule");

  rng.shuffle(std::span<RuleAssignment>(base));
  AnswerSet out;
  out.tree.root = correct;
  int next_base = 0;
  const int mesh_level = has_mesh ? rng.below(kTreeDepth) : -1;
  for (int l = 0; l < kTreeDepth; ++l) {
    if (l == mesh_level) {
      const RuleAssignment* ma = find_assignment(assignments, kMeshComponent, Attribute::Number);
      if (!ma) ma = find_assignment(assignments, kMeshComponent, Attribute::Position);
      out.tree.levels[static_cast<std::size_t>(l)] =
          alternative(correct, kMeshComponent, ma->attribute, configuration, rng);
    } else {
      const RuleAssignment& a = base[static_cast<std::size_t>(next_base++)];
      out.tree.levels[static_cast<std::size_t>(l)] =
          alternative(correct, a.component, a.attribute, configuration, rng);
    }
  }

  const auto leaves = out.tree.leaves();
  std::array<int, 8> order{0, 1, 2, 3, 4, 5, 6, 7};
  rng.shuffle(std::span<int>(order));
  for (int i = 0; i < 8; ++i) {
    out.answers[static_cast<std::size_t>(i)] = leaves[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
    if (order[static_cast<std::size_t>(i)] == 0) out.target = i;
  }
  return out;
}

bool assert_unique(const SymbolicMatrix& matrix) {
  try {
    return solve(solver_input(matrix)) == matrix.target;
  } catch (const Error&) {
    return false;
  }
}

std::vector<int> mesh_only_distractors(const SymbolicMatrix& matrix) {
  std::vector<int> out;
  const SymbolicPanel& correct = matrix.correct();
  for (int i = 0; i < kAnswerPanels; ++i) {
    if (i == matrix.target) continue;
    const SymbolicPanel& p = matrix.answers[static_cast<std::size_t>(i)];
    if (p.same_base(correct) && p.mesh && correct.mesh && p.mesh != correct.mesh) out.push_back(i);
  }
  return out;
}

std::vector<AttributeTally> tally_answers(const SymbolicMatrix& matrix) {
  std::vector<AttributeTally> out;
  const SymbolicPanel& correct = matrix.correct();
  for (const RuleAssignment& a : matrix.assignments) {
    const Modification probe{a.component, a.attribute, 0, 0};
    const int want = modified_value(correct, probe);
    int matches = 0;
    for (const SymbolicPanel& p : matrix.answers)
      if (modified_value(p, probe) == want) ++matches;
    out.push_back({a.component, a.attribute, matches});
  }
  return out;
}

bool impartial(const SymbolicMatrix& matrix) {
  int modified = 0;
  for (const AttributeTally& t : tally_answers(matrix)) {
    if (t.matches == 4) ++modified;
    else if (t.matches != 8) return false;
  }
  return modified == kTreeDepth;
}

}  // namespace ravenforge
