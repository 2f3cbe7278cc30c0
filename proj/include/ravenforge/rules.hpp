#pragma once

// Rule application and context-grid generation for the base components.

#include <array>
#include <span>
#include <vector>

#include "ravenforge/model.hpp"
#include "ravenforge/panel.hpp"
#include "ravenforge/random.hpp"

namespace ravenforge {

// Integer value range of a scalar attribute. Arithmetic, when allowed, is
// third = first (+|-) second on the value itself, with second >= 1.
struct ScalarDomain {
  int lo = 0;
  int hi = 0;
  bool arithmetic = true;

  bool contains(int v) const { return v >= lo && v <= hi; }
  int size() const { return hi - lo + 1; }
};

ScalarDomain scalar_domain(Attribute a, const ComponentLayout& layout);

// Set-valued domain: subsets of `slots` positions. Progression shifts every
// slot index cyclically by the increment, or for the mesh rotates the line
// pattern a quarter turn clockwise.
struct SetDomain {
  int slots = 0;
  bool rotate = false;

  SlotMask full() const { return full_mask(slots); }
};

using Triple = std::array<int, 3>;
using ValueGrid = std::array<Triple, 3>;  // [row][column]

// Row of a row-local rule (Constant, Progression, Arithmetic) from its free
// values. Throws DomainOverflow if a value leaves the domain.
Triple apply_rule_row(const RuleKind& rule, const ScalarDomain& domain, int first, int second = 0);

// Same for set-valued attributes. Throws EmptyResult for an empty
// difference and DomainOverflow for out-of-range operands.
Triple apply_set_rule_row(const RuleKind& rule, const SetDomain& domain, SlotMask first,
                          SlotMask second = 0);

// Latin-square placement of three values: row r, column c takes
// values[(c + r * shift) % 3]; shift is 1 or 2.
ValueGrid distribute_three_rows(const Triple& values, int shift);

SlotMask shift_slots(SlotMask m, int slots, int k);

bool rule_feasible(const RuleKind& rule, const ScalarDomain& domain);
bool rule_feasible(const RuleKind& rule, const SetDomain& domain);

// Parameterised rules of the allowed types that the attribute's domain in
// this layout can realise.
std::vector<RuleKind> feasible_rules(Attribute a, const ComponentLayout& layout, RuleSet allowed);

// Picks a rule type uniformly, then one of its parameterisations uniformly.
RuleKind pick_rule(std::span<const RuleKind> candidates, Rng& rng);

ValueGrid sample_scalar_grid(const RuleKind& rule, const ScalarDomain& domain, Rng& rng);
ValueGrid sample_set_grid(const RuleKind& rule, const SetDomain& domain, Rng& rng, int retry_cap);

SlotMask random_nonempty_subset(int slots, Rng& rng);
SlotMask random_subset_of_size(int slots, int count, Rng& rng);

// Which coupled attribute carries the non-Constant rule in A/Position test
// matrices.
enum class HeldOutLayoutTarget { Either, Position, Number };

struct GeneratorPolicy {
  HeldOutLayoutTarget a_position_test_target = HeldOutLayoutTarget::Either;
  int retry_cap = 100;
};

// One rule per component for the coupled Position/Number pair (where the
// layout has more than one slot) and one each for Type, Size and Color.
// Throws InfeasibleRegime when the regime leaves no realisable rule.
std::vector<RuleAssignment> sample_assignments(const RegimeSpec& regime,
                                               Configuration configuration, Split split,
                                               Rng& rng, const GeneratorPolicy& policy = {});

struct ContextGrid {
  std::array<SymbolicPanel, kContextPanels> context{};
  SymbolicPanel correct;
};

// Fills all nine cells so that every row satisfies every assignment.
// Ungoverned values (angles, free positions) are sampled independently per
// panel. Throws GenerationRetryExhausted if a grid cannot be realised.
ContextGrid generate_context(std::span<const RuleAssignment> assignments,
                             Configuration configuration, Rng& rng,
                             const GeneratorPolicy& policy = {});

const RuleAssignment* find_assignment(std::span<const RuleAssignment> assignments, int component,
                                      Attribute attribute);

}  // namespace ravenforge
