#pragma once

// Impartial answer-set construction. Three tree levels each pick one
// governed attribute and one alternative value that breaks its rule; the
// eight leaves are every keep/swap combination, so each modified value is
// carried by exactly half of the answers.

#include <array>
#include <span>
#include <vector>

#include "ravenforge/model.hpp"
#include "ravenforge/panel.hpp"
#include "ravenforge/random.hpp"

namespace ravenforge {

// Replacement value for one (component, attribute). `value` is the scalar
// value (entity or line count for Number); `set` carries the slot mask for
// Position, and the freshly drawn positions for Number.
struct Modification {
  int component = 0;  // kMeshComponent for the mesh
  Attribute attribute = Attribute::Type;
  int value = 0;
  SlotMask set = 0;

  void apply(SymbolicPanel& panel) const;
};

inline constexpr int kTreeDepth = 3;

struct BisectionTree {
  SymbolicPanel root;
  std::array<Modification, kTreeDepth> levels{};

  // Leaf i applies level l iff bit l of i is set; leaf 0 is the root.
  std::array<SymbolicPanel, 8> leaves() const;
};

struct AnswerSet {
  std::array<SymbolicPanel, kAnswerPanels> answers{};
  int target = 0;
  BisectionTree tree;
};

// Builds the tree over `correct` and shuffles its leaves. For mesh datasets
// one level always modifies the mesh, which makes the leaf that only takes
// that level a mesh-only distractor. Throws CannotDiversify when too few
// governed attributes exist.
AnswerSet generate_answers(const SymbolicPanel& correct,
                           std::span<const RuleAssignment> assignments,
                           Configuration configuration, bool has_mesh, Rng& rng);

// Value of the attribute a modification targets, read from a panel.
int modified_value(const SymbolicPanel& panel, const Modification& m);

// True iff the solver finds exactly one completing answer and it is the
// stored target.
bool assert_unique(const SymbolicMatrix& matrix);

// Index of an answer that equals the correct one in every base component
// and differs in the mesh, if any.
std::vector<int> mesh_only_distractors(const SymbolicMatrix& matrix);

// For each governed attribute, how many answers share the correct value.
struct AttributeTally {
  int component;
  Attribute attribute;
  int matches;
};
std::vector<AttributeTally> tally_answers(const SymbolicMatrix& matrix);

// Impartiality holds when exactly three governed attributes differ among
// the answers and each is matched by exactly four of them.
bool impartial(const SymbolicMatrix& matrix);

}  // namespace ravenforge
