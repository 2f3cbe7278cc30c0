#pragma once

// Symbolic solver used to certify generated matrices. It re-derives rule
// hypotheses from the context alone and never sees the stored target or
// the generator's assignments.

#include <array>
#include <span>
#include <vector>

#include "ravenforge/model.hpp"
#include "ravenforge/panel.hpp"

namespace ravenforge {

struct Hypotheses {
  int component = 0;  // kMeshComponent for the mesh
  Attribute attribute = Attribute::Type;
  std::vector<RuleKind> rules;  // empty: attribute left free by the generator
};

struct InducedRuleSet {
  std::vector<Hypotheses> entries;

  const Hypotheses* find(int component, Attribute attribute) const;
};

// Everything the solver may look at.
struct SolverInput {
  Configuration configuration = Configuration::Center;
  bool has_mesh = false;
  std::array<SymbolicPanel, kContextPanels> context{};
  std::array<SymbolicPanel, kAnswerPanels> answers{};
};

SolverInput solver_input(const SymbolicMatrix& m);

// Hypotheses consistent with the two complete rows, for every governable
// (component, attribute). An attribute may come out empty only if its
// coupled partner does not; otherwise throws Inconsistent.
InducedRuleSet induce(std::span<const SymbolicPanel, kContextPanels> context,
                      Configuration configuration, bool has_mesh);

// Whether `candidate` in cell 9 completes every non-empty hypothesis set.
bool completes(const InducedRuleSet& rules, std::span<const SymbolicPanel, kContextPanels> context,
               const SymbolicPanel& candidate, Configuration configuration);

// Indices of all answers that complete the matrix.
std::vector<int> consistent_answers(const SolverInput& input);

// The unique completing answer. Throws Ambiguous or Unsolvable otherwise.
int solve(const SolverInput& input);

// Checks a full or partial (2-row) grid of values against one hypothesis.
// Exposed for tests.
bool rows_satisfy(const RuleKind& rule, Attribute attribute, bool mesh, int slots,
                  std::span<const std::array<int, 3>> rows);

}  // namespace ravenforge
