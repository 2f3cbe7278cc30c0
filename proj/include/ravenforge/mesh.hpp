#pragma once

// Line-grid overlay: 12 half-segments of the three horizontal and three
// vertical lines of a 2x2 grid.
//
// Slot numbering, coordinates in halves of the panel edge (y down):
//   0..5   horizontal, slot = row * 2 + half, line y = row, x in [half, half+1]
//   6..11  vertical,   slot = 6 + col * 2 + half, line x = col, y in [half, half+1]

#include <array>

#include "ravenforge/model.hpp"
#include "ravenforge/panel.hpp"
#include "ravenforge/random.hpp"
#include "ravenforge/rules.hpp"

namespace ravenforge {

struct MeshSegment {
  int x0, y0, x1, y1;  // halves of the panel edge, 0..2
};

const std::array<MeshSegment, kMeshSlots>& mesh_segments();

// Quarter turn clockwise about the panel centre.
MeshState rotate90(MeshState state);
SlotMask rotate90_mask(SlotMask lines);

inline constexpr SetDomain kMeshPositionDomain{kMeshSlots, true};
inline constexpr ScalarDomain kMeshNumberDomain{1, kMeshSlots, true};

// Samples the governed mesh attribute and its rule (component kMeshComponent).
RuleAssignment sample_mesh_assignment(Rng& rng);

using MeshGrid = std::array<MeshState, 9>;  // row-major cells

// Mesh states of all nine cells. The ungoverned attribute is left free:
// Number-governed grids draw a fresh line pattern of the required size per
// panel.
MeshGrid apply_mesh_rule(const RuleAssignment& assignment, Rng& rng, int retry_cap = 100);

}  // namespace ravenforge
