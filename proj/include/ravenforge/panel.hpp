#pragma once

// Pre-render symbolic form of panels and matrices.

#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <vector>

#include "ravenforge/model.hpp"

namespace ravenforge {

// Attribute domains, following the original RAVEN generator.
inline constexpr int kTypeCount = 5;   // triangle, square, pentagon, hexagon, circle
inline constexpr int kSizeCount = 6;   // scale 0.4 .. 0.9 of the slot
inline constexpr int kColorCount = 10; // fill level 0 (white) .. 9 (black)
inline constexpr int kAngleCount = 8;  // -135 .. 180 degrees in 45 degree steps; noise only
inline constexpr int kMeshSlots = 12;

using SlotMask = std::uint16_t;

constexpr int popcount(SlotMask m) { return std::popcount(static_cast<unsigned>(m)); }
constexpr SlotMask full_mask(int slots) { return static_cast<SlotMask>((1u << slots) - 1u); }

// State of one component in one panel. Type, size and color are shared by
// all entities of the component; angles are per slot and never governed.
struct ComponentState {
  SlotMask positions = 1;
  std::uint8_t type = 0;
  std::uint8_t size = 0;
  std::uint8_t color = 0;
  std::array<std::uint8_t, kMaxSlots> angles{};

  int number() const { return popcount(positions); }

  friend bool operator==(const ComponentState&, const ComponentState&) = default;
};

// Value of an attribute as an integer: Position yields the slot mask,
// Number the entity count.
int attribute_value(const ComponentState& s, Attribute a);

// Occupied subset of the 12 mesh line slots.
struct MeshState {
  SlotMask lines = 0;

  int count() const { return popcount(lines); }
  bool contains(int slot) const { return (lines >> slot) & 1u; }

  friend bool operator==(const MeshState&, const MeshState&) = default;
};

struct SymbolicPanel {
  std::array<ComponentState, kMaxComponents> components{};
  std::uint8_t component_count = 1;
  std::optional<MeshState> mesh;

  // Equality on everything except the mesh.
  bool same_base(const SymbolicPanel& o) const;

  friend bool operator==(const SymbolicPanel&, const SymbolicPanel&) = default;
};

inline constexpr int kContextPanels = 8;
inline constexpr int kAnswerPanels = 8;

struct SymbolicMatrix {
  Configuration configuration = Configuration::Center;
  RegimeSpec regime = RegimeSpec::iraven();
  Split split = Split::Train;
  std::array<SymbolicPanel, kContextPanels> context{};
  std::array<SymbolicPanel, kAnswerPanels> answers{};
  int target = 0;
  std::vector<RuleAssignment> assignments;
  std::uint64_t seed = 0;

  const SymbolicPanel& correct() const { return answers[static_cast<std::size_t>(target)]; }

  // Panel at grid cell (row, col); cell (2,2) is the correct answer.
  const SymbolicPanel& cell(int row, int col) const {
    const int i = row * 3 + col;
    return i < kContextPanels ? context[static_cast<std::size_t>(i)] : correct();
  }
};

}  // namespace ravenforge
