#pragma once

// Test-side reference checks, written from the rule definitions and not
// from the library's implementation.

#include <algorithm>
#include <array>
#include <bit>
#include <set>
#include <vector>

#include "ravenforge/model.hpp"
#include "ravenforge/panel.hpp"

namespace oracle {

using ravenforge::Attribute;
using ravenforge::ArithOp;
using ravenforge::RuleKind;
using ravenforge::RuleType;

using Grid = std::array<std::array<int, 3>, 3>;

// Mesh slot segments in halves of the panel edge, y down: horizontal
// segments first (row-major over lines y = 0, 1, 2), then vertical.
struct Seg {
  int x0, y0, x1, y1;
  bool operator==(const Seg& o) const {
    return (x0 == o.x0 && y0 == o.y0 && x1 == o.x1 && y1 == o.y1) ||
           (x0 == o.x1 && y0 == o.y1 && x1 == o.x0 && y1 == o.y0);
  }
};

inline std::array<Seg, 12> mesh_geometry() {
  std::array<Seg, 12> s{};
  for (int line = 0; line < 3; ++line)
    for (int half = 0; half < 2; ++half) {
      s[static_cast<std::size_t>(line * 2 + half)] = {half, line, half + 1, line};
      s[static_cast<std::size_t>(6 + line * 2 + half)] = {line, half, line, half + 1};
    }
  return s;
}

// Clockwise quarter turn on screen (y down): (x, y) -> (2 - y, x).
inline int rotate_slot(int slot) {
  const auto g = mesh_geometry();
  const Seg& a = g[static_cast<std::size_t>(slot)];
  const Seg r{2 - a.y0, a.x0, 2 - a.y1, a.x1};
  for (int i = 0; i < 12; ++i)
    if (g[static_cast<std::size_t>(i)] == r) return i;
  return -1;
}

inline int rotate_mask(int mask) {
  int out = 0;
  for (int i = 0; i < 12; ++i)
    if ((mask >> i) & 1) out |= 1 << rotate_slot(i);
  return out;
}

inline int shift_mask(int mask, int slots, int k) {
  int out = 0;
  for (int i = 0; i < slots; ++i)
    if ((mask >> i) & 1) out |= 1 << (((i + k) % slots + slots) % slots);
  return out;
}

// Whether one row (a, b, c) obeys a row-local rule.
inline bool row_ok(const RuleKind& r, bool set_valued, bool mesh, int slots, int a, int b, int c) {
  switch (r.type) {
    case RuleType::Constant: return a == b && b == c;
    case RuleType::Progression:
      if (!set_valued) return b - a == r.increment && c - b == r.increment;
      if (mesh) return b == rotate_mask(a) && c == rotate_mask(b);
      return b == shift_mask(a, slots, r.increment) && c == shift_mask(b, slots, r.increment);
    case RuleType::Arithmetic:
      if (set_valued) return r.op == ArithOp::Plus ? c == (a | b) : (c == (a & ~b) && c != 0);
      return b >= 1 && (r.op == ArithOp::Plus ? c == a + b : c == a - b);
    case RuleType::DistributeThree: return true;  // checked over the grid
  }
  return false;
}

inline bool grid_ok(const RuleKind& r, bool set_valued, bool mesh, int slots, const Grid& g) {
  if (r.type == RuleType::Constant) {
    for (const auto& row : g)
      for (int v : row)
        if (v != g[0][0]) return false;
    return true;
  }
  if (r.type == RuleType::DistributeThree) {
    std::multiset<int> first(g[0].begin(), g[0].end());
    if (std::set<int>(g[0].begin(), g[0].end()).size() != 3) return false;
    for (const auto& row : g)
      if (std::multiset<int>(row.begin(), row.end()) != first) return false;
    for (int c = 0; c < 3; ++c)
      if (std::set<int>{g[0][c], g[1][c], g[2][c]}.size() != 3) return false;
    return true;
  }
  for (const auto& row : g)
    if (!row_ok(r, set_valued, mesh, slots, row[0], row[1], row[2])) return false;
  return true;
}

inline int value(const ravenforge::SymbolicPanel& p, int component, Attribute a) {
  if (component == ravenforge::kMeshComponent) {
    const int lines = p.mesh ? p.mesh->lines : 0;
    return a == Attribute::Position ? lines : std::popcount(static_cast<unsigned>(lines));
  }
  const auto& s = p.components[static_cast<std::size_t>(component)];
  switch (a) {
    case Attribute::Position: return s.positions;
    case Attribute::Number: return std::popcount(static_cast<unsigned>(s.positions));
    case Attribute::Type: return s.type;
    case Attribute::Size: return s.size;
    case Attribute::Color: return s.color;
  }
  return -1;
}

inline int slot_count(ravenforge::Configuration cfg, int component) {
  if (component == ravenforge::kMeshComponent) return 12;
  return ravenforge::component_layouts(cfg)[static_cast<std::size_t>(component)].slot_count();
}

// The nine panels of a matrix, cell 9 taken from `last`.
template <class Matrix>
Grid grid_of(const Matrix& m, const ravenforge::SymbolicPanel& last, int component, Attribute a) {
  Grid g{};
  for (int i = 0; i < 9; ++i) {
    const auto& p = i < 8 ? m.context[static_cast<std::size_t>(i)] : last;
    g[static_cast<std::size_t>(i / 3)][static_cast<std::size_t>(i % 3)] = value(p, component, a);
  }
  return g;
}

// Every assignment holds on the grid completed with `last`.
template <class Matrix>
bool satisfies_all(const Matrix& m, const ravenforge::SymbolicPanel& last) {
  for (const auto& as : m.assignments) {
    const bool set_valued = as.attribute == Attribute::Position;
    const bool mesh = as.component == ravenforge::kMeshComponent;
    if (!grid_ok(as.rule, set_valued, mesh, slot_count(m.configuration, as.component),
                 grid_of(m, last, as.component, as.attribute)))
      return false;
  }
  return true;
}

// Pearson statistic for a uniform histogram.
template <class Counts>
double chi_square_uniform(const Counts& counts) {
  double total = 0;
  for (auto c : counts) total += static_cast<double>(c);
  const double e = total / static_cast<double>(counts.size());
  double x = 0;
  for (auto c : counts) x += (static_cast<double>(c) - e) * (static_cast<double>(c) - e) / e;
  return x;
}

// Upper 1% point of chi-square with 7 degrees of freedom.
inline constexpr double kChiSquare7At01 = 18.475;

}  // namespace oracle
