#include "ravenforge/solver.hpp"

#include <algorithm>
#include <set>

#include "ravenforge/error.hpp"

namespace ravenforge {

const Hypotheses* InducedRuleSet::find(int component, Attribute attribute) const {
  for (const auto& h : entries)
    if (h.component == component && h.attribute == attribute) return &h;
  return nullptr;
}

SolverInput solver_input(const SymbolicMatrix& m) {
  return {m.configuration, m.regime.has_mesh(), m.context, m.answers};
}

namespace {

using Row = std::array<int, 3>;

int bits(int v) { return __builtin_popcount(static_cast<unsigned>(v)); }

// Quarter-turn image of each mesh slot, derived from segment geometry:
// endpoints (x, y) in halves of the panel edge map to (2 - y, x).
std::array<int, 12> mesh_rotation() {
  struct Seg {
    int x0, y0, x1, y1;
  };
  std::array<Seg, 12> segs{};
  for (int line = 0; line < 3; ++line)
    for (int half = 0; half < 2; ++half) {
      segs[static_cast<std::size_t>(line * 2 + half)] = {half, line, half + 1, line};
      segs[static_cast<std::size_t>(6 + line * 2 + half)] = {line, half, line, half + 1};
    }
  auto same = [](Seg a, Seg b) {
    return (a.x0 == b.x0 && a.y0 == b.y0 && a.x1 == b.x1 && a.y1 == b.y1) ||
           (a.x0 == b.x1 && a.y0 == b.y1 && a.x1 == b.x0 && a.y1 == b.y0);
  };
  std::array<int, 12> out{};
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const Seg r{2 - segs[i].y0, segs[i].x0, 2 - segs[i].y1, segs[i].x1};
    for (std::size_t j = 0; j < segs.size(); ++j)
      if (same(r, segs[j])) out[i] = static_cast<int>(j);
  }
  return out;
}

int rotate_lines(int m) {
  static const std::array<int, 12> perm = mesh_rotation();
  int out = 0;
  for (int i = 0; i < 12; ++i)
    if ((m >> i) & 1) out |= 1 << perm[static_cast<std::size_t>(i)];
  return out;
}

int cyclic_shift(int m, int slots, int k) {
  int out = 0;
  for (int i = 0; i < slots; ++i)
    if ((m >> i) & 1) out |= 1 << (((i + k) % slots + slots) % slots);
  return out;
}

bool set_valued(Attribute a) { return a == Attribute::Position; }

bool distribute_three(std::span<const Row> rows) {
  std::multiset<int> first(rows[0].begin(), rows[0].end());
  if (std::set<int>(first.begin(), first.end()).size() != 3) return false;
  for (const Row& r : rows)
    if (std::multiset<int>(r.begin(), r.end()) != first) return false;
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = i + 1; j < rows.size(); ++j)
        if (rows[i][static_cast<std::size_t>(c)] == rows[j][static_cast<std::size_t>(c)]) return false;
  return true;
}

std::vector<RuleKind> hypothesis_grid(Attribute a, bool mesh) {
  std::vector<RuleKind> out{RuleKind::constant()};
  if (mesh && a == Attribute::Position) {
    out.push_back(RuleKind::progression(1));
  } else {
    for (int k : {-2, -1, 1, 2}) out.push_back(RuleKind::progression(k));
  }
  if (a != Attribute::Type) {
    out.push_back(RuleKind::arithmetic(ArithOp::Plus));
    out.push_back(RuleKind::arithmetic(ArithOp::Minus));
  }
  out.push_back(RuleKind::distribute_three());
  return out;
}

int extract(const SymbolicPanel& p, int component, Attribute a) {
  if (component == kMeshComponent) {
    if (!p.mesh) return -1;
    return a == Attribute::Position ? p.mesh->lines : bits(p.mesh->lines);
  }
  const ComponentState& s = p.components[static_cast<std::size_t>(component)];
  switch (a) {
    case Attribute::Position: return s.positions;
    case Attribute::Number: return bits(s.positions);
    case Attribute::Type: return s.type;
    case Attribute::Size: return s.size;
    case Attribute::Color: return s.color;
  }
  return -1;
}

struct Target {
  int component;
  Attribute attribute;
  int slots;  // set width for Position
};

std::vector<Target> governable(Configuration configuration, bool has_mesh) {
  std::vector<Target> out;
  const auto& layouts = component_layouts(configuration);
  for (std::size_t c = 0; c < layouts.size(); ++c) {
    const int slots = layouts[c].slot_count();
    if (slots > 1) {
      out.push_back({static_cast<int>(c), Attribute::Position, slots});
      out.push_back({static_cast<int>(c), Attribute::Number, slots});
    }
    for (Attribute a : {Attribute::Type, Attribute::Size, Attribute::Color})
      out.push_back({static_cast<int>(c), a, slots});
  }
  if (has_mesh) {
    out.push_back({kMeshComponent, Attribute::Position, 12});
    out.push_back({kMeshComponent, Attribute::Number, 12});
  }
  return out;
}

std::vector<Row> grid_rows(std::span<const SymbolicPanel, kContextPanels> ctx,
                           const SymbolicPanel* candidate, const Target& t) {
  std::vector<Row> rows;
  for (int r = 0; r < 2; ++r)
    rows.push_back({extract(ctx[static_cast<std::size_t>(r * 3)], t.component, t.attribute),
                    extract(ctx[static_cast<std::size_t>(r * 3 + 1)], t.component, t.attribute),
                    extract(ctx[static_cast<std::size_t>(r * 3 + 2)], t.component, t.attribute)});
  if (candidate)
    rows.push_back({extract(ctx[6], t.component, t.attribute), extract(ctx[7], t.component, t.attribute),
                    extract(*candidate, t.component, t.attribute)});
  return rows;
}

int slots_of(Configuration configuration, int component) {
  if (component == kMeshComponent) return 12;
  return component_layouts(configuration)[static_cast<std::size_t>(component)].slot_count();
}

}  // namespace

bool rows_satisfy(const RuleKind& rule, Attribute attribute, bool mesh, int slots,
                  std::span<const Row> rows) {
  for (const Row& r : rows)
    for (int v : r)
      if (v < 0) return false;
  const bool is_set = set_valued(attribute);
  switch (rule.type) {
    case RuleType::Constant: {
      const int v = rows[0][0];
      for (const Row& r : rows)
        for (int x : r)
          if (x != v) return false;
      return true;
    }
    case RuleType::Progression:
      for (const Row& r : rows) {
        if (is_set) {
          auto step = [&](int m) { return mesh ? rotate_lines(m) : cyclic_shift(m, slots, rule.increment); };
          if (r[1] != step(r[0]) || r[2] != step(r[1])) return false;
        } else if (r[1] != r[0] + rule.increment || r[2] != r[1] + rule.increment) {
          return false;
        }
      }
      return true;
    case RuleType::Arithmetic:
      if (attribute == Attribute::Type) return false;
      for (const Row& r : rows) {
        if (is_set) {
          const int expect = rule.op == ArithOp::Plus ? (r[0] | r[1]) : (r[0] & ~r[1]);
          if (r[1] == 0 || expect == 0 || r[2] != expect) return false;
        } else {
          const int expect = rule.op == ArithOp::Plus ? r[0] + r[1] : r[0] - r[1];
          if (r[1] < 1 || r[2] != expect) return false;
        }
      }
      return true;
    case RuleType::DistributeThree:
      return distribute_three(rows);
  }
  return false;
}

InducedRuleSet induce(std::span<const SymbolicPanel, kContextPanels> context,
                      Configuration configuration, bool has_mesh) {
  InducedRuleSet out;
  for (const Target& t : governable(configuration, has_mesh)) {
    const auto rows = grid_rows(context, nullptr, t);
    Hypotheses h{t.component, t.attribute, {}};
    for (const RuleKind& r : hypothesis_grid(t.attribute, t.component == kMeshComponent))
      if (rows_satisfy(r, t.attribute, t.component == kMeshComponent, t.slots, rows))
        h.rules.push_back(r);
    out.entries.push_back(std::move(h));
  }
  for (const Hypotheses& h : out.entries) {
    if (!h.rules.empty()) continue;
    const Hypotheses* partner =
        is_coupled(h.attribute) ? out.find(h.component, coupled_partner(h.attribute)) : nullptr;
    if (!partner || partner->rules.empty())
      throw Error(ErrorKind::Inconsistent, "no rule explains " + std::string(to_string(h.attribute)) +
                                               " of component " + std::to_string(h.component));
  }
  return out;
}

bool completes(const InducedRuleSet& rules, std::span<const SymbolicPanel, kContextPanels> context,
               const SymbolicPanel& candidate, Configuration configuration) {
  if (candidate.component_count != context[0].component_count) return false;
  if (candidate.mesh.has_value() != context[0].mesh.has_value()) return false;
  for (const Hypotheses& h : rules.entries) {
    if (h.rules.empty()) continue;
    const Target t{h.component, h.attribute, slots_of(configuration, h.component)};
    const auto rows = grid_rows(context, &candidate, t);
    const bool ok = std::any_of(h.rules.begin(), h.rules.end(), [&](const RuleKind& r) {
      return rows_satisfy(r, h.attribute, h.component == kMeshComponent, t.slots, rows);
    });
    if (!ok) return false;
  }
  return true;
}

std::vector<int> consistent_answers(const SolverInput& input) {
  const InducedRuleSet rules = induce(input.context, input.configuration, input.has_mesh);
  std::vector<int> out;
  for (int i = 0; i < kAnswerPanels; ++i)
    if (completes(rules, input.context, input.answers[static_cast<std::size_t>(i)], input.configuration))
      out.push_back(i);
  return out;
}

int solve(const SolverInput& input) {
  const auto ok = consistent_answers(input);
  if (ok.empty()) throw Error(ErrorKind::Unsolvable, "no answer completes the matrix");
  if (ok.size() > 1)
    throw Error(ErrorKind::Ambiguous, std::to_string(ok.size()) + " answers complete the matrix");
  return ok.front();
}

}  // namespace ravenforge
