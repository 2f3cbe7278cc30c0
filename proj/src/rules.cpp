#include "ravenforge/rules.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "ravenforge/error.hpp"
#include "ravenforge/mesh.hpp"

namespace ravenforge {

ScalarDomain scalar_domain(Attribute a, const ComponentLayout& layout) {
  switch (a) {
    case Attribute::Number: return {1, layout.slot_count(), true};
    case Attribute::Type: return {0, kTypeCount - 1, false};
    case Attribute::Size: return {0, kSizeCount - 1, true};
    case Attribute::Color: return {0, kColorCount - 1, true};
    case Attribute::Position: break;
  }
  throw std::invalid_argument("Position is set-valued");
}

namespace {

[[noreturn]] void overflow(const RuleKind& rule, int v) {
  throw Error(ErrorKind::DomainOverflow, to_string(rule) + " produced " + std::to_string(v));
}

int combine(ArithOp op, int a, int b) { return op == ArithOp::Plus ? a + b : a - b; }

// Cell i of a 3x3 grid in row-major order.
int at(const ValueGrid& g, int i) {
  return g[static_cast<std::size_t>(i / 3)][static_cast<std::size_t>(i % 3)];
}

}  // namespace

Triple apply_rule_row(const RuleKind& rule, const ScalarDomain& domain, int first, int second) {
  Triple row{};
  switch (rule.type) {
    case RuleType::Constant:
      row = {first, first, first};
      break;
    case RuleType::Progression:
      if (rule.increment == 0) throw std::invalid_argument("zero progression increment");
      row = {first, first + rule.increment, first + 2 * rule.increment};
      break;
    case RuleType::Arithmetic:
      if (!domain.arithmetic) throw Error(ErrorKind::DomainOverflow, "arithmetic not defined");
      if (second < std::max(1, domain.lo)) overflow(rule, second);
      row = {first, second, combine(rule.op, first, second)};
      break;
    case RuleType::DistributeThree:
      throw std::invalid_argument("DistributeThree spans rows; use distribute_three_rows");
  }
  for (int v : row)
    if (!domain.contains(v)) overflow(rule, v);
  return row;
}

SlotMask shift_slots(SlotMask m, int slots, int k) {
  SlotMask out = 0;
  for (int i = 0; i < slots; ++i)
    if ((m >> i) & 1u) out |= static_cast<SlotMask>(1u << (((i + k) % slots + slots) % slots));
  return out;
}

Triple apply_set_rule_row(const RuleKind& rule, const SetDomain& domain, SlotMask first,
                          SlotMask second) {
  const SlotMask full = domain.full();
  if (first == 0 || (first & ~full) != 0) overflow(rule, first);
  auto step = [&](SlotMask m) -> SlotMask {
    return domain.rotate ? rotate90_mask(m) : shift_slots(m, domain.slots, rule.increment);
  };
  switch (rule.type) {
    case RuleType::Constant:
      return {first, first, first};
    case RuleType::Progression: {
      if (!domain.rotate && rule.increment == 0)
        throw std::invalid_argument("zero progression increment");
      const SlotMask b = step(first);
      return {first, b, step(b)};
    }
    case RuleType::Arithmetic: {
      if (second == 0 || (second & ~full) != 0) overflow(rule, second);
      const SlotMask third = rule.op == ArithOp::Plus ? SlotMask(first | second)
                                                      : SlotMask(first & ~second);
      if (third == 0) throw Error(ErrorKind::EmptyResult, "set difference is empty");
      return {first, second, third};
    }
    case RuleType::DistributeThree:
      break;
  }
  throw std::invalid_argument("DistributeThree spans rows; use distribute_three_rows");
}

ValueGrid distribute_three_rows(const Triple& values, int shift) {
  ValueGrid g{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      g[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] =
          values[static_cast<std::size_t>((c + r * shift) % 3)];
  return g;
}

bool rule_feasible(const RuleKind& rule, const ScalarDomain& d) {
  switch (rule.type) {
    case RuleType::Constant: return d.size() >= 1;
    case RuleType::Progression:
      return rule.increment != 0 && 2 * std::abs(rule.increment) <= d.hi - d.lo;
    case RuleType::Arithmetic:
      if (!d.arithmetic) return false;
      for (int a = d.lo; a <= d.hi; ++a)
        for (int b = std::max(1, d.lo); b <= d.hi; ++b)
          if (d.contains(combine(rule.op, a, b))) return true;
      return false;
    case RuleType::DistributeThree: return d.size() >= 3;
  }
  return false;
}

bool rule_feasible(const RuleKind& rule, const SetDomain& d) {
  if (d.slots < 2) return false;
  if (rule.type == RuleType::Progression && !d.rotate) return rule.increment != 0;
  return true;
}

std::vector<RuleKind> feasible_rules(Attribute a, const ComponentLayout& layout, RuleSet allowed) {
  std::vector<RuleKind> out;
  for (const RuleKind& r : all_rule_kinds()) {
    if (!allowed.contains(r.type)) continue;
    const bool ok = a == Attribute::Position
                        ? rule_feasible(r, SetDomain{layout.slot_count(), false})
                        : rule_feasible(r, scalar_domain(a, layout));
    if (ok) out.push_back(r);
  }
  return out;
}

RuleKind pick_rule(std::span<const RuleKind> candidates, Rng& rng) {
  std::vector<RuleType> types;
  for (const RuleKind& r : candidates)
    if (std::find(types.begin(), types.end(), r.type) == types.end()) types.push_back(r.type);
  const RuleType t = rng.pick(std::span<const RuleType>(types));
  std::vector<RuleKind> params;
  for (const RuleKind& r : candidates)
    if (r.type == t) params.push_back(r);
  return rng.pick(std::span<const RuleKind>(params));
}

SlotMask random_nonempty_subset(int slots, Rng& rng) {
  return static_cast<SlotMask>(1 + rng.below(static_cast<int>(full_mask(slots))));
}

SlotMask random_subset_of_size(int slots, int count, Rng& rng) {
  std::array<int, 16> idx{};
  for (int i = 0; i < slots; ++i) idx[static_cast<std::size_t>(i)] = i;
  rng.shuffle(std::span<int>(idx.data(), static_cast<std::size_t>(slots)));
  SlotMask m = 0;
  for (int i = 0; i < count; ++i) m |= static_cast<SlotMask>(1u << idx[static_cast<std::size_t>(i)]);
  return m;
}

ValueGrid sample_scalar_grid(const RuleKind& rule, const ScalarDomain& d, Rng& rng) {
  if (!rule_feasible(rule, d)) throw Error(ErrorKind::DomainOverflow, to_string(rule) + " infeasible");
  ValueGrid g{};
  switch (rule.type) {
    case RuleType::Constant: {
      const int v = rng.between(d.lo, d.hi);
      for (auto& row : g) row = apply_rule_row(rule, d, v);
      return g;
    }
    case RuleType::Progression: {
      const int span = 2 * rule.increment;
      const int lo = span < 0 ? d.lo - span : d.lo;
      const int hi = span < 0 ? d.hi : d.hi - span;
      for (auto& row : g) row = apply_rule_row(rule, d, rng.between(lo, hi));
      return g;
    }
    case RuleType::Arithmetic: {
      std::vector<std::pair<int, int>> pairs;
      for (int a = d.lo; a <= d.hi; ++a)
        for (int b = std::max(1, d.lo); b <= d.hi; ++b)
          if (d.contains(combine(rule.op, a, b))) pairs.emplace_back(a, b);
      for (auto& row : g) {
        const auto [a, b] = rng.pick(std::span<const std::pair<int, int>>(pairs));
        row = apply_rule_row(rule, d, a, b);
      }
      return g;
    }
    case RuleType::DistributeThree: {
      std::vector<int> values;
      for (int v = d.lo; v <= d.hi; ++v) values.push_back(v);
      rng.shuffle(std::span<int>(values));
      const int shift = rng.coin() ? 2 : 1;
      return distribute_three_rows({values[0], values[1], values[2]}, shift);
    }
  }
  return g;
}

ValueGrid sample_set_grid(const RuleKind& rule, const SetDomain& d, Rng& rng, int retry_cap) {
  if (!rule_feasible(rule, d)) throw Error(ErrorKind::DomainOverflow, to_string(rule) + " infeasible");
  ValueGrid g{};
  switch (rule.type) {
    case RuleType::Constant: {
      const SlotMask s = random_nonempty_subset(d.slots, rng);
      for (auto& row : g) row = apply_set_rule_row(rule, d, s);
      return g;
    }
    case RuleType::Progression:
      for (auto& row : g) row = apply_set_rule_row(rule, d, random_nonempty_subset(d.slots, rng));
      return g;
    case RuleType::Arithmetic:
      for (auto& row : g) {
        bool done = false;
        for (int attempt = 0; attempt < retry_cap && !done; ++attempt) {
          const SlotMask a = random_nonempty_subset(d.slots, rng);
          const SlotMask b = random_nonempty_subset(d.slots, rng);
          try {
            row = apply_set_rule_row(rule, d, a, b);
            done = true;
          } catch (const Error& e) {
            if (e.kind() != ErrorKind::EmptyResult) throw;
          }
        }
        if (!done)
          throw Error(ErrorKind::GenerationRetryExhausted, "no non-empty set difference");
      }
      return g;
    case RuleType::DistributeThree:
      for (int attempt = 0; attempt < retry_cap; ++attempt) {
        const SlotMask a = random_nonempty_subset(d.slots, rng);
        const SlotMask b = random_nonempty_subset(d.slots, rng);
        const SlotMask c = random_nonempty_subset(d.slots, rng);
        if (a == b || b == c || a == c) continue;
        return distribute_three_rows({a, b, c}, rng.coin() ? 2 : 1);
      }
      throw Error(ErrorKind::GenerationRetryExhausted, "no three distinct slot sets");
  }
  return g;
}

const RuleAssignment* find_assignment(std::span<const RuleAssignment> assignments, int component,
                                      Attribute attribute) {
  for (const RuleAssignment& a : assignments)
    if (a.component == component && a.attribute == attribute) return &a;
  return nullptr;
}

std::vector<RuleAssignment> sample_assignments(const RegimeSpec& regime,
                                               Configuration configuration, Split split,
                                               Rng& rng, const GeneratorPolicy& policy) {
  std::vector<RuleAssignment> out;
  const auto& layouts = component_layouts(configuration);
  auto assign = [&](int component, Attribute a) {
    const auto candidates =
        feasible_rules(a, layouts[static_cast<std::size_t>(component)],
                       allowed_rules(regime, a, split));
    if (candidates.empty())
      throw Error(ErrorKind::InfeasibleRegime,
                  std::string(to_string(a)) + " has no realisable rule in " +
                      std::string(display_name(configuration)) + "/" +
                      std::string(to_string(split)));
    out.push_back({component, a, pick_rule(candidates, rng)});
  };

  for (int c = 0; c < component_count(configuration); ++c) {
    if (layouts[static_cast<std::size_t>(c)].layout_governable()) {
      Attribute layout_attr = rng.coin() ? Attribute::Number : Attribute::Position;
      if (regime.is_held_out(Attribute::Position)) {
        if (split != Split::Test) {
          // Fixed positions are the only way to hold both coupled attributes constant.
          layout_attr = Attribute::Position;
        } else if (policy.a_position_test_target == HeldOutLayoutTarget::Position) {
          layout_attr = Attribute::Position;
        } else if (policy.a_position_test_target == HeldOutLayoutTarget::Number) {
          layout_attr = Attribute::Number;
        }
      }
      assign(c, layout_attr);
    }
    for (Attribute a : {Attribute::Type, Attribute::Size, Attribute::Color}) assign(c, a);
  }
  return out;
}

ContextGrid generate_context(std::span<const RuleAssignment> assignments,
                             Configuration configuration, Rng& rng,
                             const GeneratorPolicy& policy) {
  const auto& layouts = component_layouts(configuration);
  const int ncomp = component_count(configuration);
  std::array<SymbolicPanel, 9> cells{};
  for (auto& p : cells) p.component_count = static_cast<std::uint8_t>(ncomp);

  for (int c = 0; c < ncomp; ++c) {
    const auto cs = static_cast<std::size_t>(c);
    const ComponentLayout& layout = layouts[cs];
    const int slots = layout.slot_count();
    auto state = [&](int i) -> ComponentState& { return cells[static_cast<std::size_t>(i)].components[cs]; };

    if (layout.layout_governable()) {
      const RuleAssignment* num = find_assignment(assignments, c, Attribute::Number);
      const RuleAssignment* pos = find_assignment(assignments, c, Attribute::Position);
      if ((num == nullptr) == (pos == nullptr))
        throw std::invalid_argument("exactly one of Number/Position must be governed");
      if (num) {
        const ValueGrid counts =
            sample_scalar_grid(num->rule, scalar_domain(Attribute::Number, layout), rng);
        for (int i = 0; i < 9; ++i)
          state(i).positions =
              random_subset_of_size(slots, at(counts, i), rng);
      } else {
        const ValueGrid sets =
            sample_set_grid(pos->rule, SetDomain{slots, false}, rng, policy.retry_cap);
        for (int i = 0; i < 9; ++i)
          state(i).positions = static_cast<SlotMask>(at(sets, i));
      }
    } else {
      for (int i = 0; i < 9; ++i) state(i).positions = 1;
    }

    for (Attribute a : {Attribute::Type, Attribute::Size, Attribute::Color}) {
      const RuleAssignment* asg = find_assignment(assignments, c, a);
      if (!asg) throw std::invalid_argument(std::string(to_string(a)) + " is not governed");
      const ValueGrid g = sample_scalar_grid(asg->rule, scalar_domain(a, layout), rng);
      for (int i = 0; i < 9; ++i) {
        const auto v = static_cast<std::uint8_t>(at(g, i));
        if (a == Attribute::Type) state(i).type = v;
        else if (a == Attribute::Size) state(i).size = v;
        else state(i).color = v;
      }
    }

    for (int i = 0; i < 9; ++i)
      for (int s = 0; s < slots; ++s)
        state(i).angles[static_cast<std::size_t>(s)] = static_cast<std::uint8_t>(rng.below(kAngleCount));
  }

  ContextGrid out;
  for (int i = 0; i < kContextPanels; ++i) out.context[static_cast<std::size_t>(i)] = cells[static_cast<std::size_t>(i)];
  out.correct = cells[8];
  return out;
}

}  // namespace ravenforge
