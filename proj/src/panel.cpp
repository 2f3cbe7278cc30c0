#include "ravenforge/panel.hpp"

namespace ravenforge {

int attribute_value(const ComponentState& s, Attribute a) {
  switch (a) {
    case Attribute::Position: return s.positions;
    case Attribute::Number: return s.number();
    case Attribute::Type: return s.type;
    case Attribute::Size: return s.size;
    case Attribute::Color: return s.color;
  }
  return 0;
}

bool SymbolicPanel::same_base(const SymbolicPanel& o) const {
  return component_count == o.component_count && components == o.components;
}

}  // namespace ravenforge
