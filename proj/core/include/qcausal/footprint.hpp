#pragma once

#include <string>
#include <variant>
#include <vector>

namespace qcausal {

// Access references a law may declare. Relative cells are offsets from the
// position the law is applied at.
struct CellAt {
  std::vector<int> offset;
  bool operator==(const CellAt&) const = default;
};
struct CellAbsolute {
  std::vector<int> point;
  bool operator==(const CellAbsolute&) const = default;
};
struct ObjectGlobal {
  std::string object;
  std::string attribute;
  bool operator==(const ObjectGlobal&) const = default;
};
struct ObjectAllPaths {
  std::string object;
  bool operator==(const ObjectAllPaths&) const = default;
};
struct WholeSpace {
  bool operator==(const WholeSpace&) const = default;
};
struct WholeObjectSet {
  bool operator==(const WholeObjectSet&) const = default;
};

using AccessRef = std::variant<CellAt, CellAbsolute, ObjectGlobal, ObjectAllPaths, WholeSpace, WholeObjectSet>;

/// DSL spelling of a reference, e.g. "cell(+1)", "global(Ma.x)".
std::string to_string(const AccessRef& ref);

struct AccessFootprint {
  std::vector<AccessRef> reads;
  std::vector<AccessRef> writes;

  bool operator==(const AccessFootprint&) const = default;
};

}  // namespace qcausal
