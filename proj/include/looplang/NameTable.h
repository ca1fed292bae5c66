//===--- NameTable.h - Loop and section name resolution ---------------------===//
//
// Part of the looplang project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Loops and sections share one namespace. Explicitly named constructs (id
// pragmas and transformation-output ids) always win; a loop without an
// explicit name is implicitly known by its counter, unless another construct
// claims that name explicitly or several loops share the counter. The latter
// case only becomes an error when somebody references the name.
//
//===----------------------------------------------------------------------===//

#ifndef LOOPLANG_NAMETABLE_H
#define LOOPLANG_NAMETABLE_H

#include "looplang/LoopTree.h"

#include <map>
#include <string>
#include <vector>

namespace looplang {

class NameTable {
public:
  struct Entry {
    std::string name;
    std::vector<Node *> nodes; // several = ambiguous implicit name
    NameOrigin origin = NameOrigin::None; // None = implicit counter name
  };

  /// Collects all referenceable names. Duplicate explicit names are reported
  /// here; ambiguous implicit names only on reference.
  static NameTable build(LoopTree &tree, DiagEngine &diags);

  /// Resolves a reference, reporting UnknownName or AmbiguousName.
  Node *resolve(const std::string &name, SourceLoc refLoc,
                DiagEngine &diags) const;

  /// Like resolve but silent; nullptr when absent or ambiguous.
  Node *lookup(const std::string &name) const;

  /// Expands `a,...,b` ranges over the pre-order walk of uniquely named
  /// loops. Plain entries resolve as usual; BadRange covers unresolvable or
  /// inverted endpoints.
  std::vector<std::string> expand(const std::vector<std::string> &targets,
                                  SourceLoc loc, DiagEngine &diags) const;

  /// One line per name in tree pre-order: `name kind origin file:line`
  /// (`ambiguous` stands in for the origin of multiply-claimed implicit
  /// names, one line per candidate).
  std::string dump() const;

private:
  std::vector<Entry> Entries;
  std::map<std::string, size_t> ByName;
  std::map<const Node *, int> PreIdx;    // node -> pre-order position
  std::vector<std::pair<std::string, Node *>> NamedLoopWalk; // for ranges
};

} // namespace looplang

#endif // LOOPLANG_NAMETABLE_H
