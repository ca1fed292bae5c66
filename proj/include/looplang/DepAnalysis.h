//===--- DepAnalysis.h - Data dependence analysis ---------------------------===//
//
// Part of the looplang project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Pairwise statement-instance dependences with per-level distance
// information, and the legality queries the rewriter asks before reordering
// anything. The analysis is conservative: subscript pairs it cannot decide
// produce dependences with unknown distances, never silently none.
//
// Distances are described per common band level as an integer interval
// (either end may be absent, meaning unbounded) plus a divisibility stride.
// A dependence is `witnessed` when a concrete instance pair has been found
// by enumeration under small parameter bindings; only witnessed dependences
// can turn a legality query into Disproven, everything else degrades to
// Unknown.
//
//===----------------------------------------------------------------------===//

#ifndef LOOPLANG_DEPANALYSIS_H
#define LOOPLANG_DEPANALYSIS_H

#include "looplang/LoopTree.h"

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace looplang {

enum class DepKind { Flow, Anti, Output };
const char *depKindSpelling(DepKind k);

struct LevelDist {
  std::optional<int64_t> lo, hi; // feasible distance bounds; absent = unbounded
  int64_t div = 1;               // distances are multiples of this stride

  bool exact() const { return lo && hi && *lo == *hi; }
  bool isZero() const { return exact() && *lo == 0; }
  /// "1" for exact distances, "*" otherwise.
  std::string str() const;
};

struct Dependence {
  const Node *src = nullptr; // leaf whose access executes first
  const Node *snk = nullptr;
  DepKind kind = DepKind::Flow;
  Access srcAcc, snkAcc;

  std::vector<const Node *> levels; // common bands, outermost first
  std::vector<LevelDist> dist;      // aligned with levels
  const Node *carrier = nullptr;    // band carrying it; null = loop-independent

  bool witnessed = false;          // a concrete instance pair exists
  std::vector<int64_t> witnessSrc; // per-level coords of that pair (src side,
  std::vector<int64_t> witnessSnk; // full band path of each leaf)
  bool reduction = false; // both ends are reduce accesses with the same op

  bool loopIndependent() const { return carrier == nullptr; }
  std::string str() const; // one report line
};

class DependenceGraph {
public:
  DependenceGraph() = default;
  DependenceGraph(const LoopTree *tree, std::vector<Dependence> deps)
      : Tree(tree), Deps(std::move(deps)) {}

  const std::vector<Dependence> &all() const { return Deps; }
  const LoopTree *tree() const { return Tree; }

  /// Full report, one stable-ordered line per dependence.
  std::string render() const;

private:
  const LoopTree *Tree = nullptr;
  std::vector<Dependence> Deps;
};

/// Computes all pairwise dependences among the tree's leaves. Pure; the
/// result never aliases mutable state, so concurrent queries are safe.
DependenceGraph analyze(const LoopTree &tree);

/// Assumptions in force while answering legality queries.
struct AssumeSet {
  /// Bands whose carried dependences are discharged (assume_parallel and
  /// assume_coincident; the two are treated identically).
  std::set<const Node *> parallel;
  /// Minimum carried distance per band (assume_min_depdist): levels with an
  /// unknown lower bound are raised to at least this.
  std::map<const Node *, int64_t> minDist;
  /// Reductions may be reassociated (--reductions=assoc): same-operator
  /// reduce-access dependences are discharged for fusion and distribution.
  bool assocReductions = false;
};

enum class Verdict { Proven, Unknown, Disproven };
const char *verdictSpelling(Verdict v);

struct Legality {
  Verdict verdict = Verdict::Proven;
  std::string witness; // evidence when the verdict is not Proven
};

/// Permuting the bands of a perfect nest: every dependence distance vector
/// must stay lexicographically non-negative under the new order.
Legality checkInterchange(const DependenceGraph &g,
                          const std::vector<const Node *> &oldOrder,
                          const std::vector<const Node *> &newOrder,
                          const AssumeSet &assumes);

/// Reversing one band: no dependence may be carried by it.
Legality checkReverse(const DependenceGraph &g, const Node *band,
                      const AssumeSet &assumes);

/// Fusing two sibling bands with identical iteration spaces: no instance of
/// `second` may depend on a later instance of `first`.
Legality checkFuse(const LoopTree &tree, const Node *first, const Node *second,
                   const AssumeSet &assumes);

/// Splitting one band's body into consecutive groups: no dependence carried
/// by the band may run from a later group to an earlier one.
Legality checkDistribute(const DependenceGraph &g, const Node *band,
                         const std::function<int(const Node *)> &groupOfLeaf,
                         const AssumeSet &assumes);

/// Permuting sibling subtrees: loop-independent dependences between two
/// siblings must keep their relative order. `newPos[i]` is the new position
/// of `siblings[i]`.
Legality checkReorder(const DependenceGraph &g,
                      const std::vector<const Node *> &siblings,
                      const std::vector<int> &newPos, const AssumeSet &assumes);

} // namespace looplang

#endif // LOOPLANG_DEPANALYSIS_H
