//===--- BruteForce.h - instance-level dependence oracle ------------------===//
//
// Part of the looplang project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Exhaustively enumerates every array access a program performs under fixed
// parameter values and derives the exact conflicting instance pairs. Used by
// the tests to cross-check the symbolic dependence analysis; deliberately
// shares no enumeration code with it.
//
//===----------------------------------------------------------------------===//

#ifndef LOOPLANG_TESTS_SUPPORT_BRUTEFORCE_H
#define LOOPLANG_TESTS_SUPPORT_BRUTEFORCE_H

#include "looplang/DepAnalysis.h"
#include "looplang/LoopTree.h"

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace looplang {
namespace testsupport {

struct InstAccess {
  const Node *leaf = nullptr;
  std::map<std::string, int64_t> env; // counters live on the leaf's path
  std::vector<int64_t> cell;
  bool isWrite = false;
  std::size_t seq = 0;
};

namespace detail {

inline int64_t evalIn(const AffineExpr &e,
                      const std::map<std::string, int64_t> &env) {
  return e.evaluate([&](const std::string &n) { return env.at(n); });
}

inline bool walk(const Node &n, std::map<std::string, int64_t> &env,
                 const std::string &array, std::size_t budget,
                 std::vector<InstAccess> &out) {
  switch (n.kind) {
  case Node::Kind::Seq:
  case Node::Kind::Section:
    for (const auto &c : n.children)
      if (!walk(*c, env, array, budget, out))
        return false;
    return true;
  case Node::Kind::Guard: {
    const auto &branch = n.cond.evaluate(
                             [&](const std::string &s) { return env.at(s); })
                             ? n.children
                             : n.elseChildren;
    for (const auto &c : branch)
      if (!walk(*c, env, array, budget, out))
        return false;
    return true;
  }
  case Node::Kind::Band: {
    int64_t lo = evalIn(n.lb, env);
    int64_t hi = INT64_MAX;
    for (const auto &ub : n.ubs)
      hi = std::min(hi, evalIn(ub, env));
    for (int64_t v = lo; v < hi; v += n.step) {
      env[n.counter] = v;
      bool ok = true;
      for (const auto &c : n.children)
        if (!walk(*c, env, array, budget, out)) {
          ok = false;
          break;
        }
      env.erase(n.counter);
      if (!ok)
        return false;
    }
    return true;
  }
  case Node::Kind::Leaf: {
    if (out.size() >= budget)
      return false;
    auto record = [&](const std::vector<AffineExpr> &subs, bool write) {
      InstAccess a;
      a.leaf = &n;
      a.env = env;
      for (const auto &s : subs)
        a.cell.push_back(evalIn(s, env));
      a.isWrite = write;
      a.seq = out.size();
      out.push_back(std::move(a));
    };
    for (const Access &a : n.accesses()) {
      if (a.array != array)
        continue;
      if (a.isWrite) {
        if (a.isReduce)
          record(a.subs, false); // op= reads the cell before storing
      } else {
        record(a.subs, false);
      }
    }
    for (const Access &a : n.accesses())
      if (a.array == array && a.isWrite)
        record(a.subs, true);
    return true;
  }
  }
  return true;
}

} // namespace detail

/// All accesses to `array` in execution order under the given parameter
/// binding. Returns false when the run exceeds `budget` accesses.
inline bool enumerateAccesses(const LoopTree &tree, const std::string &array,
                              const std::map<std::string, int64_t> &params,
                              std::vector<InstAccess> &out,
                              std::size_t budget = 200000) {
  out.clear();
  std::map<std::string, int64_t> env = params;
  return detail::walk(*tree.root, env, array, budget, out);
}

inline std::string describeInstance(const InstAccess &a) {
  std::ostringstream os;
  os << "'" << a.leaf->statementText() << "' at (";
  bool first = true;
  for (const auto &[k, v] : a.env) {
    os << (first ? "" : ", ") << k << "=" << v;
    first = false;
  }
  os << ")";
  return os.str();
}

/// True when some reported dependence orders the conflicting pair (p, q):
/// matching endpoints and kind, and per-level distances inside the reported
/// intervals (and divisibility classes).
inline bool pairCovered(const DependenceGraph &g, const InstAccess &p,
                        const InstAccess &q) {
  DepKind kind = p.isWrite ? (q.isWrite ? DepKind::Output : DepKind::Flow)
                           : DepKind::Anti;
  for (const Dependence &d : g.all()) {
    if (d.src != p.leaf || d.snk != q.leaf || d.kind != kind)
      continue;
    bool match = true;
    for (std::size_t l = 0; l < d.levels.size(); ++l) {
      auto ps = p.env.find(d.levels[l]->counter);
      auto qs = q.env.find(d.levels[l]->counter);
      if (ps == p.env.end() || qs == q.env.end()) {
        match = false;
        break;
      }
      int64_t delta = qs->second - ps->second;
      const LevelDist &ld = d.dist[l];
      if ((ld.lo && delta < *ld.lo) || (ld.hi && delta > *ld.hi) ||
          (ld.div > 1 && delta % ld.div != 0)) {
        match = false;
        break;
      }
    }
    if (match)
      return true;
  }
  return false;
}

struct CoverageResult {
  bool ok = true;
  std::size_t pairsChecked = 0;
  std::string failure; // first uncovered pair, for the test message
};

/// Checks that every conflicting instance pair on `array` is ordered by the
/// dependence graph, directly or through an intermediate write to the same
/// cell (reported graphs are transitive reductions: a self-dependence chain
/// A[i] -> A[i+1] -> A[i+2] covers the distance-2 pair via the middle write).
inline CoverageResult checkCoverage(const LoopTree &tree,
                                    const DependenceGraph &g,
                                    const std::string &array,
                                    const std::map<std::string, int64_t> &params) {
  CoverageResult res;
  std::vector<InstAccess> rec;
  if (!enumerateAccesses(tree, array, params, rec)) {
    res.ok = false;
    res.failure = "access budget exceeded";
    return res;
  }
  std::map<std::vector<int64_t>, std::vector<std::size_t>> byCell;
  for (std::size_t i = 0; i < rec.size(); ++i)
    byCell[rec[i].cell].push_back(i);
  for (const auto &[cell, idxs] : byCell) {
    for (std::size_t a = 0; a < idxs.size(); ++a) {
      const InstAccess &p = rec[idxs[a]];
      for (std::size_t b = a + 1; b < idxs.size(); ++b) {
        const InstAccess &q = rec[idxs[b]];
        bool sameInstance = p.leaf == q.leaf && p.env == q.env;
        if (!sameInstance && (p.isWrite || q.isWrite)) {
          ++res.pairsChecked;
          if (!pairCovered(g, p, q)) {
            res.ok = false;
            res.failure = describeInstance(p) + " -> " + describeInstance(q);
            return res;
          }
        }
        // A write transitively orders everything later against everything
        // earlier, so direct checks beyond it are redundant.
        if (q.isWrite)
          break;
      }
    }
  }
  return res;
}

} // namespace testsupport
} // namespace looplang

#endif // LOOPLANG_TESTS_SUPPORT_BRUTEFORCE_H
