//===--- Interp.h - Reference interpreter ------------------------------------===//
//
// Part of the looplang project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Executes a loop tree directly. The interpreter is the semantic authority:
// a transformation is correct when the transformed tree leaves memory (and,
// depending on the mode, the statement-instance trace) equal to the original
// tree's run. Traces are recorded in original iteration coordinates via the
// leaves' trace bindings, so they stay comparable across rewrites.
//
//===----------------------------------------------------------------------===//

#ifndef LOOPLANG_INTERP_H
#define LOOPLANG_INTERP_H

#include "looplang/LoopTree.h"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace looplang {

struct InitSpec {
  enum class Kind { Zeros, Sequential, Seeded } kind = Kind::Zeros;
  uint64_t seed = 0;

  static InitSpec zeros() { return {}; }
  static InitSpec sequential() { return {Kind::Sequential, 0}; }
  static InitSpec seeded(uint64_t seed) { return {Kind::Seeded, seed}; }
};

class InterpError : public std::runtime_error {
public:
  InterpError(DiagCode code, SourceLoc loc, const std::string &msg)
      : std::runtime_error(msg), Code(code), Loc(loc) {}
  DiagCode code() const { return Code; }
  SourceLoc loc() const { return Loc; }

private:
  DiagCode Code;
  SourceLoc Loc;
};

struct TraceEntry {
  int stmtId = -1;
  std::vector<int64_t> coords; // original iteration coordinates

  bool operator==(const TraceEntry &o) const {
    return stmtId == o.stmtId && coords == o.coords;
  }
  bool operator<(const TraceEntry &o) const {
    return stmtId != o.stmtId ? stmtId < o.stmtId : coords < o.coords;
  }
};

struct ArrayVal {
  ElemKind elem = ElemKind::Int;
  std::vector<int64_t> dims;
  std::vector<int64_t> ints;   // flat, row-major
  std::vector<double> floats;
};

struct ExecState {
  std::map<std::string, int64_t> params;
  std::map<std::string, ArrayVal> arrays;
  std::vector<TraceEntry> trace;
};

struct RunOptions {
  std::map<std::string, int64_t> params;
  InitSpec init;
  /// Work budget: every loop iteration and statement instance costs one
  /// unit; exceeding it raises BudgetExceeded.
  uint64_t budget = 100000000;
  bool recordTrace = true;
};

/// Runs the tree. Throws InterpError for out-of-bounds accesses, integer
/// overflow, unbound parameters and budget exhaustion.
ExecState run(const LoopTree &tree, const RunOptions &opts);

enum class EquivMode {
  Memory,        // final arrays only
  TraceMultiset, // + same statement instances, any order
  TraceOrder,    // + same execution order
};

struct EquivResult {
  bool equal = true;
  std::string reason;       // first difference, human-readable
  double maxRelDeviation = 0.0; // over float cells

  explicit operator bool() const { return equal; }
};

/// Compares two final states. Integers compare exactly; floats compare
/// exactly when `floatTol` is 0, otherwise with the given relative
/// tolerance (the maximum deviation is always reported).
EquivResult equivalent(const ExecState &a, const ExecState &b, EquivMode mode,
                       double floatTol = 0.0);

} // namespace looplang

#endif // LOOPLANG_INTERP_H
