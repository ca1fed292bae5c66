//===--- Transform.h - Directive application ---------------------------------===//
//
// Part of the looplang project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Applies the ordered directive list produced by buildTree to a loop tree.
// Every structural directive goes through the same pipeline: resolve its
// targets against the current name table, validate preconditions, run the
// legality gate, and rewrite the tree if the policy lets it proceed.
// Dependence information is recomputed from the rewritten tree before the
// next directive runs, so stacked directives see each other's output.
//
//===----------------------------------------------------------------------===//

#ifndef LOOPLANG_TRANSFORM_H
#define LOOPLANG_TRANSFORM_H

#include "looplang/DepAnalysis.h"
#include "looplang/LoopTree.h"

#include <optional>
#include <string>
#include <vector>

namespace looplang {

enum class Outcome { Applied, Skipped, Error };

const char *outcomeSpelling(Outcome o);

/// What happened to one directive. `gated` is set when a legality check ran;
/// ungated transformations (stripmine, shift, ...) report Proven trivially.
struct TransformReport {
  SourceLoc loc;
  std::string spelling;
  Outcome outcome = Outcome::Applied;
  Verdict verdict = Verdict::Proven;
  bool gated = false;
  std::string reason; // skip or error explanation, empty when applied
  std::vector<std::string> namesIntroduced;

  /// One line: "file:line: spelling: outcome (detail)".
  std::string str() const;
};

struct ApplyOptions {
  /// --reductions=assoc: reduction dependences with one operator may be
  /// reassociated when fusing or distributing.
  bool assocReductions = false;
  /// --policy assert|noassert overrides the per-directive switches.
  std::optional<bool> forceAssert;
};

struct ApplyResult {
  std::vector<TransformReport> reports;
  /// A directive failed under `assert`, or a directive was malformed
  /// (unresolvable or ambiguous targets). Processing stopped there.
  bool aborted = false;
  /// Some directive was skipped because its legality was not proven.
  bool legalitySkip = false;
  /// All applied directives preserve the statement-instance trace order,
  /// not just final memory.
  bool orderPreserving = true;

  std::string renderText() const;
};

/// Applies `pending` (in application order) to `tree`, mutating it in place.
/// Malformed directives abort immediately; legality failures follow each
/// directive's assert/noassert policy.
ApplyResult applyAll(LoopTree &tree, const std::vector<PendingDirective> &pending,
                     DiagEngine &diags, const ApplyOptions &opts = {});

} // namespace looplang

#endif // LOOPLANG_TRANSFORM_H
