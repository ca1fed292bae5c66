//===--- Emit.h - Source emission -------------------------------------------===//
//
// Part of the looplang project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#ifndef LOOPLANG_EMIT_H
#define LOOPLANG_EMIT_H

#include "looplang/LoopTree.h"

#include <string>
#include <vector>

namespace looplang {

enum class EmitStyle {
  /// Re-parseable source; the default. Emission is byte-stable: emitting,
  /// parsing and emitting again reproduces the text exactly.
  LoopLang,
  /// Annotated pseudo-C for reading, not for parsing back.
  PrettyC,
};

/// Prints the tree with directives above their constructs. `pending` holds
/// not-yet-applied directives to re-emit in place (pass {} for a fully
/// transformed tree). Loops whose bounds are constant and empty are dropped.
std::string emit(const LoopTree &tree,
                 const std::vector<PendingDirective> &pending,
                 EmitStyle style = EmitStyle::LoopLang);

} // namespace looplang

#endif // LOOPLANG_EMIT_H
