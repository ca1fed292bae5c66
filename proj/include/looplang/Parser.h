//===--- Parser.h - LoopLang source and pragma parsing --------------------===//
//
// Part of the looplang project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#ifndef LOOPLANG_PARSER_H
#define LOOPLANG_PARSER_H

#include "looplang/AST.h"
#include "looplang/Diagnostics.h"

#include <optional>
#include <string>
#include <string_view>

namespace looplang {

struct ParserConfig {
  /// Pragma sentinel the tool claims. Whitespace-separated words: the
  /// default "omp" matches `#pragma omp ...`; "clang loop" accepts the
  /// hybrid `#pragma clang loop(...) transformation` form. Lines with other
  /// sentinels are ignored with a warning.
  std::string sentinel = "omp";
};

/// Parses a whole translation unit. Errors are reported to `diags`; the
/// returned Program is meaningful only when !diags.hasErrors().
Program parseProgram(std::string_view source, std::string file,
                     const ParserConfig &config, DiagEngine &diags);

/// Parses one pragma line ("#pragma <sentinel> ...", leading '#' optional).
/// Returns std::nullopt and reports nothing when the sentinel does not
/// match; returns std::nullopt with diagnostics on malformed input.
std::optional<Directive> parseDirective(std::string_view text, SourceLoc loc,
                                        const ParserConfig &config,
                                        DiagEngine &diags);

} // namespace looplang

#endif // LOOPLANG_PARSER_H
