//===--- Diagnostics.h - Source locations and diagnostic reporting -------===//
//
// Part of the looplang project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#ifndef LOOPLANG_DIAGNOSTICS_H
#define LOOPLANG_DIAGNOSTICS_H

#include <string>
#include <vector>

namespace looplang {

/// A position in an input file. Lines and columns are 1-based; a zero line
/// means "no position" (used for whole-file diagnostics).
struct SourceLoc {
  std::string file;
  int line = 0;
  int col = 0;

  std::string str() const;
  bool valid() const { return line > 0; }
};

enum class DiagLevel { Note, Warning, Error };

/// Stable diagnostic categories. The tag is printed in brackets at the end of
/// the rendered message so tests and scripts can match on it without parsing
/// free-form text.
enum class DiagCode {
  None,
  UnknownTransformation,
  MalformedClause,
  NonCanonicalLoop,
  NonAffineExpression,
  SyntaxError,
  TypeError,
  DuplicateExplicitName,
  UnknownName,
  AmbiguousName,
  BadRange,
  InvalidAnchor,
  PreconditionViolated,
  LegalityNotProven,
  OutOfBounds,
  IntegerOverflow,
  BudgetExceeded,
};

const char *diagCodeName(DiagCode code);

struct Diag {
  DiagLevel level = DiagLevel::Error;
  DiagCode code = DiagCode::None;
  SourceLoc loc;
  std::string message;

  /// Renders as "file:line:col: level: message [Code]".
  std::string str() const;
};

/// Collects diagnostics during a pass. Parsing and name resolution append
/// here instead of throwing; callers check hasErrors() afterwards.
class DiagEngine {
public:
  void report(DiagLevel level, DiagCode code, SourceLoc loc, std::string msg);
  void error(DiagCode code, SourceLoc loc, std::string msg) {
    report(DiagLevel::Error, code, std::move(loc), std::move(msg));
  }
  void warning(DiagCode code, SourceLoc loc, std::string msg) {
    report(DiagLevel::Warning, code, std::move(loc), std::move(msg));
  }

  bool hasErrors() const { return NumErrors > 0; }
  const std::vector<Diag> &all() const { return Diags; }
  std::string renderAll() const;
  void clear() { Diags.clear(); NumErrors = 0; }

private:
  std::vector<Diag> Diags;
  int NumErrors = 0;
};

} // namespace looplang

#endif // LOOPLANG_DIAGNOSTICS_H
