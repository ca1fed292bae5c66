//===--- Diagnostics.cpp ---------------------------------------------------===//
//
// Part of the looplang project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "looplang/Diagnostics.h"

#include <sstream>

namespace looplang {

std::string SourceLoc::str() const {
  std::ostringstream os;
  os << (file.empty() ? "<input>" : file);
  if (line > 0) {
    os << ":" << line;
    if (col > 0)
      os << ":" << col;
  }
  return os.str();
}

const char *diagCodeName(DiagCode code) {
  switch (code) {
  case DiagCode::None: return "";
  case DiagCode::UnknownTransformation: return "UnknownTransformation";
  case DiagCode::MalformedClause: return "MalformedClause";
  case DiagCode::NonCanonicalLoop: return "NonCanonicalLoop";
  case DiagCode::NonAffineExpression: return "NonAffineExpression";
  case DiagCode::SyntaxError: return "SyntaxError";
  case DiagCode::TypeError: return "TypeError";
  case DiagCode::DuplicateExplicitName: return "DuplicateExplicitName";
  case DiagCode::UnknownName: return "UnknownName";
  case DiagCode::AmbiguousName: return "AmbiguousName";
  case DiagCode::BadRange: return "BadRange";
  case DiagCode::InvalidAnchor: return "InvalidAnchor";
  case DiagCode::PreconditionViolated: return "PreconditionViolated";
  case DiagCode::LegalityNotProven: return "LegalityNotProven";
  case DiagCode::OutOfBounds: return "OutOfBounds";
  case DiagCode::IntegerOverflow: return "IntegerOverflow";
  case DiagCode::BudgetExceeded: return "BudgetExceeded";
  }
  return "";
}

static const char *levelName(DiagLevel level) {
  switch (level) {
  case DiagLevel::Note: return "note";
  case DiagLevel::Warning: return "warning";
  case DiagLevel::Error: return "error";
  }
  return "error";
}

std::string Diag::str() const {
  std::ostringstream os;
  os << loc.str() << ": " << levelName(level) << ": " << message;
  if (code != DiagCode::None)
    os << " [" << diagCodeName(code) << "]";
  return os.str();
}

void DiagEngine::report(DiagLevel level, DiagCode code, SourceLoc loc,
                        std::string msg) {
  if (level == DiagLevel::Error)
    ++NumErrors;
  Diags.push_back(Diag{level, code, std::move(loc), std::move(msg)});
}

std::string DiagEngine::renderAll() const {
  std::string out;
  for (const auto &d : Diags) {
    out += d.str();
    out += "\n";
  }
  return out;
}

} // namespace looplang
