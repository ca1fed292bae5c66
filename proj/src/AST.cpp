//===--- AST.cpp -----------------------------------------------------------===//
//
// Part of the looplang project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "looplang/AST.h"

#include <cstring>
#include <iomanip>
#include <sstream>

namespace looplang {

bool isStructural(DirKind k) {
  switch (k) {
  case DirKind::Stripmine:
  case DirKind::Block:
  case DirKind::Tile:
  case DirKind::Interchange:
  case DirKind::Coalesce:
  case DirKind::Concatenate:
  case DirKind::Distribute:
  case DirKind::Fuse:
  case DirKind::Reorder:
  case DirKind::Reverse:
  case DirKind::Shift:
  case DirKind::Scale:
  case DirKind::Split:
  case DirKind::Peel:
  case DirKind::Unroll:
  case DirKind::UnrollAndJam:
    return true;
  default:
    return false;
  }
}

const char *dirKindSpelling(DirKind k) {
  switch (k) {
  case DirKind::Id: return "id";
  case DirKind::Stripmine: return "stripmine";
  case DirKind::Block: return "block";
  case DirKind::Tile: return "tile";
  case DirKind::Interchange: return "interchange";
  case DirKind::Coalesce: return "coalesce";
  case DirKind::Concatenate: return "concatenate";
  case DirKind::Distribute: return "distribute";
  case DirKind::Fuse: return "fuse";
  case DirKind::Reorder: return "reorder";
  case DirKind::Reverse: return "reverse";
  case DirKind::Shift: return "shift";
  case DirKind::Scale: return "scale";
  case DirKind::Split: return "split";
  case DirKind::Peel: return "peel";
  case DirKind::Unroll: return "unroll";
  case DirKind::UnrollAndJam: return "unrollandjam";
  case DirKind::AssumeParallel: return "assume_parallel";
  case DirKind::AssumeCoincident: return "assume_coincident";
  case DirKind::AssumeMinDepdist: return "assume_min_depdist";
  case DirKind::Annotation: return "<annotation>";
  }
  return "?";
}

std::string ClauseArg::str() const {
  switch (kind) {
  case Kind::Name: return name;
  case Kind::Expr: return expr.str();
  case Kind::Cmp: return cmp.str();
  case Kind::Ellipsis: return "...";
  }
  return "";
}

const Clause *Directive::findClause(const std::string &key) const {
  for (const auto &c : clauses)
    if (c.key == key && !c.isSwitch)
      return &c;
  return nullptr;
}

bool Directive::hasSwitch(const std::string &key) const {
  for (const auto &c : clauses)
    if (c.key == key && c.isSwitch)
      return true;
  return false;
}

std::string Directive::str(const std::string &sentinel) const {
  std::ostringstream os;
  os << "#pragma " << sentinel;
  if (targetKind == TargetKind::LoopList ||
      targetKind == TargetKind::SectionList) {
    const char *kw = targetKind == TargetKind::LoopList ? "loop" : "section";
    // `#pragma clang loop(i) ...`: a sentinel ending in the target keyword
    // absorbs the parenthesized list.
    size_t kwLen = std::strlen(kw);
    bool merged =
        sentinel.size() >= kwLen &&
        sentinel.compare(sentinel.size() - kwLen, kwLen, kw) == 0 &&
        (sentinel.size() == kwLen || sentinel[sentinel.size() - kwLen - 1] == ' ');
    if (!merged)
      os << " " << kw;
    os << "(";
    for (size_t i = 0; i < targets.size(); ++i)
      os << (i ? "," : "") << targets[i];
    os << ")";
  }
  os << " ";
  if (kind == DirKind::Id) {
    os << spelling << "(" << (targets.empty() ? "" : targets[0]) << ")";
    return os.str();
  }
  os << (spelling.empty() ? dirKindSpelling(kind) : spelling);
  for (const auto &c : clauses) {
    os << " " << c.key;
    if (!c.isSwitch) {
      os << "(";
      for (size_t i = 0; i < c.args.size(); ++i)
        os << (i ? "," : "") << c.args[i].str();
      os << ")";
    }
  }
  if (assertSeen)
    os << " assert";
  if (noassertSeen)
    os << " noassert";
  if (noversioning)
    os << " noversioning";
  if (assumeSafety)
    os << " assume_safety";
  if (suggestOnly)
    os << " suggest_only";
  return os.str();
}

ExprPtr Expr::clone() const {
  auto e = std::make_unique<Expr>();
  e->kind = kind;
  e->affine = affine;
  e->floatVal = floatVal;
  e->array = array;
  e->subs = subs;
  e->binOp = binOp;
  e->loc = loc;
  if (lhs)
    e->lhs = lhs->clone();
  if (rhs)
    e->rhs = rhs->clone();
  return e;
}

void Expr::substitute(const std::string &name, const AffineExpr &repl) {
  switch (kind) {
  case Kind::Affine:
    affine = affine.substitute(name, repl);
    break;
  case Kind::FloatLit:
    break;
  case Kind::ArrayRead:
    for (auto &s : subs)
      s = s.substitute(name, repl);
    break;
  case Kind::Binary:
    lhs->substitute(name, repl);
    rhs->substitute(name, repl);
    break;
  }
}

std::string Expr::str() const {
  switch (kind) {
  case Kind::Affine:
    return affine.str();
  case Kind::FloatLit: {
    // Shortest decimal form that parses back to the same double.
    std::string s;
    for (int prec = 1; prec <= 17; ++prec) {
      std::ostringstream os;
      os << std::setprecision(prec) << floatVal;
      s = os.str();
      if (std::stod(s) == floatVal)
        break;
    }
    if (s.find_first_not_of("-0123456789") == std::string::npos)
      s += ".0";
    return s;
  }
  case Kind::ArrayRead: {
    std::string s = array;
    for (const auto &sub : subs)
      s += "[" + sub.str() + "]";
    return s;
  }
  case Kind::Binary: {
    auto wrap = [](const Expr &e, bool needParens) {
      std::string s = e.str();
      return needParens ? "(" + s + ")" : s;
    };
    auto prec = [](char op) { return (op == '+' || op == '-') ? 1 : 2; };
    auto leafPrec = [&](const Expr &e) {
      if (e.kind == Kind::Binary)
        return prec(e.binOp);
      if (e.kind == Kind::Affine &&
          (e.affine.terms().size() + (e.affine.constantTerm() != 0 ? 1 : 0)) > 1)
        return 1;
      return 3;
    };
    int p = prec(binOp);
    bool lp = leafPrec(*lhs) < p;
    // Right operand needs parens at equal precedence for - / as well.
    bool rp = leafPrec(*rhs) < p ||
              (leafPrec(*rhs) == p && (binOp == '-' || binOp == '/'));
    return wrap(*lhs, lp) + " " + std::string(1, binOp) + " " + wrap(*rhs, rp);
  }
  }
  return "";
}

const char *assignOpSpelling(AssignOp op) {
  switch (op) {
  case AssignOp::Assign: return "=";
  case AssignOp::PlusAssign: return "+=";
  case AssignOp::MinusAssign: return "-=";
  case AssignOp::TimesAssign: return "*=";
  }
  return "=";
}

const ArrayDecl *Program::findArray(const std::string &name) const {
  for (const auto &a : arrays)
    if (a.name == name)
      return &a;
  return nullptr;
}

bool Program::isParam(const std::string &name) const {
  for (const auto &p : params)
    if (p.name == name)
      return true;
  return false;
}

} // namespace looplang
