//===--- AST.h - Parsed program representation -----------------------------===//
//
// Part of the looplang project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#ifndef LOOPLANG_AST_H
#define LOOPLANG_AST_H

#include "looplang/AffineExpr.h"
#include "looplang/Diagnostics.h"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace looplang {

//===----------------------------------------------------------------------===//
// Directives
//===----------------------------------------------------------------------===//

/// Directive kinds. Structural kinds rewrite the loop tree; the Assume*
/// kinds feed dependence analysis; Annotation covers every directive that is
/// carried through transformations unchanged and re-emitted (parallel for,
/// simd, pack, expect_count, ...). Id assigns an explicit name.
enum class DirKind {
  Id,
  Stripmine,
  Block,
  Tile,
  Interchange,
  Coalesce,
  Concatenate,
  Distribute,
  Fuse,
  Reorder,
  Reverse,
  Shift,
  Scale,
  Split,
  Peel,
  Unroll,
  UnrollAndJam,
  AssumeParallel,
  AssumeCoincident,
  AssumeMinDepdist,
  Annotation,
};

bool isStructural(DirKind k);
const char *dirKindSpelling(DirKind k);

enum class TargetKind { FollowingConstruct, LoopList, SectionList };

/// One clause argument. The parser stores the surface form; per-directive
/// planning decides whether a name, an integer, an expression or a
/// comparison was required.
struct ClauseArg {
  enum class Kind { Name, Expr, Cmp, Ellipsis } kind = Kind::Name;
  std::string name;   // Kind::Name
  AffineExpr expr;    // Kind::Expr
  AffineCmp cmp;      // Kind::Cmp
  SourceLoc loc;

  std::string str() const;
};

struct Clause {
  std::string key;
  std::vector<ClauseArg> args;
  bool isSwitch = false; // bare keyword, no parentheses
  SourceLoc loc;
};

struct Directive {
  DirKind kind = DirKind::Annotation;
  std::string spelling;    // as written, e.g. "parallel for", "stripmine"
  TargetKind targetKind = TargetKind::FollowingConstruct;
  std::vector<std::string> targets; // "..." entries mark an ellipsis
  std::vector<Clause> clauses;

  // Policy switches (see docs/looplang.md). `assertive` reflects assert /
  // noassert with noassert as the default.
  bool assertive = false;
  bool assertSeen = false, noassertSeen = false;
  bool noversioning = false;
  bool assumeSafety = false;
  bool suggestOnly = false;

  SourceLoc loc;
  int seq = -1; // textual order over the whole file

  const Clause *findClause(const std::string &key) const;
  bool hasSwitch(const std::string &key) const;
  std::string str(const std::string &sentinel) const;
};

//===----------------------------------------------------------------------===//
// Statements and declarations
//===----------------------------------------------------------------------===//

enum class ElemKind { Int, Float64 };

struct ParamDecl {
  std::string name;
  SourceLoc loc;
};

struct ArrayDecl {
  std::string name;
  ElemKind elem = ElemKind::Int;
  std::vector<AffineExpr> dims; // affine over parameters only
  SourceLoc loc;
};

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

/// Right-hand-side expressions. Anything affine is folded into a single
/// Affine node at parse time; Binary nodes only appear where an array read
/// or a float literal makes the expression non-affine.
struct Expr {
  enum class Kind { Affine, FloatLit, ArrayRead, Binary };
  Kind kind = Kind::Affine;
  AffineExpr affine;                // Affine
  double floatVal = 0;              // FloatLit
  std::string array;                // ArrayRead
  std::vector<AffineExpr> subs;     // ArrayRead
  char binOp = '+';                 // Binary: + - * /
  ExprPtr lhs, rhs;                 // Binary
  SourceLoc loc;

  ExprPtr clone() const;
  void substitute(const std::string &name, const AffineExpr &repl);
  std::string str() const;
};

enum class AssignOp { Assign, PlusAssign, MinusAssign, TimesAssign };

const char *assignOpSpelling(AssignOp op);

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct Stmt {
  enum class Kind { For, Block, Assign, If };
  Kind kind = Kind::Assign;
  SourceLoc loc;
  std::vector<Directive> pragmas; // directives textually above this statement

  // For
  std::string counter;
  AffineExpr lb;
  std::vector<AffineExpr> ubs; // upper bound is min over entries, exclusive
  int64_t step = 1;
  StmtPtr body;

  // Block / If branches
  std::vector<StmtPtr> stmts; // Block
  // Assign
  std::string array;
  std::vector<AffineExpr> subs;
  AssignOp op = AssignOp::Assign;
  ExprPtr rhs;
  int stmtId = -1;

  // If
  AffineCmp cond;
  StmtPtr thenStmt, elseStmt;
};

struct Program {
  std::string file;
  std::string sentinel = "omp";
  std::vector<ParamDecl> params;
  std::vector<ArrayDecl> arrays;
  std::vector<StmtPtr> items;
  std::vector<Directive> trailing; // directives with no following statement
  int numStatements = 0;

  const ArrayDecl *findArray(const std::string &name) const;
  bool isParam(const std::string &name) const;
};

} // namespace looplang

#endif // LOOPLANG_AST_H
