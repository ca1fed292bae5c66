//===--- LoopTree.h - Schedule tree IR -------------------------------------===//
//
// Part of the looplang project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// The loop tree is the structure transformations rewrite: bands (loops) over
// sequences of sections, guards and statement leaves. Every node has an id
// that is unique within its tree; rewrites allocate fresh ids for new nodes.
// Leaves carry trace bindings mapping the original iteration coordinates to
// expressions over the current counters, which is what keeps statement
// instances comparable across transformations.
//
//===----------------------------------------------------------------------===//

#ifndef LOOPLANG_LOOPTREE_H
#define LOOPLANG_LOOPTREE_H

#include "looplang/AST.h"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace looplang {

enum class NameOrigin { None, Explicit, Output };

struct Access {
  std::string array;
  std::vector<AffineExpr> subs;
  bool isWrite = false;
  /// Read-modify-write on a single cell (`A[...] op= rhs`); such an access
  /// is both read and written and carries the update operator.
  bool isReduce = false;
  char reduceOp = 0;
  SourceLoc loc;
};

class Node;
using NodePtr = std::unique_ptr<Node>;

class Node {
public:
  enum class Kind { Seq, Band, Section, Leaf, Guard };

  Kind kind = Kind::Seq;
  int id = -1;
  SourceLoc loc;

  // Band.
  std::string counter;
  AffineExpr lb;
  std::vector<AffineExpr> ubs; // exclusive; effective bound is the minimum
  int64_t step = 1;

  // Band and Section naming.
  std::string name;
  NameOrigin nameOrigin = NameOrigin::None;
  std::optional<Directive> idDir; // original id pragma, for re-emission order

  // Inert directives attached to this construct, re-emitted above it.
  std::vector<Directive> annotations;

  // Children: band body, sequence items, section contents, guard then-branch.
  std::vector<NodePtr> children;
  std::vector<NodePtr> elseChildren; // Guard only
  AffineCmp cond;                    // Guard only

  // Leaf.
  int stmtId = -1;
  std::string array;
  std::vector<AffineExpr> subs;
  AssignOp op = AssignOp::Assign;
  ExprPtr rhs;
  /// Original coordinate name -> value in terms of current counters.
  std::vector<std::pair<std::string, AffineExpr>> traceBindings;

  bool isBand() const { return kind == Kind::Band; }
  bool isLeaf() const { return kind == Kind::Leaf; }

  /// Pre-order walk of this subtree (both branches of guards).
  void forEach(const std::function<void(Node &)> &fn);
  void forEach(const std::function<void(const Node &)> &fn) const;

  /// Deep copy preserving node ids (snapshots for before/after comparison).
  NodePtr cloneSame() const;
  /// Deep copy with fresh ids drawn from `nextId` (duplication inside one
  /// tree, e.g. unrolled bodies).
  NodePtr cloneFresh(int &nextId) const;

  /// Applies counter substitution to bounds, subscripts, rhs, trace bindings
  /// and guard conditions in this subtree.
  void substitute(const std::string &nameToReplace, const AffineExpr &repl);

  /// Write accesses plus rhs read accesses of a leaf.
  std::vector<Access> accesses() const;

  std::string statementText() const; // leaves only
};

/// A directive waiting to be applied, in global application order.
struct PendingDirective {
  Directive dir;
  int anchorId = -1; // node the directive textually preceded; -1 = trailing
};

class LoopTree {
public:
  NodePtr root; // always a Seq
  std::string file;
  std::string sentinel = "omp";
  std::vector<ParamDecl> params;
  std::vector<ArrayDecl> arrays;

  int allocId() { return NextId++; }
  void noteId(int id) { NextId = std::max(NextId, id + 1); }

  Node *find(int id) const;
  /// Root-to-node path (inclusive); empty when the id is absent.
  std::vector<Node *> pathTo(int id) const;
  /// Enclosing bands of a node, outermost first (excluding the node itself
  /// unless includeSelf and the node is a band).
  std::vector<Node *> bandPath(const Node *n, bool includeSelf = false) const;
  Node *parentOf(const Node *n) const;

  void preOrder(const std::function<void(Node &)> &fn) const;

  LoopTree clone() const; // ids preserved

  bool isParam(const std::string &name) const;
  const ArrayDecl *findArray(const std::string &name) const;

  /// Stable indented dump of the tree (the `dump-ir` format).
  std::string dump() const;

private:
  int NextId = 0;
};

struct BuildResult {
  LoopTree tree;
  std::vector<PendingDirective> pending; // in application order
};

/// Lowers a parsed program into a loop tree. Consumes `id` pragmas into
/// explicit names, attaches annotation directives to their nodes, and
/// sequences the remaining directives into application order: constructs are
/// visited innermost-first, and within one construct's pragma stack the
/// directives apply bottom-up except that a run of explicitly-targeted
/// directives keeps its textual order.
BuildResult buildTree(const Program &prog, DiagEngine &diags);

/// Number of iterations of one band under concrete parameter bindings.
int64_t iterationCount(const Node &band,
                       const std::function<int64_t(const std::string &)> &env);

/// Symbolic iteration count; requires a single upper bound.
std::optional<AffineExpr> extentExpr(const Node &band);

} // namespace looplang

#endif // LOOPLANG_LOOPTREE_H
