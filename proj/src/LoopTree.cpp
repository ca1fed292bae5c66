//===--- LoopTree.cpp - Schedule tree IR ------------------------------------===//
//
// Part of the looplang project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "looplang/LoopTree.h"

#include <algorithm>
#include <cassert>
#include <map>
#include <sstream>

namespace looplang {

//===----------------------------------------------------------------------===//
// Node
//===----------------------------------------------------------------------===//

static NodePtr cloneImpl(const Node &n, int *nextId) {
  auto c = std::make_unique<Node>();
  c->kind = n.kind;
  c->id = nextId ? (*nextId)++ : n.id;
  c->loc = n.loc;
  c->counter = n.counter;
  c->lb = n.lb;
  c->ubs = n.ubs;
  c->step = n.step;
  c->name = n.name;
  c->nameOrigin = n.nameOrigin;
  c->idDir = n.idDir;
  c->annotations = n.annotations;
  c->cond = n.cond;
  c->stmtId = n.stmtId;
  c->array = n.array;
  c->subs = n.subs;
  c->op = n.op;
  c->rhs = n.rhs ? n.rhs->clone() : nullptr;
  c->traceBindings = n.traceBindings;
  for (const auto &ch : n.children)
    c->children.push_back(cloneImpl(*ch, nextId));
  for (const auto &ch : n.elseChildren)
    c->elseChildren.push_back(cloneImpl(*ch, nextId));
  return c;
}

NodePtr Node::cloneSame() const { return cloneImpl(*this, nullptr); }

NodePtr Node::cloneFresh(int &nextId) const { return cloneImpl(*this, &nextId); }

void Node::substitute(const std::string &nameToReplace, const AffineExpr &repl) {
  switch (kind) {
  case Kind::Band:
    lb = lb.substitute(nameToReplace, repl);
    for (auto &u : ubs)
      u = u.substitute(nameToReplace, repl);
    if (counter == nameToReplace)
      return; // children see the shadowing counter, not the outer name
    break;
  case Kind::Guard:
    cond.lhs = cond.lhs.substitute(nameToReplace, repl);
    cond.rhs = cond.rhs.substitute(nameToReplace, repl);
    break;
  case Kind::Leaf:
    for (auto &s : subs)
      s = s.substitute(nameToReplace, repl);
    if (rhs)
      rhs->substitute(nameToReplace, repl);
    for (auto &b : traceBindings)
      b.second = b.second.substitute(nameToReplace, repl);
    return;
  case Kind::Seq:
  case Kind::Section:
    break;
  }
  for (auto &ch : children)
    ch->substitute(nameToReplace, repl);
  for (auto &ch : elseChildren)
    ch->substitute(nameToReplace, repl);
}

static void collectReads(const Expr &e, std::vector<Access> &out,
                         const SourceLoc &loc) {
  switch (e.kind) {
  case Expr::Kind::ArrayRead: {
    Access a;
    a.array = e.array;
    a.subs = e.subs;
    a.isWrite = false;
    a.loc = loc;
    out.push_back(std::move(a));
    break;
  }
  case Expr::Kind::Binary:
    collectReads(*e.lhs, out, loc);
    collectReads(*e.rhs, out, loc);
    break;
  case Expr::Kind::Affine:
  case Expr::Kind::FloatLit:
    break;
  }
}

std::vector<Access> Node::accesses() const {
  assert(kind == Kind::Leaf);
  std::vector<Access> out;
  Access w;
  w.array = array;
  w.subs = subs;
  w.isWrite = true;
  w.isReduce = op != AssignOp::Assign;
  switch (op) {
  case AssignOp::PlusAssign:
    w.reduceOp = '+';
    break;
  case AssignOp::MinusAssign:
    w.reduceOp = '-';
    break;
  case AssignOp::TimesAssign:
    w.reduceOp = '*';
    break;
  case AssignOp::Assign:
    break;
  }
  w.loc = loc;
  out.push_back(std::move(w));
  if (rhs)
    collectReads(*rhs, out, loc);
  return out;
}

std::string Node::statementText() const {
  assert(kind == Kind::Leaf);
  std::ostringstream os;
  os << array;
  for (const auto &s : subs)
    os << "[" << s.str() << "]";
  os << " " << assignOpSpelling(op) << " " << (rhs ? rhs->str() : "?");
  return os.str();
}

//===----------------------------------------------------------------------===//
// LoopTree
//===----------------------------------------------------------------------===//

static Node *findIn(Node &n, int id) {
  if (n.id == id)
    return &n;
  for (auto &ch : n.children)
    if (Node *r = findIn(*ch, id))
      return r;
  for (auto &ch : n.elseChildren)
    if (Node *r = findIn(*ch, id))
      return r;
  return nullptr;
}

Node *LoopTree::find(int id) const {
  return root ? findIn(*root, id) : nullptr;
}

static bool pathIn(Node &n, int id, std::vector<Node *> &path) {
  path.push_back(&n);
  if (n.id == id)
    return true;
  for (auto &ch : n.children)
    if (pathIn(*ch, id, path))
      return true;
  for (auto &ch : n.elseChildren)
    if (pathIn(*ch, id, path))
      return true;
  path.pop_back();
  return false;
}

std::vector<Node *> LoopTree::pathTo(int id) const {
  std::vector<Node *> path;
  if (!root || !pathIn(*root, id, path))
    return {};
  return path;
}

std::vector<Node *> LoopTree::bandPath(const Node *n, bool includeSelf) const {
  std::vector<Node *> bands;
  for (Node *p : pathTo(n->id)) {
    if (!p->isBand())
      continue;
    if (p->id == n->id && !includeSelf)
      continue;
    bands.push_back(p);
  }
  return bands;
}

Node *LoopTree::parentOf(const Node *n) const {
  auto path = pathTo(n->id);
  return path.size() >= 2 ? path[path.size() - 2] : nullptr;
}

static void preOrderIn(Node &n, const std::function<void(Node &)> &fn) {
  fn(n);
  for (auto &ch : n.children)
    preOrderIn(*ch, fn);
  for (auto &ch : n.elseChildren)
    preOrderIn(*ch, fn);
}

void Node::forEach(const std::function<void(Node &)> &fn) {
  preOrderIn(*this, fn);
}

void Node::forEach(const std::function<void(const Node &)> &fn) const {
  preOrderIn(const_cast<Node &>(*this),
             [&fn](Node &n) { fn(static_cast<const Node &>(n)); });
}

void LoopTree::preOrder(const std::function<void(Node &)> &fn) const {
  if (root)
    preOrderIn(*root, fn);
}

LoopTree LoopTree::clone() const {
  LoopTree t;
  t.root = root ? root->cloneSame() : nullptr;
  t.file = file;
  t.sentinel = sentinel;
  t.params = params;
  t.arrays = arrays;
  t.NextId = NextId;
  return t;
}

bool LoopTree::isParam(const std::string &name) const {
  for (const auto &p : params)
    if (p.name == name)
      return true;
  return false;
}

const ArrayDecl *LoopTree::findArray(const std::string &name) const {
  for (const auto &a : arrays)
    if (a.name == name)
      return &a;
  return nullptr;
}

static std::string boundsStr(const Node &b) {
  std::ostringstream os;
  os << "[" << b.lb.str() << ", ";
  if (b.ubs.size() == 1) {
    os << b.ubs[0].str();
  } else {
    os << "min(";
    for (size_t i = 0; i < b.ubs.size(); ++i)
      os << (i ? ", " : "") << b.ubs[i].str();
    os << ")";
  }
  os << ")";
  return os.str();
}

static void dumpNode(const Node &n, int depth, const std::string &sentinel,
                     std::ostringstream &os) {
  std::string ind(static_cast<size_t>(depth) * 2, ' ');
  auto nameSuffix = [&]() -> std::string {
    if (n.nameOrigin == NameOrigin::None)
      return "";
    return " name=" + n.name +
           (n.nameOrigin == NameOrigin::Explicit ? " (explicit)" : " (output)");
  };
  switch (n.kind) {
  case Node::Kind::Seq:
    os << ind << "seq#" << n.id << "\n";
    break;
  case Node::Kind::Band:
    os << ind << "band#" << n.id << " " << n.counter << " in " << boundsStr(n)
       << " step " << n.step << nameSuffix() << "\n";
    break;
  case Node::Kind::Section:
    os << ind << "section#" << n.id << nameSuffix() << "\n";
    break;
  case Node::Kind::Leaf:
    os << ind << "leaf#" << n.id << " s" << n.stmtId << " "
       << n.statementText() << "\n";
    break;
  case Node::Kind::Guard:
    os << ind << "guard#" << n.id << " (" << n.cond.str() << ")\n";
    break;
  }
  for (const auto &a : n.annotations)
    os << ind << "  @ " << a.str(sentinel) << "\n";
  if (n.kind == Node::Kind::Guard) {
    os << ind << "  then:\n";
    for (const auto &ch : n.children)
      dumpNode(*ch, depth + 2, sentinel, os);
    if (!n.elseChildren.empty()) {
      os << ind << "  else:\n";
      for (const auto &ch : n.elseChildren)
        dumpNode(*ch, depth + 2, sentinel, os);
    }
    return;
  }
  for (const auto &ch : n.children)
    dumpNode(*ch, depth + 1, sentinel, os);
}

std::string LoopTree::dump() const {
  std::ostringstream os;
  if (root)
    dumpNode(*root, 0, sentinel, os);
  return os.str();
}

//===----------------------------------------------------------------------===//
// Building from the AST
//===----------------------------------------------------------------------===//

namespace {

class TreeBuilder {
public:
  TreeBuilder(const Program &prog, DiagEngine &diags)
      : Prog(prog), Diags(diags) {}

  BuildResult run() {
    BuildResult res;
    Tree = &res.tree;
    Tree->file = Prog.file;
    Tree->sentinel = Prog.sentinel;
    Tree->params = Prog.params;
    Tree->arrays = Prog.arrays;
    Tree->root = std::make_unique<Node>();
    Tree->root->kind = Node::Kind::Seq;
    Tree->root->id = Tree->allocId();
    std::vector<std::string> counters;
    buildInto(Tree->root->children, Prog.items, counters);

    // Innermost-first over the finished tree, then whatever trailed the last
    // statement.
    assemble(*Tree->root, res.pending);
    for (const auto &d : Prog.trailing)
      res.pending.push_back(PendingDirective{d, -1});
    return res;
  }

private:
  const Program &Prog;
  DiagEngine &Diags;
  LoopTree *Tree = nullptr;
  std::map<int, std::vector<Directive>> PendingAt;

  void buildInto(std::vector<NodePtr> &out, const std::vector<StmtPtr> &list,
                 std::vector<std::string> &counters) {
    for (const auto &s : list)
      out.push_back(buildStmt(*s, counters));
  }

  NodePtr buildStmt(const Stmt &s, std::vector<std::string> &counters) {
    auto n = std::make_unique<Node>();
    n->id = Tree->allocId();
    n->loc = s.loc;
    switch (s.kind) {
    case Stmt::Kind::For: {
      n->kind = Node::Kind::Band;
      n->counter = s.counter;
      n->lb = s.lb;
      n->ubs = s.ubs;
      n->step = s.step;
      counters.push_back(s.counter);
      if (s.body->kind == Stmt::Kind::Block && s.body->pragmas.empty()) {
        buildInto(n->children, s.body->stmts, counters);
      } else {
        n->children.push_back(buildStmt(*s.body, counters));
      }
      counters.pop_back();
      break;
    }
    case Stmt::Kind::Block:
      n->kind = Node::Kind::Section;
      buildInto(n->children, s.stmts, counters);
      break;
    case Stmt::Kind::Assign: {
      n->kind = Node::Kind::Leaf;
      n->stmtId = s.stmtId;
      n->array = s.array;
      n->subs = s.subs;
      n->op = s.op;
      n->rhs = s.rhs->clone();
      for (const auto &c : counters)
        n->traceBindings.emplace_back(c, AffineExpr::sym(c));
      break;
    }
    case Stmt::Kind::If: {
      n->kind = Node::Kind::Guard;
      n->cond = s.cond;
      if (s.thenStmt->kind == Stmt::Kind::Block && s.thenStmt->pragmas.empty())
        buildInto(n->children, s.thenStmt->stmts, counters);
      else
        n->children.push_back(buildStmt(*s.thenStmt, counters));
      if (s.elseStmt) {
        if (s.elseStmt->kind == Stmt::Kind::Block &&
            s.elseStmt->pragmas.empty())
          buildInto(n->elseChildren, s.elseStmt->stmts, counters);
        else
          n->elseChildren.push_back(buildStmt(*s.elseStmt, counters));
      }
      break;
    }
    }
    attachPragmas(*n, s.pragmas);
    return n;
  }

  void attachPragmas(Node &n, const std::vector<Directive> &pragmas) {
    for (const Directive &d : pragmas) {
      if (d.kind == DirKind::Id) {
        if (n.kind != Node::Kind::Band && n.kind != Node::Kind::Section) {
          Diags.error(DiagCode::InvalidAnchor, d.loc,
                      "id must precede a loop or a block");
          continue;
        }
        if (n.nameOrigin != NameOrigin::None) {
          Diags.error(DiagCode::MalformedClause, d.loc,
                      "construct already named '" + n.name + "'");
          continue;
        }
        n.name = d.targets.empty() ? "" : d.targets[0];
        n.nameOrigin = NameOrigin::Explicit;
        n.idDir = d;
        continue;
      }
      if (d.kind == DirKind::Annotation &&
          d.targetKind == TargetKind::FollowingConstruct) {
        n.annotations.push_back(d);
        continue;
      }
      PendingAt[n.id].push_back(d);
    }
  }

  /// Per-construct order: bottom-up over the pragma stack, except that each
  /// maximal run of explicitly-targeted directives stays in textual order.
  static std::vector<Directive> arrangeStack(std::vector<Directive> textual) {
    std::vector<std::vector<Directive>> groups;
    std::vector<bool> targeted;
    for (auto &d : textual) {
      bool t = d.targetKind != TargetKind::FollowingConstruct;
      if (groups.empty() || t != targeted.back()) {
        groups.emplace_back();
        targeted.push_back(t);
      }
      groups.back().push_back(std::move(d));
    }
    std::vector<Directive> out;
    for (size_t gi = groups.size(); gi-- > 0;) {
      if (targeted[gi]) {
        for (auto &d : groups[gi])
          out.push_back(std::move(d));
      } else {
        for (size_t di = groups[gi].size(); di-- > 0;)
          out.push_back(std::move(groups[gi][di]));
      }
    }
    return out;
  }

  void assemble(Node &n, std::vector<PendingDirective> &out) {
    for (auto &ch : n.children)
      assemble(*ch, out);
    for (auto &ch : n.elseChildren)
      assemble(*ch, out);
    auto it = PendingAt.find(n.id);
    if (it == PendingAt.end())
      return;
    for (auto &d : arrangeStack(std::move(it->second)))
      out.push_back(PendingDirective{std::move(d), n.id});
  }
};

} // namespace

BuildResult buildTree(const Program &prog, DiagEngine &diags) {
  return TreeBuilder(prog, diags).run();
}

//===----------------------------------------------------------------------===//
// Iteration counts
//===----------------------------------------------------------------------===//

int64_t iterationCount(const Node &band,
                       const std::function<int64_t(const std::string &)> &env) {
  assert(band.isBand());
  int64_t lo = band.lb.evaluate(env);
  int64_t hi = band.ubs[0].evaluate(env);
  for (size_t i = 1; i < band.ubs.size(); ++i)
    hi = std::min(hi, band.ubs[i].evaluate(env));
  if (hi <= lo)
    return 0;
  return floorDiv(checkedAdd(checkedSub(hi, lo), band.step - 1), band.step);
}

std::optional<AffineExpr> extentExpr(const Node &band) {
  if (band.ubs.size() != 1)
    return std::nullopt;
  AffineExpr diff = band.ubs[0] - band.lb + AffineExpr(band.step - 1);
  return diff.floordivBy(band.step);
}

} // namespace looplang
