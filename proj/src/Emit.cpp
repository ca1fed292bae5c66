//===--- Emit.cpp - Source emission ------------------------------------------===//
//
// Part of the looplang project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "looplang/Emit.h"

#include <algorithm>
#include <map>
#include <sstream>

namespace looplang {

namespace {

class Emitter {
public:
  Emitter(const LoopTree &tree, const std::vector<PendingDirective> &pending,
          EmitStyle style)
      : Tree(tree), Style(style) {
    for (const auto &p : pending)
      PendingAt[p.anchorId].push_back(p.dir);
    for (auto &[id, dirs] : PendingAt)
      std::sort(dirs.begin(), dirs.end(),
                [](const Directive &a, const Directive &b) {
                  return a.seq < b.seq;
                });
  }

  std::string run() {
    if (Style == EmitStyle::PrettyC)
      return pretty();
    for (const auto &p : Tree.params)
      OS << "param int " << p.name << ";\n";
    for (const auto &a : Tree.arrays) {
      OS << "array " << (a.elem == ElemKind::Int ? "int" : "double") << " "
         << a.name;
      for (const auto &d : a.dims)
        OS << "[" << d.str() << "]";
      OS << ";\n";
    }
    if ((!Tree.params.empty() || !Tree.arrays.empty()) &&
        !Tree.root->children.empty())
      OS << "\n";
    for (const Node *ch : effChildren(Tree.root->children))
      emitNode(*ch, 0);
    auto it = PendingAt.find(-1);
    if (it != PendingAt.end())
      for (const auto &d : it->second)
        OS << d.str(Tree.sentinel) << "\n";
    return OS.str();
  }

private:
  const LoopTree &Tree;
  EmitStyle Style;
  std::map<int, std::vector<Directive>> PendingAt;
  std::ostringstream OS;

  static std::string ind(int depth) {
    return std::string(static_cast<size_t>(depth) * 2, ' ');
  }

  /// A loop whose domain is empty for every parameter binding is dropped
  /// entirely; split and peel produce such loops at the boundaries.
  static bool provablyEmpty(const Node &n) {
    if (!n.isBand())
      return false;
    for (const auto &u : n.ubs) {
      int64_t d;
      if ((u - n.lb).getConstant(d) && d <= 0)
        return true;
    }
    return false;
  }

  std::vector<Directive> directivesFor(const Node &n) const {
    std::vector<std::pair<int, Directive>> merged;
    if (n.nameOrigin != NameOrigin::None) {
      if (n.idDir) {
        merged.emplace_back(n.idDir->seq, *n.idDir);
      } else {
        Directive d;
        d.kind = DirKind::Id;
        d.spelling = n.isBand() ? "id" : "section id";
        d.targets = {n.name};
        d.seq = -1;
        merged.emplace_back(-1, d);
      }
    }
    for (const auto &a : n.annotations)
      merged.emplace_back(a.seq, a);
    auto it = PendingAt.find(n.id);
    if (it != PendingAt.end())
      for (const auto &d : it->second)
        merged.emplace_back(d.seq, d);
    std::stable_sort(
        merged.begin(), merged.end(),
        [](const auto &a, const auto &b) { return a.first < b.first; });
    std::vector<Directive> out;
    for (auto &[seq, d] : merged)
      out.push_back(std::move(d));
    return out;
  }

  bool hasDirectives(const Node &n) const {
    return n.nameOrigin != NameOrigin::None || !n.annotations.empty() ||
           PendingAt.count(n.id);
  }

  /// Children with anonymous, directive-free sections spliced away; their
  /// braces would not survive a reparse, so they are not printed either.
  std::vector<const Node *>
  effChildren(const std::vector<NodePtr> &children) const {
    std::vector<const Node *> out;
    for (const auto &ch : children) {
      if (ch->kind == Node::Kind::Section && !hasDirectives(*ch)) {
        auto inner = effChildren(ch->children);
        out.insert(out.end(), inner.begin(), inner.end());
      } else {
        out.push_back(ch.get());
      }
    }
    return out;
  }

  /// `i < ub`, printed as `i <= ub-1` when the bound reads better that way
  /// (symbolic bound with a +1, e.g. `i <= n` or `i <= n / 2`).
  std::string boundStr(const std::string &ctr, const AffineExpr &ub) const {
    if (ub.constantTerm() == 1 && !ub.terms().empty())
      return ctr + " <= " + (ub - 1).str();
    return ctr + " < " + ub.str();
  }

  void emitDirectives(const Node &n, int depth) {
    for (const auto &d : directivesFor(n))
      OS << ind(depth) << d.str(Tree.sentinel) << "\n";
  }

  void emitBody(const std::vector<NodePtr> &children, int depth) {
    // A single child goes brace-free under its parent, pragmas and all;
    // sections carry their own braces.
    auto eff = effChildren(children);
    if (eff.size() == 1 && eff[0]->kind != Node::Kind::Seq) {
      OS << "\n";
      emitNode(*eff[0], depth + 1);
      return;
    }
    OS << " {\n";
    for (const Node *ch : eff)
      emitNode(*ch, depth + 1);
    OS << ind(depth) << "}\n";
  }

  void emitNode(const Node &n, int depth) {
    if (provablyEmpty(n))
      return;
    emitDirectives(n, depth);
    switch (n.kind) {
    case Node::Kind::Band: {
      OS << ind(depth) << "for (int " << n.counter << " = " << n.lb.str()
         << "; ";
      for (size_t i = 0; i < n.ubs.size(); ++i)
        OS << (i ? " && " : "") << boundStr(n.counter, n.ubs[i]);
      OS << "; " << n.counter << " += " << n.step << ")";
      emitBody(n.children, depth);
      break;
    }
    case Node::Kind::Guard: {
      OS << ind(depth) << "if (" << n.cond.str() << ")";
      emitBody(n.children, depth);
      if (!n.elseChildren.empty()) {
        OS << ind(depth) << "else";
        emitBody(n.elseChildren, depth);
      }
      break;
    }
    case Node::Kind::Leaf:
      OS << ind(depth) << n.statementText() << ";\n";
      break;
    case Node::Kind::Section:
      OS << ind(depth) << "{\n";
      for (const Node *ch : effChildren(n.children))
        emitNode(*ch, depth + 1);
      OS << ind(depth) << "}\n";
      break;
    case Node::Kind::Seq:
      for (const Node *ch : effChildren(n.children))
        emitNode(*ch, depth);
      break;
    }
  }

  //===--------------------------------------------------------------------===//
  // Pseudo-C rendering
  //===--------------------------------------------------------------------===//

  std::string pretty() {
    OS << "// " << Tree.file << "\n";
    OS << "void kernel(";
    bool first = true;
    for (const auto &p : Tree.params) {
      OS << (first ? "" : ", ") << "int64_t " << p.name;
      first = false;
    }
    for (const auto &a : Tree.arrays) {
      OS << (first ? "" : ", ")
         << (a.elem == ElemKind::Int ? "int64_t " : "double ") << a.name;
      for (const auto &d : a.dims)
        OS << "[" << d.str() << "]";
      first = false;
    }
    OS << ") {\n";
    for (const auto &ch : Tree.root->children)
      prettyNode(*ch, 1);
    OS << "}\n";
    return OS.str();
  }

  void prettyNode(const Node &n, int depth) {
    if (provablyEmpty(n))
      return;
    for (const auto &a : n.annotations)
      OS << ind(depth) << a.str(Tree.sentinel) << "\n";
    switch (n.kind) {
    case Node::Kind::Band:
      OS << ind(depth) << "for (int64_t " << n.counter << " = " << n.lb.str()
         << "; ";
      for (size_t i = 0; i < n.ubs.size(); ++i)
        OS << (i ? " && " : "") << boundStr(n.counter, n.ubs[i]);
      OS << "; " << n.counter << " += " << n.step << ") {";
      if (n.nameOrigin != NameOrigin::None)
        OS << " // " << n.name;
      OS << "\n";
      for (const auto &ch : n.children)
        prettyNode(*ch, depth + 1);
      OS << ind(depth) << "}\n";
      break;
    case Node::Kind::Guard:
      OS << ind(depth) << "if (" << n.cond.str() << ") {\n";
      for (const auto &ch : n.children)
        prettyNode(*ch, depth + 1);
      if (!n.elseChildren.empty()) {
        OS << ind(depth) << "} else {\n";
        for (const auto &ch : n.elseChildren)
          prettyNode(*ch, depth + 1);
      }
      OS << ind(depth) << "}\n";
      break;
    case Node::Kind::Leaf:
      OS << ind(depth) << n.statementText() << ";\n";
      break;
    case Node::Kind::Section:
      OS << ind(depth) << "{";
      if (n.nameOrigin != NameOrigin::None)
        OS << " // section " << n.name;
      OS << "\n";
      for (const auto &ch : n.children)
        prettyNode(*ch, depth + 1);
      OS << ind(depth) << "}\n";
      break;
    case Node::Kind::Seq:
      for (const auto &ch : n.children)
        prettyNode(*ch, depth);
      break;
    }
  }
};

} // namespace

std::string emit(const LoopTree &tree,
                 const std::vector<PendingDirective> &pending,
                 EmitStyle style) {
  return Emitter(tree, pending, style).run();
}

} // namespace looplang
