//===--- Transform.cpp - Directive application -------------------------------===//
//
// Part of the looplang project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "looplang/Transform.h"

#include "looplang/NameTable.h"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace looplang {

const char *outcomeSpelling(Outcome o) {
  switch (o) {
  case Outcome::Applied:
    return "applied";
  case Outcome::Skipped:
    return "skipped";
  case Outcome::Error:
    return "error";
  }
  return "?";
}

std::string TransformReport::str() const {
  std::ostringstream os;
  os << loc.file << ":" << loc.line << ": " << spelling << ": "
     << outcomeSpelling(outcome);
  if (outcome == Outcome::Applied) {
    if (gated)
      os << " (" << verdictSpelling(verdict) << ")";
  } else {
    os << " (" << reason << ")";
  }
  if (!namesIntroduced.empty()) {
    os << "; introduces ";
    for (size_t i = 0; i < namesIntroduced.size(); ++i)
      os << (i ? ", " : "") << namesIntroduced[i];
  }
  return os.str();
}

std::string ApplyResult::renderText() const {
  std::string out;
  for (const auto &r : reports) {
    out += r.str();
    out += "\n";
  }
  return out;
}

namespace {

//===----------------------------------------------------------------------===//
// Name bookkeeping
//===----------------------------------------------------------------------===//

void addNames(const AffineExpr &e, std::set<std::string> &out) {
  std::vector<std::string> v;
  e.collectPlainNames(v);
  out.insert(v.begin(), v.end());
}

void addExprNames(const Expr &e, std::set<std::string> &out) {
  switch (e.kind) {
  case Expr::Kind::Affine:
    addNames(e.affine, out);
    break;
  case Expr::Kind::FloatLit:
    break;
  case Expr::Kind::ArrayRead:
    out.insert(e.array);
    for (const auto &s : e.subs)
      addNames(s, out);
    break;
  case Expr::Kind::Binary:
    if (e.lhs)
      addExprNames(*e.lhs, out);
    if (e.rhs)
      addExprNames(*e.rhs, out);
    break;
  }
}

void usedNamesIn(const Node &n, std::set<std::string> &out) {
  n.forEach([&](const Node &x) {
    if (!x.name.empty())
      out.insert(x.name);
    if (x.isBand()) {
      out.insert(x.counter);
      addNames(x.lb, out);
      for (const auto &u : x.ubs)
        addNames(u, out);
    }
    if (x.kind == Node::Kind::Guard) {
      addNames(x.cond.lhs, out);
      addNames(x.cond.rhs, out);
    }
    if (x.isLeaf()) {
      out.insert(x.array);
      for (const auto &s : x.subs)
        addNames(s, out);
      if (x.rhs)
        addExprNames(*x.rhs, out);
      for (const auto &[orig, val] : x.traceBindings) {
        out.insert(orig);
        addNames(val, out);
      }
    }
  });
}

/// Every identifier that could collide with a generated counter or name.
std::set<std::string> usedNames(const LoopTree &tree) {
  std::set<std::string> out;
  for (const auto &p : tree.params)
    out.insert(p.name);
  for (const auto &a : tree.arrays) {
    out.insert(a.name);
    for (const auto &d : a.dims)
      addNames(d, out);
  }
  if (tree.root)
    usedNamesIn(*tree.root, out);
  return out;
}

/// Identifiers *bound* inside a subtree: band counters, construct names and
/// array names. Unlike usedNames this skips affine uses, whose referents are
/// either enclosing binders or about to be substituted away.
void bindingNamesIn(const Node &n, std::set<std::string> &out) {
  n.forEach([&](const Node &x) {
    if (!x.name.empty())
      out.insert(x.name);
    if (x.isBand())
      out.insert(x.counter);
    if (x.isLeaf())
      out.insert(x.array);
  });
}

std::string freshName(const std::set<std::string> &used,
                      const std::string &base) {
  if (!used.count(base))
    return base;
  for (int k = 2;; ++k) {
    std::string cand = base + std::to_string(k);
    if (!used.count(cand))
      return cand;
  }
}

//===----------------------------------------------------------------------===//
// Structural utilities
//===----------------------------------------------------------------------===//

struct ChildSlot {
  std::vector<NodePtr> *list = nullptr;
  size_t index = 0;
};

ChildSlot locate(LoopTree &tree, const Node *n) {
  Node *parent = tree.parentOf(n);
  if (!parent)
    return {};
  for (size_t i = 0; i < parent->children.size(); ++i)
    if (parent->children[i].get() == n)
      return {&parent->children, i};
  for (size_t i = 0; i < parent->elseChildren.size(); ++i)
    if (parent->elseChildren[i].get() == n)
      return {&parent->elseChildren, i};
  return {};
}

/// Iteration count when every bound is a constant distance from the lower
/// bound (the bounds themselves may be symbolic).
std::optional<int64_t> constCount(const Node &band) {
  std::optional<int64_t> cnt;
  for (const auto &u : band.ubs) {
    int64_t diff;
    if (!(u - band.lb).getConstant(diff))
      return std::nullopt;
    int64_t c = diff <= 0 ? 0 : floorDiv(diff + band.step - 1, band.step);
    if (!cnt || c < *cnt)
      cnt = c;
  }
  return cnt;
}

/// Symbolic iteration count, ceil((ub - lb) / step). Requires a single upper
/// bound when not constant. May be negative at runtime for an empty domain;
/// callers must cope or prove otherwise.
std::optional<AffineExpr> countExpr(const Node &band) {
  if (auto c = constCount(band))
    return AffineExpr(*c);
  if (band.ubs.size() != 1)
    return std::nullopt;
  return (band.ubs[0] - band.lb + (band.step - 1)).floordivBy(band.step);
}

bool dividesExactly(const AffineExpr &e, int64_t k) {
  return e.floordivBy(k) * k == e;
}

//===----------------------------------------------------------------------===//
// Rational feasibility of affine constraint systems
//===----------------------------------------------------------------------===//
//
// Split, peel and concatenate compute symbolic boundary expressions; the
// emitted loops are only exact when those boundaries stay inside the
// original domain for every parameter binding. This tiny Fourier-Motzkin
// eliminator proves such facts where possible. Floordiv atoms become fresh
// variables constrained by d*t <= arg <= d*t + d - 1, which is what makes
// `n/2 + 1 >= 0 whenever the loop [0, n) is nonempty` provable. The check is
// rational, so "infeasible" is trustworthy and "feasible" merely means we
// could not rule it out.

class Feasibility {
public:
  /// Adds `e <= 0`. Returns false when the expression overflows int64
  /// bookkeeping, in which case the system must be treated as satisfiable.
  bool addLE(const AffineExpr &e) {
    Row r;
    if (!flatten(e, 1, r))
      return false;
    Rows.push_back(std::move(r));
    return true;
  }
  /// Adds `e < 0` over the integers, i.e. `e + 1 <= 0`.
  bool addLT(const AffineExpr &e) { return addLE(e + 1); }

  bool feasible() {
    std::vector<Row> rows = Rows;
    for (int v = 0; v < NextVar; ++v) {
      std::vector<Row> lower, upper, rest;
      for (auto &r : rows) {
        auto it = r.coeffs.find(v);
        int64_t c = it == r.coeffs.end() ? 0 : it->second;
        if (c > 0)
          upper.push_back(std::move(r));
        else if (c < 0)
          lower.push_back(std::move(r));
        else
          rest.push_back(std::move(r));
      }
      for (const Row &u : upper)
        for (const Row &l : lower) {
          int64_t cu = u.coeffs.at(v), cl = l.coeffs.at(v);
          Row n;
          try {
            n.constant = checkedAdd(checkedMul(-cl, u.constant),
                                    checkedMul(cu, l.constant));
            for (const auto &[var, c] : u.coeffs)
              if (var != v)
                n.coeffs[var] = checkedMul(-cl, c);
            for (const auto &[var, c] : l.coeffs)
              if (var != v)
                n.coeffs[var] =
                    checkedAdd(n.coeffs.count(var) ? n.coeffs[var] : 0,
                               checkedMul(cu, c));
          } catch (const OverflowError &) {
            return true;
          }
          for (auto it = n.coeffs.begin(); it != n.coeffs.end();)
            it = it->second == 0 ? n.coeffs.erase(it) : std::next(it);
          rest.push_back(std::move(n));
          if (rest.size() > 400)
            return true; // combinatorial blowup: give up, assume satisfiable
        }
      rows = std::move(rest);
    }
    for (const Row &r : rows)
      if (r.constant > 0)
        return false;
    return true;
  }

private:
  struct Row {
    std::map<int, int64_t> coeffs;
    int64_t constant = 0;
  };

  std::vector<Row> Rows;
  std::map<std::string, int> VarOf;
  std::map<Sym, int> AtomOf;
  int NextVar = 0;

  int varFor(const std::string &name) {
    auto it = VarOf.find(name);
    if (it != VarOf.end())
      return it->second;
    int v = NextVar++;
    VarOf.emplace(name, v);
    return v;
  }

  int atomVar(const Sym &s) {
    auto it = AtomOf.find(s);
    if (it != AtomOf.end())
      return it->second;
    int v = NextVar++;
    AtomOf.emplace(s, v);
    Row lo, hi;
    lo.coeffs[v] = s.divisor(); // d*t - arg <= 0
    if (!flatten(s.arg(), -1, lo))
      return -1;
    hi.coeffs[v] = -s.divisor(); // arg - d*t - (d-1) <= 0
    hi.constant = -(s.divisor() - 1);
    if (!flatten(s.arg(), 1, hi))
      return -1;
    Rows.push_back(std::move(lo));
    Rows.push_back(std::move(hi));
    return v;
  }

  bool flatten(const AffineExpr &e, int64_t mult, Row &r) {
    try {
      r.constant = checkedAdd(r.constant, checkedMul(e.constantTerm(), mult));
      for (const auto &[sym, c] : e.terms()) {
        int64_t k = checkedMul(c, mult);
        if (sym.isPlain()) {
          int v = varFor(sym.name());
          r.coeffs[v] = checkedAdd(r.coeffs.count(v) ? r.coeffs[v] : 0, k);
        } else if (sym.kind() == Sym::Kind::FloorDiv) {
          int v = atomVar(sym);
          if (v < 0)
            return false;
          r.coeffs[v] = checkedAdd(r.coeffs.count(v) ? r.coeffs[v] : 0, k);
        } else { // arg mod d == arg - d*(arg floordiv d)
          Sym f = Sym::floordiv(sym.arg(), sym.divisor());
          int v = atomVar(f);
          if (v < 0)
            return false;
          if (!flatten(sym.arg(), k, r))
            return false;
          r.coeffs[v] = checkedAdd(r.coeffs.count(v) ? r.coeffs[v] : 0,
                                   checkedMul(-sym.divisor(), k));
        }
      }
    } catch (const OverflowError &) {
      return false;
    }
    return true;
  }
};

//===----------------------------------------------------------------------===//
// Applier
//===----------------------------------------------------------------------===//

class Applier {
public:
  Applier(LoopTree &tree, DiagEngine &diags, const ApplyOptions &opts)
      : Tree(tree), Diags(diags), Opts(opts) {}

  ApplyResult run(const std::vector<PendingDirective> &pending) {
    for (const auto &pd : pending) {
      if (Res.aborted)
        break;
      dispatch(pd);
    }
    return std::move(Res);
  }

private:
  LoopTree &Tree;
  DiagEngine &Diags;
  const ApplyOptions &Opts;
  ApplyResult Res;
  // Assumptions are tracked by node id so they survive tree rewrites that
  // keep the node alive; a rewrite that replaces the node drops them.
  std::set<int> ParallelIds;
  std::map<int, int64_t> MinDistIds;

  bool assertive(const Directive &d) const {
    return Opts.forceAssert.value_or(d.assertive);
  }

  AssumeSet assumes(const LoopTree &t) const {
    AssumeSet s;
    s.assocReductions = Opts.assocReductions;
    for (int id : ParallelIds)
      if (const Node *n = t.find(id))
        s.parallel.insert(n);
    for (const auto &[id, v] : MinDistIds)
      if (const Node *n = t.find(id))
        s.minDist[n] = v;
    return s;
  }

  NameTable names() {
    // Duplicate-name errors in the input were reported by the caller's own
    // NameTable::build; rebuilding here must not repeat them.
    DiagEngine quiet;
    return NameTable::build(Tree, quiet);
  }

  //===------------------------------------------------------------------===//
  // Failure and policy plumbing
  //===------------------------------------------------------------------===//

  /// Malformed directives poison the rest of the recipe (later directives
  /// would target the wrong loops), so they always abort.
  void fail(TransformReport &rep, const Directive &d, DiagCode code,
            const std::string &msg) {
    Diags.error(code, d.loc, msg);
    rep.outcome = Outcome::Error;
    rep.reason = msg;
    Res.aborted = true;
  }

  /// Abort where the resolver already reported the diagnostic.
  void failResolved(TransformReport &rep, const std::string &msg) {
    rep.outcome = Outcome::Error;
    rep.reason = msg;
    Res.aborted = true;
  }

  /// Precondition violations follow the assert policy: abort under assert,
  /// skip with a warning otherwise. Always returns false.
  bool precondition(TransformReport &rep, const Directive &d,
                    const std::string &msg) {
    rep.outcome = Outcome::Error;
    rep.reason = msg;
    if (assertive(d)) {
      Diags.error(DiagCode::PreconditionViolated, d.loc, msg);
      Res.aborted = true;
    } else {
      Diags.warning(DiagCode::PreconditionViolated, d.loc,
                    msg + "; directive skipped");
    }
    return false;
  }

  /// The legality gate: decides from the verdict and the directive's policy
  /// switches whether the rewrite may proceed.
  bool gate(TransformReport &rep, const Directive &d, const Legality &leg,
            bool gated) {
    rep.gated = gated;
    rep.verdict = leg.verdict;
    if (d.suggestOnly) {
      rep.outcome = Outcome::Skipped;
      rep.reason = std::string("suggest_only; ") + verdictSpelling(leg.verdict);
      Diags.report(DiagLevel::Note, DiagCode::None, d.loc,
                   d.spelling + " suggestion not applied; legality " +
                       verdictSpelling(leg.verdict) +
                       (leg.witness.empty() ? "" : " (" + leg.witness + ")"));
      return false;
    }
    if (d.assumeSafety || leg.verdict == Verdict::Proven)
      return true;
    std::string msg = d.spelling + " is not proven legal: " +
                      std::string(verdictSpelling(leg.verdict)) +
                      (leg.witness.empty() ? "" : "; " + leg.witness);
    rep.reason = std::string(verdictSpelling(leg.verdict)) +
                 (leg.witness.empty() ? "" : "; " + leg.witness);
    if (assertive(d)) {
      rep.outcome = Outcome::Error;
      Diags.error(DiagCode::LegalityNotProven, d.loc, msg);
      Res.aborted = true;
    } else {
      rep.outcome = Outcome::Skipped;
      Res.legalitySkip = true;
      Diags.warning(DiagCode::LegalityNotProven, d.loc,
                    msg + "; directive skipped");
    }
    return false;
  }

  static Legality worse(const Legality &a, const Legality &b) {
    auto rank = [](Verdict v) {
      return v == Verdict::Proven ? 0 : v == Verdict::Unknown ? 1 : 2;
    };
    return rank(b.verdict) > rank(a.verdict) ? b : a;
  }

  //===------------------------------------------------------------------===//
  // Target and clause access
  //===------------------------------------------------------------------===//

  Node *resolveName(const NameTable &nt, const std::string &name,
                    const Directive &d, TransformReport &rep) {
    Node *n = nt.resolve(name, d.loc, Diags);
    if (!n)
      failResolved(rep, "cannot resolve '" + name + "'");
    return n;
  }

  std::vector<std::string> expandTargets(const NameTable &nt,
                                         const Directive &d,
                                         TransformReport &rep) {
    size_t before = Diags.all().size();
    auto out = nt.expand(d.targets, d.loc, Diags);
    for (size_t i = before; i < Diags.all().size(); ++i)
      if (Diags.all()[i].level == DiagLevel::Error) {
        failResolved(rep, "cannot resolve the loop list");
        return {};
      }
    return out;
  }

  /// The directive's loop targets: the expanded loop(...) list, or the
  /// construct the pragma preceded. Targets must be distinct bands.
  std::vector<Node *> targetBands(const PendingDirective &pd,
                                  const NameTable &nt, TransformReport &rep,
                                  size_t exact, size_t atLeast) {
    const Directive &d = pd.dir;
    std::vector<Node *> out;
    if (d.targetKind == TargetKind::SectionList) {
      fail(rep, d, DiagCode::MalformedClause,
           "'" + d.spelling + "' does not take section targets");
      return {};
    }
    if (d.targetKind == TargetKind::LoopList) {
      auto namesL = expandTargets(nt, d, rep);
      if (Res.aborted)
        return {};
      for (const auto &nm : namesL) {
        Node *n = resolveName(nt, nm, d, rep);
        if (!n)
          return {};
        if (!n->isBand()) {
          fail(rep, d, DiagCode::MalformedClause,
               "'" + nm + "' does not name a loop");
          return {};
        }
        out.push_back(n);
      }
    } else {
      Node *anchor = Tree.find(pd.anchorId);
      if (!anchor || !anchor->isBand()) {
        fail(rep, d, DiagCode::InvalidAnchor,
             "'" + d.spelling + "' must precede a loop");
        return {};
      }
      out.push_back(anchor);
    }
    std::set<Node *> uniq(out.begin(), out.end());
    if (uniq.size() != out.size()) {
      fail(rep, d, DiagCode::MalformedClause,
           "'" + d.spelling + "' targets must be distinct loops");
      return {};
    }
    if ((exact && out.size() != exact) || out.size() < atLeast) {
      fail(rep, d, DiagCode::MalformedClause,
           "'" + d.spelling + "' expects " +
               std::to_string(exact ? exact : atLeast) +
               (exact ? "" : " or more") + " loop target(s), got " +
               std::to_string(out.size()));
      return {};
    }
    return out;
  }

  /// Sorts bands outermost-first and demands a perfect chain: each band is
  /// the sole child of its predecessor.
  bool sortedChain(std::vector<Node *> &bands, const Directive &d,
                   TransformReport &rep, const char *what) {
    std::sort(bands.begin(), bands.end(), [&](Node *a, Node *b) {
      return Tree.pathTo(a->id).size() < Tree.pathTo(b->id).size();
    });
    for (size_t i = 0; i + 1 < bands.size(); ++i)
      if (bands[i]->children.size() != 1 ||
          bands[i]->children[0].get() != bands[i + 1])
        return precondition(rep, d,
                            std::string(what) + " must be perfectly nested");
    return true;
  }

  static std::vector<Node *> maximalChain(Node *top) {
    std::vector<Node *> chain{top};
    while (chain.back()->children.size() == 1 &&
           chain.back()->children[0]->isBand())
      chain.push_back(chain.back()->children[0].get());
    return chain;
  }

  static int64_t intClause(const Directive &d, const char *key, int64_t def) {
    const Clause *c = d.findClause(key);
    int64_t v = def;
    if (c && !c->args.empty() && c->args[0].kind == ClauseArg::Kind::Expr)
      c->args[0].expr.getConstant(v);
    return v;
  }

  static std::string nameArg(const ClauseArg &a) {
    if (a.kind == ClauseArg::Kind::Name)
      return a.name;
    if (a.kind == ClauseArg::Kind::Expr && a.expr.constantTerm() == 0 &&
        a.expr.terms().size() == 1) {
      const auto &[s, c] = *a.expr.terms().begin();
      if (s.isPlain() && c == 1)
        return s.name();
    }
    return "";
  }

  static std::string nameClause(const Directive &d, const char *key) {
    const Clause *c = d.findClause(key);
    if (!c || c->args.empty())
      return "";
    return nameArg(c->args[0]);
  }

  bool nameListClause(const Directive &d, const char *key, size_t arity,
                      std::vector<std::string> &out, TransformReport &rep) {
    const Clause *c = d.findClause(key);
    if (!c)
      return true;
    for (const auto &a : c->args) {
      std::string nm = nameArg(a);
      if (nm.empty()) {
        fail(rep, d, DiagCode::MalformedClause,
             std::string(key) + " entries must be plain names");
        return false;
      }
      out.push_back(nm);
    }
    if (arity && out.size() != arity) {
      fail(rep, d, DiagCode::MalformedClause,
           std::string(key) + " needs exactly " + std::to_string(arity) +
               " name(s)");
      return false;
    }
    return true;
  }

  bool exprClause(const Directive &d, const char *key, AffineExpr &out,
                  TransformReport &rep) {
    const Clause *c = d.findClause(key);
    if (!c || c->args.size() != 1) {
      fail(rep, d, DiagCode::MalformedClause,
           std::string(key) + " needs one affine argument");
      return false;
    }
    const ClauseArg &a = c->args[0];
    if (a.kind == ClauseArg::Kind::Expr) {
      out = a.expr;
      return true;
    }
    if (a.kind == ClauseArg::Kind::Name) {
      out = AffineExpr::sym(a.name);
      return true;
    }
    fail(rep, d, DiagCode::MalformedClause,
         std::string(key) + " needs one affine argument");
    return false;
  }

  /// Output names must not collide with anything referenceable, except
  /// constructs the transformation itself dissolves or renames.
  bool checkFreshIds(const NameTable &nt, const std::vector<std::string> &ids,
                     const Directive &d, TransformReport &rep,
                     const std::set<const Node *> &dying = {}) {
    std::set<std::string> seen;
    for (const auto &id : ids) {
      if (id.empty())
        continue;
      if (!seen.insert(id).second) {
        fail(rep, d, DiagCode::MalformedClause,
             "output name '" + id + "' is used twice");
        return false;
      }
      Node *n = nt.lookup(id);
      if (n && !dying.count(n)) {
        fail(rep, d, DiagCode::MalformedClause,
             "output name '" + id + "' is already in use");
        return false;
      }
    }
    return true;
  }

  //===------------------------------------------------------------------===//
  // Dispatch
  //===------------------------------------------------------------------===//

  void dispatch(const PendingDirective &pd) {
    const Directive &d = pd.dir;
    if (d.kind == DirKind::Id)
      return; // consumed by buildTree
    TransformReport rep;
    rep.loc = d.loc;
    rep.spelling = d.spelling;
    bool orderKept = true;
    switch (d.kind) {
    case DirKind::Annotation:
      doAnnotation(pd, rep);
      break;
    case DirKind::AssumeParallel:
    case DirKind::AssumeCoincident:
    case DirKind::AssumeMinDepdist:
      doAssume(pd, rep);
      break;
    default:
      try {
        doStructural(pd, rep, orderKept);
      } catch (const OverflowError &) {
        precondition(rep, d, "integer overflow while planning the rewrite");
      }
      break;
    }
    if (rep.outcome == Outcome::Applied && !orderKept)
      Res.orderPreserving = false;
    Res.reports.push_back(std::move(rep));
  }

  void doStructural(const PendingDirective &pd, TransformReport &rep,
                    bool &orderKept) {
    switch (pd.dir.kind) {
    case DirKind::Stripmine:
      doStripmine(pd, rep);
      break;
    case DirKind::Block:
      doBlock(pd, rep);
      break;
    case DirKind::Tile:
      doTile(pd, rep, orderKept);
      break;
    case DirKind::Interchange:
      doInterchange(pd, rep, orderKept);
      break;
    case DirKind::Coalesce:
      doCoalesce(pd, rep);
      break;
    case DirKind::Concatenate:
      doConcatenate(pd, rep);
      break;
    case DirKind::Distribute:
      doDistribute(pd, rep);
      orderKept = false;
      break;
    case DirKind::Fuse:
      doFuse(pd, rep);
      orderKept = false;
      break;
    case DirKind::Reorder:
      doReorder(pd, rep, orderKept);
      break;
    case DirKind::Reverse:
      doReverse(pd, rep);
      orderKept = false;
      break;
    case DirKind::Shift:
      doShift(pd, rep);
      break;
    case DirKind::Scale:
      doScale(pd, rep);
      break;
    case DirKind::Split:
      doSplit(pd, rep);
      break;
    case DirKind::Peel:
      doPeel(pd, rep);
      break;
    case DirKind::Unroll:
      doUnroll(pd, rep);
      break;
    case DirKind::UnrollAndJam:
      doUnrollAndJam(pd, rep);
      orderKept = false;
      break;
    default:
      break;
    }
  }

  //===------------------------------------------------------------------===//
  // Inert directives
  //===------------------------------------------------------------------===//

  void doAnnotation(const PendingDirective &pd, TransformReport &rep) {
    const Directive &d = pd.dir;
    Node *host = nullptr;
    if (d.targetKind == TargetKind::FollowingConstruct) {
      host = Tree.find(pd.anchorId);
      if (!host) {
        fail(rep, d, DiagCode::InvalidAnchor,
             "'" + d.spelling + "' does not precede a construct");
        return;
      }
    } else {
      if (d.targets.empty() || d.targets[0] == "...") {
        fail(rep, d, DiagCode::MalformedClause,
             "'" + d.spelling + "' needs a target name");
        return;
      }
      NameTable nt = names();
      host = resolveName(nt, d.targets[0], d, rep);
      if (!host)
        return;
    }
    host->annotations.push_back(d);
    rep.outcome = Outcome::Applied;
  }

  void doAssume(const PendingDirective &pd, TransformReport &rep) {
    const Directive &d = pd.dir;
    NameTable nt = names();
    auto bands = targetBands(pd, nt, rep, 0, 1);
    if (Res.aborted)
      return;
    for (Node *b : bands) {
      if (d.kind == DirKind::AssumeMinDepdist)
        MinDistIds[b->id] = intClause(d, "distance", 1);
      else
        ParallelIds.insert(b->id);
    }
    rep.outcome = Outcome::Applied;
  }

  //===------------------------------------------------------------------===//
  // Strip-mining and blocking
  //===------------------------------------------------------------------===//

  struct StripmineOut {
    Node *pit = nullptr;
    Node *strip = nullptr;
  };

  /// Wraps `band` in a pit stepping by size*step over the original bounds;
  /// `band` itself becomes the strip, so its name, annotations and body stay
  /// put. The strip keeps the original upper bounds next to the pit cap
  /// unless the extent is a provable multiple of the span.
  static StripmineOut stripmineRewrite(LoopTree &tree, Node *band,
                                       int64_t size, const std::string &pitId,
                                       const std::string &stripId) {
    int64_t span = checkedMul(size, band->step);
    std::set<std::string> used = usedNames(tree);
    std::string pc;
    if (!pitId.empty())
      pc = used.count(pitId) ? freshName(used, pitId + "_ctr") : pitId;
    else
      pc = freshName(used, "pit_" + band->counter);

    auto pit = std::make_unique<Node>();
    pit->kind = Node::Kind::Band;
    pit->id = tree.allocId();
    pit->loc = band->loc;
    pit->counter = pc;
    pit->lb = band->lb;
    pit->ubs = band->ubs;
    pit->step = span;
    if (!pitId.empty()) {
      pit->name = pitId;
      pit->nameOrigin = NameOrigin::Output;
    }

    ChildSlot at = locate(tree, band);
    Node *pitRaw = pit.get();
    pit->children.push_back(std::move((*at.list)[at.index]));
    (*at.list)[at.index] = std::move(pit);

    bool elide = band->ubs.size() == 1 &&
                 dividesExactly(band->ubs[0] - band->lb, span);
    AffineExpr cap = AffineExpr::sym(pc) + span;
    band->lb = AffineExpr::sym(pc);
    if (elide)
      band->ubs = {cap};
    else
      band->ubs.insert(band->ubs.begin(), cap);
    if (!stripId.empty()) {
      band->name = stripId;
      band->nameOrigin = NameOrigin::Output;
      band->idDir.reset();
    }
    return {pitRaw, band};
  }

  void doStripmine(const PendingDirective &pd, TransformReport &rep) {
    const Directive &d = pd.dir;
    NameTable nt = names();
    auto bands = targetBands(pd, nt, rep, 1, 1);
    if (Res.aborted)
      return;
    std::string pitId = nameClause(d, "pit_id");
    std::string stripId = nameClause(d, "strip_id");
    if (!checkFreshIds(nt, {pitId, stripId}, d, rep))
      return;
    int64_t size = intClause(d, "strip_size", 0);
    if (size < 2) {
      precondition(rep, d, "strip_size must be at least 2");
      return;
    }
    if (!gate(rep, d, Legality{}, false))
      return;
    auto out = stripmineRewrite(Tree, bands[0], size, pitId, stripId);
    rep.outcome = Outcome::Applied;
    rep.namesIntroduced.push_back(pitId.empty() ? out.pit->counter : pitId);
    if (!stripId.empty())
      rep.namesIntroduced.push_back(stripId);
  }

  void doBlock(const PendingDirective &pd, TransformReport &rep) {
    const Directive &d = pd.dir;
    NameTable nt = names();
    auto bands = targetBands(pd, nt, rep, 1, 1);
    if (Res.aborted)
      return;
    std::string pitId = nameClause(d, "pit_id");
    std::string stripId = nameClause(d, "strip_id");
    if (!checkFreshIds(nt, {pitId, stripId}, d, rep))
      return;
    int64_t pitSize = intClause(d, "pit_size", 0);
    if (pitSize < 1) {
      precondition(rep, d, "pit_size must be at least 1");
      return;
    }
    auto cnt = constCount(*bands[0]);
    if (!cnt) {
      precondition(rep, d, "block requires a compile-time iteration count");
      return;
    }
    int64_t strip =
        *cnt == 0 ? 1 : floorDiv(*cnt + pitSize - 1, pitSize);
    if (!gate(rep, d, Legality{}, false))
      return;
    auto out = stripmineRewrite(Tree, bands[0], strip, pitId, stripId);
    rep.outcome = Outcome::Applied;
    rep.namesIntroduced.push_back(pitId.empty() ? out.pit->counter : pitId);
    if (!stripId.empty())
      rep.namesIntroduced.push_back(stripId);
  }

  //===------------------------------------------------------------------===//
  // Interchange and tiling
  //===------------------------------------------------------------------===//

  /// Gate plus rewrite for permuting a perfect chain; shared by interchange,
  /// tile and unrollandjam's legality probe. `oldOrder` is outermost-first.
  bool interchangeApply(LoopTree &tree, const std::vector<Node *> &oldOrder,
                        const std::vector<Node *> &newOrder,
                        const Directive &d, TransformReport &rep,
                        bool &orderKept) {
    if (oldOrder == newOrder) {
      if (!gate(rep, d, Legality{}, true))
        return false;
      rep.outcome = Outcome::Applied;
      orderKept = true;
      return true;
    }
    // After permuting, every band's bounds may only use counters that still
    // enclose it; triangular nests cannot be permuted by re-linking alone.
    std::set<std::string> avail;
    for (Node *b : tree.bandPath(oldOrder[0], false))
      avail.insert(b->counter);
    for (Node *b : newOrder) {
      std::set<std::string> bound;
      addNames(b->lb, bound);
      for (const auto &u : b->ubs)
        addNames(u, bound);
      for (const auto &nm : bound)
        if (!tree.isParam(nm) && !avail.count(nm))
          return precondition(rep, d,
                              "bounds of loop '" + b->counter +
                                  "' would depend on the inner counter '" +
                                  nm + "' after the permutation");
      avail.insert(b->counter);
    }
    DependenceGraph g = analyze(tree);
    std::vector<const Node *> oldC(oldOrder.begin(), oldOrder.end());
    std::vector<const Node *> newC(newOrder.begin(), newOrder.end());
    Legality leg = checkInterchange(g, oldC, newC, assumes(tree));
    if (!gate(rep, d, leg, true))
      return false;

    ChildSlot top = locate(tree, oldOrder[0]);
    std::vector<NodePtr> body = std::move(oldOrder.back()->children);
    oldOrder.back()->children.clear();
    std::map<Node *, NodePtr> owned;
    for (size_t i = oldOrder.size(); i-- > 1;) {
      owned[oldOrder[i]] = std::move(oldOrder[i - 1]->children[0]);
      oldOrder[i - 1]->children.clear();
    }
    owned[oldOrder[0]] = std::move((*top.list)[top.index]);
    (*top.list)[top.index] = std::move(owned[newOrder[0]]);
    for (size_t i = 0; i + 1 < newOrder.size(); ++i)
      newOrder[i]->children.push_back(std::move(owned[newOrder[i + 1]]));
    newOrder.back()->children = std::move(body);
    rep.outcome = Outcome::Applied;
    orderKept = false;
    return true;
  }

  void doInterchange(const PendingDirective &pd, TransformReport &rep,
                     bool &orderKept) {
    const Directive &d = pd.dir;
    NameTable nt = names();
    const Clause *pc = d.findClause("permutation");
    if (!pc) {
      fail(rep, d, DiagCode::MalformedClause,
           "interchange needs a permutation(...) clause");
      return;
    }
    std::vector<std::string> permNames;
    for (const auto &a : pc->args) {
      std::string nm = nameArg(a);
      if (nm.empty()) {
        fail(rep, d, DiagCode::MalformedClause,
             "permutation entries must be loop names");
        return;
      }
      permNames.push_back(nm);
    }
    if (permNames.size() < 2) {
      fail(rep, d, DiagCode::MalformedClause,
           "permutation needs at least two loops");
      return;
    }
    if (d.targetKind == TargetKind::SectionList) {
      fail(rep, d, DiagCode::MalformedClause,
           "interchange does not take section targets");
      return;
    }
    if (d.targetKind == TargetKind::LoopList) {
      auto tnames = expandTargets(nt, d, rep);
      if (Res.aborted)
        return;
      if (std::set<std::string>(tnames.begin(), tnames.end()) !=
          std::set<std::string>(permNames.begin(), permNames.end())) {
        fail(rep, d, DiagCode::MalformedClause,
             "the permutation must name exactly the targeted loops");
        return;
      }
    }
    std::vector<Node *> newOrder;
    std::set<Node *> seen;
    for (const auto &nm : permNames) {
      Node *n = resolveName(nt, nm, d, rep);
      if (!n)
        return;
      if (!n->isBand()) {
        fail(rep, d, DiagCode::MalformedClause,
             "'" + nm + "' does not name a loop");
        return;
      }
      if (!seen.insert(n).second) {
        fail(rep, d, DiagCode::MalformedClause,
             "'" + nm + "' appears twice in the permutation");
        return;
      }
      newOrder.push_back(n);
    }
    std::vector<Node *> oldOrder = newOrder;
    if (!sortedChain(oldOrder, d, rep, "the permuted loops"))
      return;
    interchangeApply(Tree, oldOrder, newOrder, d, rep, orderKept);
  }

  void doTile(const PendingDirective &pd, TransformReport &rep,
              bool &orderKept) {
    const Directive &d = pd.dir;
    NameTable nt = names();
    const Clause *sizesC = d.findClause("sizes");
    if (!sizesC || sizesC->args.empty()) {
      fail(rep, d, DiagCode::MalformedClause,
           "tile needs a sizes(...) clause");
      return;
    }
    std::vector<int64_t> sizes;
    for (const auto &a : sizesC->args) {
      int64_t v = 0;
      a.expr.getConstant(v);
      sizes.push_back(v);
    }
    size_t depth = sizes.size();
    std::vector<std::string> pitIds, tileIds;
    if (!nameListClause(d, "pit_ids", depth, pitIds, rep) ||
        !nameListClause(d, "tile_ids", depth, tileIds, rep))
      return;

    std::vector<Node *> bands;
    if (d.targetKind == TargetKind::LoopList) {
      bands = targetBands(pd, nt, rep, depth, depth);
      if (Res.aborted)
        return;
      if (!sortedChain(bands, d, rep, "the tiled loops"))
        return;
    } else {
      auto anchored = targetBands(pd, nt, rep, 1, 1);
      if (Res.aborted)
        return;
      bands = maximalChain(anchored[0]);
      if (bands.size() < depth) {
        precondition(rep, d,
                     "tile needs a perfectly nested loop for each size");
        return;
      }
      bands.resize(depth);
    }
    std::vector<std::string> allIds = pitIds;
    allIds.insert(allIds.end(), tileIds.begin(), tileIds.end());
    if (!checkFreshIds(nt, allIds, d, rep))
      return;

    // Literally the documented composition: strip-mine each band (innermost
    // first, matching the stacked-pragma order), then pull the pits out.
    LoopTree work = Tree.clone();
    std::vector<Node *> pits(depth), strips(depth);
    for (size_t l = depth; l-- > 0;) {
      Node *wb = work.find(bands[l]->id);
      auto out = stripmineRewrite(work, wb, sizes[l],
                                  pitIds.empty() ? "" : pitIds[l],
                                  tileIds.empty() ? "" : tileIds[l]);
      pits[l] = out.pit;
      strips[l] = out.strip;
    }
    std::vector<Node *> oldOrder, newOrder;
    for (size_t l = 0; l < depth; ++l) {
      oldOrder.push_back(pits[l]);
      oldOrder.push_back(strips[l]);
    }
    newOrder = pits;
    newOrder.insert(newOrder.end(), strips.begin(), strips.end());
    if (!interchangeApply(work, oldOrder, newOrder, d, rep, orderKept))
      return;
    Tree = std::move(work);
    for (size_t l = 0; l < depth; ++l) {
      rep.namesIntroduced.push_back(pitIds.empty() ? pits[l]->counter
                                                   : pitIds[l]);
      if (!tileIds.empty())
        rep.namesIntroduced.push_back(tileIds[l]);
    }
  }

  //===------------------------------------------------------------------===//
  // Coalesce
  //===------------------------------------------------------------------===//

  void doCoalesce(const PendingDirective &pd, TransformReport &rep) {
    const Directive &d = pd.dir;
    NameTable nt = names();
    std::vector<Node *> bands;
    if (d.targetKind == TargetKind::LoopList) {
      bands = targetBands(pd, nt, rep, 0, 1);
      if (Res.aborted)
        return;
      if (!sortedChain(bands, d, rep, "the coalesced loops"))
        return;
    } else {
      auto anchored = targetBands(pd, nt, rep, 1, 1);
      if (Res.aborted)
        return;
      bands = maximalChain(anchored[0]);
    }
    if (bands.size() < 2) {
      precondition(rep, d, "coalesce needs at least two perfectly nested loops");
      return;
    }
    std::string id = nameClause(d, "coalesced_id");
    if (!checkFreshIds(nt, {id}, d, rep))
      return;

    size_t depth = bands.size();
    std::vector<int64_t> innerCnt(depth, 0);
    for (size_t l = 1; l < depth; ++l) {
      auto c = constCount(*bands[l]);
      if (!c) {
        precondition(rep, d,
                     "inner loop iteration counts must be compile-time "
                     "constants for coalesce");
        return;
      }
      innerCnt[l] = *c;
    }
    auto outerCnt = countExpr(*bands[0]);
    if (!outerCnt) {
      precondition(rep, d,
                   "the outer loop needs a single upper bound for coalesce");
      return;
    }
    if (!gate(rep, d, Legality{}, false))
      return;

    int64_t inner = 1;
    for (size_t l = 1; l < depth; ++l)
      inner = checkedMul(inner, innerCnt[l]);

    auto merged = std::make_unique<Node>();
    merged->kind = Node::Kind::Band;
    merged->id = Tree.allocId();
    merged->loc = bands[0]->loc;
    merged->lb = AffineExpr(0);
    merged->step = 1;
    for (Node *b : bands)
      merged->annotations.insert(merged->annotations.end(),
                                 b->annotations.begin(), b->annotations.end());

    std::set<std::string> used = usedNames(Tree);
    std::string cq;
    if (!id.empty()) {
      cq = used.count(id) ? freshName(used, id + "_ctr") : id;
      merged->name = id;
      merged->nameOrigin = NameOrigin::Output;
    } else {
      std::string base = bands[0]->counter;
      for (size_t l = 1; l < depth; ++l)
        base += "_" + bands[l]->counter;
      cq = freshName(used, base);
    }
    merged->counter = cq;

    std::vector<NodePtr> body = std::move(bands.back()->children);
    if (inner == 0) {
      // Some inner loop is provably empty; the nest never runs. Keep the
      // body unsubstituted under an empty band so nothing executes.
      merged->ubs = {AffineExpr(0)};
    } else {
      merged->ubs = {*outerCnt * inner};
      // suffix[l]: combined extent of the levels below l.
      std::vector<int64_t> suffix(depth, 1);
      for (size_t l = depth - 1; l-- > 0;)
        suffix[l] = checkedMul(suffix[l + 1], innerCnt[l + 1]);
      AffineExpr q = AffineExpr::sym(cq);
      std::vector<AffineExpr> rec(depth);
      for (size_t l = 0; l < depth; ++l) {
        AffineExpr k = suffix[l] == 1 ? q : q.floordivBy(suffix[l]);
        if (l > 0)
          k = innerCnt[l] == 1 ? AffineExpr(0) : k.modBy(innerCnt[l]);
        AffineExpr lb = bands[l]->lb;
        for (size_t m = 0; m < l; ++m)
          lb = lb.substitute(bands[m]->counter, rec[m]);
        rec[l] = lb + k * bands[l]->step;
      }
      for (auto &ch : body)
        for (size_t l = 0; l < depth; ++l)
          ch->substitute(bands[l]->counter, rec[l]);
    }
    merged->children = std::move(body);

    ChildSlot at = locate(Tree, bands[0]);
    rep.namesIntroduced.push_back(id.empty() ? cq : id);
    (*at.list)[at.index] = std::move(merged);
    rep.outcome = Outcome::Applied;
  }

  //===------------------------------------------------------------------===//
  // Distribute
  //===------------------------------------------------------------------===//

  void doDistribute(const PendingDirective &pd, TransformReport &rep) {
    const Directive &d = pd.dir;
    NameTable nt = names();
    std::vector<Node *> chain;
    std::vector<std::string> partNames;
    if (d.targetKind == TargetKind::SectionList) {
      partNames = d.targets;
      Node *anchor = Tree.find(pd.anchorId);
      if (!anchor || !anchor->isBand()) {
        fail(rep, d, DiagCode::InvalidAnchor, "distribute must precede a loop");
        return;
      }
      chain = {anchor};
    } else {
      const Clause *sc = d.findClause("sections");
      if (!sc) {
        fail(rep, d, DiagCode::MalformedClause,
             "distribute needs a sections(...) clause or section targets");
        return;
      }
      for (const auto &a : sc->args) {
        std::string nm = nameArg(a);
        if (nm.empty()) {
          fail(rep, d, DiagCode::MalformedClause,
               "sections entries must be names");
          return;
        }
        partNames.push_back(nm);
      }
      if (d.targetKind == TargetKind::LoopList) {
        chain = targetBands(pd, nt, rep, 0, 1);
        if (Res.aborted)
          return;
        if (!sortedChain(chain, d, rep, "the distributed loops"))
          return;
      } else {
        chain = targetBands(pd, nt, rep, 1, 1);
        if (Res.aborted)
          return;
      }
    }
    Node *host = chain.back();
    size_t groups = partNames.size();
    if (groups != host->children.size()) {
      precondition(rep, d,
                   "the partition must cover the loop body exactly (" +
                       std::to_string(host->children.size()) + " parts, " +
                       std::to_string(groups) + " named)");
      return;
    }
    std::set<const Node *> dying;
    for (size_t g = 0; g < groups; ++g) {
      Node *n = resolveName(nt, partNames[g], d, rep);
      if (!n)
        return;
      if (n != host->children[g].get()) {
        precondition(rep, d, "'" + partNames[g] +
                                 "' must name the loop body's part #" +
                                 std::to_string(g + 1) +
                                 " (groups are listed in source order)");
        return;
      }
      dying.insert(n);
    }
    std::vector<std::string> ids;
    if (!nameListClause(d, "distributed_ids", groups, ids, rep))
      return;
    if (!checkFreshIds(nt, ids, d, rep, dying))
      return;
    std::vector<std::string> gname(groups);
    for (size_t g = 0; g < groups; ++g) {
      const Node *part = host->children[g].get();
      if (!ids.empty())
        gname[g] = ids[g];
      else if (part->kind == Node::Kind::Section && !part->name.empty())
        gname[g] = part->name;
    }

    // Legality: at every distributed level, no dependence carried by that
    // band may run from a later group to an earlier one.
    DependenceGraph g0 = analyze(Tree);
    std::map<const Node *, int> leafGroup;
    for (size_t g = 0; g < groups; ++g)
      host->children[g]->forEach([&](const Node &n) {
        if (n.isLeaf())
          leafGroup[&n] = (int)g;
      });
    auto groupFn = [&leafGroup](const Node *leaf) {
      auto it = leafGroup.find(leaf);
      return it == leafGroup.end() ? 0 : it->second;
    };
    Legality leg;
    for (Node *b : chain)
      leg = worse(leg, checkDistribute(g0, b, groupFn, assumes(Tree)));
    if (!gate(rep, d, leg, true))
      return;

    // Rewrite: one copy of the chain per group, in partition order. Copies
    // of a named group get renamed counters so the surviving loops keep
    // their implicit names unambiguous.
    std::set<std::string> used = usedNames(Tree);
    ChildSlot at = locate(Tree, chain[0]);
    NodePtr original = std::move((*at.list)[at.index]);
    at.list->erase(at.list->begin() + (long)at.index);
    for (size_t g = 0; g < groups; ++g) {
      NodePtr top;
      Node *prev = nullptr;
      std::vector<Node *> copies;
      for (Node *b : chain) {
        auto c = std::make_unique<Node>();
        c->kind = Node::Kind::Band;
        c->id = Tree.allocId();
        c->loc = b->loc;
        c->counter = b->counter;
        c->lb = b->lb;
        c->ubs = b->ubs;
        c->step = b->step;
        c->annotations = b->annotations;
        copies.push_back(c.get());
        if (prev)
          prev->children.push_back(std::move(c));
        else
          top = std::move(c);
        prev = copies.back();
      }
      Node *hostC = copies.back();
      if (!gname[g].empty()) {
        hostC->name = gname[g];
        hostC->nameOrigin = NameOrigin::Output;
        rep.namesIntroduced.push_back(gname[g]);
      }
      NodePtr &part = host->children[g];
      if (part->kind == Node::Kind::Section) {
        hostC->annotations.insert(hostC->annotations.end(),
                                  part->annotations.begin(),
                                  part->annotations.end());
        hostC->children = std::move(part->children);
      } else {
        hostC->children.push_back(std::move(part));
      }
      if (groups >= 2 && !gname[g].empty()) {
        for (size_t l = 0; l < chain.size(); ++l) {
          std::string nc =
              freshName(used, gname[g] + "_" + chain[l]->counter);
          used.insert(nc);
          copies[l]->substitute(chain[l]->counter, AffineExpr::sym(nc));
          copies[l]->counter = nc;
          rep.namesIntroduced.push_back(nc);
        }
      }
      at.list->insert(at.list->begin() + (long)(at.index + g), std::move(top));
    }
    rep.outcome = Outcome::Applied;
  }

  //===------------------------------------------------------------------===//
  // Fuse
  //===------------------------------------------------------------------===//

  /// Targets must be consecutive siblings, listed in execution order.
  bool siblingRun(const std::vector<Node *> &nodes, const Directive &d,
                  TransformReport &rep, ChildSlot &firstSlot) {
    firstSlot = locate(Tree, nodes[0]);
    std::vector<size_t> idx{firstSlot.index};
    for (size_t k = 1; k < nodes.size(); ++k) {
      ChildSlot s = locate(Tree, nodes[k]);
      if (s.list != firstSlot.list)
        return precondition(rep, d,
                            "'" + d.spelling + "' targets must be siblings");
      idx.push_back(s.index);
    }
    for (size_t k = 1; k < idx.size(); ++k)
      if (idx[k] != idx[0] + k)
        return precondition(rep, d,
                            "'" + d.spelling +
                                "' targets must be consecutive siblings in "
                                "execution order");
    return true;
  }

  void doFuse(const PendingDirective &pd, TransformReport &rep) {
    const Directive &d = pd.dir;
    if (d.targetKind != TargetKind::LoopList) {
      fail(rep, d, DiagCode::MalformedClause,
           "fuse needs a loop(...) target list");
      return;
    }
    NameTable nt = names();
    auto bands = targetBands(pd, nt, rep, 0, 2);
    if (Res.aborted)
      return;
    ChildSlot slot;
    if (!siblingRun(bands, d, rep, slot))
      return;
    Node *keep = bands[0];
    for (size_t k = 1; k < bands.size(); ++k) {
      Node *b = bands[k];
      bool same = b->lb == keep->lb && b->step == keep->step &&
                  b->ubs.size() == keep->ubs.size();
      if (same) {
        auto key = [](const AffineExpr &e) { return e.str(); };
        std::vector<std::string> ua, ub;
        for (const auto &u : keep->ubs)
          ua.push_back(key(u));
        for (const auto &u : b->ubs)
          ub.push_back(key(u));
        std::sort(ua.begin(), ua.end());
        std::sort(ub.begin(), ub.end());
        same = ua == ub;
      }
      if (!same) {
        precondition(rep, d,
                     "loops to fuse must have identical iteration spaces "
                     "(shift or scale them first)");
        return;
      }
      bool captures = false;
      b->forEach([&](const Node &n) {
        if (n.isBand() && &n != b && n.counter == keep->counter)
          captures = true;
      });
      if (captures) {
        precondition(rep, d, "fusion would capture counter '" +
                                 keep->counter + "' bound inside '" +
                                 b->counter + "'");
        return;
      }
    }
    std::string fusedId = nameClause(d, "fused_id");
    if (!checkFreshIds(nt, {fusedId}, d, rep,
                       std::set<const Node *>(bands.begin(), bands.end())))
      return;
    Legality leg;
    for (size_t i = 0; i < bands.size(); ++i)
      for (size_t j = i + 1; j < bands.size(); ++j)
        leg = worse(leg, checkFuse(Tree, bands[i], bands[j], assumes(Tree)));
    if (!gate(rep, d, leg, true))
      return;

    for (size_t k = 1; k < bands.size(); ++k) {
      Node *b = bands[k];
      if (b->counter != keep->counter)
        for (auto &ch : b->children)
          ch->substitute(b->counter, AffineExpr::sym(keep->counter));
      for (auto &ch : b->children)
        keep->children.push_back(std::move(ch));
      keep->annotations.insert(keep->annotations.end(), b->annotations.begin(),
                               b->annotations.end());
    }
    slot.list->erase(slot.list->begin() + (long)slot.index + 1,
                     slot.list->begin() + (long)(slot.index + bands.size()));
    if (!fusedId.empty()) {
      keep->name = fusedId;
      keep->nameOrigin = NameOrigin::Output;
      keep->idDir.reset();
      rep.namesIntroduced.push_back(fusedId);
    }
    rep.outcome = Outcome::Applied;
  }

  //===------------------------------------------------------------------===//
  // Reorder
  //===------------------------------------------------------------------===//

  void doReorder(const PendingDirective &pd, TransformReport &rep,
                 bool &orderKept) {
    const Directive &d = pd.dir;
    if (d.targetKind != TargetKind::LoopList) {
      fail(rep, d, DiagCode::MalformedClause,
           "reorder needs a loop(...) target list in the new order");
      return;
    }
    NameTable nt = names();
    auto tnames = expandTargets(nt, d, rep);
    if (Res.aborted)
      return;
    std::vector<Node *> listed;
    std::set<Node *> seen;
    for (const auto &nm : tnames) {
      Node *n = resolveName(nt, nm, d, rep);
      if (!n)
        return;
      if (!seen.insert(n).second) {
        fail(rep, d, DiagCode::MalformedClause,
             "'" + nm + "' is listed twice");
        return;
      }
      listed.push_back(n);
    }
    if (listed.size() < 2) {
      fail(rep, d, DiagCode::MalformedClause,
           "reorder needs at least two constructs");
      return;
    }
    ChildSlot s0 = locate(Tree, listed[0]);
    std::vector<size_t> idx;
    for (Node *n : listed) {
      ChildSlot s = locate(Tree, n);
      if (s.list != s0.list) {
        precondition(rep, d, "reorder targets must be siblings");
        return;
      }
      idx.push_back(s.index);
    }
    std::vector<size_t> slots = idx;
    std::sort(slots.begin(), slots.end());
    if (idx == slots) { // already in the requested order
      if (!gate(rep, d, Legality{}, true))
        return;
      rep.outcome = Outcome::Applied;
      orderKept = true;
      return;
    }
    // The listed constructs take the same set of positions, in list order.
    std::vector<const Node *> siblings;
    for (const auto &ch : *s0.list)
      siblings.push_back(ch.get());
    std::vector<int> newPos(siblings.size());
    for (size_t i = 0; i < siblings.size(); ++i)
      newPos[i] = (int)i;
    for (size_t j = 0; j < listed.size(); ++j)
      newPos[idx[j]] = (int)slots[j];
    DependenceGraph g = analyze(Tree);
    Legality leg = checkReorder(g, siblings, newPos, assumes(Tree));
    if (!gate(rep, d, leg, true))
      return;
    std::vector<NodePtr> moved;
    for (size_t j = 0; j < listed.size(); ++j)
      moved.push_back(std::move((*s0.list)[idx[j]]));
    for (size_t j = 0; j < listed.size(); ++j)
      (*s0.list)[slots[j]] = std::move(moved[j]);
    rep.outcome = Outcome::Applied;
    orderKept = false;
  }

  //===------------------------------------------------------------------===//
  // Reverse, shift, scale
  //===------------------------------------------------------------------===//

  void doReverse(const PendingDirective &pd, TransformReport &rep) {
    const Directive &d = pd.dir;
    NameTable nt = names();
    auto bands = targetBands(pd, nt, rep, 1, 1);
    if (Res.aborted)
      return;
    Node *b = bands[0];
    AffineExpr last;
    if (auto cnt = constCount(*b)) {
      last = b->lb + (*cnt == 0 ? 0 : (*cnt - 1) * b->step);
    } else {
      auto ce = countExpr(*b);
      if (!ce) {
        precondition(rep, d,
                     "reverse needs a single upper bound when the iteration "
                     "count is symbolic");
        return;
      }
      last = b->lb + (*ce - 1) * b->step;
    }
    Legality leg = checkReverse(analyze(Tree), b, assumes(Tree));
    if (!gate(rep, d, leg, true))
      return;
    AffineExpr repl = b->lb + last - AffineExpr::sym(b->counter);
    for (auto &ch : b->children)
      ch->substitute(b->counter, repl);
    rep.outcome = Outcome::Applied;
  }

  void doShift(const PendingDirective &pd, TransformReport &rep) {
    const Directive &d = pd.dir;
    NameTable nt = names();
    auto bands = targetBands(pd, nt, rep, 1, 1);
    if (Res.aborted)
      return;
    Node *b = bands[0];
    AffineExpr off;
    if (!exprClause(d, "offset", off, rep))
      return;
    std::set<std::string> syms;
    addNames(off, syms);
    for (const auto &nm : syms)
      if (!Tree.isParam(nm)) {
        precondition(rep, d,
                     "shift offset must be affine in the parameters ('" + nm +
                         "' is not a parameter)");
        return;
      }
    if (!gate(rep, d, Legality{}, false))
      return;
    b->lb = b->lb + off;
    for (auto &u : b->ubs)
      u = u + off;
    AffineExpr repl = AffineExpr::sym(b->counter) - off;
    for (auto &ch : b->children)
      ch->substitute(b->counter, repl);
    rep.outcome = Outcome::Applied;
  }

  void doScale(const PendingDirective &pd, TransformReport &rep) {
    const Directive &d = pd.dir;
    NameTable nt = names();
    auto bands = targetBands(pd, nt, rep, 1, 1);
    if (Res.aborted)
      return;
    Node *b = bands[0];
    int64_t k = intClause(d, "factor", 0);
    if (k < 1) {
      precondition(rep, d, "scale factor must be a positive integer");
      return;
    }
    if (!gate(rep, d, Legality{}, false))
      return;
    if (k > 1) {
      b->lb = b->lb * k;
      for (auto &u : b->ubs)
        u = u * k;
      b->step = checkedMul(b->step, k);
      AffineExpr repl = AffineExpr::sym(b->counter).floordivBy(k);
      for (auto &ch : b->children)
        ch->substitute(b->counter, repl);
    }
    rep.outcome = Outcome::Applied;
  }

  //===------------------------------------------------------------------===//
  // Split and peel
  //===------------------------------------------------------------------===//

  /// Carves `b` into [lb, min(ubs, W)) followed by [align(W), ubs). `W` is
  /// the first value of the upper piece before stride alignment. When the
  /// aligned boundary could fall below lb at runtime the upper piece's body
  /// is guarded, keeping the pieces an exact partition; `exactBoundary`
  /// skips that analysis for callers whose W is provably >= lb.
  void splitAt(Node *b, const AffineExpr &W, const std::string &idLo,
               const std::string &idHi, bool exactBoundary,
               TransformReport &rep) {
    AffineExpr lbHi =
        b->lb + (W - b->lb + (b->step - 1)).floordivBy(b->step) * b->step;
    bool guard = false;
    if (!exactBoundary) {
      Feasibility f;
      bool ok = f.addLT(lbHi - b->lb);
      for (const auto &u : b->ubs)
        ok = ok && f.addLT(lbHi - u);
      guard = !ok || f.feasible();
    }
    int next = Tree.allocId();
    NodePtr hi = b->cloneFresh(next);
    Tree.noteId(next);
    hi->lb = lbHi;
    hi->name.clear();
    hi->nameOrigin = NameOrigin::None;
    hi->idDir.reset();
    if (guard) {
      auto g = std::make_unique<Node>();
      g->kind = Node::Kind::Guard;
      g->id = Tree.allocId();
      g->loc = b->loc;
      g->cond = AffineCmp{AffineExpr::sym(b->counter), CmpOp::GE, b->lb};
      g->children = std::move(hi->children);
      hi->children.clear();
      hi->children.push_back(std::move(g));
    }
    if (!idHi.empty()) {
      hi->name = idHi;
      hi->nameOrigin = NameOrigin::Output;
      rep.namesIntroduced.push_back(idHi);
    }
    b->ubs.insert(b->ubs.begin(), W);
    if (!idLo.empty()) {
      b->name = idLo;
      b->nameOrigin = NameOrigin::Output;
      b->idDir.reset();
      rep.namesIntroduced.push_back(idLo);
    }
    ChildSlot at = locate(Tree, b);
    at.list->insert(at.list->begin() + (long)at.index + 1, std::move(hi));
    rep.outcome = Outcome::Applied;
  }

  bool splitIds(const Directive &d, const NameTable &nt, TransformReport &rep,
                std::string &idLo, std::string &idHi) {
    std::vector<std::string> ids;
    if (!nameListClause(d, "split_ids", 0, ids, rep))
      return false;
    if (!ids.empty() && ids.size() != 2) {
      fail(rep, d, DiagCode::MalformedClause, "split_ids needs two names");
      return false;
    }
    if (!checkFreshIds(nt, ids, d, rep))
      return false;
    if (!ids.empty()) {
      idLo = ids[0];
      idHi = ids[1];
    }
    return true;
  }

  void doSplit(const PendingDirective &pd, TransformReport &rep) {
    const Directive &d = pd.dir;
    NameTable nt = names();
    auto bands = targetBands(pd, nt, rep, 1, 1);
    if (Res.aborted)
      return;
    Node *b = bands[0];
    std::string idLo, idHi;
    if (!splitIds(d, nt, rep, idLo, idHi))
      return;
    const Clause *ic = d.findClause("indices");
    if (!ic || ic->args.size() != 1 ||
        ic->args[0].kind != ClauseArg::Kind::Cmp) {
      fail(rep, d, DiagCode::MalformedClause,
           "split needs an indices(...) clause with one comparison");
      return;
    }
    const AffineCmp &p = ic->args[0].cmp;
    AffineExpr e = p.lhs - p.rhs;
    int64_t k = e.coeffOf(b->counter);
    AffineExpr rest = e.without(b->counter);
    if (rest.mentions(b->counter)) {
      precondition(rep, d, "the split predicate must be affine in '" +
                               b->counter + "'");
      return;
    }
    if (k == 0) {
      precondition(rep, d, "the split predicate must involve the counter '" +
                               b->counter + "'");
      return;
    }
    if (k != 1 && k != -1) {
      precondition(rep, d,
                   "the counter's coefficient in the split predicate must be "
                   "1 or -1");
      return;
    }
    if (p.op == CmpOp::EQ || p.op == CmpOp::NE) {
      precondition(rep, d,
                   "the split predicate must order the iteration space "
                   "(<, <=, > or >=)");
      return;
    }
    CmpOp op = p.op;
    AffineExpr T;
    if (k == 1) { // counter op T
      T = -rest;
    } else { // T op counter
      T = rest;
      op = op == CmpOp::LT   ? CmpOp::GT
           : op == CmpOp::LE ? CmpOp::GE
           : op == CmpOp::GT ? CmpOp::LT
                             : CmpOp::LE;
    }
    AffineExpr W = (op == CmpOp::GT || op == CmpOp::LE) ? T + 1 : T;
    if (!gate(rep, d, Legality{}, false))
      return;
    splitAt(b, W, idLo, idHi, /*exactBoundary=*/false, rep);
  }

  void doPeel(const PendingDirective &pd, TransformReport &rep) {
    const Directive &d = pd.dir;
    NameTable nt = names();
    auto bands = targetBands(pd, nt, rep, 1, 1);
    if (Res.aborted)
      return;
    Node *b = bands[0];
    std::string idLo, idHi;
    if (!splitIds(d, nt, rep, idLo, idHi))
      return;
    int64_t count = intClause(d, "count", 0);
    bool fromEnd = d.hasSwitch("end");
    AffineExpr W;
    bool exact = true;
    if (!fromEnd) {
      W = b->lb + checkedMul(count, b->step);
    } else if (auto cnt = constCount(*b)) {
      int64_t clamped = std::min(count, *cnt);
      W = b->lb + (*cnt - clamped) * b->step;
    } else {
      auto ce = countExpr(*b);
      if (!ce) {
        precondition(rep, d,
                     "peel from the end needs a single upper bound when the "
                     "iteration count is symbolic");
        return;
      }
      W = b->lb + (*ce - count) * b->step;
      exact = false; // the loop may be shorter than the peel count
    }
    if (!gate(rep, d, Legality{}, false))
      return;
    splitAt(b, W, idLo, idHi, exact, rep);
  }

  //===------------------------------------------------------------------===//
  // Concatenate
  //===------------------------------------------------------------------===//

  void doConcatenate(const PendingDirective &pd, TransformReport &rep) {
    const Directive &d = pd.dir;
    if (d.targetKind != TargetKind::LoopList) {
      fail(rep, d, DiagCode::MalformedClause,
           "concatenate needs a loop(...) target list");
      return;
    }
    NameTable nt = names();
    auto bands = targetBands(pd, nt, rep, 0, 2);
    if (Res.aborted)
      return;
    ChildSlot slot;
    if (!siblingRun(bands, d, rep, slot))
      return;
    std::string id = nameClause(d, "concatenated_id");
    if (!checkFreshIds(nt, {id}, d, rep,
                       std::set<const Node *>(bands.begin(), bands.end())))
      return;

    std::vector<AffineExpr> ext(bands.size());
    bool anySymbolic = false;
    for (size_t k = 0; k < bands.size(); ++k) {
      if (auto c = constCount(*bands[k])) {
        ext[k] = AffineExpr(*c);
        continue;
      }
      auto ce = countExpr(*bands[k]);
      if (!ce) {
        precondition(rep, d,
                     "each concatenated loop needs a single upper bound when "
                     "its iteration count is symbolic");
        return;
      }
      ext[k] = *ce;
      anySymbolic = true;
    }
    if (anySymbolic) {
      // The merged loop layout is only exact if no extent can be negative
      // while the total stays positive.
      AffineExpr total;
      for (const auto &e : ext)
        total = total + e;
      for (size_t k = 0; k < bands.size(); ++k) {
        if (ext[k].isConstant())
          continue;
        Feasibility f;
        bool ok = f.addLE(ext[k] + 1);            // ext <= -1
        ok = ok && f.addLE(AffineExpr(1) - total); // total >= 1
        if (!ok || f.feasible()) {
          precondition(rep, d,
                       "cannot prove the iteration count of loop '" +
                           bands[k]->counter +
                           "' stays nonnegative under concatenation");
          return;
        }
      }
    }
    if (!gate(rep, d, Legality{}, false))
      return;

    // Counter: prefer the first loop's counter once the inputs are gone.
    std::vector<NodePtr> taken(bands.size());
    for (size_t k = bands.size(); k-- > 0;)
      taken[k] = std::move((*slot.list)[slot.index + k]);
    slot.list->erase(slot.list->begin() + (long)slot.index,
                     slot.list->begin() + (long)(slot.index + bands.size()));
    std::set<std::string> used = usedNames(Tree);
    for (const auto &t : taken)
      for (const auto &ch : t->children)
        bindingNamesIn(*ch, used);
    std::string nc;
    auto merged = std::make_unique<Node>();
    merged->kind = Node::Kind::Band;
    merged->id = Tree.allocId();
    merged->loc = bands[0]->loc;
    if (!id.empty()) {
      nc = used.count(id) ? freshName(used, id + "_ctr") : id;
      merged->name = id;
      merged->nameOrigin = NameOrigin::Output;
      rep.namesIntroduced.push_back(id);
    } else {
      nc = freshName(used, bands[0]->counter);
      rep.namesIntroduced.push_back(nc);
    }
    merged->counter = nc;
    merged->lb = AffineExpr(0);
    merged->step = 1;

    AffineExpr off;
    std::vector<AffineExpr> starts(bands.size());
    for (size_t k = 0; k < bands.size(); ++k) {
      starts[k] = off;
      off = off + ext[k];
      merged->annotations.insert(merged->annotations.end(),
                                 bands[k]->annotations.begin(),
                                 bands[k]->annotations.end());
    }
    merged->ubs = {off};

    std::vector<std::vector<NodePtr>> bodies(bands.size());
    for (size_t k = 0; k < bands.size(); ++k) {
      AffineExpr val =
          bands[k]->lb + (AffineExpr::sym(nc) - starts[k]) * bands[k]->step;
      bodies[k] = std::move(bands[k]->children);
      for (auto &ch : bodies[k])
        ch->substitute(bands[k]->counter, val);
    }
    std::vector<NodePtr> restt = std::move(bodies.back());
    for (size_t k = bands.size() - 1; k-- > 0;) {
      auto g = std::make_unique<Node>();
      g->kind = Node::Kind::Guard;
      g->id = Tree.allocId();
      g->loc = bands[k]->loc;
      g->cond = AffineCmp{AffineExpr::sym(nc), CmpOp::LT, starts[k + 1]};
      g->children = std::move(bodies[k]);
      g->elseChildren = std::move(restt);
      restt.clear();
      restt.push_back(std::move(g));
    }
    merged->children = std::move(restt);
    slot.list->insert(slot.list->begin() + (long)slot.index,
                      std::move(merged));
    rep.outcome = Outcome::Applied;
  }

  //===------------------------------------------------------------------===//
  // Unroll and unroll-and-jam
  //===------------------------------------------------------------------===//

  void doUnroll(const PendingDirective &pd, TransformReport &rep) {
    const Directive &d = pd.dir;
    NameTable nt = names();
    auto bands = targetBands(pd, nt, rep, 1, 1);
    if (Res.aborted)
      return;
    Node *b = bands[0];
    std::string mainId = nameClause(d, "unrolled_id");
    std::string remId = nameClause(d, "remainder_id");
    if (!checkFreshIds(nt, {mainId, remId}, d, rep))
      return;

    if (d.hasSwitch("full")) {
      auto cnt = constCount(*b);
      if (!cnt) {
        precondition(rep, d,
                     "unroll full requires a compile-time iteration count");
        return;
      }
      if (*cnt > 1024) {
        precondition(rep, d, "unroll full would create " +
                                 std::to_string(*cnt) +
                                 " body copies (limit 1024)");
        return;
      }
      if (!gate(rep, d, Legality{}, false))
        return;
      ChildSlot at = locate(Tree, b);
      NodePtr own = std::move((*at.list)[at.index]);
      at.list->erase(at.list->begin() + (long)at.index);
      int next = Tree.allocId();
      size_t insert = at.index;
      for (int64_t k = 0; k < *cnt; ++k) {
        AffineExpr val = b->lb + k * b->step;
        for (const auto &ch : b->children) {
          NodePtr c = ch->cloneFresh(next);
          c->substitute(b->counter, val);
          at.list->insert(at.list->begin() + (long)insert++, std::move(c));
        }
      }
      Tree.noteId(next);
      rep.outcome = Outcome::Applied;
      return;
    }

    int64_t f = intClause(d, "factor", 0);
    if (f < 2) {
      precondition(rep, d, "unroll factor must be at least 2");
      return;
    }
    auto cnt = constCount(*b);
    bool needEpilogue = true;
    AffineExpr boundary;
    if (cnt) {
      int64_t rem = *cnt % f;
      needEpilogue = rem != 0;
      boundary = b->lb + (*cnt - rem) * b->step;
    } else {
      auto ce = countExpr(*b);
      if (!ce) {
        precondition(rep, d,
                     "unroll needs a single upper bound when the iteration "
                     "count is symbolic");
        return;
      }
      boundary = b->lb + ce->floordivBy(f) * checkedMul(f, b->step);
    }
    if (!gate(rep, d, Legality{}, false))
      return;

    NodePtr epilogue;
    if (needEpilogue) {
      int next = Tree.allocId();
      epilogue = b->cloneFresh(next);
      Tree.noteId(next);
      epilogue->lb = boundary;
      epilogue->name.clear();
      epilogue->nameOrigin = NameOrigin::None;
      epilogue->idDir.reset();
      if (!remId.empty()) {
        epilogue->name = remId;
        epilogue->nameOrigin = NameOrigin::Output;
        rep.namesIntroduced.push_back(remId);
      }
    }
    for (auto &u : b->ubs)
      u = u - (f - 1) * b->step;
    size_t origLen = b->children.size();
    int next = Tree.allocId();
    for (int64_t k = 1; k < f; ++k) {
      AffineExpr val = AffineExpr::sym(b->counter) + k * b->step;
      for (size_t i = 0; i < origLen; ++i) {
        NodePtr c = b->children[i]->cloneFresh(next);
        c->substitute(b->counter, val);
        b->children.push_back(std::move(c));
      }
    }
    Tree.noteId(next);
    b->step = checkedMul(b->step, f);
    if (!mainId.empty()) {
      b->name = mainId;
      b->nameOrigin = NameOrigin::Output;
      b->idDir.reset();
      rep.namesIntroduced.push_back(mainId);
    }
    if (epilogue) {
      ChildSlot at = locate(Tree, b);
      at.list->insert(at.list->begin() + (long)at.index + 1,
                      std::move(epilogue));
    }
    rep.outcome = Outcome::Applied;
  }

  void doUnrollAndJam(const PendingDirective &pd, TransformReport &rep) {
    const Directive &d = pd.dir;
    NameTable nt = names();
    auto bands = targetBands(pd, nt, rep, 1, 1);
    if (Res.aborted)
      return;
    Node *b = bands[0];
    int64_t f = intClause(d, "factor", 0);
    if (f < 2) {
      precondition(rep, d, "unrollandjam factor must be at least 2");
      return;
    }
    if (b->children.size() != 1 || !b->children[0]->isBand()) {
      precondition(rep, d,
                   "unrollandjam needs a perfectly nested inner loop");
      return;
    }
    Node *inner = b->children[0].get();
    std::set<std::string> innerBound;
    addNames(inner->lb, innerBound);
    for (const auto &u : inner->ubs)
      addNames(u, innerBound);
    if (innerBound.count(b->counter)) {
      precondition(rep, d, "the inner loop bounds must not depend on '" +
                               b->counter + "' for unrollandjam");
      return;
    }
    auto cnt = constCount(*b);
    bool needEpilogue = true;
    AffineExpr boundary;
    if (cnt) {
      int64_t rem = *cnt % f;
      needEpilogue = rem != 0;
      boundary = b->lb + (*cnt - rem) * b->step;
    } else {
      auto ce = countExpr(*b);
      if (!ce) {
        precondition(rep, d,
                     "unrollandjam needs a single upper bound when the "
                     "iteration count is symbolic");
        return;
      }
      boundary = b->lb + ce->floordivBy(f) * checkedMul(f, b->step);
    }
    // The jam moves each group's iterations inside the inner loop, which is
    // the interchange of the implied strip with the inner band.
    {
      LoopTree work = Tree.clone();
      Node *wb = work.find(b->id);
      Node *winner = work.find(inner->id);
      auto sm = stripmineRewrite(work, wb, f, "", "");
      std::vector<const Node *> oldO{sm.strip, winner};
      std::vector<const Node *> newO{winner, sm.strip};
      Legality leg = checkInterchange(analyze(work), oldO, newO, assumes(work));
      if (!gate(rep, d, leg, true))
        return;
    }
    NodePtr epilogue;
    if (needEpilogue) {
      int next = Tree.allocId();
      epilogue = b->cloneFresh(next);
      Tree.noteId(next);
      epilogue->lb = boundary;
      epilogue->name.clear();
      epilogue->nameOrigin = NameOrigin::None;
      epilogue->idDir.reset();
    }
    for (auto &u : b->ubs)
      u = u - (f - 1) * b->step;
    size_t origLen = inner->children.size();
    int next = Tree.allocId();
    for (int64_t k = 1; k < f; ++k) {
      AffineExpr val = AffineExpr::sym(b->counter) + k * b->step;
      for (size_t i = 0; i < origLen; ++i) {
        NodePtr c = inner->children[i]->cloneFresh(next);
        c->substitute(b->counter, val);
        inner->children.push_back(std::move(c));
      }
    }
    Tree.noteId(next);
    b->step = checkedMul(b->step, f);
    if (epilogue) {
      ChildSlot at = locate(Tree, b);
      at.list->insert(at.list->begin() + (long)at.index + 1,
                      std::move(epilogue));
    }
    rep.outcome = Outcome::Applied;
  }
};

} // namespace

ApplyResult applyAll(LoopTree &tree,
                     const std::vector<PendingDirective> &pending,
                     DiagEngine &diags, const ApplyOptions &opts) {
  Applier a(tree, diags, opts);
  return a.run(pending);
}

} // namespace looplang
