//===--- DepAnalysis.cpp - Data dependence analysis --------------------------===//
//
// Part of the looplang project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// The engine works per ordered leaf pair and per conflicting access pair.
// Subscript equality is rewritten into equations over per-level distance
// variables; equations that involve only distances are solved exactly,
// everything else falls back to GCD and interval (Banerjee-style) checks.
// Feasible distance classes are then confirmed, where affordable, by
// enumerating concrete instance pairs under small parameter bindings; a
// confirmed pair is what later allows a hard Disproven verdict.
//
//===----------------------------------------------------------------------===//

#include "looplang/DepAnalysis.h"

#include <algorithm>
#include <cassert>
#include <numeric>
#include <sstream>

namespace looplang {

namespace {

//===----------------------------------------------------------------------===//
// Integer intervals with optional (infinite) ends
//===----------------------------------------------------------------------===//

std::optional<int64_t> addB(const std::optional<int64_t> &a,
                            const std::optional<int64_t> &b) {
  if (!a || !b)
    return std::nullopt;
  try {
    return checkedAdd(*a, *b);
  } catch (const OverflowError &) {
    return std::nullopt;
  }
}

std::optional<int64_t> mulB(const std::optional<int64_t> &a, int64_t k) {
  if (!a)
    return std::nullopt;
  try {
    return checkedMul(*a, k);
  } catch (const OverflowError &) {
    return std::nullopt;
  }
}

struct Ival {
  std::optional<int64_t> lo, hi;

  static Ival all() { return {}; }
  static Ival point(int64_t v) { return {v, v}; }
  static Ival range(std::optional<int64_t> l, std::optional<int64_t> h) {
    return {l, h};
  }

  bool isEmpty() const { return lo && hi && *lo > *hi; }
  bool exact() const { return lo && hi && *lo == *hi; }
  bool contains(int64_t v) const {
    return (!lo || *lo <= v) && (!hi || v <= *hi);
  }

  Ival operator+(const Ival &o) const { return {addB(lo, o.lo), addB(hi, o.hi)}; }
  Ival operator-(const Ival &o) const {
    return {addB(lo, mulB(o.hi, -1)), addB(hi, mulB(o.lo, -1))};
  }
  Ival scaled(int64_t k) const {
    if (k == 0)
      return point(0);
    if (k > 0)
      return {mulB(lo, k), mulB(hi, k)};
    return {mulB(hi, k), mulB(lo, k)};
  }
  Ival intersect(const Ival &o) const {
    Ival r;
    r.lo = lo && o.lo ? std::max(*lo, *o.lo) : (lo ? lo : o.lo);
    r.hi = hi && o.hi ? std::min(*hi, *o.hi) : (hi ? hi : o.hi);
    return r;
  }
  /// Largest interval of integers x with k*x inside this one (k != 0).
  Ival dividedByCoeff(int64_t k) const {
    Ival src = k > 0 ? *this : Ival{mulB(hi, -1), mulB(lo, -1)};
    int64_t d = k > 0 ? k : -k;
    Ival r;
    if (src.lo)
      r.lo = floorDiv(*src.lo + d - 1, d); // ceil
    if (src.hi)
      r.hi = floorDiv(*src.hi, d);
    return r;
  }
  /// Shrinks both ends to multiples of div.
  Ival roundedToDiv(int64_t div) const {
    if (div <= 1)
      return *this;
    Ival r = *this;
    if (r.lo)
      r.lo = floorDiv(*r.lo + div - 1, div) * div;
    if (r.hi)
      r.hi = floorDiv(*r.hi, div) * div;
    return r;
  }
  /// Widens symmetrically by w (used by the pit/strip coupling).
  Ival widened(int64_t w) const { return {addB(lo, -w), addB(hi, w)}; }
};

/// Range of an affine expression under interval bindings for plain symbols.
/// Unbound symbols are unconstrained. Mod atoms are always within [0, d).
Ival rangeOf(const AffineExpr &e, const std::map<std::string, Ival> &env) {
  Ival acc = Ival::point(e.constantTerm());
  for (const auto &[sym, coeff] : e.terms()) {
    Ival r;
    switch (sym.kind()) {
    case Sym::Kind::Plain: {
      auto it = env.find(sym.name());
      r = it == env.end() ? Ival::all() : it->second;
      break;
    }
    case Sym::Kind::FloorDiv: {
      Ival arg = rangeOf(sym.arg(), env);
      if (arg.lo)
        r.lo = floorDiv(*arg.lo, sym.divisor());
      if (arg.hi)
        r.hi = floorDiv(*arg.hi, sym.divisor());
      break;
    }
    case Sym::Kind::Mod:
      r = Ival::range(0, sym.divisor() - 1);
      break;
    }
    acc = acc + r.scaled(coeff);
  }
  return acc;
}

/// Counter range of a band whose bounds are evaluated under `env`.
Ival bandRange(const Node &band, const std::map<std::string, Ival> &env) {
  Ival r;
  r.lo = rangeOf(band.lb, env).lo;
  for (const AffineExpr &ub : band.ubs) {
    auto h = rangeOf(ub, env).hi;
    if (h)
      r.hi = r.hi ? std::min(*r.hi, *h - 1) : *h - 1;
  }
  return r;
}

//===----------------------------------------------------------------------===//
// Pair analysis
//===----------------------------------------------------------------------===//

struct LevelSpec {
  const Node *srcBand = nullptr;
  const Node *snkBand = nullptr; // same node except for fusion queries

  /// Counter values are lb + k*step, so two instances of one band (or of two
  /// identified bands with equal bounds) sit a multiple of step apart, but
  /// only when lb does not shift with the surrounding counters.
  int64_t div(const LoopTree &tree) const {
    if (srcBand != snkBand &&
        (srcBand->step != snkBand->step || !(srcBand->lb == snkBand->lb)))
      return 1;
    std::vector<std::string> names;
    srcBand->lb.collectPlainNames(names);
    for (const auto &n : names)
      if (!tree.isParam(n))
        return 1;
    return srcBand->step;
  }
};

std::string deltaName(size_t level) { return "d!" + std::to_string(level); }
std::string snkName(const std::string &c) { return "z!" + c; }

struct DimEq {
  enum class K { Trivial, Never, Linear, Fuzzy } k = K::Trivial;
  std::map<size_t, int64_t> dcoef; // Linear: level -> coefficient
  int64_t cst = 0;                 // Linear: constant part
  AffineExpr full;                 // Fuzzy: renamed difference expression
};

/// Either a loop-independent class (carried < 0) or carried at that level.
struct ClassSpec {
  int carried = -1;
};

struct ClassResult {
  std::vector<LevelDist> dist;
  std::vector<Ival> dv;
};

class PairAnalyzer {
public:
  PairAnalyzer(const LoopTree &tree, const Node *a, const Node *b,
               std::vector<LevelSpec> levels,
               const std::vector<const Node *> &srcOnly,
               const std::vector<const Node *> &snkOnly)
      : Tree(tree), A(a), B(b), Levels(std::move(levels)), SrcOnly(srcOnly),
        SnkOnly(snkOnly) {
    detectCoupling();
  }

  /// Renames the sink-side expression into the pair's variable space:
  /// identified level counters become src counter + delta, other sink
  /// counters get fresh names, parameters stay shared.
  AffineExpr renameSnk(const AffineExpr &e) const {
    AffineExpr r = e;
    for (const Node *band : SnkOnly)
      r = r.substitute(band->counter, AffineExpr::sym(snkName(band->counter)));
    for (size_t l = 0; l < Levels.size(); ++l) {
      const std::string &sc = Levels[l].snkBand->counter;
      AffineExpr repl = AffineExpr::sym(Levels[l].srcBand->counter) +
                        AffineExpr::sym(deltaName(l));
      r = r.substitute(sc, repl);
    }
    return r;
  }

  /// Prepares the subscript equations for one access pair. Returns false
  /// when some dimension can never be satisfied (no dependence at all).
  bool setAccessPair(const Access &src, const Access &snk) {
    Dims.clear();
    size_t n = std::min(src.subs.size(), snk.subs.size());
    for (size_t d = 0; d < n; ++d) {
      DimEq eq;
      AffineExpr diff = src.subs[d] - renameSnk(snk.subs[d]);
      if (diff.isConstant()) {
        eq.k = diff.constantTerm() == 0 ? DimEq::K::Trivial : DimEq::K::Never;
      } else {
        eq.k = DimEq::K::Linear;
        eq.cst = diff.constantTerm();
        for (const auto &[sym, coeff] : diff.terms()) {
          size_t lvl;
          if (sym.isPlain() && isDelta(sym.name(), lvl)) {
            eq.dcoef[lvl] = coeff;
          } else {
            eq.k = DimEq::K::Fuzzy;
            break;
          }
        }
        if (eq.k == DimEq::K::Fuzzy)
          eq.full = diff;
      }
      if (eq.k == DimEq::K::Never)
        return false;
      Dims.push_back(std::move(eq));
    }
    return true;
  }

  /// Solves one distance class. nullopt = infeasible.
  std::optional<ClassResult> solveClass(const ClassSpec &cls) const {
    try {
      return solveClassImpl(cls);
    } catch (const OverflowError &) {
      // Coefficients too large to reason about: stay conservative with the
      // plain class intervals.
      std::vector<Ival> dv;
      std::vector<int64_t> divs;
      if (!classInit(cls, dv, divs))
        return std::nullopt;
      ClassResult res;
      res.dv = dv;
      res.dist.resize(Levels.size());
      for (size_t l = 0; l < Levels.size(); ++l)
        res.dist[l] = LevelDist{dv[l].lo, dv[l].hi, divs[l]};
      return res;
    }
  }

  bool classInit(const ClassSpec &cls, std::vector<Ival> &dv,
                 std::vector<int64_t> &divs) const {
    divs.assign(Levels.size(), 1);
    dv.assign(Levels.size(), Ival::all());
    std::map<std::string, Ival> srcRanges = srcEnv();
    for (size_t l = 0; l < Levels.size(); ++l) {
      divs[l] = Levels[l].div(Tree);
      Ival range = srcRanges.count(Levels[l].srcBand->counter)
                       ? srcRanges.at(Levels[l].srcBand->counter)
                       : Ival::all();
      if (range.isEmpty())
        return false; // provably zero-trip loop
      Ival span = (range - range); // symmetric iteration-difference bound
      if ((int)l < cls.carried)
        dv[l] = Ival::point(0);
      else if ((int)l == cls.carried)
        dv[l] = Ival::range(divs[l], span.hi).roundedToDiv(divs[l]);
      else if (cls.carried < 0)
        dv[l] = Ival::point(0);
      else
        dv[l] = span.roundedToDiv(divs[l]);
      if (dv[l].isEmpty())
        return false;
    }
    return true;
  }

  std::optional<ClassResult> solveClassImpl(const ClassSpec &cls) const {
    std::vector<int64_t> divs;
    std::vector<Ival> dv;
    if (!classInit(cls, dv, divs))
      return std::nullopt;

    // Exact propagation over the linear equations plus the pit/strip
    // coupling, iterated to a fixpoint.
    for (int round = 0; round < 8; ++round) {
      bool changed = false;
      for (const DimEq &eq : Dims) {
        if (eq.k != DimEq::K::Linear)
          continue;
        int64_t base = eq.cst;
        std::vector<std::pair<size_t, int64_t>> unknown;
        for (const auto &[l, c] : eq.dcoef) {
          if (dv[l].exact())
            base = checkedAdd(base, checkedMul(c, *dv[l].lo));
          else
            unknown.push_back({l, c});
        }
        if (unknown.empty()) {
          if (base != 0)
            return std::nullopt;
          continue;
        }
        if (unknown.size() == 1) {
          auto [m, c] = unknown[0];
          if ((-base) % c != 0)
            return std::nullopt;
          int64_t v = -base / c;
          if (!dv[m].contains(v) || (divs[m] > 1 && v % divs[m] != 0))
            return std::nullopt;
          dv[m] = Ival::point(v);
          changed = true;
          continue;
        }
        for (auto [m, c] : unknown) {
          Ival rest = Ival::point(-base);
          for (auto [l2, c2] : unknown)
            if (l2 != m)
              rest = rest - dv[l2].scaled(c2);
          Ival cand =
              rest.dividedByCoeff(c).roundedToDiv(divs[m]).intersect(dv[m]);
          if (cand.isEmpty())
            return std::nullopt;
          if (cand.lo != dv[m].lo || cand.hi != dv[m].hi) {
            dv[m] = cand;
            changed = true;
          }
        }
      }
      for (auto [strip, pit, width] : Couples) {
        Ival p = dv[pit]
                     .intersect(dv[strip].widened(width))
                     .roundedToDiv(divs[pit]);
        Ival s = dv[strip]
                     .intersect(dv[pit].widened(width))
                     .roundedToDiv(divs[strip]);
        if (p.isEmpty() || s.isEmpty())
          return std::nullopt;
        if (p.lo != dv[pit].lo || p.hi != dv[pit].hi ||
            s.lo != dv[strip].lo || s.hi != dv[strip].hi) {
          dv[pit] = p;
          dv[strip] = s;
          changed = true;
        }
      }
      if (!changed)
        break;
    }

    // Residual checks on the dimensions the solver could not pin down.
    for (const DimEq &eq : Dims) {
      if (eq.k == DimEq::K::Linear) {
        // Re-verified above; interval-check the not-fully-pinned ones.
        Ival sum = Ival::point(eq.cst);
        for (const auto &[l, c] : eq.dcoef)
          sum = sum + dv[l].scaled(c);
        if (!sum.contains(0))
          return std::nullopt;
        continue;
      }
      if (eq.k != DimEq::K::Fuzzy)
        continue;
      AffineExpr e = eq.full;
      for (size_t l = 0; l < Levels.size(); ++l)
        if (dv[l].exact())
          e = e.substitute(deltaName(l), AffineExpr(*dv[l].lo));
      // GCD feasibility over the remaining free symbols.
      if (!e.hasAtoms() && !e.terms().empty()) {
        bool allPlain = true;
        int64_t g = 0;
        for (const auto &[sym, coeff] : e.terms()) {
          if (!sym.isPlain())
            allPlain = false;
          g = std::gcd(g, coeff < 0 ? -coeff : coeff);
        }
        if (allPlain && g > 1 && e.constantTerm() % g != 0)
          return std::nullopt;
      }
      // Interval check under per-class variable ranges.
      if (!rangeOf(e, classEnv(dv)).contains(0))
        return std::nullopt;
    }

    ClassResult res;
    res.dv = dv;
    res.dist.resize(Levels.size());
    for (size_t l = 0; l < Levels.size(); ++l)
      res.dist[l] = LevelDist{dv[l].lo, dv[l].hi, divs[l]};
    return res;
  }

  bool allDimsDecided() const {
    for (const DimEq &eq : Dims)
      if (eq.k == DimEq::K::Fuzzy)
        return false;
    return true;
  }

private:
  const LoopTree &Tree;
  const Node *A, *B;
  std::vector<LevelSpec> Levels;
  std::vector<const Node *> SrcOnly, SnkOnly;
  std::vector<DimEq> Dims;
  // (strip level, pit level, pit step - 1) triples.
  std::vector<std::tuple<size_t, size_t, int64_t>> Couples;

  bool isDelta(const std::string &name, size_t &level) const {
    if (name.rfind("d!", 0) != 0)
      return false;
    level = std::stoul(name.substr(2));
    return level < Levels.size();
  }

  /// A strip band sits on [p, p+S) where p is the pit counter and S the pit
  /// step; then strip and pit distances constrain each other within S-1.
  void detectCoupling() {
    for (size_t l = 0; l < Levels.size(); ++l) {
      if (Levels[l].srcBand != Levels[l].snkBand)
        continue;
      const Node *strip = Levels[l].srcBand;
      for (size_t m = 0; m < Levels.size(); ++m) {
        if (m == l || Levels[m].srcBand != Levels[m].snkBand)
          continue;
        const Node *pit = Levels[m].srcBand;
        if (strip->lb != AffineExpr::sym(pit->counter))
          continue;
        AffineExpr cap = AffineExpr::sym(pit->counter) + pit->step;
        if (std::find(strip->ubs.begin(), strip->ubs.end(), cap) !=
            strip->ubs.end())
          Couples.push_back({l, m, pit->step - 1});
      }
    }
  }

  std::map<std::string, Ival> srcEnv() const {
    std::map<std::string, Ival> env;
    for (const auto &p : Tree.params)
      env[p.name] = Ival::range(1, std::nullopt);
    for (const LevelSpec &ls : Levels)
      env[ls.srcBand->counter] = bandRange(*ls.srcBand, env);
    for (const Node *band : SrcOnly)
      env[band->counter] = bandRange(*band, env);
    return env;
  }

  /// Variable ranges for the interval check of one class: source counters,
  /// delta variables, renamed sink-only counters.
  std::map<std::string, Ival> classEnv(const std::vector<Ival> &dv) const {
    std::map<std::string, Ival> env = srcEnv();
    for (size_t l = 0; l < Levels.size(); ++l)
      env[deltaName(l)] = dv[l];
    for (const Node *band : SnkOnly) {
      AffineExpr lb = renameSnk(band->lb);
      Ival r;
      r.lo = rangeOf(lb, env).lo;
      for (const AffineExpr &ub : band->ubs) {
        auto h = rangeOf(renameSnk(ub), env).hi;
        if (h)
          r.hi = r.hi ? std::min(*r.hi, *h - 1) : *h - 1;
      }
      env[snkName(band->counter)] = r;
    }
    return env;
  }
};

//===----------------------------------------------------------------------===//
// Concrete witness search
//===----------------------------------------------------------------------===//

struct Instance {
  std::vector<int64_t> coords; // band counters along the leaf's path
  std::map<std::string, int64_t> env;
};

/// Enumerates the executing instances of `leaf` under a full parameter
/// binding, honoring guard conditions along the path. Returns false when the
/// work budget runs out.
bool enumerateInstances(const LoopTree &tree, const Node *leaf,
                        std::map<std::string, int64_t> env, int64_t &budget,
                        std::vector<Instance> &out) {
  std::vector<Node *> path = tree.pathTo(leaf->id);
  std::function<bool(size_t)> walk = [&](size_t idx) -> bool {
    if (--budget < 0)
      return false;
    Node *n = path[idx];
    if (n->isLeaf()) {
      Instance inst;
      inst.env = env;
      for (Node *p : path)
        if (p->isBand())
          inst.coords.push_back(env.at(p->counter));
      out.push_back(std::move(inst));
      return true;
    }
    auto eval = [&](const AffineExpr &e) {
      return e.evaluate([&](const std::string &s) { return env.at(s); });
    };
    if (n->kind == Node::Kind::Guard) {
      bool inElse = false;
      for (const NodePtr &ch : n->elseChildren)
        if (ch.get() == path[idx + 1])
          inElse = true;
      bool taken =
          n->cond.evaluate([&](const std::string &s) { return env.at(s); });
      if (taken == inElse)
        return true; // path branch not executed for this env
      return walk(idx + 1);
    }
    if (n->isBand()) {
      int64_t lo = eval(n->lb);
      std::optional<int64_t> hi;
      for (const AffineExpr &ub : n->ubs) {
        int64_t h = eval(ub);
        hi = hi ? std::min(*hi, h) : h;
      }
      for (int64_t v = lo; v < *hi; v += n->step) {
        if (--budget < 0)
          return false;
        env[n->counter] = v;
        if (!walk(idx + 1))
          return false;
      }
      env.erase(n->counter);
      return true;
    }
    return walk(idx + 1);
  };
  if (path.empty())
    return true;
  bool ok = true;
  try {
    ok = walk(0);
  } catch (...) {
    return false; // overflow or unbound symbol: treat as unsearchable
  }
  return ok;
}

std::vector<const Node *> bandsOnPath(const LoopTree &tree, const Node *leaf) {
  std::vector<const Node *> bands;
  for (Node *n : tree.pathTo(leaf->id))
    if (n->isBand())
      bands.push_back(n);
  return bands;
}

/// Searches for a concrete instance pair realizing the dependence, with the
/// per-level distance additionally restricted by `override` entries. Fills
/// the witness coordinate vectors on success. For fusion queries the sink
/// side resolves its levels against `snkLevels` instead of `dep.levels`.
bool findWitness(const LoopTree &tree, const Dependence &dep,
                 const std::vector<std::optional<Ival>> *overrides,
                 std::vector<int64_t> *outSrc = nullptr,
                 std::vector<int64_t> *outSnk = nullptr,
                 const std::vector<const Node *> *snkLevels = nullptr) {
  std::vector<const Node *> srcBands = bandsOnPath(tree, dep.src);
  std::vector<const Node *> snkBands = bandsOnPath(tree, dep.snk);
  const std::vector<const Node *> &snkLv = snkLevels ? *snkLevels : dep.levels;

  // Positions of each level's band on the two paths.
  std::vector<int> srcPos(dep.levels.size(), -1), snkPos(dep.levels.size(), -1);
  for (size_t l = 0; l < dep.levels.size(); ++l) {
    for (size_t i = 0; i < srcBands.size(); ++i)
      if (srcBands[i] == dep.levels[l])
        srcPos[l] = (int)i;
    for (size_t i = 0; i < snkBands.size(); ++i)
      if (snkBands[i] == snkLv[l])
        snkPos[l] = (int)i;
  }

  for (int64_t pv : {6, 4, 8, 3, 2, 12}) {
    std::map<std::string, int64_t> base;
    for (const auto &p : tree.params)
      base[p.name] = pv;
    int64_t budget = 60000;
    std::vector<Instance> srcInst, snkInst;
    if (!enumerateInstances(tree, dep.src, base, budget, srcInst))
      continue;
    if (!enumerateInstances(tree, dep.snk, base, budget, snkInst))
      continue;
    auto subsOf = [&](const Access &acc, const Instance &inst) {
      std::vector<int64_t> v;
      for (const AffineExpr &s : acc.subs)
        v.push_back(
            s.evaluate([&](const std::string &n) { return inst.env.at(n); }));
      return v;
    };
    for (const Instance &si : srcInst) {
      std::vector<int64_t> scell;
      try {
        scell = subsOf(dep.srcAcc, si);
      } catch (...) {
        continue;
      }
      for (const Instance &ki : snkInst) {
        if (--budget < 0)
          break;
        bool ok = true;
        for (size_t l = 0; l < dep.levels.size() && ok; ++l) {
          if (srcPos[l] < 0 || snkPos[l] < 0) {
            ok = false;
            break;
          }
          int64_t delta = ki.coords[snkPos[l]] - si.coords[srcPos[l]];
          const LevelDist &ld = dep.dist[l];
          if ((ld.lo && delta < *ld.lo) || (ld.hi && delta > *ld.hi) ||
              (ld.div > 1 && delta % ld.div != 0))
            ok = false;
          if (ok && overrides && (*overrides)[l] &&
              !(*overrides)[l]->contains(delta))
            ok = false;
        }
        if (!ok)
          continue;
        try {
          if (subsOf(dep.snkAcc, ki) != scell)
            continue;
        } catch (...) {
          continue;
        }
        if (outSrc)
          *outSrc = si.coords;
        if (outSnk)
          *outSnk = ki.coords;
        return true;
      }
      if (budget < 0)
        break;
    }
  }
  return false;
}

//===----------------------------------------------------------------------===//
// analyze()
//===----------------------------------------------------------------------===//

std::vector<Access> accessesWithImpliedReads(const Node *leaf) {
  std::vector<Access> accs = leaf->accesses();
  for (const Access &a : leaf->accesses()) {
    if (a.isWrite && a.isReduce) {
      Access r = a;
      r.isWrite = false;
      accs.push_back(r);
    }
  }
  return accs;
}

bool guardBetween(const LoopTree &tree, const Node *band, const Node *leaf) {
  std::vector<Node *> path = tree.pathTo(leaf->id);
  bool below = false;
  for (Node *n : path) {
    if (below && n->kind == Node::Kind::Guard)
      return true;
    if (n == band)
      below = true;
  }
  return false;
}

} // namespace

const char *depKindSpelling(DepKind k) {
  switch (k) {
  case DepKind::Flow:
    return "flow";
  case DepKind::Anti:
    return "anti";
  case DepKind::Output:
    return "output";
  }
  return "?";
}

const char *verdictSpelling(Verdict v) {
  switch (v) {
  case Verdict::Proven:
    return "Proven";
  case Verdict::Unknown:
    return "Unknown";
  case Verdict::Disproven:
    return "Disproven";
  }
  return "?";
}

std::string LevelDist::str() const {
  if (exact())
    return std::to_string(*lo);
  return "*";
}

std::string Dependence::str() const {
  std::ostringstream os;
  os << src->loc.file << ":" << src->loc.line << " -> " << snk->loc.file << ":"
     << snk->loc.line << " " << depKindSpelling(kind) << " distance(";
  for (size_t l = 0; l < dist.size(); ++l)
    os << (l ? ", " : "") << dist[l].str();
  os << ")";
  if (reduction)
    os << " reduce(" << srcAcc.reduceOp << ")";
  return os.str();
}

std::string DependenceGraph::render() const {
  std::ostringstream os;
  for (const Dependence &d : Deps)
    os << d.str() << "\n";
  return os.str();
}

DependenceGraph analyze(const LoopTree &tree) {
  std::vector<const Node *> leaves;
  std::map<const Node *, int> preIdx;
  {
    int idx = 0;
    tree.preOrder([&](Node &n) {
      preIdx[&n] = idx++;
      if (n.isLeaf())
        leaves.push_back(&n);
    });
  }

  std::vector<Dependence> deps;
  for (const Node *a : leaves) {
    std::vector<const Node *> pa = bandsOnPath(tree, a);
    for (const Node *b : leaves) {
      std::vector<const Node *> pb = bandsOnPath(tree, b);
      size_t common = 0;
      while (common < pa.size() && common < pb.size() &&
             pa[common] == pb[common])
        ++common;
      std::vector<LevelSpec> levels;
      for (size_t l = 0; l < common; ++l)
        levels.push_back({pa[l], pa[l]});
      std::vector<const Node *> srcOnly(pa.begin() + common, pa.end());
      std::vector<const Node *> snkOnly(pb.begin() + common, pb.end());
      PairAnalyzer pan(tree, a, b, levels, srcOnly, snkOnly);

      std::vector<Access> accA = accessesWithImpliedReads(a);
      std::vector<Access> accB = accessesWithImpliedReads(b);
      for (const Access &sa : accA) {
        for (const Access &sb : accB) {
          if (sa.array != sb.array || (!sa.isWrite && !sb.isWrite))
            continue;
          DepKind kind = sa.isWrite && sb.isWrite ? DepKind::Output
                         : sa.isWrite            ? DepKind::Flow
                                                 : DepKind::Anti;
          if (!pan.setAccessPair(sa, sb))
            continue;
          for (int cls = -1; cls < (int)common; ++cls) {
            if (cls < 0 && (a == b || preIdx.at(a) >= preIdx.at(b)))
              continue;
            auto res = pan.solveClass(ClassSpec{cls});
            if (!res)
              continue;
            Dependence d;
            d.src = a;
            d.snk = b;
            d.kind = kind;
            d.srcAcc = sa;
            d.snkAcc = sb;
            for (const LevelSpec &ls : levels)
              d.levels.push_back(ls.srcBand);
            d.dist = res->dist;
            d.carrier = cls < 0 ? nullptr : levels[cls].srcBand;
            d.reduction = sa.isReduce && sb.isReduce &&
                          sa.reduceOp == sb.reduceOp;

            // A self dependence pinned to zero everywhere except its
            // carrier repeats every carrier iteration provided the cells
            // and the inner iteration sets do not move with the carrier;
            // its minimal distance then generates the rest transitively,
            // so report it exactly.
            if (a == b && cls >= 0 && !d.dist[cls].exact()) {
              const std::string &cc = d.levels[cls]->counter;
              bool othersZero = true;
              for (size_t l = 0; l < d.dist.size(); ++l)
                if ((int)l != cls && !d.dist[l].isZero())
                  othersZero = false;
              bool cellsFixed = true;
              for (const auto &acc : {sa, sb})
                for (const AffineExpr &sub : acc.subs)
                  if (sub.mentions(cc))
                    cellsFixed = false;
              bool innerFixed = true;
              std::vector<const Node *> path = bandsOnPath(tree, a);
              for (size_t l = (size_t)cls + 1; l < path.size(); ++l) {
                if (path[l]->lb.mentions(cc))
                  innerFixed = false;
                for (const AffineExpr &ub : path[l]->ubs)
                  if (ub.mentions(cc))
                    innerFixed = false;
              }
              if (othersZero && cellsFixed && innerFixed && d.dist[cls].lo &&
                  *d.dist[cls].lo == d.dist[cls].div &&
                  !guardBetween(tree, d.levels[cls], a)) {
                // Distances are step multiples here even when the lower
                // bound shifts with outer counters: both ends share them.
                d.dist[cls].lo = d.dist[cls].hi = d.levels[cls]->step;
                d.dist[cls].div = d.levels[cls]->step;
              }
            }

            d.witnessed = findWitness(tree, d, nullptr, &d.witnessSrc,
                                      &d.witnessSnk);
            deps.push_back(std::move(d));
          }
        }
      }
    }
  }

  // Deduplicate (implied reduce reads can mirror explicit reads) and order
  // the report deterministically.
  auto key = [&](const Dependence &d) {
    std::ostringstream os;
    os << preIdx.at(d.src) << "|" << preIdx.at(d.snk) << "|" << (int)d.kind
       << "|" << (d.carrier ? preIdx.at(d.carrier) : -1) << "|";
    for (const LevelDist &ld : d.dist)
      os << (ld.lo ? std::to_string(*ld.lo) : "?") << ":"
         << (ld.hi ? std::to_string(*ld.hi) : "?") << ":" << ld.div << ",";
    os << "|" << d.reduction;
    return os.str();
  };
  std::stable_sort(deps.begin(), deps.end(),
                   [&](const Dependence &x, const Dependence &y) {
                     return key(x) < key(y);
                   });
  deps.erase(std::unique(deps.begin(), deps.end(),
                         [&](const Dependence &x, const Dependence &y) {
                           return key(x) == key(y);
                         }),
             deps.end());
  return DependenceGraph(&tree, std::move(deps));
}

//===----------------------------------------------------------------------===//
// Legality queries
//===----------------------------------------------------------------------===//

namespace {

std::string instancePairStr(const Dependence &d) {
  if (!d.witnessed)
    return "";
  std::ostringstream os;
  os << "; instances (";
  for (size_t i = 0; i < d.witnessSrc.size(); ++i)
    os << (i ? "," : "") << d.witnessSrc[i];
  os << ") -> (";
  for (size_t i = 0; i < d.witnessSnk.size(); ++i)
    os << (i ? "," : "") << d.witnessSnk[i];
  os << ")";
  return os.str();
}

LevelDist adjustedDist(const Dependence &d, size_t l, const AssumeSet &as) {
  LevelDist ld = d.dist[l];
  auto it = as.minDist.find(d.levels[l]);
  if (it != as.minDist.end() && !ld.exact())
    ld.lo = ld.lo ? std::max(*ld.lo, it->second) : it->second;
  return ld;
}

bool discharged(const Dependence &d, const AssumeSet &as) {
  return d.carrier && as.parallel.count(d.carrier);
}

/// Does `perm[i]` (indices into d.levels) order admit a lexicographically
/// negative distance vector? Returns the first level (in the new order)
/// where a negative value is reachable with an all-zero prefix, or -1.
int lexViolationLevel(const Dependence &d, const std::vector<size_t> &perm,
                      const AssumeSet &as) {
  for (size_t p = 0; p < perm.size(); ++p) {
    LevelDist ld = adjustedDist(d, perm[p], as);
    // Negative multiple of div reachable?
    int64_t div = std::max<int64_t>(1, ld.div);
    int64_t hiNeg = ld.hi ? std::min(*ld.hi, int64_t(-1)) : int64_t(-1);
    int64_t cand = floorDiv(hiNeg, div) * div;
    bool negPossible = !ld.lo || *ld.lo <= cand;
    if (negPossible)
      return (int)p;
    bool zeroPossible = (!ld.lo || *ld.lo <= 0) && (!ld.hi || *ld.hi >= 0);
    if (!zeroPossible)
      return -1; // strictly positive here: always lex-positive
  }
  return -1; // all-zero reachable at most: loop-independent, order kept
}

} // namespace

Legality checkInterchange(const DependenceGraph &g,
                          const std::vector<const Node *> &oldOrder,
                          const std::vector<const Node *> &newOrder,
                          const AssumeSet &assumes) {
  Legality out;
  for (const Dependence &d : g.all()) {
    if (discharged(d, assumes))
      continue;
    std::vector<int> at(oldOrder.size(), -1);
    size_t found = 0;
    for (size_t i = 0; i < oldOrder.size(); ++i)
      for (size_t l = 0; l < d.levels.size(); ++l)
        if (d.levels[l] == oldOrder[i]) {
          at[i] = (int)l;
          ++found;
        }
    if (found == 0)
      continue;
    if (found != oldOrder.size()) {
      out.verdict = Verdict::Unknown;
      out.witness = "dependence spans only part of the permuted nest";
      continue;
    }
    // New traversal order of this dependence's levels.
    std::vector<size_t> perm;
    std::map<const Node *, size_t> slot;
    for (size_t i = 0; i < oldOrder.size(); ++i)
      slot[oldOrder[i]] = (size_t)at[i];
    size_t next = 0;
    std::vector<bool> inNest(d.levels.size(), false);
    for (size_t i = 0; i < oldOrder.size(); ++i)
      inNest[at[i]] = true;
    for (size_t l = 0; l < d.levels.size(); ++l) {
      if (!inNest[l]) {
        perm.push_back(l);
        continue;
      }
      perm.push_back(slot.at(newOrder[next]));
      ++next;
    }
    int viol = lexViolationLevel(d, perm, assumes);
    if (viol < 0)
      continue;
    // Hard counterexample: a concrete pair whose permuted distance vector
    // is lexicographically negative.
    std::vector<std::optional<Ival>> overrides(d.levels.size());
    for (int p = 0; p < viol; ++p)
      overrides[perm[p]] = Ival::point(0);
    overrides[perm[viol]] = Ival::range(std::nullopt, -1);
    Dependence probe = d;
    std::vector<int64_t> ws, wk;
    if (g.tree() && findWitness(*g.tree(), probe, &overrides, &ws, &wk)) {
      out.verdict = Verdict::Disproven;
      std::ostringstream os;
      os << depKindSpelling(d.kind) << " dependence " << d.src->loc.file << ":"
         << d.src->loc.line << " -> " << d.snk->loc.file << ":"
         << d.snk->loc.line << " reverses under the permutation; instances (";
      for (size_t i = 0; i < ws.size(); ++i)
        os << (i ? "," : "") << ws[i];
      os << ") -> (";
      for (size_t i = 0; i < wk.size(); ++i)
        os << (i ? "," : "") << wk[i];
      os << ")";
      out.witness = os.str();
      return out;
    }
    if (out.verdict == Verdict::Proven) {
      out.verdict = Verdict::Unknown;
      out.witness = d.str() + " might reverse under the permutation";
    }
  }
  return out;
}

Legality checkReverse(const DependenceGraph &g, const Node *band,
                      const AssumeSet &assumes) {
  Legality out;
  for (const Dependence &d : g.all()) {
    if (d.carrier != band || discharged(d, assumes))
      continue;
    if (d.witnessed) {
      out.verdict = Verdict::Disproven;
      out.witness = d.str() + " is carried by '" + band->counter + "'" +
                    instancePairStr(d);
      return out;
    }
    out.verdict = Verdict::Unknown;
    out.witness = d.str() + " may be carried by '" + band->counter + "'";
  }
  return out;
}

Legality checkFuse(const LoopTree &tree, const Node *first, const Node *second,
                   const AssumeSet &assumes) {
  // Fusion runs both bodies under one counter; it breaks exactly when some
  // instance of the second body depends on a *later* iteration's instance of
  // the first body (the fused distance would be negative). That violating
  // class is, with roles swapped, an ordinary carried class at the
  // identified counter pair, which the solver can answer directly.
  std::vector<Node *> p1 = tree.pathTo(first->id);
  std::vector<Node *> p2 = tree.pathTo(second->id);
  size_t shared = 0;
  while (shared < p1.size() && shared < p2.size() && p1[shared] == p2[shared])
    ++shared;
  std::vector<LevelSpec> levels;
  for (size_t i = 0; i < shared; ++i)
    if (p1[i]->isBand())
      levels.push_back({p1[i], p1[i]});
  size_t fusedLevel = levels.size();
  levels.push_back({first, second});

  std::vector<const Node *> aLeaves, bLeaves;
  first->forEach([&](const Node &n) {
    if (n.isLeaf())
      aLeaves.push_back(&n);
  });
  second->forEach([&](const Node &n) {
    if (n.isLeaf())
      bLeaves.push_back(&n);
  });

  Legality out;
  for (const Node *a : aLeaves) {
    std::vector<const Node *> pa = bandsOnPath(tree, a);
    std::vector<const Node *> srcOnly(
        std::find(pa.begin(), pa.end(), first) + 1, pa.end());
    for (const Node *b : bLeaves) {
      std::vector<const Node *> pb = bandsOnPath(tree, b);
      std::vector<const Node *> snkOnly(
          std::find(pb.begin(), pb.end(), second) + 1, pb.end());

      // Reversed-role analyzer: src = b, snk = a, so the violating class is
      // "carried at the fused level with positive distance".
      std::vector<LevelSpec> rev = levels;
      rev[fusedLevel] = {second, first};
      PairAnalyzer back(tree, b, a, rev, snkOnly, srcOnly);

      for (const Access &sa : accessesWithImpliedReads(a)) {
        for (const Access &sb : accessesWithImpliedReads(b)) {
          if (sa.array != sb.array || (!sa.isWrite && !sb.isWrite))
            continue;
          if (assumes.assocReductions && sa.isReduce && sb.isReduce &&
              sa.reduceOp == sb.reduceOp)
            continue;
          if (!back.setAccessPair(sb, sa))
            continue;
          auto res = back.solveClass(ClassSpec{(int)fusedLevel});
          if (!res)
            continue;

          DepKind kind = sa.isWrite && sb.isWrite ? DepKind::Output
                         : sa.isWrite            ? DepKind::Flow
                                                 : DepKind::Anti;
          // Witness search in original orientation: src a, sink b, fused
          // distance mirrored to the negative side.
          Dependence probe;
          probe.src = a;
          probe.snk = b;
          probe.kind = kind;
          probe.srcAcc = sa;
          probe.snkAcc = sb;
          for (const LevelSpec &ls : levels)
            probe.levels.push_back(ls.srcBand);
          std::vector<const Node *> snkSide;
          for (const LevelSpec &ls : levels)
            snkSide.push_back(ls.snkBand);
          for (size_t l = 0; l < levels.size(); ++l) {
            const LevelDist &rd = res->dist[l];
            if (l == fusedLevel)
              probe.dist.push_back(LevelDist{
                  rd.hi ? std::optional<int64_t>(-*rd.hi) : std::nullopt,
                  rd.lo ? std::optional<int64_t>(-*rd.lo) : std::nullopt,
                  rd.div});
            else
              probe.dist.push_back(rd);
          }

          std::vector<int64_t> ws, wk;
          if (findWitness(tree, probe, nullptr, &ws, &wk, &snkSide)) {
            out.verdict = Verdict::Disproven;
            std::ostringstream os;
            os << depKindSpelling(kind) << " dependence " << a->loc.file << ":"
               << a->loc.line << " -> " << b->loc.file << ":" << b->loc.line
               << " runs backward across the fused bodies; instances (";
            for (size_t i = 0; i < ws.size(); ++i)
              os << (i ? "," : "") << ws[i];
            os << ") -> (";
            for (size_t i = 0; i < wk.size(); ++i)
              os << (i ? "," : "") << wk[i];
            os << ")";
            out.witness = os.str();
            return out;
          }
          if (out.verdict == Verdict::Proven) {
            out.verdict = Verdict::Unknown;
            std::ostringstream os;
            os << "possible " << depKindSpelling(kind) << " dependence "
               << a->loc.file << ":" << a->loc.line << " -> " << b->loc.file
               << ":" << b->loc.line << " backward across the fused bodies";
            out.witness = os.str();
          }
        }
      }
    }
  }
  return out;
}

Legality checkDistribute(const DependenceGraph &g, const Node *band,
                         const std::function<int(const Node *)> &groupOfLeaf,
                         const AssumeSet &assumes) {
  Legality out;
  for (const Dependence &d : g.all()) {
    if (d.carrier != band || discharged(d, assumes))
      continue;
    if (assumes.assocReductions && d.reduction)
      continue;
    int gs = groupOfLeaf(d.src), gk = groupOfLeaf(d.snk);
    if (gs < 0 || gk < 0 || gs <= gk)
      continue;
    if (d.witnessed) {
      out.verdict = Verdict::Disproven;
      out.witness = d.str() + " runs from a later group to an earlier one" +
                    instancePairStr(d);
      return out;
    }
    out.verdict = Verdict::Unknown;
    out.witness = d.str() + " may run from a later group to an earlier one";
  }
  return out;
}

Legality checkReorder(const DependenceGraph &g,
                      const std::vector<const Node *> &siblings,
                      const std::vector<int> &newPos,
                      const AssumeSet &assumes) {
  (void)assumes;
  Legality out;
  auto sibOf = [&](const Node *leaf) -> int {
    for (size_t i = 0; i < siblings.size(); ++i) {
      bool under = false;
      siblings[i]->forEach([&](const Node &n) {
        if (&n == leaf)
          under = true;
      });
      if (under)
        return (int)i;
    }
    return -1;
  };
  for (const Dependence &d : g.all()) {
    if (!d.loopIndependent())
      continue;
    int u = sibOf(d.src), v = sibOf(d.snk);
    if (u < 0 || v < 0 || u == v)
      continue;
    if (newPos[u] <= newPos[v])
      continue;
    if (d.witnessed) {
      out.verdict = Verdict::Disproven;
      out.witness = d.str() + " would run backward after reordering" +
                    instancePairStr(d);
      return out;
    }
    out.verdict = Verdict::Unknown;
    out.witness = d.str() + " may run backward after reordering";
  }
  return out;
}

} // namespace looplang
