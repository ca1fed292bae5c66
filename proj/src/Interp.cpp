//===--- Interp.cpp - Reference interpreter -----------------------------------===//
//
// Part of the looplang project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "looplang/Interp.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

namespace looplang {

namespace {

uint64_t splitmix64(uint64_t &state) {
  uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class Machine {
public:
  Machine(const LoopTree &tree, const RunOptions &opts)
      : Tree(tree), Opts(opts) {
    for (const auto &p : tree.params) {
      auto it = opts.params.find(p.name);
      if (it == opts.params.end())
        throw InterpError(DiagCode::PreconditionViolated, p.loc,
                          "parameter '" + p.name + "' is not bound");
      State.params[p.name] = it->second;
      Env[p.name] = it->second;
    }
    uint64_t seedState = opts.init.seed;
    for (const auto &a : tree.arrays)
      allocate(a, seedState);
  }

  ExecState run() {
    for (const auto &ch : Tree.root->children)
      exec(*ch);
    return std::move(State);
  }

private:
  const LoopTree &Tree;
  const RunOptions &Opts;
  ExecState State;
  std::unordered_map<std::string, int64_t> Env;
  uint64_t Spent = 0;

  void charge(const SourceLoc &loc) {
    if (++Spent > Opts.budget)
      throw InterpError(DiagCode::BudgetExceeded, loc,
                        "execution budget of " + std::to_string(Opts.budget) +
                            " work units exceeded");
  }

  int64_t lookup(const std::string &name, const SourceLoc &loc) const {
    auto it = Env.find(name);
    if (it == Env.end())
      throw InterpError(DiagCode::PreconditionViolated, loc,
                        "no binding for '" + name + "'");
    return it->second;
  }

  int64_t evalAffine(const AffineExpr &e, const SourceLoc &loc) const {
    try {
      return e.evaluate([&](const std::string &n) { return lookup(n, loc); });
    } catch (const OverflowError &) {
      throw InterpError(DiagCode::IntegerOverflow, loc,
                        "integer overflow evaluating '" + e.str() + "'");
    }
  }

  void allocate(const ArrayDecl &decl, uint64_t &seedState) {
    ArrayVal v;
    v.elem = decl.elem;
    uint64_t total = 1;
    for (const auto &d : decl.dims) {
      int64_t n = evalAffine(d, decl.loc);
      if (n < 0)
        throw InterpError(DiagCode::OutOfBounds, decl.loc,
                          "array '" + decl.name + "' has negative extent " +
                              std::to_string(n));
      v.dims.push_back(n);
      total *= static_cast<uint64_t>(n);
      if (total > (1ull << 26))
        throw InterpError(DiagCode::BudgetExceeded, decl.loc,
                          "array '" + decl.name + "' exceeds the size limit");
    }
    size_t count = static_cast<size_t>(total);
    switch (Opts.init.kind) {
    case InitSpec::Kind::Zeros:
      if (v.elem == ElemKind::Int)
        v.ints.assign(count, 0);
      else
        v.floats.assign(count, 0.0);
      break;
    case InitSpec::Kind::Sequential:
      if (v.elem == ElemKind::Int) {
        v.ints.resize(count);
        for (size_t f = 0; f < count; ++f)
          v.ints[f] = static_cast<int64_t>(f);
      } else {
        v.floats.resize(count);
        for (size_t f = 0; f < count; ++f)
          v.floats[f] = static_cast<double>(f);
      }
      break;
    case InitSpec::Kind::Seeded:
      if (v.elem == ElemKind::Int) {
        v.ints.resize(count);
        for (size_t f = 0; f < count; ++f)
          v.ints[f] = static_cast<int64_t>(splitmix64(seedState) % 201) - 100;
      } else {
        v.floats.resize(count);
        for (size_t f = 0; f < count; ++f)
          v.floats[f] =
              static_cast<double>(splitmix64(seedState) >> 11) * 0x1.0p-52 -
              1.0; // uniform in [-1, 1)
      }
      break;
    }
    State.arrays.emplace(decl.name, std::move(v));
  }

  size_t flatIndex(const Node &leaf, const std::string &arrayName,
                   const std::vector<AffineExpr> &subs) {
    ArrayVal &a = State.arrays.at(arrayName);
    size_t flat = 0;
    for (size_t d = 0; d < subs.size(); ++d) {
      int64_t idx = evalAffine(subs[d], leaf.loc);
      if (idx < 0 || idx >= a.dims[d]) {
        std::ostringstream os;
        os << "index " << idx << " outside dimension " << d << " of '"
           << arrayName << "' (extent " << a.dims[d] << ") in '"
           << leaf.statementText() << "'";
        throw InterpError(DiagCode::OutOfBounds, leaf.loc, os.str());
      }
      flat = flat * static_cast<size_t>(a.dims[d]) + static_cast<size_t>(idx);
    }
    return flat;
  }

  int64_t evalInt(const Expr &e, const Node &leaf) {
    switch (e.kind) {
    case Expr::Kind::Affine:
      return evalAffine(e.affine, leaf.loc);
    case Expr::Kind::ArrayRead: {
      const ArrayVal &a = State.arrays.at(e.array);
      if (a.elem != ElemKind::Int)
        break;
      return a.ints[flatIndex(leaf, e.array, e.subs)];
    }
    case Expr::Kind::Binary: {
      int64_t l = evalInt(*e.lhs, leaf), r = evalInt(*e.rhs, leaf);
      try {
        switch (e.binOp) {
        case '+':
          return checkedAdd(l, r);
        case '-':
          return checkedSub(l, r);
        case '*':
          return checkedMul(l, r);
        default:
          break;
        }
      } catch (const OverflowError &) {
        throw InterpError(DiagCode::IntegerOverflow, e.loc,
                          "integer overflow in '" + e.str() + "'");
      }
      break;
    }
    case Expr::Kind::FloatLit:
      break;
    }
    throw InterpError(DiagCode::TypeError, e.loc,
                      "expression '" + e.str() + "' is not an integer");
  }

  double evalFloat(const Expr &e, const Node &leaf) {
    switch (e.kind) {
    case Expr::Kind::Affine:
      return static_cast<double>(evalAffine(e.affine, leaf.loc));
    case Expr::Kind::FloatLit:
      return e.floatVal;
    case Expr::Kind::ArrayRead: {
      const ArrayVal &a = State.arrays.at(e.array);
      size_t f = flatIndex(leaf, e.array, e.subs);
      return a.elem == ElemKind::Int ? static_cast<double>(a.ints[f])
                                     : a.floats[f];
    }
    case Expr::Kind::Binary: {
      // Strictly left-to-right, as written; never reassociated.
      double l = evalFloat(*e.lhs, leaf);
      double r = evalFloat(*e.rhs, leaf);
      switch (e.binOp) {
      case '+':
        return l + r;
      case '-':
        return l - r;
      case '*':
        return l * r;
      case '/':
        return l / r;
      default:
        break;
      }
      break;
    }
    }
    throw InterpError(DiagCode::TypeError, e.loc, "bad float expression");
  }

  void execLeaf(const Node &n) {
    charge(n.loc);
    ArrayVal &a = State.arrays.at(n.array);
    size_t f = flatIndex(n, n.array, n.subs);
    if (a.elem == ElemKind::Int) {
      int64_t rhs = evalInt(*n.rhs, n);
      int64_t &cell = a.ints[f];
      try {
        switch (n.op) {
        case AssignOp::Assign:
          cell = rhs;
          break;
        case AssignOp::PlusAssign:
          cell = checkedAdd(cell, rhs);
          break;
        case AssignOp::MinusAssign:
          cell = checkedSub(cell, rhs);
          break;
        case AssignOp::TimesAssign:
          cell = checkedMul(cell, rhs);
          break;
        }
      } catch (const OverflowError &) {
        throw InterpError(DiagCode::IntegerOverflow, n.loc,
                          "integer overflow in '" + n.statementText() + "'");
      }
    } else {
      double rhs = evalFloat(*n.rhs, n);
      double &cell = a.floats[f];
      switch (n.op) {
      case AssignOp::Assign:
        cell = rhs;
        break;
      case AssignOp::PlusAssign:
        cell += rhs;
        break;
      case AssignOp::MinusAssign:
        cell -= rhs;
        break;
      case AssignOp::TimesAssign:
        cell *= rhs;
        break;
      }
    }
    if (Opts.recordTrace) {
      TraceEntry t;
      t.stmtId = n.stmtId;
      t.coords.reserve(n.traceBindings.size());
      for (const auto &[orig, expr] : n.traceBindings)
        t.coords.push_back(evalAffine(expr, n.loc));
      State.trace.push_back(std::move(t));
    }
  }

  void exec(const Node &n) {
    switch (n.kind) {
    case Node::Kind::Band: {
      int64_t lo = evalAffine(n.lb, n.loc);
      int64_t hi = evalAffine(n.ubs[0], n.loc);
      for (size_t i = 1; i < n.ubs.size(); ++i)
        hi = std::min(hi, evalAffine(n.ubs[i], n.loc));
      for (int64_t c = lo; c < hi; c += n.step) {
        charge(n.loc);
        Env[n.counter] = c;
        for (const auto &ch : n.children)
          exec(*ch);
      }
      Env.erase(n.counter);
      break;
    }
    case Node::Kind::Guard: {
      bool taken;
      try {
        taken = n.cond.evaluate(
            [&](const std::string &s) { return lookup(s, n.loc); });
      } catch (const OverflowError &) {
        throw InterpError(DiagCode::IntegerOverflow, n.loc,
                          "integer overflow in '" + n.cond.str() + "'");
      }
      for (const auto &ch : taken ? n.children : n.elseChildren)
        exec(*ch);
      break;
    }
    case Node::Kind::Leaf:
      execLeaf(n);
      break;
    case Node::Kind::Seq:
    case Node::Kind::Section:
      for (const auto &ch : n.children)
        exec(*ch);
      break;
    }
  }
};

std::string cellName(const std::string &array, const ArrayVal &a, size_t flat) {
  std::vector<int64_t> idx(a.dims.size());
  for (size_t d = a.dims.size(); d-- > 0;) {
    idx[d] = a.dims[d] ? static_cast<int64_t>(flat % a.dims[d]) : 0;
    flat /= a.dims[d] ? static_cast<size_t>(a.dims[d]) : 1;
  }
  std::ostringstream os;
  os << array;
  for (int64_t i : idx)
    os << "[" << i << "]";
  return os.str();
}

} // namespace

ExecState run(const LoopTree &tree, const RunOptions &opts) {
  return Machine(tree, opts).run();
}

EquivResult equivalent(const ExecState &a, const ExecState &b, EquivMode mode,
                       double floatTol) {
  EquivResult res;
  auto fail = [&](const std::string &why) {
    if (res.equal) {
      res.equal = false;
      res.reason = why;
    }
  };

  if (a.params != b.params)
    fail("parameter bindings differ");

  if (a.arrays.size() != b.arrays.size())
    fail("different array sets");
  for (const auto &[name, av] : a.arrays) {
    auto it = b.arrays.find(name);
    if (it == b.arrays.end()) {
      fail("array '" + name + "' missing on one side");
      continue;
    }
    const ArrayVal &bv = it->second;
    if (av.elem != bv.elem || av.dims != bv.dims) {
      fail("array '" + name + "' has a different shape");
      continue;
    }
    if (av.elem == ElemKind::Int) {
      for (size_t f = 0; f < av.ints.size(); ++f)
        if (av.ints[f] != bv.ints[f]) {
          fail(cellName(name, av, f) + ": " + std::to_string(av.ints[f]) +
               " vs " + std::to_string(bv.ints[f]));
          break;
        }
    } else {
      for (size_t f = 0; f < av.floats.size(); ++f) {
        double x = av.floats[f], y = bv.floats[f];
        if (x == y || (std::isnan(x) && std::isnan(y)))
          continue;
        if (!std::isfinite(x) || !std::isfinite(y)) {
          std::ostringstream os;
          os.precision(17);
          os << cellName(name, av, f) << ": " << x << " vs " << y;
          fail(os.str());
          continue;
        }
        double mag = std::max(std::fabs(x), std::fabs(y));
        double rel = mag == 0.0 ? 0.0 : std::fabs(x - y) / mag;
        res.maxRelDeviation = std::max(res.maxRelDeviation, rel);
        if (rel > floatTol) {
          std::ostringstream os;
          os.precision(17);
          os << cellName(name, av, f) << ": " << x << " vs " << y
             << " (relative deviation " << rel << ")";
          fail(os.str());
        }
      }
    }
  }

  if (mode != EquivMode::Memory) {
    if (a.trace.size() != b.trace.size()) {
      fail("trace lengths differ: " + std::to_string(a.trace.size()) +
           " vs " + std::to_string(b.trace.size()));
    } else if (mode == EquivMode::TraceOrder) {
      for (size_t i = 0; i < a.trace.size(); ++i)
        if (!(a.trace[i] == b.trace[i])) {
          fail("trace entry " + std::to_string(i) + " differs");
          break;
        }
    } else {
      std::vector<TraceEntry> ta = a.trace, tb = b.trace;
      std::sort(ta.begin(), ta.end());
      std::sort(tb.begin(), tb.end());
      if (ta != tb)
        fail("traces contain different statement instances");
    }
  }
  return res;
}

} // namespace looplang
