//===--- AffineExpr.cpp - Canonical affine expressions --------------------===//
//
// Part of the looplang project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "looplang/AffineExpr.h"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace looplang {

int64_t checkedAdd(int64_t a, int64_t b) {
  int64_t r = 0;
  if (__builtin_add_overflow(a, b, &r))
    throw OverflowError();
  return r;
}

int64_t checkedSub(int64_t a, int64_t b) {
  int64_t r = 0;
  if (__builtin_sub_overflow(a, b, &r))
    throw OverflowError();
  return r;
}

int64_t checkedMul(int64_t a, int64_t b) {
  int64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r))
    throw OverflowError();
  return r;
}

int64_t floorDiv(int64_t a, int64_t b) {
  assert(b > 0 && "divisor must be positive");
  int64_t q = a / b;
  if (a % b != 0 && a < 0)
    --q;
  return q;
}

int64_t floorMod(int64_t a, int64_t b) {
  return checkedSub(a, checkedMul(floorDiv(a, b), b));
}

//===----------------------------------------------------------------------===//
// Sym
//===----------------------------------------------------------------------===//

Sym Sym::plain(std::string name) {
  Sym s;
  s.K = Kind::Plain;
  s.Name = std::move(name);
  return s;
}

Sym Sym::floordiv(const AffineExpr &arg, int64_t divisor) {
  assert(divisor > 1);
  Sym s;
  s.K = Kind::FloorDiv;
  s.Arg = std::make_shared<AffineExpr>(arg);
  s.Divisor = divisor;
  return s;
}

Sym Sym::mod(const AffineExpr &arg, int64_t divisor) {
  assert(divisor > 1);
  Sym s;
  s.K = Kind::Mod;
  s.Arg = std::make_shared<AffineExpr>(arg);
  s.Divisor = divisor;
  return s;
}

int Sym::compare(const Sym &o) const {
  if (K != o.K)
    return K < o.K ? -1 : 1;
  switch (K) {
  case Kind::Plain:
    return Name.compare(o.Name);
  case Kind::FloorDiv:
  case Kind::Mod: {
    if (Divisor != o.Divisor)
      return Divisor < o.Divisor ? -1 : 1;
    if (*Arg == *o.Arg)
      return 0;
    return *Arg < *o.Arg ? -1 : 1;
  }
  }
  return 0;
}

bool Sym::mentions(const std::string &plainName) const {
  if (K == Kind::Plain)
    return Name == plainName;
  return Arg->mentions(plainName);
}

std::string Sym::str() const {
  if (K == Kind::Plain)
    return Name;
  const char *op = K == Kind::FloorDiv ? "/" : "%";
  std::string inner = Arg->str();
  bool needParens = !(Arg->isConstant() ||
                      (Arg->terms().size() == 1 && Arg->constantTerm() == 0 &&
                       Arg->terms().begin()->second == 1 &&
                       Arg->terms().begin()->first.isPlain()));
  std::ostringstream os;
  if (needParens)
    os << "(" << inner << ")";
  else
    os << inner;
  os << " " << op << " " << Divisor;
  return os.str();
}

//===----------------------------------------------------------------------===//
// AffineExpr
//===----------------------------------------------------------------------===//

AffineExpr AffineExpr::sym(const std::string &name) {
  AffineExpr e;
  e.addTerm(Sym::plain(name), 1);
  return e;
}

AffineExpr AffineExpr::term(const Sym &s, int64_t coeff) {
  AffineExpr e;
  e.addTerm(s, coeff);
  return e;
}

void AffineExpr::addTerm(const Sym &s, int64_t coeff) {
  if (coeff == 0)
    return;
  auto it = Terms.find(s);
  if (it == Terms.end()) {
    Terms.emplace(s, coeff);
    return;
  }
  it->second = checkedAdd(it->second, coeff);
  if (it->second == 0)
    Terms.erase(it);
}

bool AffineExpr::getConstant(int64_t &out) const {
  if (!Terms.empty())
    return false;
  out = Constant;
  return true;
}

AffineExpr AffineExpr::operator+(const AffineExpr &o) const {
  AffineExpr r = *this;
  r.Constant = checkedAdd(r.Constant, o.Constant);
  for (const auto &[s, c] : o.Terms)
    r.addTerm(s, c);
  return r;
}

AffineExpr AffineExpr::operator-(const AffineExpr &o) const {
  return *this + (-o);
}

AffineExpr AffineExpr::operator-() const {
  AffineExpr r;
  r.Constant = checkedSub(0, Constant);
  for (const auto &[s, c] : Terms)
    r.Terms.emplace(s, checkedSub(0, c));
  return r;
}

AffineExpr AffineExpr::operator*(int64_t k) const {
  AffineExpr r;
  if (k == 0)
    return r;
  r.Constant = checkedMul(Constant, k);
  for (const auto &[s, c] : Terms)
    r.Terms.emplace(s, checkedMul(c, k));
  return r;
}

bool AffineExpr::operator<(const AffineExpr &o) const {
  if (Constant != o.Constant)
    return Constant < o.Constant;
  return std::lexicographical_compare(
      Terms.begin(), Terms.end(), o.Terms.begin(), o.Terms.end(),
      [](const auto &a, const auto &b) {
        int c = a.first.compare(b.first);
        if (c != 0)
          return c < 0;
        return a.second < b.second;
      });
}

AffineExpr AffineExpr::floordivBy(int64_t divisor) const {
  assert(divisor > 0);
  if (divisor == 1)
    return *this;
  if (isConstant())
    return AffineExpr(floorDiv(Constant, divisor));
  // Exact distribution when every coefficient and the constant divide evenly.
  bool exact = Constant % divisor == 0;
  for (const auto &[s, c] : Terms)
    exact = exact && (c % divisor == 0);
  if (exact) {
    AffineExpr r;
    r.Constant = Constant / divisor;
    for (const auto &[s, c] : Terms)
      r.Terms.emplace(s, c / divisor);
    return r;
  }
  return AffineExpr::term(Sym::floordiv(*this, divisor), 1);
}

AffineExpr AffineExpr::modBy(int64_t divisor) const {
  assert(divisor > 0);
  if (divisor == 1)
    return AffineExpr(0);
  if (isConstant())
    return AffineExpr(floorMod(Constant, divisor));
  return AffineExpr::term(Sym::mod(*this, divisor), 1);
}

AffineExpr AffineExpr::substitute(const std::string &name,
                                  const AffineExpr &repl) const {
  AffineExpr r(Constant);
  for (const auto &[s, c] : Terms) {
    switch (s.kind()) {
    case Sym::Kind::Plain:
      if (s.name() == name)
        r = r + repl * c;
      else
        r.addTerm(s, c);
      break;
    case Sym::Kind::FloorDiv: {
      AffineExpr inner = s.arg().substitute(name, repl);
      r = r + inner.floordivBy(s.divisor()) * c;
      break;
    }
    case Sym::Kind::Mod: {
      AffineExpr inner = s.arg().substitute(name, repl);
      r = r + inner.modBy(s.divisor()) * c;
      break;
    }
    }
  }
  return r;
}

int64_t AffineExpr::coeffOf(const std::string &plainName) const {
  auto it = Terms.find(Sym::plain(plainName));
  return it == Terms.end() ? 0 : it->second;
}

AffineExpr AffineExpr::without(const std::string &plainName) const {
  AffineExpr r = *this;
  r.Terms.erase(Sym::plain(plainName));
  return r;
}

bool AffineExpr::mentions(const std::string &plainName) const {
  for (const auto &[s, c] : Terms)
    if (s.mentions(plainName))
      return true;
  return false;
}

void AffineExpr::collectPlainNames(std::vector<std::string> &out) const {
  for (const auto &[s, c] : Terms) {
    if (s.isPlain()) {
      if (std::find(out.begin(), out.end(), s.name()) == out.end())
        out.push_back(s.name());
    } else {
      s.arg().collectPlainNames(out);
    }
  }
}

bool AffineExpr::hasAtomOver(const std::vector<std::string> &names) const {
  for (const auto &[s, c] : Terms) {
    if (s.isPlain())
      continue;
    for (const auto &n : names)
      if (s.arg().mentions(n))
        return true;
    if (s.arg().hasAtomOver(names))
      return true;
  }
  return false;
}

bool AffineExpr::hasAtoms() const {
  for (const auto &[s, c] : Terms)
    if (!s.isPlain())
      return true;
  return false;
}

int64_t AffineExpr::evaluate(
    const std::function<int64_t(const std::string &)> &env) const {
  int64_t acc = Constant;
  for (const auto &[s, c] : Terms) {
    int64_t v = 0;
    switch (s.kind()) {
    case Sym::Kind::Plain:
      v = env(s.name());
      break;
    case Sym::Kind::FloorDiv:
      v = floorDiv(s.arg().evaluate(env), s.divisor());
      break;
    case Sym::Kind::Mod:
      v = floorMod(s.arg().evaluate(env), s.divisor());
      break;
    }
    acc = checkedAdd(acc, checkedMul(c, v));
  }
  return acc;
}

std::string AffineExpr::str() const {
  if (Terms.empty())
    return std::to_string(Constant);
  std::ostringstream os;
  bool first = true;
  for (const auto &[s, c] : Terms) {
    int64_t coeff = c;
    if (first) {
      if (coeff < 0) {
        os << "-";
        coeff = -coeff;
      }
      first = false;
    } else {
      os << (coeff < 0 ? " - " : " + ");
      coeff = coeff < 0 ? -coeff : coeff;
    }
    bool atom = !s.isPlain();
    std::string sy = s.str();
    if (coeff != 1)
      os << coeff << " * ";
    if (atom && coeff != 1)
      os << "(" << sy << ")";
    else
      os << sy;
  }
  if (Constant > 0)
    os << " + " << Constant;
  else if (Constant < 0)
    os << " - " << -Constant;
  return os.str();
}

const char *cmpOpSpelling(CmpOp op) {
  switch (op) {
  case CmpOp::LT: return "<";
  case CmpOp::LE: return "<=";
  case CmpOp::GT: return ">";
  case CmpOp::GE: return ">=";
  case CmpOp::EQ: return "==";
  case CmpOp::NE: return "!=";
  }
  return "?";
}

bool AffineCmp::evaluate(
    const std::function<int64_t(const std::string &)> &env) const {
  int64_t a = lhs.evaluate(env), b = rhs.evaluate(env);
  switch (op) {
  case CmpOp::LT: return a < b;
  case CmpOp::LE: return a <= b;
  case CmpOp::GT: return a > b;
  case CmpOp::GE: return a >= b;
  case CmpOp::EQ: return a == b;
  case CmpOp::NE: return a != b;
  }
  return false;
}

std::string AffineCmp::str() const {
  return lhs.str() + " " + cmpOpSpelling(op) + " " + rhs.str();
}

} // namespace looplang
