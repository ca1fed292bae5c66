//===--- AffineExpr.h - Canonical affine expressions ----------------------===//
//
// Part of the looplang project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Affine expressions over loop counters and parameters, kept in a canonical
// sum-of-terms form so that structural equality is semantic equality. Floor
// division and modulo by positive integer constants appear as opaque atoms;
// they are needed for counter recovery after coalescing and for bounds that
// divide a symbolic extent. Integer arithmetic is checked and raises
// OverflowError instead of wrapping.
//
//===----------------------------------------------------------------------===//

#ifndef LOOPLANG_AFFINEEXPR_H
#define LOOPLANG_AFFINEEXPR_H

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace looplang {

class AffineExpr;

struct OverflowError : std::runtime_error {
  OverflowError() : std::runtime_error("integer overflow in affine arithmetic") {}
};

int64_t checkedAdd(int64_t a, int64_t b);
int64_t checkedSub(int64_t a, int64_t b);
int64_t checkedMul(int64_t a, int64_t b);
/// Floor division: rounds toward negative infinity. Divisor must be > 0.
int64_t floorDiv(int64_t a, int64_t b);
/// Euclidean remainder paired with floorDiv; result is in [0, b).
int64_t floorMod(int64_t a, int64_t b);

/// A term symbol: either a plain identifier (loop counter or parameter) or a
/// floordiv/mod atom wrapping a nested affine expression and a positive
/// integer divisor. Atoms compare structurally, so equal atoms merge.
class Sym {
public:
  enum class Kind { Plain, FloorDiv, Mod };

  static Sym plain(std::string name);
  static Sym floordiv(const AffineExpr &arg, int64_t divisor);
  static Sym mod(const AffineExpr &arg, int64_t divisor);

  Kind kind() const { return K; }
  const std::string &name() const { return Name; }
  const AffineExpr &arg() const { return *Arg; }
  int64_t divisor() const { return Divisor; }
  bool isPlain() const { return K == Kind::Plain; }

  bool operator==(const Sym &o) const { return compare(o) == 0; }
  bool operator!=(const Sym &o) const { return compare(o) != 0; }
  bool operator<(const Sym &o) const { return compare(o) < 0; }
  int compare(const Sym &o) const;

  /// True if this symbol is, or contains, the given plain name.
  bool mentions(const std::string &plainName) const;

  std::string str() const;

private:
  Kind K = Kind::Plain;
  std::string Name;                       // Plain
  std::shared_ptr<const AffineExpr> Arg;  // FloorDiv / Mod
  int64_t Divisor = 1;
};

/// constant + sum(coeff * sym). Terms with zero coefficients are never
/// stored, so operator== is canonical-form equality.
class AffineExpr {
public:
  AffineExpr() = default;
  explicit AffineExpr(int64_t c) : Constant(c) {}
  static AffineExpr constant(int64_t c) { return AffineExpr(c); }
  static AffineExpr sym(const std::string &name);
  static AffineExpr term(const Sym &s, int64_t coeff);

  int64_t constantTerm() const { return Constant; }
  const std::map<Sym, int64_t> &terms() const { return Terms; }
  bool isConstant() const { return Terms.empty(); }
  /// Constant value if the expression has no symbolic part.
  bool getConstant(int64_t &out) const;

  AffineExpr operator+(const AffineExpr &o) const;
  AffineExpr operator-(const AffineExpr &o) const;
  AffineExpr operator-() const;
  AffineExpr operator*(int64_t k) const;
  AffineExpr operator+(int64_t k) const { return *this + AffineExpr(k); }
  AffineExpr operator-(int64_t k) const { return *this - AffineExpr(k); }

  bool operator==(const AffineExpr &o) const {
    return Constant == o.Constant && Terms == o.Terms;
  }
  bool operator!=(const AffineExpr &o) const { return !(*this == o); }
  bool operator<(const AffineExpr &o) const;

  /// Floor-divides by a positive constant. Folds when the dividend is a
  /// constant, when the divisor is 1, and when all terms plus the constant
  /// are exactly divisible; otherwise wraps the expression in an atom.
  AffineExpr floordivBy(int64_t divisor) const;
  AffineExpr modBy(int64_t divisor) const;

  /// Replaces every occurrence of the plain symbol `name` (including inside
  /// div/mod atoms) with `repl`.
  AffineExpr substitute(const std::string &name, const AffineExpr &repl) const;

  /// Coefficient of a plain symbol (0 when absent at the top level).
  int64_t coeffOf(const std::string &plainName) const;
  /// Expression minus its top-level `plainName` term.
  AffineExpr without(const std::string &plainName) const;
  bool mentions(const std::string &plainName) const;
  /// Collects the plain names referenced anywhere in the expression.
  void collectPlainNames(std::vector<std::string> &out) const;
  /// True if any div/mod atom argument mentions one of the given names.
  bool hasAtomOver(const std::vector<std::string> &names) const;
  bool hasAtoms() const;

  /// Evaluates under a binding of plain names to values. Throws
  /// std::out_of_range for unbound names and OverflowError on overflow.
  int64_t evaluate(const std::function<int64_t(const std::string &)> &env) const;

  std::string str() const;

private:
  int64_t Constant = 0;
  std::map<Sym, int64_t> Terms;

  void addTerm(const Sym &s, int64_t coeff);
  friend class Sym;
};

enum class CmpOp { LT, LE, GT, GE, EQ, NE };

const char *cmpOpSpelling(CmpOp op);

/// An affine comparison, used for split predicates and emitted guards.
struct AffineCmp {
  AffineExpr lhs;
  CmpOp op = CmpOp::LT;
  AffineExpr rhs;

  bool evaluate(const std::function<int64_t(const std::string &)> &env) const;
  std::string str() const;
  bool operator==(const AffineCmp &o) const {
    return op == o.op && lhs == o.lhs && rhs == o.rhs;
  }
};

} // namespace looplang

#endif // LOOPLANG_AFFINEEXPR_H
