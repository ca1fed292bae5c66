//===--- AffineExprTests.cpp ------------------------------------------------===//
//
// Part of the looplang project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "looplang/AffineExpr.h"

#include <cstdint>
#include <limits>
#include <random>

using namespace looplang;

namespace {

AffineExpr v(const std::string &n) { return AffineExpr::sym(n); }

int64_t evalWith(const AffineExpr &e, int64_t i, int64_t n) {
  return e.evaluate([&](const std::string &s) -> int64_t {
    if (s == "i")
      return i;
    if (s == "n")
      return n;
    FAIL("unexpected symbol ", s);
    return 0;
  });
}

} // namespace

TEST_CASE("constant arithmetic folds") {
  AffineExpr e = AffineExpr(3) + AffineExpr(4) * 2;
  CHECK(e.isConstant());
  CHECK(e.constantTerm() == 11);
  CHECK(e.str() == "11");
}

TEST_CASE("linear combination collects and cancels terms") {
  AffineExpr e = v("i") * 2 + v("n") - v("i") + AffineExpr(5);
  CHECK(e.coeffOf("i") == 1);
  CHECK(e.coeffOf("n") == 1);
  CHECK(evalWith(e, 7, 100) == 112);

  AffineExpr z = e - e;
  CHECK(z.isConstant());
  CHECK(z.constantTerm() == 0);
}

TEST_CASE("floor division rounds toward negative infinity") {
  CHECK(floorDiv(7, 2) == 3);
  CHECK(floorDiv(-7, 2) == -4);
  CHECK(floorDiv(-8, 2) == -4);
  CHECK(floorMod(7, 2) == 1);
  CHECK(floorMod(-7, 2) == 1);
  CHECK(floorMod(-8, 2) == 0);
}

TEST_CASE("floordiv folds when divisible, otherwise forms an atom") {
  AffineExpr e = (v("i") * 4 + AffineExpr(8)).floordivBy(4);
  CHECK(e.coeffOf("i") == 1);
  CHECK(e.constantTerm() == 2);
  CHECK_FALSE(e.hasAtoms());

  AffineExpr a = (v("n") + AffineExpr(1)).floordivBy(2);
  CHECK(a.hasAtoms());
  for (int64_t n = -9; n <= 9; ++n)
    CHECK(evalWith(a, 0, n) == floorDiv(n + 1, 2));
}

TEST_CASE("div and mod atoms evaluate consistently against direct computation") {
  // i == 2 * floor(i/2) + (i mod 2) must hold for every i.
  AffineExpr recon =
      v("i").floordivBy(2) * 2 + v("i").modBy(2);
  for (int64_t i = -20; i <= 20; ++i)
    CHECK(evalWith(recon, i, 0) == i);
}

TEST_CASE("substitution reaches atom arguments") {
  AffineExpr e = v("c").floordivBy(3) + v("c").modBy(3) * 10;
  AffineExpr r = e.substitute("c", v("i") + AffineExpr(1));
  for (int64_t i = 0; i < 12; ++i) {
    int64_t c = i + 1;
    CHECK(evalWith(r, i, 0) == floorDiv(c, 3) + 10 * floorMod(c, 3));
  }
}

TEST_CASE("substitution is exact on plain terms") {
  AffineExpr e = v("i") * 3 + v("n");
  AffineExpr r = e.substitute("i", v("n") * 2 - AffineExpr(1));
  CHECK(r.coeffOf("n") == 7);
  CHECK(r.constantTerm() == -3);
  CHECK_FALSE(r.mentions("i"));
}

TEST_CASE("overflow is detected, not wrapped") {
  int64_t big = std::numeric_limits<int64_t>::max();
  CHECK_THROWS_AS(checkedAdd(big, 1), OverflowError);
  CHECK_THROWS_AS(checkedMul(big, 2), OverflowError);
  CHECK_THROWS_AS((void)(AffineExpr(big) + AffineExpr(1)), OverflowError);
  CHECK_NOTHROW(checkedAdd(big, 0));
}

TEST_CASE("printing is stable and readable") {
  CHECK((v("i") + v("n") * 2 - AffineExpr(3)).str() == "i + 2 * n - 3");
  CHECK((v("i") * -1).str() == "-i");
  CHECK(AffineExpr(0).str() == "0");
  CHECK(v("i").floordivBy(2).str() == "i / 2");
  CHECK((v("i") + AffineExpr(1)).floordivBy(2).str() == "(i + 1) / 2");
  CHECK(v("i").modBy(4).str() == "i % 4");
}

TEST_CASE("comparisons evaluate with the usual meaning") {
  AffineCmp lt{v("i"), CmpOp::LT, v("n")};
  AffineCmp ge{v("i"), CmpOp::GE, v("n")};
  auto envFor = [](int64_t i, int64_t n) {
    return [i, n](const std::string &s) { return s == "i" ? i : n; };
  };
  CHECK(lt.evaluate(envFor(3, 4)));
  CHECK_FALSE(lt.evaluate(envFor(4, 4)));
  CHECK(ge.evaluate(envFor(4, 4)));
}

TEST_CASE("canonical equality ignores construction order") {
  AffineExpr a = v("i") + v("j") * 2;
  AffineExpr b = v("j") + v("i") + v("j");
  CHECK(a == b);
}

TEST_CASE("randomized evaluation agrees with direct interpretation") {
  std::mt19937_64 rng(0x5eed);
  std::uniform_int_distribution<int64_t> coeff(-3, 3);
  std::uniform_int_distribution<int64_t> val(-10, 10);
  for (int round = 0; round < 200; ++round) {
    int64_t ci = coeff(rng), cn = coeff(rng), k = coeff(rng);
    AffineExpr e = v("i") * ci + v("n") * cn + AffineExpr(k);
    int64_t i = val(rng), n = val(rng);
    CHECK(evalWith(e, i, n) == ci * i + cn * n + k);
  }
}
