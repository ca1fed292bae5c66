//===--- InterpTests.cpp ------------------------------------------------------===//
//
// Part of the looplang project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "looplang/Interp.h"
#include "looplang/Parser.h"

using namespace looplang;

namespace {

BuildResult buildOk(const std::string &src) {
  DiagEngine diags;
  Program p = parseProgram(src, "test.ll.c", ParserConfig{}, diags);
  INFO(diags.renderAll());
  REQUIRE_FALSE(diags.hasErrors());
  BuildResult r = buildTree(p, diags);
  INFO(diags.renderAll());
  REQUIRE_FALSE(diags.hasErrors());
  return r;
}

ExecState runSrc(const std::string &src, RunOptions opts = {}) {
  BuildResult r = buildOk(src);
  return run(r.tree, opts);
}

DiagCode runFails(const std::string &src, RunOptions opts = {}) {
  BuildResult r = buildOk(src);
  try {
    run(r.tree, opts);
  } catch (const InterpError &e) {
    return e.code();
  }
  FAIL("expected an interpreter error");
  return DiagCode::SyntaxError;
}

} // namespace

TEST_CASE("simple loop writes the expected cells and trace") {
  RunOptions opts;
  opts.params["n"] = 5;
  ExecState s = runSrc("param int n;\narray int A[n];\n"
                       "for (int i = 0; i < n; i += 1)\n"
                       "  A[i] = 2 * i + 1;\n",
                       opts);
  CHECK(s.arrays.at("A").ints == std::vector<int64_t>{1, 3, 5, 7, 9});
  REQUIRE(s.trace.size() == 5);
  for (int i = 0; i < 5; ++i) {
    CHECK(s.trace[i].stmtId == 0);
    CHECK(s.trace[i].coords == std::vector<int64_t>{i});
  }
}

TEST_CASE("compound assignments read and update cells") {
  RunOptions opts;
  opts.init = InitSpec::sequential();
  ExecState s = runSrc("array int A[4];\narray int S[1];\n"
                       "S[0] = 0;\n"
                       "for (int i = 0; i < 4; i += 1)\n"
                       "  S[0] += A[i] * A[i];\n",
                       opts);
  // A starts as 0,1,2,3.
  CHECK(s.arrays.at("S").ints[0] == 14);

  ExecState t = runSrc("array int A[3];\n"
                       "A[0] = 7; A[1] = 7; A[2] = 7;\n"
                       "A[0] -= 3;\nA[1] *= -2;\n");
  CHECK(t.arrays.at("A").ints == std::vector<int64_t>{4, -14, 7});
}

TEST_CASE("guards pick the then or else branch") {
  ExecState s = runSrc("array int A[6];\n"
                       "for (int i = 0; i < 6; i += 1)\n"
                       "  if (i < 3) A[i] = 1; else A[i] = -1;\n");
  CHECK(s.arrays.at("A").ints == std::vector<int64_t>{1, 1, 1, -1, -1, -1});
}

TEST_CASE("conjunctive upper bounds take the minimum") {
  RunOptions opts;
  opts.params["n"] = 3;
  ExecState s = runSrc("param int n;\narray int A[8];\n"
                       "for (int i = 0; i < n && i < 5; i += 1)\n"
                       "  A[i] = 1;\n",
                       opts);
  const auto &a = s.arrays.at("A").ints;
  CHECK(a == std::vector<int64_t>{1, 1, 1, 0, 0, 0, 0, 0});

  opts.params["n"] = 100;
  ExecState t = runSrc("param int n;\narray int A[8];\n"
                       "for (int i = 0; i < n && i < 5; i += 1)\n"
                       "  A[i] = 1;\n",
                       opts);
  CHECK(t.arrays.at("A").ints == std::vector<int64_t>{1, 1, 1, 1, 1, 0, 0, 0});
}

TEST_CASE("negative steps never run; step strides skip cells") {
  ExecState s = runSrc("array int A[10];\n"
                       "for (int i = 1; i < 10; i += 4)\n"
                       "  A[i] = i;\n");
  std::vector<int64_t> want(10, 0);
  want[1] = 1;
  want[5] = 5;
  want[9] = 9;
  CHECK(s.arrays.at("A").ints == want);
}

TEST_CASE("sequential init numbers cells in row-major order") {
  ExecState s = runSrc("array int A[2][3];\narray double B[2];\n"
                       "A[0][0] = A[1][2];\n",
                       [] {
                         RunOptions o;
                         o.init = InitSpec::sequential();
                         return o;
                       }());
  const auto &a = s.arrays.at("A").ints;
  CHECK(a == std::vector<int64_t>{5, 1, 2, 3, 4, 5});
  CHECK(s.arrays.at("B").floats == std::vector<double>{0.0, 1.0});
}

TEST_CASE("zero init is the default") {
  ExecState s = runSrc("array int A[3];\narray double B[3];\n"
                       "A[0] = A[1] + A[2];\n");
  CHECK(s.arrays.at("A").ints == std::vector<int64_t>{0, 0, 0});
  CHECK(s.arrays.at("B").floats == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("seeded init draws one stream across arrays in declaration order") {
  RunOptions opts;
  opts.init = InitSpec::seeded(42);
  ExecState s = runSrc("array int A[4];\narray double B[2];\n"
                       "A[0] = A[0];\n",
                       opts);
  CHECK(s.arrays.at("A").ints == std::vector<int64_t>{-45, -51, -67, -34});
  CHECK(s.arrays.at("B").floats[0] ==
        doctest::Approx(-0.92393966291950758).epsilon(1e-15));
  CHECK(s.arrays.at("B").floats[1] ==
        doctest::Approx(0.73645615309306467).epsilon(1e-15));

  for (int64_t v : s.arrays.at("A").ints) {
    CHECK(v >= -100);
    CHECK(v <= 100);
  }
  for (double v : s.arrays.at("B").floats) {
    CHECK(v >= -1.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("seeded runs are deterministic per seed") {
  const char *src = "array int A[16];\nA[0] = A[0];\n";
  RunOptions a, b, c;
  a.init = b.init = InitSpec::seeded(7);
  c.init = InitSpec::seeded(8);
  ExecState ra = runSrc(src, a), rb = runSrc(src, b), rc = runSrc(src, c);
  CHECK(equivalent(ra, rb, EquivMode::Memory));
  CHECK(ra.arrays.at("A").ints != rc.arrays.at("A").ints);
}

TEST_CASE("unbound parameters are rejected") {
  CHECK(runFails("param int n;\narray int A[4];\nA[0] = n;\n") ==
        DiagCode::PreconditionViolated);
}

TEST_CASE("out-of-bounds subscripts carry the cell and statement") {
  BuildResult r = buildOk("array int A[4];\n"
                          "for (int i = 0; i < 4; i += 1)\n"
                          "  A[i + 3] = i;\n");
  try {
    run(r.tree, {});
    FAIL("expected an out-of-bounds error");
  } catch (const InterpError &e) {
    CHECK(e.code() == DiagCode::OutOfBounds);
    CHECK(std::string(e.what()).find("index 4") != std::string::npos);
    CHECK(std::string(e.what()).find("extent 4") != std::string::npos);
  }
}

TEST_CASE("negative array extents are rejected") {
  RunOptions opts;
  opts.params["n"] = -2;
  BuildResult r = buildOk("param int n;\narray int A[n];\nA[0] = 0;\n");
  try {
    run(r.tree, opts);
    FAIL("expected a negative-extent error");
  } catch (const InterpError &e) {
    CHECK(e.code() == DiagCode::OutOfBounds);
  }
}

TEST_CASE("integer overflow in a cell update is reported") {
  CHECK(runFails("array int A[1];\n"
                 "A[0] = 9223372036854775806;\n"
                 "A[0] += 2;\n") == DiagCode::IntegerOverflow);
}

TEST_CASE("budget counts loop iterations even when no statement runs") {
  RunOptions opts;
  opts.budget = 1000;
  CHECK(runFails("array int A[1];\n"
                 "for (int i = 0; i < 100000; i += 1)\n"
                 "  if (i < 0) A[0] = 1;\n",
                 opts) == DiagCode::BudgetExceeded);
}

TEST_CASE("budget counts statement instances") {
  RunOptions opts;
  opts.budget = 1000;
  CHECK(runFails("array int A[1];\n"
                 "for (int i = 0; i < 600; i += 1)\n"
                 "  A[0] += 1;\n",
                 opts) == DiagCode::BudgetExceeded);

  opts.budget = 1200;
  ExecState s = runSrc("array int A[1];\n"
                       "for (int i = 0; i < 600; i += 1)\n"
                       "  A[0] += 1;\n",
                       opts);
  CHECK(s.arrays.at("A").ints[0] == 600);
}

TEST_CASE("trace bindings report original coordinates after a rewrite") {
  // Same memory effect, opposite visit order, with bindings patched the way
  // a reversal rewrite would patch them.
  BuildResult orig = buildOk("array int A[4];\n"
                             "for (int i = 0; i < 4; i += 1)\n"
                             "  A[i] = i;\n");
  BuildResult rev = buildOk("array int A[4];\n"
                            "for (int i = 0; i < 4; i += 1)\n"
                            "  A[3 - i] = 3 - i;\n");
  Node *leaf = nullptr;
  rev.tree.preOrder([&](Node &n) {
    if (n.isLeaf())
      leaf = &n;
  });
  REQUIRE(leaf);
  leaf->traceBindings = {
      {"i", AffineExpr(3) - AffineExpr::sym("i")}};

  ExecState a = run(orig.tree, {});
  ExecState b = run(rev.tree, {});

  REQUIRE(b.trace.size() == 4);
  CHECK(b.trace[0].coords == std::vector<int64_t>{3});
  CHECK(b.trace[3].coords == std::vector<int64_t>{0});

  CHECK(equivalent(a, b, EquivMode::Memory));
  CHECK(equivalent(a, b, EquivMode::TraceMultiset));
  EquivResult ord = equivalent(a, b, EquivMode::TraceOrder);
  CHECK_FALSE(ord.equal);
  CHECK(ord.reason.find("trace entry") != std::string::npos);
}

TEST_CASE("trace records one entry per statement instance in order") {
  ExecState s = runSrc("array int A[2];\n"
                       "for (int i = 0; i < 2; i += 1) {\n"
                       "  A[i] = i;\n"
                       "  A[i] += 1;\n"
                       "}\n");
  REQUIRE(s.trace.size() == 4);
  CHECK(s.trace[0] == TraceEntry{0, {0}});
  CHECK(s.trace[1] == TraceEntry{1, {0}});
  CHECK(s.trace[2] == TraceEntry{0, {1}});
  CHECK(s.trace[3] == TraceEntry{1, {1}});

  RunOptions off;
  off.recordTrace = false;
  ExecState t = runSrc("array int A[2];\nA[0] = 1;\n", off);
  CHECK(t.trace.empty());
}

TEST_CASE("float arithmetic follows the written association") {
  ExecState l = runSrc("array double C[1];\n"
                       "C[0] = 0.1 + 0.2 + 0.3;\n");
  ExecState r = runSrc("array double C[1];\n"
                       "C[0] = 0.1 + (0.2 + 0.3);\n");
  CHECK(l.arrays.at("C").floats[0] == 0.6000000000000001);
  CHECK(r.arrays.at("C").floats[0] == 0.6);

  EquivResult exact = equivalent(l, r, EquivMode::Memory, 0.0);
  CHECK_FALSE(exact.equal);
  CHECK(exact.maxRelDeviation > 0.0);
  CHECK(exact.maxRelDeviation < 1e-15);

  EquivResult loose = equivalent(l, r, EquivMode::Memory, 1e-9);
  CHECK(loose.equal);
  CHECK(loose.maxRelDeviation == exact.maxRelDeviation);
}

TEST_CASE("equivalence failures name the first differing cell") {
  ExecState a = runSrc("array int A[3];\nA[1] = 5;\n");
  ExecState b = runSrc("array int A[3];\nA[1] = 6;\n");
  EquivResult r = equivalent(a, b, EquivMode::Memory);
  CHECK_FALSE(r.equal);
  CHECK(r.reason == "A[1]: 5 vs 6");
}

TEST_CASE("mismatched parameters or shapes fail equivalence") {
  RunOptions p4, p5;
  p4.params["n"] = 4;
  p5.params["n"] = 5;
  const char *src = "param int n;\narray int A[n];\nA[0] = 1;\n";
  ExecState a = runSrc(src, p4), b = runSrc(src, p5);
  CHECK_FALSE(equivalent(a, b, EquivMode::Memory).equal);
}

TEST_CASE("non-finite values compare by identity") {
  const char *src = "array double A[1];\narray double C[1];\n"
                    "C[0] = A[0] / A[0];\n";
  ExecState a = runSrc(src), b = runSrc(src);
  CHECK(std::isnan(a.arrays.at("C").floats[0]));
  CHECK(equivalent(a, b, EquivMode::Memory));

  ExecState inf = runSrc("array double C[1];\nC[0] = 1.0 / 0.0;\n");
  CHECK(std::isinf(inf.arrays.at("C").floats[0]));
  CHECK(equivalent(inf, inf, EquivMode::Memory));
  EquivResult mix = equivalent(inf, a, EquivMode::Memory, 100.0);
  CHECK_FALSE(mix.equal);
}

TEST_CASE("deep nests evaluate subscripts per level") {
  RunOptions opts;
  opts.params["n"] = 3;
  ExecState s = runSrc("param int n;\narray int A[n][n][n];\n"
                       "for (int i = 0; i < n; i += 1)\n"
                       "  for (int j = 0; j < n; j += 1)\n"
                       "    for (int k = 0; k < n; k += 1)\n"
                       "      A[i][j][k] = 9 * i + 3 * j + k;\n",
                       opts);
  const auto &a = s.arrays.at("A").ints;
  REQUIRE(a.size() == 27);
  for (int f = 0; f < 27; ++f)
    CHECK(a[f] == f);
  REQUIRE(s.trace.size() == 27);
  CHECK(s.trace[14].coords == std::vector<int64_t>{1, 1, 2});
}
