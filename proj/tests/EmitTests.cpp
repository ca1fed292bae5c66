//===--- EmitTests.cpp ------------------------------------------------------===//
//
// Part of the looplang project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "looplang/Emit.h"
#include "looplang/Parser.h"

using namespace looplang;

namespace {

std::string emitOnce(const std::string &src) {
  DiagEngine diags;
  Program p = parseProgram(src, "t.ll.c", ParserConfig{}, diags);
  REQUIRE_FALSE(diags.hasErrors());
  BuildResult r = buildTree(p, diags);
  {
    INFO(diags.renderAll());
    REQUIRE_FALSE(diags.hasErrors());
  }
  return emit(r.tree, r.pending);
}

/// emit ∘ parse is a projection: a second round trip must be byte-identical.
void checkFixpoint(const std::string &src) {
  std::string once = emitOnce(src);
  std::string twice = emitOnce(once);
  CHECK(once == twice);
}

} // namespace

TEST_CASE("declarations and simple loops print canonically") {
  CHECK(emitOnce("param int n;\n"
                 "array double A[n][2 * n];\n"
                 "for (int i = 0; i < n; i += 1)\n"
                 "  A[i][i] = 0.5;\n") ==
        "param int n;\n"
        "array double A[n][2 * n];\n"
        "\n"
        "for (int i = 0; i < n; i += 1)\n"
        "  A[i][i] = 0.5;\n");
}

TEST_CASE("inclusive bounds print back with <=") {
  CHECK(emitOnce("param int n;\narray int A[n];\n"
                 "for (int i = 0; i <= n; i += 1) A[i] = 0;\n") ==
        "param int n;\n"
        "array int A[n];\n"
        "\n"
        "for (int i = 0; i <= n; i += 1)\n"
        "  A[i] = 0;\n");
  // A constant bound stays exclusive.
  CHECK(emitOnce("array int A[8];\n"
                 "for (int i = 0; i <= 7; i += 1) A[i] = 0;\n")
            .find("i < 8") != std::string::npos);
  // Bound arithmetic that ends in +1 prints as <= of the base expression.
  CHECK(emitOnce("param int n;\narray int A[n];\n"
                 "for (int i = 0; i < n / 2 + 1; i += 1) A[i] = 0;\n")
            .find("i <= n / 2") != std::string::npos);
}

TEST_CASE("directives are re-emitted in textual order above their construct") {
  std::string src = "param int n;\narray int A[n];\n"
                    "\n"
                    "#pragma omp simd\n"
                    "#pragma omp id(outer)\n"
                    "#pragma omp unroll factor(2)\n"
                    "for (int i = 0; i < n; i += 1)\n"
                    "  A[i] = i;\n";
  CHECK(emitOnce(src) == src);
}

TEST_CASE("min bounds join with &&") {
  std::string src = "param int n;\narray int A[100];\n"
                    "\n"
                    "for (int i = 0; i < n && i < 100; i += 1)\n"
                    "  A[i] = 0;\n";
  CHECK(emitOnce(src) == src);
}

TEST_CASE("sections, guards and nesting round-trip") {
  checkFixpoint("param int n;\narray int A[n];\narray double B[n];\n"
                "#pragma omp section id(setup)\n"
                "{\n"
                "  A[0] = 1;\n"
                "  B[0] = 0.0;\n"
                "}\n"
                "for (int i = 0; i < n; i += 1) {\n"
                "  if (i < n - 1)\n"
                "    A[i] = 2;\n"
                "  else\n"
                "    A[i] = 3;\n"
                "  B[i] = B[i] * 1.5 + A[i];\n"
                "}\n");
  checkFixpoint("array int A[4][4];\n"
                "for (int i = 0; i < 4; i += 1)\n"
                "  for (int j = 0; j < i + 1; j += 1)\n"
                "    A[i][j] += A[j][i] * 2;\n");
  checkFixpoint("param int m;\narray int A[m];\n"
                "#pragma omp expect_count min(4)\n"
                "A[0] = 0;\n"
                "for (int i = 0; i < m; i += 3)\n"
                "  if (i < m - 2)\n"
                "    A[i] = 1;\n");
}

TEST_CASE("pragma on a brace-free loop body round-trips") {
  std::string src = "array int A[16];\n"
                    "\n"
                    "#pragma omp id(outer)\n"
                    "for (int i = 0; i < 16; i += 4)\n"
                    "  #pragma omp id(inner)\n"
                    "  for (int j = i; j < i + 4; j += 1)\n"
                    "    A[j] = j;\n";
  CHECK(emitOnce(src) == src);
}

TEST_CASE("unapplied directives re-emit in place") {
  std::string src = "param int n;\narray int A[n];\n"
                    "\n"
                    "#pragma omp stripmine strip_size(4) pit_id(p) strip_id(s)\n"
                    "for (int i = 0; i < n; i += 1)\n"
                    "  A[i] = i;\n"
                    "#pragma omp loop(p) unroll factor(2)\n";
  CHECK(emitOnce(src) == src);
}

TEST_CASE("provably empty loops are dropped") {
  CHECK(emitOnce("array int A[4];\n"
                 "for (int i = 2; i < 2; i += 1) A[i] = 0;\n"
                 "A[0] = 1;\n") == "array int A[4];\n"
                                   "\n"
                                   "A[0] = 1;\n");
  // A symbolic bound may be empty at runtime; it must stay.
  CHECK(emitOnce("param int n;\narray int A[4];\n"
                 "for (int i = 0; i < n; i += 1) A[0] = 0;\n")
            .find("for") != std::string::npos);
}

TEST_CASE("floats print with full round-trip precision") {
  std::string out = emitOnce("array double D[2];\n"
                             "D[0] = 0.30000000000000004;\n"
                             "D[1] = 1.0;\n");
  CHECK(out.find("0.30000000000000004") != std::string::npos);
  CHECK(out.find("1.0") != std::string::npos);
  checkFixpoint(out);
}

TEST_CASE("pretty-c style renders without pragmas") {
  DiagEngine diags;
  Program p = parseProgram("param int n;\narray double A[n];\n"
                           "#pragma omp id(outer)\n"
                           "for (int i = 0; i < n; i += 1) A[i] = 1.5;\n",
                           "t.ll.c", ParserConfig{}, diags);
  BuildResult r = buildTree(p, diags);
  REQUIRE_FALSE(diags.hasErrors());
  std::string out = emit(r.tree, r.pending, EmitStyle::PrettyC);
  CHECK(out.find("void kernel(") != std::string::npos);
  CHECK(out.find("// outer") != std::string::npos);
  CHECK(out.find("#pragma") == std::string::npos);
}
