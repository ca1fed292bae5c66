//===--- NameTableTests.cpp -------------------------------------------------===//
//
// Part of the looplang project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "looplang/NameTable.h"
#include "looplang/Parser.h"

using namespace looplang;

namespace {

struct Fixture {
  DiagEngine diags;
  BuildResult built;
  NameTable names;
};

Fixture makeFixture(const std::string &src, bool expectBuildErrors = false) {
  Fixture f;
  Program p = parseProgram(src, "t.ll.c", ParserConfig{}, f.diags);
  {
    INFO(f.diags.renderAll());
    REQUIRE_FALSE(f.diags.hasErrors());
  }
  f.built = buildTree(p, f.diags);
  REQUIRE_FALSE(f.diags.hasErrors());
  f.names = NameTable::build(f.built.tree, f.diags);
  if (!expectBuildErrors) {
    INFO(f.diags.renderAll());
    REQUIRE_FALSE(f.diags.hasErrors());
  }
  return f;
}

DiagCode lastError(const DiagEngine &diags) {
  DiagCode code = DiagCode::None;
  for (const auto &d : diags.all())
    if (d.level == DiagLevel::Error)
      code = d.code;
  return code;
}

} // namespace

TEST_CASE("counter names resolve when unique") {
  Fixture f = makeFixture("param int n;\narray int A[n][n];\n"
                          "for (int i = 0; i < n; i += 1)\n"
                          "  for (int j = 0; j < n; j += 1)\n"
                          "    A[i][j] = 0;\n");
  Node *i = f.names.resolve("i", SourceLoc{}, f.diags);
  Node *j = f.names.resolve("j", SourceLoc{}, f.diags);
  REQUIRE(i);
  REQUIRE(j);
  CHECK(i->counter == "i");
  CHECK(j->counter == "j");
  CHECK_FALSE(f.diags.hasErrors());
}

TEST_CASE("explicit names win and suppress the loop's own counter name") {
  Fixture f = makeFixture("array int A[4];\n"
                          "#pragma omp id(outer)\n"
                          "for (int i = 0; i < 4; i += 1) A[i] = 0;\n");
  CHECK(f.names.resolve("outer", SourceLoc{}, f.diags));
  CHECK_FALSE(f.names.lookup("i"));
  (void)f.names.resolve("i", SourceLoc{"t.ll.c", 9, 9}, f.diags);
  CHECK(lastError(f.diags) == DiagCode::UnknownName);
}

TEST_CASE("another construct claiming the counter name suppresses it too") {
  Fixture f = makeFixture("array int A[4];\n"
                          "#pragma omp section id(i)\n"
                          "{ A[0] = 1; }\n"
                          "for (int i = 0; i < 4; i += 1) A[i] = 0;\n");
  Node *n = f.names.resolve("i", SourceLoc{}, f.diags);
  REQUIRE(n);
  CHECK(n->kind == Node::Kind::Section);
}

TEST_CASE("shared counter names are ambiguous only on reference") {
  Fixture f = makeFixture("array int A[4];\n"
                          "for (int i = 0; i < 4; i += 1) A[i] = 0;\n"
                          "for (int i = 0; i < 4; i += 1) A[i] = 1;\n");
  CHECK_FALSE(f.diags.hasErrors()); // defining is fine
  CHECK_FALSE(f.names.lookup("i"));
  (void)f.names.resolve("i", SourceLoc{"t.ll.c", 9, 1}, f.diags);
  CHECK(lastError(f.diags) == DiagCode::AmbiguousName);
}

TEST_CASE("duplicate explicit names error at definition") {
  Fixture f = makeFixture("array int A[4];\n"
                          "#pragma omp id(x)\n"
                          "for (int i = 0; i < 4; i += 1) A[i] = 0;\n"
                          "#pragma omp section id(x)\n"
                          "{ A[0] = 1; }\n",
                          /*expectBuildErrors=*/true);
  CHECK(lastError(f.diags) == DiagCode::DuplicateExplicitName);
}

TEST_CASE("unknown names report as such") {
  Fixture f = makeFixture("array int A[4];\n"
                          "for (int i = 0; i < 4; i += 1) A[i] = 0;\n");
  CHECK_FALSE(f.names.resolve("nope", SourceLoc{"t.ll.c", 1, 1}, f.diags));
  CHECK(lastError(f.diags) == DiagCode::UnknownName);
}

TEST_CASE("ellipsis expands over the named loop walk") {
  Fixture f = makeFixture("param int n;\narray int A[n][n][n][n];\n"
                          "for (int i = 0; i < n; i += 1)\n"
                          "  for (int j = 0; j < n; j += 1)\n"
                          "    for (int k = 0; k < n; k += 1)\n"
                          "      for (int l = 0; l < n; l += 1)\n"
                          "        A[i][j][k][l] = 0;\n");
  auto ex = f.names.expand({"i", "...", "l"}, SourceLoc{}, f.diags);
  CHECK(ex == std::vector<std::string>{"i", "j", "k", "l"});
  ex = f.names.expand({"j", "...", "k"}, SourceLoc{}, f.diags);
  CHECK(ex == std::vector<std::string>{"j", "k"});
  CHECK_FALSE(f.diags.hasErrors());
}

TEST_CASE("bad ranges are rejected") {
  Fixture f = makeFixture("param int n;\narray int A[n][n];\n"
                          "for (int i = 0; i < n; i += 1)\n"
                          "  for (int j = 0; j < n; j += 1)\n"
                          "    A[i][j] = 0;\n");
  (void)f.names.expand({"j", "...", "i"}, SourceLoc{}, f.diags);
  CHECK(lastError(f.diags) == DiagCode::BadRange);
  f.diags.clear();
  (void)f.names.expand({"i", "...", "zz"}, SourceLoc{}, f.diags);
  CHECK(lastError(f.diags) == DiagCode::BadRange);
  f.diags.clear();
  (void)f.names.expand({"...", "i"}, SourceLoc{}, f.diags);
  CHECK(lastError(f.diags) == DiagCode::BadRange);
}

TEST_CASE("dump-names lists constructs in tree order with origins") {
  Fixture f = makeFixture("param int n;\narray int A[n];\n"
                          "#pragma omp id(outer)\n"
                          "for (int i = 0; i < n; i += 1) {\n"
                          "  for (int j = 0; j < n; j += 1) A[j] = 0;\n"
                          "}\n"
                          "#pragma omp section id(tail)\n"
                          "{ A[0] = 1; }\n");
  CHECK(f.names.dump() == "outer loop explicit t.ll.c:4:1\n"
                          "j loop implicit t.ll.c:5:3\n"
                          "tail section explicit t.ll.c:8:1\n");
}
