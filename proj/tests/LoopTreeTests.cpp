//===--- LoopTreeTests.cpp --------------------------------------------------===//
//
// Part of the looplang project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "looplang/LoopTree.h"
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

std::vector<std::string> pendingKinds(const BuildResult &r) {
  std::vector<std::string> out;
  for (const auto &p : r.pending)
    out.push_back(dirKindSpelling(p.dir.kind));
  return out;
}

} // namespace

TEST_CASE("basic structure lowers to bands, leaves and guards") {
  BuildResult r = buildOk("param int n;\narray int A[n][n];\n"
                          "for (int i = 0; i < n; i += 1) {\n"
                          "  for (int j = 0; j < n; j += 1) {\n"
                          "    if (j < i) A[i][j] = 0;\n"
                          "  }\n"
                          "}\n");
  const Node &root = *r.tree.root;
  CHECK(root.kind == Node::Kind::Seq);
  REQUIRE(root.children.size() == 1);
  const Node &bi = *root.children[0];
  CHECK(bi.isBand());
  CHECK(bi.counter == "i");
  REQUIRE(bi.children.size() == 1);
  const Node &bj = *bi.children[0];
  CHECK(bj.counter == "j");
  REQUIRE(bj.children.size() == 1);
  const Node &g = *bj.children[0];
  CHECK(g.kind == Node::Kind::Guard);
  REQUIRE(g.children.size() == 1);
  CHECK(g.children[0]->isLeaf());
  CHECK(g.children[0]->stmtId == 0);
}

TEST_CASE("leaves record identity trace bindings for enclosing counters") {
  BuildResult r = buildOk("array int A[4][4];\n"
                          "for (int i = 0; i < 4; i += 1)\n"
                          "  for (int j = 0; j < 4; j += 1)\n"
                          "    A[i][j] = i + j;\n");
  Node *leaf = nullptr;
  r.tree.preOrder([&](Node &n) {
    if (n.isLeaf())
      leaf = &n;
  });
  REQUIRE(leaf);
  REQUIRE(leaf->traceBindings.size() == 2);
  CHECK(leaf->traceBindings[0].first == "i");
  CHECK(leaf->traceBindings[0].second == AffineExpr::sym("i"));
  CHECK(leaf->traceBindings[1].first == "j");
}

TEST_CASE("id pragmas become explicit names, annotations attach") {
  BuildResult r = buildOk("array int A[8];\n"
                          "#pragma omp simd\n"
                          "#pragma omp id(outer)\n"
                          "for (int i = 0; i < 8; i += 1) A[i] = 0;\n"
                          "#pragma omp section id(tail)\n"
                          "{ A[0] = 1; }\n");
  const Node &band = *r.tree.root->children[0];
  CHECK(band.name == "outer");
  CHECK(band.nameOrigin == NameOrigin::Explicit);
  REQUIRE(band.annotations.size() == 1);
  CHECK(band.annotations[0].spelling == "simd");
  const Node &sec = *r.tree.root->children[1];
  CHECK(sec.kind == Node::Kind::Section);
  CHECK(sec.name == "tail");
  CHECK(r.pending.empty());
}

TEST_CASE("a stack on one construct applies bottom-up") {
  BuildResult r = buildOk("array int A[8];\n"
                          "#pragma omp unroll factor(2)\n"
                          "#pragma omp reverse\n"
                          "for (int i = 0; i < 8; i += 1) A[i] = i;\n");
  CHECK(pendingKinds(r) ==
        std::vector<std::string>{"reverse", "unroll"});
  CHECK(r.pending[0].anchorId == r.pending[1].anchorId);
  CHECK(r.tree.find(r.pending[0].anchorId)->isBand());
}

TEST_CASE("a run of explicitly-targeted directives keeps textual order") {
  BuildResult r = buildOk(
      "param int n;\narray double C[n][n];\n"
      "#pragma omp loop(i) interchange permutation(j,i)\n"
      "#pragma omp loop(j) stripmine strip_size(4) pit_id(j1) strip_id(j2)\n"
      "#pragma omp unroll factor(2)\n"
      "#pragma omp reverse\n"
      "for (int i = 0; i < n; i += 1)\n"
      "  for (int j = 0; j < n; j += 1)\n"
      "    C[i][j] = 0.0;\n");
  // Bottom-up over the stack, but the targeted pair stays in textual order:
  // reverse, unroll, then interchange, stripmine.
  CHECK(pendingKinds(r) == std::vector<std::string>{"reverse", "unroll",
                                                    "interchange",
                                                    "stripmine"});
}

TEST_CASE("inner constructs apply before outer ones") {
  BuildResult r = buildOk("param int n;\narray int A[n][n];\n"
                          "#pragma omp interchange permutation(j,i)\n"
                          "for (int i = 0; i < n; i += 1) {\n"
                          "  #pragma omp reverse\n"
                          "  for (int j = 0; j < n; j += 1)\n"
                          "    A[i][j] = 1;\n"
                          "}\n");
  CHECK(pendingKinds(r) ==
        std::vector<std::string>{"reverse", "interchange"});
  const Node &bi = *r.tree.root->children[0];
  const Node &bj = *bi.children[0];
  CHECK(r.pending[0].anchorId == bj.id);
  CHECK(r.pending[1].anchorId == bi.id);
}

TEST_CASE("trailing directives trail everything with no anchor") {
  BuildResult r = buildOk("array int A[4];\n"
                          "#pragma omp reverse\n"
                          "for (int i = 0; i < 4; i += 1) A[i] = 0;\n"
                          "#pragma omp loop(i) unroll factor(2)\n");
  REQUIRE(r.pending.size() == 2);
  CHECK(r.pending[0].dir.kind == DirKind::Reverse);
  CHECK(r.pending[1].dir.kind == DirKind::Unroll);
  CHECK(r.pending[1].anchorId == -1);
}

TEST_CASE("id on a statement is rejected") {
  DiagEngine diags;
  Program p = parseProgram("array int A[4];\n"
                           "#pragma omp id(x)\n"
                           "A[0] = 1;\n",
                           "t.ll.c", ParserConfig{}, diags);
  REQUIRE_FALSE(diags.hasErrors());
  (void)buildTree(p, diags);
  REQUIRE(diags.hasErrors());
  CHECK(diags.all()[0].code == DiagCode::InvalidAnchor);
}

TEST_CASE("clone preserves ids, fresh copies do not") {
  BuildResult r = buildOk("array int A[4];\n"
                          "for (int i = 0; i < 4; i += 1) A[i] = 0;\n");
  LoopTree snap = r.tree.clone();
  CHECK(snap.dump() == r.tree.dump());
  CHECK(snap.find(r.tree.root->children[0]->id) != nullptr);

  int next = 100;
  NodePtr fresh = r.tree.root->children[0]->cloneFresh(next);
  CHECK(fresh->id == 100);
  CHECK(next == 102); // band + leaf
}

TEST_CASE("substitution rewrites bounds, subscripts and bindings") {
  BuildResult r = buildOk("param int n;\narray int A[n];\n"
                          "for (int i = 0; i < n; i += 1) A[i] = i + 2;\n");
  Node &band = *r.tree.root->children[0];
  band.substitute("n", AffineExpr(7));
  CHECK(band.ubs[0] == AffineExpr(7));
  Node &leaf = *band.children[0];
  leaf.substitute("i", AffineExpr::sym("i2") * 2);
  CHECK(leaf.subs[0] == AffineExpr::sym("i2") * 2);
  CHECK(leaf.traceBindings[0].second == AffineExpr::sym("i2") * 2);
  CHECK(leaf.rhs->str() == "2 * i2 + 2");
}

TEST_CASE("iteration counts honour steps, minima and emptiness") {
  BuildResult r = buildOk("param int n;\narray int A[100];\n"
                          "for (int i = 3; i < n && i < 50; i += 4) A[i] = 0;\n");
  const Node &band = *r.tree.root->children[0];
  auto with = [&](int64_t n) {
    return iterationCount(band, [=](const std::string &) { return n; });
  };
  CHECK(with(100) == 12); // 3,7,...,47
  CHECK(with(20) == 5);   // 3,7,11,15,19
  CHECK(with(3) == 0);
  CHECK(with(-5) == 0);
}

TEST_CASE("extent expressions require a single bound") {
  BuildResult r = buildOk("param int n;\narray int A[100];\n"
                          "for (int i = 2; i <= n; i += 3) A[0] = 0;\n"
                          "for (int i = 0; i < n && i < 9; i += 1) A[1] = 1;\n");
  auto e0 = extentExpr(*r.tree.root->children[0]);
  REQUIRE(e0.has_value());
  // ceil((n + 1 - 2) / 3) evaluated at a few points.
  for (int64_t n : {2, 3, 4, 5, 11}) {
    int64_t got = e0->evaluate([=](const std::string &) { return n; });
    CHECK(got == (n - 1 + 2) / 3);
  }
  CHECK_FALSE(extentExpr(*r.tree.root->children[1]).has_value());
}

TEST_CASE("dump is stable and shows names, bounds and annotations") {
  BuildResult r = buildOk("param int n;\narray int A[n];\n"
                          "#pragma omp simd\n"
                          "#pragma omp id(outer)\n"
                          "for (int i = 0; i < n; i += 1) {\n"
                          "  if (i < n - 1) A[i] = 1; else A[i] = 2;\n"
                          "}\n");
  CHECK(r.tree.dump() == "seq#0\n"
                         "  band#1 i in [0, n) step 1 name=outer (explicit)\n"
                         "    @ #pragma omp simd\n"
                         "    guard#2 (i < n - 1)\n"
                         "      then:\n"
                         "        leaf#3 s0 A[i] = 1\n"
                         "      else:\n"
                         "        leaf#4 s1 A[i] = 2\n");
}
