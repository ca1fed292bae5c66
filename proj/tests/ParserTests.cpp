//===--- ParserTests.cpp ----------------------------------------------------===//
//
// Part of the looplang project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "looplang/Parser.h"

#include <string>

using namespace looplang;

namespace {

Program parseOk(const std::string &src, const std::string &sentinel = "omp") {
  DiagEngine diags;
  ParserConfig cfg;
  cfg.sentinel = sentinel;
  Program p = parseProgram(src, "test.ll.c", cfg, diags);
  INFO(diags.renderAll());
  REQUIRE_FALSE(diags.hasErrors());
  return p;
}

/// First error code produced for a source snippet.
DiagCode firstError(const std::string &src) {
  DiagEngine diags;
  (void)parseProgram(src, "test.ll.c", ParserConfig{}, diags);
  for (const auto &d : diags.all())
    if (d.level == DiagLevel::Error)
      return d.code;
  return DiagCode::None;
}

Directive dir(const std::string &line, const std::string &sentinel = "omp") {
  DiagEngine diags;
  ParserConfig cfg;
  cfg.sentinel = sentinel;
  auto d = parseDirective(line, SourceLoc{"test.ll.c", 1, 1}, cfg, diags);
  INFO(diags.renderAll());
  REQUIRE(d.has_value());
  REQUIRE_FALSE(diags.hasErrors());
  return *d;
}

DiagCode dirError(const std::string &line) {
  DiagEngine diags;
  (void)parseDirective(line, SourceLoc{"test.ll.c", 1, 1}, ParserConfig{},
                       diags);
  for (const auto &d : diags.all())
    if (d.level == DiagLevel::Error)
      return d.code;
  return DiagCode::None;
}

} // namespace

//===----------------------------------------------------------------------===//
// Declarations and statements
//===----------------------------------------------------------------------===//

TEST_CASE("declarations, loops and assignments parse") {
  Program p = parseOk("param int n;\n"
                      "array double A[n][n];\n"
                      "array int T[100];\n"
                      "for (int i = 0; i < n; i += 1)\n"
                      "  A[i][0] = 1.5;\n"
                      "T[0] = 42;\n");
  CHECK(p.params.size() == 1);
  CHECK(p.arrays.size() == 2);
  CHECK(p.arrays[0].elem == ElemKind::Float64);
  CHECK(p.arrays[0].dims.size() == 2);
  CHECK(p.items.size() == 2);
  CHECK(p.numStatements == 2);

  const Stmt &loop = *p.items[0];
  CHECK(loop.kind == Stmt::Kind::For);
  CHECK(loop.counter == "i");
  CHECK(loop.step == 1);
  CHECK(loop.ubs.size() == 1);
  CHECK(loop.ubs[0] == AffineExpr::sym("n"));
  CHECK(loop.body->kind == Stmt::Kind::Assign);
  CHECK(loop.body->stmtId == 0);
  CHECK(p.items[1]->stmtId == 1);
}

TEST_CASE("inclusive bounds and conjunctions become exclusive min bounds") {
  Program p = parseOk("param int n;\narray int A[n];\n"
                      "for (int i = 2; i <= n - 1 && i < 50; i += 3)\n"
                      "  A[i] = i;\n");
  const Stmt &loop = *p.items[0];
  CHECK(loop.step == 3);
  REQUIRE(loop.ubs.size() == 2);
  CHECK(loop.ubs[0] == AffineExpr::sym("n")); // (n - 1) + 1
  CHECK(loop.ubs[1] == AffineExpr(50));
}

TEST_CASE("non-canonical loops are rejected") {
  std::string pre = "param int n;\narray int A[n];\n";
  CHECK(firstError(pre + "for (int i = 0; i > n; i += 1) A[i] = 0;\n") ==
        DiagCode::NonCanonicalLoop);
  CHECK(firstError(pre + "for (int i = 0; i < n; i += 0) A[i] = 0;\n") ==
        DiagCode::NonCanonicalLoop);
  CHECK(firstError(pre + "for (int i = 0; i + i < n; i += 1) A[i] = 0;\n") ==
        DiagCode::NonCanonicalLoop);
  // Counter may not appear in its own bound expression's right side.
  CHECK(firstError(pre + "for (int i = 0; i < i + 1; i += 1) A[i] = 0;\n") ==
        DiagCode::NonCanonicalLoop);
  // Shadowing an enclosing counter.
  CHECK(firstError(pre + "for (int i = 0; i < n; i += 1)\n"
                         "  for (int i = 0; i < n; i += 1) A[i] = 0;\n") ==
        DiagCode::NonCanonicalLoop);
}

TEST_CASE("affine violations carry the right code") {
  std::string pre = "param int n;\narray int A[100];\narray int B[100];\n";
  CHECK(firstError(pre + "for (int i = 0; i < n * n; i += 1) A[i] = 0;\n") ==
        DiagCode::NonAffineExpression);
  CHECK(firstError(pre + "A[B[0]] = 1;\n") == DiagCode::NonAffineExpression);
  CHECK(firstError(pre + "A[0] = 1 / 0;\n") == DiagCode::NonAffineExpression);
}

TEST_CASE("type errors") {
  std::string pre = "param int n;\narray int A[100];\narray double D[100];\n";
  CHECK(firstError(pre + "A[0] = 1.5;\n") == DiagCode::TypeError);
  CHECK(firstError(pre + "A[0] = D[3];\n") == DiagCode::TypeError);
  CHECK(firstError(pre + "A[D[0]] = 1;\n") == DiagCode::NonAffineExpression);
  // Float is fine on a double array, and int promotes.
  parseOk(pre + "D[0] = 1.5;\nD[1] = n;\nD[2] = D[0] * 2 + 0.5;\n");
}

TEST_CASE("scope and declaration errors") {
  CHECK(firstError("array int A[100];\nA[j] = 0;\n") == DiagCode::SyntaxError);
  CHECK(firstError("param int n;\nparam int n;\narray int A[1];\nA[0]=0;\n") ==
        DiagCode::SyntaxError);
  CHECK(firstError("B[0] = 1;\n") == DiagCode::SyntaxError);
  CHECK(firstError("array int A[2][2];\nA[0] = 1;\n") == DiagCode::TypeError);
}

TEST_CASE("if statements parse as guards with affine conditions") {
  Program p = parseOk("param int n;\narray int A[n];\n"
                      "for (int i = 0; i < n; i += 1) {\n"
                      "  if (i < n - 1) A[i] = 1; else A[i] = 2;\n"
                      "}\n");
  const Stmt &loop = *p.items[0];
  REQUIRE(loop.body->kind == Stmt::Kind::Block);
  const Stmt &ifs = *loop.body->stmts[0];
  CHECK(ifs.kind == Stmt::Kind::If);
  CHECK(ifs.cond.op == CmpOp::LT);
  CHECK(ifs.thenStmt->kind == Stmt::Kind::Assign);
  REQUIRE(ifs.elseStmt);
  CHECK(ifs.elseStmt->kind == Stmt::Kind::Assign);
}

//===----------------------------------------------------------------------===//
// Pragma handling in programs
//===----------------------------------------------------------------------===//

TEST_CASE("pragmas attach to the following statement in textual order") {
  Program p = parseOk("array int A[8];\n"
                      "#pragma omp unroll factor(2)\n"
                      "#pragma omp reverse\n"
                      "for (int i = 0; i < 8; i += 1)\n"
                      "  A[i] = i;\n");
  const Stmt &loop = *p.items[0];
  REQUIRE(loop.pragmas.size() == 2);
  CHECK(loop.pragmas[0].kind == DirKind::Unroll);
  CHECK(loop.pragmas[1].kind == DirKind::Reverse);
  CHECK(loop.pragmas[0].seq < loop.pragmas[1].seq);
}

TEST_CASE("foreign sentinels are ignored with a warning") {
  DiagEngine diags;
  Program p = parseProgram("array int A[4];\n"
                           "#pragma gcc ivdep\n"
                           "for (int i = 0; i < 4; i += 1) A[i] = 0;\n",
                           "t.ll.c", ParserConfig{}, diags);
  CHECK_FALSE(diags.hasErrors());
  REQUIRE(p.items.size() == 1);
  CHECK(p.items[0]->pragmas.empty());
  bool warned = false;
  for (const auto &d : diags.all())
    warned |= d.level == DiagLevel::Warning;
  CHECK(warned);
}

TEST_CASE("trailing directives are kept at top level and rejected in blocks") {
  Program p = parseOk("array int A[4];\n"
                      "for (int i = 0; i < 4; i += 1) A[i] = 0;\n"
                      "#pragma omp interchange permutation(i,j)\n");
  REQUIRE(p.trailing.size() == 1);
  CHECK(p.trailing[0].kind == DirKind::Interchange);

  CHECK(firstError("array int A[4];\n"
                   "for (int i = 0; i < 4; i += 1) {\n"
                   "  A[i] = 0;\n"
                   "  #pragma omp reverse\n"
                   "}\n") == DiagCode::InvalidAnchor);
}

TEST_CASE("multi-word sentinel with hybrid loop-target form") {
  Program p = parseOk("array int A[8];\n"
                      "#pragma clang loop(i) unroll factor(4)\n"
                      "#pragma clang loop vectorize\n"
                      "for (int i = 0; i < 8; i += 1) A[i] = 0;\n",
                      "clang loop");
  const Stmt &loop = *p.items[0];
  REQUIRE(loop.pragmas.size() == 2);
  CHECK(loop.pragmas[0].kind == DirKind::Unroll);
  CHECK(loop.pragmas[0].targetKind == TargetKind::LoopList);
  REQUIRE(loop.pragmas[0].targets.size() == 1);
  CHECK(loop.pragmas[0].targets[0] == "i");
  CHECK(loop.pragmas[1].kind == DirKind::Annotation);
  CHECK(loop.pragmas[1].spelling == "vectorize");
}

//===----------------------------------------------------------------------===//
// Directive grammar
//===----------------------------------------------------------------------===//

TEST_CASE("id directives") {
  Directive d = dir("#pragma omp id(outer)");
  CHECK(d.kind == DirKind::Id);
  REQUIRE(d.targets.size() == 1);
  CHECK(d.targets[0] == "outer");
  CHECK(d.str("omp") == "#pragma omp id(outer)");

  Directive s = dir("#pragma omp section id(accumulate)");
  CHECK(s.kind == DirKind::Id);
  CHECK(s.spelling == "section id");
  CHECK(s.targets[0] == "accumulate");
  CHECK(s.str("omp") == "#pragma omp section id(accumulate)");
}

TEST_CASE("structural directives with targets and clauses") {
  Directive d =
      dir("#pragma omp loop(i,j) tile sizes(2,3) pit_ids(i1,j1) tile_ids(i2,j2)");
  CHECK(d.kind == DirKind::Tile);
  CHECK(d.targetKind == TargetKind::LoopList);
  CHECK(d.targets == std::vector<std::string>{"i", "j"});
  REQUIRE(d.findClause("sizes"));
  CHECK(d.findClause("sizes")->args.size() == 2);
  CHECK(d.findClause("sizes")->args[0].expr == AffineExpr(2));
  REQUIRE(d.findClause("pit_ids"));
  CHECK(d.findClause("pit_ids")->args[1].name == "j1");

  Directive r = dir("#pragma omp section(a,b) reorder");
  CHECK(r.kind == DirKind::Reorder);
  CHECK(r.targetKind == TargetKind::SectionList);

  Directive sp = dir("#pragma omp split indices(i > n/2) split_ids(lo,hi)");
  CHECK(sp.kind == DirKind::Split);
  REQUIRE(sp.findClause("indices"));
  CHECK(sp.findClause("indices")->args[0].kind == ClauseArg::Kind::Cmp);
}

TEST_CASE("ellipsis ranges survive in loop lists") {
  Directive d = dir("#pragma omp loop(i1,...,j2) interchange permutation(j1,i1)");
  REQUIRE(d.targets.size() == 3);
  CHECK(d.targets[1] == "...");
}

TEST_CASE("aliases and merged spellings") {
  CHECK(dir("#pragma omp strip_mine strip_size(4)").kind == DirKind::Stripmine);
  Directive pf = dir("#pragma omp parallel for");
  CHECK(pf.kind == DirKind::Annotation);
  CHECK(pf.spelling == "parallel for");
  CHECK(dir("#pragma omp unrollandjam factor(2)").kind ==
        DirKind::UnrollAndJam);
}

TEST_CASE("policy switches") {
  Directive d = dir("#pragma omp reverse assert noversioning");
  CHECK(d.assertive);
  CHECK(d.noversioning);
  Directive e = dir("#pragma omp fuse assume_safety suggest_only");
  CHECK(e.assumeSafety);
  CHECK(e.suggestOnly);
  CHECK_FALSE(e.assertive);
  CHECK(dirError("#pragma omp reverse assert noassert") ==
        DiagCode::MalformedClause);
}

TEST_CASE("assume directives parse with their facts") {
  Directive d = dir("#pragma omp loop(i) assume_min_depdist distance(4)");
  CHECK(d.kind == DirKind::AssumeMinDepdist);
  REQUIRE(d.findClause("distance"));
  CHECK(d.findClause("distance")->args[0].expr == AffineExpr(4));
  CHECK(dir("#pragma omp assume_parallel").kind == DirKind::AssumeParallel);
}

TEST_CASE("unknown transformations are rejected, annotations pass through") {
  CHECK(dirError("#pragma omp wavefront") == DiagCode::UnknownTransformation);
  CHECK(dirError("#pragma omp unswitch") == DiagCode::UnknownTransformation);
  CHECK(dirError("#pragma omp frobnicate") == DiagCode::UnknownTransformation);
  Directive d = dir("#pragma omp expect_count min(4) avg(128)");
  CHECK(d.kind == DirKind::Annotation);
  Directive s = dir("#pragma omp simd");
  CHECK(s.kind == DirKind::Annotation);
}

TEST_CASE("clause validation catches malformed input") {
  CHECK(dirError("#pragma omp stripmine") == DiagCode::MalformedClause);
  CHECK(dirError("#pragma omp stripmine strip_size(0)") ==
        DiagCode::MalformedClause);
  CHECK(dirError("#pragma omp unroll factor(2) full") ==
        DiagCode::MalformedClause);
  CHECK(dirError("#pragma omp interchange") == DiagCode::MalformedClause);
  CHECK(dirError("#pragma omp tile sizes(2) sizes(3)") ==
        DiagCode::MalformedClause);
  CHECK(dirError("#pragma omp peel count(2) begin end") ==
        DiagCode::MalformedClause);
  CHECK(dirError("#pragma omp shift") == DiagCode::MalformedClause);
  CHECK(dirError("#pragma omp scale factor(0)") == DiagCode::MalformedClause);
  CHECK(dirError("#pragma omp unrollandjam factor(1)") ==
        DiagCode::MalformedClause);
  CHECK(dirError("#pragma omp stripmine strip_size(2) bogus(1)") ==
        DiagCode::MalformedClause);
}

TEST_CASE("directive round-trips through its printed form") {
  for (const char *line : {
           "#pragma omp id(outer)",
           "#pragma omp loop(i,j) tile sizes(2,3) pit_ids(i1,j1)",
           "#pragma omp stripmine strip_size(4) pit_id(outer) strip_id(inner)",
           "#pragma omp split indices(i > n / 2) split_ids(head,tail)",
           "#pragma omp reverse assert",
           "#pragma omp parallel for",
           "#pragma omp expect_count min(4)",
           "#pragma omp loop(top) assume_min_depdist distance(8)",
       }) {
    Directive d = dir(line);
    CHECK(d.str("omp") == line);
    Directive d2 = dir(d.str("omp"));
    CHECK(d2.str("omp") == line);
  }
}

TEST_CASE("comments and continuations are handled") {
  Program p = parseOk("array int A[4]; // trailing comment\n"
                      "/* block\n   comment */\n"
                      "#pragma omp unroll \\\n  factor(2)\n"
                      "for (int i = 0; i < 4; i += 1) A[i] = 0;\n");
  REQUIRE(p.items.size() == 1);
  REQUIRE(p.items[0]->pragmas.size() == 1);
  REQUIRE(p.items[0]->pragmas[0].findClause("factor"));
}
