//===--- Parser.cpp - LoopLang source and pragma parsing ------------------===//
//
// Part of the looplang project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Hand-written recursive-descent parser for the loop-nest dialect and the
// transformation pragma grammar. Loops must be in the canonical
// `for (int i = lb; i < ub; i += step)` form; every array subscript must be
// affine in the surrounding counters and the declared parameters.
//
//===----------------------------------------------------------------------===//

#include "looplang/Parser.h"

#include <cctype>
#include <cstring>
#include <map>
#include <set>
#include <sstream>

namespace looplang {
namespace {

//===----------------------------------------------------------------------===//
// Lexer
//===----------------------------------------------------------------------===//

struct Token {
  enum class Kind { Ident, Int, Float, Punct, Pragma, Eof };
  Kind kind = Kind::Eof;
  std::string text;    // ident spelling, punct spelling, or raw pragma line
  int64_t intVal = 0;
  double floatVal = 0;
  SourceLoc loc;

  bool is(const char *punct) const {
    return kind == Kind::Punct && text == punct;
  }
  bool isIdent(const char *s) const {
    return kind == Kind::Ident && text == s;
  }
};

class Lexer {
public:
  Lexer(std::string_view src, std::string file, int startLine, int startCol,
        bool pragmaMode, DiagEngine &diags)
      : Src(src), File(std::move(file)), Line(startLine), Col(startCol),
        PragmaMode(pragmaMode), Diags(diags) {}

  std::vector<Token> run();

private:
  std::string_view Src;
  std::string File;
  size_t Pos = 0;
  int Line, Col;
  bool PragmaMode;
  DiagEngine &Diags;
  bool AtLineStart = true;

  SourceLoc here() const { return SourceLoc{File, Line, Col}; }
  char peek(int off = 0) const {
    return Pos + off < Src.size() ? Src[Pos + off] : '\0';
  }
  char bump() {
    char c = Src[Pos++];
    if (c == '\n') {
      ++Line;
      Col = 1;
      AtLineStart = true;
    } else {
      ++Col;
      if (!isspace(static_cast<unsigned char>(c)))
        AtLineStart = false;
    }
    return c;
  }
  Token lexPragmaLine();
};

std::vector<Token> Lexer::run() {
  std::vector<Token> toks;
  while (Pos < Src.size()) {
    char c = peek();
    if (isspace(static_cast<unsigned char>(c))) {
      bump();
      continue;
    }
    if (c == '/' && peek(1) == '/') {
      while (Pos < Src.size() && peek() != '\n')
        bump();
      continue;
    }
    if (c == '/' && peek(1) == '*') {
      SourceLoc start = here();
      bump();
      bump();
      bool closed = false;
      while (Pos < Src.size()) {
        if (peek() == '*' && peek(1) == '/') {
          bump();
          bump();
          closed = true;
          break;
        }
        bump();
      }
      if (!closed)
        Diags.error(DiagCode::SyntaxError, start, "unterminated block comment");
      continue;
    }
    if (c == '#' && !PragmaMode) {
      if (!AtLineStart) {
        Diags.error(DiagCode::SyntaxError, here(),
                    "'#' is only allowed at the start of a pragma line");
        bump();
        continue;
      }
      toks.push_back(lexPragmaLine());
      continue;
    }
    SourceLoc loc = here();
    if (isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string s;
      while (Pos < Src.size() &&
             (isalnum(static_cast<unsigned char>(peek())) || peek() == '_'))
        s += bump();
      Token t;
      t.kind = Token::Kind::Ident;
      t.text = std::move(s);
      t.loc = loc;
      toks.push_back(std::move(t));
      continue;
    }
    if (isdigit(static_cast<unsigned char>(c))) {
      std::string s;
      bool isFloat = false;
      while (Pos < Src.size() &&
             isdigit(static_cast<unsigned char>(peek())))
        s += bump();
      if (peek() == '.' && isdigit(static_cast<unsigned char>(peek(1)))) {
        isFloat = true;
        s += bump();
        while (isdigit(static_cast<unsigned char>(peek())))
          s += bump();
      } else if (peek() == '.' && !(PragmaMode && peek(1) == '.')) {
        isFloat = true;
        s += bump();
      }
      if (peek() == 'e' || peek() == 'E') {
        char sign = peek(1);
        if (isdigit(static_cast<unsigned char>(sign)) ||
            ((sign == '+' || sign == '-') &&
             isdigit(static_cast<unsigned char>(peek(2))))) {
          isFloat = true;
          s += bump(); // e
          if (peek() == '+' || peek() == '-')
            s += bump();
          while (isdigit(static_cast<unsigned char>(peek())))
            s += bump();
        }
      }
      Token t;
      t.loc = loc;
      t.text = s;
      if (isFloat) {
        t.kind = Token::Kind::Float;
        t.floatVal = std::stod(s);
      } else {
        t.kind = Token::Kind::Int;
        try {
          t.intVal = std::stoll(s);
        } catch (const std::out_of_range &) {
          Diags.error(DiagCode::IntegerOverflow, loc,
                      "integer literal '" + s + "' does not fit in 64 bits");
        }
      }
      toks.push_back(std::move(t));
      continue;
    }
    // Punctuation, longest match first.
    static const char *Puncts[] = {"...", "+=", "-=",  "*=", "==", "!=",
                                   "<=",  ">=", "&&",  "(",  ")",  "[",
                                   "]",   "{",  "}",   ";",  ",",  "+",
                                   "-",   "*",  "/",   "%",  "<",  ">",
                                   "=",   "#"};
    bool matched = false;
    for (const char *p : Puncts) {
      size_t n = strlen(p);
      if (Src.compare(Pos, n, p) == 0) {
        if (p[0] == '.' && !PragmaMode)
          break; // "..." only occurs in pragma text
        Token t;
        t.kind = Token::Kind::Punct;
        t.text = p;
        t.loc = loc;
        for (size_t i = 0; i < n; ++i)
          bump();
        toks.push_back(std::move(t));
        matched = true;
        break;
      }
    }
    if (!matched) {
      Diags.error(DiagCode::SyntaxError, loc,
                  std::string("unexpected character '") + c + "'");
      bump();
    }
  }
  Token eof;
  eof.kind = Token::Kind::Eof;
  eof.loc = here();
  toks.push_back(std::move(eof));
  return toks;
}

Token Lexer::lexPragmaLine() {
  Token t;
  t.kind = Token::Kind::Pragma;
  t.loc = here();
  std::string text;
  while (Pos < Src.size() && peek() != '\n') {
    if (peek() == '\\') {
      // Line continuation: splice the next line.
      size_t look = Pos + 1;
      while (look < Src.size() && (Src[look] == ' ' || Src[look] == '\r'))
        ++look;
      if (look < Src.size() && Src[look] == '\n') {
        while (Pos <= look)
          bump();
        text += ' ';
        continue;
      }
    }
    text += bump();
  }
  t.text = std::move(text);
  return t;
}

//===----------------------------------------------------------------------===//
// Directive tables
//===----------------------------------------------------------------------===//

struct KindInfo {
  DirKind kind;
  const char *name;
};

const KindInfo StructuralKinds[] = {
    {DirKind::Stripmine, "stripmine"},
    {DirKind::Block, "block"},
    {DirKind::Tile, "tile"},
    {DirKind::Interchange, "interchange"},
    {DirKind::Coalesce, "coalesce"},
    {DirKind::Concatenate, "concatenate"},
    {DirKind::Distribute, "distribute"},
    {DirKind::Fuse, "fuse"},
    {DirKind::Reorder, "reorder"},
    {DirKind::Reverse, "reverse"},
    {DirKind::Shift, "shift"},
    {DirKind::Scale, "scale"},
    {DirKind::Split, "split"},
    {DirKind::Peel, "peel"},
    {DirKind::Unroll, "unroll"},
    {DirKind::UnrollAndJam, "unrollandjam"},
    {DirKind::AssumeParallel, "assume_parallel"},
    {DirKind::AssumeCoincident, "assume_coincident"},
    {DirKind::AssumeMinDepdist, "assume_min_depdist"},
};

// Directives carried through unchanged. `parallel` also merges with a
// following `for` or `sections` word.
const char *AnnotationNames[] = {
    "simd",          "vectorize",          "target",
    "thread_parallelize", "parallel",      "pack",
    "ifconvert",     "expect_count",       "expect_dead",
    "assume_associative", "assume_commutative", "assume_disjoint_access",
    "assume_nooverflow",  "assume_noalias",     "assume_dereferenceable",
    "assume_unrelated",   "assume_termination",
};

// Recognized from the wider catalog but not implemented by this tool.
const char *UnsupportedNames[] = {"scatter", "curve", "wavefront",
                                  "specialize", "unswitch", "interleave"};

const char *PolicySwitches[] = {"assert", "noassert", "noversioning",
                                "assume_safety", "suggest_only"};

bool isPolicySwitch(const std::string &s) {
  for (const char *p : PolicySwitches)
    if (s == p)
      return true;
  return false;
}

//===----------------------------------------------------------------------===//
// Parser
//===----------------------------------------------------------------------===//

class Parser {
public:
  Parser(std::vector<Token> toks, std::string file, const ParserConfig &config,
         DiagEngine &diags)
      : Toks(std::move(toks)), Config(config), Diags(diags) {
    Prog.file = std::move(file);
    Prog.sentinel = config.sentinel;
  }

  Program run();

  // Directive parsing is shared with the standalone entry point.
  std::optional<Directive> parseDirectiveToks(const std::vector<Token> &toks,
                                              SourceLoc loc, bool &foreign);

private:
  std::vector<Token> Toks;
  size_t Pos = 0;
  const ParserConfig &Config;
  DiagEngine &Diags;
  Program Prog;
  std::vector<std::string> CounterStack;
  int NextStmtId = 0;
  int NextDirSeq = 0;

  const Token &cur() const { return Toks[Pos]; }
  const Token &next(int off = 1) const {
    return Toks[std::min(Pos + off, Toks.size() - 1)];
  }
  Token take() { return Toks[Pos == Toks.size() - 1 ? Pos : Pos++]; }
  bool atEnd() const { return cur().kind == Token::Kind::Eof; }

  bool expect(const char *punct, const char *what);
  bool expectIdent(const char *word, const char *what);

  void parseDecl();
  StmtPtr parseStmt(std::vector<Directive> pragmas);
  /// Single statement in a loop body or branch, allowing leading pragmas that
  /// attach to it (`for (...) #pragma omp id(x) { ... }`).
  StmtPtr parseBodyStmt();
  /// Lexes and parses one pragma token; assigns the textual sequence number.
  /// Returns nullopt for foreign-sentinel (warned) or malformed lines.
  std::optional<Directive> parsePragmaToken(Token p);
  StmtPtr parseFor(std::vector<Directive> pragmas);
  StmtPtr parseIf(std::vector<Directive> pragmas);
  StmtPtr parseBlockOrSplice(std::vector<Directive> pragmas,
                             std::vector<StmtPtr> *spliceInto);
  StmtPtr parseAssign(std::vector<Directive> pragmas);
  void parseStmtList(std::vector<StmtPtr> &into, bool topLevel);

  ExprPtr parseExpr();
  ExprPtr parseAddSub();
  ExprPtr parseMulDiv();
  ExprPtr parsePrimary();
  bool toAffine(const Expr &e, AffineExpr &out, bool report);
  AffineExpr parseAffine(const char *what);
  bool exprIsFloat(const Expr &e);
  void checkAffineScope(const AffineExpr &e, SourceLoc loc, bool paramsOnly,
                        const char *what);

  // Pragma-side helpers (operate on a separate token array).
  struct PCursor {
    const std::vector<Token> *toks;
    size_t pos = 0;
    const Token &cur() const { return (*toks)[pos]; }
    const Token &next() const {
      return (*toks)[std::min(pos + 1, toks->size() - 1)];
    }
    Token take() { return (*toks)[pos == toks->size() - 1 ? pos : pos++]; }
    bool atEnd() const { return cur().kind == Token::Kind::Eof; }
  };
  bool parseNameList(PCursor &c, std::vector<std::string> &out,
                     bool allowEllipsis, const char *what);
  bool parseClauseArgs(PCursor &c, Clause &clause);
  std::optional<AffineExpr> parsePragmaAffine(PCursor &c);
  bool validateDirective(Directive &d);
};

bool Parser::expect(const char *punct, const char *what) {
  if (cur().is(punct)) {
    take();
    return true;
  }
  Diags.error(DiagCode::SyntaxError, cur().loc,
              std::string("expected '") + punct + "' " + what);
  return false;
}

bool Parser::expectIdent(const char *word, const char *what) {
  if (cur().isIdent(word)) {
    take();
    return true;
  }
  Diags.error(DiagCode::SyntaxError, cur().loc,
              std::string("expected '") + word + "' " + what);
  return false;
}

Program Parser::run() {
  // Declarations first, then statements. Pragmas may appear between
  // statements and attach to the next one.
  while (!atEnd() && !Diags.hasErrors()) {
    if (cur().isIdent("param") || cur().isIdent("array")) {
      parseDecl();
      continue;
    }
    break;
  }
  parseStmtList(Prog.items, /*topLevel=*/true);
  Prog.numStatements = NextStmtId;
  return std::move(Prog);
}

void Parser::parseDecl() {
  Token kw = take();
  if (kw.text == "param") {
    if (!expectIdent("int", "after 'param'"))
      return;
    if (cur().kind != Token::Kind::Ident) {
      Diags.error(DiagCode::SyntaxError, cur().loc, "expected parameter name");
      return;
    }
    Token name = take();
    if (Prog.isParam(name.text) || Prog.findArray(name.text)) {
      Diags.error(DiagCode::SyntaxError, name.loc,
                  "redeclaration of '" + name.text + "'");
      return;
    }
    expect(";", "after parameter declaration");
    Prog.params.push_back(ParamDecl{name.text, name.loc});
    return;
  }
  // array <elem> <name> ('[' affine ']')+ ';'
  ElemKind elem;
  if (cur().isIdent("int"))
    elem = ElemKind::Int;
  else if (cur().isIdent("double"))
    elem = ElemKind::Float64;
  else {
    Diags.error(DiagCode::SyntaxError, cur().loc,
                "expected 'int' or 'double' after 'array'");
    return;
  }
  take();
  if (cur().kind != Token::Kind::Ident) {
    Diags.error(DiagCode::SyntaxError, cur().loc, "expected array name");
    return;
  }
  Token name = take();
  if (Prog.isParam(name.text) || Prog.findArray(name.text)) {
    Diags.error(DiagCode::SyntaxError, name.loc,
                "redeclaration of '" + name.text + "'");
    return;
  }
  ArrayDecl decl;
  decl.name = name.text;
  decl.elem = elem;
  decl.loc = name.loc;
  if (!cur().is("[")) {
    Diags.error(DiagCode::SyntaxError, cur().loc,
                "array declaration needs at least one dimension");
    return;
  }
  while (cur().is("[")) {
    take();
    SourceLoc dimLoc = cur().loc;
    AffineExpr dim = parseAffine("array dimension");
    checkAffineScope(dim, dimLoc, /*paramsOnly=*/true, "array dimension");
    decl.dims.push_back(std::move(dim));
    if (!expect("]", "after array dimension"))
      return;
  }
  expect(";", "after array declaration");
  Prog.arrays.push_back(std::move(decl));
}

std::optional<Directive> Parser::parsePragmaToken(Token p) {
  bool foreign = false;
  DiagEngine sub;
  Lexer sub_lexer(p.text, p.loc.file, p.loc.line, p.loc.col,
                  /*pragmaMode=*/true, sub);
  auto toks = sub_lexer.run();
  for (const auto &d : sub.all())
    Diags.report(d.level, d.code, d.loc, d.message);
  auto dir = parseDirectiveToks(toks, p.loc, foreign);
  if (foreign) {
    Diags.warning(DiagCode::None, p.loc,
                  "ignoring pragma with unrecognized sentinel");
    return std::nullopt;
  }
  if (dir)
    dir->seq = NextDirSeq++;
  return dir;
}

StmtPtr Parser::parseBodyStmt() {
  std::vector<Directive> pending;
  while (cur().kind == Token::Kind::Pragma) {
    if (auto dir = parsePragmaToken(take()))
      pending.push_back(std::move(*dir));
  }
  return parseStmt(std::move(pending));
}

void Parser::parseStmtList(std::vector<StmtPtr> &into, bool topLevel) {
  std::vector<Directive> pending;
  while (!atEnd()) {
    if (!topLevel && cur().is("}"))
      break;
    if (cur().kind == Token::Kind::Pragma) {
      if (auto dir = parsePragmaToken(take()))
        pending.push_back(std::move(*dir));
      continue;
    }
    if (cur().isIdent("param") || cur().isIdent("array")) {
      Diags.error(DiagCode::SyntaxError, cur().loc,
                  "declarations must precede all statements");
      return;
    }
    if (Diags.hasErrors())
      return;
    StmtPtr s = parseStmt(std::move(pending));
    pending.clear();
    if (!s)
      return;
    // Splice bare blocks: `{ a; b; }` with no pragma is pure grouping.
    if (s->kind == Stmt::Kind::Block && s->pragmas.empty()) {
      for (auto &child : s->stmts)
        into.push_back(std::move(child));
    } else {
      into.push_back(std::move(s));
    }
  }
  if (!pending.empty()) {
    if (topLevel) {
      for (auto &d : pending)
        Prog.trailing.push_back(std::move(d));
    } else {
      Diags.error(DiagCode::InvalidAnchor, pending.front().loc,
                  "directive does not precede any statement in its block");
    }
  }
}

StmtPtr Parser::parseStmt(std::vector<Directive> pragmas) {
  if (cur().isIdent("for"))
    return parseFor(std::move(pragmas));
  if (cur().isIdent("if"))
    return parseIf(std::move(pragmas));
  if (cur().is("{"))
    return parseBlockOrSplice(std::move(pragmas), nullptr);
  if (cur().kind == Token::Kind::Ident)
    return parseAssign(std::move(pragmas));
  Diags.error(DiagCode::SyntaxError, cur().loc, "expected a statement");
  return nullptr;
}

StmtPtr Parser::parseFor(std::vector<Directive> pragmas) {
  auto s = std::make_unique<Stmt>();
  s->kind = Stmt::Kind::For;
  s->loc = cur().loc;
  s->pragmas = std::move(pragmas);
  take(); // for
  if (!expect("(", "after 'for'"))
    return nullptr;
  if (!cur().isIdent("int")) {
    Diags.error(DiagCode::NonCanonicalLoop, cur().loc,
                "loop counter must be declared 'int' in the loop header");
    return nullptr;
  }
  take();
  if (cur().kind != Token::Kind::Ident) {
    Diags.error(DiagCode::SyntaxError, cur().loc, "expected loop counter name");
    return nullptr;
  }
  Token ctr = take();
  if (std::find(CounterStack.begin(), CounterStack.end(), ctr.text) !=
      CounterStack.end()) {
    Diags.error(DiagCode::NonCanonicalLoop, ctr.loc,
                "loop counter '" + ctr.text +
                    "' shadows an enclosing loop counter");
    return nullptr;
  }
  if (Prog.isParam(ctr.text) || Prog.findArray(ctr.text)) {
    Diags.error(DiagCode::NonCanonicalLoop, ctr.loc,
                "loop counter '" + ctr.text +
                    "' collides with a declared name");
    return nullptr;
  }
  s->counter = ctr.text;
  if (!expect("=", "in loop initialization"))
    return nullptr;
  SourceLoc lbLoc = cur().loc;
  s->lb = parseAffine("loop lower bound");
  checkAffineScope(s->lb, lbLoc, false, "loop lower bound");
  if (!expect(";", "after loop initialization"))
    return nullptr;
  // The counter is in scope from here on; a bound that mentions it is caught
  // below rather than as an undeclared name.
  CounterStack.push_back(s->counter);
  // Condition: `i < e` or `i <= e`, optionally `&&`-combined.
  while (true) {
    if (!cur().isIdent(ctr.text.c_str())) {
      Diags.error(DiagCode::NonCanonicalLoop, cur().loc,
                  "loop condition must compare the counter '" + ctr.text +
                      "'");
      return nullptr;
    }
    take();
    bool inclusive;
    if (cur().is("<"))
      inclusive = false;
    else if (cur().is("<="))
      inclusive = true;
    else {
      Diags.error(DiagCode::NonCanonicalLoop, cur().loc,
                  "loop condition must use '<' or '<='");
      return nullptr;
    }
    take();
    SourceLoc ubLoc = cur().loc;
    AffineExpr ub = parseAffine("loop upper bound");
    checkAffineScope(ub, ubLoc, false, "loop upper bound");
    if (ub.mentions(ctr.text)) {
      Diags.error(DiagCode::NonCanonicalLoop, ubLoc,
                  "loop bound may not reference its own counter");
      return nullptr;
    }
    s->ubs.push_back(inclusive ? ub + 1 : ub);
    if (cur().is("&&")) {
      take();
      continue;
    }
    break;
  }
  if (!expect(";", "after loop condition"))
    return nullptr;
  if (!cur().isIdent(ctr.text.c_str())) {
    Diags.error(DiagCode::NonCanonicalLoop, cur().loc,
                "loop increment must update the counter '" + ctr.text + "'");
    return nullptr;
  }
  take();
  if (!cur().is("+=")) {
    Diags.error(DiagCode::NonCanonicalLoop, cur().loc,
                "loop increment must have the form '" + ctr.text +
                    " += <positive integer>'");
    return nullptr;
  }
  take();
  if (cur().kind != Token::Kind::Int || cur().intVal <= 0) {
    Diags.error(DiagCode::NonCanonicalLoop, cur().loc,
                "loop step must be a positive integer literal");
    return nullptr;
  }
  s->step = take().intVal;
  if (!expect(")", "after loop header"))
    return nullptr;
  s->body = parseBodyStmt();
  CounterStack.pop_back();
  if (!s->body)
    return nullptr;
  return s;
}

StmtPtr Parser::parseIf(std::vector<Directive> pragmas) {
  auto s = std::make_unique<Stmt>();
  s->kind = Stmt::Kind::If;
  s->loc = cur().loc;
  s->pragmas = std::move(pragmas);
  take(); // if
  if (!expect("(", "after 'if'"))
    return nullptr;
  SourceLoc lhsLoc = cur().loc;
  AffineExpr lhs = parseAffine("if condition");
  checkAffineScope(lhs, lhsLoc, false, "if condition");
  CmpOp op;
  if (cur().is("<"))
    op = CmpOp::LT;
  else if (cur().is("<="))
    op = CmpOp::LE;
  else if (cur().is(">"))
    op = CmpOp::GT;
  else if (cur().is(">="))
    op = CmpOp::GE;
  else if (cur().is("=="))
    op = CmpOp::EQ;
  else if (cur().is("!="))
    op = CmpOp::NE;
  else {
    Diags.error(DiagCode::SyntaxError, cur().loc,
                "expected a comparison operator in if condition");
    return nullptr;
  }
  take();
  SourceLoc rhsLoc = cur().loc;
  AffineExpr rhs = parseAffine("if condition");
  checkAffineScope(rhs, rhsLoc, false, "if condition");
  s->cond = AffineCmp{std::move(lhs), op, std::move(rhs)};
  if (!expect(")", "after if condition"))
    return nullptr;
  s->thenStmt = parseBodyStmt();
  if (!s->thenStmt)
    return nullptr;
  if (cur().isIdent("else")) {
    take();
    s->elseStmt = parseBodyStmt();
    if (!s->elseStmt)
      return nullptr;
  }
  return s;
}

StmtPtr Parser::parseBlockOrSplice(std::vector<Directive> pragmas,
                                   std::vector<StmtPtr> *) {
  auto s = std::make_unique<Stmt>();
  s->kind = Stmt::Kind::Block;
  s->loc = cur().loc;
  s->pragmas = std::move(pragmas);
  take(); // {
  parseStmtList(s->stmts, /*topLevel=*/false);
  if (!expect("}", "to close block"))
    return nullptr;
  return s;
}

StmtPtr Parser::parseAssign(std::vector<Directive> pragmas) {
  auto s = std::make_unique<Stmt>();
  s->kind = Stmt::Kind::Assign;
  s->loc = cur().loc;
  s->pragmas = std::move(pragmas);
  Token name = take();
  const ArrayDecl *arr = Prog.findArray(name.text);
  if (!arr) {
    Diags.error(DiagCode::SyntaxError, name.loc,
                "assignment target '" + name.text + "' is not a declared array");
    return nullptr;
  }
  s->array = name.text;
  while (cur().is("[")) {
    take();
    SourceLoc subLoc = cur().loc;
    AffineExpr sub = parseAffine("array subscript");
    checkAffineScope(sub, subLoc, false, "array subscript");
    s->subs.push_back(std::move(sub));
    if (!expect("]", "after subscript"))
      return nullptr;
  }
  if (s->subs.size() != arr->dims.size()) {
    Diags.error(DiagCode::TypeError, name.loc,
                "array '" + name.text + "' has " +
                    std::to_string(arr->dims.size()) + " dimension(s), got " +
                    std::to_string(s->subs.size()) + " subscript(s)");
    return nullptr;
  }
  if (cur().is("="))
    s->op = AssignOp::Assign;
  else if (cur().is("+="))
    s->op = AssignOp::PlusAssign;
  else if (cur().is("-="))
    s->op = AssignOp::MinusAssign;
  else if (cur().is("*="))
    s->op = AssignOp::TimesAssign;
  else {
    Diags.error(DiagCode::SyntaxError, cur().loc,
                "expected an assignment operator");
    return nullptr;
  }
  take();
  s->rhs = parseExpr();
  if (!s->rhs)
    return nullptr;
  if (arr->elem == ElemKind::Int && exprIsFloat(*s->rhs)) {
    Diags.error(DiagCode::TypeError, s->loc,
                "cannot assign a floating-point value to int array '" +
                    name.text + "'");
    return nullptr;
  }
  if (!expect(";", "after assignment"))
    return nullptr;
  s->stmtId = NextStmtId++;
  return s;
}

//===----------------------------------------------------------------------===//
// Expressions
//===----------------------------------------------------------------------===//

ExprPtr Parser::parseExpr() { return parseAddSub(); }

static ExprPtr makeBinary(char op, ExprPtr lhs, ExprPtr rhs, SourceLoc loc,
                          DiagEngine &diags) {
  // Fold affine +/- and scaling immediately so that affine subexpressions
  // stay canonical single nodes.
  if (lhs && rhs && lhs->kind == Expr::Kind::Affine &&
      rhs->kind == Expr::Kind::Affine)
    try {
    const AffineExpr &a = lhs->affine;
    const AffineExpr &b = rhs->affine;
    AffineExpr folded;
    bool ok = true;
    int64_t k;
    switch (op) {
    case '+': folded = a + b; break;
    case '-': folded = a - b; break;
    case '*':
      if (b.getConstant(k))
        folded = a * k;
      else if (a.getConstant(k))
        folded = b * k;
      else
        ok = false;
      break;
    case '/':
      if (b.getConstant(k) && k > 0)
        folded = a.floordivBy(k);
      else
        ok = false;
      break;
    case '%':
      if (b.getConstant(k) && k > 0)
        folded = a.modBy(k);
      else
        ok = false;
      break;
    default: ok = false;
    }
    if (ok) {
      auto e = std::make_unique<Expr>();
      e->kind = Expr::Kind::Affine;
      e->affine = std::move(folded);
      e->loc = loc;
      return e;
    }
  } catch (const OverflowError &) {
    diags.error(DiagCode::IntegerOverflow, loc,
                "integer overflow while folding a constant expression");
    return nullptr;
  }
  auto e = std::make_unique<Expr>();
  e->kind = Expr::Kind::Binary;
  e->binOp = op;
  e->lhs = std::move(lhs);
  e->rhs = std::move(rhs);
  e->loc = loc;
  return e;
}

ExprPtr Parser::parseAddSub() {
  ExprPtr lhs = parseMulDiv();
  if (!lhs)
    return nullptr;
  while (cur().is("+") || cur().is("-")) {
    char op = take().text[0];
    ExprPtr rhs = parseMulDiv();
    if (!rhs)
      return nullptr;
    SourceLoc loc = lhs->loc;
    lhs = makeBinary(op, std::move(lhs), std::move(rhs), loc, Diags);
  }
  return lhs;
}

ExprPtr Parser::parseMulDiv() {
  ExprPtr lhs = parsePrimary();
  if (!lhs)
    return nullptr;
  while (cur().is("*") || cur().is("/") || cur().is("%")) {
    Token opTok = take();
    char op = opTok.text[0];
    ExprPtr rhs = parsePrimary();
    if (!rhs)
      return nullptr;
    bool lf = exprIsFloat(*lhs), rf = exprIsFloat(*rhs);
    if (op == '%' && (lf || rf)) {
      Diags.error(DiagCode::TypeError, opTok.loc,
                  "'%' requires integer operands");
      return nullptr;
    }
    if ((op == '/' || op == '%') && !lf && !rf) {
      // Integer division is only defined by a positive constant; it folds
      // into the affine form (or a floordiv atom) in makeBinary.
      int64_t k;
      if (!(rhs->kind == Expr::Kind::Affine && rhs->affine.getConstant(k) &&
            k > 0)) {
        Diags.error(DiagCode::NonAffineExpression, opTok.loc,
                    "integer '/' and '%' require a positive integer constant "
                    "divisor");
        return nullptr;
      }
    }
    SourceLoc loc = lhs->loc;
    lhs = makeBinary(op, std::move(lhs), std::move(rhs), loc, Diags);
  }
  return lhs;
}

ExprPtr Parser::parsePrimary() {
  SourceLoc loc = cur().loc;
  if (cur().is("(")) {
    take();
    ExprPtr e = parseExpr();
    if (!e)
      return nullptr;
    expect(")", "to close parenthesized expression");
    return e;
  }
  if (cur().is("-")) {
    take();
    ExprPtr e = parsePrimary();
    if (!e)
      return nullptr;
    if (e->kind == Expr::Kind::Affine) {
      e->affine = -e->affine;
      return e;
    }
    if (e->kind == Expr::Kind::FloatLit) {
      e->floatVal = -e->floatVal;
      return e;
    }
    auto zero = std::make_unique<Expr>();
    zero->kind = Expr::Kind::Affine;
    zero->affine = AffineExpr(0);
    zero->loc = loc;
    return makeBinary('-', std::move(zero), std::move(e), loc, Diags);
  }
  if (cur().kind == Token::Kind::Int) {
    auto e = std::make_unique<Expr>();
    e->kind = Expr::Kind::Affine;
    e->affine = AffineExpr(take().intVal);
    e->loc = loc;
    return e;
  }
  if (cur().kind == Token::Kind::Float) {
    auto e = std::make_unique<Expr>();
    e->kind = Expr::Kind::FloatLit;
    e->floatVal = take().floatVal;
    e->loc = loc;
    return e;
  }
  if (cur().kind == Token::Kind::Ident) {
    Token name = take();
    if (const ArrayDecl *arr = Prog.findArray(name.text)) {
      auto e = std::make_unique<Expr>();
      e->kind = Expr::Kind::ArrayRead;
      e->array = name.text;
      e->loc = loc;
      if (!cur().is("[")) {
        Diags.error(DiagCode::SyntaxError, cur().loc,
                    "array '" + name.text + "' requires subscripts");
        return nullptr;
      }
      while (cur().is("[")) {
        take();
        SourceLoc subLoc = cur().loc;
        AffineExpr sub = parseAffine("array subscript");
        checkAffineScope(sub, subLoc, false, "array subscript");
        e->subs.push_back(std::move(sub));
        if (!expect("]", "after subscript"))
          return nullptr;
      }
      if (e->subs.size() != arr->dims.size()) {
        Diags.error(DiagCode::TypeError, loc,
                    "array '" + name.text + "' has " +
                        std::to_string(arr->dims.size()) +
                        " dimension(s), got " + std::to_string(e->subs.size()) +
                        " subscript(s)");
        return nullptr;
      }
      return e;
    }
    bool isCounter = std::find(CounterStack.begin(), CounterStack.end(),
                               name.text) != CounterStack.end();
    if (!isCounter && !Prog.isParam(name.text)) {
      Diags.error(DiagCode::SyntaxError, loc,
                  "undeclared identifier '" + name.text + "'");
      return nullptr;
    }
    auto e = std::make_unique<Expr>();
    e->kind = Expr::Kind::Affine;
    e->affine = AffineExpr::sym(name.text);
    e->loc = loc;
    return e;
  }
  Diags.error(DiagCode::SyntaxError, loc, "expected an expression");
  return nullptr;
}

bool Parser::exprIsFloat(const Expr &e) {
  switch (e.kind) {
  case Expr::Kind::Affine:
    return false;
  case Expr::Kind::FloatLit:
    return true;
  case Expr::Kind::ArrayRead: {
    const ArrayDecl *arr = Prog.findArray(e.array);
    return arr && arr->elem == ElemKind::Float64;
  }
  case Expr::Kind::Binary:
    return exprIsFloat(*e.lhs) || exprIsFloat(*e.rhs);
  }
  return false;
}

AffineExpr Parser::parseAffine(const char *what) {
  ExprPtr e = parseExpr();
  if (!e)
    return AffineExpr(0);
  if (e->kind != Expr::Kind::Affine) {
    Diags.error(DiagCode::NonAffineExpression, e->loc,
                std::string(what) + " must be an affine expression");
    return AffineExpr(0);
  }
  return e->affine;
}

void Parser::checkAffineScope(const AffineExpr &e, SourceLoc loc,
                              bool paramsOnly, const char *what) {
  std::vector<std::string> names;
  e.collectPlainNames(names);
  for (const auto &n : names) {
    bool isCounter = std::find(CounterStack.begin(), CounterStack.end(), n) !=
                     CounterStack.end();
    if (Prog.isParam(n) || (isCounter && !paramsOnly))
      continue;
    Diags.error(DiagCode::SyntaxError, loc,
                std::string(what) + " references " +
                    (isCounter ? "loop counter '" : "unknown name '") + n +
                    (paramsOnly ? "'; only parameters are allowed here"
                                : "' which is not in scope"));
    return;
  }
}

//===----------------------------------------------------------------------===//
// Directive parsing
//===----------------------------------------------------------------------===//

std::optional<AffineExpr> Parser::parsePragmaAffine(PCursor &c) {
  // Restricted affine grammar over free identifiers: used for clause
  // arguments, where names have not been resolved yet.
  std::function<std::optional<AffineExpr>()> addsub, muldiv, primary;
  bool failed = false;
  primary = [&]() -> std::optional<AffineExpr> {
    if (c.cur().is("(")) {
      c.take();
      auto e = addsub();
      if (!e)
        return std::nullopt;
      if (!c.cur().is(")")) {
        failed = true;
        return std::nullopt;
      }
      c.take();
      return e;
    }
    if (c.cur().is("-")) {
      c.take();
      auto e = primary();
      if (!e)
        return std::nullopt;
      return -*e;
    }
    if (c.cur().kind == Token::Kind::Int)
      return AffineExpr(c.take().intVal);
    if (c.cur().kind == Token::Kind::Ident)
      return AffineExpr::sym(c.take().text);
    failed = true;
    return std::nullopt;
  };
  muldiv = [&]() -> std::optional<AffineExpr> {
    auto lhs = primary();
    if (!lhs)
      return std::nullopt;
    while (c.cur().is("*") || c.cur().is("/") || c.cur().is("%")) {
      std::string op = c.take().text;
      auto rhs = primary();
      if (!rhs)
        return std::nullopt;
      int64_t k;
      if (op == "*") {
        if (rhs->getConstant(k))
          lhs = *lhs * k;
        else if (lhs->getConstant(k))
          lhs = *rhs * k;
        else {
          failed = true;
          return std::nullopt;
        }
      } else if (rhs->getConstant(k) && k > 0) {
        lhs = op == "/" ? lhs->floordivBy(k) : lhs->modBy(k);
      } else {
        failed = true;
        return std::nullopt;
      }
    }
    return lhs;
  };
  addsub = [&]() -> std::optional<AffineExpr> {
    auto lhs = muldiv();
    if (!lhs)
      return std::nullopt;
    while (c.cur().is("+") || c.cur().is("-")) {
      bool plus = c.take().text == "+";
      auto rhs = muldiv();
      if (!rhs)
        return std::nullopt;
      lhs = plus ? *lhs + *rhs : *lhs - *rhs;
    }
    return lhs;
  };
  return addsub();
}

bool Parser::parseNameList(PCursor &c, std::vector<std::string> &out,
                           bool allowEllipsis, const char *what) {
  if (!c.cur().is("(")) {
    Diags.error(DiagCode::MalformedClause, c.cur().loc,
                std::string("expected '(' after ") + what);
    return false;
  }
  c.take();
  while (true) {
    if (c.cur().is("...") && allowEllipsis) {
      out.push_back("...");
      c.take();
    } else if (c.cur().kind == Token::Kind::Ident) {
      out.push_back(c.take().text);
    } else {
      Diags.error(DiagCode::MalformedClause, c.cur().loc,
                  std::string("expected a name in ") + what + " list");
      return false;
    }
    if (c.cur().is(",")) {
      c.take();
      continue;
    }
    break;
  }
  if (!c.cur().is(")")) {
    Diags.error(DiagCode::MalformedClause, c.cur().loc,
                std::string("expected ')' to close ") + what + " list");
    return false;
  }
  c.take();
  return true;
}

bool Parser::parseClauseArgs(PCursor &c, Clause &clause) {
  c.take(); // (
  while (true) {
    ClauseArg arg;
    arg.loc = c.cur().loc;
    if (c.cur().is("...")) {
      c.take();
      arg.kind = ClauseArg::Kind::Ellipsis;
    } else if (c.cur().kind == Token::Kind::Ident &&
               (c.next().is(",") || c.next().is(")"))) {
      arg.kind = ClauseArg::Kind::Name;
      arg.name = c.take().text;
    } else {
      auto e = parsePragmaAffine(c);
      if (!e) {
        Diags.error(DiagCode::MalformedClause, arg.loc,
                    "malformed clause argument in '" + clause.key + "'");
        return false;
      }
      CmpOp op;
      bool isCmp = true;
      if (c.cur().is("<"))
        op = CmpOp::LT;
      else if (c.cur().is("<="))
        op = CmpOp::LE;
      else if (c.cur().is(">"))
        op = CmpOp::GT;
      else if (c.cur().is(">="))
        op = CmpOp::GE;
      else if (c.cur().is("=="))
        op = CmpOp::EQ;
      else if (c.cur().is("!="))
        op = CmpOp::NE;
      else
        isCmp = false;
      if (isCmp) {
        c.take();
        auto rhs = parsePragmaAffine(c);
        if (!rhs) {
          Diags.error(DiagCode::MalformedClause, arg.loc,
                      "malformed comparison in clause '" + clause.key + "'");
          return false;
        }
        arg.kind = ClauseArg::Kind::Cmp;
        arg.cmp = AffineCmp{std::move(*e), op, std::move(*rhs)};
      } else {
        arg.kind = ClauseArg::Kind::Expr;
        arg.expr = std::move(*e);
      }
    }
    clause.args.push_back(std::move(arg));
    if (c.cur().is(",")) {
      c.take();
      continue;
    }
    break;
  }
  if (!c.cur().is(")")) {
    Diags.error(DiagCode::MalformedClause, c.cur().loc,
                "expected ')' to close clause '" + clause.key + "'");
    return false;
  }
  c.take();
  return true;
}

std::optional<Directive> Parser::parseDirectiveToks(
    const std::vector<Token> &toks, SourceLoc loc, bool &foreign) {
  foreign = false;
  PCursor c{&toks, 0};
  if (c.cur().is("#"))
    c.take();
  if (!c.cur().isIdent("pragma")) {
    Diags.error(DiagCode::SyntaxError, loc, "expected 'pragma' after '#'");
    return std::nullopt;
  }
  c.take();

  Directive d;
  d.loc = loc;
  bool targetsDone = false;

  // Match the sentinel words. When the final sentinel word is itself `loop`
  // or `section` (the `clang loop` style), a directly attached parenthesis
  // doubles as the target list: `#pragma clang loop(i) unroll`.
  std::istringstream sentinelWords(Config.sentinel);
  std::vector<std::string> words;
  std::string word;
  while (sentinelWords >> word)
    words.push_back(word);
  for (size_t wi = 0; wi < words.size(); ++wi) {
    if (!c.cur().isIdent(words[wi].c_str())) {
      foreign = true;
      return std::nullopt;
    }
    c.take();
    bool last = wi + 1 == words.size();
    if (last && c.cur().is("(") &&
        (words[wi] == "loop" || words[wi] == "section")) {
      d.targetKind = words[wi] == "loop" ? TargetKind::LoopList
                                         : TargetKind::SectionList;
      if (!parseNameList(c, d.targets, words[wi] == "loop", words[wi].c_str()))
        return std::nullopt;
      targetsDone = true;
    }
  }

  // Optional target clause. A bare `section` keyword (no parentheses) is the
  // marker in front of a block-level `id`; it is kept for faithful
  // re-emission.
  bool sectionMarker = false;
  if (targetsDone) {
  } else if (c.cur().isIdent("loop") && c.next().is("(")) {
    c.take();
    d.targetKind = TargetKind::LoopList;
    if (!parseNameList(c, d.targets, /*allowEllipsis=*/true, "loop"))
      return std::nullopt;
  } else if (c.cur().isIdent("section") && c.next().is("(")) {
    c.take();
    d.targetKind = TargetKind::SectionList;
    if (!parseNameList(c, d.targets, /*allowEllipsis=*/false, "section"))
      return std::nullopt;
  } else if (c.cur().isIdent("section")) {
    c.take();
    sectionMarker = true;
  }

  if (c.cur().kind != Token::Kind::Ident) {
    Diags.error(DiagCode::SyntaxError, c.cur().loc.valid() ? c.cur().loc : loc,
                "expected a transformation name");
    return std::nullopt;
  }
  Token kindTok = c.take();
  std::string kindName = kindTok.text;

  if (kindName == "strip_mine")
    kindName = "stripmine"; // tolerated alternate spelling

  if (kindName == "id") {
    d.kind = DirKind::Id;
    d.spelling = sectionMarker ? "section id" : "id";
    std::vector<std::string> names;
    if (!parseNameList(c, names, false, "id"))
      return std::nullopt;
    if (names.size() != 1) {
      Diags.error(DiagCode::MalformedClause, kindTok.loc,
                  "id takes exactly one name");
      return std::nullopt;
    }
    d.targets = std::move(names);
    if (!c.atEnd()) {
      Diags.error(DiagCode::MalformedClause, c.cur().loc,
                  "unexpected tokens after id(...)");
      return std::nullopt;
    }
    return d;
  }

  bool known = false;
  for (const auto &info : StructuralKinds) {
    if (kindName == info.name) {
      d.kind = info.kind;
      d.spelling = info.name;
      known = true;
      break;
    }
  }
  if (!known && kindName == "strip_width") {
    // Not a kind; fallthrough to the unknown case below.
  }
  if (!known) {
    for (const char *a : AnnotationNames) {
      if (kindName == a) {
        d.kind = DirKind::Annotation;
        d.spelling = kindName;
        known = true;
        break;
      }
    }
    if (known && kindName == "parallel" &&
        (c.cur().isIdent("for") || c.cur().isIdent("sections")))
      d.spelling = "parallel " + c.take().text;
  }
  if (!known) {
    for (const char *u : UnsupportedNames) {
      if (kindName == u) {
        Diags.error(DiagCode::UnknownTransformation, kindTok.loc,
                    "transformation '" + kindName +
                        "' is not supported by this tool");
        return std::nullopt;
      }
    }
    Diags.error(DiagCode::UnknownTransformation, kindTok.loc,
                "unknown transformation '" + kindName + "'");
    return std::nullopt;
  }

  // Clauses and switches.
  while (!c.atEnd()) {
    if (c.cur().kind != Token::Kind::Ident) {
      Diags.error(DiagCode::MalformedClause, c.cur().loc,
                  "expected a clause name");
      return std::nullopt;
    }
    Token key = c.take();
    if (isPolicySwitch(key.text)) {
      if (key.text == "assert") {
        d.assertive = true;
        d.assertSeen = true;
      } else if (key.text == "noassert") {
        d.noassertSeen = true;
      } else if (key.text == "noversioning") {
        d.noversioning = true;
      } else if (key.text == "assume_safety") {
        d.assumeSafety = true;
      } else {
        d.suggestOnly = true;
      }
      continue;
    }
    Clause clause;
    clause.key = key.text;
    clause.loc = key.loc;
    if (clause.key == "strip_width")
      clause.key = "strip_size"; // normalize the paper's alternate name
    if (c.cur().is("(")) {
      if (!parseClauseArgs(c, clause))
        return std::nullopt;
    } else {
      clause.isSwitch = true;
    }
    for (const auto &existing : d.clauses) {
      if (existing.key == clause.key) {
        Diags.error(DiagCode::MalformedClause, key.loc,
                    "duplicate clause '" + clause.key + "'");
        return std::nullopt;
      }
    }
    d.clauses.push_back(std::move(clause));
  }

  if (d.assertSeen && d.noassertSeen) {
    Diags.error(DiagCode::MalformedClause, loc,
                "'assert' and 'noassert' are mutually exclusive");
    return std::nullopt;
  }
  if (!validateDirective(d))
    return std::nullopt;
  return d;
}

/// Per-kind clause validation: rejects unknown clause keys and malformed
/// arguments early so apply time only sees well-formed plans.
bool Parser::validateDirective(Directive &d) {
  auto err = [&](SourceLoc loc, const std::string &msg) {
    Diags.error(DiagCode::MalformedClause, loc.valid() ? loc : d.loc, msg);
    return false;
  };
  auto intArg = [&](const Clause &c, size_t idx, int64_t &out) {
    if (idx >= c.args.size() || c.args[idx].kind != ClauseArg::Kind::Expr ||
        !c.args[idx].expr.getConstant(out))
      return false;
    return true;
  };

  if (d.kind == DirKind::Annotation)
    return true; // annotations carry arbitrary clauses

  static const std::map<DirKind, std::set<std::string>> Allowed = {
      {DirKind::Stripmine, {"strip_size", "pit_id", "strip_id"}},
      {DirKind::Block, {"pit_size", "pit_id", "strip_id"}},
      {DirKind::Tile, {"sizes", "pit_ids", "tile_ids"}},
      {DirKind::Interchange, {"permutation"}},
      {DirKind::Coalesce, {"coalesced_id"}},
      {DirKind::Concatenate, {"concatenated_id"}},
      {DirKind::Distribute, {"sections", "distributed_ids"}},
      {DirKind::Fuse, {"fused_id"}},
      {DirKind::Reorder, {}},
      {DirKind::Reverse, {}},
      {DirKind::Shift, {"offset"}},
      {DirKind::Scale, {"factor"}},
      {DirKind::Split, {"indices", "split_ids"}},
      {DirKind::Peel, {"count", "split_ids", "begin", "end"}},
      {DirKind::Unroll, {"factor", "full", "unrolled_id", "remainder_id"}},
      {DirKind::UnrollAndJam, {"factor"}},
      {DirKind::AssumeParallel, {}},
      {DirKind::AssumeCoincident, {}},
      {DirKind::AssumeMinDepdist, {"distance"}},
  };
  const auto &allowed = Allowed.at(d.kind);
  for (const auto &c : d.clauses) {
    if (!allowed.count(c.key))
      return err(c.loc, "clause '" + c.key + "' is not valid for '" +
                            d.spelling + "'");
  }

  auto requirePositiveInt = [&](const char *key, int64_t minV) {
    const Clause *c = d.findClause(key);
    if (!c)
      return true;
    int64_t v;
    if (c->args.size() != 1 || !intArg(*c, 0, v))
      return err(c->loc, std::string(key) + " requires one integer argument");
    if (v < minV)
      return err(c->loc, std::string(key) + "(" + std::to_string(v) +
                             ") must be at least " + std::to_string(minV));
    return true;
  };

  switch (d.kind) {
  case DirKind::Stripmine:
    if (!d.findClause("strip_size"))
      return err(d.loc, "stripmine requires a strip_size clause");
    return requirePositiveInt("strip_size", 1);
  case DirKind::Block:
    if (!d.findClause("pit_size"))
      return err(d.loc, "block requires a pit_size clause");
    return requirePositiveInt("pit_size", 1);
  case DirKind::Tile: {
    const Clause *sizes = d.findClause("sizes");
    if (!sizes)
      return err(d.loc, "tile requires a sizes clause");
    for (size_t i = 0; i < sizes->args.size(); ++i) {
      int64_t v;
      if (!intArg(*sizes, i, v) || v < 1)
        return err(sizes->loc, "sizes entries must be positive integers");
    }
    return true;
  }
  case DirKind::Interchange:
    if (!d.findClause("permutation"))
      return err(d.loc, "interchange requires a permutation clause");
    return true;
  case DirKind::Scale:
    if (!d.findClause("factor"))
      return err(d.loc, "scale requires a factor clause");
    return requirePositiveInt("factor", 1);
  case DirKind::Shift:
    if (!d.findClause("offset"))
      return err(d.loc, "shift requires an offset clause");
    return true;
  case DirKind::Split: {
    const Clause *idx = d.findClause("indices");
    if (!idx)
      return err(d.loc, "split requires an indices clause");
    if (idx->args.size() != 1 || idx->args[0].kind != ClauseArg::Kind::Cmp)
      return err(idx->loc, "indices requires a single affine comparison");
    return true;
  }
  case DirKind::Peel: {
    if (!d.findClause("count"))
      return err(d.loc, "peel requires a count clause");
    if (!requirePositiveInt("count", 0))
      return false;
    bool begin = d.hasSwitch("begin"), end = d.hasSwitch("end");
    if (begin && end)
      return err(d.loc, "peel accepts only one of 'begin' or 'end'");
    return true;
  }
  case DirKind::Unroll: {
    bool full = d.hasSwitch("full");
    const Clause *f = d.findClause("factor");
    if (full && f)
      return err(d.loc, "unroll accepts either factor(...) or 'full'");
    if (!full && !f)
      return err(d.loc, "unroll requires factor(...) or 'full'");
    return requirePositiveInt("factor", 1);
  }
  case DirKind::UnrollAndJam:
    if (!d.findClause("factor"))
      return err(d.loc, "unrollandjam requires a factor clause");
    return requirePositiveInt("factor", 2);
  case DirKind::AssumeMinDepdist:
    if (!d.findClause("distance"))
      return err(d.loc, "assume_min_depdist requires a distance clause");
    return requirePositiveInt("distance", 1);
  default:
    return true;
  }
}

} // namespace

Program parseProgram(std::string_view source, std::string file,
                     const ParserConfig &config, DiagEngine &diags) {
  Lexer lexer(source, file, 1, 1, /*pragmaMode=*/false, diags);
  auto toks = lexer.run();
  Parser p(std::move(toks), file, config, diags);
  return p.run();
}

std::optional<Directive> parseDirective(std::string_view text, SourceLoc loc,
                                        const ParserConfig &config,
                                        DiagEngine &diags) {
  if (!loc.valid())
    loc = SourceLoc{"<directive>", 1, 1};
  Lexer lexer(text, loc.file, loc.line, loc.col, /*pragmaMode=*/true, diags);
  auto toks = lexer.run();
  Parser p({}, loc.file, config, diags);
  bool foreign = false;
  auto d = p.parseDirectiveToks(toks, loc, foreign);
  if (foreign)
    return std::nullopt;
  return d;
}

} // namespace looplang
