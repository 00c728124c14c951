#include "dcbpv/parser.hpp"

#include <cctype>
#include <map>
#include <set>

namespace dcbpv {

namespace ast {
NodePtr mk(K kind, Pos pos) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->pos = pos;
  return n;
}
}  // namespace ast

namespace {

using ast::K;
using ast::Node;
using ast::NodePtr;

// ---------------------------------------------------------------------------
// Lexer

enum class Tok {
  Ident,
  Number,
  String,
  Keyword,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  LParen,
  RParen,
  Lt,
  Gt,
  Comma,
  Dot,
  Colon,
  Semi,
  Equals,
  Bar,
  Slash,
  Quote,
  Lambda,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t number = 0;
  Pos pos;
};

const std::set<std::string> kKeywords = {
    "thunk", "force", "return", "to",     "in",     "let",    "pm",
    "as",    "proj",  "tuple",  "diverge", "error",  "mu",     "print",
    "choose", "write", "read",  "effects", "state",  "init",   "errors",
    "val",   "comp",  "vtype",  "ctype",  "surface", "U",      "F",
    "Pi",    "Sg",    "Id",     "Sum",    "Prod",   "refl",   "inj",
};

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto pos = [&]() { return Pos{line, col}; };
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (i < src.size() && src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Pos p = pos();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) ||
                                src[j] == '_'))
        ++j;
      std::string word = src.substr(i, j - i);
      advance(j - i);
      out.push_back({kKeywords.count(word) ? Tok::Keyword : Tok::Ident,
                     std::move(word), 0, p});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i, n = 0;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
        n = n * 10 + static_cast<std::size_t>(src[j] - '0');
        ++j;
      }
      std::string word = src.substr(i, j - i);
      advance(j - i);
      out.push_back({Tok::Number, std::move(word), n, p});
      continue;
    }
    if (c == '"') {
      std::string s;
      advance(1);
      while (i < src.size() && src[i] != '"') {
        if (src[i] == '\\' && i + 1 < src.size()) {
          advance(1);
          char e = src[i];
          s += (e == 'n' ? '\n' : e);
          advance(1);
        } else {
          s += src[i];
          advance(1);
        }
      }
      if (i >= src.size()) throw SyntaxError(p, "closing '\"'", "end of input");
      advance(1);
      out.push_back({Tok::String, std::move(s), 0, p});
      continue;
    }
    auto punct = [&](Tok k) {
      out.push_back({k, std::string(1, c), 0, p});
      advance(1);
    };
    switch (c) {
      case '{': punct(Tok::LBrace); break;
      case '}': punct(Tok::RBrace); break;
      case '[': punct(Tok::LBracket); break;
      case ']': punct(Tok::RBracket); break;
      case '(': punct(Tok::LParen); break;
      case ')': punct(Tok::RParen); break;
      case '<': punct(Tok::Lt); break;
      case '>': punct(Tok::Gt); break;
      case ',': punct(Tok::Comma); break;
      case '.': punct(Tok::Dot); break;
      case ':': punct(Tok::Colon); break;
      case ';': punct(Tok::Semi); break;
      case '=': punct(Tok::Equals); break;
      case '|': punct(Tok::Bar); break;
      case '/': punct(Tok::Slash); break;
      case '\'': punct(Tok::Quote); break;
      case '\\': punct(Tok::Lambda); break;
      default:
        throw SyntaxError(p, "a token", std::string("'") + c + "'");
    }
  }
  out.push_back({Tok::End, "", 0, pos()});
  return out;
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(std::string src) : toks_(lex(src)) {}

  SourceProgram program() {
    SourceProgram p;
    if (at_kw("effects")) {
      p.signature = header();
      p.had_header = true;
    }
    while (!at(Tok::End)) p.definitions.push_back(definition());
    return p;
  }

  NodePtr entry_comp() { return finish(parse_comp()); }
  NodePtr entry_value() { return finish(parse_value()); }
  NodePtr entry_vtype() { return finish(parse_vtype()); }
  NodePtr entry_ctype() { return finish(parse_ctype()); }

 private:
  std::vector<Token> toks_;
  std::size_t at_ = 0;

  NodePtr finish(NodePtr n) {
    expect(Tok::End, "end of input");
    return n;
  }

  const Token& cur() const { return toks_[at_]; }
  bool at(Tok k) const { return cur().kind == k; }
  bool at_kw(const std::string& w) const {
    return cur().kind == Tok::Keyword && cur().text == w;
  }
  std::string describe(const Token& t) const {
    if (t.kind == Tok::End) return "end of input";
    return "'" + t.text + "'";
  }
  Token take() { return toks_[at_++]; }
  Token expect(Tok k, const std::string& what) {
    if (!at(k)) throw SyntaxError(cur().pos, what, describe(cur()));
    return take();
  }
  void expect_kw(const std::string& w) {
    if (!at_kw(w)) throw SyntaxError(cur().pos, "'" + w + "'", describe(cur()));
    take();
  }
  std::string ident() {
    if (!at(Tok::Ident))
      throw SyntaxError(cur().pos, "an identifier", describe(cur()));
    return take().text;
  }
  std::size_t number() {
    if (!at(Tok::Number))
      throw SyntaxError(cur().pos, "a number", describe(cur()));
    return take().number;
  }

  // ---- effects header

  EffectSignature header() {
    expect_kw("effects");
    expect(Tok::LBrace, "'{'");
    EffectSignature sig;
    bool first = true;
    while (!at(Tok::RBrace)) {
      if (!first) {
        expect(Tok::Semi, "';'");
        if (at(Tok::RBrace)) break;
      }
      first = false;
      Pos p = cur().pos;
      if (at_kw("print")) {
        take();
        sig.print = true;
        expect(Tok::LBracket, "'['");
        while (!at(Tok::RBracket)) {
          sig.alphabet.push_back(expect(Tok::String, "a string").text);
          if (at(Tok::Comma)) take();
        }
        take();
      } else if (at_kw("state")) {
        take();
        sig.state = true;
        expect(Tok::LBrace, "'{'");
        while (!at(Tok::RBrace)) {
          sig.states.push_back(ident());
          if (at(Tok::Comma)) take();
        }
        take();
        expect_kw("init");
        sig.initial_state = ident();
      } else if (at_kw("errors")) {
        take();
        sig.error = true;
        expect(Tok::LBrace, "'{'");
        while (!at(Tok::RBrace)) {
          sig.errors.push_back(ident());
          if (at(Tok::Comma)) take();
        }
        take();
      } else if (at_kw("choose")) {
        take();
        sig.choose = true;
      } else if (at_kw("diverge")) {
        take();
        sig.diverge = true;
      } else if (at(Tok::Ident) && cur().text == "rec") {
        take();
        sig.rec = true;
      } else {
        throw SyntaxError(p, "an effect clause", describe(cur()));
      }
    }
    expect(Tok::RBrace, "'}'");
    try {
      sig.validate();
    } catch (const std::invalid_argument& e) {
      throw SyntaxError(cur().pos, std::string("a valid effects header (") +
                                       e.what() + ")",
                        "this header");
    }
    return sig;
  }

  // ---- definitions

  Definition definition() {
    Pos p = cur().pos;
    DefKind kind;
    if (at_kw("val"))
      kind = DefKind::Value;
    else if (at_kw("comp"))
      kind = DefKind::Comp;
    else if (at_kw("vtype"))
      kind = DefKind::VTypeDef;
    else if (at_kw("ctype"))
      kind = DefKind::CTypeDef;
    else if (at_kw("surface"))
      kind = DefKind::Surface;
    else
      throw SyntaxError(p, "'val', 'comp', 'vtype', 'ctype' or 'surface'",
                        describe(cur()));
    take();
    Definition d;
    d.kind = kind;
    d.pos = p;
    d.name = ident();
    if (at(Tok::Colon)) {
      take();
      switch (kind) {
        case DefKind::Value: d.ascription = parse_vtype(); break;
        case DefKind::Comp: d.ascription = parse_ctype(); break;
        case DefKind::Surface: d.ascription = parse_surface_type(); break;
        default:
          throw SyntaxError(cur().pos, "no ascription on a type definition",
                            "':'");
      }
    }
    expect(Tok::Equals, "'='");
    switch (kind) {
      case DefKind::Value: d.body = parse_value(); break;
      case DefKind::Comp: d.body = parse_comp(); break;
      case DefKind::VTypeDef: d.body = parse_vtype(); break;
      case DefKind::CTypeDef: d.body = parse_ctype(); break;
      case DefKind::Surface: d.body = parse_surface(); break;
    }
    return d;
  }

  // ---- values

  bool value_ahead() const {
    const Token& t = cur();
    switch (t.kind) {
      case Tok::Ident:
      case Tok::Lt:
      case Tok::LParen:
        return true;
      case Tok::Keyword:
        return t.text == "thunk" || t.text == "inj" || t.text == "refl" ||
               t.text == "let" || t.text == "pm";
      default:
        return false;
    }
  }

  NodePtr parse_value() {
    Pos p = cur().pos;
    if (at(Tok::Ident)) {
      auto n = ast::mk(K::Name, p);
      n->name = take().text;
      return n;
    }
    if (at(Tok::LParen)) {
      take();
      if (at(Tok::RParen)) {
        take();
        return ast::mk(K::Unit, p);
      }
      NodePtr v = parse_value();
      expect(Tok::RParen, "')'");
      return v;
    }
    if (at(Tok::Lt)) {
      take();
      NodePtr a = parse_value();
      expect(Tok::Comma, "','");
      NodePtr b = parse_value();
      expect(Tok::Gt, "'>'");
      auto n = ast::mk(K::Pair, p);
      n->children = {a, b};
      return n;
    }
    if (at_kw("thunk")) {
      take();
      auto n = ast::mk(K::Thunk, p);
      n->children = {parse_comp_atom()};
      return n;
    }
    if (at_kw("inj")) {
      take();
      std::size_t tag = number();
      expect(Tok::Slash, "'/'");
      std::size_t arity = number();
      if (tag < 1 || tag > arity)
        throw SyntaxError(p, "an injection tag between 1 and its arity",
                          "tag " + std::to_string(tag) + "/" +
                              std::to_string(arity));
      auto n = ast::mk(K::Inj, p);
      n->tag = tag;
      n->arity = arity;
      n->children = {parse_value()};
      return n;
    }
    if (at_kw("refl")) {
      take();
      auto n = ast::mk(K::Refl, p);
      n->children = {parse_value()};
      return n;
    }
    if (at_kw("let")) {
      take();
      std::string x = ident();
      expect(Tok::Equals, "'='");
      NodePtr bound = parse_value();
      expect_kw("in");
      NodePtr body = parse_value();
      auto n = ast::mk(K::Let, p);
      n->binders = {x};
      n->children = {bound, body};
      return n;
    }
    if (at_kw("pm")) return parse_pm(/*value_level=*/true, p);
    throw SyntaxError(p, "a value", describe(cur()));
  }

  // Shared pm parser; branch bodies are values or computations by level.
  NodePtr parse_pm(bool value_level, Pos p) {
    expect_kw("pm");
    NodePtr scrut = parse_value();
    NodePtr motive;
    std::vector<std::string> motive_binders;
    if (!value_level && at(Tok::LBracket)) {
      take();
      motive_binders.push_back(ident());
      while (at(Tok::Ident)) motive_binders.push_back(take().text);
      expect(Tok::Dot, "'.'");
      motive = parse_ctype();
      expect(Tok::RBracket, "']'");
    }
    expect_kw("as");
    expect(Tok::LBrace, "'{'");
    auto body = [&]() { return value_level ? parse_value() : parse_comp(); };
    NodePtr n;
    if (at(Tok::Number)) {
      // sum branches: `1 x. B | 2 y. B`
      n = ast::mk(K::PmSum, p);
      n->children.push_back(scrut);
      std::size_t expected = 1;
      while (true) {
        std::size_t tag = number();
        if (tag != expected)
          throw SyntaxError(cur().pos,
                            "branch tag " + std::to_string(expected),
                            std::to_string(tag));
        n->binders.push_back(ident());
        expect(Tok::Dot, "'.'");
        n->children.push_back(body());
        ++expected;
        if (!at(Tok::Bar)) break;
        take();
      }
    } else if (at(Tok::LParen)) {
      take();
      expect(Tok::RParen, "')'");
      expect(Tok::Dot, "'.'");
      n = ast::mk(K::PmUnit, p);
      n->children = {scrut, body()};
    } else if (at(Tok::Lt)) {
      take();
      std::string x = ident();
      expect(Tok::Comma, "','");
      std::string y = ident();
      expect(Tok::Gt, "'>'");
      expect(Tok::Dot, "'.'");
      n = ast::mk(K::PmPair, p);
      n->binders = {x, y};
      n->children = {scrut, body()};
    } else if (at_kw("refl")) {
      take();
      std::string x = ident();
      expect(Tok::Dot, "'.'");
      n = ast::mk(K::PmId, p);
      n->binders = {x};
      n->children = {scrut, body()};
    } else {
      throw SyntaxError(cur().pos, "a pattern-match branch", describe(cur()));
    }
    expect(Tok::RBrace, "'}'");
    n->motive = motive;
    n->motive_binders = std::move(motive_binders);
    return n;
  }

  // ---- computations

  NodePtr parse_comp() {
    NodePtr c = parse_comp_app();
    if (at_kw("to")) {
      Pos p = take().pos;
      std::string x = ident();
      NodePtr motive;
      if (at(Tok::Colon)) {
        take();
        motive = parse_ctype();
      }
      expect(Tok::Dot, "'.'");
      NodePtr body = parse_comp();
      auto n = ast::mk(K::ToIn, p);
      n->binders = {x};
      n->children = {c, body};
      n->motive = motive;
      n->motive_binders = {x};
      return n;
    }
    return c;
  }

  NodePtr parse_comp_app() {
    // `let` in computation position always parses as a computation let whose
    // body extends right; a value-let application argument needs parens.
    if (value_ahead() && !at_kw("let")) {
      std::size_t save = at_;
      try {
        NodePtr v = parse_value();
        if (at(Tok::Quote)) {
          Pos p = take().pos;
          NodePtr fn = parse_comp_app();
          auto n = ast::mk(K::App, p);
          n->children = {v, fn};
          return n;
        }
      } catch (const SyntaxError&) {
      }
      at_ = save;
    }
    return parse_comp_atom();
  }

  NodePtr parse_comp_atom() {
    Pos p = cur().pos;
    if (at(Tok::Ident)) {
      auto n = ast::mk(K::Name, p);
      n->name = take().text;
      return n;
    }
    if (at(Tok::LParen)) {
      take();
      NodePtr c = parse_comp();
      expect(Tok::RParen, "')'");
      return c;
    }
    if (at_kw("return")) {
      take();
      auto n = ast::mk(K::Return, p);
      n->children = {parse_value()};
      return n;
    }
    if (at_kw("force")) {
      take();
      auto n = ast::mk(K::Force, p);
      n->children = {parse_value()};
      return n;
    }
    if (at(Tok::Lambda)) {
      take();
      std::string x = ident();
      expect(Tok::Dot, "'.'");
      auto n = ast::mk(K::Lam, p);
      n->binders = {x};
      n->children = {parse_comp()};
      return n;
    }
    if (at_kw("let")) {
      take();
      std::string x = ident();
      expect(Tok::Equals, "'='");
      NodePtr bound = parse_value();
      expect_kw("in");
      auto n = ast::mk(K::Let, p);
      n->binders = {x};
      n->children = {bound, parse_comp()};
      return n;
    }
    if (at_kw("pm")) return parse_pm(/*value_level=*/false, p);
    if (at_kw("proj")) {
      take();
      auto n = ast::mk(K::Proj, p);
      n->tag = number();
      n->children = {parse_comp_atom()};
      return n;
    }
    if (at_kw("tuple")) {
      take();
      auto n = ast::mk(K::Tuple, p);
      expect(Tok::LBrace, "'{'");
      if (!at(Tok::RBrace)) {
        n->children.push_back(parse_comp());
        while (at(Tok::Bar)) {
          take();
          n->children.push_back(parse_comp());
        }
      }
      expect(Tok::RBrace, "'}'");
      return n;
    }
    if (at_kw("diverge")) {
      take();
      return ast::mk(K::Diverge, p);
    }
    if (at_kw("error")) {
      take();
      auto n = ast::mk(K::Error, p);
      n->name = ident();
      return n;
    }
    if (at_kw("mu")) {
      take();
      std::string z = ident();
      expect(Tok::Dot, "'.'");
      auto n = ast::mk(K::Mu, p);
      n->binders = {z};
      n->children = {parse_comp()};
      return n;
    }
    if (at_kw("print")) {
      take();
      auto n = ast::mk(K::Print, p);
      n->name = expect(Tok::String, "a string").text;
      expect(Tok::Semi, "';'");
      n->children = {parse_comp()};
      return n;
    }
    if (at_kw("write")) {
      take();
      auto n = ast::mk(K::Write, p);
      n->name = ident();
      expect(Tok::Semi, "';'");
      n->children = {parse_comp()};
      return n;
    }
    if (at_kw("choose")) {
      take();
      auto n = ast::mk(K::Choose, p);
      expect(Tok::LBrace, "'{'");
      n->children.push_back(parse_comp());
      while (at(Tok::Bar)) {
        take();
        n->children.push_back(parse_comp());
      }
      expect(Tok::RBrace, "'}'");
      return n;
    }
    if (at_kw("read")) {
      take();
      auto n = ast::mk(K::Read, p);
      expect(Tok::LBrace, "'{'");
      while (true) {
        n->labels.push_back(ident());
        expect(Tok::Dot, "'.'");
        n->children.push_back(parse_comp());
        if (!at(Tok::Bar)) break;
        take();
      }
      expect(Tok::RBrace, "'}'");
      return n;
    }
    throw SyntaxError(p, "a computation", describe(cur()));
  }

  // ---- types

  NodePtr parse_vtype() {
    Pos p = cur().pos;
    if (at(Tok::Ident)) {
      auto n = ast::mk(K::Name, p);
      n->name = take().text;
      return n;
    }
    if (at(Tok::LParen)) {
      take();
      NodePtr t = parse_vtype();
      expect(Tok::RParen, "')'");
      return t;
    }
    if (at(Tok::Number)) {
      if (cur().number != 1)
        throw SyntaxError(p, "the type '1'", describe(cur()));
      take();
      return ast::mk(K::TyOne, p);
    }
    if (at_kw("U")) {
      take();
      auto n = ast::mk(K::TyU, p);
      n->children = {parse_ctype()};
      return n;
    }
    if (at_kw("Sum")) {
      take();
      auto n = ast::mk(K::TySum, p);
      expect(Tok::LBracket, "'['");
      if (!at(Tok::RBracket)) {
        n->children.push_back(parse_vtype());
        while (at(Tok::Bar)) {
          take();
          n->children.push_back(parse_vtype());
        }
      }
      expect(Tok::RBracket, "']'");
      return n;
    }
    if (at_kw("Sg")) {
      take();
      std::string x = ident();
      expect(Tok::Colon, "':'");
      NodePtr base = parse_vtype();
      expect(Tok::Dot, "'.'");
      auto n = ast::mk(K::TySigma, p);
      n->binders = {x};
      n->children = {base, parse_vtype()};
      return n;
    }
    if (at_kw("Id")) {
      take();
      auto n = ast::mk(K::TyId, p);
      NodePtr carrier = parse_vtype_arg();
      n->children = {carrier, parse_value(), parse_value()};
      return n;
    }
    throw SyntaxError(p, "a value type", describe(cur()));
  }

  // Carrier position of Id: a type that does not greedily swallow the
  // following values (identifier, 1, parenthesized, U ..., Sum[...]).
  NodePtr parse_vtype_arg() {
    if (at_kw("Sg") || at_kw("Id"))
      throw SyntaxError(cur().pos, "a parenthesized carrier type",
                        describe(cur()));
    return parse_vtype();
  }

  NodePtr parse_ctype() {
    Pos p = cur().pos;
    if (at(Tok::Ident)) {
      auto n = ast::mk(K::Name, p);
      n->name = take().text;
      return n;
    }
    if (at(Tok::LParen)) {
      take();
      NodePtr t = parse_ctype();
      expect(Tok::RParen, "')'");
      return t;
    }
    if (at_kw("F")) {
      take();
      auto n = ast::mk(K::TyF, p);
      n->children = {parse_vtype()};
      return n;
    }
    if (at_kw("Prod")) {
      take();
      auto n = ast::mk(K::TyPiN, p);
      expect(Tok::LBracket, "'['");
      if (!at(Tok::RBracket)) {
        n->children.push_back(parse_ctype());
        while (at(Tok::Bar)) {
          take();
          n->children.push_back(parse_ctype());
        }
      }
      expect(Tok::RBracket, "']'");
      return n;
    }
    if (at_kw("Pi")) {
      take();
      std::string x = ident();
      expect(Tok::Colon, "':'");
      NodePtr base = parse_vtype();
      expect(Tok::Dot, "'.'");
      auto n = ast::mk(K::TyPi, p);
      n->binders = {x};
      n->children = {base, parse_ctype()};
      return n;
    }
    throw SyntaxError(p, "a computation type", describe(cur()));
  }

  // ---- surface terms and types

  NodePtr parse_surface() {
    NodePtr a = parse_surface_atom();
    if (at(Tok::Quote)) {
      Pos p = take().pos;
      auto n = ast::mk(K::App, p);
      n->children = {a, parse_surface()};
      return n;
    }
    return a;
  }

  NodePtr parse_surface_atom() {
    Pos p = cur().pos;
    if (at(Tok::Ident)) {
      auto n = ast::mk(K::Name, p);
      n->name = take().text;
      return n;
    }
    if (at(Tok::LParen)) {
      take();
      if (at(Tok::RParen)) {
        take();
        return ast::mk(K::Unit, p);
      }
      NodePtr t = parse_surface();
      expect(Tok::RParen, "')'");
      return t;
    }
    if (at(Tok::Lt)) {
      take();
      NodePtr a = parse_surface();
      expect(Tok::Comma, "','");
      NodePtr b = parse_surface();
      expect(Tok::Gt, "'>'");
      auto n = ast::mk(K::Pair, p);
      n->children = {a, b};
      return n;
    }
    if (at(Tok::Lambda)) {
      take();
      std::string x = ident();
      expect(Tok::Dot, "'.'");
      auto n = ast::mk(K::Lam, p);
      n->binders = {x};
      n->children = {parse_surface()};
      return n;
    }
    if (at_kw("let")) {
      take();
      std::string x = ident();
      expect(Tok::Equals, "'='");
      NodePtr bound = parse_surface();
      expect_kw("in");
      auto n = ast::mk(K::Let, p);
      n->binders = {x};
      n->children = {bound, parse_surface()};
      return n;
    }
    if (at_kw("inj")) {
      take();
      std::size_t tag = number();
      expect(Tok::Slash, "'/'");
      std::size_t arity = number();
      if (tag < 1 || tag > arity)
        throw SyntaxError(p, "an injection tag between 1 and its arity",
                          "tag " + std::to_string(tag));
      auto n = ast::mk(K::Inj, p);
      n->tag = tag;
      n->arity = arity;
      n->children = {parse_surface_atom()};
      return n;
    }
    if (at_kw("refl")) {
      take();
      auto n = ast::mk(K::Refl, p);
      n->children = {parse_surface_atom()};
      return n;
    }
    if (at_kw("tuple")) {
      take();
      auto n = ast::mk(K::Tuple, p);
      expect(Tok::LBrace, "'{'");
      if (!at(Tok::RBrace)) {
        n->children.push_back(parse_surface());
        while (at(Tok::Bar)) {
          take();
          n->children.push_back(parse_surface());
        }
      }
      expect(Tok::RBrace, "'}'");
      return n;
    }
    if (at_kw("proj")) {
      take();
      auto n = ast::mk(K::Proj, p);
      n->tag = number();
      n->children = {parse_surface_atom()};
      return n;
    }
    if (at_kw("pm")) {
      expect_kw("pm");
      NodePtr scrut = parse_surface();
      expect_kw("as");
      expect(Tok::LBrace, "'{'");
      NodePtr n;
      if (at(Tok::Number)) {
        n = ast::mk(K::PmSum, p);
        n->children.push_back(scrut);
        std::size_t expected = 1;
        while (true) {
          std::size_t tag = number();
          if (tag != expected)
            throw SyntaxError(cur().pos,
                              "branch tag " + std::to_string(expected),
                              std::to_string(tag));
          n->binders.push_back(ident());
          expect(Tok::Dot, "'.'");
          n->children.push_back(parse_surface());
          ++expected;
          if (!at(Tok::Bar)) break;
          take();
        }
      } else if (at(Tok::LParen)) {
        take();
        expect(Tok::RParen, "')'");
        expect(Tok::Dot, "'.'");
        n = ast::mk(K::PmUnit, p);
        n->children = {scrut, parse_surface()};
      } else if (at(Tok::Lt)) {
        take();
        std::string x = ident();
        expect(Tok::Comma, "','");
        std::string y = ident();
        expect(Tok::Gt, "'>'");
        expect(Tok::Dot, "'.'");
        n = ast::mk(K::PmPair, p);
        n->binders = {x, y};
        n->children = {scrut, parse_surface()};
      } else if (at_kw("refl")) {
        take();
        std::string x = ident();
        expect(Tok::Dot, "'.'");
        n = ast::mk(K::PmId, p);
        n->binders = {x};
        n->children = {scrut, parse_surface()};
      } else {
        throw SyntaxError(cur().pos, "a pattern-match branch",
                          describe(cur()));
      }
      expect(Tok::RBrace, "'}'");
      return n;
    }
    if (at_kw("diverge")) {
      take();
      return ast::mk(K::Diverge, p);
    }
    if (at_kw("error")) {
      take();
      auto n = ast::mk(K::Error, p);
      n->name = ident();
      return n;
    }
    if (at_kw("mu")) {
      take();
      std::string x = ident();
      expect(Tok::Dot, "'.'");
      auto n = ast::mk(K::Mu, p);
      n->binders = {x};
      n->children = {parse_surface()};
      return n;
    }
    if (at_kw("print")) {
      take();
      auto n = ast::mk(K::Print, p);
      n->name = expect(Tok::String, "a string").text;
      expect(Tok::Semi, "';'");
      n->children = {parse_surface()};
      return n;
    }
    if (at_kw("write")) {
      take();
      auto n = ast::mk(K::Write, p);
      n->name = ident();
      expect(Tok::Semi, "';'");
      n->children = {parse_surface()};
      return n;
    }
    if (at_kw("choose")) {
      take();
      auto n = ast::mk(K::Choose, p);
      expect(Tok::LBrace, "'{'");
      n->children.push_back(parse_surface());
      while (at(Tok::Bar)) {
        take();
        n->children.push_back(parse_surface());
      }
      expect(Tok::RBrace, "'}'");
      return n;
    }
    if (at_kw("read")) {
      take();
      auto n = ast::mk(K::Read, p);
      expect(Tok::LBrace, "'{'");
      while (true) {
        n->labels.push_back(ident());
        expect(Tok::Dot, "'.'");
        n->children.push_back(parse_surface());
        if (!at(Tok::Bar)) break;
        take();
      }
      expect(Tok::RBrace, "'}'");
      return n;
    }
    throw SyntaxError(p, "a surface term", describe(cur()));
  }

  NodePtr parse_surface_type() {
    Pos p = cur().pos;
    if (at(Tok::Ident)) {
      auto n = ast::mk(K::Name, p);
      n->name = take().text;
      return n;
    }
    if (at(Tok::LParen)) {
      take();
      NodePtr t = parse_surface_type();
      expect(Tok::RParen, "')'");
      return t;
    }
    if (at(Tok::Number)) {
      if (cur().number != 1)
        throw SyntaxError(p, "the type '1'", describe(cur()));
      take();
      return ast::mk(K::TyOne, p);
    }
    if (at_kw("Sum") || at_kw("Prod")) {
      bool sum = cur().text == "Sum";
      take();
      auto n = ast::mk(sum ? K::TySum : K::TyProd, p);
      expect(Tok::LBracket, "'['");
      if (!at(Tok::RBracket)) {
        n->children.push_back(parse_surface_type());
        while (at(Tok::Bar)) {
          take();
          n->children.push_back(parse_surface_type());
        }
      }
      expect(Tok::RBracket, "']'");
      return n;
    }
    if (at_kw("Pi") || at_kw("Sg")) {
      bool pi = cur().text == "Pi";
      take();
      std::string x = ident();
      expect(Tok::Colon, "':'");
      NodePtr base = parse_surface_type();
      expect(Tok::Dot, "'.'");
      auto n = ast::mk(pi ? K::TyPi : K::TySigma, p);
      n->binders = {x};
      n->children = {base, parse_surface_type()};
      return n;
    }
    if (at_kw("Id")) {
      take();
      if (at_kw("Sg") || at_kw("Pi") || at_kw("Id"))
        throw SyntaxError(cur().pos, "a parenthesized carrier type",
                          describe(cur()));
      auto n = ast::mk(K::TyId, p);
      NodePtr carrier = parse_surface_type();
      n->children = {carrier, parse_surface_atom(), parse_surface_atom()};
      return n;
    }
    throw SyntaxError(p, "a surface type", describe(cur()));
  }
};

// ---------------------------------------------------------------------------
// Resolver

class Resolver {
 public:
  Resolver(const EffectSignature& sig, const ResolvedProgram* defs)
      : sig_(sig), defs_(defs) {}

  ValuePtr value(const NodePtr& n, std::vector<std::string>& sc) {
    switch (n->kind) {
      case K::Name: {
        if (auto i = lookup(n->name, sc)) return vvar(*i);
        if (const ResolvedDef* d = find_def(n)) {
          if (d->kind != DefKind::Value) wrong_kind(n, "a value");
          return std::get<ValuePtr>(d->body);
        }
        unbound(n);
      }
      case K::Thunk:
        return vthunk(comp(n->children[0], sc));
      case K::Inj:
        return vinj(n->tag, n->arity, value(n->children[0], sc));
      case K::Unit:
        return vunit();
      case K::Pair:
        return vpair(value(n->children[0], sc), value(n->children[1], sc));
      case K::Refl:
        return vrefl(value(n->children[0], sc));
      case K::Let: {
        ValuePtr bound = value(n->children[0], sc);
        Scope s(sc, n->binders);
        return vlet(bound, value(n->children[1], sc));
      }
      case K::PmSum: {
        ValuePtr scrut = value(n->children[0], sc);
        std::vector<ValuePtr> branches;
        for (std::size_t i = 1; i < n->children.size(); ++i) {
          Scope s(sc, {n->binders[i - 1]});
          branches.push_back(value(n->children[i], sc));
        }
        return vpm_sum(scrut, std::move(branches));
      }
      case K::PmUnit:
        return vpm_unit(value(n->children[0], sc), value(n->children[1], sc));
      case K::PmPair: {
        ValuePtr scrut = value(n->children[0], sc);
        Scope s(sc, n->binders);
        return vpm_pair(scrut, value(n->children[1], sc));
      }
      case K::PmId: {
        ValuePtr scrut = value(n->children[0], sc);
        Scope s(sc, n->binders);
        return vpm_id(scrut, value(n->children[1], sc));
      }
      default:
        wrong_kind(n, "a value");
    }
  }

  CompPtr comp(const NodePtr& n, std::vector<std::string>& sc) {
    switch (n->kind) {
      case K::Name: {
        if (lookup(n->name, sc))
          throw ResolveError(ResolveErrorKind::WrongKind, n->pos,
                             "'" + n->name +
                                 "' is a variable (a value); did you mean "
                                 "'force " +
                                 n->name + "'?");
        if (const ResolvedDef* d = find_def(n)) {
          if (d->kind != DefKind::Comp) wrong_kind(n, "a computation");
          return std::get<CompPtr>(d->body);
        }
        unbound(n);
      }
      case K::Return:
        return creturn(value(n->children[0], sc));
      case K::Force:
        return cforce(value(n->children[0], sc));
      case K::ToIn: {
        CompPtr head = comp(n->children[0], sc);
        CTypePtr motive;
        if (n->motive) {
          Scope s(sc, n->motive_binders);
          motive = ctype(n->motive, sc);
        }
        Scope s(sc, n->binders);
        return cto_in(head, comp(n->children[1], sc), motive);
      }
      case K::Let: {
        ValuePtr bound = value(n->children[0], sc);
        Scope s(sc, n->binders);
        return clet(bound, comp(n->children[1], sc));
      }
      case K::PmSum: {
        ValuePtr scrut = value(n->children[0], sc);
        CTypePtr motive = pm_motive(n, sc);
        std::vector<CompPtr> branches;
        for (std::size_t i = 1; i < n->children.size(); ++i) {
          Scope s(sc, {n->binders[i - 1]});
          branches.push_back(comp(n->children[i], sc));
        }
        return cpm_sum(scrut, std::move(branches), motive);
      }
      case K::PmUnit: {
        ValuePtr scrut = value(n->children[0], sc);
        CTypePtr motive = pm_motive(n, sc);
        return cpm_unit(scrut, comp(n->children[1], sc), motive);
      }
      case K::PmPair: {
        ValuePtr scrut = value(n->children[0], sc);
        CTypePtr motive = pm_motive(n, sc);
        Scope s(sc, n->binders);
        return cpm_pair(scrut, comp(n->children[1], sc), motive);
      }
      case K::PmId: {
        ValuePtr scrut = value(n->children[0], sc);
        CTypePtr motive = pm_motive(n, sc);
        Scope s(sc, n->binders);
        return cpm_id(scrut, comp(n->children[1], sc), motive);
      }
      case K::Tuple: {
        std::vector<CompPtr> items;
        for (const auto& c : n->children) items.push_back(comp(c, sc));
        return ctuple(std::move(items));
      }
      case K::Proj:
        return cproj(n->tag, comp(n->children[0], sc));
      case K::Lam: {
        Scope s(sc, n->binders);
        return clam(comp(n->children[0], sc));
      }
      case K::App: {
        ValuePtr arg = value(n->children[0], sc);
        return capp(arg, comp(n->children[1], sc));
      }
      case K::Diverge:
        require(sig_.diverge, n, "diverge");
        return cdiverge();
      case K::Error:
        require(sig_.error, n, "error");
        if (!sig_.has_error(n->name))
          effect_error(n, "error symbol '" + n->name + "' is not declared");
        return cerror(n->name);
      case K::Mu: {
        require(sig_.rec, n, "mu");
        Scope s(sc, n->binders);
        return cmu(comp(n->children[0], sc));
      }
      case K::Print:
        require(sig_.print, n, "print");
        if (!sig_.has_letter(n->name))
          effect_error(n, "letter \"" + n->name + "\" is not in the alphabet");
        return cprint(n->name, comp(n->children[0], sc));
      case K::Choose: {
        require(sig_.choose, n, "choose");
        std::vector<CompPtr> alts;
        for (const auto& c : n->children) alts.push_back(comp(c, sc));
        return cchoose(std::move(alts));
      }
      case K::Write:
        require(sig_.state, n, "write");
        if (!sig_.has_state(n->name))
          effect_error(n, "state '" + n->name + "' is not declared");
        return cwrite(n->name, comp(n->children[0], sc));
      case K::Read: {
        require(sig_.state, n, "read");
        std::vector<std::pair<std::string, CompPtr>> branches;
        for (std::size_t i = 0; i < n->children.size(); ++i) {
          const std::string& label = n->labels[i];
          if (!sig_.has_state(label))
            effect_error(n, "state '" + label + "' is not declared");
          for (const auto& [seen, _] : branches)
            if (seen == label)
              throw ResolveError(ResolveErrorKind::DuplicateDefinition, n->pos,
                                 "duplicate read branch for state '" + label +
                                     "'");
          branches.emplace_back(label, comp(n->children[i], sc));
        }
        return cread(std::move(branches));
      }
      default:
        wrong_kind(n, "a computation");
    }
  }

  VTypePtr vtype(const NodePtr& n, std::vector<std::string>& sc) {
    switch (n->kind) {
      case K::Name: {
        if (lookup(n->name, sc))
          throw ResolveError(ResolveErrorKind::WrongKind, n->pos,
                             "'" + n->name + "' is a term variable, not a type");
        if (const ResolvedDef* d = find_def(n)) {
          if (d->kind != DefKind::VTypeDef) wrong_kind(n, "a value type");
          return std::get<VTypePtr>(d->body);
        }
        unbound(n);
      }
      case K::TyU:
        return t_u(ctype(n->children[0], sc));
      case K::TySum: {
        std::vector<VTypePtr> items;
        for (const auto& c : n->children) items.push_back(vtype(c, sc));
        return t_sum(std::move(items));
      }
      case K::TyOne:
        return t_one();
      case K::TySigma: {
        VTypePtr base = vtype(n->children[0], sc);
        Scope s(sc, n->binders);
        return t_sigma(base, vtype(n->children[1], sc));
      }
      case K::TyId:
        return t_id(vtype(n->children[0], sc), value(n->children[1], sc),
                    value(n->children[2], sc));
      default:
        wrong_kind(n, "a value type");
    }
  }

  CTypePtr ctype(const NodePtr& n, std::vector<std::string>& sc) {
    switch (n->kind) {
      case K::Name: {
        if (lookup(n->name, sc))
          throw ResolveError(ResolveErrorKind::WrongKind, n->pos,
                             "'" + n->name + "' is a term variable, not a type");
        if (const ResolvedDef* d = find_def(n)) {
          if (d->kind != DefKind::CTypeDef) wrong_kind(n, "a computation type");
          return std::get<CTypePtr>(d->body);
        }
        unbound(n);
      }
      case K::TyF:
        return t_f(vtype(n->children[0], sc));
      case K::TyPiN: {
        std::vector<CTypePtr> items;
        for (const auto& c : n->children) items.push_back(ctype(c, sc));
        return t_pin(std::move(items));
      }
      case K::TyPi: {
        VTypePtr base = vtype(n->children[0], sc);
        Scope s(sc, n->binders);
        return t_pi(base, ctype(n->children[1], sc));
      }
      default:
        wrong_kind(n, "a computation type");
    }
  }

  surface::TermPtr surf(const NodePtr& n, std::vector<std::string>& sc) {
    using namespace surface;
    switch (n->kind) {
      case K::Name: {
        if (auto i = lookup(n->name, sc)) return mk_term(SVar{*i});
        if (const ResolvedDef* d = find_def(n)) {
          if (d->kind != DefKind::Surface) wrong_kind(n, "a surface term");
          return std::get<TermPtr>(d->body);
        }
        unbound(n);
      }
      case K::Let: {
        TermPtr bound = surf(n->children[0], sc);
        Scope s(sc, n->binders);
        return mk_term(SLet{bound, surf(n->children[1], sc)});
      }
      case K::Inj:
        return mk_term(SInj{n->tag, n->arity, surf(n->children[0], sc)});
      case K::PmSum: {
        TermPtr scrut = surf(n->children[0], sc);
        std::vector<TermPtr> branches;
        for (std::size_t i = 1; i < n->children.size(); ++i) {
          Scope s(sc, {n->binders[i - 1]});
          branches.push_back(surf(n->children[i], sc));
        }
        return mk_term(SPmSum{scrut, std::move(branches)});
      }
      case K::Tuple: {
        std::vector<TermPtr> items;
        for (const auto& c : n->children) items.push_back(surf(c, sc));
        return mk_term(SNTuple{std::move(items)});
      }
      case K::Proj:
        return mk_term(SNProj{n->tag, surf(n->children[0], sc)});
      case K::Lam: {
        Scope s(sc, n->binders);
        return mk_term(SLam{surf(n->children[0], sc)});
      }
      case K::App: {
        TermPtr arg = surf(n->children[0], sc);
        return mk_term(SApp{arg, surf(n->children[1], sc)});
      }
      case K::Unit:
        return mk_term(SUnit{});
      case K::PmUnit: {
        TermPtr scrut = surf(n->children[0], sc);
        return mk_term(SPmUnit{scrut, surf(n->children[1], sc)});
      }
      case K::Pair:
        return mk_term(SPair{surf(n->children[0], sc), surf(n->children[1], sc)});
      case K::PmPair: {
        TermPtr scrut = surf(n->children[0], sc);
        Scope s(sc, n->binders);
        return mk_term(SPmPair{scrut, surf(n->children[1], sc)});
      }
      case K::Refl:
        return mk_term(SRefl{surf(n->children[0], sc)});
      case K::PmId: {
        TermPtr scrut = surf(n->children[0], sc);
        Scope s(sc, n->binders);
        return mk_term(SPmId{scrut, surf(n->children[1], sc)});
      }
      case K::Diverge:
        require(sig_.diverge, n, "diverge");
        return mk_term(SDiverge{});
      case K::Error:
        require(sig_.error, n, "error");
        if (!sig_.has_error(n->name))
          effect_error(n, "error symbol '" + n->name + "' is not declared");
        return mk_term(SError{n->name});
      case K::Mu: {
        require(sig_.rec, n, "mu");
        Scope s(sc, n->binders);
        return mk_term(SMu{surf(n->children[0], sc)});
      }
      case K::Print:
        require(sig_.print, n, "print");
        if (!sig_.has_letter(n->name))
          effect_error(n, "letter \"" + n->name + "\" is not in the alphabet");
        return mk_term(SPrint{n->name, surf(n->children[0], sc)});
      case K::Choose: {
        require(sig_.choose, n, "choose");
        std::vector<TermPtr> alts;
        for (const auto& c : n->children) alts.push_back(surf(c, sc));
        return mk_term(SChoose{std::move(alts)});
      }
      case K::Write:
        require(sig_.state, n, "write");
        if (!sig_.has_state(n->name))
          effect_error(n, "state '" + n->name + "' is not declared");
        return mk_term(SWrite{n->name, surf(n->children[0], sc)});
      case K::Read: {
        require(sig_.state, n, "read");
        std::vector<std::pair<std::string, surface::TermPtr>> branches;
        for (std::size_t i = 0; i < n->children.size(); ++i) {
          if (!sig_.has_state(n->labels[i]))
            effect_error(n, "state '" + n->labels[i] + "' is not declared");
          branches.emplace_back(n->labels[i], surf(n->children[i], sc));
        }
        return mk_term(SRead{std::move(branches)});
      }
      default:
        wrong_kind(n, "a surface term");
    }
  }

  surface::TypePtr surf_type(const NodePtr& n, std::vector<std::string>& sc) {
    using namespace surface;
    switch (n->kind) {
      case K::TyOne:
        return mk_type(STOne{});
      case K::TySum: {
        std::vector<TypePtr> items;
        for (const auto& c : n->children) items.push_back(surf_type(c, sc));
        return mk_type(STSum{std::move(items)});
      }
      case K::TyProd: {
        std::vector<TypePtr> items;
        for (const auto& c : n->children) items.push_back(surf_type(c, sc));
        return mk_type(STProd{std::move(items)});
      }
      case K::TyPi: {
        TypePtr base = surf_type(n->children[0], sc);
        Scope s(sc, n->binders);
        return mk_type(STPi{base, surf_type(n->children[1], sc)});
      }
      case K::TySigma: {
        TypePtr base = surf_type(n->children[0], sc);
        Scope s(sc, n->binders);
        return mk_type(STSigma{base, surf_type(n->children[1], sc)});
      }
      case K::TyId:
        return mk_type(STId{surf_type(n->children[0], sc),
                            surf(n->children[1], sc),
                            surf(n->children[2], sc)});
      default:
        wrong_kind(n, "a surface type");
    }
  }

 private:
  const EffectSignature& sig_;
  const ResolvedProgram* defs_;

  struct Scope {
    std::vector<std::string>& sc;
    std::size_t n;
    Scope(std::vector<std::string>& sc, const std::vector<std::string>& names)
        : sc(sc), n(names.size()) {
      for (const auto& x : names) sc.push_back(x);
    }
    ~Scope() {
      sc.resize(sc.size() - n);
    }
  };

  std::optional<std::size_t> lookup(const std::string& name,
                                    const std::vector<std::string>& sc) const {
    for (std::size_t i = sc.size(); i-- > 0;)
      if (sc[i] == name) return sc.size() - 1 - i;
    return std::nullopt;
  }

  const ResolvedDef* find_def(const NodePtr& n) const {
    return defs_ ? defs_->find(n->name) : nullptr;
  }

  [[noreturn]] void unbound(const NodePtr& n) const {
    throw ResolveError(ResolveErrorKind::UnboundIdentifier, n->pos,
                       "unbound identifier '" + n->name + "'");
  }
  [[noreturn]] void wrong_kind(const NodePtr& n, const std::string& want) const {
    throw ResolveError(ResolveErrorKind::WrongKind, n->pos,
                       "expected " + want + " here");
  }
  void require(bool enabled, const NodePtr& n, const std::string& what) const {
    if (!enabled)
      throw ResolveError(ResolveErrorKind::EffectNotEnabled, n->pos,
                         "effect '" + what + "' is not enabled");
  }
  [[noreturn]] void effect_error(const NodePtr& n, const std::string& msg) const {
    throw ResolveError(ResolveErrorKind::EffectNotEnabled, n->pos, msg);
  }

  CTypePtr pm_motive(const NodePtr& n, std::vector<std::string>& sc) {
    if (!n->motive) return nullptr;
    Scope s(sc, n->motive_binders);
    return ctype(n->motive, sc);
  }
};

}  // namespace

const ResolvedDef* ResolvedProgram::find(const std::string& name) const {
  for (const auto& d : defs)
    if (d.name == name) return &d;
  return nullptr;
}

SourceProgram parse(const std::string& source) {
  return Parser(source).program();
}

ResolvedProgram resolve(const SourceProgram& program) {
  ResolvedProgram out;
  out.signature = program.signature;
  for (const auto& def : program.definitions) {
    if (out.find(def.name))
      throw ResolveError(ResolveErrorKind::DuplicateDefinition, def.pos,
                         "duplicate definition of '" + def.name + "'");
    Resolver r(out.signature, &out);
    std::vector<std::string> sc;
    ResolvedDef rd;
    rd.kind = def.kind;
    rd.name = def.name;
    switch (def.kind) {
      case DefKind::Value:
        rd.body = r.value(def.body, sc);
        if (def.ascription) rd.vtype_ascription = r.vtype(def.ascription, sc);
        break;
      case DefKind::Comp:
        rd.body = r.comp(def.body, sc);
        if (def.ascription) rd.ctype_ascription = r.ctype(def.ascription, sc);
        break;
      case DefKind::VTypeDef:
        rd.body = r.vtype(def.body, sc);
        break;
      case DefKind::CTypeDef:
        rd.body = r.ctype(def.body, sc);
        break;
      case DefKind::Surface:
        rd.body = r.surf(def.body, sc);
        if (def.ascription)
          rd.surface_ascription = r.surf_type(def.ascription, sc);
        break;
    }
    out.defs.push_back(std::move(rd));
  }
  return out;
}

namespace {
template <typename F>
auto parse_entry(const std::string& text, const EffectSignature& sig, F f) {
  Parser p(text);
  Resolver r(sig, nullptr);
  std::vector<std::string> sc;
  return f(p, r, sc);
}
}  // namespace

CompPtr parse_computation(const std::string& text, const EffectSignature& sig) {
  return parse_entry(text, sig, [](Parser& p, Resolver& r, auto& sc) {
    return r.comp(p.entry_comp(), sc);
  });
}
ValuePtr parse_value(const std::string& text, const EffectSignature& sig) {
  return parse_entry(text, sig, [](Parser& p, Resolver& r, auto& sc) {
    return r.value(p.entry_value(), sc);
  });
}
VTypePtr parse_vtype(const std::string& text, const EffectSignature& sig) {
  return parse_entry(text, sig, [](Parser& p, Resolver& r, auto& sc) {
    return r.vtype(p.entry_vtype(), sc);
  });
}
CTypePtr parse_ctype(const std::string& text, const EffectSignature& sig) {
  return parse_entry(text, sig, [](Parser& p, Resolver& r, auto& sc) {
    return r.ctype(p.entry_ctype(), sc);
  });
}

}  // namespace dcbpv
