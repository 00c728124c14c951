#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dcbpv/effects.hpp"
#include "dcbpv/surface.hpp"
#include "dcbpv/syntax.hpp"

// Concrete syntax for `.dcbpv` files: an optional effects header followed by
// definitions. Parsing builds a named tree with source positions; resolution
// turns names into de Bruijn indices, inlines definition references and
// rejects effect constructs the header does not enable.

namespace dcbpv {

struct Pos {
  std::size_t line = 1;
  std::size_t col = 1;
};

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(Pos pos, std::string expected, std::string found)
      : std::runtime_error("expected " + expected + ", found " + found),
        pos(pos),
        expected(std::move(expected)),
        found(std::move(found)) {}
  Pos pos;
  std::string expected;
  std::string found;
};

enum class ResolveErrorKind {
  UnboundIdentifier,
  DuplicateDefinition,
  EffectNotEnabled,
  WrongKind,
};

class ResolveError : public std::runtime_error {
 public:
  ResolveError(ResolveErrorKind kind, Pos pos, std::string message)
      : std::runtime_error(std::move(message)), kind(kind), pos(pos) {}
  ResolveErrorKind kind;
  Pos pos;
};

// ---------------------------------------------------------------------------
// Named parse tree (shared by core terms, types and surface terms).

namespace ast {

struct Node;
using NodePtr = std::shared_ptr<Node>;

enum class K {
  // shared leaves / values
  Name,
  Thunk,
  Inj,
  Unit,
  Pair,
  Refl,
  Let,     // binders: [x]
  PmSum,   // children: scrutinee, branches...; binders: branch vars
  PmUnit,  // children: scrutinee, body
  PmPair,  // binders: [x, y]
  PmId,    // binders: [x]
  // computations
  Return,
  ToIn,  // children: head, body; binders: [x]; motive optional
  Force,
  Tuple,
  Proj,
  Lam,  // binders: [x]
  App,  // children: arg, fn
  Diverge,
  Error,
  Mu,  // binders: [z]
  Print,
  Choose,
  Write,
  Read,  // labels parallel children
  // types
  TyU,
  TySum,
  TyOne,
  TySigma,  // binders: [x]
  TyId,     // children: carrier, lhs, rhs
  TyF,
  TyPiN,
  TyPi,    // binders: [x]
  TyProd,  // surface n-ary function space
};

struct Node {
  K kind;
  Pos pos;
  std::string name;                  // Name / Error / Write label / binder-free symbol
  std::size_t tag = 0;               // Inj / Proj tag
  std::size_t arity = 0;             // Inj arity
  std::vector<std::string> binders;  // bound names, outermost first
  std::vector<NodePtr> children;
  std::vector<std::string> labels;   // Read branch states
  NodePtr motive;                    // ToIn / Pm annotations
  std::vector<std::string> motive_binders;
};

NodePtr mk(K kind, Pos pos);

}  // namespace ast

enum class DefKind { Value, Comp, VTypeDef, CTypeDef, Surface };

struct Definition {
  DefKind kind;
  std::string name;
  Pos pos;
  ast::NodePtr body;
  ast::NodePtr ascription;  // optional `: type`
};

struct SourceProgram {
  EffectSignature signature;
  bool had_header = false;
  std::vector<Definition> definitions;
};

// ---------------------------------------------------------------------------
// Resolved program

struct ResolvedDef {
  DefKind kind;
  std::string name;
  std::variant<ValuePtr, CompPtr, VTypePtr, CTypePtr, surface::TermPtr> body;
  // Ascriptions: value defs carry a VType, computation defs a CType, surface
  // defs a surface type. Null when absent.
  VTypePtr vtype_ascription;
  CTypePtr ctype_ascription;
  surface::TypePtr surface_ascription;
};

struct ResolvedProgram {
  EffectSignature signature;
  std::vector<ResolvedDef> defs;

  const ResolvedDef* find(const std::string& name) const;
};

SourceProgram parse(const std::string& source);
ResolvedProgram resolve(const SourceProgram& program);

// Convenience single-term entry points used by tests and bindings. The term
// is parsed and resolved in an empty context under the given signature.
CompPtr parse_computation(const std::string& text,
                          const EffectSignature& sig = EffectSignature::pure());
ValuePtr parse_value(const std::string& text,
                     const EffectSignature& sig = EffectSignature::pure());
VTypePtr parse_vtype(const std::string& text,
                     const EffectSignature& sig = EffectSignature::pure());
CTypePtr parse_ctype(const std::string& text,
                     const EffectSignature& sig = EffectSignature::pure());

}  // namespace dcbpv
