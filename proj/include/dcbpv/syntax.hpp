#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

// Abstract syntax of the core calculus: values, computations, value types,
// computation types and machine stacks, all de Bruijn indexed. Nodes are
// immutable and shared; every operation below is a pure function.

namespace dcbpv {

struct Value;
struct Computation;
struct VType;
struct CType;
struct Stack;

using ValuePtr = std::shared_ptr<const Value>;
using CompPtr = std::shared_ptr<const Computation>;
using VTypePtr = std::shared_ptr<const VType>;
using CTypePtr = std::shared_ptr<const CType>;
using StackPtr = std::shared_ptr<const Stack>;

// ---------------------------------------------------------------------------
// Values

struct VVar {
  std::size_t index;  // de Bruijn, 0 = innermost binder
};
struct VThunk {
  CompPtr body;
};
struct VInj {
  std::size_t tag;  // 1-based, 1 <= tag <= arity
  std::size_t arity;
  ValuePtr payload;
};
struct VUnit {};
struct VPair {
  ValuePtr fst;
  ValuePtr snd;
};
struct VRefl {
  ValuePtr subject;
};
// Complex values: let and the pattern-matching eliminators at value level.
struct VLet {
  ValuePtr bound;
  ValuePtr body;  // binds 1
};
struct VPmSum {
  ValuePtr scrutinee;
  std::vector<ValuePtr> branches;  // branch i binds 1 (payload of tag i+1)
};
struct VPmUnit {
  ValuePtr scrutinee;
  ValuePtr body;  // binds 0
};
struct VPmPair {
  ValuePtr scrutinee;
  ValuePtr body;  // binds 2: fst at index 1, snd at index 0
};
struct VPmId {
  ValuePtr scrutinee;
  ValuePtr body;  // binds 1 (the common endpoint)
};

struct Value {
  std::variant<VVar, VThunk, VInj, VUnit, VPair, VRefl, VLet, VPmSum, VPmUnit,
               VPmPair, VPmId>
      node;
};

// ---------------------------------------------------------------------------
// Computations
//
// Motive fields are optional checker annotations (null when absent); they are
// never required for evaluation. Binding conventions:
//   CToIn motive binds 1 variable of thunk type (U F A);
//   CPmSum/CPmUnit/CPmPair motives bind 1 variable of the scrutinee's type;
//   CPmId motive binds 3: endpoint, endpoint', witness (innermost).

struct CReturn {
  ValuePtr value;
};
struct CToIn {
  CompPtr head;
  CTypePtr motive;  // nullable
  CompPtr body;     // binds 1
};
struct CForce {
  ValuePtr value;
};
struct CLet {
  ValuePtr bound;
  CompPtr body;  // binds 1
};
struct CPmSum {
  ValuePtr scrutinee;
  CTypePtr motive;  // nullable
  std::vector<CompPtr> branches;  // branch binds 1
};
struct CPmUnit {
  ValuePtr scrutinee;
  CTypePtr motive;
  CompPtr body;  // binds 0
};
struct CPmPair {
  ValuePtr scrutinee;
  CTypePtr motive;
  CompPtr body;  // binds 2
};
struct CPmId {
  ValuePtr scrutinee;
  CTypePtr motive;
  CompPtr body;  // binds 1
};
struct CTuple {
  std::vector<CompPtr> items;
};
struct CProj {
  std::size_t tag;  // 1-based
  CompPtr target;
};
struct CLam {
  CompPtr body;  // binds 1
};
struct CApp {
  ValuePtr arg;
  CompPtr fn;
};
struct CDiverge {};
struct CError {
  std::string name;
};
struct CMu {
  CompPtr body;  // binds 1 (thunk of the whole computation)
};
struct CPrint {
  std::string letter;
  CompPtr rest;
};
struct CChoose {
  std::vector<CompPtr> alternatives;  // nonempty
};
struct CWrite {
  std::string state;
  CompPtr rest;
};
struct CRead {
  std::vector<std::pair<std::string, CompPtr>> branches;  // one per state
};

struct Computation {
  std::variant<CReturn, CToIn, CForce, CLet, CPmSum, CPmUnit, CPmPair, CPmId,
               CTuple, CProj, CLam, CApp, CDiverge, CError, CMu, CPrint,
               CChoose, CWrite, CRead>
      node;
};

// ---------------------------------------------------------------------------
// Types

struct TU {
  CTypePtr body;
};
struct TSumN {
  std::vector<VTypePtr> items;  // arity >= 0
};
struct TOne {};
struct TSigma {
  VTypePtr base;
  VTypePtr fiber;  // binds 1
};
struct TId {
  VTypePtr carrier;
  ValuePtr lhs;
  ValuePtr rhs;
};

struct VType {
  std::variant<TU, TSumN, TOne, TSigma, TId> node;
};

struct TF {
  VTypePtr value;
};
struct TPiN {
  std::vector<CTypePtr> items;  // arity >= 0 (0 is top)
};
struct TPi {
  VTypePtr base;
  CTypePtr body;  // binds 1
};

struct CType {
  std::variant<TF, TPiN, TPi> node;
};

// ---------------------------------------------------------------------------
// Stacks (no frame binds variables visible to later frames)

struct SNil {};
struct SToFrame {
  CompPtr body;  // binds 1
  StackPtr rest;
};
struct SProjFrame {
  std::size_t tag;  // 1-based
  StackPtr rest;
};
struct SArgFrame {
  ValuePtr arg;
  StackPtr rest;
};

struct Stack {
  std::variant<SNil, SToFrame, SProjFrame, SArgFrame> node;
};

// ---------------------------------------------------------------------------
// Construction helpers

template <typename Node>
ValuePtr mk_value(Node n) {
  return std::make_shared<const Value>(Value{std::move(n)});
}
template <typename Node>
CompPtr mk_comp(Node n) {
  return std::make_shared<const Computation>(Computation{std::move(n)});
}
template <typename Node>
VTypePtr mk_vtype(Node n) {
  return std::make_shared<const VType>(VType{std::move(n)});
}
template <typename Node>
CTypePtr mk_ctype(Node n) {
  return std::make_shared<const CType>(CType{std::move(n)});
}
template <typename Node>
StackPtr mk_stack(Node n) {
  return std::make_shared<const Stack>(Stack{std::move(n)});
}

ValuePtr vvar(std::size_t index);
ValuePtr vthunk(CompPtr body);
ValuePtr vinj(std::size_t tag, std::size_t arity, ValuePtr payload);
ValuePtr vunit();
ValuePtr vpair(ValuePtr fst, ValuePtr snd);
ValuePtr vrefl(ValuePtr subject);
ValuePtr vlet(ValuePtr bound, ValuePtr body);
ValuePtr vpm_sum(ValuePtr scrutinee, std::vector<ValuePtr> branches);
ValuePtr vpm_unit(ValuePtr scrutinee, ValuePtr body);
ValuePtr vpm_pair(ValuePtr scrutinee, ValuePtr body);
ValuePtr vpm_id(ValuePtr scrutinee, ValuePtr body);

CompPtr creturn(ValuePtr v);
CompPtr cto_in(CompPtr head, CompPtr body, CTypePtr motive = nullptr);
CompPtr cforce(ValuePtr v);
CompPtr clet(ValuePtr bound, CompPtr body);
CompPtr cpm_sum(ValuePtr scrutinee, std::vector<CompPtr> branches,
                CTypePtr motive = nullptr);
CompPtr cpm_unit(ValuePtr scrutinee, CompPtr body, CTypePtr motive = nullptr);
CompPtr cpm_pair(ValuePtr scrutinee, CompPtr body, CTypePtr motive = nullptr);
CompPtr cpm_id(ValuePtr scrutinee, CompPtr body, CTypePtr motive = nullptr);
CompPtr ctuple(std::vector<CompPtr> items);
CompPtr cproj(std::size_t tag, CompPtr target);
CompPtr clam(CompPtr body);
CompPtr capp(ValuePtr arg, CompPtr fn);
CompPtr cdiverge();
CompPtr cerror(std::string name);
CompPtr cmu(CompPtr body);
CompPtr cprint(std::string letter, CompPtr rest);
CompPtr cchoose(std::vector<CompPtr> alternatives);
CompPtr cwrite(std::string state, CompPtr rest);
CompPtr cread(std::vector<std::pair<std::string, CompPtr>> branches);

VTypePtr t_u(CTypePtr body);
VTypePtr t_sum(std::vector<VTypePtr> items);
VTypePtr t_one();
VTypePtr t_sigma(VTypePtr base, VTypePtr fiber);
VTypePtr t_id(VTypePtr carrier, ValuePtr lhs, ValuePtr rhs);
CTypePtr t_f(VTypePtr value);
CTypePtr t_pin(std::vector<CTypePtr> items);
CTypePtr t_pi(VTypePtr base, CTypePtr body);

StackPtr snil();
StackPtr sto_frame(CompPtr body, StackPtr rest);
StackPtr sproj_frame(std::size_t tag, StackPtr rest);
StackPtr sarg_frame(ValuePtr arg, StackPtr rest);

// `tr V` = thunk (return V), the standard coercion of a value into a thunked
// trivial computation.
ValuePtr tr(ValuePtr v);

// ---------------------------------------------------------------------------
// Index manipulation

class NegativeIndexError : public std::runtime_error {
 public:
  NegativeIndexError() : std::runtime_error("de Bruijn index went below 0") {}
};

// Displace free indices >= cutoff by amount. Throws NegativeIndexError when an
// index would drop below zero.
ValuePtr shift(const ValuePtr& t, long long amount, std::size_t cutoff = 0);
CompPtr shift(const CompPtr& t, long long amount, std::size_t cutoff = 0);
VTypePtr shift(const VTypePtr& t, long long amount, std::size_t cutoff = 0);
CTypePtr shift(const CTypePtr& t, long long amount, std::size_t cutoff = 0);
StackPtr shift(const StackPtr& t, long long amount, std::size_t cutoff = 0);

// Capture-avoiding substitution of v for the free index `index`; indices above
// it are decremented. v must be well-scoped in the target's context with that
// position removed.
ValuePtr subst(const ValuePtr& t, const ValuePtr& v, std::size_t index = 0);
CompPtr subst(const CompPtr& t, const ValuePtr& v, std::size_t index = 0);
VTypePtr subst(const VTypePtr& t, const ValuePtr& v, std::size_t index = 0);
CTypePtr subst(const CTypePtr& t, const ValuePtr& v, std::size_t index = 0);
StackPtr subst(const StackPtr& t, const ValuePtr& v, std::size_t index = 0);

// Simultaneous substitution of body[snd/0, fst/1] (pattern-match on pairs).
CompPtr subst2(const CompPtr& body, const ValuePtr& fst, const ValuePtr& snd);
ValuePtr subst2(const ValuePtr& body, const ValuePtr& fst, const ValuePtr& snd);

// Exact tree equality (tags, arities, indices, motives included).
bool structural_eq(const ValuePtr& a, const ValuePtr& b);
bool structural_eq(const CompPtr& a, const CompPtr& b);
bool structural_eq(const VTypePtr& a, const VTypePtr& b);
bool structural_eq(const CTypePtr& a, const CTypePtr& b);
bool structural_eq(const StackPtr& a, const StackPtr& b);

// Tree equality that ignores motive annotations (judgmental comparison works
// on annotation-erased terms).
bool eq_modulo_motives(const ValuePtr& a, const ValuePtr& b);
bool eq_modulo_motives(const CompPtr& a, const CompPtr& b);
bool eq_modulo_motives(const VTypePtr& a, const VTypePtr& b);
bool eq_modulo_motives(const CTypePtr& a, const CTypePtr& b);

// True iff no term-level value subterm of m is a let or pattern match. Values
// embedded in types (Id endpoints, motives) are exempt: complex values stay
// legal inside types.
bool is_complex_value_free(const CompPtr& m);
bool is_complex_value_free(const ValuePtr& v);

// Scope validation: all free indices < n.
bool well_scoped(const ValuePtr& t, std::size_t n);
bool well_scoped(const CompPtr& t, std::size_t n);
bool well_scoped(const VTypePtr& t, std::size_t n);
bool well_scoped(const CTypePtr& t, std::size_t n);
bool well_scoped(const StackPtr& t, std::size_t n);

// Does the free index j occur?
bool uses_index(const ValuePtr& t, std::size_t j);
bool uses_index(const CompPtr& t, std::size_t j);
bool uses_index(const VTypePtr& t, std::size_t j);
bool uses_index(const CTypePtr& t, std::size_t j);

// Swap the free indices a and b (used by the to-in commutation rules).
CompPtr swap_indices(const CompPtr& t, std::size_t a, std::size_t b);

// Visitor helper.
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace dcbpv
