#pragma once

#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

// The surface dependent type theory that the CBV and CBN passes translate
// into the core calculus. One term language serves both disciplines; the
// translation chosen decides how it is read. De Bruijn indexed, like the core.

namespace dcbpv::surface {

struct Term;
struct Type;
using TermPtr = std::shared_ptr<const Term>;
using TypePtr = std::shared_ptr<const Type>;

struct SVar {
  std::size_t index;
};
struct SLet {
  TermPtr bound;
  TermPtr body;  // binds 1
};
struct SInj {
  std::size_t tag;
  std::size_t arity;
  TermPtr payload;
};
struct SPmSum {
  TermPtr scrutinee;
  std::vector<TermPtr> branches;  // branch binds 1
};
struct SNTuple {
  std::vector<TermPtr> items;  // n-ary lambda
};
struct SNProj {
  std::size_t tag;
  TermPtr target;
};
struct SLam {
  TermPtr body;  // binds 1
};
struct SApp {
  TermPtr arg;  // written arg ' fn
  TermPtr fn;
};
struct SUnit {};
struct SPmUnit {
  TermPtr scrutinee;
  TermPtr body;
};
struct SPair {
  TermPtr fst;
  TermPtr snd;
};
struct SPmPair {
  TermPtr scrutinee;
  TermPtr body;  // binds 2
};
struct SRefl {
  TermPtr subject;
};
struct SPmId {
  TermPtr scrutinee;
  TermPtr body;  // binds 1
};
struct SDiverge {};
struct SError {
  std::string name;
};
struct SMu {
  TermPtr body;  // binds 1
};
struct SPrint {
  std::string letter;
  TermPtr rest;
};
struct SChoose {
  std::vector<TermPtr> alternatives;
};
struct SWrite {
  std::string state;
  TermPtr rest;
};
struct SRead {
  std::vector<std::pair<std::string, TermPtr>> branches;
};

struct Term {
  std::variant<SVar, SLet, SInj, SPmSum, SNTuple, SNProj, SLam, SApp, SUnit,
               SPmUnit, SPair, SPmPair, SRefl, SPmId, SDiverge, SError, SMu,
               SPrint, SChoose, SWrite, SRead>
      node;
};

struct STOne {};
struct STSum {
  std::vector<TypePtr> items;
};
struct STProd {
  std::vector<TypePtr> items;  // n-ary function space
};
struct STPi {
  TypePtr base;
  TypePtr body;  // binds 1
};
struct STSigma {
  TypePtr base;
  TypePtr body;  // binds 1
};
struct STId {
  TypePtr carrier;
  TermPtr lhs;
  TermPtr rhs;
};

struct Type {
  std::variant<STOne, STSum, STProd, STPi, STSigma, STId> node;
};

template <typename Node>
TermPtr mk_term(Node n) {
  return std::make_shared<const Term>(Term{std::move(n)});
}
template <typename Node>
TypePtr mk_type(Node n) {
  return std::make_shared<const Type>(Type{std::move(n)});
}

}  // namespace dcbpv::surface
