#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dcbpv/effects.hpp"
#include "dcbpv/normalize.hpp"
#include "dcbpv/syntax.hpp"

// Bidirectional typing for the core calculus, mode-switched between the
// restricted discipline (no dependent sequencing) and the extended one
// (sequencing result types may mention the thunk of the sequenced
// computation), the latter optionally closed under the effect subtyping
// rules that keep machine transitions type-preserving for printing, global
// state and erratic choice.

namespace dcbpv {

enum class Mode { Minus, Plus };

struct CheckOptions {
  Mode mode = Mode::Minus;
  bool subtyping = true;  // consulted in Plus mode only
  NormalizeOptions norm;

  static CheckOptions minus() { return {}; }
  static CheckOptions plus(bool subtyping = true) {
    CheckOptions o;
    o.mode = Mode::Plus;
    o.subtyping = subtyping;
    o.norm.mu_unfold = 1;
    return o;
  }
};

enum class ErrKind {
  Mismatch,
  DependentSequencingNotAllowed,
  UnboundIndex,
  ArityMismatch,
  EffectNotEnabled,
  MotiveRequired,
  SubtypeFailure,
  FuelExhausted,
};

const char* to_string(ErrKind k);

class TypeError : public std::runtime_error {
 public:
  TypeError(ErrKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind(kind) {}
  ErrKind kind;
};

// A telescope of value types; entry k is scoped over entries 0..k-1.
class Context {
 public:
  Context() = default;
  explicit Context(std::vector<VTypePtr> entries)
      : entries_(std::move(entries)) {}

  std::size_t size() const { return entries_.size(); }
  // Type of variable `index` (0 innermost), shifted into the full context.
  VTypePtr lookup(std::size_t index) const;
  // The type as written, in its own prefix.
  const VTypePtr& raw(std::size_t k) const { return entries_[k]; }
  Context extended(VTypePtr entry) const;

 private:
  std::vector<VTypePtr> entries_;
};

class Checker {
 public:
  Checker(const EffectSignature& sig, CheckOptions opts = {})
      : sig_(sig), opts_(opts) {}

  const CheckOptions& options() const { return opts_; }
  const EffectSignature& signature() const { return sig_; }

  void check_context(const Context& g) const;
  void check_vtype(const Context& g, const VTypePtr& a) const;
  void check_ctype(const Context& g, const CTypePtr& b) const;

  VTypePtr infer_value(const Context& g, const ValuePtr& v) const;
  void check_value(const Context& g, const ValuePtr& v,
                   const VTypePtr& a) const;
  CTypePtr infer_computation(const Context& g, const CompPtr& m) const;
  void check_computation(const Context& g, const CompPtr& m,
                         const CTypePtr& b) const;

  // The directed inclusion generated by the print/write/choose/read rules at
  // thunked-computation positions, closed under congruence and conversion.
  bool subtype_ctype(const Context& g, const CTypePtr& sub,
                     const CTypePtr& super) const;
  bool subtype_vtype(const Context& g, const VTypePtr& sub,
                     const VTypePtr& super) const;

  void check_stack(const Context& g, const CTypePtr& stoup, const StackPtr& k,
                   const CTypePtr& target) const;
  // A configuration types at C when the computation rebuilt from the stack
  // does; the dissection rules for the four frame forms are exactly the
  // typing rules of the rebuilt term.
  void check_configuration(const CompPtr& m, const StackPtr& k,
                           const CTypePtr& target) const;

  // Rebuild the computation a configuration denotes.
  static CompPtr unload(CompPtr m, const StackPtr& k);

  // Accepts `sub` at `super`: conversion, or subtyping when enabled.
  bool type_leq(const Context& g, const CTypePtr& sub,
                const CTypePtr& super) const;

 private:
  const EffectSignature& sig_;
  CheckOptions opts_;

  bool plus() const { return opts_.mode == Mode::Plus; }
  bool subtyping_on() const { return plus() && opts_.subtyping; }

  void check_computation_inner(const Context& g, const CompPtr& m,
                               const CTypePtr& b) const;
  CTypePtr join_branch_types(const Context& g, std::vector<CTypePtr> types,
                             const std::vector<std::string>& read_labels,
                             bool is_read) const;
};

}  // namespace dcbpv
