#include "dcbpv/typecheck.hpp"

#include <algorithm>
#include <set>

#include "dcbpv/pretty.hpp"

namespace dcbpv {

const char* to_string(ErrKind k) {
  switch (k) {
    case ErrKind::Mismatch: return "Mismatch";
    case ErrKind::DependentSequencingNotAllowed:
      return "DependentSequencingNotAllowed";
    case ErrKind::UnboundIndex: return "UnboundIndex";
    case ErrKind::ArityMismatch: return "ArityMismatch";
    case ErrKind::EffectNotEnabled: return "EffectNotEnabled";
    case ErrKind::MotiveRequired: return "MotiveRequired";
    case ErrKind::SubtypeFailure: return "SubtypeFailure";
    case ErrKind::FuelExhausted: return "FuelExhausted";
  }
  return "unknown";
}

VTypePtr Context::lookup(std::size_t index) const {
  if (index >= entries_.size())
    throw TypeError(ErrKind::UnboundIndex,
                    "variable " + std::to_string(index) +
                        " out of scope (context has " +
                        std::to_string(entries_.size()) + " entries)");
  return shift(entries_[entries_.size() - 1 - index],
               static_cast<long long>(index) + 1, 0);
}

Context Context::extended(VTypePtr entry) const {
  std::vector<VTypePtr> es = entries_;
  es.push_back(std::move(entry));
  return Context(std::move(es));
}

namespace {

[[noreturn]] void fail(ErrKind kind, const std::string& msg) {
  throw TypeError(kind, msg);
}

// ---------------------------------------------------------------------------
// Replacement of a value pattern by a variable (motive reconstruction). The
// pattern is matched syntactically (motive annotations ignored), outermost
// occurrences first. pattern and the replacement index are relative to the
// traversal root.

struct ReplaceValue {
  ValuePtr pattern;
  std::size_t var_index;

  ValuePtr value(const ValuePtr& t, std::size_t d) const {
    if (eq_modulo_motives(t, shift(pattern, static_cast<long long>(d), 0)))
      return vvar(var_index + d);
    return std::visit(
        overloaded{
            [&](const VVar&) { return t; },
            [&](const VThunk& n) { return vthunk(comp(n.body, d)); },
            [&](const VInj& n) {
              return vinj(n.tag, n.arity, value(n.payload, d));
            },
            [&](const VUnit&) { return t; },
            [&](const VPair& n) {
              return vpair(value(n.fst, d), value(n.snd, d));
            },
            [&](const VRefl& n) { return vrefl(value(n.subject, d)); },
            [&](const VLet& n) {
              return vlet(value(n.bound, d), value(n.body, d + 1));
            },
            [&](const VPmSum& n) {
              std::vector<ValuePtr> bs;
              for (const auto& b : n.branches) bs.push_back(value(b, d + 1));
              return vpm_sum(value(n.scrutinee, d), std::move(bs));
            },
            [&](const VPmUnit& n) {
              return vpm_unit(value(n.scrutinee, d), value(n.body, d));
            },
            [&](const VPmPair& n) {
              return vpm_pair(value(n.scrutinee, d), value(n.body, d + 2));
            },
            [&](const VPmId& n) {
              return vpm_id(value(n.scrutinee, d), value(n.body, d + 1));
            },
        },
        t->node);
  }

  CompPtr comp(const CompPtr& t, std::size_t d) const {
    return std::visit(
        overloaded{
            [&](const CReturn& n) { return creturn(value(n.value, d)); },
            [&](const CToIn& n) {
              return cto_in(comp(n.head, d), comp(n.body, d + 1),
                            n.motive ? ctype(n.motive, d + 1) : nullptr);
            },
            [&](const CForce& n) { return cforce(value(n.value, d)); },
            [&](const CLet& n) {
              return clet(value(n.bound, d), comp(n.body, d + 1));
            },
            [&](const CPmSum& n) {
              std::vector<CompPtr> bs;
              for (const auto& b : n.branches) bs.push_back(comp(b, d + 1));
              return cpm_sum(value(n.scrutinee, d), std::move(bs),
                             n.motive ? ctype(n.motive, d + 1) : nullptr);
            },
            [&](const CPmUnit& n) {
              return cpm_unit(value(n.scrutinee, d), comp(n.body, d),
                              n.motive ? ctype(n.motive, d + 1) : nullptr);
            },
            [&](const CPmPair& n) {
              return cpm_pair(value(n.scrutinee, d), comp(n.body, d + 2),
                              n.motive ? ctype(n.motive, d + 1) : nullptr);
            },
            [&](const CPmId& n) {
              return cpm_id(value(n.scrutinee, d), comp(n.body, d + 1),
                            n.motive ? ctype(n.motive, d + 3) : nullptr);
            },
            [&](const CTuple& n) {
              std::vector<CompPtr> is;
              for (const auto& i : n.items) is.push_back(comp(i, d));
              return ctuple(std::move(is));
            },
            [&](const CProj& n) { return cproj(n.tag, comp(n.target, d)); },
            [&](const CLam& n) { return clam(comp(n.body, d + 1)); },
            [&](const CApp& n) {
              return capp(value(n.arg, d), comp(n.fn, d));
            },
            [&](const CDiverge&) { return t; },
            [&](const CError&) { return t; },
            [&](const CMu& n) { return cmu(comp(n.body, d + 1)); },
            [&](const CPrint& n) {
              return cprint(n.letter, comp(n.rest, d));
            },
            [&](const CChoose& n) {
              std::vector<CompPtr> as;
              for (const auto& a : n.alternatives) as.push_back(comp(a, d));
              return cchoose(std::move(as));
            },
            [&](const CWrite& n) { return cwrite(n.state, comp(n.rest, d)); },
            [&](const CRead& n) {
              std::vector<std::pair<std::string, CompPtr>> bs;
              for (const auto& [s, m] : n.branches)
                bs.emplace_back(s, comp(m, d));
              return cread(std::move(bs));
            },
        },
        t->node);
  }

  VTypePtr vtype(const VTypePtr& t, std::size_t d) const {
    return std::visit(
        overloaded{
            [&](const TU& n) { return t_u(ctype(n.body, d)); },
            [&](const TSumN& n) {
              std::vector<VTypePtr> is;
              for (const auto& i : n.items) is.push_back(vtype(i, d));
              return t_sum(std::move(is));
            },
            [&](const TOne&) { return t; },
            [&](const TSigma& n) {
              return t_sigma(vtype(n.base, d), vtype(n.fiber, d + 1));
            },
            [&](const TId& n) {
              return t_id(vtype(n.carrier, d), value(n.lhs, d),
                          value(n.rhs, d));
            },
        },
        t->node);
  }

  CTypePtr ctype(const CTypePtr& t, std::size_t d) const {
    return std::visit(
        overloaded{
            [&](const TF& n) { return t_f(vtype(n.value, d)); },
            [&](const TPiN& n) {
              std::vector<CTypePtr> is;
              for (const auto& i : n.items) is.push_back(ctype(i, d));
              return t_pin(std::move(is));
            },
            [&](const TPi& n) {
              return t_pi(vtype(n.base, d), ctype(n.body, d + 1));
            },
        },
        t->node);
  }
};

CTypePtr abstract_value_in_ctype(const CTypePtr& t, const ValuePtr& pattern) {
  // Result lives one binder up: occurrences of `pattern` become var 0.
  CTypePtr lifted = shift(t, 1, 0);
  ValuePtr lifted_pattern = shift(pattern, 1, 0);
  return ReplaceValue{lifted_pattern, 0}.ctype(lifted, 0);
}

// ---- motive instantiation helpers (see binding conventions in syntax.hpp)

ValuePtr tr_var0() { return tr(vvar(0)); }

// motive over (g, z) -> body type over (g, x), z := tr x
CTypePtr toin_body_type(const CTypePtr& motive) {
  return subst(shift(motive, 1, 1), tr_var0(), 0);
}
CTypePtr pm_sum_branch_type(const CTypePtr& motive, std::size_t tag,
                            std::size_t arity) {
  return subst(shift(motive, 1, 1), vinj(tag, arity, vvar(0)), 0);
}
CTypePtr pm_unit_branch_type(const CTypePtr& motive) {
  return subst(motive, vunit(), 0);
}
CTypePtr pm_pair_branch_type(const CTypePtr& motive) {
  return subst(shift(motive, 2, 1), vpair(vvar(1), vvar(0)), 0);
}
// motive over (g, x, x', p) -> branch type over (g, x): p := refl x', x' := x
CTypePtr pm_id_branch_type(const CTypePtr& motive) {
  return subst(subst(motive, vrefl(vvar(0)), 0), vvar(0), 0);
}
CTypePtr pm_id_result_type(const CTypePtr& motive, const ValuePtr& lhs,
                           const ValuePtr& rhs, const ValuePtr& witness) {
  CTypePtr s1 = subst(motive, shift(witness, 2, 0), 0);
  CTypePtr s2 = subst(s1, shift(rhs, 1, 0), 0);
  return subst(s2, lhs, 0);
}

}  // namespace

// ---------------------------------------------------------------------------
// Formation

void Checker::check_context(const Context& g) const {
  Context prefix;
  for (std::size_t k = 0; k < g.size(); ++k) {
    check_vtype(prefix, g.raw(k));
    prefix = prefix.extended(g.raw(k));
  }
}

void Checker::check_vtype(const Context& g, const VTypePtr& a) const {
  std::visit(
      overloaded{
          [&](const TU& n) { check_ctype(g, n.body); },
          [&](const TSumN& n) {
            for (const auto& i : n.items) check_vtype(g, i);
          },
          [&](const TOne&) {},
          [&](const TSigma& n) {
            check_vtype(g, n.base);
            check_vtype(g.extended(n.base), n.fiber);
          },
          [&](const TId& n) {
            check_vtype(g, n.carrier);
            check_value(g, n.lhs, n.carrier);
            check_value(g, n.rhs, n.carrier);
          },
      },
      a->node);
}

void Checker::check_ctype(const Context& g, const CTypePtr& b) const {
  std::visit(
      overloaded{
          [&](const TF& n) { check_vtype(g, n.value); },
          [&](const TPiN& n) {
            for (const auto& i : n.items) check_ctype(g, i);
          },
          [&](const TPi& n) {
            check_vtype(g, n.base);
            check_ctype(g.extended(n.base), n.body);
          },
      },
      b->node);
}

// ---------------------------------------------------------------------------
// Values

VTypePtr Checker::infer_value(const Context& g, const ValuePtr& v) const {
  return std::visit(
      overloaded{
          [&](const VVar& n) { return g.lookup(n.index); },
          [&](const VThunk& n) { return t_u(infer_computation(g, n.body)); },
          [&](const VInj& n) -> VTypePtr {
            if (n.tag < 1 || n.tag > n.arity)
              fail(ErrKind::ArityMismatch,
                   "injection tag " + std::to_string(n.tag) +
                       " out of range for arity " + std::to_string(n.arity));
            // Only the payload's component is determined; infer the
            // homogeneous sum. Heterogeneous sums need a checking position.
            VTypePtr payload = infer_value(g, n.payload);
            std::vector<VTypePtr> items(n.arity, payload);
            return t_sum(std::move(items));
          },
          [&](const VUnit&) { return t_one(); },
          [&](const VPair& n) {
            VTypePtr a = infer_value(g, n.fst);
            VTypePtr b = infer_value(g, n.snd);
            return t_sigma(a, shift(b, 1, 0));
          },
          [&](const VRefl& n) {
            VTypePtr a = infer_value(g, n.subject);
            return t_id(a, n.subject, n.subject);
          },
          [&](const VLet& n) {
            VTypePtr a = infer_value(g, n.bound);
            VTypePtr b = infer_value(g.extended(a), n.body);
            return subst(b, n.bound, 0);
          },
          [&](const VPmSum& n) -> VTypePtr {
            VTypePtr st = infer_value(g, n.scrutinee);
            const auto* sum = std::get_if<TSumN>(&st->node);
            if (!sum)
              fail(ErrKind::Mismatch,
                   "pattern match on a sum needs a sum-typed scrutinee, got " +
                       pretty(st, g.size()));
            if (sum->items.size() != n.branches.size())
              fail(ErrKind::ArityMismatch,
                   "sum has " + std::to_string(sum->items.size()) +
                       " components but match has " +
                       std::to_string(n.branches.size()) + " branches");
            VTypePtr result;
            for (std::size_t i = 0; i < n.branches.size(); ++i) {
              VTypePtr bi =
                  infer_value(g.extended(sum->items[i]), n.branches[i]);
              if (uses_index(bi, 0))
                fail(ErrKind::MotiveRequired,
                     "branch type depends on the bound variable; "
                     "a motive is required");
              VTypePtr lowered = shift(bi, -1, 0);
              if (!result)
                result = lowered;
              else if (!conv_vtype(result, lowered, opts_.norm))
                fail(ErrKind::Mismatch, "branches disagree: " +
                                            pretty(result, g.size()) +
                                            " vs " +
                                            pretty(lowered, g.size()));
            }
            if (!result) fail(ErrKind::MotiveRequired,
                              "empty pattern match needs a motive");
            return result;
          },
          [&](const VPmUnit& n) {
            check_value(g, n.scrutinee, t_one());
            return infer_value(g, n.body);
          },
          [&](const VPmPair& n) -> VTypePtr {
            VTypePtr st = infer_value(g, n.scrutinee);
            const auto* sg = std::get_if<TSigma>(&st->node);
            if (!sg)
              fail(ErrKind::Mismatch,
                   "pattern match on a pair needs a pair-typed scrutinee, "
                   "got " +
                       pretty(st, g.size()));
            Context g2 = g.extended(sg->base).extended(sg->fiber);
            VTypePtr b = infer_value(g2, n.body);
            if (uses_index(b, 0) || uses_index(b, 1))
              fail(ErrKind::MotiveRequired,
                   "branch type depends on the bound variables; "
                   "a motive is required");
            return shift(b, -2, 0);
          },
          [&](const VPmId& n) -> VTypePtr {
            VTypePtr st = infer_value(g, n.scrutinee);
            const auto* id = std::get_if<TId>(&st->node);
            if (!id)
              fail(ErrKind::Mismatch,
                   "pattern match on an identity witness needs an Id-typed "
                   "scrutinee, got " +
                       pretty(st, g.size()));
            VTypePtr b = infer_value(g.extended(id->carrier), n.body);
            if (uses_index(b, 0))
              fail(ErrKind::MotiveRequired,
                   "branch type depends on the bound variable; "
                   "a motive is required");
            return shift(b, -1, 0);
          },
      },
      v->node);
}

void Checker::check_value(const Context& g, const ValuePtr& v,
                          const VTypePtr& a) const {
  if (const auto* th = std::get_if<VThunk>(&v->node)) {
    const auto* u = std::get_if<TU>(&a->node);
    if (!u)
      fail(ErrKind::Mismatch,
           "a thunk checks only against U-types, expected " +
               pretty(a, g.size()));
    check_computation(g, th->body, u->body);
    return;
  }
  if (const auto* inj = std::get_if<VInj>(&v->node)) {
    const auto* sum = std::get_if<TSumN>(&a->node);
    if (!sum)
      fail(ErrKind::Mismatch, "an injection checks only against sum types, "
                              "expected " +
                                  pretty(a, g.size()));
    if (inj->arity != sum->items.size())
      fail(ErrKind::ArityMismatch,
           "injection arity " + std::to_string(inj->arity) +
               " does not match sum arity " +
               std::to_string(sum->items.size()));
    if (inj->tag < 1 || inj->tag > inj->arity)
      fail(ErrKind::ArityMismatch,
           "injection tag " + std::to_string(inj->tag) + " out of range");
    check_value(g, inj->payload, sum->items[inj->tag - 1]);
    return;
  }
  if (std::holds_alternative<VUnit>(v->node)) {
    if (!std::holds_alternative<TOne>(a->node))
      fail(ErrKind::Mismatch,
           "() has type 1, expected " + pretty(a, g.size()));
    return;
  }
  if (const auto* pr = std::get_if<VPair>(&v->node)) {
    const auto* sg = std::get_if<TSigma>(&a->node);
    if (!sg)
      fail(ErrKind::Mismatch,
           "a pair checks only against Sg-types, expected " +
               pretty(a, g.size()));
    check_value(g, pr->fst, sg->base);
    check_value(g, pr->snd, subst(sg->fiber, pr->fst, 0));
    return;
  }
  if (const auto* r = std::get_if<VRefl>(&v->node)) {
    const auto* id = std::get_if<TId>(&a->node);
    if (!id)
      fail(ErrKind::Mismatch,
           "refl checks only against Id-types, expected " +
               pretty(a, g.size()));
    check_value(g, r->subject, id->carrier);
    if (conv_value(r->subject, id->lhs, id->carrier, opts_.norm) &&
        conv_value(r->subject, id->rhs, id->carrier, opts_.norm))
      return;
    if (subtyping_on() &&
        subtype_vtype(g, t_id(id->carrier, r->subject, r->subject), a))
      return;
    fail(ErrKind::Mismatch,
         "refl " + pretty(r->subject, g.size()) + " does not inhabit " +
             pretty(a, g.size()));
  }
  if (const auto* let = std::get_if<VLet>(&v->node)) {
    VTypePtr bt = infer_value(g, let->bound);
    (void)bt;
    check_value(g, subst(let->body, let->bound, 0), a);
    return;
  }
  if (const auto* pm = std::get_if<VPmSum>(&v->node)) {
    VTypePtr st = infer_value(g, pm->scrutinee);
    const auto* sum = std::get_if<TSumN>(&st->node);
    if (!sum)
      fail(ErrKind::Mismatch, "pattern match on a sum needs a sum-typed "
                              "scrutinee, got " +
                                  pretty(st, g.size()));
    if (sum->items.size() != pm->branches.size())
      fail(ErrKind::ArityMismatch,
           "sum arity " + std::to_string(sum->items.size()) +
               " vs branch count " + std::to_string(pm->branches.size()));
    // Reconstruct the motive by abstracting the scrutinee from the
    // expected type.
    VTypePtr lifted = shift(a, 1, 0);
    ValuePtr pattern = shift(pm->scrutinee, 1, 0);
    VTypePtr motive = ReplaceValue{pattern, 0}.vtype(lifted, 0);
    for (std::size_t i = 0; i < pm->branches.size(); ++i) {
      VTypePtr branch_ty =
          subst(shift(motive, 1, 1),
                vinj(i + 1, sum->items.size(), vvar(0)), 0);
      check_value(g.extended(sum->items[i]), pm->branches[i], branch_ty);
    }
    return;
  }
  if (const auto* pm = std::get_if<VPmUnit>(&v->node)) {
    check_value(g, pm->scrutinee, t_one());
    VTypePtr lifted = shift(a, 1, 0);
    VTypePtr motive =
        ReplaceValue{shift(pm->scrutinee, 1, 0), 0}.vtype(lifted, 0);
    check_value(g, pm->body, subst(motive, vunit(), 0));
    return;
  }
  if (const auto* pm = std::get_if<VPmPair>(&v->node)) {
    VTypePtr st = infer_value(g, pm->scrutinee);
    const auto* sg = std::get_if<TSigma>(&st->node);
    if (!sg)
      fail(ErrKind::Mismatch, "pattern match on a pair needs a pair-typed "
                              "scrutinee, got " +
                                  pretty(st, g.size()));
    VTypePtr lifted = shift(a, 1, 0);
    VTypePtr motive =
        ReplaceValue{shift(pm->scrutinee, 1, 0), 0}.vtype(lifted, 0);
    VTypePtr branch_ty =
        subst(shift(motive, 2, 1), vpair(vvar(1), vvar(0)), 0);
    check_value(g.extended(sg->base).extended(sg->fiber), pm->body, branch_ty);
    return;
  }
  if (const auto* pm = std::get_if<VPmId>(&v->node)) {
    VTypePtr st = infer_value(g, pm->scrutinee);
    const auto* id = std::get_if<TId>(&st->node);
    if (!id)
      fail(ErrKind::Mismatch, "pattern match on an identity witness needs an "
                              "Id-typed scrutinee, got " +
                                  pretty(st, g.size()));
    // Abstract the witness; endpoints stay fixed, the branch is checked with
    // p := refl x over the common endpoint.
    VTypePtr lifted = shift(a, 1, 0);
    VTypePtr motive =
        ReplaceValue{shift(pm->scrutinee, 1, 0), 0}.vtype(lifted, 0);
    VTypePtr branch_ty = subst(shift(motive, 1, 1), vrefl(vvar(0)), 0);
    check_value(g.extended(id->carrier), pm->body, branch_ty);
    return;
  }

  // Variables and anything else: infer and compare.
  VTypePtr inferred = infer_value(g, v);
  if (conv_vtype(inferred, a, opts_.norm)) return;
  if (subtyping_on() && subtype_vtype(g, inferred, a)) return;
  fail(ErrKind::Mismatch, "value has type " + pretty(inferred, g.size()) +
                              ", expected " + pretty(a, g.size()));
}

// ---------------------------------------------------------------------------
// Computations

CTypePtr Checker::infer_computation(const Context& g, const CompPtr& m) const {
  return std::visit(
      overloaded{
          [&](const CReturn& n) { return t_f(infer_value(g, n.value)); },
          [&](const CToIn& n) -> CTypePtr {
            CTypePtr ht;
            try {
              ht = infer_computation(g, n.head);
            } catch (const TypeError& e) {
              // Lambdas and tuples are never F-typed.
              if (e.kind == ErrKind::MotiveRequired &&
                  (std::holds_alternative<CLam>(n.head->node) ||
                   std::holds_alternative<CTuple>(n.head->node)))
                fail(ErrKind::Mismatch,
                     "sequencing needs an F-typed head");
              throw;
            }
            const auto* f = std::get_if<TF>(&ht->node);
            if (!f)
              fail(ErrKind::Mismatch,
                   "sequencing needs an F-typed head, got " +
                       pretty(ht, g.size()));
            const VTypePtr& a = f->value;
            Context g2 = g.extended(a);
            if (n.motive) {
              check_ctype(g.extended(t_u(t_f(a))), n.motive);
              check_computation(g2, n.body, toin_body_type(n.motive));
              if (!uses_index(n.motive, 0))
                return shift(n.motive, -1, 0);
              if (!plus()) {
                CompPtr hnf = normalize(n.head, opts_.norm).term;
                if (const auto* r = std::get_if<CReturn>(&hnf->node))
                  return subst(n.motive, tr(r->value), 0);
                fail(ErrKind::DependentSequencingNotAllowed,
                     "the result type mentions the sequenced computation; "
                     "dependent Kleisli extensions are not available in "
                     "minus mode");
              }
              return subst(n.motive, vthunk(n.head), 0);
            }
            CTypePtr b = infer_computation(g2, n.body);
            if (!uses_index(b, 0)) return shift(b, -1, 0);
            CompPtr hnf = normalize(n.head, opts_.norm).term;
            if (const auto* r = std::get_if<CReturn>(&hnf->node))
              return subst(b, r->value, 0);
            if (!plus())
              fail(ErrKind::DependentSequencingNotAllowed,
                   "the body's type mentions the bound variable; dependent "
                   "Kleisli extensions are not available in minus mode");
            // Reconstruct the motive by abstracting `tr x`.
            CTypePtr t0 = shift(b, 1, 1);  // over (g, z, x)
            CTypePtr t1 = ReplaceValue{tr_var0(), 1}.ctype(t0, 0);
            if (uses_index(t1, 0))
              fail(ErrKind::MotiveRequired,
                   "cannot reconstruct a sequencing motive: the body's type "
                   "mentions the bound variable other than as `thunk return "
                   "x`");
            CTypePtr motive = shift(t1, -1, 0);
            return subst(motive, vthunk(n.head), 0);
          },
          [&](const CForce& n) -> CTypePtr {
            VTypePtr vt = infer_value(g, n.value);
            const auto* u = std::get_if<TU>(&vt->node);
            if (!u)
              fail(ErrKind::Mismatch,
                   "force needs a U-typed value, got " + pretty(vt, g.size()));
            return u->body;
          },
          [&](const CLet& n) {
            VTypePtr a = infer_value(g, n.bound);
            CTypePtr b = infer_computation(g.extended(a), n.body);
            return subst(b, n.bound, 0);
          },
          [&](const CPmSum& n) -> CTypePtr {
            VTypePtr st = infer_value(g, n.scrutinee);
            const auto* sum = std::get_if<TSumN>(&st->node);
            if (!sum)
              fail(ErrKind::Mismatch,
                   "pattern match on a sum needs a sum-typed scrutinee, got " +
                       pretty(st, g.size()));
            if (sum->items.size() != n.branches.size())
              fail(ErrKind::ArityMismatch,
                   "sum arity " + std::to_string(sum->items.size()) +
                       " vs branch count " +
                       std::to_string(n.branches.size()));
            if (n.motive) {
              check_ctype(g.extended(st), n.motive);
              for (std::size_t i = 0; i < n.branches.size(); ++i)
                check_computation(
                    g.extended(sum->items[i]), n.branches[i],
                    pm_sum_branch_type(n.motive, i + 1, sum->items.size()));
              return subst(n.motive, n.scrutinee, 0);
            }
            std::vector<CTypePtr> branch_types;
            std::vector<std::size_t> pending;
            for (std::size_t i = 0; i < n.branches.size(); ++i) {
              CTypePtr bi;
              try {
                bi = infer_computation(g.extended(sum->items[i]),
                                       n.branches[i]);
              } catch (const TypeError& e) {
                if (e.kind != ErrKind::MotiveRequired) throw;
                pending.push_back(i);
                continue;
              }
              if (uses_index(bi, 0))
                fail(ErrKind::MotiveRequired,
                     "branch type depends on the bound variable; a motive is "
                     "required");
              branch_types.push_back(shift(bi, -1, 0));
            }
            if (branch_types.empty())
              fail(ErrKind::MotiveRequired,
                   "no branch of the pattern match is inferable; a motive "
                   "is required");
            for (const auto& bt : branch_types)
              if (!conv_ctype(branch_types.front(), bt, opts_.norm))
                fail(ErrKind::Mismatch,
                     "branches disagree: " +
                         pretty(branch_types.front(), g.size()) + " vs " +
                         pretty(bt, g.size()));
            // Branches that do not infer are checked against the common type.
            for (std::size_t i : pending)
              check_computation(g.extended(sum->items[i]), n.branches[i],
                                shift(branch_types.front(), 1, 0));
            return branch_types.front();
          },
          [&](const CPmUnit& n) -> CTypePtr {
            check_value(g, n.scrutinee, t_one());
            if (n.motive) {
              check_ctype(g.extended(t_one()), n.motive);
              check_computation(g, n.body, pm_unit_branch_type(n.motive));
              return subst(n.motive, n.scrutinee, 0);
            }
            return infer_computation(g, n.body);
          },
          [&](const CPmPair& n) -> CTypePtr {
            VTypePtr st = infer_value(g, n.scrutinee);
            const auto* sg = std::get_if<TSigma>(&st->node);
            if (!sg)
              fail(ErrKind::Mismatch,
                   "pattern match on a pair needs a pair-typed scrutinee, "
                   "got " +
                       pretty(st, g.size()));
            Context g2 = g.extended(sg->base).extended(sg->fiber);
            if (n.motive) {
              check_ctype(g.extended(st), n.motive);
              check_computation(g2, n.body, pm_pair_branch_type(n.motive));
              return subst(n.motive, n.scrutinee, 0);
            }
            CTypePtr b = infer_computation(g2, n.body);
            if (uses_index(b, 0) || uses_index(b, 1))
              fail(ErrKind::MotiveRequired,
                   "branch type depends on the bound variables; a motive is "
                   "required");
            return shift(b, -2, 0);
          },
          [&](const CPmId& n) -> CTypePtr {
            VTypePtr st = infer_value(g, n.scrutinee);
            const auto* id = std::get_if<TId>(&st->node);
            if (!id)
              fail(ErrKind::Mismatch,
                   "pattern match on an identity witness needs an Id-typed "
                   "scrutinee, got " +
                       pretty(st, g.size()));
            if (n.motive) {
              Context gm = g.extended(id->carrier)
                               .extended(shift(id->carrier, 1, 0))
                               .extended(t_id(shift(id->carrier, 2, 0),
                                              vvar(1), vvar(0)));
              check_ctype(gm, n.motive);
              check_computation(g.extended(id->carrier), n.body,
                                pm_id_branch_type(n.motive));
              return pm_id_result_type(n.motive, id->lhs, id->rhs,
                                       n.scrutinee);
            }
            CTypePtr b = infer_computation(g.extended(id->carrier), n.body);
            if (uses_index(b, 0))
              fail(ErrKind::MotiveRequired,
                   "branch type depends on the bound variable; a motive is "
                   "required");
            return shift(b, -1, 0);
          },
          [&](const CTuple& n) {
            std::vector<CTypePtr> items;
            for (const auto& i : n.items)
              items.push_back(infer_computation(g, i));
            return t_pin(std::move(items));
          },
          [&](const CProj& n) -> CTypePtr {
            // A projection out of a literal tuple infers through the
            // selected component; the rest only attempt inference.
            if (const auto* tup = std::get_if<CTuple>(&n.target->node)) {
              if (n.tag < 1 || n.tag > tup->items.size())
                fail(ErrKind::ArityMismatch,
                     "projection " + std::to_string(n.tag) +
                         " out of range for arity " +
                         std::to_string(tup->items.size()));
              for (std::size_t i = 0; i < tup->items.size(); ++i) {
                if (i + 1 == n.tag) continue;
                try {
                  (void)infer_computation(g, tup->items[i]);
                } catch (const TypeError& e) {
                  if (e.kind != ErrKind::MotiveRequired) throw;
                }
              }
              return infer_computation(g, tup->items[n.tag - 1]);
            }
            CTypePtr t = infer_computation(g, n.target);
            const auto* pin = std::get_if<TPiN>(&t->node);
            if (!pin)
              fail(ErrKind::Mismatch, "projection needs a Prod-typed "
                                      "computation, got " +
                                          pretty(t, g.size()));
            if (n.tag < 1 || n.tag > pin->items.size())
              fail(ErrKind::ArityMismatch,
                   "projection " + std::to_string(n.tag) +
                       " out of range for arity " +
                       std::to_string(pin->items.size()));
            return pin->items[n.tag - 1];
          },
          [&](const CLam&) -> CTypePtr {
            fail(ErrKind::MotiveRequired,
                 "cannot infer the type of a lambda; check it against an "
                 "expected Pi-type");
          },
          [&](const CApp& n) -> CTypePtr {
            // A literal beta redex infers through its contractum when the
            // argument's type cannot be inferred.
            if (const auto* lam = std::get_if<CLam>(&n.fn->node)) {
              try {
                VTypePtr a = infer_value(g, n.arg);
                CTypePtr bt = infer_computation(g.extended(a), lam->body);
                return subst(bt, n.arg, 0);
              } catch (const TypeError&) {
                return infer_computation(g, subst(lam->body, n.arg, 0));
              }
            }
            CTypePtr ft = infer_computation(g, n.fn);
            const auto* pi = std::get_if<TPi>(&ft->node);
            if (!pi)
              fail(ErrKind::Mismatch, "application needs a Pi-typed "
                                      "computation, got " +
                                          pretty(ft, g.size()));
            check_value(g, n.arg, pi->base);
            return subst(pi->body, n.arg, 0);
          },
          [&](const CDiverge&) -> CTypePtr {
            if (!sig_.diverge)
              fail(ErrKind::EffectNotEnabled, "diverge is not enabled");
            fail(ErrKind::MotiveRequired,
                 "diverge types at any computation type; check it against "
                 "an expected type");
          },
          [&](const CError& n) -> CTypePtr {
            if (!sig_.error || !sig_.has_error(n.name))
              fail(ErrKind::EffectNotEnabled,
                   "error '" + n.name + "' is not enabled");
            fail(ErrKind::MotiveRequired,
                 "error types at any computation type; check it against an "
                 "expected type");
          },
          [&](const CMu&) -> CTypePtr {
            if (!sig_.rec)
              fail(ErrKind::EffectNotEnabled, "recursion is not enabled");
            fail(ErrKind::MotiveRequired,
                 "cannot infer the type of a fixpoint; check it against an "
                 "expected type");
          },
          [&](const CPrint& n) -> CTypePtr {
            if (!sig_.print || !sig_.has_letter(n.letter))
              fail(ErrKind::EffectNotEnabled,
                   "print \"" + n.letter + "\" is not enabled");
            return infer_computation(g, n.rest);
          },
          [&](const CChoose& n) -> CTypePtr {
            if (!sig_.choose)
              fail(ErrKind::EffectNotEnabled, "choose is not enabled");
            if (n.alternatives.empty())
              fail(ErrKind::ArityMismatch, "choose needs at least one branch");
            std::vector<CTypePtr> types;
            std::vector<const CompPtr*> pending;
            for (const auto& alt : n.alternatives) {
              try {
                types.push_back(infer_computation(g, alt));
              } catch (const TypeError& e) {
                if (e.kind != ErrKind::MotiveRequired) throw;
                pending.push_back(&alt);
              }
            }
            if (types.empty())
              fail(ErrKind::MotiveRequired,
                   "no alternative of the choice is inferable");
            CTypePtr joined = join_branch_types(g, std::move(types), {}, false);
            for (const CompPtr* alt : pending)
              check_computation(g, *alt, joined);
            return joined;
          },
          [&](const CWrite& n) -> CTypePtr {
            if (!sig_.state || !sig_.has_state(n.state))
              fail(ErrKind::EffectNotEnabled,
                   "write '" + n.state + "' is not enabled");
            return infer_computation(g, n.rest);
          },
          [&](const CRead& n) -> CTypePtr {
            if (!sig_.state)
              fail(ErrKind::EffectNotEnabled, "read is not enabled");
            std::set<std::string> seen;
            std::vector<std::string> labels;
            for (const auto& [s, _] : n.branches) {
              if (!sig_.has_state(s))
                fail(ErrKind::EffectNotEnabled,
                     "read branch for undeclared state '" + s + "'");
              if (!seen.insert(s).second)
                fail(ErrKind::Mismatch, "duplicate read branch for '" + s + "'");
              labels.push_back(s);
            }
            for (const auto& s : sig_.states)
              if (!seen.count(s))
                fail(ErrKind::Mismatch,
                     "read is missing a branch for state '" + s + "'");
            std::vector<CTypePtr> types;
            std::vector<std::string> inferred_labels;
            std::vector<const CompPtr*> pending;
            for (const auto& [s, b] : n.branches) {
              try {
                types.push_back(infer_computation(g, b));
                inferred_labels.push_back(s);
              } catch (const TypeError& e) {
                if (e.kind != ErrKind::MotiveRequired) throw;
                pending.push_back(&b);
              }
            }
            if (types.empty())
              fail(ErrKind::MotiveRequired,
                   "no branch of the read is inferable");
            if (!pending.empty()) {
              // A read-wrapped join must be total over the state set, so a
              // partially inferable read only types when the inferable
              // branches agree.
              for (const auto& t : types)
                if (!conv_ctype(types.front(), t, opts_.norm))
                  fail(ErrKind::MotiveRequired,
                       "read branches disagree and some do not infer");
              for (const CompPtr* b : pending)
                check_computation(g, *b, types.front());
              return types.front();
            }
            CTypePtr joined =
                join_branch_types(g, std::move(types), inferred_labels, true);
            return joined;
          },
      },
      m->node);
}

namespace {

// Anti-unification of branch types: components must agree except at thunked
// computations, which get wrapped in the branching effect.
struct Join {
  const std::vector<std::string>& labels;  // read labels; empty for choose
  bool is_read;

  struct NoJoin {};

  CompPtr wrap(std::vector<CompPtr> comps) const {
    if (is_read) {
      std::vector<std::pair<std::string, CompPtr>> branches;
      for (std::size_t i = 0; i < comps.size(); ++i)
        branches.emplace_back(labels[i], comps[i]);
      return cread(std::move(branches));
    }
    return cchoose(std::move(comps));
  }

  bool all_eq_c(const std::vector<CompPtr>& ts) const {
    for (const auto& t : ts)
      if (!eq_modulo_motives(ts.front(), t)) return false;
    return true;
  }

  CompPtr comp(const std::vector<CompPtr>& ts) const {
    if (all_eq_c(ts)) return ts.front();
    std::size_t idx = ts.front()->node.index();
    for (const auto& t : ts)
      if (t->node.index() != idx) throw NoJoin{};
    if (std::holds_alternative<CReturn>(ts.front()->node)) {
      std::vector<ValuePtr> vs;
      for (const auto& t : ts) vs.push_back(std::get<CReturn>(t->node).value);
      return creturn(value(vs));
    }
    if (std::holds_alternative<CForce>(ts.front()->node)) {
      std::vector<ValuePtr> vs;
      for (const auto& t : ts) vs.push_back(std::get<CForce>(t->node).value);
      return cforce(value(vs));
    }
    if (std::holds_alternative<CPrint>(ts.front()->node)) {
      const auto& h = std::get<CPrint>(ts.front()->node);
      std::vector<CompPtr> rests;
      for (const auto& t : ts) {
        const auto& n = std::get<CPrint>(t->node);
        if (n.letter != h.letter) throw NoJoin{};
        rests.push_back(n.rest);
      }
      return cprint(h.letter, comp(rests));
    }
    if (std::holds_alternative<CWrite>(ts.front()->node)) {
      const auto& h = std::get<CWrite>(ts.front()->node);
      std::vector<CompPtr> rests;
      for (const auto& t : ts) {
        const auto& n = std::get<CWrite>(t->node);
        if (n.state != h.state) throw NoJoin{};
        rests.push_back(n.rest);
      }
      return cwrite(h.state, comp(rests));
    }
    if (std::holds_alternative<CLam>(ts.front()->node)) {
      std::vector<CompPtr> bodies;
      for (const auto& t : ts) bodies.push_back(std::get<CLam>(t->node).body);
      return clam(comp(bodies));
    }
    if (std::holds_alternative<CApp>(ts.front()->node)) {
      std::vector<ValuePtr> args;
      std::vector<CompPtr> fns;
      for (const auto& t : ts) {
        args.push_back(std::get<CApp>(t->node).arg);
        fns.push_back(std::get<CApp>(t->node).fn);
      }
      return capp(value(args), comp(fns));
    }
    if (std::holds_alternative<CProj>(ts.front()->node)) {
      const auto& h = std::get<CProj>(ts.front()->node);
      std::vector<CompPtr> targets;
      for (const auto& t : ts) {
        const auto& n = std::get<CProj>(t->node);
        if (n.tag != h.tag) throw NoJoin{};
        targets.push_back(n.target);
      }
      return cproj(h.tag, comp(targets));
    }
    if (std::holds_alternative<CTuple>(ts.front()->node)) {
      const auto& h = std::get<CTuple>(ts.front()->node);
      std::vector<CompPtr> items;
      for (std::size_t i = 0; i < h.items.size(); ++i) {
        std::vector<CompPtr> col;
        for (const auto& t : ts) {
          const auto& n = std::get<CTuple>(t->node);
          if (n.items.size() != h.items.size()) throw NoJoin{};
          col.push_back(n.items[i]);
        }
        items.push_back(comp(col));
      }
      return ctuple(std::move(items));
    }
    if (std::holds_alternative<CToIn>(ts.front()->node)) {
      std::vector<CompPtr> heads, bodies;
      for (const auto& t : ts) {
        heads.push_back(std::get<CToIn>(t->node).head);
        bodies.push_back(std::get<CToIn>(t->node).body);
      }
      return cto_in(comp(heads), comp(bodies));
    }
    if (std::holds_alternative<CMu>(ts.front()->node)) {
      std::vector<CompPtr> bodies;
      for (const auto& t : ts) bodies.push_back(std::get<CMu>(t->node).body);
      return cmu(comp(bodies));
    }
    // Remaining forms must be identical (already handled by all_eq_c).
    throw NoJoin{};
  }

  ValuePtr value(const std::vector<ValuePtr>& vs) const {
    bool all_eq = true;
    for (const auto& v : vs)
      if (!eq_modulo_motives(vs.front(), v)) all_eq = false;
    if (all_eq) return vs.front();
    std::size_t idx = vs.front()->node.index();
    for (const auto& v : vs)
      if (v->node.index() != idx) throw NoJoin{};
    if (std::holds_alternative<VThunk>(vs.front()->node)) {
      std::vector<CompPtr> bodies;
      for (const auto& v : vs) bodies.push_back(std::get<VThunk>(v->node).body);
      try {
        return vthunk(comp(bodies));
      } catch (const NoJoin&) {
        return vthunk(wrap(std::move(bodies)));
      }
    }
    if (std::holds_alternative<VPair>(vs.front()->node)) {
      std::vector<ValuePtr> fsts, snds;
      for (const auto& v : vs) {
        fsts.push_back(std::get<VPair>(v->node).fst);
        snds.push_back(std::get<VPair>(v->node).snd);
      }
      return vpair(value(fsts), value(snds));
    }
    if (std::holds_alternative<VInj>(vs.front()->node)) {
      const auto& h = std::get<VInj>(vs.front()->node);
      std::vector<ValuePtr> payloads;
      for (const auto& v : vs) {
        const auto& n = std::get<VInj>(v->node);
        if (n.tag != h.tag || n.arity != h.arity) throw NoJoin{};
        payloads.push_back(n.payload);
      }
      return vinj(h.tag, h.arity, value(payloads));
    }
    if (std::holds_alternative<VRefl>(vs.front()->node)) {
      std::vector<ValuePtr> subjects;
      for (const auto& v : vs)
        subjects.push_back(std::get<VRefl>(v->node).subject);
      return vrefl(value(subjects));
    }
    throw NoJoin{};
  }

  VTypePtr vtype(const std::vector<VTypePtr>& ts) const {
    bool all_eq = true;
    for (const auto& t : ts)
      if (!eq_modulo_motives(ts.front(), t)) all_eq = false;
    if (all_eq) return ts.front();
    std::size_t idx = ts.front()->node.index();
    for (const auto& t : ts)
      if (t->node.index() != idx) throw NoJoin{};
    if (std::holds_alternative<TU>(ts.front()->node)) {
      std::vector<CTypePtr> bodies;
      for (const auto& t : ts) bodies.push_back(std::get<TU>(t->node).body);
      return t_u(ctype(bodies));
    }
    if (std::holds_alternative<TSumN>(ts.front()->node)) {
      const auto& h = std::get<TSumN>(ts.front()->node);
      std::vector<VTypePtr> items;
      for (std::size_t i = 0; i < h.items.size(); ++i) {
        std::vector<VTypePtr> col;
        for (const auto& t : ts) {
          const auto& n = std::get<TSumN>(t->node);
          if (n.items.size() != h.items.size()) throw NoJoin{};
          col.push_back(n.items[i]);
        }
        items.push_back(vtype(col));
      }
      return t_sum(std::move(items));
    }
    if (std::holds_alternative<TSigma>(ts.front()->node)) {
      std::vector<VTypePtr> bases, fibers;
      for (const auto& t : ts) {
        bases.push_back(std::get<TSigma>(t->node).base);
        fibers.push_back(std::get<TSigma>(t->node).fiber);
      }
      return t_sigma(vtype(bases), vtype(fibers));
    }
    if (std::holds_alternative<TId>(ts.front()->node)) {
      std::vector<VTypePtr> carriers;
      std::vector<ValuePtr> lhss, rhss;
      for (const auto& t : ts) {
        carriers.push_back(std::get<TId>(t->node).carrier);
        lhss.push_back(std::get<TId>(t->node).lhs);
        rhss.push_back(std::get<TId>(t->node).rhs);
      }
      return t_id(vtype(carriers), value(lhss), value(rhss));
    }
    throw NoJoin{};
  }

  CTypePtr ctype(const std::vector<CTypePtr>& ts) const {
    bool all_eq = true;
    for (const auto& t : ts)
      if (!eq_modulo_motives(ts.front(), t)) all_eq = false;
    if (all_eq) return ts.front();
    std::size_t idx = ts.front()->node.index();
    for (const auto& t : ts)
      if (t->node.index() != idx) throw NoJoin{};
    if (std::holds_alternative<TF>(ts.front()->node)) {
      std::vector<VTypePtr> vals;
      for (const auto& t : ts) vals.push_back(std::get<TF>(t->node).value);
      return t_f(vtype(vals));
    }
    if (std::holds_alternative<TPiN>(ts.front()->node)) {
      const auto& h = std::get<TPiN>(ts.front()->node);
      std::vector<CTypePtr> items;
      for (std::size_t i = 0; i < h.items.size(); ++i) {
        std::vector<CTypePtr> col;
        for (const auto& t : ts) {
          const auto& n = std::get<TPiN>(t->node);
          if (n.items.size() != h.items.size()) throw NoJoin{};
          col.push_back(n.items[i]);
        }
        items.push_back(ctype(col));
      }
      return t_pin(std::move(items));
    }
    if (std::holds_alternative<TPi>(ts.front()->node)) {
      std::vector<VTypePtr> bases;
      std::vector<CTypePtr> bodies;
      for (const auto& t : ts) {
        bases.push_back(std::get<TPi>(t->node).base);
        bodies.push_back(std::get<TPi>(t->node).body);
      }
      return t_pi(vtype(bases), ctype(bodies));
    }
    throw NoJoin{};
  }
};

}  // namespace

CTypePtr Checker::join_branch_types(const Context& g,
                                    std::vector<CTypePtr> types,
                                    const std::vector<std::string>& read_labels,
                                    bool is_read) const {
  bool all_conv = true;
  for (const auto& t : types)
    if (!conv_ctype(types.front(), t, opts_.norm)) all_conv = false;
  if (all_conv) return types.front();
  if (!subtyping_on())
    fail(ErrKind::Mismatch,
         "branches have different types (" + pretty(types.front(), g.size()) +
             " vs ...) and subtyping is not available");
  std::vector<CTypePtr> normed;
  for (const auto& t : types) normed.push_back(normalize(t, opts_.norm).term);
  Join j{read_labels, is_read};
  CTypePtr joined;
  try {
    joined = j.ctype(normed);
  } catch (const Join::NoJoin&) {
    fail(ErrKind::SubtypeFailure,
         "branch types cannot be joined under the effect subtyping rules");
  }
  for (const auto& t : normed)
    if (!subtype_ctype(g, t, joined))
      fail(ErrKind::SubtypeFailure,
           "joined branch type is not a supertype of " + pretty(t, g.size()));
  return joined;
}

void Checker::check_computation_inner(const Context& g, const CompPtr& m,
                                      const CTypePtr& b) const {
  if (const auto* lam = std::get_if<CLam>(&m->node)) {
    const auto* pi = std::get_if<TPi>(&b->node);
    if (!pi)
      fail(ErrKind::Mismatch,
           "a lambda checks only against Pi-types, expected " +
               pretty(b, g.size()));
    check_computation(g.extended(pi->base), lam->body, pi->body);
    return;
  }
  if (const auto* tup = std::get_if<CTuple>(&m->node)) {
    const auto* pin = std::get_if<TPiN>(&b->node);
    if (!pin)
      fail(ErrKind::Mismatch,
           "a tuple checks only against Prod-types, expected " +
               pretty(b, g.size()));
    if (pin->items.size() != tup->items.size())
      fail(ErrKind::ArityMismatch,
           "tuple arity " + std::to_string(tup->items.size()) +
               " vs Prod arity " + std::to_string(pin->items.size()));
    for (std::size_t i = 0; i < tup->items.size(); ++i)
      check_computation(g, tup->items[i], pin->items[i]);
    return;
  }
  if (const auto* ret = std::get_if<CReturn>(&m->node)) {
    const auto* f = std::get_if<TF>(&b->node);
    if (!f)
      fail(ErrKind::Mismatch,
           "return checks only against F-types, expected " +
               pretty(b, g.size()));
    check_value(g, ret->value, f->value);
    return;
  }
  if (std::holds_alternative<CDiverge>(m->node)) {
    if (!sig_.diverge)
      fail(ErrKind::EffectNotEnabled, "diverge is not enabled");
    return;
  }
  if (const auto* e = std::get_if<CError>(&m->node)) {
    if (!sig_.error || !sig_.has_error(e->name))
      fail(ErrKind::EffectNotEnabled, "error '" + e->name + "' is not enabled");
    return;
  }
  if (const auto* mu = std::get_if<CMu>(&m->node)) {
    if (!sig_.rec) fail(ErrKind::EffectNotEnabled, "recursion is not enabled");
    check_computation(g.extended(t_u(b)), mu->body, shift(b, 1, 0));
    return;
  }
  if (const auto* p = std::get_if<CPrint>(&m->node)) {
    if (!sig_.print || !sig_.has_letter(p->letter))
      fail(ErrKind::EffectNotEnabled,
           "print \"" + p->letter + "\" is not enabled");
    check_computation(g, p->rest, b);
    return;
  }
  if (const auto* w = std::get_if<CWrite>(&m->node)) {
    if (!sig_.state || !sig_.has_state(w->state))
      fail(ErrKind::EffectNotEnabled,
           "write '" + w->state + "' is not enabled");
    check_computation(g, w->rest, b);
    return;
  }
  if (const auto* c = std::get_if<CChoose>(&m->node)) {
    if (!sig_.choose)
      fail(ErrKind::EffectNotEnabled, "choose is not enabled");
    if (c->alternatives.empty())
      fail(ErrKind::ArityMismatch, "choose needs at least one branch");
    for (const auto& alt : c->alternatives) check_computation(g, alt, b);
    return;
  }
  if (const auto* r = std::get_if<CRead>(&m->node)) {
    if (!sig_.state) fail(ErrKind::EffectNotEnabled, "read is not enabled");
    std::set<std::string> seen;
    for (const auto& [s, branch] : r->branches) {
      if (!sig_.has_state(s))
        fail(ErrKind::EffectNotEnabled,
             "read branch for undeclared state '" + s + "'");
      if (!seen.insert(s).second)
        fail(ErrKind::Mismatch, "duplicate read branch for '" + s + "'");
      check_computation(g, branch, b);
    }
    for (const auto& s : sig_.states)
      if (!seen.count(s))
        fail(ErrKind::Mismatch, "read is missing a branch for state '" + s +
                                    "'");
    return;
  }
  if (const auto* let = std::get_if<CLet>(&m->node)) {
    // Judgmentally the substituted body; occurrences of the bound value are
    // checked at their use sites.
    check_computation(g, subst(let->body, let->bound, 0), b);
    return;
  }
  // Checking propagates through a forced thunk.
  if (const auto* f = std::get_if<CForce>(&m->node)) {
    if (const auto* th = std::get_if<VThunk>(&f->value->node)) {
      check_computation(g, th->body, b);
      return;
    }
  }
  // Checking an application: the argument infers, the function is checked
  // against the Pi type rebuilt from the expected result (occurrences of the
  // argument become the bound variable).
  if (const auto* app = std::get_if<CApp>(&m->node)) {
    std::optional<VTypePtr> arg_ty;
    try {
      arg_ty = infer_value(g, app->arg);
    } catch (const TypeError&) {
    }
    if (arg_ty) {
      CTypePtr body = abstract_value_in_ctype(b, app->arg);
      check_computation(g, app->fn, t_pi(*arg_ty, body));
      return;
    }
    // A literal beta redex whose argument type is not inferable (the
    // name-translation produces these): check the contractum; occurrences of
    // the argument are checked at their use sites.
    if (const auto* lam = std::get_if<CLam>(&app->fn->node)) {
      check_computation(g, subst(lam->body, app->arg, 0), b);
      return;
    }
    // A fixpoint in function position unfolds once.
    try {
      CompPtr fnnf = normalize(app->fn, opts_.norm).term;
      if (const auto* mu = std::get_if<CMu>(&fnnf->node)) {
        CompPtr unfolded =
            normalize(subst(mu->body, vthunk(fnnf), 0), opts_.norm).term;
        if (!std::holds_alternative<CMu>(unfolded->node)) {
          check_computation(g, capp(app->arg, unfolded), b);
          return;
        }
      }
    } catch (const FuelExhaustedError&) {
    }
  }
  // Checking a projection out of a literal tuple: the selected component is
  // checked, the others only need to be typable. A fixpoint target unfolds
  // once.
  if (const auto* proj = std::get_if<CProj>(&m->node)) {
    if (std::holds_alternative<CMu>(proj->target->node)) {
      const auto* mu = std::get_if<CMu>(&proj->target->node);
      try {
        CompPtr unfolded =
            normalize(subst(mu->body, vthunk(proj->target), 0), opts_.norm)
                .term;
        if (!std::holds_alternative<CMu>(unfolded->node)) {
          check_computation(g, cproj(proj->tag, unfolded), b);
          return;
        }
      } catch (const FuelExhaustedError&) {
      }
    }
    if (const auto* tup = std::get_if<CTuple>(&proj->target->node)) {
      if (proj->tag < 1 || proj->tag > tup->items.size())
        fail(ErrKind::ArityMismatch,
             "projection " + std::to_string(proj->tag) +
                 " out of range for arity " +
                 std::to_string(tup->items.size()));
      for (std::size_t i = 0; i < tup->items.size(); ++i) {
        if (i + 1 == proj->tag)
          check_computation(g, tup->items[i], b);
        else
          (void)infer_computation(g, tup->items[i]);
      }
      return;
    }
  }
  if (const auto* to = std::get_if<CToIn>(&m->node)) {
    std::optional<TypeError> first_error;
    try {
      CTypePtr inferred = infer_computation(g, m);
      if (type_leq(g, inferred, b)) return;
      first_error = TypeError(
          ErrKind::Mismatch, "sequencing has type " +
                                 pretty(inferred, g.size()) + ", expected " +
                                 pretty(b, g.size()));
    } catch (const TypeError& e) {
      first_error = e;
    }
    if (!to->motive) {
      // Reconstruct a motive from the expected type by abstracting the
      // thunked head, then check the body against its instantiation.
      try {
        CTypePtr ht = infer_computation(g, to->head);
        if (const auto* f = std::get_if<TF>(&ht->node)) {
          const VTypePtr& a = f->value;
          if (plus()) {
            CTypePtr motive = abstract_value_in_ctype(b, vthunk(to->head));
            check_computation(g.extended(a), to->body,
                              toin_body_type(motive));
            return;
          }
          check_computation(g.extended(a), to->body, shift(b, 1, 0));
          return;
        }
      } catch (const TypeError& e) {
        if (!first_error) first_error = e;
      }
      // Judgmentally a let when the head is a return; effectful heads and
      // fixpoints commute out by the effect equations.
      try {
        CompPtr hnf = normalize(to->head, opts_.norm).term;
        if (const auto* r = std::get_if<CReturn>(&hnf->node)) {
          check_computation(g, subst(to->body, r->value, 0), b);
          return;
        }
        if (const auto* mu = std::get_if<CMu>(&hnf->node)) {
          CompPtr unfolded =
              normalize(subst(mu->body, vthunk(hnf), 0), opts_.norm).term;
          if (!std::holds_alternative<CMu>(unfolded->node)) {
            check_computation(g, cto_in(unfolded, to->body, to->motive), b);
            return;
          }
        }
      } catch (const FuelExhaustedError&) {
      } catch (const TypeError&) {
      }
    }
    throw *first_error;
  }

  // Pattern matches without motives in checking position: reconstruct the
  // motive from the expected type by abstracting the scrutinee.
  if (const auto* pm = std::get_if<CPmSum>(&m->node); pm && !pm->motive) {
    VTypePtr st = infer_value(g, pm->scrutinee);
    const auto* sum = std::get_if<TSumN>(&st->node);
    if (!sum)
      fail(ErrKind::Mismatch, "pattern match on a sum needs a sum-typed "
                              "scrutinee, got " +
                                  pretty(st, g.size()));
    if (sum->items.size() != pm->branches.size())
      fail(ErrKind::ArityMismatch,
           "sum arity " + std::to_string(sum->items.size()) +
               " vs branch count " + std::to_string(pm->branches.size()));
    CTypePtr motive = abstract_value_in_ctype(b, pm->scrutinee);
    for (std::size_t i = 0; i < pm->branches.size(); ++i)
      check_computation(g.extended(sum->items[i]), pm->branches[i],
                        pm_sum_branch_type(motive, i + 1, sum->items.size()));
    return;
  }
  if (const auto* pm = std::get_if<CPmUnit>(&m->node); pm && !pm->motive) {
    check_value(g, pm->scrutinee, t_one());
    CTypePtr motive = abstract_value_in_ctype(b, pm->scrutinee);
    check_computation(g, pm->body, pm_unit_branch_type(motive));
    return;
  }
  if (const auto* pm = std::get_if<CPmPair>(&m->node); pm && !pm->motive) {
    VTypePtr st = infer_value(g, pm->scrutinee);
    const auto* sg = std::get_if<TSigma>(&st->node);
    if (!sg)
      fail(ErrKind::Mismatch, "pattern match on a pair needs a pair-typed "
                              "scrutinee, got " +
                                  pretty(st, g.size()));
    CTypePtr motive = abstract_value_in_ctype(b, pm->scrutinee);
    check_computation(g.extended(sg->base).extended(sg->fiber), pm->body,
                      pm_pair_branch_type(motive));
    return;
  }
  if (const auto* pm = std::get_if<CPmId>(&m->node); pm && !pm->motive) {
    VTypePtr st = infer_value(g, pm->scrutinee);
    const auto* id = std::get_if<TId>(&st->node);
    if (!id)
      fail(ErrKind::Mismatch, "pattern match on an identity witness needs an "
                              "Id-typed scrutinee, got " +
                                  pretty(st, g.size()));
    // Abstract the witness as p, then join the endpoints at the bound
    // variable: the branch is checked where lhs, rhs and the witness all
    // collapse to x and refl x.
    CTypePtr motive_p = abstract_value_in_ctype(b, pm->scrutinee);
    CTypePtr branch_ty = subst(shift(motive_p, 1, 1), vrefl(vvar(0)), 0);
    CTypePtr b2 = ReplaceValue{shift(id->lhs, 1, 0), 0}.ctype(branch_ty, 0);
    CTypePtr b3 = ReplaceValue{shift(id->rhs, 1, 0), 0}.ctype(b2, 0);
    check_computation(g.extended(id->carrier), pm->body, b3);
    return;
  }

  CTypePtr inferred = infer_computation(g, m);
  if (type_leq(g, inferred, b)) return;
  fail(ErrKind::Mismatch, "computation has type " + pretty(inferred, g.size()) +
                              ", expected " + pretty(b, g.size()));
}

void Checker::check_computation(const Context& g, const CompPtr& m,
                                const CTypePtr& b) const {
  try {
    check_computation_inner(g, m, b);
  } catch (const TypeError& original) {
    // The normal form is judgmentally equal and often lands back inside the
    // bidirectional fragment (machine steps substitute values whose types
    // are not inferable into redex positions). When that fails too, report
    // the error for the term as written.
    CompPtr nf;
    try {
      nf = normalize(m, opts_.norm).term;
    } catch (const FuelExhaustedError&) {
      throw TypeError(ErrKind::FuelExhausted,
                      "normalization ran out of fuel while checking");
    }
    if (eq_modulo_motives(nf, m)) throw;
    try {
      check_computation_inner(g, nf, b);
    } catch (const TypeError&) {
      throw original;
    }
  }
}

// ---------------------------------------------------------------------------
// Subtyping

namespace {

struct Subtype {
  const NormalizeOptions& norm;

  bool ct(const CTypePtr& a, const CTypePtr& b) const {
    if (eq_modulo_motives(a, b)) return true;
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        overloaded{
            [&](const TF& x) { return vt(x.value, std::get<TF>(b->node).value); },
            [&](const TPiN& x) {
              const auto& y = std::get<TPiN>(b->node);
              if (x.items.size() != y.items.size()) return false;
              for (std::size_t i = 0; i < x.items.size(); ++i)
                if (!ct(x.items[i], y.items[i])) return false;
              return true;
            },
            [&](const TPi& x) {
              const auto& y = std::get<TPi>(b->node);
              return vt(x.base, y.base) && ct(x.body, y.body);
            },
        },
        a->node);
  }

  bool vt(const VTypePtr& a, const VTypePtr& b) const {
    if (eq_modulo_motives(a, b)) return true;
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        overloaded{
            [&](const TU& x) { return ct(x.body, std::get<TU>(b->node).body); },
            [&](const TSumN& x) {
              const auto& y = std::get<TSumN>(b->node);
              if (x.items.size() != y.items.size()) return false;
              for (std::size_t i = 0; i < x.items.size(); ++i)
                if (!vt(x.items[i], y.items[i])) return false;
              return true;
            },
            [&](const TOne&) { return true; },
            [&](const TSigma& x) {
              const auto& y = std::get<TSigma>(b->node);
              return vt(x.base, y.base) && vt(x.fiber, y.fiber);
            },
            [&](const TId& x) {
              const auto& y = std::get<TId>(b->node);
              return vt(x.carrier, y.carrier) && val(x.lhs, y.lhs) &&
                     val(x.rhs, y.rhs);
            },
        },
        a->node);
  }

  bool val(const ValuePtr& a, const ValuePtr& b) const {
    if (eq_modulo_motives(a, b)) return true;
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        overloaded{
            [&](const VVar&) { return false; },
            [&](const VThunk& x) {
              return cm(x.body, std::get<VThunk>(b->node).body,
                        norm.mu_unfold, norm.mu_unfold);
            },
            [&](const VInj& x) {
              const auto& y = std::get<VInj>(b->node);
              return x.tag == y.tag && x.arity == y.arity &&
                     val(x.payload, y.payload);
            },
            [&](const VUnit&) { return true; },
            [&](const VPair& x) {
              const auto& y = std::get<VPair>(b->node);
              return val(x.fst, y.fst) && val(x.snd, y.snd);
            },
            [&](const VRefl& x) {
              return val(x.subject, std::get<VRefl>(b->node).subject);
            },
            [&](const VLet& x) {
              const auto& y = std::get<VLet>(b->node);
              return val(x.bound, y.bound) && val(x.body, y.body);
            },
            [&](const VPmSum& x) {
              const auto& y = std::get<VPmSum>(b->node);
              if (!val(x.scrutinee, y.scrutinee) ||
                  x.branches.size() != y.branches.size())
                return false;
              for (std::size_t i = 0; i < x.branches.size(); ++i)
                if (!val(x.branches[i], y.branches[i])) return false;
              return true;
            },
            [&](const VPmUnit& x) {
              const auto& y = std::get<VPmUnit>(b->node);
              return val(x.scrutinee, y.scrutinee) && val(x.body, y.body);
            },
            [&](const VPmPair& x) {
              const auto& y = std::get<VPmPair>(b->node);
              return val(x.scrutinee, y.scrutinee) && val(x.body, y.body);
            },
            [&](const VPmId& x) {
              const auto& y = std::get<VPmId>(b->node);
              return val(x.scrutinee, y.scrutinee) && val(x.body, y.body);
            },
        },
        a->node);
  }

  // Computation inclusion at thunk positions: the super side may perform
  // extra prints/writes before, or branch over the sub side.
  bool cm(const CompPtr& a, const CompPtr& b, unsigned budget_a,
          unsigned budget_b) const {
    if (eq_modulo_motives(a, b)) return true;
    if (a->node.index() == b->node.index() && congruent(a, b, budget_a,
                                                        budget_b))
      return true;
    if (const auto* p = std::get_if<CPrint>(&b->node))
      if (cm(a, p->rest, budget_a, budget_b)) return true;
    if (const auto* w = std::get_if<CWrite>(&b->node))
      if (cm(a, w->rest, budget_a, budget_b)) return true;
    if (const auto* c = std::get_if<CChoose>(&b->node))
      for (const auto& alt : c->alternatives)
        if (cm(a, alt, budget_a, budget_b)) return true;
    if (const auto* r = std::get_if<CRead>(&b->node))
      for (const auto& [_, branch] : r->branches)
        if (cm(a, branch, budget_a, budget_b)) return true;
    if (budget_a > 0)
      if (const auto* mu = std::get_if<CMu>(&a->node)) {
        CompPtr unfolded =
            normalize(subst(mu->body, vthunk(a), 0), norm).term;
        if (cm(unfolded, b, budget_a - 1, budget_b)) return true;
      }
    if (budget_b > 0)
      if (const auto* mu = std::get_if<CMu>(&b->node)) {
        CompPtr unfolded =
            normalize(subst(mu->body, vthunk(b), 0), norm).term;
        if (cm(a, unfolded, budget_a, budget_b - 1)) return true;
      }
    return false;
  }

  bool congruent(const CompPtr& a, const CompPtr& b, unsigned budget_a,
                 unsigned budget_b) const {
    return std::visit(
        overloaded{
            [&](const CReturn& x) {
              return val(x.value, std::get<CReturn>(b->node).value);
            },
            [&](const CToIn& x) {
              const auto& y = std::get<CToIn>(b->node);
              return cm(x.head, y.head, budget_a, budget_b) &&
                     cm(x.body, y.body, budget_a, budget_b);
            },
            [&](const CForce& x) {
              return val(x.value, std::get<CForce>(b->node).value);
            },
            [&](const CLet& x) {
              const auto& y = std::get<CLet>(b->node);
              return val(x.bound, y.bound) &&
                     cm(x.body, y.body, budget_a, budget_b);
            },
            [&](const CPmSum& x) {
              const auto& y = std::get<CPmSum>(b->node);
              if (!val(x.scrutinee, y.scrutinee) ||
                  x.branches.size() != y.branches.size())
                return false;
              for (std::size_t i = 0; i < x.branches.size(); ++i)
                if (!cm(x.branches[i], y.branches[i], budget_a, budget_b))
                  return false;
              return true;
            },
            [&](const CPmUnit& x) {
              const auto& y = std::get<CPmUnit>(b->node);
              return val(x.scrutinee, y.scrutinee) &&
                     cm(x.body, y.body, budget_a, budget_b);
            },
            [&](const CPmPair& x) {
              const auto& y = std::get<CPmPair>(b->node);
              return val(x.scrutinee, y.scrutinee) &&
                     cm(x.body, y.body, budget_a, budget_b);
            },
            [&](const CPmId& x) {
              const auto& y = std::get<CPmId>(b->node);
              return val(x.scrutinee, y.scrutinee) &&
                     cm(x.body, y.body, budget_a, budget_b);
            },
            [&](const CTuple& x) {
              const auto& y = std::get<CTuple>(b->node);
              if (x.items.size() != y.items.size()) return false;
              for (std::size_t i = 0; i < x.items.size(); ++i)
                if (!cm(x.items[i], y.items[i], budget_a, budget_b))
                  return false;
              return true;
            },
            [&](const CProj& x) {
              const auto& y = std::get<CProj>(b->node);
              return x.tag == y.tag &&
                     cm(x.target, y.target, budget_a, budget_b);
            },
            [&](const CLam& x) {
              return cm(x.body, std::get<CLam>(b->node).body, budget_a,
                        budget_b);
            },
            [&](const CApp& x) {
              const auto& y = std::get<CApp>(b->node);
              return val(x.arg, y.arg) && cm(x.fn, y.fn, budget_a, budget_b);
            },
            [&](const CDiverge&) { return true; },
            [&](const CError& x) {
              return x.name == std::get<CError>(b->node).name;
            },
            [&](const CMu& x) {
              return cm(x.body, std::get<CMu>(b->node).body, budget_a,
                        budget_b);
            },
            [&](const CPrint& x) {
              const auto& y = std::get<CPrint>(b->node);
              return x.letter == y.letter &&
                     cm(x.rest, y.rest, budget_a, budget_b);
            },
            [&](const CChoose& x) {
              const auto& y = std::get<CChoose>(b->node);
              if (x.alternatives.size() != y.alternatives.size()) return false;
              for (std::size_t i = 0; i < x.alternatives.size(); ++i)
                if (!cm(x.alternatives[i], y.alternatives[i], budget_a,
                        budget_b))
                  return false;
              return true;
            },
            [&](const CWrite& x) {
              const auto& y = std::get<CWrite>(b->node);
              return x.state == y.state &&
                     cm(x.rest, y.rest, budget_a, budget_b);
            },
            [&](const CRead& x) {
              const auto& y = std::get<CRead>(b->node);
              if (x.branches.size() != y.branches.size()) return false;
              for (std::size_t i = 0; i < x.branches.size(); ++i) {
                if (x.branches[i].first != y.branches[i].first) return false;
                if (!cm(x.branches[i].second, y.branches[i].second, budget_a,
                        budget_b))
                  return false;
              }
              return true;
            },
        },
        a->node);
  }
};

}  // namespace

bool Checker::subtype_ctype(const Context&, const CTypePtr& sub,
                            const CTypePtr& super) const {
  if (!subtyping_on()) return false;
  CTypePtr a = normalize(sub, opts_.norm).term;
  CTypePtr b = normalize(super, opts_.norm).term;
  return Subtype{opts_.norm}.ct(a, b);
}

bool Checker::subtype_vtype(const Context&, const VTypePtr& sub,
                            const VTypePtr& super) const {
  if (!subtyping_on()) return false;
  VTypePtr a = normalize(sub, opts_.norm).term;
  VTypePtr b = normalize(super, opts_.norm).term;
  return Subtype{opts_.norm}.vt(a, b);
}

bool Checker::type_leq(const Context& g, const CTypePtr& sub,
                       const CTypePtr& super) const {
  if (conv_ctype(sub, super, opts_.norm)) return true;
  return subtype_ctype(g, sub, super);
}

// ---------------------------------------------------------------------------
// Stacks and configurations

CompPtr Checker::unload(CompPtr m, const StackPtr& k) {
  return std::visit(
      overloaded{
          [&](const SNil&) { return m; },
          [&](const SToFrame& n) { return unload(cto_in(m, n.body), n.rest); },
          [&](const SProjFrame& n) {
            return unload(cproj(n.tag, m), n.rest);
          },
          [&](const SArgFrame& n) { return unload(capp(n.arg, m), n.rest); },
      },
      k->node);
}

void Checker::check_stack(const Context& g, const CTypePtr& stoup,
                          const StackPtr& k, const CTypePtr& target) const {
  check_ctype(g, stoup);
  check_ctype(g, target);
  Context g2 = g.extended(t_u(stoup));
  CompPtr plugged = unload(cforce(vvar(0)), shift(k, 1, 0));
  check_computation(g2, plugged, shift(target, 1, 0));
}

void Checker::check_configuration(const CompPtr& m, const StackPtr& k,
                                  const CTypePtr& target) const {
  Context g;
  check_computation(g, unload(m, k), target);
}

}  // namespace dcbpv
