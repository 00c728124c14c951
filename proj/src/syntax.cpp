#include "dcbpv/syntax.hpp"

#include <functional>

namespace dcbpv {

ValuePtr vvar(std::size_t index) { return mk_value(VVar{index}); }
ValuePtr vthunk(CompPtr body) { return mk_value(VThunk{std::move(body)}); }
ValuePtr vinj(std::size_t tag, std::size_t arity, ValuePtr payload) {
  return mk_value(VInj{tag, arity, std::move(payload)});
}
ValuePtr vunit() {
  static const ValuePtr u = mk_value(VUnit{});
  return u;
}
ValuePtr vpair(ValuePtr fst, ValuePtr snd) {
  return mk_value(VPair{std::move(fst), std::move(snd)});
}
ValuePtr vrefl(ValuePtr subject) { return mk_value(VRefl{std::move(subject)}); }
ValuePtr vlet(ValuePtr bound, ValuePtr body) {
  return mk_value(VLet{std::move(bound), std::move(body)});
}
ValuePtr vpm_sum(ValuePtr scrutinee, std::vector<ValuePtr> branches) {
  return mk_value(VPmSum{std::move(scrutinee), std::move(branches)});
}
ValuePtr vpm_unit(ValuePtr scrutinee, ValuePtr body) {
  return mk_value(VPmUnit{std::move(scrutinee), std::move(body)});
}
ValuePtr vpm_pair(ValuePtr scrutinee, ValuePtr body) {
  return mk_value(VPmPair{std::move(scrutinee), std::move(body)});
}
ValuePtr vpm_id(ValuePtr scrutinee, ValuePtr body) {
  return mk_value(VPmId{std::move(scrutinee), std::move(body)});
}

CompPtr creturn(ValuePtr v) { return mk_comp(CReturn{std::move(v)}); }
CompPtr cto_in(CompPtr head, CompPtr body, CTypePtr motive) {
  return mk_comp(CToIn{std::move(head), std::move(motive), std::move(body)});
}
CompPtr cforce(ValuePtr v) { return mk_comp(CForce{std::move(v)}); }
CompPtr clet(ValuePtr bound, CompPtr body) {
  return mk_comp(CLet{std::move(bound), std::move(body)});
}
CompPtr cpm_sum(ValuePtr scrutinee, std::vector<CompPtr> branches,
                CTypePtr motive) {
  return mk_comp(
      CPmSum{std::move(scrutinee), std::move(motive), std::move(branches)});
}
CompPtr cpm_unit(ValuePtr scrutinee, CompPtr body, CTypePtr motive) {
  return mk_comp(
      CPmUnit{std::move(scrutinee), std::move(motive), std::move(body)});
}
CompPtr cpm_pair(ValuePtr scrutinee, CompPtr body, CTypePtr motive) {
  return mk_comp(
      CPmPair{std::move(scrutinee), std::move(motive), std::move(body)});
}
CompPtr cpm_id(ValuePtr scrutinee, CompPtr body, CTypePtr motive) {
  return mk_comp(
      CPmId{std::move(scrutinee), std::move(motive), std::move(body)});
}
CompPtr ctuple(std::vector<CompPtr> items) {
  return mk_comp(CTuple{std::move(items)});
}
CompPtr cproj(std::size_t tag, CompPtr target) {
  return mk_comp(CProj{tag, std::move(target)});
}
CompPtr clam(CompPtr body) { return mk_comp(CLam{std::move(body)}); }
CompPtr capp(ValuePtr arg, CompPtr fn) {
  return mk_comp(CApp{std::move(arg), std::move(fn)});
}
CompPtr cdiverge() {
  static const CompPtr d = mk_comp(CDiverge{});
  return d;
}
CompPtr cerror(std::string name) { return mk_comp(CError{std::move(name)}); }
CompPtr cmu(CompPtr body) { return mk_comp(CMu{std::move(body)}); }
CompPtr cprint(std::string letter, CompPtr rest) {
  return mk_comp(CPrint{std::move(letter), std::move(rest)});
}
CompPtr cchoose(std::vector<CompPtr> alternatives) {
  return mk_comp(CChoose{std::move(alternatives)});
}
CompPtr cwrite(std::string state, CompPtr rest) {
  return mk_comp(CWrite{std::move(state), std::move(rest)});
}
CompPtr cread(std::vector<std::pair<std::string, CompPtr>> branches) {
  return mk_comp(CRead{std::move(branches)});
}

VTypePtr t_u(CTypePtr body) { return mk_vtype(TU{std::move(body)}); }
VTypePtr t_sum(std::vector<VTypePtr> items) {
  return mk_vtype(TSumN{std::move(items)});
}
VTypePtr t_one() {
  static const VTypePtr o = mk_vtype(TOne{});
  return o;
}
VTypePtr t_sigma(VTypePtr base, VTypePtr fiber) {
  return mk_vtype(TSigma{std::move(base), std::move(fiber)});
}
VTypePtr t_id(VTypePtr carrier, ValuePtr lhs, ValuePtr rhs) {
  return mk_vtype(TId{std::move(carrier), std::move(lhs), std::move(rhs)});
}
CTypePtr t_f(VTypePtr value) { return mk_ctype(TF{std::move(value)}); }
CTypePtr t_pin(std::vector<CTypePtr> items) {
  return mk_ctype(TPiN{std::move(items)});
}
CTypePtr t_pi(VTypePtr base, CTypePtr body) {
  return mk_ctype(TPi{std::move(base), std::move(body)});
}

StackPtr snil() {
  static const StackPtr n = mk_stack(SNil{});
  return n;
}
StackPtr sto_frame(CompPtr body, StackPtr rest) {
  return mk_stack(SToFrame{std::move(body), std::move(rest)});
}
StackPtr sproj_frame(std::size_t tag, StackPtr rest) {
  return mk_stack(SProjFrame{tag, std::move(rest)});
}
StackPtr sarg_frame(ValuePtr arg, StackPtr rest) {
  return mk_stack(SArgFrame{std::move(arg), std::move(rest)});
}

ValuePtr tr(ValuePtr v) { return vthunk(creturn(std::move(v))); }

// ---------------------------------------------------------------------------
// Generic variable-mapping traversal.
//
// `hook(i)` is consulted for every variable occurrence whose index, relative
// to the traversal root, is i (occurrences under b binders see index i + b).
// The returned replacement is expressed in the root context and gets shifted
// under the crossing binders. Returning null keeps the variable.

namespace {

struct VarMapper {
  std::function<ValuePtr(std::size_t)> hook;

  ValuePtr var(std::size_t k, std::size_t depth) const {
    if (k < depth) return nullptr;
    ValuePtr r = hook(k - depth);
    if (!r) return nullptr;
    return depth == 0 ? r : shift(r, static_cast<long long>(depth), 0);
  }

  ValuePtr go(const ValuePtr& t, std::size_t depth) const {
    return std::visit(
        overloaded{
            [&](const VVar& n) -> ValuePtr {
              ValuePtr r = var(n.index, depth);
              return r ? r : t;
            },
            [&](const VThunk& n) -> ValuePtr {
              CompPtr b = go(n.body, depth);
              return b == n.body ? t : vthunk(b);
            },
            [&](const VInj& n) -> ValuePtr {
              ValuePtr p = go(n.payload, depth);
              return p == n.payload ? t : vinj(n.tag, n.arity, p);
            },
            [&](const VUnit&) -> ValuePtr { return t; },
            [&](const VPair& n) -> ValuePtr {
              ValuePtr a = go(n.fst, depth), b = go(n.snd, depth);
              return (a == n.fst && b == n.snd) ? t : vpair(a, b);
            },
            [&](const VRefl& n) -> ValuePtr {
              ValuePtr s = go(n.subject, depth);
              return s == n.subject ? t : vrefl(s);
            },
            [&](const VLet& n) -> ValuePtr {
              ValuePtr bd = go(n.bound, depth);
              ValuePtr body = go(n.body, depth + 1);
              return (bd == n.bound && body == n.body) ? t : vlet(bd, body);
            },
            [&](const VPmSum& n) -> ValuePtr {
              ValuePtr s = go(n.scrutinee, depth);
              bool same = s == n.scrutinee;
              std::vector<ValuePtr> bs;
              bs.reserve(n.branches.size());
              for (const auto& b : n.branches) {
                ValuePtr nb = go(b, depth + 1);
                same = same && nb == b;
                bs.push_back(nb);
              }
              return same ? t : vpm_sum(s, std::move(bs));
            },
            [&](const VPmUnit& n) -> ValuePtr {
              ValuePtr s = go(n.scrutinee, depth);
              ValuePtr b = go(n.body, depth);
              return (s == n.scrutinee && b == n.body) ? t : vpm_unit(s, b);
            },
            [&](const VPmPair& n) -> ValuePtr {
              ValuePtr s = go(n.scrutinee, depth);
              ValuePtr b = go(n.body, depth + 2);
              return (s == n.scrutinee && b == n.body) ? t : vpm_pair(s, b);
            },
            [&](const VPmId& n) -> ValuePtr {
              ValuePtr s = go(n.scrutinee, depth);
              ValuePtr b = go(n.body, depth + 1);
              return (s == n.scrutinee && b == n.body) ? t : vpm_id(s, b);
            },
        },
        t->node);
  }

  CompPtr go(const CompPtr& t, std::size_t depth) const {
    return std::visit(
        overloaded{
            [&](const CReturn& n) -> CompPtr {
              ValuePtr v = go(n.value, depth);
              return v == n.value ? t : creturn(v);
            },
            [&](const CToIn& n) -> CompPtr {
              CompPtr h = go(n.head, depth);
              CTypePtr m = n.motive ? go(n.motive, depth + 1) : nullptr;
              CompPtr b = go(n.body, depth + 1);
              return (h == n.head && m == n.motive && b == n.body)
                         ? t
                         : cto_in(h, b, m);
            },
            [&](const CForce& n) -> CompPtr {
              ValuePtr v = go(n.value, depth);
              return v == n.value ? t : cforce(v);
            },
            [&](const CLet& n) -> CompPtr {
              ValuePtr bd = go(n.bound, depth);
              CompPtr body = go(n.body, depth + 1);
              return (bd == n.bound && body == n.body) ? t : clet(bd, body);
            },
            [&](const CPmSum& n) -> CompPtr {
              ValuePtr s = go(n.scrutinee, depth);
              CTypePtr m = n.motive ? go(n.motive, depth + 1) : nullptr;
              bool same = s == n.scrutinee && m == n.motive;
              std::vector<CompPtr> bs;
              bs.reserve(n.branches.size());
              for (const auto& b : n.branches) {
                CompPtr nb = go(b, depth + 1);
                same = same && nb == b;
                bs.push_back(nb);
              }
              return same ? t : cpm_sum(s, std::move(bs), m);
            },
            [&](const CPmUnit& n) -> CompPtr {
              ValuePtr s = go(n.scrutinee, depth);
              CTypePtr m = n.motive ? go(n.motive, depth + 1) : nullptr;
              CompPtr b = go(n.body, depth);
              return (s == n.scrutinee && m == n.motive && b == n.body)
                         ? t
                         : cpm_unit(s, b, m);
            },
            [&](const CPmPair& n) -> CompPtr {
              ValuePtr s = go(n.scrutinee, depth);
              CTypePtr m = n.motive ? go(n.motive, depth + 1) : nullptr;
              CompPtr b = go(n.body, depth + 2);
              return (s == n.scrutinee && m == n.motive && b == n.body)
                         ? t
                         : cpm_pair(s, b, m);
            },
            [&](const CPmId& n) -> CompPtr {
              ValuePtr s = go(n.scrutinee, depth);
              CTypePtr m = n.motive ? go(n.motive, depth + 3) : nullptr;
              CompPtr b = go(n.body, depth + 1);
              return (s == n.scrutinee && m == n.motive && b == n.body)
                         ? t
                         : cpm_id(s, b, m);
            },
            [&](const CTuple& n) -> CompPtr {
              bool same = true;
              std::vector<CompPtr> is;
              is.reserve(n.items.size());
              for (const auto& i : n.items) {
                CompPtr ni = go(i, depth);
                same = same && ni == i;
                is.push_back(ni);
              }
              return same ? t : ctuple(std::move(is));
            },
            [&](const CProj& n) -> CompPtr {
              CompPtr g = go(n.target, depth);
              return g == n.target ? t : cproj(n.tag, g);
            },
            [&](const CLam& n) -> CompPtr {
              CompPtr b = go(n.body, depth + 1);
              return b == n.body ? t : clam(b);
            },
            [&](const CApp& n) -> CompPtr {
              ValuePtr a = go(n.arg, depth);
              CompPtr f = go(n.fn, depth);
              return (a == n.arg && f == n.fn) ? t : capp(a, f);
            },
            [&](const CDiverge&) -> CompPtr { return t; },
            [&](const CError&) -> CompPtr { return t; },
            [&](const CMu& n) -> CompPtr {
              CompPtr b = go(n.body, depth + 1);
              return b == n.body ? t : cmu(b);
            },
            [&](const CPrint& n) -> CompPtr {
              CompPtr r = go(n.rest, depth);
              return r == n.rest ? t : cprint(n.letter, r);
            },
            [&](const CChoose& n) -> CompPtr {
              bool same = true;
              std::vector<CompPtr> as;
              as.reserve(n.alternatives.size());
              for (const auto& a : n.alternatives) {
                CompPtr na = go(a, depth);
                same = same && na == a;
                as.push_back(na);
              }
              return same ? t : cchoose(std::move(as));
            },
            [&](const CWrite& n) -> CompPtr {
              CompPtr r = go(n.rest, depth);
              return r == n.rest ? t : cwrite(n.state, r);
            },
            [&](const CRead& n) -> CompPtr {
              bool same = true;
              std::vector<std::pair<std::string, CompPtr>> bs;
              bs.reserve(n.branches.size());
              for (const auto& [s, c] : n.branches) {
                CompPtr nc = go(c, depth);
                same = same && nc == c;
                bs.emplace_back(s, nc);
              }
              return same ? t : cread(std::move(bs));
            },
        },
        t->node);
  }

  VTypePtr go(const VTypePtr& t, std::size_t depth) const {
    return std::visit(
        overloaded{
            [&](const TU& n) -> VTypePtr {
              CTypePtr b = go(n.body, depth);
              return b == n.body ? t : t_u(b);
            },
            [&](const TSumN& n) -> VTypePtr {
              bool same = true;
              std::vector<VTypePtr> is;
              is.reserve(n.items.size());
              for (const auto& i : n.items) {
                VTypePtr ni = go(i, depth);
                same = same && ni == i;
                is.push_back(ni);
              }
              return same ? t : t_sum(std::move(is));
            },
            [&](const TOne&) -> VTypePtr { return t; },
            [&](const TSigma& n) -> VTypePtr {
              VTypePtr b = go(n.base, depth);
              VTypePtr f = go(n.fiber, depth + 1);
              return (b == n.base && f == n.fiber) ? t : t_sigma(b, f);
            },
            [&](const TId& n) -> VTypePtr {
              VTypePtr c = go(n.carrier, depth);
              ValuePtr l = go(n.lhs, depth);
              ValuePtr r = go(n.rhs, depth);
              return (c == n.carrier && l == n.lhs && r == n.rhs)
                         ? t
                         : t_id(c, l, r);
            },
        },
        t->node);
  }

  CTypePtr go(const CTypePtr& t, std::size_t depth) const {
    return std::visit(
        overloaded{
            [&](const TF& n) -> CTypePtr {
              VTypePtr v = go(n.value, depth);
              return v == n.value ? t : t_f(v);
            },
            [&](const TPiN& n) -> CTypePtr {
              bool same = true;
              std::vector<CTypePtr> is;
              is.reserve(n.items.size());
              for (const auto& i : n.items) {
                CTypePtr ni = go(i, depth);
                same = same && ni == i;
                is.push_back(ni);
              }
              return same ? t : t_pin(std::move(is));
            },
            [&](const TPi& n) -> CTypePtr {
              VTypePtr b = go(n.base, depth);
              CTypePtr body = go(n.body, depth + 1);
              return (b == n.base && body == n.body) ? t : t_pi(b, body);
            },
        },
        t->node);
  }

  StackPtr go(const StackPtr& t, std::size_t depth) const {
    return std::visit(
        overloaded{
            [&](const SNil&) -> StackPtr { return t; },
            [&](const SToFrame& n) -> StackPtr {
              CompPtr b = go(n.body, depth + 1);
              StackPtr r = go(n.rest, depth);
              return (b == n.body && r == n.rest) ? t : sto_frame(b, r);
            },
            [&](const SProjFrame& n) -> StackPtr {
              StackPtr r = go(n.rest, depth);
              return r == n.rest ? t : sproj_frame(n.tag, r);
            },
            [&](const SArgFrame& n) -> StackPtr {
              ValuePtr a = go(n.arg, depth);
              StackPtr r = go(n.rest, depth);
              return (a == n.arg && r == n.rest) ? t : sarg_frame(a, r);
            },
        },
        t->node);
  }
};

ValuePtr shift_hook_result(std::size_t i, long long amount) {
  long long r = static_cast<long long>(i) + amount;
  if (r < 0) throw NegativeIndexError();
  return vvar(static_cast<std::size_t>(r));
}

template <typename Ptr>
Ptr shift_impl(const Ptr& t, long long amount, std::size_t cutoff) {
  if (amount == 0) return t;
  VarMapper m{[&](std::size_t i) -> ValuePtr {
    if (i < cutoff) return nullptr;
    return shift_hook_result(i, amount);
  }};
  return m.go(t, 0);
}

template <typename Ptr>
Ptr subst_impl(const Ptr& t, const ValuePtr& v, std::size_t index) {
  VarMapper m{[&](std::size_t i) -> ValuePtr {
    if (i < index) return nullptr;
    if (i == index) return v;
    return vvar(i - 1);
  }};
  return m.go(t, 0);
}

}  // namespace

ValuePtr shift(const ValuePtr& t, long long amount, std::size_t cutoff) {
  return shift_impl(t, amount, cutoff);
}
CompPtr shift(const CompPtr& t, long long amount, std::size_t cutoff) {
  return shift_impl(t, amount, cutoff);
}
VTypePtr shift(const VTypePtr& t, long long amount, std::size_t cutoff) {
  return shift_impl(t, amount, cutoff);
}
CTypePtr shift(const CTypePtr& t, long long amount, std::size_t cutoff) {
  return shift_impl(t, amount, cutoff);
}
StackPtr shift(const StackPtr& t, long long amount, std::size_t cutoff) {
  return shift_impl(t, amount, cutoff);
}

ValuePtr subst(const ValuePtr& t, const ValuePtr& v, std::size_t index) {
  return subst_impl(t, v, index);
}
CompPtr subst(const CompPtr& t, const ValuePtr& v, std::size_t index) {
  return subst_impl(t, v, index);
}
VTypePtr subst(const VTypePtr& t, const ValuePtr& v, std::size_t index) {
  return subst_impl(t, v, index);
}
CTypePtr subst(const CTypePtr& t, const ValuePtr& v, std::size_t index) {
  return subst_impl(t, v, index);
}
StackPtr subst(const StackPtr& t, const ValuePtr& v, std::size_t index) {
  return subst_impl(t, v, index);
}

CompPtr subst2(const CompPtr& body, const ValuePtr& fst, const ValuePtr& snd) {
  return subst(subst(body, shift(snd, 1, 0), 0), fst, 0);
}
ValuePtr subst2(const ValuePtr& body, const ValuePtr& fst,
                const ValuePtr& snd) {
  return subst(subst(body, shift(snd, 1, 0), 0), fst, 0);
}

CompPtr swap_indices(const CompPtr& t, std::size_t a, std::size_t b) {
  VarMapper m{[&](std::size_t i) -> ValuePtr {
    if (i == a) return vvar(b);
    if (i == b) return vvar(a);
    return nullptr;
  }};
  return m.go(t, 0);
}

// ---------------------------------------------------------------------------
// Structural equality

namespace {

struct Eq {
  bool ignore_motives = false;

  bool motive(const CTypePtr& a, const CTypePtr& b) const {
    if (ignore_motives) return true;
    if (!a || !b) return a == b;
    return eq(a, b);
  }

  bool eq(const ValuePtr& a, const ValuePtr& b) const {
    if (a == b) return true;
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        overloaded{
            [&](const VVar& x) {
              return x.index == std::get<VVar>(b->node).index;
            },
            [&](const VThunk& x) {
              return eq(x.body, std::get<VThunk>(b->node).body);
            },
            [&](const VInj& x) {
              const auto& y = std::get<VInj>(b->node);
              return x.tag == y.tag && x.arity == y.arity &&
                     eq(x.payload, y.payload);
            },
            [&](const VUnit&) { return true; },
            [&](const VPair& x) {
              const auto& y = std::get<VPair>(b->node);
              return eq(x.fst, y.fst) && eq(x.snd, y.snd);
            },
            [&](const VRefl& x) {
              return eq(x.subject, std::get<VRefl>(b->node).subject);
            },
            [&](const VLet& x) {
              const auto& y = std::get<VLet>(b->node);
              return eq(x.bound, y.bound) && eq(x.body, y.body);
            },
            [&](const VPmSum& x) {
              const auto& y = std::get<VPmSum>(b->node);
              if (!eq(x.scrutinee, y.scrutinee) ||
                  x.branches.size() != y.branches.size())
                return false;
              for (std::size_t i = 0; i < x.branches.size(); ++i)
                if (!eq(x.branches[i], y.branches[i])) return false;
              return true;
            },
            [&](const VPmUnit& x) {
              const auto& y = std::get<VPmUnit>(b->node);
              return eq(x.scrutinee, y.scrutinee) && eq(x.body, y.body);
            },
            [&](const VPmPair& x) {
              const auto& y = std::get<VPmPair>(b->node);
              return eq(x.scrutinee, y.scrutinee) && eq(x.body, y.body);
            },
            [&](const VPmId& x) {
              const auto& y = std::get<VPmId>(b->node);
              return eq(x.scrutinee, y.scrutinee) && eq(x.body, y.body);
            },
        },
        a->node);
  }

  bool eq(const CompPtr& a, const CompPtr& b) const {
    if (a == b) return true;
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        overloaded{
            [&](const CReturn& x) {
              return eq(x.value, std::get<CReturn>(b->node).value);
            },
            [&](const CToIn& x) {
              const auto& y = std::get<CToIn>(b->node);
              return eq(x.head, y.head) && motive(x.motive, y.motive) &&
                     eq(x.body, y.body);
            },
            [&](const CForce& x) {
              return eq(x.value, std::get<CForce>(b->node).value);
            },
            [&](const CLet& x) {
              const auto& y = std::get<CLet>(b->node);
              return eq(x.bound, y.bound) && eq(x.body, y.body);
            },
            [&](const CPmSum& x) {
              const auto& y = std::get<CPmSum>(b->node);
              if (!eq(x.scrutinee, y.scrutinee) ||
                  !motive(x.motive, y.motive) ||
                  x.branches.size() != y.branches.size())
                return false;
              for (std::size_t i = 0; i < x.branches.size(); ++i)
                if (!eq(x.branches[i], y.branches[i])) return false;
              return true;
            },
            [&](const CPmUnit& x) {
              const auto& y = std::get<CPmUnit>(b->node);
              return eq(x.scrutinee, y.scrutinee) &&
                     motive(x.motive, y.motive) && eq(x.body, y.body);
            },
            [&](const CPmPair& x) {
              const auto& y = std::get<CPmPair>(b->node);
              return eq(x.scrutinee, y.scrutinee) &&
                     motive(x.motive, y.motive) && eq(x.body, y.body);
            },
            [&](const CPmId& x) {
              const auto& y = std::get<CPmId>(b->node);
              return eq(x.scrutinee, y.scrutinee) &&
                     motive(x.motive, y.motive) && eq(x.body, y.body);
            },
            [&](const CTuple& x) {
              const auto& y = std::get<CTuple>(b->node);
              if (x.items.size() != y.items.size()) return false;
              for (std::size_t i = 0; i < x.items.size(); ++i)
                if (!eq(x.items[i], y.items[i])) return false;
              return true;
            },
            [&](const CProj& x) {
              const auto& y = std::get<CProj>(b->node);
              return x.tag == y.tag && eq(x.target, y.target);
            },
            [&](const CLam& x) {
              return eq(x.body, std::get<CLam>(b->node).body);
            },
            [&](const CApp& x) {
              const auto& y = std::get<CApp>(b->node);
              return eq(x.arg, y.arg) && eq(x.fn, y.fn);
            },
            [&](const CDiverge&) { return true; },
            [&](const CError& x) {
              return x.name == std::get<CError>(b->node).name;
            },
            [&](const CMu& x) {
              return eq(x.body, std::get<CMu>(b->node).body);
            },
            [&](const CPrint& x) {
              const auto& y = std::get<CPrint>(b->node);
              return x.letter == y.letter && eq(x.rest, y.rest);
            },
            [&](const CChoose& x) {
              const auto& y = std::get<CChoose>(b->node);
              if (x.alternatives.size() != y.alternatives.size()) return false;
              for (std::size_t i = 0; i < x.alternatives.size(); ++i)
                if (!eq(x.alternatives[i], y.alternatives[i])) return false;
              return true;
            },
            [&](const CWrite& x) {
              const auto& y = std::get<CWrite>(b->node);
              return x.state == y.state && eq(x.rest, y.rest);
            },
            [&](const CRead& x) {
              const auto& y = std::get<CRead>(b->node);
              if (x.branches.size() != y.branches.size()) return false;
              for (std::size_t i = 0; i < x.branches.size(); ++i) {
                if (x.branches[i].first != y.branches[i].first ||
                    !eq(x.branches[i].second, y.branches[i].second))
                  return false;
              }
              return true;
            },
        },
        a->node);
  }

  bool eq(const VTypePtr& a, const VTypePtr& b) const {
    if (a == b) return true;
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        overloaded{
            [&](const TU& x) { return eq(x.body, std::get<TU>(b->node).body); },
            [&](const TSumN& x) {
              const auto& y = std::get<TSumN>(b->node);
              if (x.items.size() != y.items.size()) return false;
              for (std::size_t i = 0; i < x.items.size(); ++i)
                if (!eq(x.items[i], y.items[i])) return false;
              return true;
            },
            [&](const TOne&) { return true; },
            [&](const TSigma& x) {
              const auto& y = std::get<TSigma>(b->node);
              return eq(x.base, y.base) && eq(x.fiber, y.fiber);
            },
            [&](const TId& x) {
              const auto& y = std::get<TId>(b->node);
              return eq(x.carrier, y.carrier) && eq(x.lhs, y.lhs) &&
                     eq(x.rhs, y.rhs);
            },
        },
        a->node);
  }

  bool eq(const CTypePtr& a, const CTypePtr& b) const {
    if (a == b) return true;
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        overloaded{
            [&](const TF& x) {
              return eq(x.value, std::get<TF>(b->node).value);
            },
            [&](const TPiN& x) {
              const auto& y = std::get<TPiN>(b->node);
              if (x.items.size() != y.items.size()) return false;
              for (std::size_t i = 0; i < x.items.size(); ++i)
                if (!eq(x.items[i], y.items[i])) return false;
              return true;
            },
            [&](const TPi& x) {
              const auto& y = std::get<TPi>(b->node);
              return eq(x.base, y.base) && eq(x.body, y.body);
            },
        },
        a->node);
  }

  bool eq(const StackPtr& a, const StackPtr& b) const {
    if (a == b) return true;
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        overloaded{
            [&](const SNil&) { return true; },
            [&](const SToFrame& x) {
              const auto& y = std::get<SToFrame>(b->node);
              return eq(x.body, y.body) && eq(x.rest, y.rest);
            },
            [&](const SProjFrame& x) {
              const auto& y = std::get<SProjFrame>(b->node);
              return x.tag == y.tag && eq(x.rest, y.rest);
            },
            [&](const SArgFrame& x) {
              const auto& y = std::get<SArgFrame>(b->node);
              return eq(x.arg, y.arg) && eq(x.rest, y.rest);
            },
        },
        a->node);
  }
};

}  // namespace

bool structural_eq(const ValuePtr& a, const ValuePtr& b) {
  return Eq{}.eq(a, b);
}
bool structural_eq(const CompPtr& a, const CompPtr& b) {
  return Eq{}.eq(a, b);
}
bool structural_eq(const VTypePtr& a, const VTypePtr& b) {
  return Eq{}.eq(a, b);
}
bool structural_eq(const CTypePtr& a, const CTypePtr& b) {
  return Eq{}.eq(a, b);
}
bool structural_eq(const StackPtr& a, const StackPtr& b) {
  return Eq{}.eq(a, b);
}

bool eq_modulo_motives(const ValuePtr& a, const ValuePtr& b) {
  return Eq{true}.eq(a, b);
}
bool eq_modulo_motives(const CompPtr& a, const CompPtr& b) {
  return Eq{true}.eq(a, b);
}
bool eq_modulo_motives(const VTypePtr& a, const VTypePtr& b) {
  return Eq{true}.eq(a, b);
}
bool eq_modulo_motives(const CTypePtr& a, const CTypePtr& b) {
  return Eq{true}.eq(a, b);
}

// ---------------------------------------------------------------------------
// Complex-value detection. Types and motives are skipped: complex values only
// count at term level.

namespace {

bool cvf_value(const ValuePtr& v);

bool cvf_comp(const CompPtr& m) {
  return std::visit(
      overloaded{
          [&](const CReturn& n) { return cvf_value(n.value); },
          [&](const CToIn& n) { return cvf_comp(n.head) && cvf_comp(n.body); },
          [&](const CForce& n) { return cvf_value(n.value); },
          [&](const CLet& n) { return cvf_value(n.bound) && cvf_comp(n.body); },
          [&](const CPmSum& n) {
            if (!cvf_value(n.scrutinee)) return false;
            for (const auto& b : n.branches)
              if (!cvf_comp(b)) return false;
            return true;
          },
          [&](const CPmUnit& n) {
            return cvf_value(n.scrutinee) && cvf_comp(n.body);
          },
          [&](const CPmPair& n) {
            return cvf_value(n.scrutinee) && cvf_comp(n.body);
          },
          [&](const CPmId& n) {
            return cvf_value(n.scrutinee) && cvf_comp(n.body);
          },
          [&](const CTuple& n) {
            for (const auto& i : n.items)
              if (!cvf_comp(i)) return false;
            return true;
          },
          [&](const CProj& n) { return cvf_comp(n.target); },
          [&](const CLam& n) { return cvf_comp(n.body); },
          [&](const CApp& n) { return cvf_value(n.arg) && cvf_comp(n.fn); },
          [&](const CDiverge&) { return true; },
          [&](const CError&) { return true; },
          [&](const CMu& n) { return cvf_comp(n.body); },
          [&](const CPrint& n) { return cvf_comp(n.rest); },
          [&](const CChoose& n) {
            for (const auto& a : n.alternatives)
              if (!cvf_comp(a)) return false;
            return true;
          },
          [&](const CWrite& n) { return cvf_comp(n.rest); },
          [&](const CRead& n) {
            for (const auto& [s, c] : n.branches)
              if (!cvf_comp(c)) return false;
            return true;
          },
      },
      m->node);
}

bool cvf_value(const ValuePtr& v) {
  return std::visit(
      overloaded{
          [&](const VVar&) { return true; },
          [&](const VThunk& n) { return cvf_comp(n.body); },
          [&](const VInj& n) { return cvf_value(n.payload); },
          [&](const VUnit&) { return true; },
          [&](const VPair& n) {
            return cvf_value(n.fst) && cvf_value(n.snd);
          },
          [&](const VRefl& n) { return cvf_value(n.subject); },
          [&](const VLet&) { return false; },
          [&](const VPmSum&) { return false; },
          [&](const VPmUnit&) { return false; },
          [&](const VPmPair&) { return false; },
          [&](const VPmId&) { return false; },
      },
      v->node);
}

}  // namespace

bool is_complex_value_free(const CompPtr& m) { return cvf_comp(m); }
bool is_complex_value_free(const ValuePtr& v) { return cvf_value(v); }

// ---------------------------------------------------------------------------
// Scope checks, via the variable mapper (throwing hook short-circuits).

namespace {

struct OutOfScope {};

template <typename Ptr>
bool scoped_impl(const Ptr& t, std::size_t n) {
  VarMapper m{[&](std::size_t i) -> ValuePtr {
    if (i >= n) throw OutOfScope{};
    return nullptr;
  }};
  try {
    m.go(t, 0);
    return true;
  } catch (const OutOfScope&) {
    return false;
  }
}

struct Found {};

template <typename Ptr>
bool uses_impl(const Ptr& t, std::size_t j) {
  VarMapper m{[&](std::size_t i) -> ValuePtr {
    if (i == j) throw Found{};
    return nullptr;
  }};
  try {
    m.go(t, 0);
    return false;
  } catch (const Found&) {
    return true;
  }
}

}  // namespace

bool well_scoped(const ValuePtr& t, std::size_t n) { return scoped_impl(t, n); }
bool well_scoped(const CompPtr& t, std::size_t n) { return scoped_impl(t, n); }
bool well_scoped(const VTypePtr& t, std::size_t n) { return scoped_impl(t, n); }
bool well_scoped(const CTypePtr& t, std::size_t n) { return scoped_impl(t, n); }
bool well_scoped(const StackPtr& t, std::size_t n) { return scoped_impl(t, n); }

bool uses_index(const ValuePtr& t, std::size_t j) { return uses_impl(t, j); }
bool uses_index(const CompPtr& t, std::size_t j) { return uses_impl(t, j); }
bool uses_index(const VTypePtr& t, std::size_t j) { return uses_impl(t, j); }
bool uses_index(const CTypePtr& t, std::size_t j) { return uses_impl(t, j); }

}  // namespace dcbpv
