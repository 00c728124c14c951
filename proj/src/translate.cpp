#include "dcbpv/translate.hpp"

namespace dcbpv {

using namespace surface;

// ---------------------------------------------------------------------------
// Call-by-value

VTypePtr cbv_translate_type(const TypePtr& t) {
  return std::visit(
      overloaded{
          [&](const STOne&) { return t_one(); },
          [&](const STSum& n) {
            std::vector<VTypePtr> items;
            for (const auto& i : n.items)
              items.push_back(cbv_translate_type(i));
            return t_sum(std::move(items));
          },
          [&](const STProd& n) {
            std::vector<CTypePtr> items;
            for (const auto& i : n.items)
              items.push_back(t_f(cbv_translate_type(i)));
            return t_u(t_pin(std::move(items)));
          },
          [&](const STPi& n) {
            return t_u(t_pi(cbv_translate_type(n.base),
                            t_f(cbv_translate_type(n.body))));
          },
          [&](const STSigma& n) {
            return t_sigma(cbv_translate_type(n.base),
                           cbv_translate_type(n.body));
          },
          [&](const STId& n) {
            return t_id(t_u(t_f(cbv_translate_type(n.carrier))),
                        vthunk(cbv_translate_term(n.lhs)),
                        vthunk(cbv_translate_term(n.rhs)));
          },
      },
      t->node);
}

CompPtr cbv_translate_term(const TermPtr& m) {
  auto go = [](const TermPtr& t) { return cbv_translate_term(t); };
  return std::visit(
      overloaded{
          [&](const SVar& n) { return creturn(vvar(n.index)); },
          [&](const SLet& n) { return cto_in(go(n.bound), go(n.body)); },
          [&](const SInj& n) {
            return cto_in(go(n.payload),
                          creturn(vinj(n.tag, n.arity, vvar(0))));
          },
          [&](const SPmSum& n) {
            std::vector<CompPtr> branches;
            for (const auto& b : n.branches)
              branches.push_back(shift(go(b), 1, 1));
            return cto_in(go(n.scrutinee),
                          cpm_sum(vvar(0), std::move(branches)));
          },
          [&](const SNTuple& n) {
            std::vector<CompPtr> items;
            for (const auto& i : n.items) items.push_back(go(i));
            return creturn(vthunk(ctuple(std::move(items))));
          },
          [&](const SNProj& n) {
            return cto_in(go(n.target), cproj(n.tag, cforce(vvar(0))));
          },
          [&](const SLam& n) { return creturn(vthunk(clam(go(n.body)))); },
          [&](const SApp& n) {
            // M ' N  =  M^v to x. (N^v to z. (x ' force z))
            return cto_in(go(n.arg),
                          cto_in(shift(go(n.fn), 1, 0),
                                 capp(vvar(1), cforce(vvar(0)))));
          },
          [&](const SUnit&) { return creturn(vunit()); },
          [&](const SPmUnit& n) {
            return cto_in(go(n.scrutinee),
                          cpm_unit(vvar(0), shift(go(n.body), 1, 0)));
          },
          [&](const SPair& n) {
            return cto_in(go(n.fst),
                          cto_in(shift(go(n.snd), 1, 0),
                                 creturn(vpair(vvar(1), vvar(0)))));
          },
          [&](const SPmPair& n) {
            return cto_in(go(n.scrutinee),
                          cpm_pair(vvar(0), shift(go(n.body), 1, 2)));
          },
          [&](const SRefl& n) {
            return cto_in(go(n.subject), creturn(vrefl(tr(vvar(0)))));
          },
          [&](const SPmId& n) {
            // M^v to z. pm z as refl y. (force y to x. N^v)
            return cto_in(
                go(n.scrutinee),
                cpm_id(vvar(0),
                       cto_in(cforce(vvar(0)), shift(go(n.body), 2, 1))));
          },
          [&](const SDiverge&) { return cdiverge(); },
          [&](const SError& n) { return cerror(n.name); },
          [&](const SMu& n) {
            // mu_x M  =  mu z. (force z to x. M^v)
            return cmu(cto_in(cforce(vvar(0)), shift(go(n.body), 1, 1)));
          },
          [&](const SPrint& n) { return cprint(n.letter, go(n.rest)); },
          [&](const SChoose& n) {
            std::vector<CompPtr> alts;
            for (const auto& a : n.alternatives) alts.push_back(go(a));
            return cchoose(std::move(alts));
          },
          [&](const SWrite& n) { return cwrite(n.state, go(n.rest)); },
          [&](const SRead& n) {
            std::vector<std::pair<std::string, CompPtr>> branches;
            for (const auto& [s, b] : n.branches) branches.emplace_back(s, go(b));
            return cread(std::move(branches));
          },
      },
      m->node);
}

// ---------------------------------------------------------------------------
// Call-by-name

CTypePtr cbn_translate_type(const TypePtr& t) {
  return std::visit(
      overloaded{
          [&](const STOne&) { return t_f(t_one()); },
          [&](const STSum& n) {
            std::vector<VTypePtr> items;
            for (const auto& i : n.items)
              items.push_back(t_u(cbn_translate_type(i)));
            return t_f(t_sum(std::move(items)));
          },
          [&](const STProd& n) {
            std::vector<CTypePtr> items;
            for (const auto& i : n.items)
              items.push_back(cbn_translate_type(i));
            return t_pin(std::move(items));
          },
          [&](const STPi& n) {
            return t_pi(t_u(cbn_translate_type(n.base)),
                        cbn_translate_type(n.body));
          },
          [&](const STSigma& n) {
            return t_f(t_sigma(t_u(cbn_translate_type(n.base)),
                               t_u(cbn_translate_type(n.body))));
          },
          [&](const STId& n) {
            return t_f(t_id(t_u(cbn_translate_type(n.carrier)),
                            vthunk(cbn_translate_term(n.lhs)),
                            vthunk(cbn_translate_term(n.rhs))));
          },
      },
      t->node);
}

CompPtr cbn_translate_term(const TermPtr& m) {
  auto go = [](const TermPtr& t) { return cbn_translate_term(t); };
  return std::visit(
      overloaded{
          [&](const SVar& n) { return cforce(vvar(n.index)); },
          [&](const SLet& n) {
            return clet(vthunk(go(n.bound)), go(n.body));
          },
          [&](const SInj& n) {
            return creturn(vinj(n.tag, n.arity, vthunk(go(n.payload))));
          },
          [&](const SPmSum& n) {
            std::vector<CompPtr> branches;
            for (const auto& b : n.branches)
              branches.push_back(shift(go(b), 1, 1));
            return cto_in(go(n.scrutinee),
                          cpm_sum(vvar(0), std::move(branches)));
          },
          [&](const SNTuple& n) {
            std::vector<CompPtr> items;
            for (const auto& i : n.items) items.push_back(go(i));
            return ctuple(std::move(items));
          },
          [&](const SNProj& n) { return cproj(n.tag, go(n.target)); },
          [&](const SLam& n) { return clam(go(n.body)); },
          [&](const SApp& n) {
            // N ' M  =  (thunk N^n) ' M^n
            return capp(vthunk(go(n.arg)), go(n.fn));
          },
          [&](const SUnit&) { return creturn(vunit()); },
          [&](const SPmUnit& n) {
            return cto_in(go(n.scrutinee),
                          cpm_unit(vvar(0), shift(go(n.body), 1, 0)));
          },
          [&](const SPair& n) {
            return creturn(vpair(vthunk(go(n.fst)), vthunk(go(n.snd))));
          },
          [&](const SPmPair& n) {
            return cto_in(go(n.scrutinee),
                          cpm_pair(vvar(0), shift(go(n.body), 1, 2)));
          },
          [&](const SRefl& n) {
            return creturn(vrefl(vthunk(go(n.subject))));
          },
          [&](const SPmId& n) {
            return cto_in(go(n.scrutinee),
                          cpm_id(vvar(0), shift(go(n.body), 1, 1)));
          },
          [&](const SDiverge&) { return cdiverge(); },
          [&](const SError& n) { return cerror(n.name); },
          [&](const SMu& n) { return cmu(go(n.body)); },
          [&](const SPrint& n) { return cprint(n.letter, go(n.rest)); },
          [&](const SChoose& n) {
            std::vector<CompPtr> alts;
            for (const auto& a : n.alternatives) alts.push_back(go(a));
            return cchoose(std::move(alts));
          },
          [&](const SWrite& n) { return cwrite(n.state, go(n.rest)); },
          [&](const SRead& n) {
            std::vector<std::pair<std::string, CompPtr>> branches;
            for (const auto& [s, b] : n.branches) branches.emplace_back(s, go(b));
            return cread(std::move(branches));
          },
      },
      m->node);
}

std::vector<VTypePtr> cbv_translate_context(
    const std::vector<TypePtr>& entries) {
  std::vector<VTypePtr> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(cbv_translate_type(e));
  return out;
}

std::vector<VTypePtr> cbn_translate_context(
    const std::vector<TypePtr>& entries) {
  std::vector<VTypePtr> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(t_u(cbn_translate_type(e)));
  return out;
}

// ---------------------------------------------------------------------------
// Complex-value elimination: hoist lets and pattern matches out of value
// positions, turning them into the corresponding computation-level forms.
// No beta steps are taken, so the result is syntactically close to the input
// and judgmentally equal to it.

namespace {

bool complex_root(const ValuePtr& v) {
  return std::holds_alternative<VLet>(v->node) ||
         std::holds_alternative<VPmSum>(v->node) ||
         std::holds_alternative<VPmUnit>(v->node) ||
         std::holds_alternative<VPmPair>(v->node) ||
         std::holds_alternative<VPmId>(v->node);
}

// Move a complex root one level out of a value context; `rebuild` reassembles
// the surrounding value with its other parts shifted by the new binders.
template <typename Rebuild>
ValuePtr hoist_v(const ValuePtr& v, Rebuild rebuild) {
  if (const auto* n = std::get_if<VLet>(&v->node))
    return vlet(n->bound, rebuild(n->body, 1));
  if (const auto* n = std::get_if<VPmSum>(&v->node)) {
    std::vector<ValuePtr> branches;
    for (const auto& b : n->branches) branches.push_back(rebuild(b, 1));
    return vpm_sum(n->scrutinee, std::move(branches));
  }
  if (const auto* n = std::get_if<VPmUnit>(&v->node))
    return vpm_unit(n->scrutinee, rebuild(n->body, 0));
  if (const auto* n = std::get_if<VPmPair>(&v->node))
    return vpm_pair(n->scrutinee, rebuild(n->body, 2));
  if (const auto* n = std::get_if<VPmId>(&v->node))
    return vpm_id(n->scrutinee, rebuild(n->body, 1));
  return nullptr;
}

template <typename Rebuild>
CompPtr hoist_c(const ValuePtr& v, Rebuild rebuild) {
  if (const auto* n = std::get_if<VLet>(&v->node))
    return clet(n->bound, rebuild(n->body, 1));
  if (const auto* n = std::get_if<VPmSum>(&v->node)) {
    std::vector<CompPtr> branches;
    for (const auto& b : n->branches) branches.push_back(rebuild(b, 1));
    return cpm_sum(n->scrutinee, std::move(branches));
  }
  if (const auto* n = std::get_if<VPmUnit>(&v->node))
    return cpm_unit(n->scrutinee, rebuild(n->body, 0));
  if (const auto* n = std::get_if<VPmPair>(&v->node))
    return cpm_pair(n->scrutinee, rebuild(n->body, 2));
  if (const auto* n = std::get_if<VPmId>(&v->node))
    return cpm_id(n->scrutinee, rebuild(n->body, 1));
  return nullptr;
}

ValuePtr ev(const ValuePtr& v);
CompPtr ec(const CompPtr& m);

// One hoisting step at the root of a value whose children are processed.
ValuePtr value_root_step(const ValuePtr& v) {
  if (const auto* n = std::get_if<VPair>(&v->node)) {
    if (complex_root(n->fst))
      return hoist_v(n->fst, [&](const ValuePtr& p, std::size_t k) {
        return vpair(p, shift(n->snd, (long long)k, 0));
      });
    if (complex_root(n->snd))
      return hoist_v(n->snd, [&](const ValuePtr& p, std::size_t k) {
        return vpair(shift(n->fst, (long long)k, 0), p);
      });
    return nullptr;
  }
  if (const auto* n = std::get_if<VInj>(&v->node)) {
    if (complex_root(n->payload))
      return hoist_v(n->payload, [&](const ValuePtr& p, std::size_t) {
        return vinj(n->tag, n->arity, p);
      });
    return nullptr;
  }
  if (const auto* n = std::get_if<VRefl>(&v->node)) {
    if (complex_root(n->subject))
      return hoist_v(n->subject,
                     [&](const ValuePtr& p, std::size_t) { return vrefl(p); });
    return nullptr;
  }
  if (const auto* n = std::get_if<VLet>(&v->node)) {
    if (complex_root(n->bound))
      return hoist_v(n->bound, [&](const ValuePtr& p, std::size_t k) {
        return vlet(p, shift(n->body, (long long)k, 1));
      });
    return nullptr;
  }
  if (const auto* n = std::get_if<VPmSum>(&v->node)) {
    if (complex_root(n->scrutinee))
      return hoist_v(n->scrutinee, [&](const ValuePtr& p, std::size_t k) {
        std::vector<ValuePtr> bs;
        for (const auto& b : n->branches)
          bs.push_back(shift(b, (long long)k, 1));
        return vpm_sum(p, std::move(bs));
      });
    return nullptr;
  }
  if (const auto* n = std::get_if<VPmUnit>(&v->node)) {
    if (complex_root(n->scrutinee))
      return hoist_v(n->scrutinee, [&](const ValuePtr& p, std::size_t k) {
        return vpm_unit(p, shift(n->body, (long long)k, 0));
      });
    return nullptr;
  }
  if (const auto* n = std::get_if<VPmPair>(&v->node)) {
    if (complex_root(n->scrutinee))
      return hoist_v(n->scrutinee, [&](const ValuePtr& p, std::size_t k) {
        return vpm_pair(p, shift(n->body, (long long)k, 2));
      });
    return nullptr;
  }
  if (const auto* n = std::get_if<VPmId>(&v->node)) {
    if (complex_root(n->scrutinee))
      return hoist_v(n->scrutinee, [&](const ValuePtr& p, std::size_t k) {
        return vpm_id(p, shift(n->body, (long long)k, 1));
      });
    return nullptr;
  }
  return nullptr;
}

ValuePtr ev(const ValuePtr& v) {
  ValuePtr r = std::visit(
      overloaded{
          [&](const VVar&) { return v; },
          [&](const VThunk& n) {
            CompPtr b = ec(n.body);
            return b == n.body ? v : vthunk(b);
          },
          [&](const VInj& n) {
            ValuePtr p = ev(n.payload);
            return p == n.payload ? v : vinj(n.tag, n.arity, p);
          },
          [&](const VUnit&) { return v; },
          [&](const VPair& n) {
            ValuePtr a = ev(n.fst), b = ev(n.snd);
            return (a == n.fst && b == n.snd) ? v : vpair(a, b);
          },
          [&](const VRefl& n) {
            ValuePtr s = ev(n.subject);
            return s == n.subject ? v : vrefl(s);
          },
          [&](const VLet& n) {
            ValuePtr a = ev(n.bound), b = ev(n.body);
            return (a == n.bound && b == n.body) ? v : vlet(a, b);
          },
          [&](const VPmSum& n) {
            ValuePtr s = ev(n.scrutinee);
            std::vector<ValuePtr> bs;
            bool same = s == n.scrutinee;
            for (const auto& b : n.branches) {
              bs.push_back(ev(b));
              same = same && bs.back() == b;
            }
            return same ? v : vpm_sum(s, std::move(bs));
          },
          [&](const VPmUnit& n) {
            ValuePtr s = ev(n.scrutinee), b = ev(n.body);
            return (s == n.scrutinee && b == n.body) ? v : vpm_unit(s, b);
          },
          [&](const VPmPair& n) {
            ValuePtr s = ev(n.scrutinee), b = ev(n.body);
            return (s == n.scrutinee && b == n.body) ? v : vpm_pair(s, b);
          },
          [&](const VPmId& n) {
            ValuePtr s = ev(n.scrutinee), b = ev(n.body);
            return (s == n.scrutinee && b == n.body) ? v : vpm_id(s, b);
          },
      },
      v->node);
  while (ValuePtr stepped = value_root_step(r)) r = stepped;
  return r;
}

// One hoisting step at the root of a computation whose children are
// processed: if any direct value child has a complex root, convert it into
// the computation-level eliminator.
CompPtr comp_root_step(const CompPtr& m) {
  if (const auto* n = std::get_if<CReturn>(&m->node)) {
    if (complex_root(n->value))
      return hoist_c(n->value,
                     [&](const ValuePtr& p, std::size_t) { return creturn(p); });
    return nullptr;
  }
  if (const auto* n = std::get_if<CForce>(&m->node)) {
    if (complex_root(n->value))
      return hoist_c(n->value,
                     [&](const ValuePtr& p, std::size_t) { return cforce(p); });
    return nullptr;
  }
  if (const auto* n = std::get_if<CLet>(&m->node)) {
    if (complex_root(n->bound))
      return hoist_c(n->bound, [&](const ValuePtr& p, std::size_t k) {
        return clet(p, shift(n->body, (long long)k, 1));
      });
    return nullptr;
  }
  if (const auto* n = std::get_if<CApp>(&m->node)) {
    if (complex_root(n->arg))
      return hoist_c(n->arg, [&](const ValuePtr& p, std::size_t k) {
        return capp(p, shift(n->fn, (long long)k, 0));
      });
    return nullptr;
  }
  if (const auto* n = std::get_if<CPmSum>(&m->node)) {
    if (complex_root(n->scrutinee))
      return hoist_c(n->scrutinee, [&](const ValuePtr& p, std::size_t k) {
        std::vector<CompPtr> bs;
        for (const auto& b : n->branches)
          bs.push_back(shift(b, (long long)k, 1));
        return cpm_sum(p, std::move(bs),
                       n->motive ? shift(n->motive, (long long)k, 1)
                                 : nullptr);
      });
    return nullptr;
  }
  if (const auto* n = std::get_if<CPmUnit>(&m->node)) {
    if (complex_root(n->scrutinee))
      return hoist_c(n->scrutinee, [&](const ValuePtr& p, std::size_t k) {
        return cpm_unit(p, shift(n->body, (long long)k, 0),
                        n->motive ? shift(n->motive, (long long)k, 1)
                                  : nullptr);
      });
    return nullptr;
  }
  if (const auto* n = std::get_if<CPmPair>(&m->node)) {
    if (complex_root(n->scrutinee))
      return hoist_c(n->scrutinee, [&](const ValuePtr& p, std::size_t k) {
        return cpm_pair(p, shift(n->body, (long long)k, 2),
                        n->motive ? shift(n->motive, (long long)k, 1)
                                  : nullptr);
      });
    return nullptr;
  }
  if (const auto* n = std::get_if<CPmId>(&m->node)) {
    if (complex_root(n->scrutinee))
      return hoist_c(n->scrutinee, [&](const ValuePtr& p, std::size_t k) {
        return cpm_id(p, shift(n->body, (long long)k, 1),
                      n->motive ? shift(n->motive, (long long)k, 3)
                                : nullptr);
      });
    return nullptr;
  }
  return nullptr;
}

CompPtr ec(const CompPtr& m) {
  CompPtr r = std::visit(
      overloaded{
          [&](const CReturn& n) {
            ValuePtr v = ev(n.value);
            return v == n.value ? m : creturn(v);
          },
          [&](const CToIn& n) {
            CompPtr h = ec(n.head), b = ec(n.body);
            return (h == n.head && b == n.body) ? m
                                                : cto_in(h, b, n.motive);
          },
          [&](const CForce& n) {
            ValuePtr v = ev(n.value);
            return v == n.value ? m : cforce(v);
          },
          [&](const CLet& n) {
            ValuePtr v = ev(n.bound);
            CompPtr b = ec(n.body);
            return (v == n.bound && b == n.body) ? m : clet(v, b);
          },
          [&](const CPmSum& n) {
            ValuePtr s = ev(n.scrutinee);
            std::vector<CompPtr> bs;
            bool same = s == n.scrutinee;
            for (const auto& b : n.branches) {
              bs.push_back(ec(b));
              same = same && bs.back() == b;
            }
            return same ? m : cpm_sum(s, std::move(bs), n.motive);
          },
          [&](const CPmUnit& n) {
            ValuePtr s = ev(n.scrutinee);
            CompPtr b = ec(n.body);
            return (s == n.scrutinee && b == n.body)
                       ? m
                       : cpm_unit(s, b, n.motive);
          },
          [&](const CPmPair& n) {
            ValuePtr s = ev(n.scrutinee);
            CompPtr b = ec(n.body);
            return (s == n.scrutinee && b == n.body)
                       ? m
                       : cpm_pair(s, b, n.motive);
          },
          [&](const CPmId& n) {
            ValuePtr s = ev(n.scrutinee);
            CompPtr b = ec(n.body);
            return (s == n.scrutinee && b == n.body) ? m
                                                     : cpm_id(s, b, n.motive);
          },
          [&](const CTuple& n) {
            std::vector<CompPtr> is;
            bool same = true;
            for (const auto& i : n.items) {
              is.push_back(ec(i));
              same = same && is.back() == i;
            }
            return same ? m : ctuple(std::move(is));
          },
          [&](const CProj& n) {
            CompPtr g = ec(n.target);
            return g == n.target ? m : cproj(n.tag, g);
          },
          [&](const CLam& n) {
            CompPtr b = ec(n.body);
            return b == n.body ? m : clam(b);
          },
          [&](const CApp& n) {
            ValuePtr a = ev(n.arg);
            CompPtr f = ec(n.fn);
            return (a == n.arg && f == n.fn) ? m : capp(a, f);
          },
          [&](const CDiverge&) { return m; },
          [&](const CError&) { return m; },
          [&](const CMu& n) {
            CompPtr b = ec(n.body);
            return b == n.body ? m : cmu(b);
          },
          [&](const CPrint& n) {
            CompPtr r2 = ec(n.rest);
            return r2 == n.rest ? m : cprint(n.letter, r2);
          },
          [&](const CChoose& n) {
            std::vector<CompPtr> as;
            bool same = true;
            for (const auto& a : n.alternatives) {
              as.push_back(ec(a));
              same = same && as.back() == a;
            }
            return same ? m : cchoose(std::move(as));
          },
          [&](const CWrite& n) {
            CompPtr r2 = ec(n.rest);
            return r2 == n.rest ? m : cwrite(n.state, r2);
          },
          [&](const CRead& n) {
            std::vector<std::pair<std::string, CompPtr>> bs;
            bool same = true;
            for (const auto& [s, b] : n.branches) {
              bs.emplace_back(s, ec(b));
              same = same && bs.back().second == b;
            }
            return same ? m : cread(std::move(bs));
          },
      },
      m->node);
  while (CompPtr stepped = comp_root_step(r)) r = ec(stepped);
  return r;
}

}  // namespace

CompPtr eliminate_complex_values(const CompPtr& m) { return ec(m); }

}  // namespace dcbpv
