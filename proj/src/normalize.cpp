#include "dcbpv/normalize.hpp"

#include <optional>

namespace dcbpv {

namespace {

struct Normalizer {
  NormalizeOptions opts;
  unsigned long long steps = 0;

  void tick() {
    if (++steps > opts.fuel) throw FuelExhaustedError(opts.fuel);
  }

  // ---- root rewrite steps -------------------------------------------------

  // Hoist a complex value one level out of a single-value-hole computation
  // context. `rebuild(payload, k)` reassembles the context around the new
  // payload, with its other parts shifted by k new binders.
  template <typename Rebuild>
  std::optional<CompPtr> hoist_comp(const ValuePtr& v, Rebuild rebuild) {
    if (const auto* n = std::get_if<VLet>(&v->node))
      return clet(n->bound, rebuild(n->body, 1));
    if (const auto* n = std::get_if<VPmSum>(&v->node)) {
      std::vector<CompPtr> branches;
      branches.reserve(n->branches.size());
      for (const auto& b : n->branches) branches.push_back(rebuild(b, 1));
      return cpm_sum(n->scrutinee, std::move(branches));
    }
    if (const auto* n = std::get_if<VPmUnit>(&v->node))
      return cpm_unit(n->scrutinee, rebuild(n->body, 0));
    if (const auto* n = std::get_if<VPmPair>(&v->node))
      return cpm_pair(n->scrutinee, rebuild(n->body, 2));
    if (const auto* n = std::get_if<VPmId>(&v->node))
      return cpm_id(n->scrutinee, rebuild(n->body, 1));
    return std::nullopt;
  }

  template <typename Rebuild>
  std::optional<ValuePtr> hoist_value(const ValuePtr& v, Rebuild rebuild) {
    if (const auto* n = std::get_if<VLet>(&v->node))
      return vlet(n->bound, rebuild(n->body, 1));
    if (const auto* n = std::get_if<VPmSum>(&v->node)) {
      std::vector<ValuePtr> branches;
      branches.reserve(n->branches.size());
      for (const auto& b : n->branches) branches.push_back(rebuild(b, 1));
      return vpm_sum(n->scrutinee, std::move(branches));
    }
    if (const auto* n = std::get_if<VPmUnit>(&v->node))
      return vpm_unit(n->scrutinee, rebuild(n->body, 0));
    if (const auto* n = std::get_if<VPmPair>(&v->node))
      return vpm_pair(n->scrutinee, rebuild(n->body, 2));
    if (const auto* n = std::get_if<VPmId>(&v->node))
      return vpm_id(n->scrutinee, rebuild(n->body, 1));
    return std::nullopt;
  }

  std::optional<CompPtr> step_comp(const CompPtr& t) {
    if (const auto* let = std::get_if<CLet>(&t->node))
      return subst(let->body, let->bound, 0);

    if (const auto* to = std::get_if<CToIn>(&t->node)) {
      const CompPtr& h = to->head;
      if (const auto* r = std::get_if<CReturn>(&h->node))
        return subst(to->body, r->value, 0);
      if (std::holds_alternative<CDiverge>(h->node)) return cdiverge();
      if (const auto* e = std::get_if<CError>(&h->node)) return cerror(e->name);
      if (const auto* c = std::get_if<CChoose>(&h->node)) {
        std::vector<CompPtr> alts;
        for (const auto& a : c->alternatives)
          alts.push_back(cto_in(a, to->body, to->motive));
        return cchoose(std::move(alts));
      }
      if (const auto* rd = std::get_if<CRead>(&h->node)) {
        std::vector<std::pair<std::string, CompPtr>> branches;
        for (const auto& [s, m] : rd->branches)
          branches.emplace_back(s, cto_in(m, to->body, to->motive));
        return cread(std::move(branches));
      }
      if (const auto* p = std::get_if<CPrint>(&h->node))
        return cprint(p->letter, cto_in(p->rest, to->body, to->motive));
      if (const auto* w = std::get_if<CWrite>(&h->node))
        return cwrite(w->state, cto_in(w->rest, to->body, to->motive));
      if (const auto* inner = std::get_if<CToIn>(&h->node)) {
        // (M to x. N) to y. N'  =  M to x. (N to y. N')
        CompPtr lifted = shift(to->body, 1, 1);
        CTypePtr motive = to->motive ? shift(to->motive, 1, 1) : nullptr;
        return cto_in(inner->head,
                      cto_in(inner->body, lifted, motive), inner->motive);
      }
      if (const auto* lam = std::get_if<CLam>(&to->body->node))
        return clam(cto_in(shift(to->head, 1, 0),
                           swap_indices(lam->body, 0, 1)));
      if (const auto* tup = std::get_if<CTuple>(&to->body->node)) {
        std::vector<CompPtr> items;
        for (const auto& i : tup->items)
          items.push_back(cto_in(to->head, i));
        return ctuple(std::move(items));
      }
      // F-eta: M to x. return x  =  M
      if (const auto* r = std::get_if<CReturn>(&to->body->node)) {
        if (const auto* var = std::get_if<VVar>(&r->value->node))
          if (var->index == 0) return to->head;
      }
      return std::nullopt;
    }

    if (const auto* f = std::get_if<CForce>(&t->node)) {
      if (const auto* th = std::get_if<VThunk>(&f->value->node))
        return th->body;
      return hoist_comp(f->value,
                        [&](const ValuePtr& v, std::size_t) { return cforce(v); });
    }

    if (const auto* pm = std::get_if<CPmSum>(&t->node)) {
      if (const auto* inj = std::get_if<VInj>(&pm->scrutinee->node)) {
        if (inj->tag >= 1 && inj->tag <= pm->branches.size())
          return subst(pm->branches[inj->tag - 1], inj->payload, 0);
      }
      return hoist_comp(pm->scrutinee, [&](const ValuePtr& v, std::size_t k) {
        std::vector<CompPtr> branches;
        for (const auto& b : pm->branches)
          branches.push_back(shift(b, static_cast<long long>(k), 1));
        return cpm_sum(v, std::move(branches),
                       pm->motive
                           ? shift(pm->motive, static_cast<long long>(k), 1)
                           : nullptr);
      });
    }
    if (const auto* pm = std::get_if<CPmUnit>(&t->node)) {
      if (std::holds_alternative<VUnit>(pm->scrutinee->node)) return pm->body;
      return hoist_comp(pm->scrutinee, [&](const ValuePtr& v, std::size_t k) {
        return cpm_unit(v, shift(pm->body, static_cast<long long>(k), 0),
                        pm->motive
                            ? shift(pm->motive, static_cast<long long>(k), 1)
                            : nullptr);
      });
    }
    if (const auto* pm = std::get_if<CPmPair>(&t->node)) {
      if (const auto* pr = std::get_if<VPair>(&pm->scrutinee->node))
        return subst2(pm->body, pr->fst, pr->snd);
      return hoist_comp(pm->scrutinee, [&](const ValuePtr& v, std::size_t k) {
        return cpm_pair(v, shift(pm->body, static_cast<long long>(k), 2),
                        pm->motive
                            ? shift(pm->motive, static_cast<long long>(k), 1)
                            : nullptr);
      });
    }
    if (const auto* pm = std::get_if<CPmId>(&t->node)) {
      if (const auto* r = std::get_if<VRefl>(&pm->scrutinee->node))
        return subst(pm->body, r->subject, 0);
      if (opts.eta_id && !uses_index(pm->body, 0))
        return shift(pm->body, -1, 0);
      return hoist_comp(pm->scrutinee, [&](const ValuePtr& v, std::size_t k) {
        return cpm_id(v, shift(pm->body, static_cast<long long>(k), 1),
                      pm->motive
                          ? shift(pm->motive, static_cast<long long>(k), 3)
                          : nullptr);
      });
    }

    if (const auto* proj = std::get_if<CProj>(&t->node)) {
      const CompPtr& g = proj->target;
      if (const auto* tup = std::get_if<CTuple>(&g->node)) {
        if (proj->tag >= 1 && proj->tag <= tup->items.size())
          return tup->items[proj->tag - 1];
      }
      if (std::holds_alternative<CDiverge>(g->node)) return cdiverge();
      if (const auto* e = std::get_if<CError>(&g->node)) return cerror(e->name);
      if (const auto* p = std::get_if<CPrint>(&g->node))
        return cprint(p->letter, cproj(proj->tag, p->rest));
      if (const auto* w = std::get_if<CWrite>(&g->node))
        return cwrite(w->state, cproj(proj->tag, w->rest));
      if (const auto* c = std::get_if<CChoose>(&g->node)) {
        std::vector<CompPtr> alts;
        for (const auto& a : c->alternatives)
          alts.push_back(cproj(proj->tag, a));
        return cchoose(std::move(alts));
      }
      if (const auto* rd = std::get_if<CRead>(&g->node)) {
        std::vector<std::pair<std::string, CompPtr>> branches;
        for (const auto& [s, m] : rd->branches)
          branches.emplace_back(s, cproj(proj->tag, m));
        return cread(std::move(branches));
      }
      if (const auto* to = std::get_if<CToIn>(&g->node))
        return cto_in(to->head, cproj(proj->tag, to->body));
      return std::nullopt;
    }

    if (const auto* app = std::get_if<CApp>(&t->node)) {
      const CompPtr& g = app->fn;
      if (const auto* lam = std::get_if<CLam>(&g->node))
        return subst(lam->body, app->arg, 0);
      if (std::holds_alternative<CDiverge>(g->node)) return cdiverge();
      if (const auto* e = std::get_if<CError>(&g->node)) return cerror(e->name);
      if (const auto* p = std::get_if<CPrint>(&g->node))
        return cprint(p->letter, capp(app->arg, p->rest));
      if (const auto* w = std::get_if<CWrite>(&g->node))
        return cwrite(w->state, capp(app->arg, w->rest));
      if (const auto* c = std::get_if<CChoose>(&g->node)) {
        std::vector<CompPtr> alts;
        for (const auto& a : c->alternatives) alts.push_back(capp(app->arg, a));
        return cchoose(std::move(alts));
      }
      if (const auto* rd = std::get_if<CRead>(&g->node)) {
        std::vector<std::pair<std::string, CompPtr>> branches;
        for (const auto& [s, m] : rd->branches)
          branches.emplace_back(s, capp(app->arg, m));
        return cread(std::move(branches));
      }
      if (const auto* to = std::get_if<CToIn>(&g->node))
        return cto_in(to->head, capp(shift(app->arg, 1, 0), to->body));
      return hoist_comp(app->arg, [&](const ValuePtr& v, std::size_t k) {
        return capp(v, shift(app->fn, static_cast<long long>(k), 0));
      });
    }

    if (const auto* lam = std::get_if<CLam>(&t->node)) {
      // eta: \x. x ' M  =  M  when x is not free in M
      if (const auto* app = std::get_if<CApp>(&lam->body->node)) {
        if (const auto* var = std::get_if<VVar>(&app->arg->node)) {
          if (var->index == 0 && !uses_index(app->fn, 0))
            return shift(app->fn, -1, 0);
        }
      }
      return std::nullopt;
    }

    if (const auto* tup = std::get_if<CTuple>(&t->node)) {
      // eta: tuple {1'M | ... | n'M}  =  M
      if (tup->items.empty()) return std::nullopt;
      CompPtr target;
      for (std::size_t i = 0; i < tup->items.size(); ++i) {
        const auto* p = std::get_if<CProj>(&tup->items[i]->node);
        if (!p || p->tag != i + 1) return std::nullopt;
        if (i == 0)
          target = p->target;
        else if (!eq_modulo_motives(p->target, target))
          return std::nullopt;
      }
      return target;
    }

    if (const auto* ret = std::get_if<CReturn>(&t->node))
      if (auto h = hoist_comp(ret->value, [&](const ValuePtr& v, std::size_t) {
            return creturn(v);
          }))
        return h;

    return std::nullopt;
  }

  std::optional<ValuePtr> step_value(const ValuePtr& t) {
    if (const auto* let = std::get_if<VLet>(&t->node))
      return subst(let->body, let->bound, 0);
    if (const auto* pm = std::get_if<VPmSum>(&t->node)) {
      if (const auto* inj = std::get_if<VInj>(&pm->scrutinee->node))
        if (inj->tag >= 1 && inj->tag <= pm->branches.size())
          return subst(pm->branches[inj->tag - 1], inj->payload, 0);
      return hoist_value(pm->scrutinee, [&](const ValuePtr& v, std::size_t k) {
        std::vector<ValuePtr> branches;
        for (const auto& b : pm->branches)
          branches.push_back(shift(b, static_cast<long long>(k), 1));
        return vpm_sum(v, std::move(branches));
      });
    }
    if (const auto* pm = std::get_if<VPmUnit>(&t->node)) {
      if (std::holds_alternative<VUnit>(pm->scrutinee->node)) return pm->body;
      return hoist_value(pm->scrutinee, [&](const ValuePtr& v, std::size_t k) {
        return vpm_unit(v, shift(pm->body, static_cast<long long>(k), 0));
      });
    }
    if (const auto* pm = std::get_if<VPmPair>(&t->node)) {
      if (const auto* pr = std::get_if<VPair>(&pm->scrutinee->node))
        return subst2(pm->body, pr->fst, pr->snd);
      return hoist_value(pm->scrutinee, [&](const ValuePtr& v, std::size_t k) {
        return vpm_pair(v, shift(pm->body, static_cast<long long>(k), 2));
      });
    }
    if (const auto* pm = std::get_if<VPmId>(&t->node)) {
      if (const auto* r = std::get_if<VRefl>(&pm->scrutinee->node))
        return subst(pm->body, r->subject, 0);
      if (opts.eta_id && !uses_index(pm->body, 0))
        return shift(pm->body, -1, 0);
      return hoist_value(pm->scrutinee, [&](const ValuePtr& v, std::size_t k) {
        return vpm_id(v, shift(pm->body, static_cast<long long>(k), 1));
      });
    }
    if (const auto* th = std::get_if<VThunk>(&t->node)) {
      // eta: thunk force V  =  V
      if (const auto* f = std::get_if<CForce>(&th->body->node))
        return f->value;
      return std::nullopt;
    }
    // Hoist complex subvalues toward the value root.
    if (const auto* pr = std::get_if<VPair>(&t->node)) {
      if (auto h = hoist_value(pr->fst, [&](const ValuePtr& v, std::size_t k) {
            return vpair(v, shift(pr->snd, static_cast<long long>(k), 0));
          }))
        return h;
      return hoist_value(pr->snd, [&](const ValuePtr& v, std::size_t k) {
        return vpair(shift(pr->fst, static_cast<long long>(k), 0), v);
      });
    }
    if (const auto* inj = std::get_if<VInj>(&t->node))
      return hoist_value(inj->payload, [&](const ValuePtr& v, std::size_t) {
        return vinj(inj->tag, inj->arity, v);
      });
    if (const auto* r = std::get_if<VRefl>(&t->node))
      return hoist_value(r->subject,
                         [&](const ValuePtr& v, std::size_t) { return vrefl(v); });
    return std::nullopt;
  }

  // ---- bottom-up normalization --------------------------------------------

  ValuePtr nv(const ValuePtr& t) {
    ValuePtr r = std::visit(
        overloaded{
            [&](const VVar&) { return t; },
            [&](const VThunk& n) {
              CompPtr b = nc(n.body);
              return b == n.body ? t : vthunk(b);
            },
            [&](const VInj& n) {
              ValuePtr p = nv(n.payload);
              return p == n.payload ? t : vinj(n.tag, n.arity, p);
            },
            [&](const VUnit&) { return t; },
            [&](const VPair& n) {
              ValuePtr a = nv(n.fst), b = nv(n.snd);
              return (a == n.fst && b == n.snd) ? t : vpair(a, b);
            },
            [&](const VRefl& n) {
              ValuePtr s = nv(n.subject);
              return s == n.subject ? t : vrefl(s);
            },
            [&](const VLet& n) {
              ValuePtr bound = nv(n.bound), body = nv(n.body);
              return (bound == n.bound && body == n.body) ? t
                                                          : vlet(bound, body);
            },
            [&](const VPmSum& n) {
              ValuePtr s = nv(n.scrutinee);
              std::vector<ValuePtr> bs;
              bool same = s == n.scrutinee;
              for (const auto& b : n.branches) {
                bs.push_back(nv(b));
                same = same && bs.back() == b;
              }
              return same ? t : vpm_sum(s, std::move(bs));
            },
            [&](const VPmUnit& n) {
              ValuePtr s = nv(n.scrutinee), b = nv(n.body);
              return (s == n.scrutinee && b == n.body) ? t : vpm_unit(s, b);
            },
            [&](const VPmPair& n) {
              ValuePtr s = nv(n.scrutinee), b = nv(n.body);
              return (s == n.scrutinee && b == n.body) ? t : vpm_pair(s, b);
            },
            [&](const VPmId& n) {
              ValuePtr s = nv(n.scrutinee), b = nv(n.body);
              return (s == n.scrutinee && b == n.body) ? t : vpm_id(s, b);
            },
        },
        t->node);
    if (auto stepped = step_value(r)) {
      tick();
      return nv(*stepped);
    }
    return r;
  }

  CompPtr nc(const CompPtr& t) {
    CompPtr r = std::visit(
        overloaded{
            [&](const CReturn& n) {
              ValuePtr v = nv(n.value);
              return v == n.value ? t : creturn(v);
            },
            [&](const CToIn& n) {
              CompPtr h = nc(n.head);
              CTypePtr m = n.motive ? nt(n.motive) : nullptr;
              CompPtr b = nc(n.body);
              return (h == n.head && m == n.motive && b == n.body)
                         ? t
                         : cto_in(h, b, m);
            },
            [&](const CForce& n) {
              ValuePtr v = nv(n.value);
              return v == n.value ? t : cforce(v);
            },
            [&](const CLet& n) {
              ValuePtr bound = nv(n.bound);
              CompPtr body = nc(n.body);
              return (bound == n.bound && body == n.body) ? t
                                                          : clet(bound, body);
            },
            [&](const CPmSum& n) {
              ValuePtr s = nv(n.scrutinee);
              CTypePtr m = n.motive ? nt(n.motive) : nullptr;
              std::vector<CompPtr> bs;
              bool same = s == n.scrutinee && m == n.motive;
              for (const auto& b : n.branches) {
                bs.push_back(nc(b));
                same = same && bs.back() == b;
              }
              return same ? t : cpm_sum(s, std::move(bs), m);
            },
            [&](const CPmUnit& n) {
              ValuePtr s = nv(n.scrutinee);
              CTypePtr m = n.motive ? nt(n.motive) : nullptr;
              CompPtr b = nc(n.body);
              return (s == n.scrutinee && m == n.motive && b == n.body)
                         ? t
                         : cpm_unit(s, b, m);
            },
            [&](const CPmPair& n) {
              ValuePtr s = nv(n.scrutinee);
              CTypePtr m = n.motive ? nt(n.motive) : nullptr;
              CompPtr b = nc(n.body);
              return (s == n.scrutinee && m == n.motive && b == n.body)
                         ? t
                         : cpm_pair(s, b, m);
            },
            [&](const CPmId& n) {
              ValuePtr s = nv(n.scrutinee);
              CTypePtr m = n.motive ? nt(n.motive) : nullptr;
              CompPtr b = nc(n.body);
              return (s == n.scrutinee && m == n.motive && b == n.body)
                         ? t
                         : cpm_id(s, b, m);
            },
            [&](const CTuple& n) {
              std::vector<CompPtr> is;
              bool same = true;
              for (const auto& i : n.items) {
                is.push_back(nc(i));
                same = same && is.back() == i;
              }
              return same ? t : ctuple(std::move(is));
            },
            [&](const CProj& n) {
              CompPtr g = nc(n.target);
              return g == n.target ? t : cproj(n.tag, g);
            },
            [&](const CLam& n) {
              CompPtr b = nc(n.body);
              return b == n.body ? t : clam(b);
            },
            [&](const CApp& n) {
              ValuePtr a = nv(n.arg);
              CompPtr f = nc(n.fn);
              return (a == n.arg && f == n.fn) ? t : capp(a, f);
            },
            [&](const CDiverge&) { return t; },
            [&](const CError&) { return t; },
            [&](const CMu& n) {
              CompPtr b = nc(n.body);
              return b == n.body ? t : cmu(b);
            },
            [&](const CPrint& n) {
              CompPtr r2 = nc(n.rest);
              return r2 == n.rest ? t : cprint(n.letter, r2);
            },
            [&](const CChoose& n) {
              std::vector<CompPtr> as;
              bool same = true;
              for (const auto& a : n.alternatives) {
                as.push_back(nc(a));
                same = same && as.back() == a;
              }
              return same ? t : cchoose(std::move(as));
            },
            [&](const CWrite& n) {
              CompPtr r2 = nc(n.rest);
              return r2 == n.rest ? t : cwrite(n.state, r2);
            },
            [&](const CRead& n) {
              std::vector<std::pair<std::string, CompPtr>> bs;
              bool same = true;
              for (const auto& [s, m] : n.branches) {
                bs.emplace_back(s, nc(m));
                same = same && bs.back().second == m;
              }
              return same ? t : cread(std::move(bs));
            },
        },
        t->node);
    if (auto stepped = step_comp(r)) {
      tick();
      return nc(*stepped);
    }
    return r;
  }

  VTypePtr nvt(const VTypePtr& t) {
    return std::visit(
        overloaded{
            [&](const TU& n) {
              CTypePtr b = nt(n.body);
              return b == n.body ? t : t_u(b);
            },
            [&](const TSumN& n) {
              std::vector<VTypePtr> is;
              bool same = true;
              for (const auto& i : n.items) {
                is.push_back(nvt(i));
                same = same && is.back() == i;
              }
              return same ? t : t_sum(std::move(is));
            },
            [&](const TOne&) { return t; },
            [&](const TSigma& n) {
              VTypePtr b = nvt(n.base), f = nvt(n.fiber);
              return (b == n.base && f == n.fiber) ? t : t_sigma(b, f);
            },
            [&](const TId& n) {
              VTypePtr c = nvt(n.carrier);
              ValuePtr l = nv(n.lhs), r = nv(n.rhs);
              return (c == n.carrier && l == n.lhs && r == n.rhs)
                         ? t
                         : t_id(c, l, r);
            },
        },
        t->node);
  }

  CTypePtr nt(const CTypePtr& t) {
    return std::visit(
        overloaded{
            [&](const TF& n) {
              VTypePtr v = nvt(n.value);
              return v == n.value ? t : t_f(v);
            },
            [&](const TPiN& n) {
              std::vector<CTypePtr> is;
              bool same = true;
              for (const auto& i : n.items) {
                is.push_back(nt(i));
                same = same && is.back() == i;
              }
              return same ? t : t_pin(std::move(is));
            },
            [&](const TPi& n) {
              VTypePtr b = nvt(n.base);
              CTypePtr body = nt(n.body);
              return (b == n.base && body == n.body) ? t : t_pi(b, body);
            },
        },
        t->node);
  }
};

// ---------------------------------------------------------------------------
// Conversion

struct Conv {
  Normalizer norm;

  bool comp(const CompPtr& a0, const CompPtr& b0, const CTypePtr& type0,
            unsigned budget_a, unsigned budget_b) {
    CompPtr a = norm.nc(a0), b = norm.nc(b0);
    CTypePtr type = norm.nt(type0);
    return comp_nf(a, b, type, budget_a, budget_b);
  }

  bool comp_nf(const CompPtr& a, const CompPtr& b, const CTypePtr& type,
               unsigned budget_a, unsigned budget_b) {
    if (eq_modulo_motives(a, b)) return true;

    if (const auto* pi = std::get_if<TPi>(&type->node)) {
      CompPtr ea = norm.nc(capp(vvar(0), shift(a, 1, 0)));
      CompPtr eb = norm.nc(capp(vvar(0), shift(b, 1, 0)));
      return comp_nf(ea, eb, norm.nt(pi->body), budget_a, budget_b);
    }
    if (const auto* pin = std::get_if<TPiN>(&type->node)) {
      for (std::size_t i = 0; i < pin->items.size(); ++i) {
        CompPtr ea = norm.nc(cproj(i + 1, a));
        CompPtr eb = norm.nc(cproj(i + 1, b));
        if (!comp_nf(ea, eb, norm.nt(pin->items[i]), budget_a, budget_b))
          return false;
      }
      return true;
    }

    if (const auto* f = std::get_if<TF>(&type->node)) {
      if (a->node.index() == b->node.index()) {
        if (const auto* ra = std::get_if<CReturn>(&a->node))
          return value_nf(ra->value, std::get<CReturn>(b->node).value,
                          f->value, budget_a, budget_b);
        if (const auto* pa = std::get_if<CPrint>(&a->node)) {
          const auto& pb = std::get<CPrint>(b->node);
          return pa->letter == pb.letter &&
                 comp_nf(pa->rest, pb.rest, type, budget_a, budget_b);
        }
        if (const auto* wa = std::get_if<CWrite>(&a->node)) {
          const auto& wb = std::get<CWrite>(b->node);
          return wa->state == wb.state &&
                 comp_nf(wa->rest, wb.rest, type, budget_a, budget_b);
        }
        if (const auto* ca = std::get_if<CChoose>(&a->node)) {
          const auto& cb = std::get<CChoose>(b->node);
          if (ca->alternatives.size() != cb.alternatives.size()) return false;
          for (std::size_t i = 0; i < ca->alternatives.size(); ++i)
            if (!comp_nf(ca->alternatives[i], cb.alternatives[i], type,
                         budget_a, budget_b))
              return false;
          return true;
        }
        if (const auto* ra = std::get_if<CRead>(&a->node)) {
          const auto& rb = std::get<CRead>(b->node);
          if (ra->branches.size() != rb.branches.size()) return false;
          for (std::size_t i = 0; i < ra->branches.size(); ++i) {
            if (ra->branches[i].first != rb.branches[i].first) return false;
            if (!comp_nf(ra->branches[i].second, rb.branches[i].second, type,
                         budget_a, budget_b))
              return false;
          }
          return true;
        }
        if (const auto* ta = std::get_if<CToIn>(&a->node)) {
          // Neutral heads; compare bodies at the shifted result type.
          const auto& tb = std::get<CToIn>(b->node);
          return eq_modulo_motives(ta->head, tb.head) &&
                 comp_nf(ta->body, tb.body, shift(type, 1, 0), budget_a,
                         budget_b);
        }
      }
      return try_mu(a, b, type, budget_a, budget_b);
    }
    return try_mu(a, b, type, budget_a, budget_b);
  }

  bool try_mu(const CompPtr& a, const CompPtr& b, const CTypePtr& type,
              unsigned budget_a, unsigned budget_b) {
    if (budget_a > 0)
      if (const auto* mu = std::get_if<CMu>(&a->node)) {
        CompPtr unfolded = norm.nc(subst(mu->body, vthunk(a), 0));
        if (comp_nf(unfolded, b, type, budget_a - 1, budget_b)) return true;
      }
    if (budget_b > 0)
      if (const auto* mu = std::get_if<CMu>(&b->node)) {
        CompPtr unfolded = norm.nc(subst(mu->body, vthunk(b), 0));
        if (comp_nf(a, unfolded, type, budget_a, budget_b - 1)) return true;
      }
    return false;
  }

  bool value_nf(const ValuePtr& a, const ValuePtr& b, const VTypePtr& type,
                unsigned budget_a, unsigned budget_b) {
    if (eq_modulo_motives(a, b)) return true;
    if (const auto* u = std::get_if<TU>(&type->node)) {
      CompPtr fa = norm.nc(cforce(a));
      CompPtr fb = norm.nc(cforce(b));
      return comp_nf(fa, fb, norm.nt(u->body), budget_a, budget_b);
    }
    if (std::holds_alternative<TOne>(type->node)) return true;
    if (const auto* id = std::get_if<TId>(&type->node)) {
      if (norm.opts.eta_id) return true;
      if (const auto* ra = std::get_if<VRefl>(&a->node))
        if (const auto* rb = std::get_if<VRefl>(&b->node))
          return value_nf(ra->subject, rb->subject, norm.nvt(id->carrier),
                          budget_a, budget_b);
      return false;
    }
    if (const auto* sum = std::get_if<TSumN>(&type->node)) {
      const auto* ia = std::get_if<VInj>(&a->node);
      const auto* ib = std::get_if<VInj>(&b->node);
      if (ia && ib) {
        if (ia->tag != ib->tag || ia->arity != ib->arity) return false;
        if (ia->tag >= 1 && ia->tag <= sum->items.size())
          return value_nf(ia->payload, ib->payload,
                          norm.nvt(sum->items[ia->tag - 1]), budget_a,
                          budget_b);
        return eq_modulo_motives(ia->payload, ib->payload);
      }
      return false;
    }
    if (const auto* sg = std::get_if<TSigma>(&type->node)) {
      const auto* pa = std::get_if<VPair>(&a->node);
      const auto* pb = std::get_if<VPair>(&b->node);
      if (pa && pb)
        return value_nf(pa->fst, pb->fst, norm.nvt(sg->base), budget_a,
                        budget_b) &&
               value_nf(pa->snd, pb->snd, norm.nvt(subst(sg->fiber, pa->fst, 0)),
                        budget_a, budget_b);
      return false;
    }
    return false;
  }

  bool vtype(const VTypePtr& a0, const VTypePtr& b0, unsigned budget) {
    VTypePtr a = norm.nvt(a0), b = norm.nvt(b0);
    return vtype_nf(a, b, budget);
  }

  bool vtype_nf(const VTypePtr& a, const VTypePtr& b, unsigned budget) {
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        overloaded{
            [&](const TU& x) {
              return ctype_nf(x.body, std::get<TU>(b->node).body, budget);
            },
            [&](const TSumN& x) {
              const auto& y = std::get<TSumN>(b->node);
              if (x.items.size() != y.items.size()) return false;
              for (std::size_t i = 0; i < x.items.size(); ++i)
                if (!vtype_nf(x.items[i], y.items[i], budget)) return false;
              return true;
            },
            [&](const TOne&) { return true; },
            [&](const TSigma& x) {
              const auto& y = std::get<TSigma>(b->node);
              return vtype_nf(x.base, y.base, budget) &&
                     vtype_nf(x.fiber, y.fiber, budget);
            },
            [&](const TId& x) {
              const auto& y = std::get<TId>(b->node);
              return vtype_nf(x.carrier, y.carrier, budget) &&
                     value_nf(x.lhs, y.lhs, x.carrier, budget, budget) &&
                     value_nf(x.rhs, y.rhs, x.carrier, budget, budget);
            },
        },
        a->node);
  }

  bool ctype(const CTypePtr& a0, const CTypePtr& b0, unsigned budget) {
    CTypePtr a = norm.nt(a0), b = norm.nt(b0);
    return ctype_nf(a, b, budget);
  }

  bool ctype_nf(const CTypePtr& a, const CTypePtr& b, unsigned budget) {
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        overloaded{
            [&](const TF& x) {
              return vtype_nf(x.value, std::get<TF>(b->node).value, budget);
            },
            [&](const TPiN& x) {
              const auto& y = std::get<TPiN>(b->node);
              if (x.items.size() != y.items.size()) return false;
              for (std::size_t i = 0; i < x.items.size(); ++i)
                if (!ctype_nf(x.items[i], y.items[i], budget)) return false;
              return true;
            },
            [&](const TPi& x) {
              const auto& y = std::get<TPi>(b->node);
              return vtype_nf(x.base, y.base, budget) &&
                     ctype_nf(x.body, y.body, budget);
            },
        },
        a->node);
  }
};

}  // namespace

NormalForm<ValuePtr> normalize(const ValuePtr& t, const NormalizeOptions& opts) {
  Normalizer n{opts};
  ValuePtr r = n.nv(t);
  return {r, n.steps};
}
NormalForm<CompPtr> normalize(const CompPtr& t, const NormalizeOptions& opts) {
  Normalizer n{opts};
  CompPtr r = n.nc(t);
  return {r, n.steps};
}
NormalForm<VTypePtr> normalize(const VTypePtr& t, const NormalizeOptions& opts) {
  Normalizer n{opts};
  VTypePtr r = n.nvt(t);
  return {r, n.steps};
}
NormalForm<CTypePtr> normalize(const CTypePtr& t, const NormalizeOptions& opts) {
  Normalizer n{opts};
  CTypePtr r = n.nt(t);
  return {r, n.steps};
}

bool conv_value(const ValuePtr& a, const ValuePtr& b, const VTypePtr& type,
                const NormalizeOptions& opts) {
  Conv c{Normalizer{opts}};
  ValuePtr na = c.norm.nv(a), nb = c.norm.nv(b);
  return c.value_nf(na, nb, c.norm.nvt(type), opts.mu_unfold, opts.mu_unfold);
}
bool conv_comp(const CompPtr& a, const CompPtr& b, const CTypePtr& type,
               const NormalizeOptions& opts) {
  Conv c{Normalizer{opts}};
  return c.comp(a, b, type, opts.mu_unfold, opts.mu_unfold);
}
bool conv_vtype(const VTypePtr& a, const VTypePtr& b,
                const NormalizeOptions& opts) {
  Conv c{Normalizer{opts}};
  return c.vtype(a, b, opts.mu_unfold);
}
bool conv_ctype(const CTypePtr& a, const CTypePtr& b,
                const NormalizeOptions& opts) {
  Conv c{Normalizer{opts}};
  return c.ctype(a, b, opts.mu_unfold);
}

}  // namespace dcbpv
