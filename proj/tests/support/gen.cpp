#include "support/gen.hpp"

#include <stdexcept>

namespace dcbpv::testgen {

EffectSignature signature_for(const std::string& profile) {
  EffectSignature sig;
  auto enable_error = [&] {
    sig.error = true;
    sig.errors = {"crash", "oops"};
  };
  auto enable_print = [&] {
    sig.print = true;
    sig.alphabet = {"a", "b"};
  };
  auto enable_state = [&] {
    sig.state = true;
    sig.states = {"s0", "s1"};
    sig.initial_state = "s0";
  };
  if (profile == "pure") {
  } else if (profile == "error") {
    enable_error();
  } else if (profile == "divrec") {
    sig.diverge = true;
    sig.rec = true;
  } else if (profile == "print") {
    enable_print();
  } else if (profile == "state") {
    enable_state();
  } else if (profile == "choose") {
    sig.choose = true;
  } else if (profile == "all") {
    sig.diverge = true;
    sig.rec = true;
    sig.choose = true;
    enable_error();
    enable_print();
    enable_state();
  } else {
    throw std::invalid_argument("unknown profile " + profile);
  }
  return sig;
}

const std::vector<std::string>& all_profiles() {
  static const std::vector<std::string> ps = {
      "pure", "error", "divrec", "print", "state", "choose", "all"};
  return ps;
}

std::size_t Gen::pick(std::size_t n) {
  std::uniform_int_distribution<std::size_t> d(0, n - 1);
  return d(rng_);
}
bool Gen::flip(double p) {
  std::uniform_real_distribution<double> d(0.0, 1.0);
  return d(rng_) < p;
}

VTypePtr Gen::gen_vtype(const std::vector<VTypePtr>& ctx, std::size_t depth) {
  if (depth == 0) return t_one();
  switch (pick(6)) {
    case 0:
      return t_one();
    case 1:
      return t_u(gen_ctype(ctx, depth - 1));
    case 2: {
      std::vector<VTypePtr> items;
      std::size_t n = 1 + pick(2);
      for (std::size_t i = 0; i < n; ++i)
        items.push_back(gen_vtype(ctx, depth - 1));
      return t_sum(std::move(items));
    }
    case 3: {
      VTypePtr base = gen_vtype(ctx, depth - 1);
      std::vector<VTypePtr> ctx2 = ctx;
      ctx2.push_back(base);
      return t_sigma(base, gen_vtype(ctx2, depth - 1));
    }
    case 4: {
      // A reflexive identity type over a generated inhabitant.
      VTypePtr carrier = gen_vtype(ctx, depth > 1 ? depth - 2 : 0);
      ValuePtr v = gen_value(ctx, carrier, depth > 1 ? depth - 2 : 0);
      return t_id(carrier, v, v);
    }
    default:
      return t_one();
  }
}

CTypePtr Gen::gen_ctype(const std::vector<VTypePtr>& ctx, std::size_t depth) {
  if (depth == 0) return t_f(t_one());
  switch (pick(4)) {
    case 0:
      return t_f(gen_vtype(ctx, depth - 1));
    case 1: {
      std::vector<CTypePtr> items;
      std::size_t n = 1 + pick(2);
      for (std::size_t i = 0; i < n; ++i)
        items.push_back(gen_ctype(ctx, depth - 1));
      return t_pin(std::move(items));
    }
    case 2: {
      VTypePtr base = gen_vtype(ctx, depth - 1);
      std::vector<VTypePtr> ctx2 = ctx;
      ctx2.push_back(base);
      return t_pi(base, gen_ctype(ctx2, depth - 1));
    }
    default:
      return t_f(gen_vtype(ctx, depth - 1));
  }
}

VTypePtr Gen::gen_vtype_inf(const std::vector<VTypePtr>& ctx,
                            std::size_t depth) {
  if (depth == 0) return t_one();
  switch (pick(5)) {
    case 0:
      return t_one();
    case 1:
      // Thunks infer only when their computation does; keep returners.
      return t_u(t_f(gen_vtype_inf(ctx, depth - 1)));
    case 2: {
      // Homogeneous sums: a bare injection infers componentwise-equal sums.
      VTypePtr item = gen_vtype_inf(ctx, depth - 1);
      std::size_t n = 1 + pick(2);
      return t_sum(std::vector<VTypePtr>(n, item));
    }
    case 3: {
      // Pairs infer non-dependent Sigmas.
      VTypePtr base = gen_vtype_inf(ctx, depth - 1);
      return t_sigma(base, shift(gen_vtype_inf(ctx, depth - 1), 1, 0));
    }
    default: {
      VTypePtr carrier = gen_vtype_inf(ctx, depth > 1 ? depth - 2 : 0);
      ValuePtr v = gen_value_inf(ctx, carrier, depth > 1 ? depth - 2 : 0);
      return t_id(carrier, v, v);
    }
  }
}

ValuePtr Gen::gen_value_inf(const std::vector<VTypePtr>& ctx,
                            const VTypePtr& type, std::size_t depth) {
  if (flip(0.3)) {
    if (ValuePtr v = try_var(ctx, type)) return v;
  }
  return std::visit(
      overloaded{
          [&](const TOne&) { return vunit(); },
          [&](const TU& n) {
            return vthunk(
                gen_comp_inf(ctx, n.body, depth > 0 ? depth - 1 : 0));
          },
          [&](const TSumN& n) -> ValuePtr {
            if (n.items.empty())
              throw std::logic_error("cannot inhabit an empty sum");
            // Every component must equal the payload's for the injection to
            // infer this sum; pick any tag, the items are homogeneous here.
            std::size_t tag = 1 + pick(n.items.size());
            return vinj(tag, n.items.size(),
                        gen_value_inf(ctx, n.items[tag - 1],
                                      depth > 0 ? depth - 1 : 0));
          },
          [&](const TSigma& n) {
            ValuePtr fst =
                gen_value_inf(ctx, n.base, depth > 0 ? depth - 1 : 0);
            ValuePtr snd = gen_value_inf(ctx, subst(n.fiber, fst, 0),
                                         depth > 0 ? depth - 1 : 0);
            return vpair(fst, snd);
          },
          [&](const TId& n) -> ValuePtr {
            if (!structural_eq(n.lhs, n.rhs))
              throw std::logic_error(
                  "generator only inhabits reflexive identity types");
            return vrefl(n.lhs);
          },
      },
      type->node);
}

CompPtr Gen::gen_comp_inf(const std::vector<VTypePtr>& ctx,
                          const CTypePtr& type, std::size_t depth) {
  // Pi and product types only arise here under thunks; the inferable
  // residents of those are eliminations, which need suitable variables, so
  // fall back to a forced thunk of a checked intro only when typed at F.
  const auto* f = std::get_if<TF>(&type->node);
  if (!f) {
    // tuple of inferable components for products; otherwise give up on
    // elimination-position generation and return an intro (callers at
    // non-F types only occur under thunks where inference recurses).
    if (const auto* pin = std::get_if<TPiN>(&type->node)) {
      std::vector<CompPtr> items;
      for (const auto& i : pin->items)
        items.push_back(gen_comp_inf(ctx, i, depth > 0 ? depth - 1 : 0));
      return ctuple(std::move(items));
    }
    // No inferable lambda exists without a variable of matching type; the
    // caller avoids asking for Pi.
    throw std::logic_error("inferable generation does not cover Pi types");
  }
  if (depth == 0) return creturn(gen_value_inf(ctx, f->value, 0));
  std::size_t effect_cases = 0;
  if (sig_.print) ++effect_cases;
  if (sig_.state) effect_cases += 2;
  if (sig_.choose) ++effect_cases;
  switch (pick(5 + effect_cases)) {
    case 0:
    case 1:
      return creturn(gen_value_inf(ctx, f->value, depth - 1));
    case 2: {
      VTypePtr a = gen_vtype_inf(ctx, depth >= 2 ? depth - 2 : 0);
      CompPtr head = gen_comp_inf(ctx, t_f(a), depth - 1);
      std::vector<VTypePtr> ctx2 = ctx;
      ctx2.push_back(a);
      return cto_in(head, gen_comp_inf(ctx2, shift(type, 1, 0), depth - 1));
    }
    case 3:
      return cforce(vthunk(gen_comp_inf(ctx, type, depth - 1)));
    case 4: {
      // pattern match over a homogeneous sum
      std::size_t arity = 1 + pick(2);
      VTypePtr item = gen_vtype_inf(ctx, depth >= 3 ? depth - 3 : 0);
      VTypePtr sum = t_sum(std::vector<VTypePtr>(arity, item));
      ValuePtr scrut = gen_value_inf(ctx, sum, depth - 1);
      std::vector<CompPtr> branches;
      for (std::size_t i = 0; i < arity; ++i) {
        std::vector<VTypePtr> ctx2 = ctx;
        ctx2.push_back(item);
        branches.push_back(gen_comp_inf(ctx2, shift(type, 1, 0), depth - 1));
      }
      return cpm_sum(scrut, std::move(branches));
    }
    default:
      break;
  }
  std::vector<int> enabled;
  if (sig_.print) enabled.push_back(0);
  if (sig_.state) {
    enabled.push_back(1);
    enabled.push_back(2);
  }
  if (sig_.choose) enabled.push_back(3);
  if (enabled.empty()) return creturn(gen_value_inf(ctx, f->value, depth - 1));
  switch (enabled[pick(enabled.size())]) {
    case 0:
      return cprint(sig_.alphabet[pick(sig_.alphabet.size())],
                    gen_comp_inf(ctx, type, depth - 1));
    case 1:
      return cwrite(sig_.states[pick(sig_.states.size())],
                    gen_comp_inf(ctx, type, depth - 1));
    case 2: {
      std::vector<std::pair<std::string, CompPtr>> branches;
      for (const auto& s : sig_.states)
        branches.emplace_back(s, gen_comp_inf(ctx, type, depth - 1));
      return cread(std::move(branches));
    }
    default: {
      std::vector<CompPtr> alts;
      for (int i = 0; i < 2; ++i)
        alts.push_back(gen_comp_inf(ctx, type, depth - 1));
      return cchoose(std::move(alts));
    }
  }
}

ValuePtr Gen::try_var(const std::vector<VTypePtr>& ctx, const VTypePtr& type) {
  std::vector<std::size_t> hits;
  for (std::size_t k = 0; k < ctx.size(); ++k) {
    std::size_t index = ctx.size() - 1 - k;
    VTypePtr entry = shift(ctx[k], static_cast<long long>(index) + 1, 0);
    if (structural_eq(entry, type)) hits.push_back(index);
  }
  if (hits.empty()) return nullptr;
  return vvar(hits[pick(hits.size())]);
}

ValuePtr Gen::gen_value(const std::vector<VTypePtr>& ctx, const VTypePtr& type,
                        std::size_t depth) {
  if (flip(0.3)) {
    if (ValuePtr v = try_var(ctx, type)) return v;
  }
  if (allow_complex_values && depth > 0 && flip(0.3)) {
    switch (pick(3)) {
      case 0: {
        // let x = W in body; the binding sits in inference position
        VTypePtr a = gen_vtype_inf(ctx, depth > 1 ? depth - 2 : 0);
        ValuePtr bound = gen_value_inf(ctx, a, depth - 1);
        std::vector<VTypePtr> ctx2 = ctx;
        ctx2.push_back(a);
        return vlet(bound, gen_value(ctx2, shift(type, 1, 0), depth - 1));
      }
      case 1: {
        // unit match
        ValuePtr scrut = gen_value_inf(ctx, t_one(), depth - 1);
        return vpm_unit(scrut, gen_value(ctx, type, depth - 1));
      }
      default: {
        // pair match
        VTypePtr a = gen_vtype_inf(ctx, depth > 1 ? depth - 2 : 0);
        VTypePtr b = gen_vtype_inf(ctx, depth > 1 ? depth - 2 : 0);
        VTypePtr sg = t_sigma(a, shift(b, 1, 0));
        ValuePtr scrut = gen_value_inf(ctx, sg, depth - 1);
        std::vector<VTypePtr> ctx2 = ctx;
        ctx2.push_back(a);
        ctx2.push_back(shift(b, 1, 0));
        return vpm_pair(scrut, gen_value(ctx2, shift(type, 2, 0), depth - 1));
      }
    }
  }
  return std::visit(
      overloaded{
          [&](const TOne&) { return vunit(); },
          [&](const TU& n) {
            return vthunk(gen_comp(ctx, n.body, depth > 0 ? depth - 1 : 0));
          },
          [&](const TSumN& n) -> ValuePtr {
            if (n.items.empty())
              throw std::logic_error("cannot inhabit an empty sum");
            std::size_t tag = 1 + pick(n.items.size());
            return vinj(tag, n.items.size(),
                        gen_value(ctx, n.items[tag - 1],
                                  depth > 0 ? depth - 1 : 0));
          },
          [&](const TSigma& n) {
            ValuePtr fst =
                gen_value(ctx, n.base, depth > 0 ? depth - 1 : 0);
            ValuePtr snd = gen_value(ctx, subst(n.fiber, fst, 0),
                                     depth > 0 ? depth - 1 : 0);
            return vpair(fst, snd);
          },
          [&](const TId& n) -> ValuePtr {
            if (!structural_eq(n.lhs, n.rhs))
              throw std::logic_error(
                  "generator only inhabits reflexive identity types");
            return vrefl(n.lhs);
          },
      },
      type->node);
}

CompPtr Gen::gen_comp(const std::vector<VTypePtr>& ctx, const CTypePtr& type,
                      std::size_t depth) {
  auto intro = [&]() -> CompPtr {
    return std::visit(
        overloaded{
            [&](const TF& n) {
              return creturn(
                  gen_value(ctx, n.value, depth > 0 ? depth - 1 : 0));
            },
            [&](const TPiN& n) {
              std::vector<CompPtr> items;
              for (const auto& i : n.items)
                items.push_back(gen_comp(ctx, i, depth > 0 ? depth - 1 : 0));
              return ctuple(std::move(items));
            },
            [&](const TPi& n) {
              std::vector<VTypePtr> ctx2 = ctx;
              ctx2.push_back(n.base);
              return clam(
                  gen_comp(ctx2, n.body, depth > 0 ? depth - 1 : 0));
            },
        },
        type->node);
  };
  if (depth == 0) return intro();

  std::size_t effect_cases = 0;
  if (sig_.error) ++effect_cases;
  if (sig_.diverge) ++effect_cases;
  if (sig_.rec) ++effect_cases;
  if (sig_.print) ++effect_cases;
  if (sig_.state) effect_cases += 2;
  if (sig_.choose) ++effect_cases;

  std::size_t n_cases = 10 + effect_cases;
  switch (pick(n_cases)) {
    case 0:
    case 1:
      return intro();
    case 2: {
      // sequencing; the head sits in inference position
      VTypePtr a = gen_vtype_inf(ctx, depth >= 2 ? depth - 2 : 0);
      CompPtr head = gen_comp_inf(ctx, t_f(a), depth - 1);
      std::vector<VTypePtr> ctx2 = ctx;
      ctx2.push_back(a);
      CompPtr body = gen_comp(ctx2, shift(type, 1, 0), depth - 1);
      return cto_in(head, body);
    }
    case 3: {
      // force of a thunk
      return cforce(vthunk(gen_comp(ctx, type, depth - 1)));
    }
    case 4: {
      // let; the bound value sits in inference position
      VTypePtr a = gen_vtype_inf(ctx, depth >= 2 ? depth - 2 : 0);
      ValuePtr bound = gen_value_inf(ctx, a, depth - 1);
      std::vector<VTypePtr> ctx2 = ctx;
      ctx2.push_back(a);
      return clet(bound, gen_comp(ctx2, shift(type, 1, 0), depth - 1));
    }
    case 5: {
      // application at a non-dependent function; the argument must infer
      VTypePtr a = gen_vtype_inf(ctx, depth >= 2 ? depth - 2 : 0);
      CompPtr fn = gen_comp(ctx, t_pi(a, shift(type, 1, 0)), depth - 1);
      ValuePtr arg = gen_value_inf(ctx, a, depth - 1);
      return capp(arg, fn);
    }
    case 6: {
      // projection out of a literal tuple; the sibling must infer
      CompPtr sibling = gen_comp_inf(
          ctx, t_f(gen_vtype_inf(ctx, depth >= 3 ? depth - 3 : 0)),
          depth >= 2 ? depth - 2 : 0);
      CompPtr mine = gen_comp(ctx, type, depth - 1);
      bool first = flip(0.5);
      std::vector<CompPtr> items = first
                                       ? std::vector<CompPtr>{mine, sibling}
                                       : std::vector<CompPtr>{sibling, mine};
      return cproj(first ? 1 : 2, ctuple(std::move(items)));
    }
    case 7: {
      // pattern match on a homogeneous sum
      std::size_t arity = 1 + pick(2);
      VTypePtr item = gen_vtype_inf(ctx, depth >= 3 ? depth - 3 : 0);
      VTypePtr sum = t_sum(std::vector<VTypePtr>(arity, item));
      ValuePtr scrut = gen_value_inf(ctx, sum, depth - 1);
      std::vector<CompPtr> branches;
      for (std::size_t i = 0; i < arity; ++i) {
        std::vector<VTypePtr> ctx2 = ctx;
        ctx2.push_back(item);
        branches.push_back(gen_comp(ctx2, shift(type, 1, 0), depth - 1));
      }
      return cpm_sum(scrut, std::move(branches));
    }
    case 8: {
      // pattern match on a pair
      VTypePtr a = gen_vtype_inf(ctx, depth >= 3 ? depth - 3 : 0);
      VTypePtr b = gen_vtype_inf(ctx, depth >= 3 ? depth - 3 : 0);
      VTypePtr sg = t_sigma(a, shift(b, 1, 0));
      ValuePtr scrut = gen_value_inf(ctx, sg, depth - 1);
      std::vector<VTypePtr> ctx2 = ctx;
      ctx2.push_back(a);
      ctx2.push_back(shift(b, 1, 0));
      return cpm_pair(scrut, gen_comp(ctx2, shift(type, 2, 0), depth - 1));
    }
    case 9: {
      // pattern match on an identity witness or the unit
      if (flip(0.5)) {
        ValuePtr scrut = gen_value_inf(ctx, t_one(), depth - 1);
        return cpm_unit(scrut, gen_comp(ctx, type, depth - 1));
      }
      VTypePtr carrier = gen_vtype_inf(ctx, depth >= 3 ? depth - 3 : 0);
      ValuePtr subject = gen_value_inf(ctx, carrier, depth - 1);
      std::vector<VTypePtr> ctx2 = ctx;
      ctx2.push_back(carrier);
      return cpm_id(vrefl(subject),
                    gen_comp(ctx2, shift(type, 1, 0), depth - 1));
    }
    default:
      break;
  }

  // Effects, selected uniformly among the enabled ones.
  std::vector<int> enabled;
  if (sig_.error) enabled.push_back(0);
  if (sig_.diverge) enabled.push_back(1);
  if (sig_.rec) enabled.push_back(2);
  if (sig_.print) enabled.push_back(3);
  if (sig_.state) {
    enabled.push_back(4);
    enabled.push_back(5);
  }
  if (sig_.choose) enabled.push_back(6);
  if (enabled.empty()) return intro();
  switch (enabled[pick(enabled.size())]) {
    case 0:
      return cerror(sig_.errors[pick(sig_.errors.size())]);
    case 1:
      return cdiverge();
    case 2: {
      std::vector<VTypePtr> ctx2 = ctx;
      ctx2.push_back(t_u(type));
      // Keep recursion structurally terminating sometimes by not using the
      // hook; the runner bounds fuel either way.
      return cmu(gen_comp(ctx2, shift(type, 1, 0), depth - 1));
    }
    case 3:
      return cprint(sig_.alphabet[pick(sig_.alphabet.size())],
                    gen_comp(ctx, type, depth - 1));
    case 4:
      return cwrite(sig_.states[pick(sig_.states.size())],
                    gen_comp(ctx, type, depth - 1));
    case 5: {
      std::vector<std::pair<std::string, CompPtr>> branches;
      for (const auto& s : sig_.states)
        branches.emplace_back(s, gen_comp(ctx, type, depth - 1));
      return cread(std::move(branches));
    }
    default: {
      std::vector<CompPtr> alts;
      std::size_t n = 2;
      for (std::size_t i = 0; i < n; ++i)
        alts.push_back(gen_comp(ctx, type, depth - 1));
      return cchoose(std::move(alts));
    }
  }
}

std::pair<CompPtr, CTypePtr> Gen::gen_program(std::size_t depth) {
  std::vector<VTypePtr> ctx;
  CTypePtr type = gen_ctype(ctx, depth >= 4 ? 3 : depth / 2 + 1);
  CompPtr m = gen_comp(ctx, type, depth);
  if (dependent_motives && flip(0.5)) {
    // Wrap in the dependent sequencing template so plus-mode subject
    // reduction actually exercises the Kleisli rule.
    VTypePtr a = gen_vtype_inf(ctx, 1);
    CompPtr head = gen_comp_inf(ctx, t_f(a), depth > 2 ? depth - 2 : 1);
    CTypePtr motive = t_f(t_id(t_u(t_f(shift(a, 1, 0))), vvar(0), vvar(0)));
    CompPtr body = creturn(vrefl(tr(vvar(0))));
    CompPtr wrapped = cto_in(head, body, motive);
    CTypePtr wrapped_ty =
        t_f(t_id(t_u(t_f(a)), vthunk(head), vthunk(head)));
    return {wrapped, wrapped_ty};
  }
  return {m, type};
}

}  // namespace dcbpv::testgen
