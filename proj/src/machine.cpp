#include "dcbpv/machine.hpp"

#include <random>

namespace dcbpv {

const char* to_string(TerminalReason r) {
  switch (r) {
    case TerminalReason::ReturnAtNil: return "return";
    case TerminalReason::LambdaAtNil: return "lambda";
    case TerminalReason::TupleAtNil: return "tuple";
    case TerminalReason::ErrorHalt: return "error";
    case TerminalReason::StuckOpenTerm: return "stuck";
  }
  return "unknown";
}

Configuration Machine::initial(const CompPtr& m) const {
  if (!is_complex_value_free(m)) throw ComplexValuePresentError();
  if (!well_scoped(m, 0)) throw OpenTermError();
  return Configuration{m, snil(), {}, sig_.state ? sig_.initial_state : ""};
}

namespace {

Configuration with_comp(const Configuration& c, CompPtr m) {
  return Configuration{std::move(m), c.stack, c.output, c.store};
}
Configuration with_comp_stack(const Configuration& c, CompPtr m, StackPtr k) {
  return Configuration{std::move(m), std::move(k), c.output, c.store};
}

}  // namespace

StepOutcome Machine::step(const Configuration& c) const {
  const CompPtr& m = c.comp;
  std::vector<Configuration> one;

  if (const auto* let = std::get_if<CLet>(&m->node)) {
    one.push_back(with_comp(c, subst(let->body, let->bound, 0)));
    return one;
  }
  if (const auto* to = std::get_if<CToIn>(&m->node)) {
    one.push_back(with_comp_stack(c, to->head, sto_frame(to->body, c.stack)));
    return one;
  }
  if (const auto* ret = std::get_if<CReturn>(&m->node)) {
    if (const auto* fr = std::get_if<SToFrame>(&c.stack->node)) {
      one.push_back(
          with_comp_stack(c, subst(fr->body, ret->value, 0), fr->rest));
      return one;
    }
    return Terminal{TerminalReason::ReturnAtNil};
  }
  if (const auto* f = std::get_if<CForce>(&m->node)) {
    if (const auto* th = std::get_if<VThunk>(&f->value->node)) {
      one.push_back(with_comp(c, th->body));
      return one;
    }
    return Terminal{TerminalReason::StuckOpenTerm};
  }
  if (const auto* pm = std::get_if<CPmSum>(&m->node)) {
    if (const auto* inj = std::get_if<VInj>(&pm->scrutinee->node)) {
      if (inj->tag >= 1 && inj->tag <= pm->branches.size()) {
        one.push_back(
            with_comp(c, subst(pm->branches[inj->tag - 1], inj->payload, 0)));
        return one;
      }
    }
    return Terminal{TerminalReason::StuckOpenTerm};
  }
  if (const auto* pm = std::get_if<CPmUnit>(&m->node)) {
    if (std::holds_alternative<VUnit>(pm->scrutinee->node)) {
      one.push_back(with_comp(c, pm->body));
      return one;
    }
    return Terminal{TerminalReason::StuckOpenTerm};
  }
  if (const auto* pm = std::get_if<CPmPair>(&m->node)) {
    if (const auto* pr = std::get_if<VPair>(&pm->scrutinee->node)) {
      one.push_back(with_comp(c, subst2(pm->body, pr->fst, pr->snd)));
      return one;
    }
    return Terminal{TerminalReason::StuckOpenTerm};
  }
  if (const auto* pm = std::get_if<CPmId>(&m->node)) {
    if (const auto* r = std::get_if<VRefl>(&pm->scrutinee->node)) {
      one.push_back(with_comp(c, subst(pm->body, r->subject, 0)));
      return one;
    }
    return Terminal{TerminalReason::StuckOpenTerm};
  }
  if (const auto* proj = std::get_if<CProj>(&m->node)) {
    one.push_back(
        with_comp_stack(c, proj->target, sproj_frame(proj->tag, c.stack)));
    return one;
  }
  if (const auto* tup = std::get_if<CTuple>(&m->node)) {
    if (const auto* fr = std::get_if<SProjFrame>(&c.stack->node)) {
      if (fr->tag >= 1 && fr->tag <= tup->items.size()) {
        one.push_back(with_comp_stack(c, tup->items[fr->tag - 1], fr->rest));
        return one;
      }
      return Terminal{TerminalReason::StuckOpenTerm};
    }
    return Terminal{TerminalReason::TupleAtNil};
  }
  if (const auto* app = std::get_if<CApp>(&m->node)) {
    one.push_back(
        with_comp_stack(c, app->fn, sarg_frame(app->arg, c.stack)));
    return one;
  }
  if (const auto* lam = std::get_if<CLam>(&m->node)) {
    if (const auto* fr = std::get_if<SArgFrame>(&c.stack->node)) {
      one.push_back(
          with_comp_stack(c, subst(lam->body, fr->arg, 0), fr->rest));
      return one;
    }
    return Terminal{TerminalReason::LambdaAtNil};
  }
  if (std::holds_alternative<CDiverge>(m->node)) {
    one.push_back(c);
    return one;
  }
  if (std::holds_alternative<CError>(m->node))
    return Terminal{TerminalReason::ErrorHalt};
  if (const auto* mu = std::get_if<CMu>(&m->node)) {
    one.push_back(with_comp(c, subst(mu->body, vthunk(m), 0)));
    return one;
  }
  if (const auto* p = std::get_if<CPrint>(&m->node)) {
    Configuration next = with_comp(c, p->rest);
    next.output.push_back(p->letter);
    one.push_back(std::move(next));
    return one;
  }
  if (const auto* ch = std::get_if<CChoose>(&m->node)) {
    std::vector<Configuration> succ;
    succ.reserve(ch->alternatives.size());
    for (const auto& alt : ch->alternatives)
      succ.push_back(with_comp(c, alt));
    return succ;
  }
  if (const auto* w = std::get_if<CWrite>(&m->node)) {
    Configuration next = with_comp(c, w->rest);
    next.store = w->state;
    one.push_back(std::move(next));
    return one;
  }
  if (const auto* r = std::get_if<CRead>(&m->node)) {
    for (const auto& [s, branch] : r->branches) {
      if (s == c.store) {
        one.push_back(with_comp(c, branch));
        return one;
      }
    }
    return Terminal{TerminalReason::StuckOpenTerm};
  }
  return Terminal{TerminalReason::StuckOpenTerm};
}

bool Machine::is_terminal(const Configuration& c) const {
  const CompPtr& m = c.comp;
  if (std::holds_alternative<CReturn>(m->node))
    return !std::holds_alternative<SToFrame>(c.stack->node);
  if (std::holds_alternative<CLam>(m->node))
    return !std::holds_alternative<SArgFrame>(c.stack->node);
  if (const auto* tup = std::get_if<CTuple>(&m->node)) {
    if (const auto* fr = std::get_if<SProjFrame>(&c.stack->node))
      return fr->tag < 1 || fr->tag > tup->items.size();
    return true;
  }
  if (std::holds_alternative<CError>(m->node)) return true;
  if (const auto* f = std::get_if<CForce>(&m->node))
    return !std::holds_alternative<VThunk>(f->value->node);
  if (const auto* pm = std::get_if<CPmSum>(&m->node)) {
    const auto* inj = std::get_if<VInj>(&pm->scrutinee->node);
    return !inj || inj->tag < 1 || inj->tag > pm->branches.size();
  }
  if (const auto* pm = std::get_if<CPmUnit>(&m->node))
    return !std::holds_alternative<VUnit>(pm->scrutinee->node);
  if (const auto* pm = std::get_if<CPmPair>(&m->node))
    return !std::holds_alternative<VPair>(pm->scrutinee->node);
  if (const auto* pm = std::get_if<CPmId>(&m->node))
    return !std::holds_alternative<VRefl>(pm->scrutinee->node);
  if (const auto* r = std::get_if<CRead>(&m->node)) {
    for (const auto& [s, _] : r->branches)
      if (s == c.store) return false;
    return true;
  }
  return false;
}

Machine::RunResult Machine::run(Configuration c, unsigned long long fuel,
                                std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  unsigned long long steps = 0;
  while (true) {
    StepOutcome out = step(c);
    if (std::holds_alternative<Terminal>(out)) return {c, steps, false};
    auto& succ = std::get<std::vector<Configuration>>(out);
    if (steps >= fuel) return {c, steps, true};
    ++steps;
    if (succ.size() == 1) {
      c = std::move(succ.front());
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, succ.size() - 1);
      c = std::move(succ[pick(rng)]);
    }
  }
}

std::vector<Machine::Leaf> Machine::run_all(const Configuration& c,
                                            unsigned long long fuel) const {
  std::vector<Leaf> leaves;
  // Explicit stack of (configuration, steps so far on this path).
  std::vector<std::pair<Configuration, unsigned long long>> todo;
  todo.emplace_back(c, 0);
  while (!todo.empty()) {
    auto [cur, steps] = std::move(todo.back());
    todo.pop_back();
    while (true) {
      StepOutcome out = step(cur);
      if (std::holds_alternative<Terminal>(out)) {
        leaves.push_back({std::move(cur), steps, false});
        break;
      }
      auto& succ = std::get<std::vector<Configuration>>(out);
      if (steps >= fuel) {
        leaves.push_back({std::move(cur), steps, true});
        break;
      }
      ++steps;
      if (succ.size() == 1) {
        cur = std::move(succ.front());
        continue;
      }
      // Push in reverse so branch 0 is explored first.
      for (std::size_t i = succ.size(); i-- > 1;)
        todo.emplace_back(std::move(succ[i]), steps);
      cur = std::move(succ[0]);
    }
  }
  return leaves;
}

}  // namespace dcbpv
