// Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dcbpv/machine.hpp"
#include "dcbpv/normalize.hpp"
#include "dcbpv/parser.hpp"
#include "dcbpv/pretty.hpp"
#include "dcbpv/translate.hpp"
#include "dcbpv/typecheck.hpp"
#include "support/gen.hpp"
#include "support/named_oracle.hpp"

using namespace dcbpv;

namespace {

void report(const std::string& name, bool ok, const std::string& details) {
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << name
            << (details.empty() ? "" : ": " + details) << std::endl;
  EXPECT_TRUE(ok) << name << " " << details;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Criterion 1: transition-table conformance, one golden check per row.

TEST(Acceptance, TransitionTableConformance) {
  EffectSignature sig = testgen::signature_for("all");
  Machine m(sig);
  int rows = 0;
  bool ok = true;
  auto expect_step = [&](const Configuration& c, const Configuration& want) {
    ++rows;
    StepOutcome out = m.step(c);
    const auto* succ = std::get_if<std::vector<Configuration>>(&out);
    bool row_ok = succ && succ->size() == 1 &&
                  structural_eq(succ->front().comp, want.comp) &&
                  structural_eq(succ->front().stack, want.stack) &&
                  succ->front().output == want.output &&
                  succ->front().store == want.store;
    if (!row_ok) {
      ok = false;
      ADD_FAILURE() << "transition row " << rows << " mismatched";
    }
  };
  auto conf = [](CompPtr comp, StackPtr k = snil(),
                 std::vector<std::string> out = {},
                 std::string st = std::string("s0")) {
    return Configuration{std::move(comp), std::move(k), std::move(out),
                         std::move(st)};
  };

  CompPtr ret = creturn(vunit());
  CompPtr body = creturn(vvar(0));
  // let
  expect_step(conf(clet(vunit(), body)), conf(ret));
  // to-in push
  expect_step(conf(cto_in(ret, body)), conf(ret, sto_frame(body, snil())));
  // return pop
  expect_step(conf(ret, sto_frame(body, snil())), conf(ret));
  // force thunk
  expect_step(conf(cforce(vthunk(ret))), conf(ret));
  // pm sum
  expect_step(conf(cpm_sum(vinj(2, 2, vunit()),
                           {cerror("crash"), creturn(vvar(0))})),
              conf(ret));
  // pm unit
  expect_step(conf(cpm_unit(vunit(), ret)), conf(ret));
  // pm pair
  expect_step(conf(cpm_pair(vpair(vunit(), vunit()),
                            creturn(vpair(vvar(0), vvar(1))))),
              conf(creturn(vpair(vunit(), vunit()))));
  // pm refl (identity witnesses)
  expect_step(conf(cpm_id(vrefl(vunit()), body)), conf(ret));
  // proj push
  CompPtr tup = ctuple({ret, cdiverge()});
  expect_step(conf(cproj(2, tup)), conf(tup, sproj_frame(2, snil())));
  // tuple pop
  expect_step(conf(tup, sproj_frame(2, snil())), conf(cdiverge()));
  // app push
  CompPtr lam = clam(body);
  expect_step(conf(capp(vunit(), lam)),
              conf(lam, sarg_frame(vunit(), snil())));
  // lambda pop
  expect_step(conf(lam, sarg_frame(vunit(), snil())), conf(ret));
  // diverge self-loop
  expect_step(conf(cdiverge()), conf(cdiverge()));
  // mu unfold
  CompPtr mu = cmu(cforce(vvar(0)));
  expect_step(conf(mu), conf(cforce(vthunk(mu))));
  // print
  expect_step(conf(cprint("a", ret), snil(), {"b"}),
              conf(ret, snil(), {"b", "a"}));
  // write
  expect_step(conf(cwrite("s1", ret)), conf(ret, snil(), {}, "s1"));
  // read
  expect_step(conf(cread({{"s0", cerror("crash")}, {"s1", ret}}), snil(), {},
                   "s1"),
              conf(ret, snil(), {}, "s1"));
  // choose branches in order
  {
    ++rows;
    CompPtr m1 = creturn(vinj(1, 2, vunit()));
    CompPtr m2 = creturn(vinj(2, 2, vunit()));
    StepOutcome out = m.step(conf(cchoose({m1, m2})));
    const auto* succ = std::get_if<std::vector<Configuration>>(&out);
    bool row_ok = succ && succ->size() == 2 &&
                  structural_eq((*succ)[0].comp, m1) &&
                  structural_eq((*succ)[1].comp, m2);
    if (!row_ok) {
      ok = false;
      ADD_FAILURE() << "choose row mismatched";
    }
  }
  // error terminal
  {
    ++rows;
    StepOutcome out =
        m.step(conf(cerror("crash"), sto_frame(body, snil())));
    const auto* t = std::get_if<Terminal>(&out);
    bool row_ok = t && t->reason == TerminalReason::ErrorHalt;
    if (!row_ok) {
      ok = false;
      ADD_FAILURE() << "error terminal row mismatched";
    }
  }
  report("transition-table conformance", ok,
         std::to_string(rows) + " rows checked");
}

// ---------------------------------------------------------------------------
// Criteria 2-4: subject reduction, determinism, strong normalization.

struct SRStats {
  int programs = 0;
  unsigned long long steps_checked = 0;
  int violations = 0;
  std::vector<unsigned long long> terminal_steps;
  int exhausted = 0;
};

SRStats run_subject_reduction(const std::string& profile, Mode mode,
                              bool subtyping, int count, std::uint64_t seed,
                              unsigned long long step_cap) {
  EffectSignature sig = testgen::signature_for(profile);
  testgen::Gen gen(seed, sig);
  gen.dependent_motives = mode == Mode::Plus;
  Machine machine(sig);
  CheckOptions opts =
      mode == Mode::Plus ? CheckOptions::plus(subtyping) : CheckOptions::minus();
  Checker ch(sig, opts);
  Context empty;
  SRStats stats;
  for (int i = 0; i < count; ++i) {
    auto [prog, ty] = gen.gen_program(8);
    if (!is_complex_value_free(prog)) {
      prog = eliminate_complex_values(prog);
    }
    // The generated type is the configuration type of the initial state.
    try {
      ch.check_computation(empty, prog, ty);
    } catch (const TypeError& e) {
      ++stats.violations;
      ADD_FAILURE() << profile << ": generated program failed to check: "
                    << e.what() << "\n"
                    << pretty(prog) << " : " << pretty(ty);
      continue;
    }
    ++stats.programs;
    // Walk the whole (bounded) execution tree, checking every successor.
    std::vector<std::pair<Configuration, unsigned long long>> todo;
    todo.emplace_back(machine.initial(prog), 0);
    std::size_t explored = 0;
    while (!todo.empty() && explored < 200) {
      auto [c, depth] = todo.back();
      todo.pop_back();
      ++explored;
      StepOutcome out = machine.step(c);
      if (std::holds_alternative<Terminal>(out)) {
        stats.terminal_steps.push_back(depth);
        continue;
      }
      if (depth >= step_cap) {
        ++stats.exhausted;
        continue;
      }
      bool self_loop = false;
      for (const auto& succ : std::get<std::vector<Configuration>>(out)) {
        ++stats.steps_checked;
        try {
          ch.check_configuration(succ.comp, succ.stack, ty);
        } catch (const TypeError& e) {
          ++stats.violations;
          ADD_FAILURE() << profile << " subject reduction violated: "
                        << e.what() << "\nat " << pretty(succ.comp);
          continue;
        }
        if (structural_eq(succ.comp, c.comp) &&
            structural_eq(succ.stack, c.stack))
          self_loop = true;
        else
          todo.emplace_back(succ, depth + 1);
      }
      (void)self_loop;
    }
  }
  return stats;
}

TEST(Acceptance, SubjectReductionMinusAllProfiles) {
  bool ok = true;
  std::string details;
  for (const auto& profile : testgen::all_profiles()) {
    SRStats s = run_subject_reduction(profile, Mode::Minus, false, 500,
                                      1000 + profile.size(), 60);
    ok = ok && s.violations == 0 && s.programs >= 500;
    details += profile + "=" + std::to_string(s.steps_checked) + " steps ";
  }
  report("subject reduction (minus mode, all profiles)", ok, details);
}

TEST(Acceptance, SubjectReductionPlusWithSubtyping) {
  bool ok = true;
  std::string details;
  for (const std::string profile : {"print", "state", "choose"}) {
    SRStats s = run_subject_reduction(profile, Mode::Plus, true, 500,
                                      2000 + profile.size(), 60);
    ok = ok && s.violations == 0 && s.programs >= 500;
    details += profile + "=" + std::to_string(s.steps_checked) + " steps ";
  }
  report("subject reduction (plus mode with subtyping)", ok, details);
}

TEST(Acceptance, SubjectReductionMustFailWithoutSubtyping) {
  // A print step breaks typability at the original motive when the
  // subtyping rules are disabled.
  EffectSignature sig = testgen::signature_for("print");
  Machine machine(sig);
  CompPtr head = cprint("a", creturn(vunit()));
  CTypePtr motive = t_f(t_id(t_u(t_f(t_one())), vvar(0), vvar(0)));
  CompPtr prog = cto_in(head, creturn(vrefl(tr(vvar(0)))), motive);
  CTypePtr ty = t_f(t_id(t_u(t_f(t_one())), vthunk(head), vthunk(head)));

  Checker with_sub(sig, CheckOptions::plus(true));
  Checker without_sub(sig, CheckOptions::plus(false));
  Context empty;
  ASSERT_NO_THROW(with_sub.check_computation(empty, prog, ty));

  // step 1: push the frame; step 2: print.
  Configuration c = machine.initial(prog);
  c = std::get<std::vector<Configuration>>(machine.step(c)).front();
  c = std::get<std::vector<Configuration>>(machine.step(c)).front();
  bool preserved_with = true, preserved_without = true;
  try {
    with_sub.check_configuration(c.comp, c.stack, ty);
  } catch (const TypeError&) {
    preserved_with = false;
  }
  try {
    without_sub.check_configuration(c.comp, c.stack, ty);
  } catch (const TypeError&) {
    preserved_without = false;
  }
  bool ok = preserved_with && !preserved_without;
  report("subject reduction must-fail companion (subtyping off)", ok,
         "with=" + std::string(preserved_with ? "ok" : "broken") +
             " without=" + std::string(preserved_without ? "ok" : "broken"));
}

TEST(Acceptance, Determinism) {
  bool ok = true;
  unsigned long long steps = 0;
  for (const std::string profile :
       {"pure", "error", "divrec", "print", "state"}) {
    EffectSignature sig = testgen::signature_for(profile);
    testgen::Gen gen(99, sig);
    Machine machine(sig);
    for (int i = 0; i < 500; ++i) {
      auto [prog, ty] = gen.gen_program(8);
      if (!is_complex_value_free(prog)) prog = eliminate_complex_values(prog);
      Configuration c = machine.initial(prog);
      for (int s = 0; s < 60; ++s) {
        StepOutcome out = machine.step(c);
        if (std::holds_alternative<Terminal>(out)) break;
        auto& succ = std::get<std::vector<Configuration>>(out);
        ++steps;
        if (succ.size() != 1) {
          ok = false;
          ADD_FAILURE() << "branching step without choose in " << profile;
          break;
        }
        if (structural_eq(succ.front().comp, c.comp) &&
            structural_eq(succ.front().stack, c.stack))
          break;  // diverge self-loop
        c = std::move(succ.front());
      }
    }
  }
  report("determinism (choose disabled)", ok,
         std::to_string(steps) + " steps all singleton");
}

TEST(Acceptance, StrongNormalization) {
  bool ok = true;
  std::vector<unsigned long long> counts;
  for (const std::string profile :
       {"pure", "error", "print", "state", "choose"}) {
    EffectSignature sig = testgen::signature_for(profile);
    testgen::Gen gen(123, sig);
    Machine machine(sig);
    for (int i = 0; i < 500; ++i) {
      auto [prog, ty] = gen.gen_program(8);
      if (!is_complex_value_free(prog)) prog = eliminate_complex_values(prog);
      auto leaves = machine.run_all(machine.initial(prog), 1'000'000);
      for (const auto& leaf : leaves) {
        if (leaf.exhausted) {
          ok = false;
          ADD_FAILURE() << "non-terminating without diverge/rec in "
                        << profile << ": " << pretty(prog);
        }
        counts.push_back(leaf.steps);
      }
    }
  }
  std::sort(counts.begin(), counts.end());
  unsigned long long median =
      counts.empty() ? 0 : counts[counts.size() / 2];
  report("strong normalization (no diverge/rec)", ok,
         std::to_string(counts.size()) + " executions, median steps " +
             std::to_string(median));
}

// ---------------------------------------------------------------------------
// Criterion 5: translation type preservation and golden rows.

TEST(Acceptance, TranslationTypePreservation) {
  ResolvedProgram corpus = resolve(parse(read_file(
      std::string(DCBPV_TEST_DIR) + "/fixtures/surface_corpus.dcbpv")));
  Checker plus(corpus.signature, CheckOptions::plus());
  Checker minus(corpus.signature, CheckOptions::minus());
  Context empty;
  int cbv_ok = 0, cbn_ok = 0, total = 0;
  bool ok = true;
  for (const auto& def : corpus.defs) {
    if (def.kind != DefKind::Surface || !def.surface_ascription) continue;
    ++total;
    const auto& term = std::get<surface::TermPtr>(def.body);
    bool strong = def.name.rfind("strong_", 0) == 0;
    try {
      plus.check_computation(empty, cbv_translate_term(term),
                             t_f(cbv_translate_type(def.surface_ascription)));
      ++cbv_ok;
    } catch (const TypeError& e) {
      ok = false;
      ADD_FAILURE() << "cbv " << def.name << ": " << e.what();
    }
    try {
      CompPtr core = cbn_translate_term(term);
      CTypePtr ty = cbn_translate_type(def.surface_ascription);
      if (strong)
        plus.check_computation(empty, core, ty);
      else
        minus.check_computation(empty, core, ty);
      ++cbn_ok;
    } catch (const TypeError& e) {
      ok = false;
      ADD_FAILURE() << "cbn " << def.name << ": " << e.what();
    }
  }
  ok = ok && total >= 30 && cbv_ok == total && cbn_ok == total;
  report("translation type preservation", ok,
         std::to_string(total) + " programs, cbv=" + std::to_string(cbv_ok) +
             " cbn=" + std::to_string(cbn_ok));
}

// ---------------------------------------------------------------------------
// Criterion 6: the Id beta law by value, and the eta must-fail witness.

TEST(Acceptance, IdBetaLawCbv) {
  using namespace surface;
  auto sunit = [] { return mk_term(SUnit{}); };
  std::vector<TermPtr> ms = {
      sunit(),
      mk_term(SPair{sunit(), sunit()}),
      mk_term(SInj{1, 2, sunit()}),
      mk_term(SLet{sunit(), mk_term(SVar{0})}),
      mk_term(SApp{sunit(), mk_term(SLam{mk_term(SVar{0})})}),
      mk_term(SPmUnit{sunit(), sunit()}),
  };
  std::vector<TermPtr> ns = {
      mk_term(SInj{1, 2, sunit()}),
      mk_term(SInj{2, 2, sunit()}),
  };
  CTypePtr classifier = t_f(t_sum({t_one(), t_one()}));
  int count = 0;
  bool ok = true;
  for (const auto& m : ms)
    for (const auto& n : ns) {
      CompPtr lhs = cbv_translate_term(mk_term(SPmId{mk_term(SRefl{m}), n}));
      CompPtr rhs = cbv_translate_term(mk_term(SLet{m, n}));
      if (!conv_comp(lhs, rhs, classifier)) {
        ok = false;
        ADD_FAILURE() << pretty(lhs) << " /= " << pretty(rhs);
      }
      ++count;
    }
  bool eta_fails = !conv_value(vthunk(cdiverge()), tr(vunit()),
                               t_u(t_f(t_one())));
  ok = ok && count >= 10 && eta_fails;
  report("Id beta law (cbv) and eta must-fail", ok,
         std::to_string(count) + " beta instances, reflection refuted");
}

// ---------------------------------------------------------------------------
// Criterion 7: normalizer/machine agreement on error-only programs.

TEST(Acceptance, NormalizerMachineAgreement) {
  EffectSignature sig = testgen::signature_for("error");
  testgen::Gen gen(321, sig);
  Machine machine(sig);
  int done = 0;
  bool ok = true;
  for (int i = 0; done < 200 && i < 2000; ++i) {
    std::vector<VTypePtr> ctx;
    VTypePtr a = gen.gen_vtype(ctx, 2);
    CompPtr m = gen.gen_comp(ctx, t_f(a), 6);
    if (!is_complex_value_free(m)) continue;
    ++done;
    CompPtr nf = normalize(m).term;
    auto result = machine.run(machine.initial(m), 1'000'000, 0);
    if (result.exhausted) {
      ok = false;
      continue;
    }
    const CompPtr& got = result.config.comp;
    if (const auto* e = std::get_if<CError>(&nf->node)) {
      const auto* e2 = std::get_if<CError>(&got->node);
      if (!e2 || e->name != e2->name) {
        ok = false;
        ADD_FAILURE() << "error mismatch on " << pretty(m);
      }
    } else if (const auto* r1 = std::get_if<CReturn>(&nf->node)) {
      const auto* r2 = std::get_if<CReturn>(&got->node);
      if (!r2 || !structural_eq(r1->value, normalize(r2->value).term)) {
        ok = false;
        ADD_FAILURE() << "value mismatch on " << pretty(m);
      }
    } else {
      ok = false;
      ADD_FAILURE() << "unexpected normal form " << pretty(nf);
    }
  }
  ok = ok && done >= 200;
  report("normalizer/machine agreement (error-only)", ok,
         std::to_string(done) + " programs");
}

// ---------------------------------------------------------------------------
// Criterion 8: complex-value elimination.

TEST(Acceptance, ComplexValueElimination) {
  EffectSignature sig = testgen::signature_for("all");
  testgen::Gen gen(555, sig);
  gen.allow_complex_values = true;
  Checker ch(sig, CheckOptions::minus());
  Context empty;
  int with_complex = 0;
  bool ok = true;
  for (int i = 0; with_complex < 200 && i < 4000; ++i) {
    auto [m, ty] = gen.gen_program(6);
    if (is_complex_value_free(m)) continue;
    ++with_complex;
    CompPtr out = eliminate_complex_values(m);
    if (!is_complex_value_free(out)) {
      ok = false;
      ADD_FAILURE() << "not complex-free: " << pretty(out);
      continue;
    }
    if (!conv_comp(m, out, ty)) {
      ok = false;
      ADD_FAILURE() << "not convertible: " << pretty(m);
      continue;
    }
    try {
      ch.check_computation(empty, out, ty);
    } catch (const TypeError& e) {
      ok = false;
      ADD_FAILURE() << "type not preserved: " << e.what();
    }
  }
  ok = ok && with_complex >= 200;
  report("complex-value elimination", ok,
         std::to_string(with_complex) + " computations");
}

// ---------------------------------------------------------------------------
// Criterion 9: substitution/weakening metatheory and the named oracle.

TEST(Acceptance, SubstitutionWeakeningMetatheory) {
  EffectSignature sig = testgen::signature_for("all");
  bool ok = true;
  // substitution + weakening on typed judgements
  {
    testgen::Gen gen(777, sig);
    Checker ch(sig, CheckOptions::minus());
    int done = 0;
    for (int i = 0; done < 1000 && i < 5000; ++i) {
      std::vector<VTypePtr> empty_ctx;
      VTypePtr a = gen.gen_vtype_inf(empty_ctx, 2);
      std::vector<VTypePtr> ctx = {a};
      CTypePtr ty = gen.gen_ctype(ctx, 2);
      CompPtr m = gen.gen_comp(ctx, ty, 5);
      ValuePtr v = gen.gen_value_inf(empty_ctx, a, 3);
      Context g({a});
      Context g0;
      try {
        ch.check_computation(g, m, ty);
        // weakening
        VTypePtr fresh = gen.gen_vtype(empty_ctx, 2);
        Context g2({a, shift(fresh, 1, 0)});
        ch.check_computation(g2, shift(m, 1, 0), shift(ty, 1, 0));
        // substitution
        ch.check_computation(g0, subst(m, v, 0), subst(ty, v, 0));
      } catch (const TypeError& e) {
        ok = false;
        ADD_FAILURE() << "metatheory instance failed: " << e.what();
      }
      ++done;
    }
    ok = ok && done >= 1000;
  }
  // named-variable oracle agreement
  int oracle_done = 0;
  {
    testgen::Gen gen(888, sig);
    gen.allow_complex_values = true;
    for (int i = 0; oracle_done < 1000 && i < 5000; ++i) {
      std::vector<VTypePtr> empty_ctx;
      VTypePtr a0 = gen.gen_vtype(empty_ctx, 2);
      std::vector<VTypePtr> c0 = {a0};
      VTypePtr a1 = gen.gen_vtype(c0, 2);
      std::vector<VTypePtr> ctx = {a0, a1};
      CTypePtr ty = gen.gen_ctype(ctx, 2);
      CompPtr t = gen.gen_comp(ctx, ty, 5);
      if (uses_index(a1, 0) && i % 2 == 1) continue;
      std::size_t index = i % 2;
      std::vector<VTypePtr> vctx;
      VTypePtr slot;
      if (index == 0) {
        vctx = {a0};
        slot = a1;
      } else {
        vctx = {shift(a1, -1, 0)};
        slot = shift(a0, 1, 0);
      }
      ValuePtr v = gen.gen_value(vctx, slot, 3);
      CompPtr ours = subst(t, v, index);
      CompPtr oracle = testoracle::oracle_subst(t, v, index, 2);
      if (!structural_eq(ours, oracle)) {
        ok = false;
        ADD_FAILURE() << "oracle disagreement at iteration " << i;
      }
      ++oracle_done;
    }
    ok = ok && oracle_done >= 1000;
  }
  report("substitution/weakening metatheory", ok,
         ">=1000 typed instances, " + std::to_string(oracle_done) +
             " oracle comparisons");
}

}  // namespace
