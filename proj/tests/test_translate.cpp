#include "dcbpv/translate.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "dcbpv/normalize.hpp"
#include "dcbpv/parser.hpp"
#include "dcbpv/pretty.hpp"
#include "dcbpv/typecheck.hpp"
#include "support/gen.hpp"

using namespace dcbpv;
using namespace dcbpv::surface;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  EXPECT_TRUE(in.good()) << path;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TermPtr sv(std::size_t i) { return mk_term(SVar{i}); }
TermPtr sunit() { return mk_term(SUnit{}); }

// One surface instance per row of the translation tables; the expected
// outputs are checked-in fixtures.
std::vector<std::pair<std::string, TermPtr>> table_rows() {
  return {
      {"01_var", sv(0)},
      {"02_let", mk_term(SLet{sv(0), sv(0)})},
      {"03_inj", mk_term(SInj{1, 2, sv(0)})},
      {"04_pm_sum", mk_term(SPmSum{sv(0), {sv(0), sunit()}})},
      {"05_nlam", mk_term(SNTuple{{sunit(), sunit()}})},
      {"06_nproj", mk_term(SNProj{1, sv(0)})},
      {"07_lam", mk_term(SLam{sv(0)})},
      {"08_app", mk_term(SApp{sv(0), sv(1)})},
      {"09_unit", sunit()},
      {"10_pm_unit", mk_term(SPmUnit{sv(0), sunit()})},
      {"11_pair", mk_term(SPair{sv(0), sv(1)})},
      {"12_pm_pair", mk_term(SPmPair{sv(0), sv(1)})},
      {"13_refl", mk_term(SRefl{sv(0)})},
      {"14_pm_id", mk_term(SPmId{sv(0), sv(0)})},
      {"15_diverge", mk_term(SDiverge{})},
      {"16_mu", mk_term(SMu{sv(0)})},
      {"17_choose", mk_term(SChoose{{sunit(), sunit()}})},
      {"18_error", mk_term(SError{"crash"})},
      {"19_print", mk_term(SPrint{"a", sunit()})},
      {"20_write", mk_term(SWrite{"s1", sunit()})},
      {"21_read", mk_term(SRead{{{"s0", sunit()}, {"s1", sunit()}}})},
  };
}

TEST(Goldens, CbvRows) {
  for (const auto& [name, term] : table_rows()) {
    std::string got = pretty(cbv_translate_term(term));
    std::string want =
        read_file(std::string(DCBPV_TEST_DIR) + "/golden/cbv/" + name +
                  ".golden");
    EXPECT_EQ(got, want) << "row " << name;
  }
}

TEST(Goldens, CbnRows) {
  for (const auto& [name, term] : table_rows()) {
    std::string got = pretty(cbn_translate_term(term));
    std::string want =
        read_file(std::string(DCBPV_TEST_DIR) + "/golden/cbn/" + name +
                  ".golden");
    EXPECT_EQ(got, want) << "row " << name;
  }
}

TEST(Goldens, CbvTypeRows) {
  // Type columns of the by-value table.
  EXPECT_EQ(pretty(cbv_translate_type(mk_type(STOne{}))), "1");
  EXPECT_EQ(pretty(cbv_translate_type(
                mk_type(STPi{mk_type(STOne{}), mk_type(STOne{})}))),
            "U Pi x0 : 1. F 1");
  EXPECT_EQ(pretty(cbv_translate_type(
                mk_type(STSigma{mk_type(STOne{}), mk_type(STOne{})}))),
            "Sg x0 : 1. 1");
  EXPECT_EQ(pretty(cbv_translate_type(
                mk_type(STId{mk_type(STOne{}), sv(0), sv(1)}))),
            "Id U F 1 thunk return fv0 thunk return fv1");
}

TEST(Goldens, CbnTypeRows) {
  EXPECT_EQ(pretty(cbn_translate_type(mk_type(STOne{}))), "F 1");
  EXPECT_EQ(pretty(cbn_translate_type(
                mk_type(STPi{mk_type(STOne{}), mk_type(STOne{})}))),
            "Pi x0 : U F 1. F 1");
  EXPECT_EQ(pretty(cbn_translate_type(
                mk_type(STSigma{mk_type(STOne{}), mk_type(STOne{})}))),
            "F Sg x0 : U F 1. U F 1");
  EXPECT_EQ(pretty(cbn_translate_type(
                mk_type(STSum{{mk_type(STOne{}), mk_type(STOne{})}}))),
            "F Sum[U F 1 | U F 1]");
  EXPECT_EQ(pretty(cbn_translate_type(
                mk_type(STId{mk_type(STOne{}), sv(0), sv(1)}))),
            "F Id U F 1 thunk force fv0 thunk force fv1");
}

// ---------------------------------------------------------------------------
// Type preservation over the surface corpus

ResolvedProgram load_corpus() {
  return resolve(parse(
      read_file(std::string(DCBPV_TEST_DIR) + "/fixtures/surface_corpus.dcbpv")));
}

TEST(TypePreservation, CbvInPlusMode) {
  ResolvedProgram corpus = load_corpus();
  Checker plus(corpus.signature, CheckOptions::plus());
  Context empty;
  int checked = 0;
  for (const auto& def : corpus.defs) {
    if (def.kind != DefKind::Surface || !def.surface_ascription) continue;
    const auto& term = std::get<TermPtr>(def.body);
    CompPtr core = cbv_translate_term(term);
    CTypePtr ty = t_f(cbv_translate_type(def.surface_ascription));
    EXPECT_NO_THROW(plus.check_computation(empty, core, ty))
        << def.name << " : " << pretty(ty) << " = " << pretty(core);
    EXPECT_TRUE(is_complex_value_free(core)) << def.name;
    ++checked;
  }
  EXPECT_GE(checked, 30);
}

TEST(TypePreservation, CbnWeakInMinusStrongInPlus) {
  ResolvedProgram corpus = load_corpus();
  Checker minus(corpus.signature, CheckOptions::minus());
  Checker plus(corpus.signature, CheckOptions::plus());
  Context empty;
  int checked = 0;
  for (const auto& def : corpus.defs) {
    if (def.kind != DefKind::Surface || !def.surface_ascription) continue;
    const auto& term = std::get<TermPtr>(def.body);
    CompPtr core = cbn_translate_term(term);
    CTypePtr ty = cbn_translate_type(def.surface_ascription);
    bool strong = def.name.rfind("strong_", 0) == 0;
    if (strong) {
      EXPECT_THROW(minus.check_computation(empty, core, ty), TypeError)
          << def.name;
      EXPECT_NO_THROW(plus.check_computation(empty, core, ty)) << def.name;
    } else {
      EXPECT_NO_THROW(minus.check_computation(empty, core, ty))
          << def.name << " : " << pretty(ty) << " = " << pretty(core);
    }
    EXPECT_TRUE(is_complex_value_free(core)) << def.name;
    ++checked;
  }
  EXPECT_GE(checked, 30);
}

TEST(TypePreservation, CbvOnlyWitnessNeedsPlus) {
  ResolvedProgram corpus = load_corpus();
  const ResolvedDef* def = corpus.find("s32_choice_id");
  ASSERT_NE(def, nullptr);
  CompPtr core = cbv_translate_term(std::get<TermPtr>(def->body));
  CTypePtr ty = t_f(cbv_translate_type(def->surface_ascription));
  Checker minus(corpus.signature, CheckOptions::minus());
  Checker plus(corpus.signature, CheckOptions::plus());
  Context empty;
  try {
    minus.check_computation(empty, core, ty);
    FAIL() << "expected rejection in minus mode";
  } catch (const TypeError& e) {
    EXPECT_EQ(e.kind, ErrKind::DependentSequencingNotAllowed);
  }
  EXPECT_NO_THROW(plus.check_computation(empty, core, ty));
}

// ---------------------------------------------------------------------------
// The Id beta law under the by-value reading

TEST(IdBeta, CbvDerivation) {
  // (pm (refl M) as {refl x. N})^v  =  (let x = M in N)^v, with every
  // instance typed at F Sum[1|1] so the conversion is decided at a type
  // where constructors are observable.
  std::vector<TermPtr> ms = {
      sunit(),
      mk_term(SPair{sunit(), sunit()}),
      mk_term(SInj{1, 2, sunit()}),
      mk_term(SLet{sunit(), sv(0)}),
      mk_term(SApp{sunit(), mk_term(SLam{sv(0)})}),
      mk_term(SPmUnit{sunit(), sunit()}),
  };
  // Bodies ignore the bound variable and return an observable constructor.
  std::vector<TermPtr> ns = {
      mk_term(SInj{1, 2, sunit()}),
      mk_term(SInj{2, 2, sunit()}),
      mk_term(SLet{mk_term(SInj{1, 2, sunit()}), sv(0)}),
  };
  // Bodies that use the matched variable, for subjects of type 1.
  std::vector<TermPtr> ns_using_x = {
      mk_term(SInj{1, 2, sv(0)}),
      mk_term(SApp{sv(0), mk_term(SLam{mk_term(SInj{2, 2, sv(0)})})}),
  };
  CTypePtr classifier = t_f(t_sum({t_one(), t_one()}));
  int count = 0;
  auto check_instance = [&](const TermPtr& m, const TermPtr& n) {
    TermPtr lhs = mk_term(SPmId{mk_term(SRefl{m}), n});
    TermPtr rhs = mk_term(SLet{m, n});
    CompPtr lhs_core = cbv_translate_term(lhs);
    CompPtr rhs_core = cbv_translate_term(rhs);
    EXPECT_TRUE(conv_comp(lhs_core, rhs_core, classifier))
        << pretty(lhs_core) << "  vs  " << pretty(rhs_core);
    ++count;
  };
  for (const auto& m : ms)
    for (const auto& n : ns) check_instance(m, n);
  std::vector<TermPtr> unit_ms = {
      sunit(), mk_term(SLet{sunit(), sv(0)}),
      mk_term(SApp{sunit(), mk_term(SLam{sv(0)})}),
      mk_term(SPmUnit{sunit(), sunit()})};
  for (const auto& m : unit_ms)
    for (const auto& n : ns_using_x) check_instance(m, n);
  EXPECT_GE(count, 10);
}

TEST(IdEta, ReflectionFails) {
  // An inhabited Id type whose endpoints are not judgmentally equal:
  // p : Id (U F 1) (thunk diverge) (thunk return ()) |- p, yet the
  // endpoints differ.
  ValuePtr lhs = vthunk(cdiverge());
  ValuePtr rhs = tr(vunit());
  EffectSignature sig = testgen::signature_for("divrec");
  Checker ch(sig, CheckOptions::minus());
  Context g({t_id(t_u(t_f(t_one())), lhs, rhs)});
  EXPECT_NO_THROW(ch.check_context(g));
  // The witness variable inhabits the type...
  EXPECT_NO_THROW(
      ch.check_value(g, vvar(0), t_id(t_u(t_f(t_one())), lhs, rhs)));
  // ...but reflection does not hold.
  EXPECT_FALSE(conv_value(lhs, rhs, t_u(t_f(t_one()))));
}

// ---------------------------------------------------------------------------
// Complex-value elimination

TEST(Eliminate, Examples) {
  CompPtr in1 = creturn(vlet(vunit(), vvar(0)));
  CompPtr out1 = clet(vunit(), creturn(vvar(0)));
  EXPECT_TRUE(structural_eq(eliminate_complex_values(in1), out1));

  CompPtr in2 = creturn(vpm_pair(vvar(0), vpair(vvar(1), vvar(0))));
  CompPtr out2 = cpm_pair(vvar(0), creturn(vpair(vvar(1), vvar(0))));
  EXPECT_TRUE(structural_eq(eliminate_complex_values(in2), out2));

  CompPtr clean = cto_in(creturn(vunit()), creturn(vvar(0)));
  EXPECT_EQ(eliminate_complex_values(clean), clean);  // pointer identity
}

TEST(Eliminate, GeneratedCorpus) {
  EffectSignature sig = testgen::signature_for("all");
  testgen::Gen gen(73, sig);
  gen.allow_complex_values = true;
  Checker ch(sig, CheckOptions::minus());
  Context empty;
  int with_complex = 0;
  for (int i = 0; with_complex < 200 && i < 8000; ++i) {
    auto [m, ty] = gen.gen_program(5);
    if (is_complex_value_free(m)) continue;
    ++with_complex;
    CompPtr out = eliminate_complex_values(m);
    EXPECT_TRUE(is_complex_value_free(out));
    EXPECT_TRUE(conv_comp(m, out, ty)) << pretty(m) << "\n-> " << pretty(out);
    EXPECT_NO_THROW(ch.check_computation(empty, out, ty)) << pretty(out);
  }
  EXPECT_GE(with_complex, 200);
}

}  // namespace
