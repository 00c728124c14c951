#include "dcbpv/syntax.hpp"

#include <gtest/gtest.h>

#include "dcbpv/parser.hpp"
#include "support/gen.hpp"
#include "support/named_oracle.hpp"

using namespace dcbpv;

namespace {

TEST(Shift, SingleFreeVariable) {
  EXPECT_TRUE(structural_eq(shift(vvar(0), 1, 0), vvar(1)));
}

TEST(Shift, CutoffProtectsBinder) {
  CompPtr t = clam(capp(vvar(0), cforce(vvar(1))));
  CompPtr expected = clam(capp(vvar(0), cforce(vvar(2))));
  EXPECT_TRUE(structural_eq(shift(t, 1, 0), expected));
}

TEST(Shift, StrengtheningAboveCutoff) {
  CompPtr t = creturn(vvar(3));
  EXPECT_TRUE(structural_eq(shift(t, -1, 2), creturn(vvar(2))));
}

TEST(Shift, NegativeIndexThrows) {
  EXPECT_THROW(shift(vvar(0), -1, 0), NegativeIndexError);
}

TEST(Subst, ReplacesIndex) {
  EXPECT_TRUE(
      structural_eq(subst(creturn(vvar(0)), vunit(), 0), creturn(vunit())));
}

TEST(Subst, TypeWithEmbeddedValues) {
  // B[thunk M/z] with B = F (Id Sum[1|1] z (thunk return inj 1/2 ()))
  ValuePtr w = vthunk(creturn(vinj(1, 2, vunit())));
  CTypePtr b = t_f(t_id(t_sum({t_one(), t_one()}), vvar(0), w));
  CTypePtr expected = t_f(t_id(t_sum({t_one(), t_one()}), w, w));
  EXPECT_TRUE(structural_eq(subst(b, w, 0), expected));
}

TEST(Subst, ShiftsUnderBinders) {
  CompPtr t = clam(creturn(vvar(1)));
  ValuePtr v = vpair(vunit(), vunit());
  CompPtr expected = clam(creturn(vpair(vunit(), vunit())));
  EXPECT_TRUE(structural_eq(subst(t, v, 0), expected));
}

TEST(StructuralEq, Basics) {
  EXPECT_TRUE(
      structural_eq(clam(creturn(vvar(0))), clam(creturn(vvar(0)))));
  EXPECT_FALSE(
      structural_eq(clam(creturn(vvar(0))), clam(creturn(vvar(1)))));
}

TEST(StructuralEq, AlphaEquivalentParses) {
  CompPtr a = parse_computation("\\x. return x");
  CompPtr b = parse_computation("\\y. return y");
  EXPECT_TRUE(structural_eq(a, b));
}

TEST(ComplexValueFree, Examples) {
  EXPECT_TRUE(is_complex_value_free(creturn(vunit())));
  // pm inside a value
  EXPECT_FALSE(is_complex_value_free(
      creturn(vpm_pair(vpair(vunit(), vunit()), vvar(0)))));
  // pm at computation level is not a complex value
  EXPECT_TRUE(is_complex_value_free(
      cpm_pair(vpair(vunit(), vunit()), creturn(vvar(0)))));
}

TEST(ComplexValueFree, TypesAreExempt) {
  // A motive containing a value-level let does not make the computation
  // complex.
  CTypePtr motive = t_f(t_id(t_one(), vlet(vunit(), vvar(0)), vunit()));
  CompPtr m = cto_in(creturn(vunit()), creturn(vunit()), motive);
  EXPECT_TRUE(is_complex_value_free(m));
}

TEST(Scope, Validator) {
  EXPECT_TRUE(well_scoped(clam(creturn(vvar(0))), 0));
  EXPECT_FALSE(well_scoped(creturn(vvar(0)), 0));
  EXPECT_TRUE(well_scoped(creturn(vvar(1)), 2));
}

// ---------------------------------------------------------------------------
// Properties

TEST(Properties, ShiftInverse) {
  testgen::Gen gen(7, testgen::signature_for("all"));
  for (int i = 0; i < 300; ++i) {
    auto [m, ty] = gen.gen_program(5);
    for (std::size_t c : {0u, 1u, 2u}) {
      CompPtr round = shift(shift(m, 1, c), -1, c);
      EXPECT_TRUE(structural_eq(round, m));
    }
  }
}

TEST(Properties, SubstitutionLemma) {
  // t[v/x][w/y] = t[w'/y][v[w/y]/x] for t over (y, x).
  testgen::Gen gen(11, testgen::signature_for("all"));
  int done = 0;
  for (int i = 0; done < 1000 && i < 4000; ++i) {
    std::vector<VTypePtr> empty;
    VTypePtr ay = gen.gen_vtype(empty, 2);
    std::vector<VTypePtr> cy = {ay};
    VTypePtr ax = gen.gen_vtype(cy, 2);
    std::vector<VTypePtr> cyx = {ay, ax};
    CTypePtr ty = gen.gen_ctype(cyx, 2);
    CompPtr t = gen.gen_comp(cyx, ty, 4);
    ValuePtr v = gen.gen_value(cy, ax, 3);
    ValuePtr w = gen.gen_value(empty, ay, 3);
    CompPtr lhs = subst(subst(t, v, 0), w, 0);
    CompPtr rhs = subst(subst(t, shift(w, 1, 0), 1), subst(v, w, 0), 0);
    ASSERT_TRUE(structural_eq(lhs, rhs));
    ++done;
  }
  EXPECT_GE(done, 1000);
}

TEST(Properties, SubstAgreesWithNamedOracle) {
  testgen::Gen gen(13, testgen::signature_for("all"));
  gen.allow_complex_values = true;
  int done = 0;
  for (int i = 0; done < 1000 && i < 4000; ++i) {
    std::vector<VTypePtr> empty;
    VTypePtr a0 = gen.gen_vtype(empty, 2);
    std::vector<VTypePtr> c0 = {a0};
    VTypePtr a1 = gen.gen_vtype(c0, 2);
    std::vector<VTypePtr> ctx = {a0, a1};
    CTypePtr ty = gen.gen_ctype(ctx, 2);
    CompPtr t = gen.gen_comp(ctx, ty, 4);
    std::size_t index = i % 2;
    // The substituted value lives in the context with slot `index` removed.
    std::vector<VTypePtr> vctx;
    VTypePtr slot_ty;
    if (index == 0) {
      vctx = {a0};
      slot_ty = a1;
    } else {
      // a1 may mention slot 0; skip those instances.
      if (uses_index(a1, 0)) continue;
      vctx = {shift(a1, -1, 0)};
      slot_ty = shift(a0, 1, 0);
    }
    ValuePtr v = gen.gen_value(vctx, slot_ty, 3);
    CompPtr ours = subst(t, v, index);
    CompPtr oracle = testoracle::oracle_subst(t, v, index, 2);
    ASSERT_TRUE(structural_eq(ours, oracle))
        << "index " << index << " iteration " << i;
    ++done;
  }
  EXPECT_GE(done, 1000);
}

TEST(Properties, StructuralEqIsEquivalenceAndSubstRespectsIt) {
  testgen::Gen gen(17, testgen::signature_for("all"));
  for (int i = 0; i < 200; ++i) {
    auto [a, ty] = gen.gen_program(4);
    auto [b, ty2] = gen.gen_program(4);
    EXPECT_TRUE(structural_eq(a, a));
    EXPECT_EQ(structural_eq(a, b), structural_eq(b, a));
    // subst respects equality: substituting equal values into equal terms
    std::vector<VTypePtr> empty;
    VTypePtr at = gen.gen_vtype(empty, 2);
    std::vector<VTypePtr> ctx = {at};
    CompPtr t = gen.gen_comp(ctx, t_f(t_one()), 3);
    ValuePtr v = gen.gen_value(empty, at, 2);
    EXPECT_TRUE(structural_eq(subst(t, v, 0), subst(t, v, 0)));
  }
}

TEST(Properties, ComplexValueFreedomPreservedBySubst) {
  testgen::Gen gen(19, testgen::signature_for("all"));
  for (int i = 0; i < 300; ++i) {
    std::vector<VTypePtr> empty;
    VTypePtr a = gen.gen_vtype(empty, 2);
    std::vector<VTypePtr> ctx = {a};
    CompPtr t = gen.gen_comp(ctx, t_f(t_one()), 4);
    ValuePtr v = gen.gen_value(empty, a, 3);
    if (!is_complex_value_free(t) || !is_complex_value_free(v)) continue;
    EXPECT_TRUE(is_complex_value_free(subst(t, v, 0)));
  }
}

}  // namespace
