#pragma once

#include <vector>

#include "dcbpv/surface.hpp"
#include "dcbpv/syntax.hpp"

// The call-by-value and call-by-name readings of the surface theory as core
// programs. A surface term x1:A1,...,xn:An |- M : A becomes, by value,
// a computation of type F A^v in the context of the entrywise-translated
// telescope, and by name a computation of type B^n in a context of thunks.

namespace dcbpv {

enum class Direction { CBV, CBN };
enum class Strength { Weak, Dependent };

VTypePtr cbv_translate_type(const surface::TypePtr& t);
CompPtr cbv_translate_term(const surface::TermPtr& m);

CTypePtr cbn_translate_type(const surface::TypePtr& t);
CompPtr cbn_translate_term(const surface::TermPtr& m);

// Entrywise context translations (input entries scoped over their prefixes).
std::vector<VTypePtr> cbv_translate_context(
    const std::vector<surface::TypePtr>& entries);
std::vector<VTypePtr> cbn_translate_context(
    const std::vector<surface::TypePtr>& entries);

// Rewrites lets and pattern matches out of value positions, producing a
// judgmentally equal computation of the same type with no complex values.
CompPtr eliminate_complex_values(const CompPtr& m);

}  // namespace dcbpv
