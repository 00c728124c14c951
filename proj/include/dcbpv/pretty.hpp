#pragma once

#include <string>

#include "dcbpv/surface.hpp"
#include "dcbpv/syntax.hpp"

// Rendering back to the concrete syntax. Binders are named by their depth
// (x0, x1, ...), so printing is already alpha-normal: parsing the output of
// `pretty` resolves to a structurally equal tree. Free indices render as
// `fv<k>` and only appear when printing open terms for diagnostics.

namespace dcbpv {

std::string pretty(const ValuePtr& t, std::size_t depth = 0);
std::string pretty(const CompPtr& t, std::size_t depth = 0);
std::string pretty(const VTypePtr& t, std::size_t depth = 0);
std::string pretty(const CTypePtr& t, std::size_t depth = 0);
std::string pretty(const surface::TermPtr& t, std::size_t depth = 0);
std::string pretty(const surface::TypePtr& t, std::size_t depth = 0);

}  // namespace dcbpv
