#pragma once

#include <stdexcept>

#include "dcbpv/syntax.hpp"

// Judgmental equality, decided by reduction to normal form under the directed
// equations plus type-directed eta comparison at U, Pi and n-ary Pi.
//
// The rewrite system orients, left to right: the beta rules, let elimination,
// to-in associativity, commutation of to-in with lambda and tuples, effect
// algebraicity (errors, divergence, choice, reading, printing and writing
// pushed out of to-in and out of application/projection spines), the safe
// eta contractions, and hoisting of complex values out of term positions.
// The mu fixpoint equation is never applied by `normalize`; `conv` may unfold
// mu a bounded number of times when asked to.

namespace dcbpv {

struct NormalizeOptions {
  unsigned long long fuel = 1'000'000;
  // Identity eta. Off by default: with it on, any two inhabitants of the same
  // Id type are equated and constant id-matches are discarded, which makes
  // conversion a semi-decision procedure.
  bool eta_id = false;
  // How many times conv may unfold a mu on each side before giving up.
  unsigned mu_unfold = 0;
};

class FuelExhaustedError : public std::runtime_error {
 public:
  explicit FuelExhaustedError(unsigned long long fuel)
      : std::runtime_error("rewrite fuel exhausted (" + std::to_string(fuel) +
                           " steps)"),
        fuel(fuel) {}
  unsigned long long fuel;
};

template <typename T>
struct NormalForm {
  T term;
  unsigned long long steps = 0;
};

NormalForm<ValuePtr> normalize(const ValuePtr& t,
                               const NormalizeOptions& opts = {});
NormalForm<CompPtr> normalize(const CompPtr& t,
                              const NormalizeOptions& opts = {});
NormalForm<VTypePtr> normalize(const VTypePtr& t,
                               const NormalizeOptions& opts = {});
NormalForm<CTypePtr> normalize(const CTypePtr& t,
                               const NormalizeOptions& opts = {});

// Judgmental equality of two values at a value type / two computations at a
// computation type. Inputs need not be normal.
bool conv_value(const ValuePtr& a, const ValuePtr& b, const VTypePtr& type,
                const NormalizeOptions& opts = {});
bool conv_comp(const CompPtr& a, const CompPtr& b, const CTypePtr& type,
               const NormalizeOptions& opts = {});

// Judgmental equality of types; embedded values are compared at their
// carriers.
bool conv_vtype(const VTypePtr& a, const VTypePtr& b,
                const NormalizeOptions& opts = {});
bool conv_ctype(const CTypePtr& a, const CTypePtr& b,
                const NormalizeOptions& opts = {});

}  // namespace dcbpv
