#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "dcbpv/effects.hpp"
#include "dcbpv/syntax.hpp"

// The CK machine: a configuration pairs the computation in focus with a
// stack of frames, extended with the output word written so far and the
// current state of the storage cell. Transitions are the directed beta rules
// plus the effect rules; erratic choice is the only source of branching.

namespace dcbpv {

struct Configuration {
  CompPtr comp;
  StackPtr stack;
  std::vector<std::string> output;  // free-monoid element, one letter per entry
  std::string store;                // current state ("" when state is off)
};

enum class TerminalReason {
  ReturnAtNil,
  LambdaAtNil,
  TupleAtNil,
  ErrorHalt,
  StuckOpenTerm,
};

const char* to_string(TerminalReason r);

struct Terminal {
  TerminalReason reason;
};

// Either terminal, or the nonempty list of successor configurations. The
// list has more than one entry only for erratic choice.
using StepOutcome = std::variant<Terminal, std::vector<Configuration>>;

class MachineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class ComplexValuePresentError : public MachineError {
 public:
  ComplexValuePresentError()
      : MachineError("initial computation contains complex values") {}
};
class OpenTermError : public MachineError {
 public:
  OpenTermError() : MachineError("initial computation is not closed") {}
};

class Machine {
 public:
  explicit Machine(const EffectSignature& sig) : sig_(sig) {}

  // <m, nil, empty output, initial state>.
  Configuration initial(const CompPtr& m) const;

  StepOutcome step(const Configuration& c) const;
  bool is_terminal(const Configuration& c) const;

  struct RunResult {
    Configuration config;
    unsigned long long steps = 0;
    bool exhausted = false;
  };
  // Iterate `step`, resolving choice points with a seeded generator.
  RunResult run(Configuration c, unsigned long long fuel,
                std::uint64_t seed) const;

  struct Leaf {
    Configuration config;
    unsigned long long steps = 0;
    bool exhausted = false;
  };
  // Depth-first enumeration of every choice; fuel applies per path; leaves
  // come out in branch-index order.
  std::vector<Leaf> run_all(const Configuration& c,
                            unsigned long long fuel) const;

 private:
  const EffectSignature& sig_;
};

}  // namespace dcbpv
