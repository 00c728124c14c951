#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace dcbpv {

// Which effects a program may use, plus the data they act on: the printing
// monoid is the free monoid over `alphabet`, the storage cell ranges over
// `states` starting at `initial_state`, and `errors` names the error symbols.
struct EffectSignature {
  bool diverge = false;
  bool rec = false;
  bool error = false;
  bool print = false;
  bool choose = false;
  bool state = false;

  std::vector<std::string> alphabet;
  std::vector<std::string> states;
  std::string initial_state;
  std::vector<std::string> errors;

  static EffectSignature pure() { return {}; }

  bool has_letter(const std::string& s) const {
    return std::find(alphabet.begin(), alphabet.end(), s) != alphabet.end();
  }
  bool has_state(const std::string& s) const {
    return std::find(states.begin(), states.end(), s) != states.end();
  }
  bool has_error(const std::string& s) const {
    return std::find(errors.begin(), errors.end(), s) != errors.end();
  }

  // Enabled effects must come with nonempty data and a valid initial state.
  void validate() const {
    if (print && alphabet.empty())
      throw std::invalid_argument("print enabled with empty alphabet");
    if (error && errors.empty())
      throw std::invalid_argument("error enabled with empty error set");
    if (state) {
      if (states.empty())
        throw std::invalid_argument("state enabled with empty state set");
      if (!has_state(initial_state))
        throw std::invalid_argument("initial state not in state set");
    }
  }
};

}  // namespace dcbpv
