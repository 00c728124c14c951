#include "dcbpv/pretty.hpp"

#include <sstream>

namespace dcbpv {

namespace {

std::string var_name(std::size_t index, std::size_t depth) {
  if (index < depth) return "x" + std::to_string(depth - 1 - index);
  return "fv" + std::to_string(index - depth);
}
std::string binder(std::size_t depth) { return "x" + std::to_string(depth); }

std::string quote_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

// A computation is open to the right when its last token run can swallow
// following input (a trailing body with no closing delimiter).
bool open_right(const CompPtr& t) {
  return std::visit(
      overloaded{
          [](const CToIn&) { return true; },
          [](const CLam&) { return true; },
          [](const CLet&) { return true; },
          [](const CMu&) { return true; },
          [](const CPrint&) { return true; },
          [](const CWrite&) { return true; },
          [](const CApp& n) { return open_right(n.fn); },
          [](const auto&) { return false; },
      },
      t->node);
}

bool is_comp_atom(const CompPtr& t) {
  if (std::holds_alternative<CToIn>(t->node)) return false;
  if (std::holds_alternative<CApp>(t->node)) return false;
  return true;
}

struct Printer {
  std::ostringstream out;

  void comp(const CompPtr& t, std::size_t d, bool tail) {
    if (!tail && open_right(t)) {
      out << "(";
      comp(t, d, true);
      out << ")";
      return;
    }
    std::visit(
        overloaded{
            [&](const CReturn& n) {
              out << "return ";
              value(n.value, d);
            },
            [&](const CToIn& n) {
              comp(n.head, d, false);
              out << " to " << binder(d);
              if (n.motive) {
                out << " : ";
                ctype(n.motive, d + 1);
              }
              out << ". ";
              comp(n.body, d + 1, true);
            },
            [&](const CForce& n) {
              out << "force ";
              value(n.value, d);
            },
            [&](const CLet& n) {
              out << "let " << binder(d) << " = ";
              value(n.bound, d);
              out << " in ";
              comp(n.body, d + 1, true);
            },
            [&](const CPmSum& n) {
              out << "pm ";
              value(n.scrutinee, d);
              pm_motive(n.motive, d, 1);
              out << " as {";
              for (std::size_t i = 0; i < n.branches.size(); ++i) {
                if (i) out << " | ";
                out << (i + 1) << " " << binder(d) << ". ";
                comp(n.branches[i], d + 1, true);
              }
              out << "}";
            },
            [&](const CPmUnit& n) {
              out << "pm ";
              value(n.scrutinee, d);
              pm_motive(n.motive, d, 1);
              out << " as {(). ";
              comp(n.body, d, true);
              out << "}";
            },
            [&](const CPmPair& n) {
              out << "pm ";
              value(n.scrutinee, d);
              pm_motive(n.motive, d, 1);
              out << " as {<" << binder(d) << ", " << binder(d + 1) << ">. ";
              comp(n.body, d + 2, true);
              out << "}";
            },
            [&](const CPmId& n) {
              out << "pm ";
              value(n.scrutinee, d);
              pm_motive(n.motive, d, 3);
              out << " as {refl " << binder(d) << ". ";
              comp(n.body, d + 1, true);
              out << "}";
            },
            [&](const CTuple& n) {
              out << "tuple {";
              for (std::size_t i = 0; i < n.items.size(); ++i) {
                if (i) out << " | ";
                comp(n.items[i], d, true);
              }
              out << "}";
            },
            [&](const CProj& n) {
              out << "proj " << n.tag << " ";
              comp_atom(n.target, d);
            },
            [&](const CLam& n) {
              out << "\\" << binder(d) << ". ";
              comp(n.body, d + 1, true);
            },
            [&](const CApp& n) {
              // A value-let argument would otherwise re-parse as a
              // computation let swallowing the application.
              bool aparen = std::holds_alternative<VLet>(n.arg->node);
              if (aparen) out << "(";
              value(n.arg, d);
              if (aparen) out << ")";
              out << " ' ";
              // Application binds tighter than sequencing, so a to-in in
              // function position keeps its parentheses.
              bool fparen = std::holds_alternative<CToIn>(n.fn->node);
              if (fparen) out << "(";
              comp(n.fn, d, true);
              if (fparen) out << ")";
            },
            [&](const CDiverge&) { out << "diverge"; },
            [&](const CError& n) { out << "error " << n.name; },
            [&](const CMu& n) {
              out << "mu " << binder(d) << ". ";
              comp(n.body, d + 1, true);
            },
            [&](const CPrint& n) {
              out << "print " << quote_string(n.letter) << "; ";
              comp(n.rest, d, true);
            },
            [&](const CChoose& n) {
              out << "choose {";
              for (std::size_t i = 0; i < n.alternatives.size(); ++i) {
                if (i) out << " | ";
                comp(n.alternatives[i], d, true);
              }
              out << "}";
            },
            [&](const CWrite& n) {
              out << "write " << n.state << "; ";
              comp(n.rest, d, true);
            },
            [&](const CRead& n) {
              out << "read {";
              for (std::size_t i = 0; i < n.branches.size(); ++i) {
                if (i) out << " | ";
                out << n.branches[i].first << ". ";
                comp(n.branches[i].second, d, true);
              }
              out << "}";
            },
        },
        t->node);
  }

  // Positions the grammar restricts to a computation atom (thunk argument,
  // proj target).
  void comp_atom(const CompPtr& t, std::size_t d) {
    if (!is_comp_atom(t) || open_right(t)) {
      out << "(";
      comp(t, d, true);
      out << ")";
    } else {
      comp(t, d, true);
    }
  }

  void pm_motive(const CTypePtr& m, std::size_t d, std::size_t binders) {
    if (!m) return;
    out << " [";
    for (std::size_t i = 0; i < binders; ++i) {
      if (i) out << " ";
      out << binder(d + i);
    }
    out << ". ";
    ctype(m, d + binders);
    out << "]";
  }

  void value(const ValuePtr& t, std::size_t d) {
    std::visit(
        overloaded{
            [&](const VVar& n) { out << var_name(n.index, d); },
            [&](const VThunk& n) {
              out << "thunk ";
              comp_atom(n.body, d);
            },
            [&](const VInj& n) {
              out << "inj " << n.tag << "/" << n.arity << " ";
              value(n.payload, d);
            },
            [&](const VUnit&) { out << "()"; },
            [&](const VPair& n) {
              out << "<";
              value(n.fst, d);
              out << ", ";
              value(n.snd, d);
              out << ">";
            },
            [&](const VRefl& n) {
              out << "refl ";
              value(n.subject, d);
            },
            [&](const VLet& n) {
              out << "let " << binder(d) << " = ";
              value(n.bound, d);
              out << " in ";
              value(n.body, d + 1);
            },
            [&](const VPmSum& n) {
              out << "pm ";
              value(n.scrutinee, d);
              out << " as {";
              for (std::size_t i = 0; i < n.branches.size(); ++i) {
                if (i) out << " | ";
                out << (i + 1) << " " << binder(d) << ". ";
                value(n.branches[i], d + 1);
              }
              out << "}";
            },
            [&](const VPmUnit& n) {
              out << "pm ";
              value(n.scrutinee, d);
              out << " as {(). ";
              value(n.body, d);
              out << "}";
            },
            [&](const VPmPair& n) {
              out << "pm ";
              value(n.scrutinee, d);
              out << " as {<" << binder(d) << ", " << binder(d + 1) << ">. ";
              value(n.body, d + 2);
              out << "}";
            },
            [&](const VPmId& n) {
              out << "pm ";
              value(n.scrutinee, d);
              out << " as {refl " << binder(d) << ". ";
              value(n.body, d + 1);
              out << "}";
            },
        },
        t->node);
  }

  void vtype(const VTypePtr& t, std::size_t d) {
    std::visit(
        overloaded{
            [&](const TU& n) {
              out << "U ";
              ctype(n.body, d);
            },
            [&](const TSumN& n) {
              out << "Sum[";
              for (std::size_t i = 0; i < n.items.size(); ++i) {
                if (i) out << " | ";
                vtype(n.items[i], d);
              }
              out << "]";
            },
            [&](const TOne&) { out << "1"; },
            [&](const TSigma& n) {
              out << "Sg " << binder(d) << " : ";
              vtype(n.base, d);
              out << ". ";
              vtype(n.fiber, d + 1);
            },
            [&](const TId& n) {
              out << "Id ";
              bool paren = std::holds_alternative<TSigma>(n.carrier->node) ||
                           std::holds_alternative<TId>(n.carrier->node);
              if (paren) out << "(";
              vtype(n.carrier, d);
              if (paren) out << ")";
              out << " ";
              value(n.lhs, d);
              out << " ";
              value(n.rhs, d);
            },
        },
        t->node);
  }

  void ctype(const CTypePtr& t, std::size_t d) {
    std::visit(
        overloaded{
            [&](const TF& n) {
              out << "F ";
              vtype(n.value, d);
            },
            [&](const TPiN& n) {
              out << "Prod[";
              for (std::size_t i = 0; i < n.items.size(); ++i) {
                if (i) out << " | ";
                ctype(n.items[i], d);
              }
              out << "]";
            },
            [&](const TPi& n) {
              out << "Pi " << binder(d) << " : ";
              vtype(n.base, d);
              out << ". ";
              ctype(n.body, d + 1);
            },
        },
        t->node);
  }
};

// ---------------------------------------------------------------------------
// Surface printing

bool surf_open_right(const surface::TermPtr& t) {
  using namespace surface;
  return std::visit(
      overloaded{
          [](const SLam&) { return true; },
          [](const SLet&) { return true; },
          [](const SMu&) { return true; },
          [](const SPrint&) { return true; },
          [](const SWrite&) { return true; },
          [](const SApp& n) { return surf_open_right(n.fn); },
          [](const auto&) { return false; },
      },
      t->node);
}

struct SurfPrinter {
  std::ostringstream out;

  // Atom positions in the surface grammar: inj/refl/proj argument and the
  // left operand of application.
  void atom(const surface::TermPtr& t, std::size_t d) {
    using namespace surface;
    bool needs = std::holds_alternative<SApp>(t->node) || surf_open_right(t);
    if (needs) {
      out << "(";
      term(t, d, true);
      out << ")";
    } else {
      term(t, d, true);
    }
  }

  void term(const surface::TermPtr& t, std::size_t d, bool tail) {
    using namespace surface;
    if (!tail && surf_open_right(t)) {
      out << "(";
      term(t, d, true);
      out << ")";
      return;
    }
    std::visit(
        overloaded{
            [&](const SVar& n) { out << var_name(n.index, d); },
            [&](const SLet& n) {
              out << "let " << binder(d) << " = ";
              term(n.bound, d, false);
              out << " in ";
              term(n.body, d + 1, true);
            },
            [&](const SInj& n) {
              out << "inj " << n.tag << "/" << n.arity << " ";
              atom(n.payload, d);
            },
            [&](const SPmSum& n) {
              out << "pm ";
              term(n.scrutinee, d, false);
              out << " as {";
              for (std::size_t i = 0; i < n.branches.size(); ++i) {
                if (i) out << " | ";
                out << (i + 1) << " " << binder(d) << ". ";
                term(n.branches[i], d + 1, true);
              }
              out << "}";
            },
            [&](const SNTuple& n) {
              out << "tuple {";
              for (std::size_t i = 0; i < n.items.size(); ++i) {
                if (i) out << " | ";
                term(n.items[i], d, true);
              }
              out << "}";
            },
            [&](const SNProj& n) {
              out << "proj " << n.tag << " ";
              atom(n.target, d);
            },
            [&](const SLam& n) {
              out << "\\" << binder(d) << ". ";
              term(n.body, d + 1, true);
            },
            [&](const SApp& n) {
              atom(n.arg, d);
              out << " ' ";
              term(n.fn, d, true);
            },
            [&](const SUnit&) { out << "()"; },
            [&](const SPmUnit& n) {
              out << "pm ";
              term(n.scrutinee, d, false);
              out << " as {(). ";
              term(n.body, d, true);
              out << "}";
            },
            [&](const SPair& n) {
              out << "<";
              term(n.fst, d, true);
              out << ", ";
              term(n.snd, d, true);
              out << ">";
            },
            [&](const SPmPair& n) {
              out << "pm ";
              term(n.scrutinee, d, false);
              out << " as {<" << binder(d) << ", " << binder(d + 1) << ">. ";
              term(n.body, d + 2, true);
              out << "}";
            },
            [&](const SRefl& n) {
              out << "refl ";
              atom(n.subject, d);
            },
            [&](const SPmId& n) {
              out << "pm ";
              term(n.scrutinee, d, false);
              out << " as {refl " << binder(d) << ". ";
              term(n.body, d + 1, true);
              out << "}";
            },
            [&](const SDiverge&) { out << "diverge"; },
            [&](const SError& n) { out << "error " << n.name; },
            [&](const SMu& n) {
              out << "mu " << binder(d) << ". ";
              term(n.body, d + 1, true);
            },
            [&](const SPrint& n) {
              out << "print " << quote_string(n.letter) << "; ";
              term(n.rest, d, true);
            },
            [&](const SChoose& n) {
              out << "choose {";
              for (std::size_t i = 0; i < n.alternatives.size(); ++i) {
                if (i) out << " | ";
                term(n.alternatives[i], d, true);
              }
              out << "}";
            },
            [&](const SWrite& n) {
              out << "write " << n.state << "; ";
              term(n.rest, d, true);
            },
            [&](const SRead& n) {
              out << "read {";
              for (std::size_t i = 0; i < n.branches.size(); ++i) {
                if (i) out << " | ";
                out << n.branches[i].first << ". ";
                term(n.branches[i].second, d, true);
              }
              out << "}";
            },
        },
        t->node);
  }

  void type(const surface::TypePtr& t, std::size_t d) {
    using namespace surface;
    std::visit(
        overloaded{
            [&](const STOne&) { out << "1"; },
            [&](const STSum& n) {
              out << "Sum[";
              for (std::size_t i = 0; i < n.items.size(); ++i) {
                if (i) out << " | ";
                type(n.items[i], d);
              }
              out << "]";
            },
            [&](const STProd& n) {
              out << "Prod[";
              for (std::size_t i = 0; i < n.items.size(); ++i) {
                if (i) out << " | ";
                type(n.items[i], d);
              }
              out << "]";
            },
            [&](const STPi& n) {
              out << "Pi " << binder(d) << " : ";
              type(n.base, d);
              out << ". ";
              type(n.body, d + 1);
            },
            [&](const STSigma& n) {
              out << "Sg " << binder(d) << " : ";
              type(n.base, d);
              out << ". ";
              type(n.body, d + 1);
            },
            [&](const STId& n) {
              out << "Id ";
              bool paren = !std::holds_alternative<STOne>(n.carrier->node) &&
                           !std::holds_alternative<STSum>(n.carrier->node) &&
                           !std::holds_alternative<STProd>(n.carrier->node);
              if (paren) out << "(";
              type(n.carrier, d);
              if (paren) out << ")";
              out << " ";
              atom(n.lhs, d);
              out << " ";
              atom(n.rhs, d);
            },
        },
        t->node);
  }
};

}  // namespace

std::string pretty(const ValuePtr& t, std::size_t depth) {
  Printer p;
  p.value(t, depth);
  return p.out.str();
}
std::string pretty(const CompPtr& t, std::size_t depth) {
  Printer p;
  p.comp(t, depth, true);
  return p.out.str();
}
std::string pretty(const VTypePtr& t, std::size_t depth) {
  Printer p;
  p.vtype(t, depth);
  return p.out.str();
}
std::string pretty(const CTypePtr& t, std::size_t depth) {
  Printer p;
  p.ctype(t, depth);
  return p.out.str();
}
std::string pretty(const surface::TermPtr& t, std::size_t depth) {
  SurfPrinter p;
  p.term(t, depth, true);
  return p.out.str();
}
std::string pretty(const surface::TypePtr& t, std::size_t depth) {
  SurfPrinter p;
  p.type(t, depth);
  return p.out.str();
}

}  // namespace dcbpv
