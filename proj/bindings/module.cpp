#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dcbpv/machine.hpp"
#include "dcbpv/normalize.hpp"
#include "dcbpv/parser.hpp"
#include "dcbpv/pretty.hpp"
#include "dcbpv/translate.hpp"
#include "dcbpv/typecheck.hpp"

namespace py = pybind11;
using namespace dcbpv;

namespace {

CheckOptions options_from(const std::string& mode, bool subtyping,
                          unsigned long long fuel, bool eta_id,
                          int mu_unfold) {
  CheckOptions o =
      mode == "plus" ? CheckOptions::plus(subtyping) : CheckOptions::minus();
  o.norm.fuel = fuel;
  o.norm.eta_id = eta_id;
  if (mu_unfold >= 0) o.norm.mu_unfold = static_cast<unsigned>(mu_unfold);
  return o;
}

py::dict diag(const std::string& kind, std::size_t line, std::size_t col,
              const std::string& message) {
  py::dict d;
  d["kind"] = kind;
  d["line"] = line;
  d["col"] = col;
  d["message"] = message;
  return d;
}

const char* resolve_kind_name(ResolveErrorKind k) {
  switch (k) {
    case ResolveErrorKind::UnboundIdentifier: return "UnboundIdentifier";
    case ResolveErrorKind::DuplicateDefinition: return "DuplicateDefinition";
    case ResolveErrorKind::EffectNotEnabled: return "EffectNotEnabled";
    case ResolveErrorKind::WrongKind: return "WrongKind";
  }
  return "ResolveError";
}

// Parse + resolve + typecheck all definitions of a program text.
py::dict check_source(const std::string& source, const std::string& mode,
                      bool subtyping, unsigned long long fuel, bool eta_id,
                      int mu_unfold) {
  py::dict out;
  py::list diags;
  out["ok"] = false;
  out["diagnostics"] = diags;
  SourceProgram parsed;
  ResolvedProgram resolved;
  try {
    parsed = parse(source);
    resolved = resolve(parsed);
  } catch (const SyntaxError& e) {
    diags.append(diag("SyntaxError", e.pos.line, e.pos.col, e.what()));
    return out;
  } catch (const ResolveError& e) {
    diags.append(diag(resolve_kind_name(e.kind), e.pos.line, e.pos.col,
                      e.what()));
    return out;
  }
  Checker checker(resolved.signature,
                  options_from(mode, subtyping, fuel, eta_id, mu_unfold));
  Context empty;
  bool ok = true;
  for (std::size_t i = 0; i < resolved.defs.size(); ++i) {
    const ResolvedDef& d = resolved.defs[i];
    Pos pos = parsed.definitions[i].pos;
    try {
      switch (d.kind) {
        case DefKind::Value:
          if (d.vtype_ascription)
            checker.check_value(empty, std::get<ValuePtr>(d.body),
                                d.vtype_ascription);
          else
            checker.infer_value(empty, std::get<ValuePtr>(d.body));
          break;
        case DefKind::Comp:
          if (d.ctype_ascription)
            checker.check_computation(empty, std::get<CompPtr>(d.body),
                                      d.ctype_ascription);
          else
            checker.infer_computation(empty, std::get<CompPtr>(d.body));
          break;
        case DefKind::VTypeDef:
          checker.check_vtype(empty, std::get<VTypePtr>(d.body));
          break;
        case DefKind::CTypeDef:
          checker.check_ctype(empty, std::get<CTypePtr>(d.body));
          break;
        case DefKind::Surface:
          break;
      }
    } catch (const TypeError& e) {
      ok = false;
      diags.append(diag(to_string(e.kind), pos.line, pos.col,
                        "in definition '" + d.name + "': " + e.what()));
    }
  }
  out["ok"] = ok;
  return out;
}

py::dict run_source(const std::string& source, unsigned long long fuel,
                    std::uint64_t seed, bool all_branches,
                    const std::string& entry) {
  ResolvedProgram resolved = resolve(parse(source));
  const ResolvedDef* main_def = resolved.find(entry);
  if (!main_def || main_def->kind != DefKind::Comp)
    throw std::invalid_argument("no computation definition named '" + entry +
                                "'");
  CompPtr program =
      eliminate_complex_values(std::get<CompPtr>(main_def->body));
  Machine machine(resolved.signature);
  auto word = [](const std::vector<std::string>& out) {
    std::string s;
    for (const auto& l : out) s += l;
    return s;
  };
  py::dict out;
  if (all_branches) {
    py::list leaves;
    for (const auto& leaf : machine.run_all(machine.initial(program), fuel)) {
      py::dict l;
      l["terminal"] = pretty(leaf.config.comp);
      l["out"] = word(leaf.config.output);
      l["state"] = leaf.config.store;
      l["steps"] = leaf.steps;
      l["exhausted"] = leaf.exhausted;
      leaves.append(l);
    }
    out["leaves"] = leaves;
    return out;
  }
  auto r = machine.run(machine.initial(program), fuel, seed);
  out["terminal"] = pretty(r.config.comp);
  out["out"] = word(r.config.output);
  out["state"] = r.config.store;
  out["steps"] = r.steps;
  out["exhausted"] = r.exhausted;
  out["error"] = std::holds_alternative<CError>(r.config.comp->node);
  return out;
}

py::dict translate_source(const std::string& source,
                          const std::string& direction) {
  ResolvedProgram resolved = resolve(parse(source));
  py::dict out;
  py::list defs;
  for (const auto& d : resolved.defs) {
    if (d.kind != DefKind::Surface) continue;
    const auto& term = std::get<surface::TermPtr>(d.body);
    py::dict entry;
    entry["name"] = d.name;
    if (direction == "cbn") {
      entry["core"] = pretty(cbn_translate_term(term));
      if (d.surface_ascription)
        entry["type"] = pretty(cbn_translate_type(d.surface_ascription));
    } else {
      entry["core"] = pretty(cbv_translate_term(term));
      if (d.surface_ascription)
        entry["type"] = pretty(t_f(cbv_translate_type(d.surface_ascription)));
    }
    defs.append(entry);
  }
  out["definitions"] = defs;
  return out;
}

std::string normalize_source(const std::string& text,
                             unsigned long long fuel) {
  NormalizeOptions opts;
  opts.fuel = fuel;
  // A bare computation in the full effect signature, so examples with
  // effects normalize too.
  EffectSignature sig;
  sig.diverge = sig.rec = sig.error = sig.print = sig.choose = sig.state =
      true;
  sig.alphabet = {"a", "b"};
  sig.states = {"s0", "s1"};
  sig.initial_state = "s0";
  sig.errors = {"crash", "oops"};
  return pretty(normalize(parse_computation(text, sig), opts).term);
}

}  // namespace

PYBIND11_MODULE(_dcbpv, m) {
  m.doc() = "dependently typed call-by-push-value kernel";
  m.def("check_source", &check_source, py::arg("source"),
        py::arg("mode") = "minus", py::arg("subtyping") = true,
        py::arg("fuel") = 1'000'000ull, py::arg("eta_id") = false,
        py::arg("mu_unfold") = -1,
        "Typecheck every definition of a program text.");
  m.def("run_source", &run_source, py::arg("source"),
        py::arg("fuel") = 1'000'000ull, py::arg("seed") = 0,
        py::arg("all_branches") = false, py::arg("entry") = "main",
        "Evaluate the entry computation of a program text.");
  m.def("translate_source", &translate_source, py::arg("source"),
        py::arg("direction") = "cbv",
        "Translate the surface definitions of a program text.");
  m.def("normalize_source", &normalize_source, py::arg("text"),
        py::arg("fuel") = 1'000'000ull,
        "Parse a computation and return its normal form.");
}
