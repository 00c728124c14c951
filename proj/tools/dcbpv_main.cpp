#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "dcbpv/machine.hpp"
#include "dcbpv/normalize.hpp"
#include "dcbpv/parser.hpp"
#include "dcbpv/pretty.hpp"
#include "dcbpv/translate.hpp"
#include "dcbpv/typecheck.hpp"

namespace {

using json = nlohmann::json;
using namespace dcbpv;

constexpr int kExitOk = 0;
constexpr int kExitTypeError = 1;
constexpr int kExitSyntaxError = 2;
constexpr int kExitIo = 3;
constexpr int kExitFuel = 4;
constexpr int kExitErrorHalt = 5;

struct CommonFlags {
  std::string mode = "minus";
  std::string subtyping = "on";
  unsigned long long fuel = 1'000'000;
  std::uint64_t seed = 0;
  bool eta_id = false;
  unsigned mu_unfold_set = 0;
  bool mu_unfold_given = false;
  bool json_out = false;
};

CheckOptions make_options(const CommonFlags& f) {
  CheckOptions o;
  o.mode = f.mode == "plus" ? Mode::Plus : Mode::Minus;
  o.subtyping = f.subtyping != "off";
  o.norm.fuel = f.fuel;
  o.norm.eta_id = f.eta_id;
  o.norm.mu_unfold = f.mu_unfold_given ? f.mu_unfold_set
                                       : (o.mode == Mode::Plus ? 1 : 0);
  return o;
}

struct Diagnostic {
  std::string file;
  std::size_t line = 0;
  std::size_t col = 0;
  std::string kind;
  std::string message;
};

void emit_diags(const std::vector<Diagnostic>& diags, bool json_mode,
                bool ok) {
  if (json_mode) {
    json out;
    out["ok"] = ok;
    out["diagnostics"] = json::array();
    for (const auto& d : diags)
      out["diagnostics"].push_back({{"file", d.file},
                                    {"line", d.line},
                                    {"col", d.col},
                                    {"kind", d.kind},
                                    {"message", d.message}});
    std::cout << out.dump() << "\n";
    return;
  }
  for (const auto& d : diags)
    std::cerr << d.file << ":" << d.line << ":" << d.col << ": error[" << d.kind
              << "]: " << d.message << "\n";
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

const char* resolve_kind(ResolveErrorKind k) {
  switch (k) {
    case ResolveErrorKind::UnboundIdentifier: return "UnboundIdentifier";
    case ResolveErrorKind::DuplicateDefinition: return "DuplicateDefinition";
    case ResolveErrorKind::EffectNotEnabled: return "EffectNotEnabled";
    case ResolveErrorKind::WrongKind: return "WrongKind";
  }
  return "ResolveError";
}

// Parse + resolve, filling diagnostics; returns exit code or kExitOk.
int load_program(const std::string& path, const std::string& source,
                 bool json_mode, SourceProgram& parsed,
                 ResolvedProgram& resolved) {
  std::vector<Diagnostic> diags;
  try {
    parsed = parse(source);
  } catch (const SyntaxError& e) {
    diags.push_back({path, e.pos.line, e.pos.col, "SyntaxError", e.what()});
    emit_diags(diags, json_mode, false);
    return kExitSyntaxError;
  }
  try {
    resolved = resolve(parsed);
  } catch (const ResolveError& e) {
    diags.push_back(
        {path, e.pos.line, e.pos.col, resolve_kind(e.kind), e.what()});
    emit_diags(diags, json_mode, false);
    return kExitTypeError;
  }
  return kExitOk;
}

// Typecheck every definition; true when all pass.
bool check_defs(const std::string& path, const SourceProgram& parsed,
                const ResolvedProgram& resolved, const CheckOptions& opts,
                std::vector<Diagnostic>& diags) {
  Checker checker(resolved.signature, opts);
  Context empty;
  bool ok = true;
  for (std::size_t i = 0; i < resolved.defs.size(); ++i) {
    const ResolvedDef& d = resolved.defs[i];
    Pos pos = parsed.definitions[i].pos;
    try {
      switch (d.kind) {
        case DefKind::Value:
          if (d.vtype_ascription) {
            checker.check_vtype(empty, d.vtype_ascription);
            checker.check_value(empty, std::get<ValuePtr>(d.body),
                                d.vtype_ascription);
          } else {
            checker.infer_value(empty, std::get<ValuePtr>(d.body));
          }
          break;
        case DefKind::Comp:
          if (d.ctype_ascription) {
            checker.check_ctype(empty, d.ctype_ascription);
            checker.check_computation(empty, std::get<CompPtr>(d.body),
                                      d.ctype_ascription);
          } else {
            checker.infer_computation(empty, std::get<CompPtr>(d.body));
          }
          break;
        case DefKind::VTypeDef:
          checker.check_vtype(empty, std::get<VTypePtr>(d.body));
          break;
        case DefKind::CTypeDef:
          checker.check_ctype(empty, std::get<CTypePtr>(d.body));
          break;
        case DefKind::Surface:
          break;  // surface programs are typed through their translations
      }
    } catch (const TypeError& e) {
      diags.push_back(
          {path, pos.line, pos.col, to_string(e.kind),
           "in definition '" + d.name + "': " + e.what()});
      ok = false;
    } catch (const FuelExhaustedError& e) {
      diags.push_back({path, pos.line, pos.col, "FuelExhausted",
                       "in definition '" + d.name + "': " + e.what()});
      ok = false;
    }
  }
  return ok;
}

int cmd_check(const std::string& path, const CommonFlags& flags) {
  std::string source;
  if (!read_file(path, source)) {
    std::cerr << "cannot read " << path << "\n";
    return kExitIo;
  }
  SourceProgram parsed;
  ResolvedProgram resolved;
  if (int rc = load_program(path, source, flags.json_out, parsed, resolved))
    return rc;
  std::vector<Diagnostic> diags;
  bool ok = check_defs(path, parsed, resolved, make_options(flags), diags);
  emit_diags(diags, flags.json_out, ok);
  return ok ? kExitOk : kExitTypeError;
}

std::string output_word(const std::vector<std::string>& out) {
  std::string s;
  for (const auto& letter : out) s += letter;
  return s;
}

json config_json(const Configuration& c) {
  return {{"comp", pretty(c.comp)},
          {"out", output_word(c.output)},
          {"state", c.store}};
}

std::size_t stack_depth(const StackPtr& k) {
  std::size_t n = 0;
  const Stack* cur = k.get();
  while (true) {
    if (std::holds_alternative<SNil>(cur->node)) return n;
    ++n;
    if (const auto* f = std::get_if<SToFrame>(&cur->node))
      cur = f->rest.get();
    else if (const auto* f = std::get_if<SProjFrame>(&cur->node))
      cur = f->rest.get();
    else
      cur = std::get<SArgFrame>(cur->node).rest.get();
  }
}

int cmd_run(const std::string& path, const CommonFlags& flags,
            bool all_branches, bool trace, bool unsafe) {
  std::string source;
  if (!read_file(path, source)) {
    std::cerr << "cannot read " << path << "\n";
    return kExitIo;
  }
  SourceProgram parsed;
  ResolvedProgram resolved;
  if (int rc = load_program(path, source, flags.json_out, parsed, resolved))
    return rc;
  if (!unsafe) {
    std::vector<Diagnostic> diags;
    if (!check_defs(path, parsed, resolved, make_options(flags), diags)) {
      emit_diags(diags, flags.json_out, false);
      return kExitTypeError;
    }
  }
  const ResolvedDef* main_def = resolved.find("main");
  if (!main_def || main_def->kind != DefKind::Comp) {
    std::vector<Diagnostic> diags;
    diags.push_back({path, 1, 1, "Mismatch",
                     "run needs a computation definition named 'main'"});
    emit_diags(diags, flags.json_out, false);
    return kExitTypeError;
  }
  CompPtr program = eliminate_complex_values(std::get<CompPtr>(main_def->body));
  Machine machine(resolved.signature);
  Configuration start = machine.initial(program);

  json jout;
  if (all_branches) {
    auto leaves = machine.run_all(start, flags.fuel);
    bool any_exhausted = false, any_error = false;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      const auto& leaf = leaves[i];
      any_exhausted = any_exhausted || leaf.exhausted;
      any_error = any_error ||
                  std::holds_alternative<CError>(leaf.config.comp->node);
      if (flags.json_out) {
        json j = config_json(leaf.config);
        j["steps"] = leaf.steps;
        j["exhausted"] = leaf.exhausted;
        jout["leaves"].push_back(j);
      } else {
        std::cout << "leaf " << i << ": " << pretty(leaf.config.comp)
                  << "  |  out=\"" << output_word(leaf.config.output)
                  << "\"  |  state=" << leaf.config.store
                  << "  |  steps=" << leaf.steps
                  << (leaf.exhausted ? "  |  fuel exhausted" : "") << "\n";
      }
    }
    if (flags.json_out) std::cout << jout.dump() << "\n";
    if (any_exhausted) return kExitFuel;
    return any_error ? kExitErrorHalt : kExitOk;
  }

  // Single scheduled run, optionally traced.
  if (trace) {
    Configuration c = start;
    std::mt19937_64 rng(flags.seed);
    unsigned long long steps = 0;
    json jtrace = json::array();
    auto emit_step = [&](const Configuration& cfg) {
      if (flags.json_out) {
        json j = config_json(cfg);
        j["step"] = steps;
        j["stack"] = stack_depth(cfg.stack);
        jtrace.push_back(j);
      } else {
        std::cout << steps << "  " << pretty(cfg.comp) << "  |  "
                  << stack_depth(cfg.stack) << "  |  out=\""
                  << output_word(cfg.output) << "\"  |  state=" << cfg.store
                  << "\n";
      }
    };
    bool exhausted = false;
    while (true) {
      emit_step(c);
      StepOutcome out = machine.step(c);
      if (std::holds_alternative<Terminal>(out)) break;
      if (steps >= flags.fuel) {
        exhausted = true;
        break;
      }
      auto& succ = std::get<std::vector<Configuration>>(out);
      ++steps;
      if (succ.size() == 1) {
        c = std::move(succ.front());
      } else {
        std::uniform_int_distribution<std::size_t> pick(0, succ.size() - 1);
        c = std::move(succ[pick(rng)]);
      }
    }
    if (flags.json_out) {
      jout["trace"] = jtrace;
      json j = config_json(c);
      j["steps"] = steps;
      j["exhausted"] = exhausted;
      jout["result"] = j;
      std::cout << jout.dump() << "\n";
    } else {
      std::cout << "terminal: " << pretty(c.comp) << "\nout=\""
                << output_word(c.output) << "\"\nstate=" << c.store
                << "\nsteps=" << steps << "\n";
    }
    if (exhausted) return kExitFuel;
    return std::holds_alternative<CError>(c.comp->node) ? kExitErrorHalt
                                                        : kExitOk;
  }

  Machine::RunResult result = machine.run(start, flags.fuel, flags.seed);
  if (flags.json_out) {
    json j = config_json(result.config);
    j["steps"] = result.steps;
    j["exhausted"] = result.exhausted;
    std::cout << json{{"result", j}}.dump() << "\n";
  } else {
    std::cout << "terminal: " << pretty(result.config.comp) << "\nout=\""
              << output_word(result.config.output)
              << "\"\nstate=" << result.config.store
              << "\nsteps=" << result.steps << "\n";
    if (result.exhausted) std::cout << "fuel exhausted\n";
  }
  if (result.exhausted) return kExitFuel;
  return std::holds_alternative<CError>(result.config.comp->node)
             ? kExitErrorHalt
             : kExitOk;
}

std::string signature_header(const EffectSignature& sig) {
  std::vector<std::string> items;
  if (sig.print) {
    std::string s = "print [";
    for (std::size_t i = 0; i < sig.alphabet.size(); ++i)
      s += (i ? ", \"" : "\"") + sig.alphabet[i] + "\"";
    items.push_back(s + "]");
  }
  if (sig.state) {
    std::string s = "state {";
    for (std::size_t i = 0; i < sig.states.size(); ++i)
      s += (i ? ", " : "") + sig.states[i];
    items.push_back(s + "} init " + sig.initial_state);
  }
  if (sig.error) {
    std::string s = "errors {";
    for (std::size_t i = 0; i < sig.errors.size(); ++i)
      s += (i ? ", " : "") + sig.errors[i];
    items.push_back(s + "}");
  }
  if (sig.choose) items.push_back("choose");
  if (sig.diverge) items.push_back("diverge");
  if (sig.rec) items.push_back("rec");
  if (items.empty()) return "";
  std::string out = "effects { ";
  for (std::size_t i = 0; i < items.size(); ++i)
    out += (i ? "; " : "") + items[i];
  return out + " }\n";
}

int cmd_translate(const std::string& path, const CommonFlags& flags,
                  const std::string& direction_name,
                  const std::string& strength_name,
                  const std::string& out_path) {
  std::string source;
  if (!read_file(path, source)) {
    std::cerr << "cannot read " << path << "\n";
    return kExitIo;
  }
  SourceProgram parsed;
  ResolvedProgram resolved;
  if (int rc = load_program(path, source, flags.json_out, parsed, resolved))
    return rc;
  Direction direction =
      direction_name == "cbn" ? Direction::CBN : Direction::CBV;
  Strength strength =
      strength_name == "weak" ? Strength::Weak : Strength::Dependent;

  std::ostringstream emitted;
  emitted << signature_header(resolved.signature);
  json jdefs = json::array();
  for (const auto& d : resolved.defs) {
    if (d.kind != DefKind::Surface) continue;
    const auto& term = std::get<surface::TermPtr>(d.body);
    CompPtr core = direction == Direction::CBV ? cbv_translate_term(term)
                                               : cbn_translate_term(term);
    std::string type_text;
    if (d.surface_ascription) {
      if (direction == Direction::CBV)
        type_text = pretty(t_f(cbv_translate_type(d.surface_ascription)));
      else
        type_text = pretty(cbn_translate_type(d.surface_ascription));
    }
    emitted << "comp " << d.name;
    if (!type_text.empty()) emitted << " : " << type_text;
    emitted << " = " << pretty(core) << "\n";
  }
  std::string text = emitted.str();

  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "cannot write " << out_path << "\n";
      return kExitIo;
    }
    out << text;
  } else if (!flags.json_out) {
    std::cout << text;
  }

  // Re-check the emitted program in the discipline-appropriate mode: by
  // value always needs dependent Kleisli extensions; by name with weak
  // eliminations stays in minus mode.
  Mode expected_mode = (direction == Direction::CBN &&
                        strength == Strength::Weak)
                           ? Mode::Minus
                           : Mode::Plus;
  CommonFlags recheck = flags;
  recheck.mode = expected_mode == Mode::Plus ? "plus" : "minus";
  SourceProgram reparsed;
  ResolvedProgram reresolved;
  std::vector<Diagnostic> diags;
  int rc = load_program(out_path.empty() ? path : out_path, text,
                        flags.json_out, reparsed, reresolved);
  bool ok = rc == kExitOk &&
            check_defs(path, reparsed, reresolved, make_options(recheck),
                       diags);
  if (flags.json_out) {
    json out;
    out["ok"] = ok;
    out["mode"] = recheck.mode;
    out["emitted"] = text;
    out["definitions"] = jdefs;
    std::cout << out.dump() << "\n";
  } else {
    std::cerr << (ok ? "accepted" : "rejected") << " in " << recheck.mode
              << " mode\n";
    for (const auto& d : diags)
      std::cerr << d.file << ":" << d.line << ":" << d.col << ": error["
                << d.kind << "]: " << d.message << "\n";
  }
  return ok ? kExitOk : kExitTypeError;
}

int cmd_fmt(const std::string& path, const CommonFlags& flags) {
  std::string source;
  if (!read_file(path, source)) {
    std::cerr << "cannot read " << path << "\n";
    return kExitIo;
  }
  SourceProgram parsed;
  ResolvedProgram resolved;
  if (int rc = load_program(path, source, flags.json_out, parsed, resolved))
    return rc;
  std::ostringstream out;
  out << signature_header(resolved.signature);
  for (const auto& d : resolved.defs) {
    switch (d.kind) {
      case DefKind::Value:
        out << "val " << d.name;
        if (d.vtype_ascription) out << " : " << pretty(d.vtype_ascription);
        out << " = " << pretty(std::get<ValuePtr>(d.body)) << "\n";
        break;
      case DefKind::Comp:
        out << "comp " << d.name;
        if (d.ctype_ascription) out << " : " << pretty(d.ctype_ascription);
        out << " = " << pretty(std::get<CompPtr>(d.body)) << "\n";
        break;
      case DefKind::VTypeDef:
        out << "vtype " << d.name << " = "
            << pretty(std::get<VTypePtr>(d.body)) << "\n";
        break;
      case DefKind::CTypeDef:
        out << "ctype " << d.name << " = "
            << pretty(std::get<CTypePtr>(d.body)) << "\n";
        break;
      case DefKind::Surface:
        out << "surface " << d.name;
        if (d.surface_ascription)
          out << " : " << pretty(d.surface_ascription);
        out << " = " << pretty(std::get<surface::TermPtr>(d.body)) << "\n";
        break;
    }
  }
  std::cout << out.str();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dcbpv: a dependently typed call-by-push-value kernel"};
  app.require_subcommand(1);

  CommonFlags flags;
  if (const char* env = std::getenv("DCBPV_FUEL"))
    flags.fuel = std::strtoull(env, nullptr, 10);

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--mode", flags.mode, "typing mode")
        ->check(CLI::IsMember({"minus", "plus"}));
    cmd->add_option("--subtyping", flags.subtyping,
                    "effect subtyping (plus mode only)")
        ->check(CLI::IsMember({"on", "off"}));
    cmd->add_option("--fuel", flags.fuel, "rewrite/step budget");
    cmd->add_option("--seed", flags.seed, "scheduler seed");
    cmd->add_flag("--eta-id", flags.eta_id,
                  "enable identity eta (semi-decision; may not terminate)");
    auto* mu = cmd->add_option("--mu-unfold", flags.mu_unfold_set,
                               "fixpoint unfoldings tried by conversion");
    mu->each([&](const std::string&) { flags.mu_unfold_given = true; });
    cmd->add_flag("--json", flags.json_out, "machine-readable output");
  };

  std::string file;
  bool all_branches = false, trace = false, unsafe = false;
  std::string direction = "cbv", strength = "dependent", out_path;

  CLI::App* check = app.add_subcommand("check", "typecheck a program");
  check->add_option("file", file, "input .dcbpv file")->required();
  add_common(check);

  CLI::App* run = app.add_subcommand("run", "evaluate a program");
  run->add_option("file", file, "input .dcbpv file")->required();
  add_common(run);
  run->add_flag("--all-branches", all_branches,
                "explore every erratic choice");
  run->add_flag("--trace", trace, "print each machine step");
  run->add_flag("--unsafe", unsafe, "skip typechecking before running");

  CLI::App* translate =
      app.add_subcommand("translate", "translate surface definitions");
  translate->add_option("file", file, "input .dcbpv file")->required();
  add_common(translate);
  translate->add_option("--direction", direction, "cbv or cbn")
      ->check(CLI::IsMember({"cbv", "cbn"}));
  translate->add_option("--strength", strength, "elimination strength")
      ->check(CLI::IsMember({"weak", "dependent"}));
  translate->add_option("-o,--output", out_path, "write the core program here");

  CLI::App* fmt = app.add_subcommand("fmt", "parse and pretty-print");
  fmt->add_option("file", file, "input .dcbpv file")->required();
  add_common(fmt);

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) return cmd_check(file, flags);
    if (run->parsed())
      return cmd_run(file, flags, all_branches, trace, unsafe);
    if (translate->parsed())
      return cmd_translate(file, flags, direction, strength, out_path);
    if (fmt->parsed()) return cmd_fmt(file, flags);
  } catch (const MachineError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitTypeError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}
