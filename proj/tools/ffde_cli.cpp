// Command-line front end over the ffde C API.
//
// Exit codes: 0 success (clean model / accepted proof / exhausted bounds /
// valid consequence), 1 negative verdict (violations, countermodel, rejected
// proof), 2 malformed input with a machine-readable error JSON on stderr.
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ffde/ffde.h"
#include "json.hpp"

namespace {

using json = nlohmann::json;

struct StringFree {
  void operator()(char* s) const { ffde_string_free(s); }
};
using CStr = std::unique_ptr<char, StringFree>;

struct SigFree {
  void operator()(ffde_signature* s) const { ffde_signature_free(s); }
};
struct ModelFree {
  void operator()(ffde_model* m) const { ffde_model_free(m); }
};
struct FormulaFree {
  void operator()(ffde_formula* f) const { ffde_formula_free(f); }
};
struct ProofFree {
  void operator()(ffde_proof* p) const { ffde_proof_free(p); }
};
using Sig = std::unique_ptr<ffde_signature, SigFree>;
using Model = std::unique_ptr<ffde_model, ModelFree>;
using Formula = std::unique_ptr<ffde_formula, FormulaFree>;
using Proof = std::unique_ptr<ffde_proof, ProofFree>;

bool color_enabled() {
  const char* env = std::getenv("FFDE_COLOR");
  if (env && std::string(env) == "0") return false;
  return isatty(fileno(stderr));
}

[[noreturn]] void die(const std::string& error_json) {
  if (color_enabled()) std::fputs("\x1b[31merror\x1b[0m\n", stderr);
  std::fputs(error_json.c_str(), stderr);
  if (error_json.empty() || error_json.back() != '\n') std::fputc('\n', stderr);
  std::exit(2);
}

[[noreturn]] void die_kind(const std::string& kind, const std::string& message) {
  die(json{{"error", {{"kind", kind}, {"message", message}}}}.dump(2));
}

// Wraps a C API call: on failure, exits 2 with the error JSON.
void must(ffde_status st, char* error_json) {
  CStr err(error_json);
  if (st == FFDE_OK) return;
  die(err ? err.get() : "{\"error\": {\"kind\": \"internal\", \"message\": \"unknown\"}}");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) die_kind("io", "cannot read file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) die_kind("io", "cannot write file '" + path + "'");
  out << content;
}

// A gamma/premises file is a JSON array of formula strings.
std::vector<std::string> read_formula_list(const std::string& path) {
  const std::string text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    die_kind("parse", "formula list '" + path + "': " + e.what());
  }
  if (!j.is_array()) die_kind("parse", "formula list '" + path + "' must be a JSON array");
  std::vector<std::string> out;
  for (const auto& item : j) {
    if (!item.is_string())
      die_kind("parse", "formula list '" + path + "' must contain only strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

Sig load_signature(const std::string& path, const std::string& logic_override) {
  ffde_signature* raw = nullptr;
  char* err = nullptr;
  const ffde_status call_status = ffde_signature_parse(read_file(path).c_str(), &raw, &err);
    must(call_status, err);
  Sig sig(raw);
  if (!logic_override.empty()) {
    err = nullptr;
    const ffde_status call_status = ffde_signature_set_logic(sig.get(), logic_override.c_str(), &err);
    must(call_status, err);
  }
  return sig;
}

Model load_model(const Sig& sig, const std::string& path) {
  ffde_model* raw = nullptr;
  char* err = nullptr;
  const ffde_status call_status = ffde_model_parse(sig.get(), read_file(path).c_str(), &raw, &err);
    must(call_status, err);
  return Model(raw);
}

std::vector<const char*> c_view(const std::vector<std::string>& v) {
  std::vector<const char*> out;
  for (const auto& s : v) out.push_back(s.c_str());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model validator, evaluator, proof checker, and countermodel "
               "search for quantified four-valued logics"};
  app.require_subcommand(1);

  std::string sig_path, model_path, proof_path, premises_path, gamma_path, out_path;
  std::string stage, formula_text, goal_text, mode = "strict", logic_override;
  bool four = false, no_persistence_safe = false;
  int stages = 2, elems = 2, iterations = 100, depth = 5;
  std::uint64_t seed = 0;

  auto* vm = app.add_subcommand("validate-model", "Check model well-formedness");
  vm->add_option("-s,--signature", sig_path, "Signature JSON file")->required();
  vm->add_option("-m,--model", model_path, "Model JSON file")->required();
  vm->add_flag("--no-persistence-safe", no_persistence_safe,
               "Demote late constant definedness from error to warning");

  auto* ev = app.add_subcommand("eval", "Evaluate a sentence at a stage");
  ev->add_option("-s,--signature", sig_path, "Signature JSON file")->required();
  ev->add_option("-m,--model", model_path, "Model JSON file")->required();
  ev->add_option("-w,--stage", stage, "Stage name")->required();
  ev->add_option("-f,--formula", formula_text, "Sentence to evaluate")->required();
  ev->add_flag("--four", four, "Print the four-valued verdict (T/F/B/N)");

  auto* cp = app.add_subcommand("check-proof", "Check a natural-deduction derivation");
  cp->add_option("-s,--signature", sig_path, "Signature JSON file")->required();
  cp->add_option("-p,--proof", proof_path, "Proof JSON file")->required();
  cp->add_option("--mode", mode, "Checking mode: strict|permissive")
      ->check(CLI::IsMember({"strict", "permissive"}));
  cp->add_option("--premises", premises_path,
                 "JSON array of formulas the open assumptions must come from");

  auto* de = app.add_subcommand("decide", "Search for a countermodel within bounds");
  de->add_option("-s,--signature", sig_path, "Signature JSON file")->required();
  de->add_option("--gamma", gamma_path, "JSON array of premise formulas");
  de->add_option("--goal", goal_text, "Goal sentence")->required();
  de->add_option("--stages", stages, "Maximum number of stages");
  de->add_option("--elems", elems, "Maximum number of elements");
  de->add_option("--logic", logic_override, "Override the signature's logic: ffde|fn4")
      ->check(CLI::IsMember({"ffde", "fn4"}));
  de->add_option("--out", out_path, "Write the countermodel (model JSON) here");
  de->add_flag("--no-persistence-safe", no_persistence_safe,
               "Search models where constants may become defined late");

  auto* fz = app.add_subcommand("fuzz", "Fuzz the proof checker against the semantics");
  fz->add_option("-s,--signature", sig_path, "Signature JSON file")->required();
  fz->add_option("-n,--iterations", iterations, "Number of random derivations");
  fz->add_option("--seed", seed, "RNG seed");
  fz->add_option("--stages", stages, "Maximum number of stages");
  fz->add_option("--elems", elems, "Maximum number of elements");
  fz->add_option("--mode", mode, "Checking mode: strict|permissive")
      ->check(CLI::IsMember({"strict", "permissive"}));
  fz->add_option("--depth", depth, "Maximum derivation depth");
  fz->add_flag("--no-persistence-safe", no_persistence_safe,
               "Search models where constants may become defined late");

  auto* oc = app.add_subcommand("oracle", "Propositional four-valued consequence check");
  oc->add_option("--gamma", gamma_path, "JSON array of premise formulas");
  oc->add_option("--goal", goal_text, "Goal formula")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    die_kind("usage", e.what());
  }

  if (vm->parsed()) {
    Sig sig = load_signature(sig_path, "");
    Model m = load_model(sig, model_path);
    int ok = 0;
    char* report = nullptr;
    const ffde_status call_status = ffde_model_validate(sig.get(), m.get(), no_persistence_safe ? 0 : 1, &ok, &report);
    must(call_status, nullptr);
    CStr rep(report);
    std::fputs(rep.get(), stdout);
    return ok ? 0 : 1;
  }

  if (ev->parsed()) {
    Sig sig = load_signature(sig_path, "");
    Model m = load_model(sig, model_path);
    ffde_formula* raw = nullptr;
    char* err = nullptr;
    const ffde_status call_status = ffde_formula_parse(sig.get(), formula_text.c_str(), &raw, &err);
    must(call_status, err);
    Formula f(raw);
    if (four) {
      char* name = nullptr;
      err = nullptr;
      const ffde_status call_status = ffde_four_valued(sig.get(), m.get(), f.get(), stage.c_str(), &name, &err);
    must(call_status, err);
      CStr n(name);
      std::printf("%s\n", n.get());
    } else {
      int value = 0;
      err = nullptr;
      const ffde_status call_status = ffde_eval(sig.get(), m.get(), f.get(), stage.c_str(), 0, &value, &err);
    must(call_status, err);
      std::printf("%d\n", value);
    }
    return 0;
  }

  if (cp->parsed()) {
    Sig sig = load_signature(sig_path, "");
    ffde_proof* raw = nullptr;
    char* err = nullptr;
    const ffde_status call_status = ffde_proof_parse(sig.get(), read_file(proof_path).c_str(), &raw, &err);
    must(call_status, err);
    Proof proof(raw);
    const int permissive = mode == "permissive" ? 1 : 0;
    char* sequent = nullptr;
    err = nullptr;
    ffde_status st;
    if (premises_path.empty()) {
      st = ffde_proof_check(sig.get(), proof.get(), permissive, &sequent, &err);
    } else {
      const auto premises = read_formula_list(premises_path);
      const auto view = c_view(premises);
      st = ffde_proof_check_with_premises(sig.get(), proof.get(), permissive, view.data(),
                                          view.size(), &sequent, &err);
    }
    CStr seq(sequent);
    CStr error(err);
    if (st == FFDE_OK) {
      std::printf("%s\n", seq.get());
      return 0;
    }
    if (st == FFDE_ERROR_PROOF) {
      std::fputs(error.get(), stdout);
      return 1;
    }
    die(error ? error.get() : "{\"error\": {\"kind\": \"internal\", \"message\": \"unknown\"}}");
  }

  if (de->parsed()) {
    Sig sig = load_signature(sig_path, logic_override);
    std::vector<std::string> gamma;
    if (!gamma_path.empty()) gamma = read_formula_list(gamma_path);
    const auto view = c_view(gamma);
    int found = 0;
    char* verdict = nullptr;
    char* err = nullptr;
    const ffde_status call_status = ffde_decide(sig.get(), view.data(), view.size(), goal_text.c_str(), stages, elems,
                     no_persistence_safe ? 0 : 1, &found, &verdict, &err);
    must(call_status, err);
    CStr v(verdict);
    std::fputs(v.get(), stdout);
    if (found && !out_path.empty()) {
      const json parsed = json::parse(v.get());
      write_file(out_path, parsed.at("model").dump(2) + "\n");
    }
    return found ? 1 : 0;
  }

  if (fz->parsed()) {
    Sig sig = load_signature(sig_path, "");
    int violations = 0;
    char* report = nullptr;
    char* err = nullptr;
    const ffde_status call_status = ffde_fuzz(sig.get(), iterations, seed, stages, elems, no_persistence_safe ? 0 : 1,
                   mode == "permissive" ? 1 : 0, depth, &violations, &report, &err);
    must(call_status, err);
    CStr rep(report);
    std::fputs(rep.get(), stdout);
    return violations ? 1 : 0;
  }

  if (oc->parsed()) {
    std::vector<std::string> gamma;
    if (!gamma_path.empty()) gamma = read_formula_list(gamma_path);
    const auto view = c_view(gamma);
    int valid = 0;
    char* verdict = nullptr;
    char* err = nullptr;
    const ffde_status call_status = ffde_oracle(view.data(), view.size(), goal_text.c_str(), &valid, &verdict, &err);
    must(call_status, err);
    CStr v(verdict);
    std::fputs(v.get(), stdout);
    return valid ? 0 : 1;
  }

  return 2;
}
