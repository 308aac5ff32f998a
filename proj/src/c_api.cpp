#include "ffde/ffde.h"

#include <cctype>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <set>
#include <string>
#include <vector>

#include "ffde/kripke.hpp"
#include "ffde/oracle.hpp"
#include "ffde/proof.hpp"
#include "ffde/search.hpp"
#include "ffde/syntax.hpp"
#include "ffde/valuation.hpp"
#include "json.hpp"

struct ffde_signature {
  ffde::Signature sig;
};
struct ffde_model {
  ffde::KripkeModel model;
};
struct ffde_formula {
  ffde::FormulaPtr f;
};
struct ffde_proof {
  ffde::DerivationPtr d;
};

namespace {

using json = nlohmann::json;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) std::abort();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void set_error(char** error_json, const std::string& kind, const std::string& message,
               const std::string& path = "") {
  if (!error_json) return;
  json err = {{"kind", kind}, {"message", message}};
  if (!path.empty()) err["path"] = path;
  *error_json = dup_string(json{{"error", err}}.dump(2) + "\n");
}

// Runs the body, translating exceptions to statuses and error JSON.
template <typename Fn>
ffde_status guarded(char** error_json, Fn&& fn) {
  if (error_json) *error_json = nullptr;
  try {
    return fn();
  } catch (const ffde::ProofError& e) {
    set_error(error_json, e.error().kind, e.error().message, e.error().path);
    return FFDE_ERROR_PROOF;
  } catch (const ffde::ParseError& e) {
    set_error(error_json, "parse", e.what());
    return FFDE_ERROR_PARSE;
  } catch (const ffde::InvalidArgument& e) {
    set_error(error_json, "argument", e.what());
    return FFDE_ERROR_ARGUMENT;
  } catch (const std::exception& e) {
    set_error(error_json, "internal", e.what());
    return FFDE_ERROR_INTERNAL;
  }
}

ffde_status require(bool cond, char** error_json, const char* what) {
  if (cond) return FFDE_OK;
  set_error(error_json, "argument", std::string("missing required argument: ") + what);
  return FFDE_ERROR_ARGUMENT;
}

}  // namespace

extern "C" {

const char* ffde_version(void) { return "1.0.0"; }

void ffde_string_free(char* s) { std::free(s); }

ffde_status ffde_signature_parse(const char* json_text, ffde_signature** out,
                                 char** error_json) {
  if (auto st = require(json_text && out, error_json, "json_text/out")) return st;
  return guarded(error_json, [&] {
    auto* h = new ffde_signature{ffde::signature_from_json(json_text)};
    *out = h;
    return FFDE_OK;
  });
}

ffde_status ffde_signature_set_logic(ffde_signature* sig, const char* logic,
                                     char** error_json) {
  if (auto st = require(sig && logic, error_json, "sig/logic")) return st;
  return guarded(error_json, [&]() -> ffde_status {
    const std::string l = logic;
    if (l == "ffde")
      sig->sig.logic = ffde::Logic::FFDE;
    else if (l == "fn4")
      sig->sig.logic = ffde::Logic::FN4;
    else
      throw ffde::InvalidArgument("logic must be 'ffde' or 'fn4', got '" + l + "'");
    return FFDE_OK;
  });
}

void ffde_signature_free(ffde_signature* sig) { delete sig; }

ffde_status ffde_formula_parse(const ffde_signature* sig, const char* text,
                               ffde_formula** out, char** error_json) {
  if (auto st = require(sig && text && out, error_json, "sig/text/out")) return st;
  return guarded(error_json, [&] {
    *out = new ffde_formula{ffde::parse_formula(sig->sig, text)};
    return FFDE_OK;
  });
}

ffde_status ffde_formula_render(const ffde_formula* f, char** out) {
  if (!f || !out) return FFDE_ERROR_ARGUMENT;
  *out = dup_string(ffde::render(f->f));
  return FFDE_OK;
}

void ffde_formula_free(ffde_formula* f) { delete f; }

ffde_status ffde_model_parse(const ffde_signature* sig, const char* json_text,
                             ffde_model** out, char** error_json) {
  if (auto st = require(sig && json_text && out, error_json, "sig/json_text/out")) return st;
  return guarded(error_json, [&] {
    *out = new ffde_model{ffde::model_from_json(sig->sig, json_text)};
    return FFDE_OK;
  });
}

ffde_status ffde_model_to_json(const ffde_model* m, char** out) {
  if (!m || !out) return FFDE_ERROR_ARGUMENT;
  *out = dup_string(ffde::model_to_json(m->model));
  return FFDE_OK;
}

ffde_status ffde_model_validate(const ffde_signature* sig, const ffde_model* m,
                                int persistence_safe, int* ok, char** report_json) {
  if (!sig || !m || !ok || !report_json) return FFDE_ERROR_ARGUMENT;
  return guarded(nullptr, [&] {
    ffde::KripkeModel copy = m->model;
    copy.persistence_safe = persistence_safe != 0;
    const ffde::ValidationReport rep = ffde::validate(sig->sig, copy);
    *ok = rep.ok() ? 1 : 0;
    *report_json = dup_string(ffde::report_to_json(rep));
    return FFDE_OK;
  });
}

ffde_status ffde_model_saturate(const ffde_signature* sig, const ffde_model* m,
                                ffde_model** out, char** error_json) {
  if (auto st = require(sig && m && out, error_json, "sig/model/out")) return st;
  return guarded(error_json, [&] {
    *out = new ffde_model{ffde::saturate(sig->sig, m->model)};
    return FFDE_OK;
  });
}

void ffde_model_free(ffde_model* m) { delete m; }

ffde_status ffde_eval(const ffde_signature* sig, const ffde_model* m,
                      const ffde_formula* f, const char* stage, int negated,
                      int* value, char** error_json) {
  if (auto st = require(sig && m && f && stage && value, error_json, "sig/model/formula/stage"))
    return st;
  return guarded(error_json, [&] {
    const bool v = negated ? ffde::eval_neg(sig->sig, m->model, f->f, stage)
                           : ffde::eval(sig->sig, m->model, f->f, stage);
    *value = v ? 1 : 0;
    return FFDE_OK;
  });
}

ffde_status ffde_four_valued(const ffde_signature* sig, const ffde_model* m,
                             const ffde_formula* f, const char* stage,
                             char** value_name, char** error_json) {
  if (auto st = require(sig && m && f && stage && value_name, error_json,
                        "sig/model/formula/stage"))
    return st;
  return guarded(error_json, [&] {
    const ffde::FourValue v = ffde::four_valued(sig->sig, m->model, f->f, stage);
    *value_name = dup_string(ffde::four_value_name(v));
    return FFDE_OK;
  });
}

ffde_status ffde_proof_parse(const ffde_signature* sig, const char* json_text,
                             ffde_proof** out, char** error_json) {
  if (auto st = require(sig && json_text && out, error_json, "sig/json_text/out")) return st;
  return guarded(error_json, [&] {
    *out = new ffde_proof{ffde::proof_from_json(sig->sig, json_text)};
    return FFDE_OK;
  });
}

ffde_status ffde_proof_to_json(const ffde_proof* p, char** out) {
  if (!p || !out) return FFDE_ERROR_ARGUMENT;
  *out = dup_string(ffde::proof_to_json(p->d));
  return FFDE_OK;
}

ffde_status ffde_proof_check(const ffde_signature* sig, const ffde_proof* p,
                             int permissive, char** sequent, char** error_json) {
  if (auto st = require(sig && p && sequent, error_json, "sig/proof/sequent")) return st;
  return guarded(error_json, [&] {
    const ffde::CheckedSequent seq = ffde::check(
        sig->sig, p->d, permissive ? ffde::CheckMode::Permissive : ffde::CheckMode::Strict);
    *sequent = dup_string(ffde::render_sequent(seq));
    return FFDE_OK;
  });
}

ffde_status ffde_proof_check_with_premises(const ffde_signature* sig,
                                           const ffde_proof* p, int permissive,
                                           const char* const* premises,
                                           size_t premise_count, char** sequent,
                                           char** error_json) {
  if (auto st = require(sig && p && sequent && (premises || premise_count == 0), error_json,
                        "sig/proof/sequent"))
    return st;
  return guarded(error_json, [&] {
    ffde::FormulaSet allowed;
    for (size_t i = 0; i < premise_count; ++i)
      allowed.insert(ffde::parse_formula(sig->sig, premises[i]));
    const ffde::CheckedSequent seq = ffde::check(
        sig->sig, p->d, permissive ? ffde::CheckMode::Permissive : ffde::CheckMode::Strict);
    for (const auto& a : seq.assumptions)
      if (!allowed.count(a))
        throw ffde::ProofError(ffde::CheckError{
            "open-assumptions", "",
            "assumption '" + ffde::render(a) + "' is not among the allowed premises"});
    *sequent = dup_string(ffde::render_sequent(seq));
    return FFDE_OK;
  });
}

void ffde_proof_free(ffde_proof* p) { delete p; }

ffde_status ffde_decide(const ffde_signature* sig, const char* const* premises,
                        size_t premise_count, const char* goal, int max_stages,
                        int max_elements, int persistence_safe, int* found,
                        char** verdict_json, char** error_json) {
  if (auto st = require(sig && goal && found && verdict_json && (premises || premise_count == 0),
                        error_json, "sig/goal/found/verdict_json"))
    return st;
  return guarded(error_json, [&] {
    std::vector<ffde::FormulaPtr> gamma;
    for (size_t i = 0; i < premise_count; ++i)
      gamma.push_back(ffde::parse_formula(sig->sig, premises[i]));
    const ffde::FormulaPtr g = ffde::parse_formula(sig->sig, goal);
    ffde::Bounds b;
    b.max_stages = max_stages;
    b.max_elements = max_elements;
    b.persistence_safe = persistence_safe != 0;
    const ffde::SearchVerdict v = ffde::find_countermodel(sig->sig, gamma, g, b);
    *found = v.found ? 1 : 0;
    *verdict_json = dup_string(ffde::verdict_to_json(v));
    return FFDE_OK;
  });
}

ffde_status ffde_fuzz(const ffde_signature* sig, int iterations, uint64_t seed,
                      int max_stages, int max_elements, int persistence_safe,
                      int permissive, int max_depth, int* violation_count,
                      char** report_json, char** error_json) {
  if (auto st = require(sig && violation_count && report_json, error_json,
                        "sig/violation_count/report_json"))
    return st;
  return guarded(error_json, [&]() -> ffde_status {
    if (iterations < 0) throw ffde::InvalidArgument("fuzz: iterations must be non-negative");
    ffde::FuzzOptions opts;
    opts.iterations = iterations;
    opts.seed = seed;
    opts.bounds.max_stages = max_stages;
    opts.bounds.max_elements = max_elements;
    opts.bounds.persistence_safe = persistence_safe != 0;
    opts.mode = permissive ? ffde::CheckMode::Permissive : ffde::CheckMode::Strict;
    opts.max_depth = max_depth;
    const ffde::FuzzReport rep = ffde::fuzz_soundness(sig->sig, opts);
    json violations = json::array();
    const std::string lines = ffde::fuzz_report_to_json(rep);
    size_t pos = 0;
    while (pos < lines.size()) {
      const size_t nl = lines.find('\n', pos);
      violations.push_back(json::parse(lines.substr(pos, nl - pos)));
      pos = nl + 1;
    }
    const json out = {{"trees", rep.trees},
                      {"accepted", rep.accepted},
                      {"rejected", rep.rejected},
                      {"unique_sequents", rep.unique_sequents},
                      {"models_checked", rep.models_checked},
                      {"violations", violations}};
    *violation_count = static_cast<int>(rep.violations.size());
    *report_json = dup_string(out.dump(2) + "\n");
    return FFDE_OK;
  });
}

ffde_status ffde_oracle(const char* const* premises, size_t premise_count,
                        const char* goal, int* valid, char** verdict_json,
                        char** error_json) {
  if (auto st = require(goal && valid && verdict_json && (premises || premise_count == 0),
                        error_json, "goal/valid/verdict_json"))
    return st;
  return guarded(error_json, [&] {
    // Atoms are whatever identifiers appear; collect them with a permissive
    // lexical scan, then parse properly against the resulting signature.
    auto scan = [](const std::string& text, std::set<std::string>& atoms) {
      size_t i = 0;
      while (i < text.size()) {
        if (std::isalpha(static_cast<unsigned char>(text[i])) || text[i] == '_') {
          size_t j = i;
          while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) ||
                                     text[j] == '_'))
            ++j;
          const std::string word = text.substr(i, j - i);
          if (word != "forall" && word != "exists" && word != "D") atoms.insert(word);
          i = j;
        } else {
          ++i;
        }
      }
    };
    std::set<std::string> atoms;
    scan(goal, atoms);
    for (size_t i = 0; i < premise_count; ++i) scan(premises[i], atoms);
    ffde::Signature sig;
    sig.logic = ffde::Logic::FFDE;
    for (const auto& a : atoms) sig.predicates[a] = 0;

    std::vector<ffde::FormulaPtr> gamma;
    for (size_t i = 0; i < premise_count; ++i)
      gamma.push_back(ffde::parse_formula(sig, premises[i]));
    const ffde::FormulaPtr g = ffde::parse_formula(sig, goal);
    const ffde::OracleVerdict v = ffde::fde_consequence(gamma, g);
    *valid = v.valid ? 1 : 0;
    json out = {{"valid", v.valid}, {"assignments_checked", v.assignments_checked}};
    if (v.witness) {
      json w = json::object();
      for (const auto& [atom, pv] : *v.witness) {
        const char* name = pv.truth ? (pv.falsity ? "B" : "T") : (pv.falsity ? "F" : "N");
        w[atom] = name;
      }
      out["witness"] = w;
    }
    *verdict_json = dup_string(out.dump(2) + "\n");
    return FFDE_OK;
  });
}

}  // extern "C"
