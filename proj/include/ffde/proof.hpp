// Natural-deduction proof trees and their checker.
//
// A derivation is a tree of rule applications.  Checking walks the tree,
// tracking open hypotheses per label, and produces the proved sequent:
// the set of hypotheses still open at the root together with the root
// conclusion.  Rules that discharge hypotheses cite a single label; the
// label may cover several formula occurrences, and discharging a label
// that is not open is allowed (vacuous discharge).
//
// Quantifier rules that introduce an eigenconstant carry it explicitly and
// are subject to freshness conditions; hypothesis-citing rules name the
// formulas they may discharge, and anything else under the cited label is
// an error.  Two checking modes exist: strict mode limits the rewrite
// templates of the identity rules to the shapes that are sound in general,
// while permissive mode also admits definedness templates (useful for
// exhibiting why those templates are rejected by default).
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ffde/syntax.hpp"

namespace ffde {

enum class Rule {
  Hyp,
  AndI,
  AndE_L,
  AndE_R,
  OrI_L,
  OrI_R,
  OrE,
  NegAndI_L,
  NegAndI_R,
  NegAndE,
  NegOrI,
  NegOrE_L,
  NegOrE_R,
  DNI,
  DNE,
  DefI,
  PEX_D,
  PEM_D,
  AllI_D,
  AllE_D,
  ExI_D,
  ExE_D,
  NegAllI_D,
  NegAllE_D,
  NegExI_D,
  NegExE_D,
  EqI,
  EqE,
  NeqI,
  ImpI,
  ImpE,
  NegImpI,
  NegImpE_L,
  NegImpE_R,
};

const char* rule_name(Rule r);
std::optional<Rule> rule_from_name(const std::string& name);

enum class CheckMode { Strict, Permissive };

struct Derivation;
using DerivationPtr = std::shared_ptr<const Derivation>;

// Immutable node.  Premise subtrees may be shared (the checker treats the
// structure as a tree, so shared hypotheses merge by label and formula).
struct Derivation {
  Rule rule = Rule::Hyp;
  FormulaPtr conclusion;
  std::vector<DerivationPtr> premises;

  // Rule-specific attributes; the checker rejects attributes a rule does
  // not use as well as missing required ones.
  int label = 0;                 // Hyp: hypothesis label (>= 1)
  std::optional<int> discharge;  // OrE, NegAndE, ImpI, AllI_D, ExE_D, NegAllE_D, NegExI_D
  FormulaPtr tmpl;               // EqE, NeqI: rewrite template A with
  std::string var;               //   free variable var
  std::string eigen;             // AllI_D, ExE_D, NegAllE_D, NegExI_D: eigenconstant
  std::optional<int> index;      // DefI: 1-based argument position
};

DerivationPtr hyp(FormulaPtr conclusion, int label);
DerivationPtr node(Rule rule, FormulaPtr conclusion, std::vector<DerivationPtr> premises);

struct CheckError {
  std::string kind;  // RuleMismatch | TemplateViolation | DischargeViolation |
                     // FreshnessViolation | ModeViolation | PreconditionViolation
  std::string path;  // node position, e.g. "premises[1].premises[0]" ("" = root)
  std::string message;
};

class ProofError : public std::runtime_error {
 public:
  explicit ProofError(CheckError e)
      : std::runtime_error(e.kind + " at '" + e.path + "': " + e.message), error_(std::move(e)) {}
  const CheckError& error() const { return error_; }

 private:
  CheckError error_;
};

// {"error": {"kind": ..., "path": ..., "message": ...}}
std::string check_error_to_json(const CheckError& e);

struct CheckedSequent {
  FormulaSet assumptions;  // open hypotheses at the root, across all labels
  FormulaPtr conclusion;
};

// "A1, A2 ⊢ C" with assumptions in canonical formula order.
std::string render_sequent(const CheckedSequent& s);

// Validates the tree and returns the proved sequent; throws ProofError at
// the first defect.  Every node's conclusion must be a sentence over sig.
CheckedSequent check(const Signature& sig, const DerivationPtr& d, CheckMode mode);

// ---------------------------------------------------------------------------
// Derived rules.  Each builder returns a tree of primitive rules that checks
// in strict mode and proves exactly the advertised sequent.

// { A(c1/x), c1 = c2 } |- A(c2/x) for an arbitrary template A whose free
// variables are at most {var}.  Implication templates need an FN4 signature.
DerivationPtr gen_eq_e(const Signature& sig, const FormulaPtr& tmpl, const std::string& var,
                       const Term& c1, const Term& c2);

// { A(c1/x), ~A(c2/x) } |- ~(c1 = c2) for templates in which var is free in
// every subformula and no subformula is an implication or a definedness
// claim (either would make the schema unsound).
DerivationPtr gen_neq_i(const Signature& sig, const FormulaPtr& tmpl, const std::string& var,
                        const Term& c1, const Term& c2);

// { ~(c2 = c1) } |- ~(c1 = c2).
DerivationPtr sym_neq(const Signature& sig, const Term& c1, const Term& c2);

// ---------------------------------------------------------------------------
// JSON.  A node is {"rule": ..., "conclusion": ..., "premises": [...]} plus
// "label" for Hyp and an "attrs" object for rule attributes ("discharge",
// "template", "var", "eigen", "index").  Formulas are strings.
DerivationPtr proof_from_json(const Signature& sig, const std::string& json_text);
std::string proof_to_json(const DerivationPtr& d);

}  // namespace ffde
