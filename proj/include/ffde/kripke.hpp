// Variable-domain Kripke models: representation, validation, diagram, saturation.
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ffde/syntax.hpp"

namespace ffde {

using Tuple = std::vector<std::string>;
using PairSet = std::set<std::pair<std::string, std::string>>;

// Extension/anti-extension of one predicate at one stage.
struct PredInterp {
  std::set<Tuple> pos, neg;
  friend bool operator==(const PredInterp&, const PredInterp&) = default;
};

// A model over a signature. `order` holds generator pairs; the accessibility
// relation is their reflexive-transitive closure. Identity has a positive
// relation (id_pos, an equivalence/congruence when valid) and a negative one
// (id_neg, constrained by the diversity conditions). `persistence_safe`
// additionally demands that a constant undefined at a stage stays undefined at
// every later stage, which is what makes truth of ~D(c) persistent.
struct KripkeModel {
  std::vector<std::string> stages;  // evaluation/reporting order
  PairSet order;                    // generators, closure implicit
  std::map<std::string, std::set<std::string>> domains;            // stage -> elements
  std::map<std::string, std::map<std::string, std::string>> constants;  // const -> stage -> element
  std::map<std::string, std::map<std::string, PredInterp>> predicates;  // pred -> stage -> interp
  std::map<std::string, PairSet> id_pos, id_neg;                   // stage -> pairs
  bool persistence_safe = true;

  const std::set<std::string>& domain(const std::string& stage) const;
  // Interpretation of a constant at a stage; nullopt when undefined.
  std::optional<std::string> constant_at(const std::string& c, const std::string& stage) const;
  std::set<std::string> all_elements() const;

  friend bool operator==(const KripkeModel&, const KripkeModel&) = default;
};

// Reflexive-transitive closure of `order` over `stages`, as explicit pairs
// including the diagonal.
PairSet order_closure_pairs(const KripkeModel& m);
// Same model with `order` replaced by its closure (minus the diagonal, which
// stays implicit). Idempotent; never changes validation outcomes.
KripkeModel order_closure(const KripkeModel& m);

enum class Severity { Error, Warning };

struct Violation {
  std::string code;
  Severity severity = Severity::Error;
  std::string stage;    // offending stage(s), "" when global
  std::string subject;  // constant/predicate/tuple description, "" when none
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const;  // no Error-severity violations
};

// Checks every model condition: structural references, domain growth along the
// order, constant values/rigidity/definedness, extension monotonicity and
// domain membership, id_pos equivalence + congruence, diversity closure of
// id_neg (declared predicates and identity itself), and id monotonicity.
// The definedness-persistence check is an error iff m.persistence_safe.
ValidationReport validate(const Signature& sig, const KripkeModel& m);
std::string report_to_json(const ValidationReport& r);

// Signature and model extended with one diagram constant "@a" per element a,
// interpreted as a at exactly the stages whose domain contains a. Idempotent.
// Throws InvalidArgument if a declared constant collides with a diagram name.
std::pair<Signature, KripkeModel> diagram(const Signature& sig, const KripkeModel& m);

// Least fixpoint extending id_neg so that the diversity conditions (including
// identity's own interaction with id_pos) and monotonicity along the order
// hold. Never touches id_pos; defects there are validate's to report.
KripkeModel saturate(const Signature& sig, const KripkeModel& m);

// Model JSON. Reading validates names/stages/arities against the signature and
// sig-independent structure (throws ParseError); omitted predicates/constants
// mean empty/undefined, omitted id_pos means the domain diagonal. Writing is
// canonical: sorted keys, two-space indent, LF newline at end.
KripkeModel model_from_json(const Signature& sig, const std::string& json_text);
std::string model_to_json(const KripkeModel& m);

}  // namespace ffde
