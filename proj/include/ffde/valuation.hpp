// Stage-relative evaluation of sentences in a Kripke model.
//
// The semantics assigns each sentence A and stage w two independent bits:
// support of truth v(A, w) and support of falsity v(~A, w).  Together they
// form one of four values: T = (1,0), B = (1,1), N = (0,0), F = (0,1).
// Universal and negated-existential claims, along with implications, look
// upward along the stage order; everything else is local to the stage.
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "ffde/kripke.hpp"
#include "ffde/syntax.hpp"

namespace ffde {

enum class FourValue { T, B, N, F };

// "T", "B", "N", "F".
std::string four_value_name(FourValue v);

// Reusable evaluator over one model.  Caches results for closed subformulas,
// so repeated queries (and quantifiers re-visiting the same node) stay cheap.
// Queried formulas are retained for the evaluator's lifetime, which keeps the
// node-address cache keys valid.  The signature and model must outlive the
// evaluator.
class Evaluator {
 public:
  Evaluator(const Signature& sig, const KripkeModel& model);

  // v(f, stage) == 1.  Throws InvalidArgument for unknown stages, for free
  // variables, and for diagram constants naming elements the model lacks.
  bool eval(const FormulaPtr& f, const std::string& stage);

  // v(~f, stage) == 1.
  bool eval_neg(const FormulaPtr& f, const std::string& stage);

  FourValue four_valued(const FormulaPtr& f, const std::string& stage);

 private:
  using Env = std::map<std::string, std::string>;

  const std::string& require_stage(const std::string& stage) const;
  bool is_closed(const FormulaPtr& f);
  std::optional<std::string> term_at(const Term& t, const std::string& stage,
                                     const Env& env) const;
  bool ev(const FormulaPtr& f, const std::string& stage, bool neg, Env& env);

  const Signature& sig_;
  const KripkeModel& model_;
  std::map<std::string, std::vector<std::string>> up_;       // stage -> stages above, incl. itself
  std::map<std::string, std::vector<std::string>> domains_;  // stage -> sorted elements
  std::set<std::string> elements_;
  std::set<FormulaPtr> roots_;  // keeps cached nodes alive
  std::map<const Formula*, bool> closed_;
  std::map<std::tuple<const Formula*, std::string, bool>, bool> memo_;
};

// One-shot conveniences over a fresh Evaluator.
bool eval(const Signature& sig, const KripkeModel& model, const FormulaPtr& f,
          const std::string& stage);
bool eval_neg(const Signature& sig, const KripkeModel& model, const FormulaPtr& f,
              const std::string& stage);
FourValue four_valued(const Signature& sig, const KripkeModel& model, const FormulaPtr& f,
                      const std::string& stage);

// v(f, w) == 1 at every stage w.
bool holds_at_all_stages(const Signature& sig, const KripkeModel& model, const FormulaPtr& f);

// Truth persists upward: v(f, w) == 1 and w <= w' imply v(f, w') == 1.
bool is_persistent(const Signature& sig, const KripkeModel& model, const FormulaPtr& f);

// First stage (in declaration order) where every member of gamma holds but
// goal does not; nullopt when no stage refutes the entailment in this model.
std::optional<std::string> counterexample_stage(const Signature& sig, const KripkeModel& model,
                                                const std::vector<FormulaPtr>& gamma,
                                                const FormulaPtr& goal);

}  // namespace ffde
