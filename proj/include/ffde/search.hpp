// Bounded countermodel search, model enumeration and sampling, and the
// soundness fuzzer.
//
// The searcher enumerates every valid model over a signature within bounds
// (at most `max_stages` stages, at most `max_elements` domain elements) in a
// deterministic canonical order, and reports either the first model/stage
// pair refuting a sequent or how many candidate models were checked.  The
// fuzzer synthesizes random derivations, checks them, and then attacks each
// accepted sequent with the countermodel search; any accepted-but-refuted
// sequent is a soundness violation and comes with a replayable witness.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ffde/kripke.hpp"
#include "ffde/proof.hpp"
#include "ffde/syntax.hpp"

namespace ffde {

struct Bounds {
  int max_stages = 2;    // >= 1
  int max_elements = 2;  // >= 0
  // When true (the default), the enumeration only emits models in which a
  // constant undefined at a stage stays undefined upward.
  bool persistence_safe = true;
};

// Outcome of a bounded search: either a countermodel (model plus the stage
// where every premise holds and the goal fails) or exhaustion of the bounds.
struct SearchVerdict {
  bool found = false;
  KripkeModel model;  // meaningful iff found
  std::string stage;  // meaningful iff found
  Bounds bounds;
  std::uint64_t models_checked = 0;
};

// Calls visit for every valid model over sig within bounds, in a fixed
// canonical order (stage count ascending, then element count, then order
// relation, domains, constant interpretations, predicate extensions,
// id_pos, id_neg).  Stages are named w1..wn and elements a1..am; every
// element of the pool occurs in some domain.  Every model passed to visit
// validates cleanly.  Enumeration stops early when visit returns false.
// Returns the number of models visited.  Throws InvalidArgument when the
// bounds exceed 6 stages or 4 elements, or when a predicate's tuple space
// is too large to enumerate exhaustively.
std::uint64_t enumerate_models(const Signature& sig, const Bounds& bounds,
                               const std::function<bool(const KripkeModel&)>& visit);

// Searches for a model and stage where every member of gamma holds and goal
// does not.  Only the constants and predicates occurring in gamma or goal
// are varied; the rest of the signature is ignored.  gamma members and goal
// must be sentences over sig.
SearchVerdict find_countermodel(const Signature& sig, const std::vector<FormulaPtr>& gamma,
                                const FormulaPtr& goal, const Bounds& bounds);

// {"verdict": "countermodel", "stage": ..., "model": {...}} or
// {"verdict": "exhausted", "bounds": {...}, "models_checked": N}.
std::string verdict_to_json(const SearchVerdict& v);

// Uniform helpers over std::mt19937_64 with portable, engine-stable results
// (std::uniform_int_distribution is implementation-defined; these are not).
std::uint64_t rng_below(std::mt19937_64& rng, std::uint64_t n);  // [0, n), n >= 1
int rng_int(std::mt19937_64& rng, int lo, int hi);               // [lo, hi]

// Deterministic pseudo-random valid model over sig within bounds: random
// skeleton, upward closure for monotonicity, id_pos forced to a congruence
// by closing predicate extensions under its orbits, id_neg saturated for
// the diversity conditions.  The result always validates cleanly.
KripkeModel random_model(const Signature& sig, const Bounds& bounds, std::uint64_t seed);

// Random closed formula over sig of connective depth <= max_depth.  Uses
// only declared predicates/constants (plus D and =, and -> for FN4).
FormulaPtr random_sentence(const Signature& sig, int max_depth, std::mt19937_64& rng);

struct FuzzOptions {
  int iterations = 100;
  std::uint64_t seed = 0;
  Bounds bounds;
  CheckMode mode = CheckMode::Strict;
  int max_depth = 5;  // depth bound on synthesized derivations/goals
};

// One accepted derivation whose sequent the bounded search refuted.
struct FuzzViolation {
  std::string mode;        // "strict" | "permissive"
  std::string sequent;     // rendered sequent
  std::string proof_json;  // replayable derivation
  std::string model_json;  // refuting model
  std::string stage;       // refuting stage
};

struct FuzzReport {
  std::uint64_t trees = 0;             // derivations synthesized
  std::uint64_t accepted = 0;          // derivations the checker accepted
  std::uint64_t rejected = 0;          // derivations the checker rejected
  std::uint64_t unique_sequents = 0;   // distinct accepted sequents searched
  std::uint64_t models_checked = 0;    // total models visited across searches
  std::vector<FuzzViolation> violations;
};

// Synthesizes `iterations` random derivations over sig (quantifier and
// identity rules twice as likely as the rest), checks each in opts.mode,
// and runs find_countermodel on every accepted sequent.  Deterministic for
// a fixed (sig, opts).  sig is capped at 2 predicates of arity <= 2 and 2
// constants to keep the searches within the time budget; beyond that the
// call throws InvalidArgument.  When sig has at least two constants, the
// corpus includes a derivation using a definedness rewrite template, which
// permissive mode accepts unsoundly.
FuzzReport fuzz_soundness(const Signature& sig, const FuzzOptions& opts);

// One JSON object per line, one line per violation.
std::string fuzz_report_to_json(const FuzzReport& r);

}  // namespace ffde
