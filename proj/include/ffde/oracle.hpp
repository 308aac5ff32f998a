// Brute-force four-valued checker for the propositional fragment.
//
// Formulas built from 0-ary atoms with ~, &, | are evaluated directly over
// four-valued assignments (independent truth and falsity bits per atom),
// with no Kripke machinery involved.  This gives a second, much simpler
// implementation of the shared fragment; tests verify the two agree.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ffde/kripke.hpp"
#include "ffde/syntax.hpp"

namespace ffde {

struct PairValue {
  bool truth = false;
  bool falsity = false;
  friend bool operator==(const PairValue&, const PairValue&) = default;
};

// Atom name -> value.  Atoms missing from the map count as (0,0).
using PairAssignment = std::map<std::string, PairValue>;

// Collects the 0-ary atoms of f.  Throws InvalidArgument if f uses anything
// beyond atoms, ~, &, |.
std::set<std::string> propositional_atoms(const FormulaPtr& f);

// Truth and falsity of f under a: negation swaps the bits, conjunction and
// disjunction take the lattice meet/join componentwise.
PairValue eval_pair(const FormulaPtr& f, const PairAssignment& a);

struct OracleVerdict {
  bool valid = true;
  std::optional<PairAssignment> witness;  // first refuting assignment, if any
  std::uint64_t assignments_checked = 0;
};

// Checks gamma |= goal by enumerating all 4^k assignments to the atoms of
// gamma and goal.  Assignments are enumerated with atoms in sorted order,
// the first atom most significant, per-atom value order N, F, T, B.
OracleVerdict fde_consequence(const std::vector<FormulaPtr>& gamma, const FormulaPtr& goal);

// Single-stage, empty-domain model whose 0-ary predicates realize a.
KripkeModel model_for_assignment(const Signature& sig, const PairAssignment& a);

// eval_pair(f, a) matches stage-relative evaluation in model_for_assignment.
bool agrees_with_model_semantics(const Signature& sig, const FormulaPtr& f,
                                 const PairAssignment& a);

struct CrossCheckReport {
  std::uint64_t formulas = 0;    // distinct formulas compared
  std::uint64_t cases = 0;       // formula x assignment pairs
  std::uint64_t mismatches = 0;  // pairs where the two evaluators disagree
};

// Exhaustively compares eval_pair against the Kripke evaluator: every
// formula over atom_count atoms up to the given connective depth, under
// every four-valued assignment.  Mismatches should always be zero.
CrossCheckReport compare_with_kripke(int atom_count, int depth);

}  // namespace ffde
