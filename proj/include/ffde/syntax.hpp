// Terms, formulas, signatures: construction, parsing, rendering, substitution.
#pragma once

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace ffde {

// Thrown for malformed external input: formula text, JSON payloads, bad names.
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown for API misuse and unsupported requests (not data-level violations).
struct InvalidArgument : std::runtime_error {
  explicit InvalidArgument(const std::string& msg) : std::runtime_error(msg) {}
};

enum class Logic { FFDE, FN4 };

// A finite vocabulary. "D" (definedness) and "=" (identity) are built into the
// language and may not be declared. Declared names are plain identifiers;
// '@' prefixes element constants of a model's diagram language and '#' suffixes
// are reserved for constants minted by the proof tools.
struct Signature {
  std::vector<std::string> constants;      // sorted, unique
  std::map<std::string, int> predicates;   // name -> arity (>= 0)
  Logic logic = Logic::FFDE;

  bool has_constant(const std::string& name) const;
  int predicate_arity(const std::string& name) const;  // -1 when undeclared
};

Signature signature_from_json(const std::string& json_text);
std::string signature_to_json(const Signature& sig);

enum class TermKind { Constant, Variable, DiagramConstant };

struct Term {
  TermKind kind = TermKind::Constant;
  // Constant/Variable: the identifier. DiagramConstant: the element id (no '@').
  std::string name;

  static Term constant(std::string name) { return {TermKind::Constant, std::move(name)}; }
  static Term variable(std::string name) { return {TermKind::Variable, std::move(name)}; }
  static Term diagram(std::string element) { return {TermKind::DiagramConstant, std::move(element)}; }

  friend bool operator==(const Term& a, const Term& b) = default;
  friend auto operator<=>(const Term& a, const Term& b) = default;
};

enum class Conn {
  Atom,    // name = predicate, terms = arguments (possibly empty)
  Id,      // terms = {lhs, rhs}
  Def,     // terms = {argument}
  Neg,     // left = negand
  And,     // left, right
  Or,      // left, right
  Imp,     // left, right (FN4 only)
  Forall,  // name = bound variable, left = body
  Exists,  // name = bound variable, left = body
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  Conn kind;
  std::string name;         // Atom: predicate; Forall/Exists: bound variable
  std::vector<Term> terms;  // Atom/Id/Def arguments
  FormulaPtr left, right;
};

FormulaPtr mk_atom(std::string predicate, std::vector<Term> args);
FormulaPtr mk_id(Term lhs, Term rhs);
FormulaPtr mk_def(Term arg);
FormulaPtr mk_neg(FormulaPtr f);
FormulaPtr mk_and(FormulaPtr l, FormulaPtr r);
FormulaPtr mk_or(FormulaPtr l, FormulaPtr r);
FormulaPtr mk_imp(FormulaPtr l, FormulaPtr r);
FormulaPtr mk_forall(std::string var, FormulaPtr body);
FormulaPtr mk_exists(std::string var, FormulaPtr body);

// Structural comparison; the induced order is the canonical one used for
// assumption sets and deterministic output.
int compare(const Formula& a, const Formula& b);
bool equal(const FormulaPtr& a, const FormulaPtr& b);

struct FormulaLess {
  bool operator()(const FormulaPtr& a, const FormulaPtr& b) const { return compare(*a, *b) < 0; }
};
using FormulaSet = std::set<FormulaPtr, FormulaLess>;

// Parses the ASCII grammar:
//   formula := imp ; imp := or ("->" imp)? ; or := and ("|" and)* ;
//   and := unary ("&" unary)* ; unary := "~" unary | quant | atom | "(" formula ")" ;
//   quant := ("forall"|"exists") IDENT "." formula ;
//   atom := IDENT "(" term ("," term)* ")" | IDENT | term "=" term
//         | term "!=" term | "D" "(" term ")" ;
//   term := IDENT | "@" IDENT .
// Quantifier scope extends as far right as possible. "t1 != t2" is sugar for
// "~(t1 = t2)". An identifier is a variable iff bound by an enclosing
// quantifier (or listed in free_vars); otherwise it must be a declared or
// minted constant. "->" requires an FN4 signature. The result is closed unless
// free_vars permits otherwise.
FormulaPtr parse_formula(const Signature& sig, const std::string& text,
                         const std::set<std::string>& free_vars = {});

// Inverse of parse_formula up to insignificant whitespace/parentheses:
// parse(render(f)) is structurally equal to f.
std::string render(const FormulaPtr& f);
std::string render_term(const Term& t);

// Capture-free substitution of every free occurrence of `var` by `replacement`.
// `replacement` must be a ground term (constant or diagram constant).
FormulaPtr substitute(const FormulaPtr& f, const std::string& var, const Term& replacement);

std::set<std::string> free_vars(const FormulaPtr& f);
bool is_sentence(const FormulaPtr& f);

// Names of constants occurring in f (declared or minted; not diagram constants).
std::set<std::string> constants_of(const FormulaPtr& f);
bool occurs_constant(const FormulaPtr& f, const std::string& name);
bool contains_imp(const FormulaPtr& f);

// True iff `var` occurs free in every subformula of f (for an atom: occurs in
// the atom). Side condition of the generalized inequality introduction.
bool x_free_in_all_subformulas(const FormulaPtr& f, const std::string& var);

// True for names of the shape IDENT "#" digits, which only the proof tools mint.
bool is_minted_constant(const std::string& name);

// Checks that f is a closed sentence over sig: declared/minted constants only,
// declared predicates with correct arities, no implication unless FN4.
// Diagram constants are permitted. Throws ParseError on failure.
void check_sentence(const Signature& sig, const FormulaPtr& f);

}  // namespace ffde
