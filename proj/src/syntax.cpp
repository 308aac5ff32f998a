#include "ffde/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "json.hpp"

namespace ffde {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Signature

namespace {

bool is_plain_identifier(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

void check_declared_name(const std::string& name, const char* what) {
  if (!is_plain_identifier(name))
    throw ParseError(std::string(what) + " name '" + name + "' is not a plain identifier");
  if (name == "D" || name == "forall" || name == "exists")
    throw ParseError(std::string(what) + " name '" + name + "' is reserved");
}

}  // namespace

bool Signature::has_constant(const std::string& name) const {
  return std::binary_search(constants.begin(), constants.end(), name);
}

int Signature::predicate_arity(const std::string& name) const {
  auto it = predicates.find(name);
  return it == predicates.end() ? -1 : it->second;
}

Signature signature_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("signature: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("signature: expected a JSON object");
  Signature sig;
  if (j.contains("logic")) {
    const auto& l = j["logic"];
    if (!l.is_string() || (l != "ffde" && l != "fn4"))
      throw ParseError("signature: logic must be \"ffde\" or \"fn4\"");
    sig.logic = l == "fn4" ? Logic::FN4 : Logic::FFDE;
  }
  if (j.contains("constants")) {
    if (!j["constants"].is_array()) throw ParseError("signature: constants must be an array");
    for (const auto& c : j["constants"]) {
      if (!c.is_string()) throw ParseError("signature: constant names must be strings");
      check_declared_name(c.get<std::string>(), "constant");
      sig.constants.push_back(c.get<std::string>());
    }
  }
  std::sort(sig.constants.begin(), sig.constants.end());
  if (std::adjacent_find(sig.constants.begin(), sig.constants.end()) != sig.constants.end())
    throw ParseError("signature: duplicate constant name");
  if (j.contains("predicates")) {
    if (!j["predicates"].is_object()) throw ParseError("signature: predicates must be an object");
    for (const auto& [name, arity] : j["predicates"].items()) {
      check_declared_name(name, "predicate");
      if (!arity.is_number_integer() || arity.get<int>() < 0)
        throw ParseError("signature: arity of '" + name + "' must be a non-negative integer");
      sig.predicates[name] = arity.get<int>();
    }
  }
  for (const auto& c : sig.constants)
    if (sig.predicates.count(c))
      throw ParseError("signature: name '" + c + "' declared as both constant and predicate");
  for (const auto& [k, v] : j.items())
    if (k != "constants" && k != "predicates" && k != "logic")
      throw ParseError("signature: unknown key '" + k + "'");
  return sig;
}

std::string signature_to_json(const Signature& sig) {
  json j;
  j["constants"] = sig.constants;
  j["predicates"] = json::object();
  for (const auto& [name, arity] : sig.predicates) j["predicates"][name] = arity;
  j["logic"] = sig.logic == Logic::FN4 ? "fn4" : "ffde";
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Construction

namespace {
FormulaPtr mk(Conn kind, std::string name, std::vector<Term> terms, FormulaPtr l, FormulaPtr r) {
  auto f = std::make_shared<Formula>();
  f->kind = kind;
  f->name = std::move(name);
  f->terms = std::move(terms);
  f->left = std::move(l);
  f->right = std::move(r);
  return f;
}
}  // namespace

FormulaPtr mk_atom(std::string predicate, std::vector<Term> args) {
  return mk(Conn::Atom, std::move(predicate), std::move(args), nullptr, nullptr);
}
FormulaPtr mk_id(Term lhs, Term rhs) {
  return mk(Conn::Id, "", {std::move(lhs), std::move(rhs)}, nullptr, nullptr);
}
FormulaPtr mk_def(Term arg) { return mk(Conn::Def, "", {std::move(arg)}, nullptr, nullptr); }
FormulaPtr mk_neg(FormulaPtr f) { return mk(Conn::Neg, "", {}, std::move(f), nullptr); }
FormulaPtr mk_and(FormulaPtr l, FormulaPtr r) { return mk(Conn::And, "", {}, std::move(l), std::move(r)); }
FormulaPtr mk_or(FormulaPtr l, FormulaPtr r) { return mk(Conn::Or, "", {}, std::move(l), std::move(r)); }
FormulaPtr mk_imp(FormulaPtr l, FormulaPtr r) { return mk(Conn::Imp, "", {}, std::move(l), std::move(r)); }
FormulaPtr mk_forall(std::string var, FormulaPtr body) {
  return mk(Conn::Forall, std::move(var), {}, std::move(body), nullptr);
}
FormulaPtr mk_exists(std::string var, FormulaPtr body) {
  return mk(Conn::Exists, std::move(var), {}, std::move(body), nullptr);
}

int compare(const Formula& a, const Formula& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  if (int c = a.name.compare(b.name); c != 0) return c < 0 ? -1 : 1;
  if (a.terms != b.terms) return a.terms < b.terms ? -1 : 1;
  auto cmp_child = [](const FormulaPtr& x, const FormulaPtr& y) {
    if (!x && !y) return 0;
    if (!x) return -1;
    if (!y) return 1;
    return compare(*x, *y);
  };
  if (int c = cmp_child(a.left, b.left); c != 0) return c;
  return cmp_child(a.right, b.right);
}

bool equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return compare(*a, *b) == 0;
}

// ---------------------------------------------------------------------------
// Lexer / parser

namespace {

enum class Tok { Ident, At, LParen, RParen, Comma, Dot, Eq, Neq, Not, And, Or, Arrow, End };

struct Lexer {
  const std::string& src;
  size_t pos = 0;
  Tok tok = Tok::End;
  std::string text;  // for Ident

  explicit Lexer(const std::string& s) : src(s) { next(); }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("formula: " + msg + " at offset " + std::to_string(pos));
  }

  void next() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    if (pos >= src.size()) {
      tok = Tok::End;
      return;
    }
    char c = src[pos];
    auto single = [&](Tok t) { ++pos; tok = t; };
    switch (c) {
      case '@': single(Tok::At); return;
      case '(': single(Tok::LParen); return;
      case ')': single(Tok::RParen); return;
      case ',': single(Tok::Comma); return;
      case '.': single(Tok::Dot); return;
      case '=': single(Tok::Eq); return;
      case '~': single(Tok::Not); return;
      case '&': single(Tok::And); return;
      case '|': single(Tok::Or); return;
      case '!':
        if (pos + 1 < src.size() && src[pos + 1] == '=') {
          pos += 2;
          tok = Tok::Neq;
          return;
        }
        fail("unexpected '!'");
      case '-':
        if (pos + 1 < src.size() && src[pos + 1] == '>') {
          pos += 2;
          tok = Tok::Arrow;
          return;
        }
        fail("unexpected '-'");
      default: break;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos;
      while (pos < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
        ++pos;
      // Optional minted-constant suffix: one '#' followed by digits.
      if (pos < src.size() && src[pos] == '#') {
        size_t h = pos + 1;
        size_t d = h;
        while (d < src.size() && std::isdigit(static_cast<unsigned char>(src[d]))) ++d;
        if (d == h) fail("'#' must be followed by digits");
        pos = d;
      }
      text = src.substr(start, pos - start);
      tok = Tok::Ident;
      return;
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

struct Parser {
  const Signature& sig;
  Lexer lex;
  std::vector<std::string> bound;  // quantifier variables in scope
  const std::set<std::string>& free_ok;

  Parser(const Signature& s, const std::string& text, const std::set<std::string>& fv)
      : sig(s), lex(text), free_ok(fv) {}

  bool in_scope(const std::string& name) const {
    if (std::find(bound.rbegin(), bound.rend(), name) != bound.rend()) return true;
    return free_ok.count(name) > 0;
  }

  void expect(Tok t, const char* what) {
    if (lex.tok != t) lex.fail(std::string("expected ") + what);
    lex.next();
  }

  Term parse_term() {
    if (lex.tok == Tok::At) {
      lex.next();
      if (lex.tok != Tok::Ident) lex.fail("expected element id after '@'");
      Term t = Term::diagram(lex.text);
      lex.next();
      return t;
    }
    if (lex.tok != Tok::Ident) lex.fail("expected a term");
    std::string name = lex.text;
    lex.next();
    if (in_scope(name)) return Term::variable(name);
    if (sig.has_constant(name) || is_minted_constant(name)) return Term::constant(name);
    lex.fail("unknown identifier '" + name + "' (not a bound variable or declared constant)");
  }

  FormulaPtr parse_formula() {  // imp := or ("->" imp)?
    FormulaPtr l = parse_or();
    if (lex.tok == Tok::Arrow) {
      if (sig.logic != Logic::FN4) lex.fail("'->' requires an fn4 signature");
      lex.next();
      return mk_imp(std::move(l), parse_formula());
    }
    return l;
  }

  FormulaPtr parse_or() {
    FormulaPtr l = parse_and();
    while (lex.tok == Tok::Or) {
      lex.next();
      l = mk_or(std::move(l), parse_and());
    }
    return l;
  }

  FormulaPtr parse_and() {
    FormulaPtr l = parse_unary();
    while (lex.tok == Tok::And) {
      lex.next();
      l = mk_and(std::move(l), parse_unary());
    }
    return l;
  }

  FormulaPtr parse_unary() {
    if (lex.tok == Tok::Not) {
      lex.next();
      return mk_neg(parse_unary());
    }
    if (lex.tok == Tok::Ident && (lex.text == "forall" || lex.text == "exists")) {
      bool universal = lex.text == "forall";
      lex.next();
      if (lex.tok != Tok::Ident) lex.fail("expected a variable after quantifier");
      std::string var = lex.text;
      if (var == "forall" || var == "exists" || var == "D" || var.find('#') != std::string::npos)
        lex.fail("'" + var + "' cannot be a quantified variable");
      lex.next();
      expect(Tok::Dot, "'.' after quantified variable");
      bound.push_back(var);
      FormulaPtr body = parse_formula();  // scope extends as far right as possible
      bound.pop_back();
      return universal ? mk_forall(std::move(var), std::move(body))
                       : mk_exists(std::move(var), std::move(body));
    }
    if (lex.tok == Tok::LParen) {
      lex.next();
      FormulaPtr f = parse_formula();
      expect(Tok::RParen, "')'");
      return maybe_identity_tail(std::move(f));
    }
    return parse_atom();
  }

  // "(t) = u" is legal term grouping only when the parenthesized formula turns
  // out not to be one; the grammar has no parenthesized terms, so reject.
  FormulaPtr maybe_identity_tail(FormulaPtr f) {
    if (lex.tok == Tok::Eq || lex.tok == Tok::Neq)
      lex.fail("'='/'!=' must join two terms (parenthesized terms are not supported)");
    return f;
  }

  FormulaPtr parse_atom() {
    if (lex.tok == Tok::At) {  // must be an identity whose lhs is a diagram constant
      Term lhs = parse_term();
      return parse_identity_rest(std::move(lhs));
    }
    if (lex.tok != Tok::Ident) lex.fail("expected an atom");
    std::string name = lex.text;
    lex.next();
    if (name == "D") {
      expect(Tok::LParen, "'(' after D");
      Term arg = parse_term();
      expect(Tok::RParen, "')'");
      return mk_def(std::move(arg));
    }
    if (lex.tok == Tok::LParen) {
      int arity = sig.predicate_arity(name);
      if (arity < 0) lex.fail("unknown predicate '" + name + "'");
      lex.next();
      std::vector<Term> args;
      args.push_back(parse_term());
      while (lex.tok == Tok::Comma) {
        lex.next();
        args.push_back(parse_term());
      }
      expect(Tok::RParen, "')'");
      if (static_cast<int>(args.size()) != arity)
        lex.fail("predicate '" + name + "' expects " + std::to_string(arity) + " arguments, got " +
                 std::to_string(args.size()));
      return mk_atom(std::move(name), std::move(args));
    }
    if (lex.tok == Tok::Eq || lex.tok == Tok::Neq) {
      // the identifier was a term after all
      Term lhs = in_scope(name) ? Term::variable(name)
                 : (sig.has_constant(name) || is_minted_constant(name))
                     ? Term::constant(name)
                     : (lex.fail("unknown identifier '" + name + "'"), Term{});
      return parse_identity_rest(std::move(lhs));
    }
    int arity = sig.predicate_arity(name);
    if (arity == 0) return mk_atom(std::move(name), {});
    if (arity > 0) lex.fail("predicate '" + name + "' expects arguments");
    lex.fail("unknown identifier '" + name + "' (a bare atom must be a 0-ary predicate)");
  }

  FormulaPtr parse_identity_rest(Term lhs) {
    bool negated = lex.tok == Tok::Neq;
    if (lex.tok != Tok::Eq && lex.tok != Tok::Neq) lex.fail("expected '=' or '!='");
    lex.next();
    Term rhs = parse_term();
    FormulaPtr id = mk_id(std::move(lhs), std::move(rhs));
    return negated ? mk_neg(std::move(id)) : id;
  }
};

}  // namespace

FormulaPtr parse_formula(const Signature& sig, const std::string& text,
                         const std::set<std::string>& free_vars) {
  Parser p(sig, text, free_vars);
  FormulaPtr f = p.parse_formula();
  if (p.lex.tok != Tok::End) p.lex.fail("trailing input");
  return f;
}

// ---------------------------------------------------------------------------
// Rendering

std::string render_term(const Term& t) {
  return t.kind == TermKind::DiagramConstant ? "@" + t.name : t.name;
}

namespace {

// Precedence classes: Imp 1, Or 2, And 3, Neg and quantifiers 4, atoms 5.
// A quantifier is grammatically a unary, but its body extends to the end of
// the enclosing text, so it additionally needs parentheses whenever rendered
// text follows it; `tail` tracks whether this subformula sits at the right
// edge of the output (the top level, or the right edge of a parenthesized
// group).
int prec(const Formula& f) {
  switch (f.kind) {
    case Conn::Imp: return 1;
    case Conn::Or: return 2;
    case Conn::And: return 3;
    case Conn::Neg:
    case Conn::Forall:
    case Conn::Exists: return 4;
    default: return 5;
  }
}

void render_into(const FormulaPtr& f, int min_prec, bool tail, std::string& out) {
  const bool quant = f->kind == Conn::Forall || f->kind == Conn::Exists;
  bool parens = prec(*f) < min_prec || (quant && !tail);
  if (parens) out += '(';
  const bool t = parens || tail;  // inside parens we are rightmost again
  switch (f->kind) {
    case Conn::Atom:
      out += f->name;
      if (!f->terms.empty()) {
        out += '(';
        for (size_t i = 0; i < f->terms.size(); ++i) {
          if (i) out += ", ";
          out += render_term(f->terms[i]);
        }
        out += ')';
      }
      break;
    case Conn::Id:
      out += render_term(f->terms[0]);
      out += " = ";
      out += render_term(f->terms[1]);
      break;
    case Conn::Def:
      out += "D(";
      out += render_term(f->terms[0]);
      out += ')';
      break;
    case Conn::Neg:
      if (f->left->kind == Conn::Id) {
        out += render_term(f->left->terms[0]);
        out += " != ";
        out += render_term(f->left->terms[1]);
      } else {
        out += '~';
        render_into(f->left, 4, t, out);
      }
      break;
    case Conn::And:
      render_into(f->left, 3, false, out);
      out += " & ";
      render_into(f->right, 4, t, out);
      break;
    case Conn::Or:
      render_into(f->left, 2, false, out);
      out += " | ";
      render_into(f->right, 3, t, out);
      break;
    case Conn::Imp:
      render_into(f->left, 2, false, out);
      out += " -> ";
      render_into(f->right, 1, t, out);
      break;
    case Conn::Forall:
    case Conn::Exists:
      out += f->kind == Conn::Forall ? "forall " : "exists ";
      out += f->name;
      out += ". ";
      render_into(f->left, 0, t, out);
      break;
  }
  if (parens) out += ')';
}

}  // namespace

std::string render(const FormulaPtr& f) {
  std::string out;
  render_into(f, 0, true, out);
  return out;
}

// ---------------------------------------------------------------------------
// Substitution and analyses

FormulaPtr substitute(const FormulaPtr& f, const std::string& var, const Term& replacement) {
  if (replacement.kind == TermKind::Variable)
    throw InvalidArgument("substitute: replacement must be a ground term");
  auto sub_term = [&](const Term& t) {
    return (t.kind == TermKind::Variable && t.name == var) ? replacement : t;
  };
  switch (f->kind) {
    case Conn::Atom:
    case Conn::Id:
    case Conn::Def: {
      bool hit = false;
      for (const auto& t : f->terms)
        if (t.kind == TermKind::Variable && t.name == var) hit = true;
      if (!hit) return f;
      std::vector<Term> terms;
      terms.reserve(f->terms.size());
      for (const auto& t : f->terms) terms.push_back(sub_term(t));
      return mk(f->kind, f->name, std::move(terms), nullptr, nullptr);
    }
    case Conn::Neg: {
      FormulaPtr l = substitute(f->left, var, replacement);
      return l == f->left ? f : mk_neg(std::move(l));
    }
    case Conn::And:
    case Conn::Or:
    case Conn::Imp: {
      FormulaPtr l = substitute(f->left, var, replacement);
      FormulaPtr r = substitute(f->right, var, replacement);
      if (l == f->left && r == f->right) return f;
      return mk(f->kind, "", {}, std::move(l), std::move(r));
    }
    case Conn::Forall:
    case Conn::Exists: {
      if (f->name == var) return f;  // shadowed
      FormulaPtr body = substitute(f->left, var, replacement);
      return body == f->left ? f : mk(f->kind, f->name, {}, std::move(body), nullptr);
    }
  }
  return f;
}

namespace {
void free_vars_into(const FormulaPtr& f, std::vector<std::string>& bound,
                    std::set<std::string>& out) {
  switch (f->kind) {
    case Conn::Atom:
    case Conn::Id:
    case Conn::Def:
      for (const auto& t : f->terms)
        if (t.kind == TermKind::Variable &&
            std::find(bound.begin(), bound.end(), t.name) == bound.end())
          out.insert(t.name);
      break;
    case Conn::Neg:
      free_vars_into(f->left, bound, out);
      break;
    case Conn::And:
    case Conn::Or:
    case Conn::Imp:
      free_vars_into(f->left, bound, out);
      free_vars_into(f->right, bound, out);
      break;
    case Conn::Forall:
    case Conn::Exists:
      bound.push_back(f->name);
      free_vars_into(f->left, bound, out);
      bound.pop_back();
      break;
  }
}
}  // namespace

std::set<std::string> free_vars(const FormulaPtr& f) {
  std::set<std::string> out;
  std::vector<std::string> bound;
  free_vars_into(f, bound, out);
  return out;
}

bool is_sentence(const FormulaPtr& f) { return free_vars(f).empty(); }

namespace {
void constants_into(const FormulaPtr& f, std::set<std::string>& out) {
  for (const auto& t : f->terms)
    if (t.kind == TermKind::Constant) out.insert(t.name);
  if (f->left) constants_into(f->left, out);
  if (f->right) constants_into(f->right, out);
}
}  // namespace

std::set<std::string> constants_of(const FormulaPtr& f) {
  std::set<std::string> out;
  constants_into(f, out);
  return out;
}

bool occurs_constant(const FormulaPtr& f, const std::string& name) {
  for (const auto& t : f->terms)
    if (t.kind == TermKind::Constant && t.name == name) return true;
  if (f->left && occurs_constant(f->left, name)) return true;
  if (f->right && occurs_constant(f->right, name)) return true;
  return false;
}

bool contains_imp(const FormulaPtr& f) {
  if (f->kind == Conn::Imp) return true;
  if (f->left && contains_imp(f->left)) return true;
  if (f->right && contains_imp(f->right)) return true;
  return false;
}

namespace {
bool x_free_everywhere(const FormulaPtr& f, const std::string& var,
                       std::vector<std::string>& bound) {
  if (std::find(bound.begin(), bound.end(), var) != bound.end()) return false;
  switch (f->kind) {
    case Conn::Atom:
    case Conn::Id:
    case Conn::Def:
      for (const auto& t : f->terms)
        if (t.kind == TermKind::Variable && t.name == var) return true;
      return false;
    case Conn::Neg:
      return x_free_everywhere(f->left, var, bound);
    case Conn::And:
    case Conn::Or:
    case Conn::Imp:
      return x_free_everywhere(f->left, var, bound) && x_free_everywhere(f->right, var, bound);
    case Conn::Forall:
    case Conn::Exists: {
      bound.push_back(f->name);
      bool ok = x_free_everywhere(f->left, var, bound);
      bound.pop_back();
      return ok;
    }
  }
  return false;
}
}  // namespace

bool x_free_in_all_subformulas(const FormulaPtr& f, const std::string& var) {
  std::vector<std::string> bound;
  return x_free_everywhere(f, var, bound);
}

bool is_minted_constant(const std::string& name) {
  auto hash = name.find('#');
  if (hash == std::string::npos || hash == 0 || hash + 1 >= name.size()) return false;
  if (!is_plain_identifier(name.substr(0, hash))) return false;
  for (size_t i = hash + 1; i < name.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(name[i]))) return false;
  return true;
}

namespace {
void check_sentence_rec(const Signature& sig, const FormulaPtr& f,
                        std::vector<std::string>& bound) {
  auto check_term = [&](const Term& t) {
    switch (t.kind) {
      case TermKind::Variable:
        if (std::find(bound.begin(), bound.end(), t.name) == bound.end())
          throw ParseError("sentence check: unbound variable '" + t.name + "'");
        break;
      case TermKind::Constant:
        if (!sig.has_constant(t.name) && !is_minted_constant(t.name))
          throw ParseError("sentence check: undeclared constant '" + t.name + "'");
        break;
      case TermKind::DiagramConstant:
        break;
    }
  };
  switch (f->kind) {
    case Conn::Atom: {
      int arity = sig.predicate_arity(f->name);
      if (arity < 0) throw ParseError("sentence check: undeclared predicate '" + f->name + "'");
      if (arity != static_cast<int>(f->terms.size()))
        throw ParseError("sentence check: predicate '" + f->name + "' arity mismatch");
      for (const auto& t : f->terms) check_term(t);
      break;
    }
    case Conn::Id:
      if (f->terms.size() != 2) throw ParseError("sentence check: malformed identity");
      for (const auto& t : f->terms) check_term(t);
      break;
    case Conn::Def:
      if (f->terms.size() != 1) throw ParseError("sentence check: malformed definedness atom");
      check_term(f->terms[0]);
      break;
    case Conn::Neg:
      check_sentence_rec(sig, f->left, bound);
      break;
    case Conn::Imp:
      if (sig.logic != Logic::FN4)
        throw ParseError("sentence check: implication requires an fn4 signature");
      [[fallthrough]];
    case Conn::And:
    case Conn::Or:
      check_sentence_rec(sig, f->left, bound);
      check_sentence_rec(sig, f->right, bound);
      break;
    case Conn::Forall:
    case Conn::Exists:
      bound.push_back(f->name);
      check_sentence_rec(sig, f->left, bound);
      bound.pop_back();
      break;
  }
}
}  // namespace

void check_sentence(const Signature& sig, const FormulaPtr& f) {
  std::vector<std::string> bound;
  check_sentence_rec(sig, f, bound);
}

}  // namespace ffde
