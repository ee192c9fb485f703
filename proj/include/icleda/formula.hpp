/// Boolean formula AST, parser, evaluator and negation-normal-form rewriting.
///
/// The AST is the ground-truth oracle for every simulation result in this
/// project: a compiled netlist is correct iff its fixpoint verdicts match
/// evaluate() on every assignment.
#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace icleda {

enum class formula_kind { variable, negation, conjunction, disjunction, constant };

struct formula;
using formula_ptr = std::shared_ptr<const formula>;

/// Immutable formula node. And/Or nodes always have >= 2 children.
struct formula {
  formula_kind kind;
  std::string var;                  // variable only
  bool value = false;               // constant only
  std::vector<formula_ptr> children;

  static formula_ptr make_var(std::string name);
  static formula_ptr make_not(formula_ptr child);
  static formula_ptr make_and(std::vector<formula_ptr> children);
  static formula_ptr make_or(std::vector<formula_ptr> children);
  static formula_ptr make_const(bool value);
};

bool operator==(const formula& a, const formula& b);
inline bool operator!=(const formula& a, const formula& b) { return !(a == b); }

/// Total map from variable name to truth value.
using assignment = std::map<std::string, bool>;

struct parse_error : std::runtime_error {
  parse_error(std::string msg, std::size_t position_1based);
  std::size_t position;  // 1-based character position, EOF = length + 1
};

struct eval_error : std::runtime_error {
  explicit eval_error(const std::string& variable);
};

/// Parses `expr := or; or := and ('|' and)*; and := unary ('&' unary)*;
/// unary := '!' unary | atom; atom := ident | '0' | '1' | '(' expr ')'`.
/// Unparenthesized associative chains are flattened into one n-ary node.
formula_ptr parse_formula(const std::string& text);

/// Canonical printer; parse_formula(print_formula(f)) is structurally f.
std::string print_formula(const formula_ptr& f);

/// Standard boolean semantics; throws eval_error on an unassigned variable.
bool evaluate(const formula_ptr& f, const assignment& a);

/// Negation normal form of f itself (negations pushed onto variables).
formula_ptr to_nnf(const formula_ptr& f);

/// Negation normal form of NOT f: De Morgan push-down, double negations
/// cancel, Not survives only directly above a variable.
formula_ptr negate_to_nnf(const formula_ptr& f);

/// True iff every negation sits directly above a variable.
bool is_nnf(const formula_ptr& f);

/// Variables in first-occurrence order of a left-to-right traversal.
std::vector<std::string> collect_variables(const formula_ptr& f);

}  // namespace icleda
