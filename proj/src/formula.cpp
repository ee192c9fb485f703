#include "icleda/formula.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace icleda {

formula_ptr formula::make_var(std::string name) {
  auto f = std::make_shared<formula>();
  f->kind = formula_kind::variable;
  f->var = std::move(name);
  return f;
}

formula_ptr formula::make_not(formula_ptr child) {
  auto f = std::make_shared<formula>();
  f->kind = formula_kind::negation;
  f->children.push_back(std::move(child));
  return f;
}

formula_ptr formula::make_and(std::vector<formula_ptr> children) {
  if (children.size() < 2) throw std::invalid_argument("and node needs >= 2 children");
  auto f = std::make_shared<formula>();
  f->kind = formula_kind::conjunction;
  f->children = std::move(children);
  return f;
}

formula_ptr formula::make_or(std::vector<formula_ptr> children) {
  if (children.size() < 2) throw std::invalid_argument("or node needs >= 2 children");
  auto f = std::make_shared<formula>();
  f->kind = formula_kind::disjunction;
  f->children = std::move(children);
  return f;
}

formula_ptr formula::make_const(bool value) {
  auto f = std::make_shared<formula>();
  f->kind = formula_kind::constant;
  f->value = value;
  return f;
}

bool operator==(const formula& a, const formula& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case formula_kind::variable: return a.var == b.var;
    case formula_kind::constant: return a.value == b.value;
    default: break;
  }
  if (a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (*a.children[i] != *b.children[i]) return false;
  return true;
}

parse_error::parse_error(std::string msg, std::size_t position_1based)
    : std::runtime_error(msg + " at position " + std::to_string(position_1based)),
      position(position_1based) {}

eval_error::eval_error(const std::string& variable)
    : std::runtime_error("unassigned variable: " + variable) {}

namespace {

class parser {
 public:
  explicit parser(const std::string& text) : text_(text) {}

  formula_ptr run() {
    skip_ws();
    if (at_end()) throw parse_error("empty input", pos_1());
    auto f = parse_or();
    skip_ws();
    if (!at_end()) throw parse_error("unexpected trailing input", pos_1());
    return f;
  }

 private:
  const std::string& text_;
  std::size_t pos_ = 0;

  std::size_t pos_1() const { return pos_ + 1; }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }

  formula_ptr parse_or() {
    std::vector<formula_ptr> parts{parse_and()};
    for (skip_ws(); !at_end() && peek() == '|'; skip_ws()) {
      ++pos_;
      parts.push_back(parse_and());
    }
    return parts.size() == 1 ? parts.front() : formula::make_or(std::move(parts));
  }

  formula_ptr parse_and() {
    std::vector<formula_ptr> parts{parse_unary()};
    for (skip_ws(); !at_end() && peek() == '&'; skip_ws()) {
      ++pos_;
      parts.push_back(parse_unary());
    }
    return parts.size() == 1 ? parts.front() : formula::make_and(std::move(parts));
  }

  formula_ptr parse_unary() {
    skip_ws();
    if (!at_end() && peek() == '!') {
      ++pos_;
      return formula::make_not(parse_unary());
    }
    return parse_atom();
  }

  formula_ptr parse_atom() {
    skip_ws();
    if (at_end()) throw parse_error("syntax error", pos_1());
    char c = peek();
    if (c == '(') {
      ++pos_;
      auto f = parse_or();
      skip_ws();
      if (at_end() || peek() != ')') throw parse_error("expected ')'", pos_1());
      ++pos_;
      return f;
    }
    if (c == '0' || c == '1') {
      ++pos_;
      return formula::make_const(c == '1');
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_'))
        ++pos_;
      return formula::make_var(text_.substr(start, pos_ - start));
    }
    throw parse_error("syntax error", pos_1());
  }
};

void print_rec(const formula_ptr& f, std::ostream& os, int parent_level);

// levels: 0 = or context, 1 = and context, 2 = unary context
int level_of(const formula_ptr& f) {
  switch (f->kind) {
    case formula_kind::disjunction: return 0;
    case formula_kind::conjunction: return 1;
    default: return 2;
  }
}

void print_rec(const formula_ptr& f, std::ostream& os, int parent_level) {
  const bool need_parens = level_of(f) < parent_level;
  if (need_parens) os << '(';
  switch (f->kind) {
    case formula_kind::variable:
      os << f->var;
      break;
    case formula_kind::constant:
      os << (f->value ? '1' : '0');
      break;
    case formula_kind::negation:
      os << '!';
      print_rec(f->children[0], os, 2);
      break;
    case formula_kind::conjunction:
      for (std::size_t i = 0; i < f->children.size(); ++i) {
        if (i) os << " & ";
        // nested same-op children keep parentheses so parse round-trips
        print_rec(f->children[i], os, 2);
      }
      break;
    case formula_kind::disjunction:
      for (std::size_t i = 0; i < f->children.size(); ++i) {
        if (i) os << " | ";
        print_rec(f->children[i], os, 1);
      }
      break;
  }
  if (need_parens) os << ')';
}

}  // namespace

formula_ptr parse_formula(const std::string& text) {
  return parser(text).run();
}

std::string print_formula(const formula_ptr& f) {
  std::ostringstream os;
  print_rec(f, os, 0);
  return os.str();
}

bool evaluate(const formula_ptr& f, const assignment& a) {
  switch (f->kind) {
    case formula_kind::variable: {
      auto it = a.find(f->var);
      if (it == a.end()) throw eval_error(f->var);
      return it->second;
    }
    case formula_kind::constant:
      return f->value;
    case formula_kind::negation:
      return !evaluate(f->children[0], a);
    case formula_kind::conjunction:
      return std::all_of(f->children.begin(), f->children.end(),
                         [&](const formula_ptr& c) { return evaluate(c, a); });
    case formula_kind::disjunction:
      return std::any_of(f->children.begin(), f->children.end(),
                         [&](const formula_ptr& c) { return evaluate(c, a); });
  }
  throw std::logic_error("unreachable");
}

formula_ptr to_nnf(const formula_ptr& f) {
  switch (f->kind) {
    case formula_kind::variable:
    case formula_kind::constant:
      return f;
    case formula_kind::negation:
      return negate_to_nnf(f->children[0]);
    case formula_kind::conjunction:
    case formula_kind::disjunction: {
      std::vector<formula_ptr> cs;
      cs.reserve(f->children.size());
      for (const auto& c : f->children) cs.push_back(to_nnf(c));
      return f->kind == formula_kind::conjunction ? formula::make_and(std::move(cs))
                                                  : formula::make_or(std::move(cs));
    }
  }
  throw std::logic_error("unreachable");
}

formula_ptr negate_to_nnf(const formula_ptr& f) {
  switch (f->kind) {
    case formula_kind::variable:
      return formula::make_not(f);
    case formula_kind::constant:
      return formula::make_const(!f->value);
    case formula_kind::negation:
      return to_nnf(f->children[0]);
    case formula_kind::conjunction:
    case formula_kind::disjunction: {
      std::vector<formula_ptr> cs;
      cs.reserve(f->children.size());
      for (const auto& c : f->children) cs.push_back(negate_to_nnf(c));
      return f->kind == formula_kind::conjunction ? formula::make_or(std::move(cs))
                                                  : formula::make_and(std::move(cs));
    }
  }
  throw std::logic_error("unreachable");
}

bool is_nnf(const formula_ptr& f) {
  switch (f->kind) {
    case formula_kind::variable:
    case formula_kind::constant:
      return true;
    case formula_kind::negation:
      return f->children[0]->kind == formula_kind::variable;
    default:
      return std::all_of(f->children.begin(), f->children.end(), is_nnf);
  }
}

std::vector<std::string> collect_variables(const formula_ptr& f) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  auto walk = [&](auto&& self, const formula_ptr& node) -> void {
    if (node->kind == formula_kind::variable) {
      if (seen.insert(node->var).second) out.push_back(node->var);
      return;
    }
    for (const auto& c : node->children) self(self, c);
  };
  walk(walk, f);
  return out;
}

}  // namespace icleda
