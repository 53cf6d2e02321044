#pragma once

// Pattern schemas: finite sets of arithmetic terms over existential
// variables, e.g. {x, y, x*y, x+y}.
//
// Grammar (whitespace insignificant, '*' is mandatory):
//   pattern := "{" term ("," term)* "}"
//   expr    := prod ("+" prod)*
//   prod    := atom ("*" atom)*
//   atom    := IDENT | NUMBER | "(" expr ")"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ramsey/error.hpp"

namespace ramsey {

class Term {
 public:
  enum class Kind { constant = 0, variable = 1, add = 2, mul = 3 };

  static Term constant(std::uint64_t value) {
    if (value == 0) throw InputError("term constants must be >= 1");
    Term t(Kind::constant);
    t.value_ = value;
    return t;
  }

  static Term variable(std::string name) {
    if (!valid_identifier(name)) {
      throw InputError("invalid variable name '" + name + "'");
    }
    Term t(Kind::variable);
    t.name_ = std::move(name);
    return t;
  }

  static Term add(Term lhs, Term rhs) { return binary(Kind::add, std::move(lhs), std::move(rhs)); }
  static Term mul(Term lhs, Term rhs) { return binary(Kind::mul, std::move(lhs), std::move(rhs)); }

  Kind kind() const noexcept { return kind_; }
  bool is_binary() const noexcept { return kind_ == Kind::add || kind_ == Kind::mul; }
  std::uint64_t value() const noexcept { return value_; }
  std::string const& name() const noexcept { return name_; }
  Term const& lhs() const { return children_.at(0); }
  Term const& rhs() const { return children_.at(1); }

  static bool valid_identifier(std::string_view s) {
    if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
    return std::all_of(s.begin(), s.end(), [](char ch) {
      return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_';
    });
  }

  friend int compare(Term const& a, Term const& b);
  friend bool operator==(Term const& a, Term const& b) { return compare(a, b) == 0; }
  friend bool operator<(Term const& a, Term const& b) { return compare(a, b) < 0; }

 private:
  explicit Term(Kind k) : kind_(k) {}

  static Term binary(Kind k, Term lhs, Term rhs) {
    Term t(k);
    t.children_.reserve(2);
    t.children_.push_back(std::move(lhs));
    t.children_.push_back(std::move(rhs));
    return t;
  }

  Kind kind_;
  std::uint64_t value_ = 0;
  std::string name_;
  std::vector<Term> children_;
};

// Total order: constants < variables < sums < products; ties broken by value,
// name, then operands left to right.
inline int compare(Term const& a, Term const& b) {
  if (a.kind_ != b.kind_) return static_cast<int>(a.kind_) < static_cast<int>(b.kind_) ? -1 : 1;
  switch (a.kind_) {
    case Term::Kind::constant:
      return a.value_ == b.value_ ? 0 : (a.value_ < b.value_ ? -1 : 1);
    case Term::Kind::variable:
      return a.name_.compare(b.name_) < 0 ? -1 : (a.name_ == b.name_ ? 0 : 1);
    default:
      if (int c = compare(a.lhs(), b.lhs()); c != 0) return c;
      return compare(a.rhs(), b.rhs());
  }
}

namespace detail {

inline void flatten(Term const& t, Term::Kind op, std::vector<Term>& out) {
  if (t.kind() == op) {
    flatten(t.lhs(), op, out);
    flatten(t.rhs(), op, out);
  } else {
    out.push_back(t);
  }
}

}  // namespace detail

// Canonical form: associative chains flattened, constants folded (and a
// multiplicative 1 dropped), operands sorted, then rebuilt left-nested.
// No distribution is performed.
inline Term canonicalize(Term const& t) {
  if (!t.is_binary()) return t;
  std::vector<Term> operands;
  detail::flatten(canonicalize(t.lhs()), t.kind(), operands);
  detail::flatten(canonicalize(t.rhs()), t.kind(), operands);

  bool const is_add = t.kind() == Term::Kind::add;
  std::uint64_t folded = is_add ? 0 : 1;
  bool have_const = false;
  std::vector<Term> rest;
  for (auto& op : operands) {
    if (op.kind() == Term::Kind::constant) {
      folded = is_add ? detail::checked_add(folded, op.value()) : detail::checked_mul(folded, op.value());
      have_const = true;
    } else {
      rest.push_back(std::move(op));
    }
  }
  std::sort(rest.begin(), rest.end());
  if (have_const && !(!is_add && folded == 1 && !rest.empty())) {
    rest.insert(rest.begin(), Term::constant(folded));
  }
  Term acc = rest.front();
  for (std::size_t i = 1; i < rest.size(); ++i) {
    acc = is_add ? Term::add(std::move(acc), rest[i]) : Term::mul(std::move(acc), rest[i]);
  }
  return acc;
}

namespace detail {

inline void print_term(Term const& t, std::string& out, int parent_prec, bool right_operand) {
  switch (t.kind()) {
    case Term::Kind::constant: out += std::to_string(t.value()); return;
    case Term::Kind::variable: out += t.name(); return;
    default: break;
  }
  int const prec = t.kind() == Term::Kind::add ? 1 : 2;
  // Left-nested chains of one operator need no parentheses.
  bool const parens = prec < parent_prec || (prec == parent_prec && right_operand);
  if (parens) out += '(';
  print_term(t.lhs(), out, prec, false);
  out += prec == 1 ? '+' : '*';
  print_term(t.rhs(), out, prec, true);
  if (parens) out += ')';
}

}  // namespace detail

inline std::string to_string(Term const& t) {
  std::string out;
  detail::print_term(t, out, 0, false);
  return out;
}

using Assignment = std::map<std::string, std::uint64_t>;

inline std::uint64_t eval_term(Term const& t, Assignment const& asg) {
  switch (t.kind()) {
    case Term::Kind::constant: return t.value();
    case Term::Kind::variable: {
      auto it = asg.find(t.name());
      if (it == asg.end()) throw InputError("unbound variable '" + t.name() + "'");
      return it->second;
    }
    case Term::Kind::add: return detail::checked_add(eval_term(t.lhs(), asg), eval_term(t.rhs(), asg));
    case Term::Kind::mul: return detail::checked_mul(eval_term(t.lhs(), asg), eval_term(t.rhs(), asg));
  }
  return 0;
}

inline void collect_variables(Term const& t, std::set<std::string>& out) {
  if (t.kind() == Term::Kind::variable) {
    out.insert(t.name());
  } else if (t.is_binary()) {
    collect_variables(t.lhs(), out);
    collect_variables(t.rhs(), out);
  }
}

// Postfix program over variable slots; the search loops evaluate millions of
// assignments and cannot afford map lookups.
class CompiledTerm {
 public:
  CompiledTerm(Term const& t, std::vector<std::string> const& variables) {
    emit(t, variables);
    if (max_depth_ > kStack) throw InputError("term nests too deeply to evaluate");
  }

  // Saturates at UINT64_MAX instead of throwing: callers only compare
  // against a box bound.
  std::uint64_t eval(std::uint64_t const* slots) const noexcept {
    std::uint64_t stack[kStack];
    std::size_t top = 0;
    for (auto const& ins : code_) {
      switch (ins.op) {
        case Op::push_const: stack[top++] = ins.arg; break;
        case Op::push_var: stack[top++] = slots[ins.arg]; break;
        case Op::add: --top; stack[top - 1] = detail::sat_add(stack[top - 1], stack[top]); break;
        case Op::mul: --top; stack[top - 1] = detail::sat_mul(stack[top - 1], stack[top]); break;
      }
    }
    return stack[0];
  }

 private:
  static constexpr std::size_t kStack = 64;
  enum class Op : std::uint8_t { push_const, push_var, add, mul };
  struct Instr {
    Op op;
    std::uint64_t arg;
  };

  void emit(Term const& t, std::vector<std::string> const& variables) {
    switch (t.kind()) {
      case Term::Kind::constant:
        code_.push_back({Op::push_const, t.value()});
        max_depth_ = std::max(max_depth_, ++depth_);
        break;
      case Term::Kind::variable: {
        auto it = std::find(variables.begin(), variables.end(), t.name());
        code_.push_back({Op::push_var, static_cast<std::uint64_t>(it - variables.begin())});
        max_depth_ = std::max(max_depth_, ++depth_);
        break;
      }
      default:
        emit(t.lhs(), variables);
        emit(t.rhs(), variables);
        code_.push_back({t.kind() == Term::Kind::add ? Op::add : Op::mul, 0});
        --depth_;
    }
  }

  std::vector<Instr> code_;
  std::size_t depth_ = 0;
  std::size_t max_depth_ = 0;
};

class PatternSchema {
 public:
  PatternSchema(std::vector<Term> terms, bool distinct_vars = false, std::uint64_t min_value = 1)
      : distinct_vars_(distinct_vars), min_value_(min_value) {
    if (terms.empty()) throw InputError("pattern has no terms");
    if (min_value == 0) throw InputError("min_value must be >= 1");
    std::set<std::string> vars;
    for (auto const& raw : terms) {
      Term t = canonicalize(raw);
      if (std::find(terms_.begin(), terms_.end(), t) != terms_.end()) continue;
      collect_variables(t, vars);
      terms_.push_back(std::move(t));
    }
    variables_.assign(vars.begin(), vars.end());
    compiled_.reserve(terms_.size());
    for (auto const& t : terms_) compiled_.emplace_back(t, variables_);
  }

  std::vector<Term> const& terms() const noexcept { return terms_; }
  std::vector<std::string> const& variables() const noexcept { return variables_; }
  std::vector<CompiledTerm> const& compiled() const noexcept { return compiled_; }
  bool distinct_vars() const noexcept { return distinct_vars_; }
  std::uint64_t min_value() const noexcept { return min_value_; }

  // Canonical text; parse_pattern(to_string()) reproduces the same schema.
  std::string to_string() const {
    std::string out = "{";
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (i != 0) out += ", ";
      out += ramsey::to_string(terms_[i]);
    }
    return out + "}";
  }

  // Validates that `asg` binds exactly this schema's variables and respects
  // distinct_vars and min_value.
  void check_assignment(Assignment const& asg) const {
    if (asg.size() != variables_.size()) throw InputError("assignment does not cover the schema variables");
    std::set<std::uint64_t> seen;
    for (auto const& v : variables_) {
      auto it = asg.find(v);
      if (it == asg.end()) throw InputError("unbound variable '" + v + "'");
      if (it->second < min_value_) throw InputError("variable '" + v + "' below min_value");
      if (distinct_vars_ && !seen.insert(it->second).second) {
        throw InputError("distinct_vars requires pairwise distinct values");
      }
    }
  }

  friend bool operator==(PatternSchema const& a, PatternSchema const& b) {
    return a.terms_ == b.terms_ && a.distinct_vars_ == b.distinct_vars_ && a.min_value_ == b.min_value_;
  }

 private:
  std::vector<Term> terms_;
  std::vector<std::string> variables_;
  std::vector<CompiledTerm> compiled_;
  bool distinct_vars_;
  std::uint64_t min_value_;
};

namespace detail {

class PatternParser {
 public:
  explicit PatternParser(std::string_view text) : text_(text) {}

  std::vector<Term> pattern() {
    expect('{');
    std::vector<Term> terms;
    skip_ws();
    if (peek() == '}') throw ParseError("empty term set", pos_);
    terms.push_back(expr());
    while (accept(',')) terms.push_back(expr());
    expect('}');
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("trailing characters", pos_);
    return terms;
  }

  Term single_term() {
    Term t = expr();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("trailing characters", pos_);
    return t;
  }

 private:
  Term expr() {
    Term acc = prod();
    while (accept('+')) acc = Term::add(std::move(acc), prod());
    return acc;
  }

  Term prod() {
    Term acc = atom();
    while (accept('*')) acc = Term::mul(std::move(acc), atom());
    return acc;
  }

  Term atom() {
    skip_ws();
    std::size_t const start = pos_;
    char const ch = peek();
    if (ch == '(') {
      ++pos_;
      Term inner = expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::uint64_t v = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        std::uint64_t const digit = static_cast<std::uint64_t>(text_[pos_] - '0');
        if (__builtin_mul_overflow(v, 10u, &v) || __builtin_add_overflow(v, digit, &v)) {
          throw ParseError("integer constant too large", start);
        }
        ++pos_;
      }
      if (v == 0) throw ParseError("constant 0 is not allowed", start);
      return Term::constant(v);
    }
    if (std::isalpha(static_cast<unsigned char>(ch))) {
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      return Term::variable(std::string(text_.substr(start, pos_ - start)));
    }
    if (ch == '\0') throw ParseError("unexpected end of input", pos_);
    throw ParseError(std::string("unexpected character '") + ch + "'", pos_);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  bool accept(char ch) {
    skip_ws();
    if (peek() != ch) return false;
    ++pos_;
    return true;
  }

  void expect(char ch) {
    if (!accept(ch)) {
      if (pos_ >= text_.size()) throw ParseError(std::string("expected '") + ch + "' but input ended", pos_);
      throw ParseError(std::string("expected '") + ch + "'", pos_);
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline PatternSchema parse_pattern(std::string_view text, bool distinct_vars = false, std::uint64_t min_value = 1) {
  return PatternSchema(detail::PatternParser(text).pattern(), distinct_vars, min_value);
}

inline Term parse_term(std::string_view text) { return detail::PatternParser(text).single_term(); }

// The value set of the schema's terms under `asg`, duplicates collapsed.
inline std::set<std::uint64_t> instantiate(PatternSchema const& schema, Assignment const& asg) {
  schema.check_assignment(asg);
  std::set<std::uint64_t> out;
  for (auto const& t : schema.terms()) out.insert(eval_term(t, asg));
  return out;
}

}  // namespace ramsey
