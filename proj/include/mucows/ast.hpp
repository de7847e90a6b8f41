#pragma once

// Term language of the muCOWS service calculus: identifiers, values,
// receive templates, endpoints and services, plus the structural
// utilities the interpreter needs (free identifiers, substitution,
// canonical forms).

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace mucows {

enum class IdKind : std::uint8_t { name, variable };

// global: a free name written in the source, identified by its text.
// bound:  introduced by a delimitation; identified by a unique id.
// fresh:  a name generated when an active name delimitation was opened.
enum class IdScope : std::uint8_t { global, bound, fresh };

struct Identifier {
  std::uint64_t id = 0;
  std::string display;
  IdKind kind = IdKind::name;
  IdScope scope = IdScope::global;

  static Identifier global_name(std::string display);
  static Identifier bound_name(std::uint64_t id, std::string display);
  static Identifier variable(std::uint64_t id, std::string display);
  static Identifier fresh_name(std::uint64_t id, std::string display);

  bool is_variable() const { return kind == IdKind::variable; }
  bool is_name() const { return kind == IdKind::name; }
};

bool operator==(const Identifier& a, const Identifier& b);
bool operator<(const Identifier& a, const Identifier& b);
inline bool operator!=(const Identifier& a, const Identifier& b) { return !(a == b); }

// Closed atoms: names and integer/string literals. Never contains a variable.
struct Value {
  std::variant<Identifier, std::int64_t, std::string> repr;

  static Value name(Identifier id);
  static Value integer(std::int64_t v);
  static Value string(std::string v);

  bool is_name() const { return std::holds_alternative<Identifier>(repr); }
  const Identifier* as_name() const { return std::get_if<Identifier>(&repr); }
};

bool operator==(const Value& a, const Value& b);
bool operator<(const Value& a, const Value& b);
inline bool operator!=(const Value& a, const Value& b) { return !(a == b); }

// Human-readable rendering: names by display text (fresh names get a
// "#id" suffix), integers in decimal, strings double-quoted.
std::string to_string(const Value& v);

// Either a value or a variable. Used for invoke arguments, endpoints and
// receive templates alike; the calculus only needs atoms.
struct Expression {
  std::variant<Value, Identifier> repr;

  static Expression of(Value v);
  static Expression var(Identifier v);

  bool is_value() const { return std::holds_alternative<Value>(repr); }
  const Value* value() const { return std::get_if<Value>(&repr); }
  const Identifier* variable() const { return std::get_if<Identifier>(&repr); }
};

bool operator==(const Expression& a, const Expression& b);

using TemplateElement = Expression;

struct Endpoint {
  Expression partner;
  Expression operation;
};

bool operator==(const Endpoint& a, const Endpoint& b);

// Raised when a constructor is asked to build a term outside the grammar.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class CaptureError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct TermNode;
struct ReceiveBranch;

class Term {
 public:
  Term();  // 0

  static Term nil();
  static Term invoke(Endpoint endpoint, std::vector<Expression> args);
  static Term choice(std::vector<ReceiveBranch> branches);
  static Term receive(Endpoint endpoint, std::vector<TemplateElement> pattern, Term continuation = Term());
  static Term parallel(std::vector<Term> children);
  static Term delim(std::vector<Identifier> binders, Term body);
  static Term repl(Term body);

  const TermNode& node() const { return *node_; }
  const TermNode* identity() const { return node_.get(); }

  template <class T>
  const T* as() const;

  bool is_nil() const;

 private:
  explicit Term(std::shared_ptr<const TermNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const TermNode> node_;
};

struct Nil {};

struct Invoke {
  Endpoint endpoint;
  std::vector<Expression> args;
};

struct ReceiveBranch {
  Endpoint endpoint;
  std::vector<TemplateElement> pattern;
  Term continuation;
};

struct Choice {
  std::vector<ReceiveBranch> branches;
};

struct Parallel {
  std::vector<Term> children;
};

struct Delim {
  std::vector<Identifier> binders;
  Term body;
};

struct Repl {
  Term body;
};

struct TermNode {
  std::variant<Nil, Invoke, Choice, Parallel, Delim, Repl> v;
};

template <class T>
const T* Term::as() const {
  return std::get_if<T>(&node_->v);
}

// Exact structural equality (identifier ids included).
bool operator==(const Term& a, const Term& b);
inline bool operator!=(const Term& a, const Term& b) { return !(a == b); }

// Write-once variable bindings produced by matching.
class Substitution {
 public:
  // Throws std::logic_error when the variable is already bound.
  void bind(const Identifier& variable, Value value);
  const Value* lookup(const Identifier& variable) const;
  std::size_t domain_size() const { return bindings_.size(); }
  bool empty() const { return bindings_.empty(); }

  using Bindings = std::map<std::uint64_t, std::pair<Identifier, Value>>;
  Bindings::const_iterator begin() const { return bindings_.begin(); }
  Bindings::const_iterator end() const { return bindings_.end(); }

  friend bool operator==(const Substitution& a, const Substitution& b);

 private:
  Bindings bindings_;
};

std::set<Identifier> free_identifiers(const Term& t);

// Every identifier occurring in t, binders included.
std::set<Identifier> all_identifiers(const Term& t);

// Largest id among bound and fresh identifiers (0 if none).
std::uint64_t max_identifier_id(const Term& t);

// Replaces variables in dom(sigma) and drops their binders.
Term apply_substitution(const Term& t, const Substitution& sigma);

// Gives every binder inside t a new id drawn from next_id.
Term rename_binders(const Term& t, std::uint64_t& next_id);

// Replaces every occurrence (binders excluded) of each key identifier.
Term replace_identifiers(const Term& t, const std::map<Identifier, Value>& replacement);

// Exact serialization, ids included. Two terms are == iff their keys match.
std::string structural_key(const Term& t);

// Mapping from the fresh-name ids of the input to those of the canonical output.
using FreshRenaming = std::map<std::uint64_t, std::uint64_t>;

// Normal form: parallel flattened and sorted, 0 units dropped, unused
// binders dropped, nested delimitations merged, active name
// delimitations opened into fresh names, bound and fresh ids renumbered
// in traversal order. Alpha-equivalent terms have equal canonical forms.
Term canonicalize(const Term& t, FreshRenaming* renaming = nullptr);

// Same structural normalisation as canonicalize but keeps existing ids;
// names opened here draw fresh ids from next_id.
Term normalize(const Term& t, std::uint64_t& next_id);

bool alpha_equivalent(const Term& a, const Term& b);

}  // namespace mucows
