#include "mucows/ast.hpp"

#include <algorithm>
#include <sstream>

#include "detail/rewrite.hpp"

namespace mucows {

Identifier Identifier::global_name(std::string display) {
  return {0, std::move(display), IdKind::name, IdScope::global};
}

Identifier Identifier::bound_name(std::uint64_t id, std::string display) {
  return {id, std::move(display), IdKind::name, IdScope::bound};
}

Identifier Identifier::variable(std::uint64_t id, std::string display) {
  return {id, std::move(display), IdKind::variable, IdScope::bound};
}

Identifier Identifier::fresh_name(std::uint64_t id, std::string display) {
  return {id, std::move(display), IdKind::name, IdScope::fresh};
}

bool operator==(const Identifier& a, const Identifier& b) {
  if (a.scope != b.scope || a.kind != b.kind) return false;
  return a.scope == IdScope::global ? a.display == b.display : a.id == b.id;
}

bool operator<(const Identifier& a, const Identifier& b) {
  if (a.scope != b.scope) return a.scope < b.scope;
  if (a.kind != b.kind) return a.kind < b.kind;
  return a.scope == IdScope::global ? a.display < b.display : a.id < b.id;
}

Value Value::name(Identifier id) {
  if (id.kind != IdKind::name) throw ShapeError("a value cannot be a variable: $" + id.display);
  return Value{std::move(id)};
}

Value Value::integer(std::int64_t v) { return Value{v}; }
Value Value::string(std::string v) { return Value{std::move(v)}; }

bool operator==(const Value& a, const Value& b) { return a.repr == b.repr; }
bool operator<(const Value& a, const Value& b) { return a.repr < b.repr; }

std::string to_string(const Value& v) {
  if (const Identifier* n = v.as_name()) {
    if (n->scope == IdScope::global) return n->display;
    return n->display + "#" + std::to_string(n->id);
  }
  if (const auto* i = std::get_if<std::int64_t>(&v.repr)) return std::to_string(*i);
  std::string out = "\"";
  for (char c : std::get<std::string>(v.repr)) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

Expression Expression::of(Value v) { return Expression{std::move(v)}; }

Expression Expression::var(Identifier v) {
  if (v.kind != IdKind::variable) throw ShapeError("not a variable: " + v.display);
  return Expression{std::move(v)};
}

bool operator==(const Expression& a, const Expression& b) { return a.repr == b.repr; }

bool operator==(const Endpoint& a, const Endpoint& b) {
  return a.partner == b.partner && a.operation == b.operation;
}

namespace {

const std::shared_ptr<const TermNode>& nil_node() {
  static const auto node = std::make_shared<const TermNode>(TermNode{Nil{}});
  return node;
}

bool is_name_value(const Expression& e) { return e.value() && e.value()->is_name(); }

void check_branch(const ReceiveBranch& b) {
  if (!is_name_value(b.endpoint.partner) || !is_name_value(b.endpoint.operation))
    throw ShapeError("receive endpoints must be names");
  std::set<Identifier> seen;
  for (const auto& p : b.pattern) {
    if (const Identifier* v = p.variable()) {
      if (!seen.insert(*v).second) throw ShapeError("variable $" + v->display + " repeated in one template");
    }
  }
}

}  // namespace

Term::Term() : node_(nil_node()) {}

Term Term::nil() { return Term(); }

Term Term::invoke(Endpoint endpoint, std::vector<Expression> args) {
  return Term(std::make_shared<const TermNode>(TermNode{Invoke{std::move(endpoint), std::move(args)}}));
}

Term Term::choice(std::vector<ReceiveBranch> branches) {
  if (branches.empty()) throw ShapeError("choice needs at least one receive");
  for (const auto& b : branches) check_branch(b);
  return Term(std::make_shared<const TermNode>(TermNode{Choice{std::move(branches)}}));
}

Term Term::receive(Endpoint endpoint, std::vector<TemplateElement> pattern, Term continuation) {
  std::vector<ReceiveBranch> one;
  one.push_back({std::move(endpoint), std::move(pattern), std::move(continuation)});
  return choice(std::move(one));
}

Term Term::parallel(std::vector<Term> children) {
  if (children.size() < 2) throw ShapeError("parallel composition needs at least two components");
  return Term(std::make_shared<const TermNode>(TermNode{Parallel{std::move(children)}}));
}

Term Term::delim(std::vector<Identifier> binders, Term body) {
  if (binders.empty()) throw ShapeError("delimitation needs at least one binder");
  for (const auto& b : binders)
    if (b.scope != IdScope::bound) throw ShapeError("delimitation binder must be a bound identifier: " + b.display);
  return Term(std::make_shared<const TermNode>(TermNode{Delim{std::move(binders), std::move(body)}}));
}

Term Term::repl(Term body) {
  return Term(std::make_shared<const TermNode>(TermNode{Repl{std::move(body)}}));
}

bool Term::is_nil() const { return std::holds_alternative<Nil>(node_->v); }

bool operator==(const Term& a, const Term& b) {
  if (a.identity() == b.identity()) return true;
  return structural_key(a) == structural_key(b);
}

void Substitution::bind(const Identifier& variable, Value value) {
  if (!variable.is_variable()) throw std::logic_error("only variables can be bound: " + variable.display);
  auto [it, inserted] = bindings_.try_emplace(variable.id, variable, std::move(value));
  if (!inserted) throw std::logic_error("variable $" + variable.display + " bound twice");
}

const Value* Substitution::lookup(const Identifier& variable) const {
  if (!variable.is_variable()) return nullptr;
  auto it = bindings_.find(variable.id);
  return it == bindings_.end() ? nullptr : &it->second.second;
}

bool operator==(const Substitution& a, const Substitution& b) {
  if (a.bindings_.size() != b.bindings_.size()) return false;
  for (auto ia = a.bindings_.begin(), ib = b.bindings_.begin(); ia != a.bindings_.end(); ++ia, ++ib) {
    if (ia->first != ib->first || ia->second.second != ib->second.second) return false;
  }
  return true;
}

namespace {

void collect_free(const Term& t, std::set<Identifier>& bound, std::set<Identifier>& out) {
  auto ex = [&](const Expression& e) {
    const Identifier* id = e.variable();
    if (!id) id = e.value()->as_name();
    if (id && !bound.count(*id)) out.insert(*id);
  };
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Invoke>) {
          ex(n.endpoint.partner);
          ex(n.endpoint.operation);
          for (const auto& a : n.args) ex(a);
        } else if constexpr (std::is_same_v<T, Choice>) {
          for (const auto& b : n.branches) {
            ex(b.endpoint.partner);
            ex(b.endpoint.operation);
            for (const auto& p : b.pattern) ex(p);
            collect_free(b.continuation, bound, out);
          }
        } else if constexpr (std::is_same_v<T, Parallel>) {
          for (const auto& c : n.children) collect_free(c, bound, out);
        } else if constexpr (std::is_same_v<T, Delim>) {
          std::vector<Identifier> added;
          for (const auto& b : n.binders)
            if (bound.insert(b).second) added.push_back(b);
          collect_free(n.body, bound, out);
          for (const auto& b : added) bound.erase(b);
        } else if constexpr (std::is_same_v<T, Repl>) {
          collect_free(n.body, bound, out);
        }
      },
      t.node().v);
}

}  // namespace

std::set<Identifier> free_identifiers(const Term& t) {
  std::set<Identifier> bound;
  std::set<Identifier> out;
  collect_free(t, bound, out);
  return out;
}

std::set<Identifier> all_identifiers(const Term& t) {
  std::set<Identifier> out;
  detail::for_each_identifier(t, [&](const Identifier& id, bool) { out.insert(id); });
  return out;
}

std::uint64_t max_identifier_id(const Term& t) {
  std::uint64_t best = 0;
  detail::for_each_identifier(t, [&](const Identifier& id, bool) {
    if (id.scope != IdScope::global) best = std::max(best, id.id);
  });
  return best;
}

Term apply_substitution(const Term& t, const Substitution& sigma) {
  if (sigma.empty()) return t;
  std::set<std::uint64_t> bound_names;
  detail::for_each_identifier(t, [&](const Identifier& id, bool is_binder) {
    if (is_binder && id.is_name()) bound_names.insert(id.id);
  });
  for (const auto& [vid, binding] : sigma) {
    const Identifier* n = binding.second.as_name();
    if (n && n->scope == IdScope::bound && bound_names.count(n->id))
      throw CaptureError("substituted name " + n->display + " would be captured");
  }
  return detail::rewrite(
      t,
      [&](const Identifier& id) -> std::optional<Expression> {
        if (const Value* v = sigma.lookup(id)) return Expression::of(*v);
        return std::nullopt;
      },
      [&](const Identifier& b) -> std::optional<Identifier> {
        if (sigma.lookup(b)) return std::nullopt;
        return b;
      });
}

Term rename_binders(const Term& t, std::uint64_t& next_id) {
  std::map<std::uint64_t, std::uint64_t> fresh;
  detail::for_each_identifier(t, [&](const Identifier& id, bool is_binder) {
    if (is_binder && !fresh.count(id.id)) fresh[id.id] = next_id++;
  });
  if (fresh.empty()) return t;
  auto renamed = [&](const Identifier& id) -> std::optional<Identifier> {
    if (id.scope != IdScope::bound) return std::nullopt;
    auto it = fresh.find(id.id);
    if (it == fresh.end()) return std::nullopt;
    Identifier r = id;
    r.id = it->second;
    return r;
  };
  return detail::rewrite(
      t,
      [&](const Identifier& id) -> std::optional<Expression> {
        auto r = renamed(id);
        if (!r) return std::nullopt;
        return r->is_variable() ? Expression::var(*r) : Expression::of(Value::name(*r));
      },
      [&](const Identifier& b) -> std::optional<Identifier> {
        if (auto r = renamed(b)) return r;
        return b;
      });
}

Term replace_identifiers(const Term& t, const std::map<Identifier, Value>& replacement) {
  if (replacement.empty()) return t;
  return detail::rewrite(
      t,
      [&](const Identifier& id) -> std::optional<Expression> {
        auto it = replacement.find(id);
        if (it == replacement.end()) return std::nullopt;
        return Expression::of(it->second);
      },
      [](const Identifier& b) -> std::optional<Identifier> { return b; });
}

}  // namespace mucows
