#include "oracles.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace oracle {

using namespace mucows;

std::optional<std::vector<std::pair<std::uint64_t, Value>>> brute_match(const std::vector<TemplateElement>& pattern,
                                                                       const std::vector<Value>& payload) {
  if (pattern.size() != payload.size()) return std::nullopt;
  std::vector<std::pair<std::uint64_t, Value>> out;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (pattern[i].is_value()) {
      if (!(*pattern[i].value() == payload[i])) return std::nullopt;
    } else {
      out.emplace_back(pattern[i].variable()->id, payload[i]);
    }
  }
  return out;
}

namespace {

void free_rec(const Term& t, std::vector<Identifier>& bound, std::set<Identifier>& out) {
  auto use = [&](const Identifier& id) {
    for (const auto& b : bound)
      if (b == id) return;
    out.insert(id);
  };
  auto use_expr = [&](const Expression& e) {
    if (e.variable()) {
      use(*e.variable());
    } else if (const Identifier* n = e.value()->as_name()) {
      use(*n);
    }
  };
  if (t.as<Nil>()) return;
  if (const auto* i = t.as<Invoke>()) {
    use_expr(i->endpoint.partner);
    use_expr(i->endpoint.operation);
    for (const auto& a : i->args) use_expr(a);
  } else if (const auto* c = t.as<Choice>()) {
    for (const auto& b : c->branches) {
      use_expr(b.endpoint.partner);
      use_expr(b.endpoint.operation);
      for (const auto& p : b.pattern) use_expr(p);
      free_rec(b.continuation, bound, out);
    }
  } else if (const auto* p = t.as<Parallel>()) {
    for (const auto& k : p->children) free_rec(k, bound, out);
  } else if (const auto* d = t.as<Delim>()) {
    const std::size_t mark = bound.size();
    bound.insert(bound.end(), d->binders.begin(), d->binders.end());
    free_rec(d->body, bound, out);
    bound.resize(mark);
  } else if (const auto* r = t.as<Repl>()) {
    free_rec(r->body, bound, out);
  }
}

void active_rec(const Term& t, std::vector<ActiveReceive>& out) {
  if (const auto* c = t.as<Choice>()) {
    for (const auto& b : c->branches) out.push_back({b.endpoint, b.pattern});
  } else if (const auto* p = t.as<Parallel>()) {
    for (const auto& k : p->children) active_rec(k, out);
  } else if (const auto* d = t.as<Delim>()) {
    active_rec(d->body, out);
  } else if (const auto* r = t.as<Repl>()) {
    active_rec(r->body, out);
  }
}

}  // namespace

std::set<Identifier> naive_free(const Term& t) {
  std::vector<Identifier> bound;
  std::set<Identifier> out;
  free_rec(t, bound, out);
  return out;
}

std::set<std::uint64_t> variable_uses(const Term& t) {
  // Free identifiers of the body with every binder list emptied out.
  std::set<std::uint64_t> out;
  std::function<void(const Term&)> rec = [&](const Term& u) {
    std::vector<Identifier> none;
    std::set<Identifier> ids;
    if (const auto* d = u.as<Delim>()) {
      rec(d->body);
      return;
    }
    if (const auto* p = u.as<Parallel>()) {
      for (const auto& k : p->children) rec(k);
      return;
    }
    if (const auto* r = u.as<Repl>()) {
      rec(r->body);
      return;
    }
    if (const auto* c = u.as<Choice>()) {
      for (const auto& b : c->branches) {
        for (const auto& e : b.pattern)
          if (e.variable()) out.insert(e.variable()->id);
        rec(b.continuation);
      }
      return;
    }
    if (u.as<Invoke>()) {
      free_rec(u, none, ids);
      for (const auto& id : ids)
        if (id.is_variable()) out.insert(id.id);
    }
  };
  rec(t);
  return out;
}

std::vector<ActiveReceive> active_receives(const Term& t) {
  std::vector<ActiveReceive> out;
  active_rec(t, out);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

const std::vector<std::string> kGlobals = {"a", "b", "c", "p", "o", "n"};

}  // namespace

Value TermGenerator::name_value(const std::vector<Identifier>& scope) {
  std::vector<Identifier> names;
  for (const auto& id : scope)
    if (id.is_name()) names.push_back(id);
  if (!names.empty() && pick(3) == 0) return Value::name(names[pick(names.size())]);
  return Value::name(Identifier::global_name(kGlobals[pick(kGlobals.size())]));
}

Expression TermGenerator::expr(const std::vector<Identifier>& scope, bool allow_literal) {
  std::vector<Identifier> vars;
  for (const auto& id : scope)
    if (id.is_variable()) vars.push_back(id);
  const std::size_t r = pick(10);
  if (!vars.empty() && r < 4) return Expression::var(vars[pick(vars.size())]);
  if (allow_literal && r == 4) return Expression::of(Value::integer(static_cast<std::int64_t>(pick(3)) * 7 - 1));
  if (allow_literal && r == 5) return Expression::of(Value::string(pick(2) ? "s" : "t"));
  return Expression::of(name_value(scope));
}

Term TermGenerator::gen(int depth, std::vector<Identifier>& scope) {
  const std::size_t kind = depth <= 0 ? (pick(4) == 0 ? 0 : 1) : pick(7);
  switch (kind) {
    case 0:
      return Term::nil();
    case 1:
    case 6: {
      std::vector<Expression> args;
      for (std::size_t i = pick(3); i > 0; --i) args.push_back(expr(scope, true));
      return Term::invoke({expr(scope, pick(8) == 0), expr(scope, false)}, std::move(args));
    }
    case 2: {
      std::vector<ReceiveBranch> branches;
      for (std::size_t b = 1 + pick(2); b > 0; --b) {
        std::vector<Identifier> vars;
        for (const auto& id : scope)
          if (id.is_variable()) vars.push_back(id);
        std::vector<TemplateElement> pattern;
        for (std::size_t i = pick(3); i > 0; --i) {
          if (!vars.empty() && pick(2) == 0) {
            const std::size_t k = pick(vars.size());
            pattern.push_back(Expression::var(vars[k]));
            vars.erase(vars.begin() + static_cast<std::ptrdiff_t>(k));
          } else {
            pattern.push_back(expr({}, true));
          }
        }
        Term cont = pick(2) ? gen(depth - 1, scope) : Term::nil();
        branches.push_back({{Expression::of(name_value(scope)), Expression::of(name_value(scope))},
                            std::move(pattern),
                            std::move(cont)});
      }
      return Term::choice(std::move(branches));
    }
    case 3: {
      std::vector<Term> kids;
      for (std::size_t i = 2 + pick(2); i > 0; --i) kids.push_back(gen(depth - 1, scope));
      return Term::parallel(std::move(kids));
    }
    case 4: {
      static const char* var_names[] = {"x", "y", "z"};
      static const char* name_names[] = {"n", "m", "k"};
      std::vector<Identifier> binders;
      for (std::size_t i = 1 + pick(2); i > 0; --i) {
        if (pick(3) == 0) {
          binders.push_back(Identifier::bound_name(next_id_++, name_names[pick(3)]));
        } else {
          binders.push_back(Identifier::variable(next_id_++, var_names[pick(3)]));
        }
      }
      scope.insert(scope.end(), binders.begin(), binders.end());
      Term body = gen(depth - 1, scope);
      scope.resize(scope.size() - binders.size());
      return Term::delim(std::move(binders), std::move(body));
    }
    default:
      return Term::repl(gen(depth - 1, scope));
  }
}

Term TermGenerator::term(int depth) {
  std::vector<Identifier> scope;
  return gen(depth, scope);
}

namespace {

Term rebuild(const Term& t, const std::function<Identifier(const Identifier&)>& f) {
  auto ex = [&](const Expression& e) {
    if (e.variable()) return Expression::var(f(*e.variable()));
    if (const Identifier* n = e.value()->as_name()) return Expression::of(Value::name(f(*n)));
    return e;
  };
  auto exs = [&](const std::vector<Expression>& es) {
    std::vector<Expression> out;
    for (const auto& e : es) out.push_back(ex(e));
    return out;
  };
  if (t.as<Nil>()) return t;
  if (const auto* i = t.as<Invoke>()) return Term::invoke({ex(i->endpoint.partner), ex(i->endpoint.operation)}, exs(i->args));
  if (const auto* c = t.as<Choice>()) {
    std::vector<ReceiveBranch> bs;
    for (const auto& b : c->branches)
      bs.push_back({{ex(b.endpoint.partner), ex(b.endpoint.operation)}, exs(b.pattern), rebuild(b.continuation, f)});
    return Term::choice(std::move(bs));
  }
  if (const auto* p = t.as<Parallel>()) {
    std::vector<Term> kids;
    for (const auto& k : p->children) kids.push_back(rebuild(k, f));
    return Term::parallel(std::move(kids));
  }
  if (const auto* d = t.as<Delim>()) {
    std::vector<Identifier> bs;
    for (const auto& b : d->binders) bs.push_back(f(b));
    return Term::delim(std::move(bs), rebuild(d->body, f));
  }
  return Term::repl(rebuild(t.as<Repl>()->body, f));
}

}  // namespace

Term TermGenerator::shuffle(const Term& t) {
  if (const auto* p = t.as<Parallel>()) {
    std::vector<Term> kids;
    for (const auto& k : p->children) kids.push_back(shuffle(k));
    std::shuffle(kids.begin(), kids.end(), rng_);
    return Term::parallel(std::move(kids));
  }
  if (const auto* c = t.as<Choice>()) {
    std::vector<ReceiveBranch> bs;
    for (const auto& b : c->branches) bs.push_back({b.endpoint, b.pattern, shuffle(b.continuation)});
    return Term::choice(std::move(bs));
  }
  if (const auto* d = t.as<Delim>()) return Term::delim(d->binders, shuffle(d->body));
  if (const auto* r = t.as<Repl>()) return Term::repl(shuffle(r->body));
  return t;
}

Term TermGenerator::alpha_variant(const Term& t) {
  std::map<std::uint64_t, Identifier> renamed;
  const std::uint64_t base = 100000 + next_id_;
  next_id_ += 1000;
  Term r = rebuild(t, [&](const Identifier& id) {
    if (id.scope != IdScope::bound) return id;
    auto it = renamed.find(id.id);
    if (it == renamed.end()) {
      Identifier fresh = id;
      fresh.id = base + renamed.size();
      fresh.display = (id.is_variable() ? "v" : "w") + std::to_string(renamed.size());
      it = renamed.emplace(id.id, fresh).first;
    }
    return it->second;
  });
  return shuffle(r);
}

ScenarioSpec random_spec(std::mt19937_64& rng, int max_players, int max_table) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  static const char* games[] = {"burraco", "canasta", "poker"};
  ScenarioSpec spec;
  spec.table_size = pick(2, max_table);
  const int players = pick(1, max_players);
  const int game_count = pick(1, 3);
  for (int i = 0; i < players; ++i) spec.players.push_back({"p" + std::to_string(i), games[pick(0, game_count - 1)]});
  return spec;
}

// ---------------------------------------------------------------------------

namespace {

void walk(const State& s, const std::string& op, std::map<std::string, std::vector<Value>>& sent, TreeSummary& out) {
  out.states.insert(canonical_key(s.term));
  auto options = enabled(s);
  if (options.empty()) {
    ++out.maximal_traces;
    out.maximal_states.insert(canonical_key(s.term));
    out.sent.push_back(sent);
    return;
  }
  for (const auto& c : options) {
    const bool interesting = c.operation.as_name() && c.operation.as_name()->display == op && !c.payload.empty() &&
                             c.partner.as_name();
    if (interesting) sent[c.partner.as_name()->display].push_back(c.payload[0]);
    walk(step(s, c), op, sent, out);
    if (interesting) {
      auto& list = sent[c.partner.as_name()->display];
      list.pop_back();
      if (list.empty()) sent.erase(c.partner.as_name()->display);
    }
  }
}

}  // namespace

TreeSummary enumerate(const State& initial, const std::string& op_of_interest) {
  TreeSummary out;
  std::map<std::string, std::vector<Value>> sent;
  walk(initial, op_of_interest, sent, out);
  return out;
}

std::uint64_t count_maximal_paths(const Lts& lts) {
  const auto out = lts.outgoing();
  std::vector<std::optional<std::uint64_t>> memo(lts.states.size());
  std::function<std::uint64_t(std::size_t)> paths = [&](std::size_t n) -> std::uint64_t {
    if (memo[n]) return *memo[n];
    std::uint64_t total = out[n].empty() ? 1 : 0;
    for (std::size_t t : out[n]) total += paths(lts.transitions[t].to);
    memo[n] = total;
    return total;
  };
  return paths(lts.initial);
}

Term resolve(const Term& t, const std::vector<std::uint32_t>& path) {
  Term cur = t;
  for (std::uint32_t i : path) {
    if (const auto* p = cur.as<Parallel>()) {
      cur = p->children.at(i);
    } else if (const auto* d = cur.as<Delim>()) {
      cur = d->body;
    } else if (const auto* r = cur.as<Repl>()) {
      cur = r->body;
    } else {
      throw std::out_of_range("path does not resolve");
    }
  }
  return cur;
}

namespace {

template <class Node>
std::size_t count_nodes(const Term& t) {
  std::size_t n = t.as<Node>() ? 1 : 0;
  if (const auto* c = t.as<Choice>()) {
    for (const auto& b : c->branches) n += count_nodes<Node>(b.continuation);
  } else if (const auto* p = t.as<Parallel>()) {
    for (const auto& k : p->children) n += count_nodes<Node>(k);
  } else if (const auto* d = t.as<Delim>()) {
    n += count_nodes<Node>(d->body);
  } else if (const auto* r = t.as<Repl>()) {
    n += count_nodes<Node>(r->body);
  }
  return n;
}

}  // namespace

std::size_t count_invokes(const Term& t) { return count_nodes<Invoke>(t); }
std::size_t count_choices(const Term& t) { return count_nodes<Choice>(t); }

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace oracle
