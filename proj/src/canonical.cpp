#include <algorithm>
#include <functional>
#include <numeric>
#include <unordered_map>

#include "detail/rewrite.hpp"
#include "mucows/ast.hpp"

namespace mucows {

namespace {

enum class KeyMode { exact, anonymous };

// Serializes a term. In anonymous mode bound identifiers are written as
// binder distances and fresh names are numbered locally, so the key of a
// subterm does not depend on how its identifiers happen to be numbered.
class KeyWriter {
 public:
  KeyWriter(KeyMode mode, std::vector<std::uint64_t> stack = {}) : mode_(mode), stack_(std::move(stack)) {}

  void term(const Term& t) {
    std::visit([&](const auto& n) { node(n); }, t.node().v);
  }

  std::string out;

 private:
  void ident(const Identifier& id) {
    switch (id.scope) {
      case IdScope::global:
        out += "g:";
        out += id.display;
        return;
      case IdScope::fresh:
        if (mode_ == KeyMode::exact) {
          out += 'f';
          out += std::to_string(id.id);
        } else {
          auto [it, inserted] = fresh_local_.try_emplace(id.id, fresh_local_.size());
          out += "f#";
          out += std::to_string(it->second);
        }
        return;
      case IdScope::bound:
        out += id.is_variable() ? 'v' : 'n';
        if (mode_ == KeyMode::anonymous) {
          for (std::size_t i = stack_.size(); i-- > 0;) {
            if (stack_[i] == id.id) {
              out += 'b';
              out += std::to_string(stack_.size() - 1 - i);
              return;
            }
          }
          out += 'u';
        }
        out += std::to_string(id.id);
        return;
    }
  }

  void value(const Value& v) {
    if (const Identifier* n = v.as_name()) {
      ident(*n);
    } else if (const auto* i = std::get_if<std::int64_t>(&v.repr)) {
      out += 'i';
      out += std::to_string(*i);
    } else {
      out += 's';
      out += to_string(v);
    }
  }

  void expr(const Expression& e) {
    if (const Identifier* v = e.variable()) {
      ident(*v);
    } else {
      value(*e.value());
    }
  }

  void exprs(const std::vector<Expression>& es) {
    for (std::size_t i = 0; i < es.size(); ++i) {
      if (i) out += ',';
      expr(es[i]);
    }
  }

  void node(const Nil&) { out += '0'; }

  void node(const Invoke& n) {
    out += "I(";
    expr(n.endpoint.partner);
    out += ',';
    expr(n.endpoint.operation);
    out += ':';
    exprs(n.args);
    out += ')';
  }

  void node(const Choice& n) {
    out += "C(";
    for (std::size_t i = 0; i < n.branches.size(); ++i) {
      const auto& b = n.branches[i];
      if (i) out += '+';
      out += "R(";
      expr(b.endpoint.partner);
      out += ',';
      expr(b.endpoint.operation);
      out += ':';
      exprs(b.pattern);
      out += ").";
      term(b.continuation);
    }
    out += ')';
  }

  void node(const Parallel& n) {
    out += "P(";
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      if (i) out += '|';
      term(n.children[i]);
    }
    out += ')';
  }

  void node(const Delim& n) {
    out += "D(";
    for (std::size_t i = 0; i < n.binders.size(); ++i) {
      if (i) out += ',';
      const auto& b = n.binders[i];
      out += b.is_variable() ? 'v' : 'n';
      if (mode_ == KeyMode::exact) out += std::to_string(b.id);
    }
    out += ')';
    for (const auto& b : n.binders) stack_.push_back(b.id);
    term(n.body);
    stack_.resize(stack_.size() - n.binders.size());
  }

  void node(const Repl& n) {
    out += '*';
    term(n.body);
  }

  KeyMode mode_;
  std::vector<std::uint64_t> stack_;
  std::map<std::uint64_t, std::size_t> fresh_local_;
};

std::string anonymous_key(const Term& t, const std::vector<std::uint64_t>& stack) {
  KeyWriter w(KeyMode::anonymous, stack);
  w.term(t);
  return std::move(w.out);
}

bool contains_fresh(const Term& t) {
  bool found = false;
  detail::for_each_identifier(t, [&](const Identifier& id, bool) { found = found || id.scope == IdScope::fresh; });
  return found;
}

// Pass 1: flatten parallels, drop 0, merge nested delimitations, drop
// unused binders, open active name delimitations.
class Simplifier {
 public:
  explicit Simplifier(std::uint64_t& next_id) : next_id_(next_id) {}

  Term run(const Term& t, bool active) {
    return std::visit([&](const auto& n) { return node(t, n, active); }, t.node().v);
  }

 private:
  Term node(const Term& t, const Nil&, bool) { return t; }
  Term node(const Term& t, const Invoke&, bool) { return t; }

  Term node(const Term&, const Choice& n, bool) {
    std::vector<ReceiveBranch> branches;
    branches.reserve(n.branches.size());
    for (const auto& b : n.branches) branches.push_back({b.endpoint, b.pattern, run(b.continuation, false)});
    return Term::choice(std::move(branches));
  }

  Term node(const Term&, const Parallel& n, bool active) {
    std::vector<Term> flat;
    for (const auto& c : n.children) {
      Term s = run(c, active);
      if (const auto* p = s.as<Parallel>()) {
        flat.insert(flat.end(), p->children.begin(), p->children.end());
      } else if (!s.is_nil()) {
        flat.push_back(std::move(s));
      }
    }
    if (flat.empty()) return Term::nil();
    if (flat.size() == 1) return flat.front();
    return Term::parallel(std::move(flat));
  }

  Term node(const Term&, const Delim& n, bool active) {
    Term body = run(n.body, active);
    std::vector<Identifier> binders = n.binders;
    while (const auto* inner = body.as<Delim>()) {
      binders.insert(binders.end(), inner->binders.begin(), inner->binders.end());
      Term next = inner->body;
      body = std::move(next);
    }
    auto used = free_identifiers(body);
    std::vector<Identifier> kept;
    std::map<Identifier, Value> opened;
    for (const auto& b : binders) {
      if (!used.count(b)) continue;
      if (active && b.is_name()) {
        opened.emplace(b, Value::name(Identifier::fresh_name(next_id_++, b.display)));
      } else {
        kept.push_back(b);
      }
    }
    body = replace_identifiers(body, opened);
    if (kept.empty()) return body;
    return Term::delim(std::move(kept), std::move(body));
  }

  Term node(const Term&, const Repl& n, bool) {
    Term body = run(n.body, false);
    if (body.is_nil()) return body;
    return Term::repl(std::move(body));
  }

  std::uint64_t& next_id_;
};

// Pass 2: order parallel components by their anonymous key (exact key as
// tie-break so the result is deterministic).
Term sort_components(const Term& t, std::vector<std::uint64_t>& stack) {
  return std::visit(
      [&](const auto& n) -> Term {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Choice>) {
          std::vector<ReceiveBranch> branches;
          for (const auto& b : n.branches)
            branches.push_back({b.endpoint, b.pattern, sort_components(b.continuation, stack)});
          return Term::choice(std::move(branches));
        } else if constexpr (std::is_same_v<T, Parallel>) {
          struct Keyed {
            std::string anon;
            std::string exact;
            Term term;
          };
          std::vector<Keyed> kids;
          for (const auto& c : n.children) {
            Term s = sort_components(c, stack);
            kids.push_back({anonymous_key(s, stack), structural_key(s), s});
          }
          std::stable_sort(kids.begin(), kids.end(), [](const Keyed& a, const Keyed& b) {
            return std::tie(a.anon, a.exact) < std::tie(b.anon, b.exact);
          });
          std::vector<Term> out;
          for (auto& k : kids) out.push_back(std::move(k.term));
          return Term::parallel(std::move(out));
        } else if constexpr (std::is_same_v<T, Delim>) {
          for (const auto& b : n.binders) stack.push_back(b.id);
          Term body = sort_components(n.body, stack);
          stack.resize(stack.size() - n.binders.size());
          return Term::delim(n.binders, std::move(body));
        } else if constexpr (std::is_same_v<T, Repl>) {
          return Term::repl(sort_components(n.body, stack));
        } else {
          return t;
        }
      },
      t.node().v);
}

// Runs of parallel components that are indistinguishable up to fresh names.
struct TieGroup {
  const TermNode* node;
  std::size_t start;
  std::size_t length;
};

void collect_ties(const Term& t, std::vector<std::uint64_t>& stack, std::vector<TieGroup>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Choice>) {
          for (const auto& b : n.branches) collect_ties(b.continuation, stack, out);
        } else if constexpr (std::is_same_v<T, Parallel>) {
          std::vector<std::string> keys;
          for (const auto& c : n.children) keys.push_back(anonymous_key(c, stack));
          for (std::size_t i = 0; i < keys.size();) {
            std::size_t j = i + 1;
            while (j < keys.size() && keys[j] == keys[i]) ++j;
            if (j - i > 1 && contains_fresh(n.children[i])) out.push_back({t.identity(), i, j - i});
            i = j;
          }
          for (const auto& c : n.children) collect_ties(c, stack, out);
        } else if constexpr (std::is_same_v<T, Delim>) {
          for (const auto& b : n.binders) stack.push_back(b.id);
          collect_ties(n.body, stack, out);
          stack.resize(stack.size() - n.binders.size());
        } else if constexpr (std::is_same_v<T, Repl>) {
          collect_ties(n.body, stack, out);
        }
      },
      t.node().v);
}

// Pass 3: renumber bound ids at their binders and fresh ids at their
// first occurrence, visiting tied components in the given order.
class Renumberer {
 public:
  using Orders = std::map<const TermNode*, std::vector<std::size_t>>;

  explicit Renumberer(const Orders& orders) : orders_(orders) {}

  Term run(const Term& t) {
    return std::visit([&](const auto& n) { return node(t, n); }, t.node().v);
  }

  FreshRenaming fresh_map;

 private:
  Identifier ident(const Identifier& id) {
    Identifier r = id;
    if (id.scope == IdScope::bound) {
      auto [it, inserted] = bound_.try_emplace(id.id, next_bound_);
      if (inserted) ++next_bound_;
      r.id = it->second;
    } else if (id.scope == IdScope::fresh) {
      auto [it, inserted] = fresh_map.try_emplace(id.id, next_fresh_);
      if (inserted) ++next_fresh_;
      r.id = it->second;
    }
    return r;
  }

  Expression expr(const Expression& e) {
    if (const Identifier* v = e.variable()) return Expression::var(ident(*v));
    if (const Identifier* n = e.value()->as_name()) return Expression::of(Value::name(ident(*n)));
    return e;
  }

  std::vector<Expression> exprs(const std::vector<Expression>& es) {
    std::vector<Expression> out;
    for (const auto& e : es) out.push_back(expr(e));
    return out;
  }

  Term node(const Term& t, const Nil&) { return t; }

  Term node(const Term&, const Invoke& n) {
    Endpoint ep{expr(n.endpoint.partner), expr(n.endpoint.operation)};
    return Term::invoke(std::move(ep), exprs(n.args));
  }

  Term node(const Term&, const Choice& n) {
    std::vector<ReceiveBranch> branches;
    for (const auto& b : n.branches) {
      Endpoint ep{expr(b.endpoint.partner), expr(b.endpoint.operation)};
      auto pattern = exprs(b.pattern);
      branches.push_back({std::move(ep), std::move(pattern), run(b.continuation)});
    }
    return Term::choice(std::move(branches));
  }

  Term node(const Term& t, const Parallel& n) {
    std::vector<std::size_t> order(n.children.size());
    std::iota(order.begin(), order.end(), 0);
    if (auto it = orders_.find(t.identity()); it != orders_.end()) order = it->second;
    std::vector<Term> kids;
    for (std::size_t i : order) kids.push_back(run(n.children[i]));
    return Term::parallel(std::move(kids));
  }

  Term node(const Term&, const Delim& n) {
    std::vector<Identifier> binders;
    for (const auto& b : n.binders) {
      Identifier r = b;
      r.id = next_bound_++;
      bound_[b.id] = r.id;
      binders.push_back(std::move(r));
    }
    return Term::delim(std::move(binders), run(n.body));
  }

  Term node(const Term&, const Repl& n) { return Term::repl(run(n.body)); }

  const Orders& orders_;
  std::map<std::uint64_t, std::uint64_t> bound_;
  std::uint64_t next_bound_ = 1;
  std::uint64_t next_fresh_ = 1;
};

constexpr std::size_t kMaxTieOrderings = 5040;

}  // namespace

std::string structural_key(const Term& t) {
  KeyWriter w(KeyMode::exact);
  w.term(t);
  return std::move(w.out);
}

Term normalize(const Term& t, std::uint64_t& next_id) {
  Simplifier simplify(next_id);
  Term s = simplify.run(t, true);
  std::vector<std::uint64_t> stack;
  return sort_components(s, stack);
}

Term canonicalize(const Term& t, FreshRenaming* renaming) {
  std::uint64_t scratch = max_identifier_id(t) + 1;
  const std::uint64_t first_opened = scratch;
  Term sorted = normalize(t, scratch);

  std::vector<std::uint64_t> stack;
  std::vector<TieGroup> ties;
  collect_ties(sorted, stack, ties);

  std::size_t total = 1;
  for (const auto& g : ties) {
    for (std::size_t k = 2; k <= g.length && total <= kMaxTieOrderings; ++k) total *= k;
  }
  if (total > kMaxTieOrderings) ties.clear();

  // Odometer over the permutations of every tie group; keep the
  // lexicographically smallest renumbered key.
  std::vector<std::vector<std::size_t>> perms;
  for (const auto& g : ties) {
    std::vector<std::size_t> p(g.length);
    std::iota(p.begin(), p.end(), 0);
    perms.push_back(std::move(p));
  }

  std::optional<Term> best;
  std::string best_key;
  FreshRenaming best_map;
  for (;;) {
    Renumberer::Orders orders;
    for (std::size_t gi = 0; gi < ties.size(); ++gi) {
      const auto& g = ties[gi];
      const auto* par = std::get_if<Parallel>(&g.node->v);
      auto& order = orders[g.node];
      if (order.empty()) {
        order.resize(par->children.size());
        std::iota(order.begin(), order.end(), 0);
      }
      for (std::size_t k = 0; k < g.length; ++k) order[g.start + k] = g.start + perms[gi][k];
    }
    Renumberer renumber(orders);
    Term candidate = renumber.run(sorted);
    std::string key = structural_key(candidate);
    if (!best || key < best_key) {
      best = std::move(candidate);
      best_key = std::move(key);
      best_map = std::move(renumber.fresh_map);
    }
    std::size_t gi = 0;
    while (gi < perms.size() && !std::next_permutation(perms[gi].begin(), perms[gi].end())) ++gi;
    if (gi == perms.size()) break;
  }

  if (renaming) {
    renaming->clear();
    for (const auto& [from, to] : best_map)
      if (from < first_opened) (*renaming)[from] = to;
  }
  return *best;
}

bool alpha_equivalent(const Term& a, const Term& b) {
  return structural_key(canonicalize(a)) == structural_key(canonicalize(b));
}

}  // namespace mucows
