#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "mucows/ast.hpp"

namespace mucows::detail {

// Rebuilds a term bottom-up.
//   on_occurrence(const Identifier&) -> std::optional<Expression>
//     replacement for a name/variable occurrence, or nullopt to keep it.
//   on_binder(const Identifier&) -> std::optional<Identifier>
//     the (possibly renamed) binder, or nullopt to drop it.
// A delimitation left without binders collapses into its body.
template <class OnOccurrence, class OnBinder>
class Rewriter {
 public:
  Rewriter(OnOccurrence& occ, OnBinder& bind) : occ_(occ), bind_(bind) {}

  Term term(const Term& t) {
    return std::visit([&](const auto& n) { return node(n); }, t.node().v);
  }

 private:
  Expression expr(const Expression& e) {
    const Identifier* id = e.variable();
    if (!id && e.value()) id = e.value()->as_name();
    if (id) {
      if (auto r = occ_(*id)) return *r;
    }
    return e;
  }

  Endpoint endpoint(const Endpoint& ep) { return {expr(ep.partner), expr(ep.operation)}; }

  std::vector<Expression> exprs(const std::vector<Expression>& es) {
    std::vector<Expression> out;
    out.reserve(es.size());
    for (const auto& e : es) out.push_back(expr(e));
    return out;
  }

  Term node(const Nil&) { return Term::nil(); }

  Term node(const Invoke& n) { return Term::invoke(endpoint(n.endpoint), exprs(n.args)); }

  Term node(const Choice& n) {
    std::vector<ReceiveBranch> branches;
    branches.reserve(n.branches.size());
    for (const auto& b : n.branches)
      branches.push_back({endpoint(b.endpoint), exprs(b.pattern), term(b.continuation)});
    return Term::choice(std::move(branches));
  }

  Term node(const Parallel& n) {
    std::vector<Term> children;
    children.reserve(n.children.size());
    for (const auto& c : n.children) children.push_back(term(c));
    return Term::parallel(std::move(children));
  }

  Term node(const Delim& n) {
    std::vector<Identifier> binders;
    for (const auto& b : n.binders)
      if (auto r = bind_(b)) binders.push_back(std::move(*r));
    Term body = term(n.body);
    if (binders.empty()) return body;
    return Term::delim(std::move(binders), std::move(body));
  }

  Term node(const Repl& n) { return Term::repl(term(n.body)); }

  OnOccurrence& occ_;
  OnBinder& bind_;
};

template <class OnOccurrence, class OnBinder>
Term rewrite(const Term& t, OnOccurrence occ, OnBinder bind) {
  Rewriter<OnOccurrence, OnBinder> r(occ, bind);
  return r.term(t);
}

// Calls fn(const Identifier&, bool is_binder) for every identifier in t,
// in traversal order.
template <class Fn>
void for_each_identifier(const Term& t, Fn&& fn) {
  auto ex = [&](const Expression& e) {
    if (const Identifier* v = e.variable()) {
      fn(*v, false);
    } else if (const Identifier* n = e.value()->as_name()) {
      fn(*n, false);
    }
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
            for_each_identifier(b.continuation, fn);
          }
        } else if constexpr (std::is_same_v<T, Parallel>) {
          for (const auto& c : n.children) for_each_identifier(c, fn);
        } else if constexpr (std::is_same_v<T, Delim>) {
          for (const auto& b : n.binders) fn(b, true);
          for_each_identifier(n.body, fn);
        } else if constexpr (std::is_same_v<T, Repl>) {
          for_each_identifier(n.body, fn);
        }
      },
      t.node().v);
}

}  // namespace mucows::detail
