#include <set>

#include "detail/rewrite.hpp"
#include "mucows/parser.hpp"

namespace mucows {

namespace {

// Prints terms in the concrete syntax. Binders get display names that
// neither shadow a visible binder nor clash with a free name, so the
// output always reparses to an alpha-equivalent term.
class Printer {
 public:
  explicit Printer(const Term& t) {
    detail::for_each_identifier(t, [&](const Identifier& id, bool) {
      if (id.scope == IdScope::global) globals_.insert(id.display);
    });
  }

  std::string top(const Term& t) {
    std::vector<Identifier> fresh;
    detail::for_each_identifier(t, [&](const Identifier& id, bool) {
      if (id.scope != IdScope::fresh) return;
      for (const auto& f : fresh)
        if (f == id) return;
      fresh.push_back(id);
    });
    if (fresh.empty()) return term(t);
    // Fresh names are restricted at top level.
    std::string out = "[";
    for (std::size_t i = 0; i < fresh.size(); ++i) {
      if (i) out += ", ";
      out += introduce(fresh[i]);
    }
    out += "] ";
    out += unary(t, true);
    return out;
  }

 private:
  std::string term(const Term& t) {
    if (const auto* p = t.as<Parallel>()) {
      std::string out;
      for (std::size_t i = 0; i < p->children.size(); ++i) {
        if (i) out += " | ";
        out += unary(p->children[i], true);
      }
      return out;
    }
    return unary(t, true);
  }

  std::string unary(const Term& t, bool allow_plus) {
    return std::visit(
        [&](const auto& n) -> std::string {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Nil>) {
            return "0";
          } else if constexpr (std::is_same_v<T, Invoke>) {
            return expr(n.endpoint.partner) + " ! " + expr(n.endpoint.operation) + tuple(n.args);
          } else if constexpr (std::is_same_v<T, Choice>) {
            std::string out;
            for (std::size_t i = 0; i < n.branches.size(); ++i) {
              const auto& b = n.branches[i];
              if (i) out += " + ";
              out += expr(b.endpoint.partner) + " ? " + expr(b.endpoint.operation) + tuple(b.pattern);
              if (!b.continuation.is_nil()) out += ". " + unary(b.continuation, false);
            }
            if (n.branches.size() > 1 && !allow_plus) return "(" + out + ")";
            return out;
          } else if constexpr (std::is_same_v<T, Parallel>) {
            return "(" + term(t) + ")";
          } else if constexpr (std::is_same_v<T, Delim>) {
            std::string out = "[";
            for (std::size_t i = 0; i < n.binders.size(); ++i) {
              if (i) out += ", ";
              out += introduce(n.binders[i]);
            }
            out += "] ";
            out += unary(n.body, allow_plus);
            env_.resize(env_.size() - n.binders.size());
            return out;
          } else {
            return "*" + unary(n.body, allow_plus);
          }
        },
        t.node().v);
  }

  std::string tuple(const std::vector<Expression>& es) {
    std::string out = "<";
    for (std::size_t i = 0; i < es.size(); ++i) {
      if (i) out += ", ";
      out += expr(es[i]);
    }
    return out + ">";
  }

  std::string expr(const Expression& e) {
    if (const Identifier* v = e.variable()) return "$" + display(*v);
    const Value& val = *e.value();
    if (const Identifier* n = val.as_name()) return n->scope == IdScope::global ? n->display : display(*n);
    return to_string(val);
  }

  std::string display(const Identifier& id) const {
    for (std::size_t i = env_.size(); i-- > 0;)
      if (env_[i].first == id) return env_[i].second;
    return id.display;
  }

  bool taken(const std::string& candidate, IdKind kind) const {
    if (kind == IdKind::name && (globals_.count(candidate) || candidate == "let")) return true;
    for (const auto& [id, shown] : env_)
      if (id.kind == kind && shown == candidate) return true;
    return false;
  }

  std::string introduce(const Identifier& id) {
    std::string base = id.display.empty() ? (id.is_variable() ? "x" : "n") : id.display;
    std::string candidate = base;
    for (int n = 1; taken(candidate, id.kind); ++n) candidate = base + "_" + std::to_string(n);
    env_.emplace_back(id, candidate);
    return id.is_variable() ? "$" + candidate : candidate;
  }

  std::set<std::string> globals_;
  std::vector<std::pair<Identifier, std::string>> env_;
};

}  // namespace

std::string pretty(const Term& t) {
  Printer p(t);
  return p.top(t);
}

std::string pretty(const SourceUnit& unit) {
  std::string out;
  for (const auto& d : unit.definitions) out += "let " + d.name + " = " + pretty(d.term) + "\n";
  if (unit.main_name.empty()) out += pretty(unit.main) + "\n";
  return out;
}

}  // namespace mucows
