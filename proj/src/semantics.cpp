#include "mucows/semantics.hpp"

#include <algorithm>
#include <functional>
#include <limits>

namespace mucows {

State State::initial(const Term& t) {
  State s;
  s.fresh_counter = max_identifier_id(t) + 1;
  s.term = normalize(t, s.fresh_counter);
  return s;
}

std::uint64_t fingerprint(const State& s) {
  return std::hash<std::string>{}(structural_key(s.term)) ^ (s.fresh_counter * 0x9E3779B97F4A7C15ull);
}

std::optional<Substitution> match(const std::vector<TemplateElement>& pattern, const std::vector<Value>& payload) {
  if (pattern.size() != payload.size()) return std::nullopt;
  Substitution sigma;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (const Identifier* v = pattern[i].variable()) {
      sigma.bind(*v, payload[i]);
    } else if (*pattern[i].value() != payload[i]) {
      return std::nullopt;
    }
  }
  return sigma;
}

namespace {

void collect_active(const Term& t, Position& at, bool via, ActiveView& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Invoke>) {
          out.invokes.push_back({at, &n, via});
        } else if constexpr (std::is_same_v<T, Choice>) {
          out.choices.push_back({at, &n, via});
        } else if constexpr (std::is_same_v<T, Parallel>) {
          for (std::uint32_t i = 0; i < n.children.size(); ++i) {
            at.path.push_back(i);
            collect_active(n.children[i], at, via, out);
            at.path.pop_back();
          }
        } else if constexpr (std::is_same_v<T, Delim>) {
          at.path.push_back(0);
          collect_active(n.body, at, via, out);
          at.path.pop_back();
        } else if constexpr (std::is_same_v<T, Repl>) {
          at.path.push_back(0);
          collect_active(n.body, at, true, out);
          at.path.pop_back();
        }
      },
      t.node().v);
}

std::optional<std::vector<Value>> closed_values(const std::vector<Expression>& es) {
  std::vector<Value> out;
  out.reserve(es.size());
  for (const auto& e : es) {
    if (!e.is_value()) return std::nullopt;
    out.push_back(*e.value());
  }
  return out;
}

std::vector<ReadyInvoke> all_ready(const Term& t) {
  std::vector<ReadyInvoke> out;
  for (const auto& a : unfold(t).invokes) {
    const Endpoint& ep = a.invoke->endpoint;
    if (!ep.partner.is_value() || !ep.operation.is_value()) continue;
    auto payload = closed_values(a.invoke->args);
    if (!payload) continue;
    out.push_back({a.position, *ep.partner.value(), *ep.operation.value(), std::move(*payload), a.via_unfolding});
  }
  return out;
}

bool routable(const ReadyInvoke& r) { return r.partner.is_name() && r.operation.is_name(); }

}  // namespace

ActiveView unfold(const Term& t) {
  ActiveView out;
  Position at;
  collect_active(t, at, false, out);
  return out;
}

std::vector<ReadyInvoke> ready_invokes(const State& s) { return all_ready(s.term); }

std::vector<ReadyInvoke> unroutable_invokes(const State& s) {
  std::vector<ReadyInvoke> out;
  for (auto& r : all_ready(s.term))
    if (!routable(r)) out.push_back(std::move(r));
  return out;
}

std::vector<CandidateReceive> candidate_receives(const State& s, const Value& partner, const Value& operation,
                                                 const std::vector<Value>& payload) {
  std::vector<CandidateReceive> out;
  for (const auto& c : unfold(s.term).choices) {
    for (std::uint32_t b = 0; b < c.choice->branches.size(); ++b) {
      const ReceiveBranch& br = c.choice->branches[b];
      if (*br.endpoint.partner.value() != partner || *br.endpoint.operation.value() != operation) continue;
      if (auto sigma = match(br.pattern, payload)) out.push_back({c.position, b, std::move(*sigma), c.via_unfolding});
    }
  }
  return out;
}

std::vector<Communication> enabled(const State& s) {
  std::vector<Communication> out;
  const std::uint64_t fp = fingerprint(s);
  for (const auto& inv : all_ready(s.term)) {
    if (!routable(inv)) continue;
    auto candidates = candidate_receives(s, inv.partner, inv.operation, inv.payload);
    if (candidates.empty()) continue;
    std::size_t smallest = std::numeric_limits<std::size_t>::max();
    for (const auto& c : candidates) smallest = std::min(smallest, c.sigma.domain_size());
    for (auto& c : candidates) {
      if (c.sigma.domain_size() != smallest) continue;
      Communication comm;
      comm.partner = inv.partner;
      comm.operation = inv.operation;
      comm.payload = inv.payload;
      comm.domain_size = smallest;
      comm.sigma = std::move(c.sigma);
      comm.invoker = inv.position;
      comm.receiver = c.position;
      comm.receiver_branch = c.branch;
      comm.via_unfolding = inv.via_unfolding || c.via_unfolding;
      comm.state_fingerprint = fp;
      out.push_back(std::move(comm));
    }
  }
  return out;
}

namespace {

struct Target {
  const Position* position;
  std::optional<std::uint32_t> branch;  // empty for the invoke
};

// Consumes the invoke, fires the chosen branch and materialises the
// replication copies on the way.
Term commit(const Term& t, const std::vector<Target>& targets, std::size_t depth, std::uint64_t& next_id) {
  if (targets.empty()) return t;
  auto stale = [] { throw StaleCommunication("communication positions do not resolve in this state"); };
  return std::visit(
      [&](const auto& n) -> Term {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Parallel>) {
          std::vector<Term> kids;
          for (std::uint32_t i = 0; i < n.children.size(); ++i) {
            std::vector<Target> sub;
            for (const auto& tg : targets)
              if (tg.position->path.size() > depth && tg.position->path[depth] == i) sub.push_back(tg);
            kids.push_back(commit(n.children[i], sub, depth + 1, next_id));
          }
          return Term::parallel(std::move(kids));
        } else if constexpr (std::is_same_v<T, Delim>) {
          return Term::delim(n.binders, commit(n.body, targets, depth + 1, next_id));
        } else if constexpr (std::is_same_v<T, Repl>) {
          Term copy = commit(n.body, targets, depth + 1, next_id);
          Term kept = Term::repl(rename_binders(n.body, next_id));
          return Term::parallel({std::move(kept), std::move(copy)});
        } else if constexpr (std::is_same_v<T, Invoke>) {
          if (targets.size() != 1 || targets[0].branch || targets[0].position->path.size() != depth) stale();
          return Term::nil();
        } else if constexpr (std::is_same_v<T, Choice>) {
          if (targets.size() != 1 || !targets[0].branch || targets[0].position->path.size() != depth ||
              *targets[0].branch >= n.branches.size())
            stale();
          return n.branches[*targets[0].branch].continuation;
        } else {
          stale();
          return t;
        }
      },
      t.node().v);
}

}  // namespace

State step(const State& s, const Communication& c) {
  if (fingerprint(s) != c.state_fingerprint)
    throw StaleCommunication("communication was computed from a different state");
  State next;
  next.fresh_counter = s.fresh_counter;
  std::vector<Target> targets{{&c.invoker, std::nullopt}, {&c.receiver, c.receiver_branch}};
  Term t = commit(s.term, targets, 0, next.fresh_counter);
  t = apply_substitution(t, c.sigma);
  next.term = normalize(t, next.fresh_counter);
  return next;
}

}  // namespace mucows
