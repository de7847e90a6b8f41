#pragma once

// Operational semantics of muCOWS: template matching, the set of enabled
// communications under the smallest-domain priority rule, and single
// reduction steps with lazy replication unfolding.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mucows/ast.hpp"

namespace mucows {

// Path of child indices from the root. Parallel contributes the child
// index, Delim and Repl contribute 0 (a Repl step means "inside the
// unfolded copy").
struct Position {
  std::vector<std::uint32_t> path;
  friend bool operator==(const Position&, const Position&) = default;
};

struct State {
  Term term;
  // Exceeds every bound or fresh identifier id occurring in term.
  std::uint64_t fresh_counter = 1;

  // Normalises t and sets the counter past its largest id.
  static State initial(const Term& t);
};

struct Communication {
  Value partner;
  Value operation;
  std::vector<Value> payload;
  Substitution sigma;
  Position invoker;
  Position receiver;
  std::uint32_t receiver_branch = 0;
  bool via_unfolding = false;
  std::size_t domain_size = 0;
  std::uint64_t state_fingerprint = 0;
};

class StaleCommunication : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

std::optional<Substitution> match(const std::vector<TemplateElement>& pattern, const std::vector<Value>& payload);

struct ReadyInvoke {
  Position position;
  Value partner;
  Value operation;
  std::vector<Value> payload;
  bool via_unfolding = false;
};

struct CandidateReceive {
  Position position;
  std::uint32_t branch = 0;
  Substitution sigma;
  bool via_unfolding = false;
};

// Active activities of a term: everything not guarded by a receive
// prefix. A Repl contributes the activities of one speculative copy of
// its body, marked via_unfolding.
struct ActiveInvoke {
  Position position;
  const Invoke* invoke;
  bool via_unfolding;
};

struct ActiveChoice {
  Position position;
  const Choice* choice;
  bool via_unfolding;
};

struct ActiveView {
  std::vector<ActiveInvoke> invokes;
  std::vector<ActiveChoice> choices;
};

// The returned view points into t; t must outlive it.
ActiveView unfold(const Term& t);

std::vector<ReadyInvoke> ready_invokes(const State& s);

std::vector<CandidateReceive> candidate_receives(const State& s, const Value& partner, const Value& operation,
                                                 const std::vector<Value>& payload);

// For every ready invoke, the matching receives of minimal substitution
// domain. Ties are all kept. Deterministic order.
std::vector<Communication> enabled(const State& s);

// Throws StaleCommunication when c was not computed from s.
State step(const State& s, const Communication& c);

std::uint64_t fingerprint(const State& s);

// Ready invokes whose endpoint is not a pair of names; they can never
// synchronise.
std::vector<ReadyInvoke> unroutable_invokes(const State& s);

}  // namespace mucows
