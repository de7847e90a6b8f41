#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mucows/semantics.hpp"

namespace mucows {

// What a trace or LTS records about one communication.
struct CommSummary {
  Value partner;
  Value operation;
  std::vector<Value> payload;
  // Bound variables by display name, in template order.
  std::vector<std::pair<std::string, Value>> bound;
  std::size_t domain_size = 0;
  bool via_unfolding = false;
  // Index of the communication in enabled(source state).
  std::size_t choice = 0;
};

CommSummary summarize(const Communication& c, std::size_t choice);

// Equality of labels, ignoring the choice index.
bool same_label(const CommSummary& a, const CommSummary& b);

struct Trace {
  State initial;
  std::vector<CommSummary> steps;
  State final;
  bool stuck = false;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> warnings;
};

// Folds step over trace.steps from trace.initial.
State replay(const Trace& trace);

struct LtsTransition {
  std::size_t from = 0;
  std::size_t to = 0;
  // Payload values use the ids of the source state.
  CommSummary label;
  // Fresh-name ids of the source state that survive in the target,
  // mapped to their ids there.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> fresh_map;
};

struct Lts {
  // Canonical representatives; index 0 is the initial state.
  std::vector<State> states;
  std::vector<std::size_t> depth;
  std::vector<LtsTransition> transitions;
  std::size_t initial = 0;
  // Expanded states without outgoing transitions.
  std::vector<std::size_t> maximal;
  bool truncated = false;
  std::string report;

  std::optional<std::size_t> find(const Term& t) const;
  std::vector<std::vector<std::size_t>> outgoing() const;

  std::unordered_map<std::string, std::size_t> index;  // canonical key -> state
};

struct ExploreOptions {
  std::size_t max_depth = 64;
  std::size_t max_states = 100000;
  unsigned workers = 1;
};

// Breadth-first construction of the reachable LTS over canonical states.
// Never throws on a budget overrun: sets truncated and explains in report.
Lts explore(const State& initial, const ExploreOptions& options = {});

// Canonical key of a term: equal iff alpha-equivalent.
std::string canonical_key(const Term& t);

// Uniform choice among enabled communications, seeded.
Trace random_run(const State& initial, std::uint64_t seed, std::size_t max_steps);

class InvalidChoice : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Interactive stepping with unbounded undo.
class Stepper {
 public:
  explicit Stepper(State initial);

  const State& current() const { return history_.back(); }
  const std::vector<Communication>& options() const { return options_; }
  std::size_t depth() const { return steps_.size(); }

  // Throws InvalidChoice (state unchanged) if index is out of range.
  const State& choose(std::size_t index);
  // False when already at the initial state.
  bool undo();

  Trace trace() const;

 private:
  std::vector<State> history_;
  std::vector<CommSummary> steps_;
  std::vector<Communication> options_;
};

}  // namespace mucows
