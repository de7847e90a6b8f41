#include "mucows/explorer.hpp"

#include <exception>
#include <random>
#include <set>
#include <thread>

namespace mucows {

CommSummary summarize(const Communication& c, std::size_t choice) {
  CommSummary s;
  s.partner = c.partner;
  s.operation = c.operation;
  s.payload = c.payload;
  for (const auto& [id, binding] : c.sigma) s.bound.emplace_back(binding.first.display, binding.second);
  s.domain_size = c.domain_size;
  s.via_unfolding = c.via_unfolding;
  s.choice = choice;
  return s;
}

bool same_label(const CommSummary& a, const CommSummary& b) {
  return a.partner == b.partner && a.operation == b.operation && a.payload == b.payload && a.bound == b.bound &&
         a.domain_size == b.domain_size && a.via_unfolding == b.via_unfolding;
}

State replay(const Trace& trace) {
  State s = trace.initial;
  for (const auto& recorded : trace.steps) {
    auto options = enabled(s);
    if (recorded.choice >= options.size()) throw std::logic_error("trace step does not exist in replay");
    const Communication& c = options[recorded.choice];
    if (!same_label(summarize(c, recorded.choice), recorded))
      throw std::logic_error("trace step label differs in replay");
    s = step(s, c);
  }
  return s;
}

std::string canonical_key(const Term& t) { return structural_key(canonicalize(t)); }

std::optional<std::size_t> Lts::find(const Term& t) const {
  auto it = index.find(canonical_key(t));
  if (it == index.end()) return std::nullopt;
  return it->second;
}

std::vector<std::vector<std::size_t>> Lts::outgoing() const {
  std::vector<std::vector<std::size_t>> out(states.size());
  for (std::size_t i = 0; i < transitions.size(); ++i) out[transitions[i].from].push_back(i);
  return out;
}

namespace {

struct Successor {
  CommSummary label;
  Term canonical;
  std::string key;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> fresh_map;
};

State representative(const Term& canonical) { return State{canonical, max_identifier_id(canonical) + 1}; }

std::vector<Successor> successors(const State& rep) {
  std::set<std::uint64_t> fresh_here;
  for (const auto& id : all_identifiers(rep.term))
    if (id.scope == IdScope::fresh) fresh_here.insert(id.id);

  std::vector<Successor> out;
  auto comms = enabled(rep);
  for (std::size_t i = 0; i < comms.size(); ++i) {
    State next = step(rep, comms[i]);
    FreshRenaming renaming;
    Successor s;
    s.label = summarize(comms[i], i);
    s.canonical = canonicalize(next.term, &renaming);
    s.key = structural_key(s.canonical);
    for (std::uint64_t f : fresh_here)
      if (auto it = renaming.find(f); it != renaming.end()) s.fresh_map.emplace_back(f, it->second);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

Lts explore(const State& initial, const ExploreOptions& options) {
  if (options.max_depth < 1 || options.max_states < 1)
    throw std::invalid_argument("exploration bounds must be at least 1");
  Lts lts;
  Term start = canonicalize(initial.term);
  lts.index.emplace(structural_key(start), 0);
  lts.states.push_back(representative(start));
  lts.depth.push_back(0);

  std::vector<std::size_t> frontier{0};
  for (std::size_t depth = 0; !frontier.empty(); ++depth) {
    if (depth >= options.max_depth) {
      for (std::size_t node : frontier) {
        if (!enabled(lts.states[node]).empty()) {
          lts.truncated = true;
          lts.report = "depth bound " + std::to_string(options.max_depth) + " reached with enabled states";
          break;
        }
      }
      break;
    }

    std::vector<std::vector<Successor>> expanded(frontier.size());
    const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, frontier.size()));
    if (workers == 1) {
      for (std::size_t i = 0; i < frontier.size(); ++i) expanded[i] = successors(lts.states[frontier[i]]);
    } else {
      std::vector<std::exception_ptr> errors(workers);
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (std::size_t i = w; i < frontier.size(); i += workers)
              expanded[i] = successors(lts.states[frontier[i]]);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
      for (auto& t : pool) t.join();
      for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    }

    // Merge in frontier order so the result does not depend on workers.
    std::vector<std::size_t> next_frontier;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      const std::size_t node = frontier[i];
      if (expanded[i].empty()) {
        lts.maximal.push_back(node);
        continue;
      }
      const std::size_t first_out = lts.transitions.size();
      for (auto& s : expanded[i]) {
        std::size_t target;
        if (auto it = lts.index.find(s.key); it != lts.index.end()) {
          target = it->second;
        } else {
          if (lts.states.size() >= options.max_states) {
            lts.truncated = true;
            lts.report = "state bound " + std::to_string(options.max_states) + " reached";
            continue;
          }
          target = lts.states.size();
          lts.index.emplace(s.key, target);
          lts.states.push_back(representative(s.canonical));
          lts.depth.push_back(depth + 1);
          next_frontier.push_back(target);
        }
        bool duplicate = false;
        for (std::size_t k = first_out; k < lts.transitions.size() && !duplicate; ++k)
          duplicate = lts.transitions[k].to == target && same_label(lts.transitions[k].label, s.label);
        if (!duplicate) lts.transitions.push_back({node, target, std::move(s.label), std::move(s.fresh_map)});
      }
    }
    frontier = std::move(next_frontier);
  }
  return lts;
}

Trace random_run(const State& initial, std::uint64_t seed, std::size_t max_steps) {
  Trace trace;
  trace.initial = initial;
  trace.seed = seed;
  std::mt19937_64 rng(seed);
  State s = initial;
  for (std::size_t k = 0; k < max_steps; ++k) {
    auto options = enabled(s);
    if (options.empty()) break;
    std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
    const std::size_t i = pick(rng);
    trace.steps.push_back(summarize(options[i], i));
    s = step(s, options[i]);
  }
  trace.stuck = enabled(s).empty();
  for (const auto& r : unroutable_invokes(s))
    trace.warnings.push_back("invoke on " + to_string(r.partner) + " ! " + to_string(r.operation) +
                             " can never synchronise: endpoint is not a pair of names");
  trace.final = std::move(s);
  return trace;
}

Stepper::Stepper(State initial) {
  history_.push_back(std::move(initial));
  options_ = enabled(history_.back());
}

const State& Stepper::choose(std::size_t index) {
  if (index >= options_.size())
    throw InvalidChoice("choice " + std::to_string(index) + " out of range (" + std::to_string(options_.size()) +
                        " enabled)");
  State next = step(history_.back(), options_[index]);
  steps_.push_back(summarize(options_[index], index));
  history_.push_back(std::move(next));
  options_ = enabled(history_.back());
  return history_.back();
}

bool Stepper::undo() {
  if (history_.size() == 1) return false;
  history_.pop_back();
  steps_.pop_back();
  options_ = enabled(history_.back());
  return true;
}

Trace Stepper::trace() const {
  Trace t;
  t.initial = history_.front();
  t.steps = steps_;
  t.final = history_.back();
  t.stuck = options_.empty();
  return t;
}

}  // namespace mucows
