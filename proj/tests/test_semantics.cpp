#include <doctest.h>

#include "fixtures.hpp"
#include "mucows/semantics.hpp"

using namespace mucows;

namespace {

Value nm(const char* s) { return Value::name(Identifier::global_name(s)); }

std::vector<std::size_t> domains(const std::vector<CandidateReceive>& cs) {
  std::vector<std::size_t> out;
  for (const auto& c : cs) out.push_back(c.sigma.domain_size());
  std::sort(out.begin(), out.end());
  return out;
}

// The state after the given joins, taken in order.
State after_joins(const ScenarioSpec& spec, const std::vector<std::pair<std::string, std::string>>& joins) {
  State s = fixture::initial(spec);
  for (const auto& [game, who] : joins) {
    auto options = enabled(s);
    int i = fixture::option_for(options, "join", game, who);
    REQUIRE(i >= 0);
    s = step(s, options[static_cast<std::size_t>(i)]);
  }
  return s;
}

}  // namespace

TEST_SUITE("semantics") {
  TEST_CASE("matching examples") {
    Term t = parse_term("[$player2] manager ? join<burraco, $player2>");
    const auto& pattern = t.as<Delim>()->body.as<Choice>()->branches[0].pattern;
    auto sigma = match(pattern, {nm("burraco"), nm("p_F")});
    REQUIRE(sigma);
    CHECK(sigma->domain_size() == 1);
    CHECK(*sigma->lookup(*pattern[1].variable()) == nm("p_F"));
    CHECK(match({}, {})->empty());
    CHECK_FALSE(match(pattern, {nm("canasta"), nm("p_F")}));
    CHECK_FALSE(match(pattern, {nm("burraco")}));
    CHECK_FALSE(match(pattern, {nm("burraco"), Value::string("p_F"), nm("x")}));
  }

  TEST_CASE("ready invokes") {
    State luca = State::initial(parse_term("manager ! join<burraco, p_L> | [$id] p_L ? start<$id>"));
    CHECK(ready_invokes(luca).size() == 1);
    CHECK(ready_invokes(State::initial(parse_term("[$x] $x ! start<tid>"))).empty());

    // The instance alone: four invokes, all guarded.
    Term instance = parse_term(
        "[$player2, $player3, $player4] manager ? join<burraco, $player2>. manager ? join<burraco, $player3>."
        " manager ? join<burraco, $player4>. [tableId] (p_L ! start<tableId> | $player2 ! start<tableId>"
        " | $player3 ! start<tableId> | $player4 ! start<tableId>)");
    CHECK(oracle::count_invokes(instance) == 4);
    CHECK(ready_invokes(State::initial(instance)).empty());
  }

  TEST_CASE("candidate receives once both instances exist") {
    State s = after_joins(fixture::case_study(false), {{"burraco", "p_L"}, {"canasta", "p_R"}});
    CHECK(domains(candidate_receives(s, nm("manager"), nm("join"), {nm("burraco"), nm("p_F")})) ==
          std::vector<std::size_t>{1, 2});
    CHECK(domains(candidate_receives(s, nm("manager"), nm("join"), {nm("chess"), nm("p_X")})) ==
          std::vector<std::size_t>{2});
    CHECK(domains(candidate_receives(s, nm("manager"), nm("join"), {nm("canasta"), nm("p_X")})) ==
          std::vector<std::size_t>{1, 2});
  }

  TEST_CASE("the existing instance wins the race") {
    State s = after_joins(fixture::case_study(false), {{"burraco", "p_L"}, {"canasta", "p_R"}});
    auto options = enabled(s);
    REQUIRE(options.size() == 1);
    CHECK(options[0].domain_size == 1);
    CHECK_FALSE(options[0].via_unfolding);
    CHECK(to_string(options[0].payload[1]) == "p_F");
  }

  TEST_CASE("tied instances are both offered") {
    State s = State::initial(parse_term(fixture::kTwinTie));
    auto options = enabled(s);
    CHECK(options.size() == 2);
    // Oracle: every active receive matching the invoke, keep the minima.
    std::size_t matching = 0;
    for (const auto& r : oracle::active_receives(s.term))
      if (oracle::brute_match(r.pattern, options[0].payload)) ++matching;
    CHECK(matching == 2);

    State a = step(s, options[0]);
    State b = step(s, options[1]);
    CHECK_FALSE(alpha_equivalent(a.term, b.term));
    CHECK(oracle::count_choices(a.term) == 1);
    CHECK(oracle::count_choices(b.term) == 1);
  }

  TEST_CASE("no ready invoke, nothing enabled") {
    CHECK(enabled(State::initial(parse_term("[$x] p ? o<$x>"))).empty());
    CHECK(enabled(State::initial(Term::nil())).empty());
  }

  TEST_CASE("Luca's request creates the first instance") {
    State s = after_joins(fixture::case_study(false), {{"burraco", "p_L"}});
    CHECK(alpha_equivalent(s.term, fixture::golden("evolution/players3_state1.cows")));
  }

  TEST_CASE("four burraco joins then four starts") {
    State s = after_joins(fixture::case_study(true),
                          {{"burraco", "p_L"}, {"canasta", "p_R"}, {"burraco", "p_F"}, {"burraco", "p_A"}, {"burraco", "p_B"}});
    std::map<std::string, Value> received;
    for (int k = 0; k < 4; ++k) {
      auto options = enabled(s);
      REQUIRE(options.size() == 4 - static_cast<std::size_t>(k));
      received.emplace(to_string(options[0].partner), options[0].payload.at(0));
      s = step(s, options[0]);
    }
    CHECK(enabled(s).empty());
    CHECK(received.at("p_L") == received.at("p_F"));
    CHECK(received.at("p_L").as_name()->scope == IdScope::fresh);
    CHECK_FALSE(received.count("p_R"));
    bool rosario_waits = false;
    for (const auto& r : oracle::active_receives(s.term))
      rosario_waits |= to_string(*r.endpoint.partner.value()) == "p_R";
    CHECK(rosario_waits);
  }

  TEST_CASE("replication persists after an unfolded step") {
    State s = State::initial(parse_term("*[$x] p ? o<$x>. $x ! done<> | p ! o<q>"));
    auto options = enabled(s);
    REQUIRE(options.size() == 1);
    CHECK(options[0].via_unfolding);
    State next = step(s, options[0]);
    bool repl = false;
    for (const auto& k : next.term.as<Parallel>()->children) repl |= k.as<Repl>() != nullptr;
    CHECK(repl);
    CHECK(enabled(State::initial(parse_term("*[$x] $x ! o<> | p ! o<q>"))).empty());
  }

  TEST_CASE("the manager alone with one player creates one instance") {
    ScenarioSpec spec;
    spec.players = {{"p_L", "burraco"}};
    Lts lts = explore(fixture::initial(spec));
    CHECK(lts.states.size() == 2);
    CHECK(lts.transitions.size() == 1);
    CHECK(lts.transitions[0].label.domain_size == 2);
  }

  TEST_CASE("stale communications are rejected") {
    State s = State::initial(parse_term(fixture::kTwinTie));
    auto options = enabled(s);
    State next = step(s, options[0]);
    CHECK_THROWS_AS(step(next, options[1]), StaleCommunication);
  }

  TEST_CASE("literal endpoints never synchronise") {
    State s = State::initial(parse_term("[$x] p ? o<$x>. $x ! go<> | p ! o<7>"));
    State t = step(s, enabled(s).at(0));
    CHECK(enabled(t).empty());
    CHECK(unroutable_invokes(t).size() == 1);
    CHECK_FALSE(random_run(s, 0, 10).warnings.empty());
  }

  TEST_CASE("trace invariants on random scenario runs") {
    std::mt19937_64 rng(8);
    for (int scenario = 0; scenario < 6; ++scenario) {
      ScenarioSpec spec = oracle::random_spec(rng, 7, 4);
      const State initial = fixture::initial(spec);
      for (std::uint64_t seed = 0; seed < 4; ++seed) {
        Trace t = random_run(initial, seed, 200);
        State s = initial;
        std::set<std::uint64_t> bound_vars;
        std::set<std::uint64_t> seen_ids;
        for (const auto& id : all_identifiers(s.term)) seen_ids.insert(id.id);
        for (const auto& recorded : t.steps) {
          auto options = enabled(s);
          auto again = enabled(s);
          REQUIRE(again.size() == options.size());
          for (std::size_t k = 0; k < options.size(); ++k) {
            REQUIRE(again[k].receiver == options[k].receiver);
            REQUIRE(again[k].invoker == options[k].invoker);
            REQUIRE(again[k].sigma == options[k].sigma);
          }
          const Communication& c = options.at(recorded.choice);
          for (const auto& [vid, binding] : c.sigma) REQUIRE(bound_vars.insert(vid).second);
          State next = step(s, c);
          REQUIRE(next.fresh_counter >= s.fresh_counter);
          for (const auto& id : all_identifiers(next.term)) {
            if (id.scope != IdScope::fresh || seen_ids.count(id.id)) continue;
            REQUIRE(id.id >= s.fresh_counter);
          }
          for (const auto& id : all_identifiers(next.term)) seen_ids.insert(id.id);
          s = next;
        }
      }
    }
  }

  TEST_CASE("each step consumes one invoke and one choice") {
    oracle::TermGenerator gen(31);
    int checked = 0;
    for (int i = 0; i < 400; ++i) {
      Term base = gen.term(4);
      if (structural_key(base).find('*') != std::string::npos) continue;
      // Add an invoke for each active receive reachable from outside.
      std::vector<Term> parts{base};
      for (const auto& r : oracle::active_receives(base)) {
        auto global = [](const Value& v) { return !v.as_name() || v.as_name()->scope == IdScope::global; };
        if (!global(*r.endpoint.partner.value()) || !global(*r.endpoint.operation.value())) continue;
        std::vector<Expression> args;
        for (const auto& slot : r.pattern)
          args.push_back(slot.is_value() ? slot : Expression::of(Value::name(Identifier::global_name("a"))));
        if (std::all_of(args.begin(), args.end(), [&](const Expression& e) { return global(*e.value()); }))
          parts.push_back(Term::invoke(r.endpoint, std::move(args)));
      }
      if (parts.size() == 1) continue;
      State s = State::initial(Term::parallel(std::move(parts)));
      for (const auto& c : enabled(s)) {
        const Term receiver = oracle::resolve(s.term, c.receiver.path);
        const Choice* choice = receiver.as<Choice>();
        REQUIRE(choice);
        std::size_t dropped_invokes = 0;
        std::size_t dropped_choices = 0;
        for (std::size_t b = 0; b < choice->branches.size(); ++b) {
          if (b == c.receiver_branch) continue;
          dropped_invokes += oracle::count_invokes(choice->branches[b].continuation);
          dropped_choices += oracle::count_choices(choice->branches[b].continuation);
        }
        State next = step(s, c);
        REQUIRE(oracle::count_invokes(next.term) == oracle::count_invokes(s.term) - 1 - dropped_invokes);
        REQUIRE(oracle::count_choices(next.term) == oracle::count_choices(s.term) - 1 - dropped_choices);
        ++checked;
      }
    }
    CHECK(checked > 50);
  }
}
