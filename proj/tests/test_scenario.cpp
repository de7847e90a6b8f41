#include <doctest.h>

#include "fixtures.hpp"
#include "mucows/check.hpp"
#include "mucows/scenario.hpp"

using namespace mucows;

namespace {

std::vector<std::string> lines(const std::vector<Assertion>& as) {
  std::vector<std::string> out;
  for (const auto& a : as) out.push_back(to_string(a));
  return out;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), to_string(parse_assertion(s))) != v.end();
}

}  // namespace

TEST_SUITE("scenario") {
  TEST_CASE("the three-player system") {
    Term expected = parse_term(
        "*[$game, $player1, $player2, $player3, $player4] manager ? join<$game, $player1>."
        "  manager ? join<$game, $player2>. manager ? join<$game, $player3>. manager ? join<$game, $player4>."
        "  [tableId] ($player1 ! start<tableId> | $player2 ! start<tableId>"
        "             | $player3 ! start<tableId> | $player4 ! start<tableId>)"
        "| manager ! join<burraco, p_L> | [$id] p_L ? start<$id>"
        "| manager ! join<canasta, p_R> | [$id] p_R ? start<$id>"
        "| manager ! join<burraco, p_F> | [$id] p_F ? start<$id>");
    CHECK(alpha_equivalent(generate(fixture::case_study(false)).main, expected));
  }

  TEST_CASE("no players, no activity") {
    ScenarioSpec spec;
    spec.table_size = 2;
    Lts lts = explore(fixture::initial(spec));
    CHECK(lts.states.size() == 1);
    CHECK(lines(reference_assertions(spec)) == std::vector<std::string>{"all: count() == 0"});
    CHECK(all_pass(check(lts, reference_assertions(spec))));
  }

  TEST_CASE("two full tables get two table identifiers") {
    const State s = fixture::initial(fixture::burraco_only(2, 4));
    Trace t = random_run(s, 5, 100);
    std::set<std::string> ids;
    std::size_t creations = 0;
    for (const auto& c : t.steps) {
      if (to_string(c.operation) == "start") ids.insert(to_string(c.payload.at(0)));
      if (to_string(c.operation) == "join" && c.domain_size == 2) ++creations;
    }
    CHECK(ids.size() == 2);
    CHECK(creations == 2);
  }

  TEST_CASE("reference assertions for the case study") {
    auto five = lines(reference_assertions(fixture::case_study(true)));
    CHECK(contains(five, "all: never(op=start, partner=p_R)"));
    CHECK(contains(five, "all: count(op=join, domain=2) == 2"));
    CHECK(contains(five, "all: count(op=start) == 4"));

    auto eight = lines(reference_assertions(fixture::burraco_only(4, 8)));
    CHECK(contains(eight, "all: distinct(op=start, arg=0) == 2"));
    CHECK(contains(eight, "all: per_value(op=start, partner={p1,p2,p3,p4,p5,p6,p7,p8}, arg=0) == 4"));
  }

  TEST_CASE("generation is deterministic, closed and roundtrips") {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 20; ++i) {
      ScenarioSpec spec = oracle::random_spec(rng, 6, 4);
      const std::string text = scenario_source(spec);
      CHECK(text == scenario_source(spec));
      SourceUnit u = generate(spec);
      for (const auto& id : free_identifiers(u.main)) CHECK_FALSE(id.is_variable());
      CHECK(canonicalize(parse(pretty(u)).main) == canonicalize(u.main));
      CHECK(assertion_file(spec) == assertion_file(spec));
      CHECK(parse_assertions(assertion_file(spec)).size() == reference_assertions(spec).size());
    }
  }

  TEST_CASE("random scenarios satisfy their reference assertions") {
    std::mt19937_64 rng(12);
    for (int i = 0; i < 12; ++i) {
      ScenarioSpec spec = oracle::random_spec(rng, 6, 3);
      Lts lts = explore(fixture::initial(spec));
      REQUIRE_FALSE(lts.truncated);
      for (const auto& v : check(lts, reference_assertions(spec)))
        CHECK_MESSAGE(v.pass, scenario_source(spec), "\n", to_string(v.assertion), ": ", v.message);
    }
  }

  TEST_CASE("invalid specs are rejected") {
    ScenarioSpec spec = fixture::case_study(false);
    spec.table_size = 0;
    CHECK_THROWS_AS(validate(spec), SpecInvalid);

    spec = fixture::case_study(false);
    spec.players.push_back({"p_L", "canasta"});
    CHECK_THROWS_AS(validate(spec), SpecInvalid);
    spec.allow_duplicates = true;
    CHECK_NOTHROW(validate(spec));
    CHECK(reference_assertions(spec).empty());

    for (const char* bad_name : {"", "$p", "P L", "manager"}) {
      spec = fixture::case_study(false);
      spec.players[0].partner = bad_name;
      CHECK_THROWS_AS(validate(spec), SpecInvalid);
    }
    spec = fixture::case_study(false);
    spec.players[0].game = "";
    CHECK_THROWS_AS(validate(spec), SpecInvalid);
  }

  TEST_CASE("player lists") {
    CHECK(parse_players("p_L:burraco,p_R:canasta") ==
          std::vector<Player>{{"p_L", "burraco"}, {"p_R", "canasta"}});
    CHECK(parse_players("").empty());
    CHECK_THROWS_AS(parse_players("p_L"), SpecInvalid);
    CHECK_THROWS_AS(parse_players("p_L:burraco,"), SpecInvalid);
  }
}
