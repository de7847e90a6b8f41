#pragma once

#include <string>

#include "mucows/explorer.hpp"
#include "mucows/parser.hpp"
#include "mucows/scenario.hpp"
#include "oracles.hpp"

namespace fixture {

inline std::string data(const std::string& rel) { return std::string(MUCOWS_TEST_DATA) + "/" + rel; }

inline mucows::Term golden(const std::string& rel) { return mucows::parse(oracle::read_file(data(rel))).main; }

inline mucows::ScenarioSpec case_study(bool fill_burraco_table) {
  mucows::ScenarioSpec spec;
  spec.players = {{"p_L", "burraco"}, {"p_R", "canasta"}, {"p_F", "burraco"}};
  if (fill_burraco_table) {
    spec.players.push_back({"p_A", "burraco"});
    spec.players.push_back({"p_B", "burraco"});
  }
  return spec;
}

inline mucows::ScenarioSpec burraco_only(int table_size, int players) {
  mucows::ScenarioSpec spec;
  spec.table_size = table_size;
  for (int i = 1; i <= players; ++i) spec.players.push_back({"p" + std::to_string(i), "burraco"});
  return spec;
}

inline mucows::State initial(const mucows::ScenarioSpec& spec) {
  return mucows::State::initial(mucows::generate(spec).main);
}

// Two identical burraco instances waiting for a second player, and one
// request that both can serve.
inline const char* kTwinTie =
    "manager ! join<burraco, p_F>\n"
    "| [$p2] manager ? join<burraco, $p2>. $p2 ! start<t1>\n"
    "| [$p2] manager ? join<burraco, $p2>. $p2 ! start<t2>\n";

// Index of the enabled communication with the given label, or -1.
inline int option_for(const std::vector<mucows::Communication>& options, const std::string& op,
                      const std::string& first_arg, const std::string& second_arg) {
  for (std::size_t i = 0; i < options.size(); ++i) {
    const auto& c = options[i];
    if (mucows::to_string(c.operation) != op || c.payload.size() < 2) continue;
    if (mucows::to_string(c.payload[0]) == first_arg && mucows::to_string(c.payload[1]) == second_arg)
      return static_cast<int>(i);
  }
  return -1;
}

}  // namespace fixture
