#pragma once

// The table-manager case study: a replicated manager that gathers
// table_size join requests for the same game and hands each player a
// fresh table identifier, plus one service per player.

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mucows/check.hpp"
#include "mucows/parser.hpp"

namespace mucows {

struct Player {
  std::string partner;
  std::string game;
  friend bool operator==(const Player&, const Player&) = default;
};

struct ScenarioSpec {
  int table_size = 4;
  std::vector<Player> players;
  std::string manager_partner = "manager";
  std::string join_op = "join";
  std::string start_op = "start";
  // Lets one partner appear more than once. No reference assertions are
  // produced in this mode.
  bool allow_duplicates = false;
};

class SpecInvalid : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void validate(const ScenarioSpec& spec);

// "p_L:burraco,p_R:canasta"; the empty string means no players.
std::vector<Player> parse_players(std::string_view text);

// .cows text of the scenario.
std::string scenario_source(const ScenarioSpec& spec);

SourceUnit generate(const ScenarioSpec& spec);

std::vector<Assertion> reference_assertions(const ScenarioSpec& spec);

// .assert text of reference_assertions, one per line.
std::string assertion_file(const ScenarioSpec& spec);

}  // namespace mucows
