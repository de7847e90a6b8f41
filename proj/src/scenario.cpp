#include "mucows/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace mucows {

namespace {

bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'')) return false;
  return s != "let";
}

std::string definition_name(const std::string& partner) {
  std::string out = "Player_";
  for (char c : partner) out += c == '\'' ? '_' : c;
  return out;
}

// Games in order of first appearance with their players.
std::vector<std::pair<std::string, std::vector<std::string>>> by_game(const ScenarioSpec& spec) {
  std::vector<std::pair<std::string, std::vector<std::string>>> out;
  for (const auto& p : spec.players) {
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& g) { return g.first == p.game; });
    if (it == out.end()) {
      out.push_back({p.game, {p.partner}});
    } else {
      it->second.push_back(p.partner);
    }
  }
  return out;
}

std::string atom_set(const std::vector<std::string>& atoms) {
  if (atoms.size() == 1) return atoms.front();
  std::string out = "{";
  for (std::size_t i = 0; i < atoms.size(); ++i) out += (i ? "," : "") + atoms[i];
  return out + "}";
}

}  // namespace

void validate(const ScenarioSpec& spec) {
  if (spec.table_size < 2) throw SpecInvalid("table size must be at least 2");
  for (const auto* name : {&spec.manager_partner, &spec.join_op, &spec.start_op})
    if (!is_identifier(*name)) throw SpecInvalid("'" + *name + "' is not a valid name");
  if (spec.join_op == spec.start_op) throw SpecInvalid("join and start operations must differ");
  std::set<std::string> partners;
  std::set<std::string> definitions;
  for (const auto& p : spec.players) {
    if (!is_identifier(p.partner)) throw SpecInvalid("partner '" + p.partner + "' is not a valid name");
    if (!is_identifier(p.game)) throw SpecInvalid("game '" + p.game + "' is not a valid name");
    if (p.partner == spec.manager_partner) throw SpecInvalid("partner '" + p.partner + "' clashes with the manager");
    if (!partners.insert(p.partner).second && !spec.allow_duplicates)
      throw SpecInvalid("partner '" + p.partner + "' appears twice");
    definitions.insert(definition_name(p.partner));
  }
  if (!spec.allow_duplicates && definitions.size() != partners.size())
    throw SpecInvalid("partner names collide after sanitising");
}

std::vector<Player> parse_players(std::string_view text) {
  std::vector<Player> out;
  std::size_t start = 0;
  auto trim = [](std::string_view s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string_view::npos) return std::string();
    std::size_t b = s.find_last_not_of(" \t");
    return std::string(s.substr(a, b - a + 1));
  };
  if (trim(text).empty()) return out;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view item = text.substr(start, end - start);
    std::size_t colon = item.find(':');
    if (colon == std::string_view::npos) throw SpecInvalid("player '" + trim(item) + "' is not partner:game");
    Player p{trim(item.substr(0, colon)), trim(item.substr(colon + 1))};
    if (p.partner.empty() || p.game.empty()) throw SpecInvalid("player '" + trim(item) + "' is not partner:game");
    out.push_back(std::move(p));
    start = end + 1;
  }
  return out;
}

std::string scenario_source(const ScenarioSpec& spec) {
  validate(spec);
  const int n = spec.table_size;
  const std::string& m = spec.manager_partner;
  std::string out;
  out += "// table manager with tables of " + std::to_string(n) + "\n";
  out += "let TableManagerProcess =\n  *[$game";
  for (int i = 1; i <= n; ++i) out += ", $player" + std::to_string(i);
  out += "]\n";
  for (int i = 1; i <= n; ++i)
    out += "    " + m + " ? " + spec.join_op + "<$game, $player" + std::to_string(i) + ">.\n";
  out += "      [tableId] (";
  for (int i = 1; i <= n; ++i) {
    if (i > 1) out += "\n                 | ";
    out += "$player" + std::to_string(i) + " ! " + spec.start_op + "<tableId>";
  }
  out += ")\n";

  std::map<std::string, int> seen;
  std::vector<std::string> names;
  for (const auto& p : spec.players) {
    std::string name = definition_name(p.partner);
    if (int k = seen[name]++; k > 0) name += "_" + std::to_string(k + 1);
    names.push_back(name);
    out += "\nlet " + name + " =\n  " + m + " ! " + spec.join_op + "<" + p.game + ", " + p.partner + ">\n  | [$id] " +
           p.partner + " ? " + spec.start_op + "<$id>\n";
  }

  out += "\nlet main =\n  ";
  for (const auto& name : names) out += name + "\n  | ";
  out += "TableManagerProcess\n";
  return out;
}

SourceUnit generate(const ScenarioSpec& spec) { return parse(scenario_source(spec)); }

std::vector<Assertion> reference_assertions(const ScenarioSpec& spec) {
  validate(spec);
  std::vector<std::string> lines;
  if (spec.allow_duplicates) return {};
  if (spec.players.empty()) {
    lines.push_back("all: count() == 0");
  } else {
    const auto games = by_game(spec);
    const std::int64_t size = spec.table_size;
    const std::string join = "op=" + spec.join_op;
    const std::string start = "op=" + spec.start_op;
    std::int64_t creations = 0;
    std::int64_t tables = 0;
    for (const auto& [game, players] : games) {
      const std::int64_t k = static_cast<std::int64_t>(players.size());
      creations += (k + size - 1) / size;
      tables += k / size;
    }
    lines.push_back("all: count(" + join + ", domain=2) == " + std::to_string(creations));
    lines.push_back("all: distinct(" + start + ", arg=0) == " + std::to_string(tables));
    lines.push_back("all: count(" + start + ") == " + std::to_string(tables * size));
    for (const auto& [game, players] : games) {
      const std::int64_t k = static_cast<std::int64_t>(players.size());
      const std::int64_t created = (k + size - 1) / size;
      const std::int64_t full = k / size;
      const std::string who = "partner=" + atom_set(players);
      lines.push_back("all: count(" + join + ", arg0=" + game + ", domain=2) == " + std::to_string(created));
      lines.push_back("all: count(" + join + ", arg0=" + game + ", domain=1) == " + std::to_string(k - created));
      if (full == 0) {
        lines.push_back("all: never(" + start + ", " + who + ")");
        continue;
      }
      lines.push_back("all: count(" + start + ", " + who + ") == " + std::to_string(full * size));
      lines.push_back("all: distinct(" + start + ", " + who + ", arg=0) == " + std::to_string(full));
      lines.push_back("all: per_value(" + start + ", " + who + ", arg=0) == " + std::to_string(size));
      if (full == 1) lines.push_back("all: all_equal(" + start + ", " + who + ", arg=0)");
    }
  }
  std::vector<Assertion> out;
  for (const auto& l : lines) out.push_back(parse_assertion(l));
  return out;
}

std::string assertion_file(const ScenarioSpec& spec) {
  std::string out;
  for (const auto& a : reference_assertions(spec)) out += to_string(a) + "\n";
  return out;
}

}  // namespace mucows
