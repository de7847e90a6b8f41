#include "mucows/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "mucows/check.hpp"
#include "mucows/explorer.hpp"
#include "mucows/parser.hpp"
#include "mucows/scenario.hpp"
#include "mucows/trace_io.hpp"

namespace mucows {

namespace {

// Reported with exit status 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << text)) throw UsageError("cannot write " + path);
}

SourceUnit load(const std::string& path) {
  std::string text = read_file(path);
  try {
    return parse(text);
  } catch (const ParseError& e) {
    throw UsageError(path + ":" + e.what());
  }
}

unsigned default_workers() { return std::clamp(std::thread::hardware_concurrency(), 1u, 8u); }

std::string describe(const Communication& c) {
  std::string out = to_string(c.partner) + " ! " + to_string(c.operation) + "<";
  for (std::size_t i = 0; i < c.payload.size(); ++i) out += (i ? ", " : "") + to_string(c.payload[i]);
  out += ">  domain " + std::to_string(c.domain_size);
  if (!c.sigma.empty()) {
    out += "  {";
    bool first = true;
    for (const auto& [id, binding] : c.sigma) {
      out += (first ? "$" : ", $") + binding.first.display + " := " + to_string(binding.second);
      first = false;
    }
    out += "}";
  }
  if (c.via_unfolding) out += "  (unfolded)";
  return out;
}

void show_menu(const Stepper& s, std::ostream& out) {
  const auto& options = s.options();
  if (options.empty()) {
    out << "depth " << s.depth() << ": stuck, no enabled communications\n";
    return;
  }
  out << "depth " << s.depth() << ": " << options.size() << " enabled\n";
  for (std::size_t i = 0; i < options.size(); ++i) out << "  [" << i << "] " << describe(options[i]) << "\n";
}

int repl(Stepper& stepper, std::istream& in, std::ostream& out) {
  show_menu(stepper, out);
  std::string line;
  while (out << "> " << std::flush, std::getline(in, line)) {
    std::string cmd = line;
    cmd.erase(0, cmd.find_first_not_of(" \t\r"));
    cmd.erase(cmd.find_last_not_of(" \t\r") + 1);
    if (cmd.empty()) continue;
    if (cmd == "q") break;
    if (cmd == "p") {
      out << pretty(canonicalize(stepper.current().term)) << "\n";
      continue;
    }
    if (cmd == "u") {
      if (stepper.undo()) {
        show_menu(stepper, out);
      } else {
        out << "nothing to undo\n";
      }
      continue;
    }
    if (std::all_of(cmd.begin(), cmd.end(), [](unsigned char c) { return std::isdigit(c); })) {
      try {
        stepper.choose(std::stoull(cmd));
        show_menu(stepper, out);
      } catch (const InvalidChoice& e) {
        out << "invalid choice: " << e.what() << "\n";
      } catch (const std::out_of_range&) {
        out << "invalid choice: " << cmd << "\n";
      }
      continue;
    }
    out << "unknown command '" << cmd << "': enter an index, u, p or q\n";
  }
  out << "\n";
  return kExitOk;
}

struct Options {
  std::string file;
  std::string assert_file;
  std::string out_path;
  std::uint64_t seed = 0;
  std::size_t max_steps = 1000;
  std::size_t max_depth = 64;
  std::size_t max_states = 100000;
  bool json = false;
  int table_size = 4;
  std::string players;
};

void emit(const Options& o, const std::string& text, std::ostream& out) {
  if (o.out_path.empty()) {
    out << text;
  } else {
    write_file(o.out_path, text);
  }
}

int cmd_parse(const Options& o, std::ostream& out) {
  out << pretty(canonicalize(load(o.file).main)) << "\n";
  return kExitOk;
}

int cmd_fmt(const Options& o, std::ostream& out) {
  emit(o, pretty(load(o.file)), out);
  return kExitOk;
}

int cmd_run(const Options& o, std::ostream& out, std::ostream& err) {
  Trace t = random_run(State::initial(load(o.file).main), o.seed, o.max_steps);
  for (const auto& w : t.warnings) err << "warning: " << w << "\n";
  err << t.steps.size() << " steps, " << (t.stuck ? "stuck" : "step bound reached") << "\n";
  emit(o, trace_jsonl(t), out);
  return kExitOk;
}

int cmd_explore(const Options& o, std::ostream& out, std::ostream& err) {
  Lts lts = explore(State::initial(load(o.file).main), {o.max_depth, o.max_states, default_workers()});
  if (lts.truncated) err << "truncated: " << lts.report << "\n";
  out << lts_summary_json(lts) << "\n";
  if (!o.out_path.empty()) write_file(o.out_path, lts_jsonl(lts));
  return kExitOk;
}

int cmd_step(const Options& o, std::istream& in, std::ostream& out) {
  Stepper stepper(State::initial(load(o.file).main));
  int status = repl(stepper, in, out);
  if (!o.out_path.empty()) write_file(o.out_path, trace_jsonl(stepper.trace()));
  return status;
}

int cmd_scenario(const Options& o, std::ostream& out) {
  ScenarioSpec spec;
  spec.table_size = o.table_size;
  spec.players = parse_players(o.players);
  const std::string source = scenario_source(spec);
  const std::string asserts = assertion_file(spec);
  if (o.out_path.empty()) {
    out << source;
    return kExitOk;
  }
  write_file(o.out_path + ".cows", source);
  write_file(o.out_path + ".assert", asserts);
  out << o.out_path << ".cows\n" << o.out_path << ".assert\n";
  return kExitOk;
}

int cmd_check(const Options& o, std::ostream& out, std::ostream& err) {
  const State initial = State::initial(load(o.file).main);
  std::vector<Assertion> assertions;
  try {
    assertions = parse_assertions(read_file(o.assert_file));
  } catch (const AssertionSyntaxError& e) {
    throw UsageError(o.assert_file + ":" + e.what());
  }

  std::vector<Assertion> over_lts;
  std::vector<Assertion> over_trace;
  for (auto& a : assertions) (a.quantifier == Quantifier::this_trace ? over_trace : over_lts).push_back(a);

  std::vector<Verdict> verdicts;
  if (!over_lts.empty()) {
    Lts lts = explore(initial, {o.max_depth, o.max_states, default_workers()});
    try {
      verdicts = check(lts, over_lts);
    } catch (const TruncatedInput& e) {
      err << "inconclusive: " << e.what() << "\n";
      return kExitFailed;
    } catch (const CheckUnsupported& e) {
      err << "unsupported: " << e.what() << "\n";
      return kExitFailed;
    }
  }
  if (!over_trace.empty()) {
    Trace t = random_run(initial, o.seed, o.max_steps);
    for (auto& v : check(t, over_trace)) verdicts.push_back(std::move(v));
  }
  // Report in file order.
  std::vector<Verdict> ordered;
  std::size_t li = 0, ti = 0;
  for (const auto& a : assertions)
    ordered.push_back(a.quantifier == Quantifier::this_trace ? verdicts[over_lts.size() + ti++] : verdicts[li++]);

  if (o.json) {
    out << verdicts_json(ordered) << "\n";
  } else {
    for (const auto& v : ordered) {
      out << (v.pass ? "PASS " : "FAIL ") << to_string(v.assertion) << "  (" << v.message << ")\n";
      if (!v.pass && v.evidence) out << trace_jsonl(*v.evidence);
    }
  }
  return all_pass(ordered) ? kExitOk : kExitFailed;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Interpreter and state-space explorer for muCOWS services", "cows"};
  app.require_subcommand(1);
  Options o;

  auto bounds = [&](CLI::App* sub) {
    sub->add_option("--max-depth", o.max_depth, "Exploration depth bound")->check(CLI::PositiveNumber);
    sub->add_option("--max-states", o.max_states, "Exploration state bound")->check(CLI::PositiveNumber);
  };

  auto* parse_cmd = app.add_subcommand("parse", "Parse a .cows file and print its canonical main term");
  parse_cmd->add_option("file", o.file)->required();

  auto* fmt_cmd = app.add_subcommand("fmt", "Pretty-print a .cows file");
  fmt_cmd->add_option("file", o.file)->required();
  fmt_cmd->add_option("--out", o.out_path, "Write here instead of standard output");

  auto* run_cmd = app.add_subcommand("run", "Seeded random run, printed as JSON lines");
  run_cmd->add_option("file", o.file)->required();
  run_cmd->add_option("--seed", o.seed, "Random seed");
  run_cmd->add_option("--max-steps", o.max_steps, "Step bound")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--out", o.out_path, "Write the trace here");

  auto* explore_cmd = app.add_subcommand("explore", "Build the LTS and print its summary");
  explore_cmd->add_option("file", o.file)->required();
  bounds(explore_cmd);
  explore_cmd->add_option("--out", o.out_path, "Write the transitions here as JSON lines");

  auto* step_cmd = app.add_subcommand("step", "Interactive stepper: index, u (undo), p (print), q (quit)");
  step_cmd->add_option("file", o.file)->required();
  step_cmd->add_option("--out", o.out_path, "Write the session trace here on exit");

  auto* scenario_cmd = app.add_subcommand("scenario", "Generate the table-manager scenario");
  scenario_cmd->add_option("table_size", o.table_size, "Players per table")->required();
  scenario_cmd->add_option("players", o.players, "Comma-separated partner:game pairs")->required();
  scenario_cmd->add_option("--out", o.out_path, "Write PREFIX.cows and PREFIX.assert");

  auto* check_cmd = app.add_subcommand("check", "Check assertions by exhaustive exploration");
  check_cmd->add_option("file", o.file)->required();
  check_cmd->add_option("assert_file", o.assert_file)->required();
  bounds(check_cmd);
  check_cmd->add_option("--seed", o.seed, "Seed of the run checked by trace: assertions");
  check_cmd->add_option("--max-steps", o.max_steps, "Step bound of that run")->check(CLI::NonNegativeNumber);
  check_cmd->add_flag("--json", o.json, "Machine-readable verdicts");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*parse_cmd) return cmd_parse(o, out);
    if (*fmt_cmd) return cmd_fmt(o, out);
    if (*run_cmd) return cmd_run(o, out, err);
    if (*explore_cmd) return cmd_explore(o, out, err);
    if (*step_cmd) return cmd_step(o, in, out);
    if (*scenario_cmd) return cmd_scenario(o, out);
    if (*check_cmd) return cmd_check(o, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SpecInvalid& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace mucows
