#include "mucows/trace_io.hpp"

#include <json.hpp>

namespace mucows {

namespace {

using json = nlohmann::ordered_json;

json value_json(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v.repr)) return *i;
  return to_string(v);
}

json step_object(const CommSummary& c, std::size_t step) {
  json payload = json::array();
  for (const auto& v : c.payload) payload.push_back(value_json(v));
  json bound = json::object();
  for (const auto& [name, v] : c.bound) bound[name] = value_json(v);
  return json{{"step", step},   {"partner", value_json(c.partner)}, {"op", value_json(c.operation)},
              {"payload", payload}, {"bound", bound},
              {"domain", c.domain_size}, {"unfolded", c.via_unfolding}};
}

}  // namespace

std::string step_json(const CommSummary& c, std::size_t step) { return step_object(c, step).dump(); }

std::string trace_jsonl(const Trace& trace) {
  std::string out;
  for (std::size_t i = 0; i < trace.steps.size(); ++i) out += step_json(trace.steps[i], i) + "\n";
  return out;
}

std::string lts_summary_json(const Lts& lts) {
  return json{{"states", lts.states.size()},
              {"transitions", lts.transitions.size()},
              {"maximal", lts.maximal.size()},
              {"truncated", lts.truncated}}
      .dump();
}

std::string lts_jsonl(const Lts& lts) {
  std::string out;
  for (std::size_t i = 0; i < lts.transitions.size(); ++i) {
    const LtsTransition& t = lts.transitions[i];
    json line = step_object(t.label, i);
    line["from"] = t.from;
    line["to"] = t.to;
    out += line.dump() + "\n";
  }
  return out;
}

std::string verdicts_json(const std::vector<Verdict>& verdicts) {
  json list = json::array();
  for (const auto& v : verdicts) {
    json entry{{"assertion", to_string(v.assertion)}, {"pass", v.pass}, {"message", v.message}};
    if (v.evidence) {
      json steps = json::array();
      for (std::size_t i = 0; i < v.evidence->steps.size(); ++i) steps.push_back(step_object(v.evidence->steps[i], i));
      entry["evidence"] = steps;
    }
    list.push_back(entry);
  }
  return json{{"pass", all_pass(verdicts)}, {"verdicts", list}}.dump();
}

}  // namespace mucows
