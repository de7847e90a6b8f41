#pragma once

// JSON renderings of traces, LTS summaries and verdicts.
//
// Trace step: {"step","partner","op","payload","bound","domain","unfolded"}
// LTS summary: {"states","transitions","maximal","truncated"}
//
// Names render as their text, fresh names as text#id, integers as JSON
// numbers and string literals with their double quotes kept.

#include <string>
#include <vector>

#include "mucows/check.hpp"
#include "mucows/explorer.hpp"

namespace mucows {

std::string step_json(const CommSummary& c, std::size_t step);

// One line per step, each terminated by '\n'.
std::string trace_jsonl(const Trace& trace);

std::string lts_summary_json(const Lts& lts);

// One line per transition, with "from" and "to" state indices added.
std::string lts_jsonl(const Lts& lts);

// {"pass": bool, "verdicts": [{"assertion","pass","message","evidence"}]}
std::string verdicts_json(const std::vector<Verdict>& verdicts);

}  // namespace mucows
