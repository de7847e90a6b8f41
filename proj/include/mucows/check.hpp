#pragma once

// Assertions over the communications of maximal traces, their textual
// form (one per line in .assert files) and their evaluation over an LTS
// or a single trace.
//
//   all: count(op=join, domain=2) == 2
//   all: never(op=start, partner=p_R)
//   some: eventually(op=start, arg0=tableId)
//   all: all_equal(op=start, partner={p_L,p_F}, arg=0)
//   all: distinct(op=start, arg=0) == 2
//   all: per_value(op=start, arg=0) == 4
//   trace: count() >= 1
//
// Filter keys: op, partner, domain, unfolded, argN (payload position N).
// Values are atoms, "*" (any) or a set {a,b,...}. For all_equal,
// distinct and per_value, arg=N selects the compared payload position.

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mucows/explorer.hpp"

namespace mucows {

enum class Quantifier { all_maximal_traces, some_maximal_trace, this_trace };
enum class Comparator { eq, ne, lt, le, gt, ge };

bool compare(std::int64_t lhs, Comparator cmp, std::int64_t rhs);

// Matches a value by its rendering without fresh-id suffix.
struct ValueSet {
  std::set<std::string> atoms;  // empty: any value
  bool matches(const Value& v) const;
};

struct Filter {
  std::optional<ValueSet> partner;
  std::optional<ValueSet> operation;
  std::vector<std::pair<std::size_t, ValueSet>> args;
  std::optional<std::size_t> domain;
  std::optional<bool> unfolded;

  bool matches(const CommSummary& c) const;
};

struct Count {
  Filter filter;
  Comparator cmp = Comparator::eq;
  std::int64_t n = 0;
};

// Every matching communication carries the same value at position arg.
struct AllEqual {
  Filter filter;
  std::size_t arg = 0;
};

// Number of distinct values at position arg among matching communications.
struct DistinctCount {
  Filter filter;
  std::size_t arg = 0;
  Comparator cmp = Comparator::eq;
  std::int64_t n = 0;
};

// Each distinct value at position arg occurs (cmp n) times.
struct PerValue {
  Filter filter;
  std::size_t arg = 0;
  Comparator cmp = Comparator::eq;
  std::int64_t n = 0;
};

struct Eventually {
  Filter filter;
};

struct Never {
  Filter filter;
};

struct Assertion {
  Quantifier quantifier = Quantifier::all_maximal_traces;
  std::variant<Count, AllEqual, DistinctCount, PerValue, Eventually, Never> body;
};

class AssertionSyntaxError : public std::invalid_argument {
 public:
  AssertionSyntaxError(int line, std::string message);
  int line() const { return line_; }

 private:
  int line_;
};

class CheckUnsupported : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class TruncatedInput : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Blank lines and lines starting with '#' are ignored.
std::vector<Assertion> parse_assertions(std::string_view text);
Assertion parse_assertion(std::string_view line);
std::string to_string(const Assertion& a);

struct Verdict {
  Assertion assertion;
  bool pass = false;
  std::string message;
  // Counterexample for a failing all-assertion, witness for a passing
  // some-assertion; the trace itself for this_trace.
  std::optional<Trace> evidence;
};

// Quantified assertions over the maximal traces of a complete, acyclic
// LTS. Throws TruncatedInput, or CheckUnsupported for cycles and for
// this_trace assertions.
std::vector<Verdict> check(const Lts& lts, const std::vector<Assertion>& assertions);

// Every assertion evaluated on the single trace.
std::vector<Verdict> check(const Trace& trace, const std::vector<Assertion>& assertions);

bool all_pass(const std::vector<Verdict>& verdicts);

}  // namespace mucows
