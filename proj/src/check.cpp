#include "mucows/check.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <functional>
#include <limits>
#include <unordered_set>

namespace mucows {

bool compare(std::int64_t lhs, Comparator cmp, std::int64_t rhs) {
  switch (cmp) {
    case Comparator::eq: return lhs == rhs;
    case Comparator::ne: return lhs != rhs;
    case Comparator::lt: return lhs < rhs;
    case Comparator::le: return lhs <= rhs;
    case Comparator::gt: return lhs > rhs;
    case Comparator::ge: return lhs >= rhs;
  }
  return false;
}

namespace {

std::string plain(const Value& v) {
  if (const Identifier* n = v.as_name()) return n->display;
  return to_string(v);
}

}  // namespace

bool ValueSet::matches(const Value& v) const { return atoms.empty() || atoms.count(plain(v)) > 0; }

bool Filter::matches(const CommSummary& c) const {
  if (partner && !partner->matches(c.partner)) return false;
  if (operation && !operation->matches(c.operation)) return false;
  if (domain && *domain != c.domain_size) return false;
  if (unfolded && *unfolded != c.via_unfolding) return false;
  for (const auto& [index, set] : args) {
    if (index >= c.payload.size() || !set.matches(c.payload[index])) return false;
  }
  return true;
}

bool all_pass(const std::vector<Verdict>& verdicts) {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

// ---------------------------------------------------------------------------
// Textual form

AssertionSyntaxError::AssertionSyntaxError(int line, std::string message)
    : std::invalid_argument("line " + std::to_string(line) + ": " + message), line_(line) {}

namespace {

class LineParser {
 public:
  LineParser(std::string_view text, int line) : s_(text), line_(line) {}

  Assertion run() {
    Assertion a;
    std::string quant = word();
    if (quant == "all") {
      a.quantifier = Quantifier::all_maximal_traces;
    } else if (quant == "some") {
      a.quantifier = Quantifier::some_maximal_trace;
    } else if (quant == "trace") {
      a.quantifier = Quantifier::this_trace;
    } else {
      fail("expected 'all', 'some' or 'trace', found '" + quant + "'");
    }
    expect(':');
    std::string kind = word();
    expect('(');
    Filter filter;
    std::optional<std::size_t> arg;
    skip();
    if (peek() != ')') {
      for (;;) {
        item(filter, arg);
        skip();
        if (peek() == ',') {
          ++pos_;
          continue;
        }
        break;
      }
    }
    expect(')');

    const bool needs_arg = kind == "all_equal" || kind == "distinct" || kind == "per_value";
    if (needs_arg && !arg) fail(kind + " needs arg=N");
    if (!needs_arg && arg) fail("arg=N is only meaningful for all_equal, distinct and per_value");

    if (kind == "count") {
      auto [cmp, n] = comparison();
      a.body = Count{filter, cmp, n};
    } else if (kind == "distinct") {
      auto [cmp, n] = comparison();
      a.body = DistinctCount{filter, *arg, cmp, n};
    } else if (kind == "per_value") {
      auto [cmp, n] = comparison();
      a.body = PerValue{filter, *arg, cmp, n};
    } else if (kind == "all_equal") {
      a.body = AllEqual{filter, *arg};
    } else if (kind == "never") {
      a.body = Never{filter};
    } else if (kind == "eventually") {
      a.body = Eventually{filter};
    } else {
      fail("unknown assertion '" + kind + "'");
    }
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing text '" + std::string(s_.substr(pos_)) + "'");
    return a;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw AssertionSyntaxError(line_, msg); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

  void expect(char c) {
    skip();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  static bool word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '-';
  }

  std::string word() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && word_char(s_[pos_])) ++pos_;
    if (start == pos_) fail("expected a word");
    return std::string(s_.substr(start, pos_ - start));
  }

  std::string atom() {
    skip();
    if (peek() == '"') {
      std::size_t start = pos_++;
      while (pos_ < s_.size() && s_[pos_] != '"') {
        if (s_[pos_] == '\\') ++pos_;
        ++pos_;
      }
      if (pos_ >= s_.size()) fail("unterminated string");
      ++pos_;
      return std::string(s_.substr(start, pos_ - start));
    }
    return word();
  }

  ValueSet value_set() {
    skip();
    ValueSet set;
    if (peek() == '*') {
      ++pos_;
      return set;
    }
    if (peek() == '{') {
      ++pos_;
      for (;;) {
        set.atoms.insert(atom());
        skip();
        if (peek() == ',') {
          ++pos_;
          continue;
        }
        break;
      }
      expect('}');
      if (set.atoms.empty()) fail("empty value set");
      return set;
    }
    set.atoms.insert(atom());
    return set;
  }

  std::int64_t integer(const std::string& text) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || p != text.data() + text.size()) fail("expected an integer, found '" + text + "'");
    return v;
  }

  void item(Filter& f, std::optional<std::size_t>& arg) {
    std::string key = word();
    expect('=');
    if (key == "op") {
      f.operation = value_set();
    } else if (key == "partner") {
      f.partner = value_set();
    } else if (key == "domain") {
      std::int64_t d = integer(word());
      if (d < 0) fail("domain must be non-negative");
      f.domain = static_cast<std::size_t>(d);
    } else if (key == "unfolded") {
      std::string b = word();
      if (b != "true" && b != "false") fail("unfolded must be true or false");
      f.unfolded = b == "true";
    } else if (key == "arg") {
      std::int64_t i = integer(word());
      if (i < 0) fail("arg must be non-negative");
      arg = static_cast<std::size_t>(i);
    } else if (key.size() > 3 && key.compare(0, 3, "arg") == 0) {
      std::int64_t i = integer(key.substr(3));
      if (i < 0) fail("argument index must be non-negative");
      f.args.emplace_back(static_cast<std::size_t>(i), value_set());
    } else {
      fail("unknown filter key '" + key + "'");
    }
  }

  std::pair<Comparator, std::int64_t> comparison() {
    skip();
    static const std::pair<const char*, Comparator> ops[] = {{"==", Comparator::eq}, {"!=", Comparator::ne},
                                                            {"<=", Comparator::le}, {">=", Comparator::ge},
                                                            {"<", Comparator::lt},  {">", Comparator::gt}};
    for (const auto& [text, cmp] : ops) {
      if (s_.substr(pos_, std::char_traits<char>::length(text)) == text) {
        pos_ += std::char_traits<char>::length(text);
        return {cmp, integer(word())};
      }
    }
    fail("expected a comparison such as '== 2'");
  }

  std::string_view s_;
  int line_;
  std::size_t pos_ = 0;
};

const char* cmp_text(Comparator c) {
  switch (c) {
    case Comparator::eq: return "==";
    case Comparator::ne: return "!=";
    case Comparator::lt: return "<";
    case Comparator::le: return "<=";
    case Comparator::gt: return ">";
    case Comparator::ge: return ">=";
  }
  return "?";
}

std::string set_text(const ValueSet& s) {
  if (s.atoms.empty()) return "*";
  if (s.atoms.size() == 1) return *s.atoms.begin();
  std::string out = "{";
  bool first = true;
  for (const auto& a : s.atoms) {
    if (!first) out += ",";
    out += a;
    first = false;
  }
  return out + "}";
}

std::string filter_text(const Filter& f, std::optional<std::size_t> arg) {
  std::vector<std::string> items;
  if (f.operation) items.push_back("op=" + set_text(*f.operation));
  if (f.partner) items.push_back("partner=" + set_text(*f.partner));
  for (const auto& [i, s] : f.args) items.push_back("arg" + std::to_string(i) + "=" + set_text(s));
  if (f.domain) items.push_back("domain=" + std::to_string(*f.domain));
  if (f.unfolded) items.push_back(std::string("unfolded=") + (*f.unfolded ? "true" : "false"));
  if (arg) items.push_back("arg=" + std::to_string(*arg));
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += items[i];
  }
  return out;
}

}  // namespace

Assertion parse_assertion(std::string_view line) { return LineParser(line, 1).run(); }

std::vector<Assertion> parse_assertions(std::string_view text) {
  std::vector<Assertion> out;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first != std::string_view::npos && line[first] != '#') {
      std::size_t last = line.find_last_not_of(" \t\r");
      out.push_back(LineParser(line.substr(first, last - first + 1), line_no).run());
    }
    start = end + 1;
  }
  return out;
}

std::string to_string(const Assertion& a) {
  std::string q = a.quantifier == Quantifier::all_maximal_traces   ? "all"
                  : a.quantifier == Quantifier::some_maximal_trace ? "some"
                                                                   : "trace";
  std::string body = std::visit(
      [](const auto& b) -> std::string {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, Count>) {
          return "count(" + filter_text(b.filter, std::nullopt) + ") " + cmp_text(b.cmp) + " " + std::to_string(b.n);
        } else if constexpr (std::is_same_v<T, AllEqual>) {
          return "all_equal(" + filter_text(b.filter, b.arg) + ")";
        } else if constexpr (std::is_same_v<T, DistinctCount>) {
          return "distinct(" + filter_text(b.filter, b.arg) + ") " + cmp_text(b.cmp) + " " + std::to_string(b.n);
        } else if constexpr (std::is_same_v<T, PerValue>) {
          return "per_value(" + filter_text(b.filter, b.arg) + ") " + cmp_text(b.cmp) + " " + std::to_string(b.n);
        } else if constexpr (std::is_same_v<T, Eventually>) {
          return "eventually(" + filter_text(b.filter, std::nullopt) + ")";
        } else {
          return "never(" + filter_text(b.filter, std::nullopt) + ")";
        }
      },
      a.body);
  return q + ": " + body;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

// Progress of one assertion along a path. Values refer to the ids of the
// state the path is currently in; fresh names that disappear from the
// state can never be observed again and are folded into counters.
struct Summary {
  std::int64_t count = 0;
  int mode = 0;  // all_equal: 0 nothing seen, 1 one live value, 2 value gone, 3 violated
  std::int64_t gone = 0;
  std::vector<std::pair<Value, std::int64_t>> live;  // sorted by value
};

std::string value_key(const Value& v) {
  if (const Identifier* n = v.as_name()) {
    if (n->scope == IdScope::global) return "g" + n->display;
    return (n->scope == IdScope::fresh ? "f" : "b") + std::to_string(n->id);
  }
  return to_string(v);
}

std::string summary_key(const Summary& s) {
  std::string out = std::to_string(s.count) + "|" + std::to_string(s.mode) + "|" + std::to_string(s.gone);
  for (const auto& [v, n] : s.live) out += "|" + value_key(v) + "=" + std::to_string(n);
  return out;
}

const Filter& filter_of(const Assertion& a) {
  return std::visit([](const auto& b) -> const Filter& { return b.filter; }, a.body);
}

std::size_t arg_of(const Assertion& a) {
  if (const auto* b = std::get_if<AllEqual>(&a.body)) return b->arg;
  if (const auto* b = std::get_if<DistinctCount>(&a.body)) return b->arg;
  if (const auto* b = std::get_if<PerValue>(&a.body)) return b->arg;
  return 0;
}

bool per_value_ok(const PerValue& b, std::int64_t n) { return compare(n, b.cmp, b.n); }

Summary observe(const Assertion& a, Summary s, const CommSummary& c) {
  if (!filter_of(a).matches(c)) return s;
  const std::size_t arg = arg_of(a);
  std::visit(
      [&](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, Count>) {
          s.count = std::min(s.count + 1, std::max<std::int64_t>(b.n, 0) + 1);
        } else if constexpr (std::is_same_v<T, Eventually> || std::is_same_v<T, Never>) {
          s.count = 1;
        } else {
          if (arg >= c.payload.size()) {
            // No value at that position: the communication cannot satisfy
            // an equality over it.
            s.mode = 3;
            s.gone = std::numeric_limits<std::int32_t>::max();
            return;
          }
          const Value& v = c.payload[arg];
          auto it = std::lower_bound(s.live.begin(), s.live.end(), v,
                                     [](const auto& entry, const Value& x) { return entry.first < x; });
          const bool present = it != s.live.end() && it->first == v;
          if constexpr (std::is_same_v<T, AllEqual>) {
            if (s.mode == 0) {
              s.mode = 1;
              s.live = {{v, 1}};
            } else if (s.mode == 1 && !present) {
              s.mode = 3;
              s.live.clear();
            } else if (s.mode == 2) {
              s.mode = 3;
            }
          } else if constexpr (std::is_same_v<T, DistinctCount>) {
            if (!present) s.live.insert(it, {v, 1});
          } else {
            if (present) {
              it->second = std::min(it->second + 1, std::max<std::int64_t>(b.n, 0) + 1);
            } else {
              s.live.insert(it, {v, 1});
            }
          }
        }
      },
      a.body);
  return s;
}

// Moves the summary into the id space of the next state.
Summary remap(const Assertion& a, Summary s, const std::vector<std::pair<std::uint64_t, std::uint64_t>>& fresh_map) {
  if (s.live.empty()) return s;
  std::vector<std::pair<Value, std::int64_t>> kept;
  for (auto& [v, n] : s.live) {
    const Identifier* id = v.as_name();
    if (!id || id->scope != IdScope::fresh) {
      kept.emplace_back(v, n);
      continue;
    }
    auto it = std::find_if(fresh_map.begin(), fresh_map.end(), [&](const auto& p) { return p.first == id->id; });
    if (it != fresh_map.end()) {
      Identifier moved = *id;
      moved.id = it->second;
      kept.emplace_back(Value::name(moved), n);
      continue;
    }
    if (std::holds_alternative<AllEqual>(a.body)) {
      s.mode = 2;
    } else if (std::holds_alternative<DistinctCount>(a.body)) {
      ++s.gone;
    } else if (const auto* pv = std::get_if<PerValue>(&a.body)) {
      if (!per_value_ok(*pv, n)) s.gone = 1;
    }
  }
  std::sort(kept.begin(), kept.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  s.live = std::move(kept);
  return s;
}

bool verdict(const Assertion& a, const Summary& s) {
  return std::visit(
      [&](const auto& b) -> bool {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, Count>) {
          return compare(s.count, b.cmp, b.n);
        } else if constexpr (std::is_same_v<T, Eventually>) {
          return s.count == 1;
        } else if constexpr (std::is_same_v<T, Never>) {
          return s.count == 0;
        } else if constexpr (std::is_same_v<T, AllEqual>) {
          return s.mode != 3;
        } else if constexpr (std::is_same_v<T, DistinctCount>) {
          if (s.mode == 3) return false;
          return compare(s.gone + static_cast<std::int64_t>(s.live.size()), b.cmp, b.n);
        } else {
          if (s.mode == 3 || s.gone != 0) return false;
          return std::all_of(s.live.begin(), s.live.end(), [&](const auto& e) { return per_value_ok(b, e.second); });
        }
      },
      a.body);
}

void require_acyclic(const Lts& lts, const std::vector<std::vector<std::size_t>>& out) {
  std::vector<int> color(lts.states.size(), 0);
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  for (std::size_t root = 0; root < lts.states.size(); ++root) {
    if (color[root]) continue;
    stack.emplace_back(root, 0);
    color[root] = 1;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      if (next < out[node].size()) {
        std::size_t to = lts.transitions[out[node][next++]].to;
        if (color[to] == 1) throw CheckUnsupported("the LTS has a cycle; trace quantifiers need an acyclic LTS");
        if (color[to] == 0) {
          color[to] = 1;
          stack.emplace_back(to, 0);
        }
      } else {
        color[node] = 2;
        stack.pop_back();
      }
    }
  }
}

// Labels equal up to the ids of fresh names.
bool similar(const CommSummary& a, const CommSummary& b) {
  if (plain(a.partner) != plain(b.partner) || plain(a.operation) != plain(b.operation)) return false;
  if (a.domain_size != b.domain_size || a.via_unfolding != b.via_unfolding) return false;
  if (a.payload.size() != b.payload.size()) return false;
  for (std::size_t i = 0; i < a.payload.size(); ++i)
    if (plain(a.payload[i]) != plain(b.payload[i])) return false;
  return true;
}

// Follows an LTS path with the concrete semantics so the evidence carries
// stable ids.
Trace concretize(const Lts& lts, const std::vector<std::size_t>& path) {
  Trace t;
  t.initial = lts.states[lts.initial];
  State s = t.initial;
  for (std::size_t ti : path) {
    const LtsTransition& tr = lts.transitions[ti];
    const std::string target = structural_key(lts.states[tr.to].term);
    auto options = enabled(s);
    bool moved = false;
    for (std::size_t i = 0; i < options.size() && !moved; ++i) {
      CommSummary label = summarize(options[i], i);
      if (!similar(label, tr.label)) continue;
      State next = step(s, options[i]);
      if (canonical_key(next.term) != target) continue;
      t.steps.push_back(std::move(label));
      s = std::move(next);
      moved = true;
    }
    if (!moved) throw std::logic_error("LTS path does not replay");
  }
  t.stuck = enabled(s).empty();
  t.final = std::move(s);
  return t;
}

class PathSearch {
 public:
  PathSearch(const Lts& lts, const Assertion& a, bool want)
      : lts_(lts), a_(a), want_(want), out_(lts.outgoing()) {}

  std::optional<std::vector<std::size_t>> run() {
    std::vector<std::size_t> path;
    if (visit(lts_.initial, Summary{}, path)) return path;
    return std::nullopt;
  }

 private:
  bool visit(std::size_t node, const Summary& s, std::vector<std::size_t>& path) {
    if (out_[node].empty()) return verdict(a_, s) == want_;
    std::string key = std::to_string(node) + "#" + summary_key(s);
    if (dead_.count(key)) return false;
    for (std::size_t ti : out_[node]) {
      const LtsTransition& tr = lts_.transitions[ti];
      Summary next = remap(a_, observe(a_, s, tr.label), tr.fresh_map);
      path.push_back(ti);
      if (visit(tr.to, next, path)) return true;
      path.pop_back();
    }
    dead_.insert(std::move(key));
    return false;
  }

  const Lts& lts_;
  const Assertion& a_;
  bool want_;
  std::vector<std::vector<std::size_t>> out_;
  std::unordered_set<std::string> dead_;
};

}  // namespace

std::vector<Verdict> check(const Lts& lts, const std::vector<Assertion>& assertions) {
  if (lts.truncated) throw TruncatedInput("exploration was truncated: " + lts.report);
  for (const auto& a : assertions)
    if (a.quantifier == Quantifier::this_trace)
      throw CheckUnsupported("'" + to_string(a) + "' needs a trace, not an LTS");
  require_acyclic(lts, lts.outgoing());

  std::vector<Verdict> out;
  for (const auto& a : assertions) {
    Verdict v;
    v.assertion = a;
    if (a.quantifier == Quantifier::all_maximal_traces) {
      auto bad = PathSearch(lts, a, false).run();
      v.pass = !bad;
      if (bad) {
        v.evidence = concretize(lts, *bad);
        v.message = "counterexample of length " + std::to_string(bad->size());
      } else {
        v.message = "holds on every maximal trace";
      }
    } else {
      auto good = PathSearch(lts, a, true).run();
      v.pass = good.has_value();
      if (good) {
        v.evidence = concretize(lts, *good);
        v.message = "witness of length " + std::to_string(good->size());
      } else {
        v.message = "no maximal trace satisfies it";
      }
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<Verdict> check(const Trace& trace, const std::vector<Assertion>& assertions) {
  std::vector<Verdict> out;
  for (const auto& a : assertions) {
    Summary s;
    for (const auto& c : trace.steps) s = observe(a, s, c);
    Verdict v;
    v.assertion = a;
    v.pass = verdict(a, s);
    v.message = v.pass ? "holds on the trace" : "fails on the trace";
    v.evidence = trace;
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace mucows
