#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mucows/ast.hpp"

namespace mucows {

struct Definition {
  std::string name;
  Term term;
};

// A parsed .cows file. Definitions are already inlined into each other
// and into main.
struct SourceUnit {
  std::vector<Definition> definitions;
  Term main;
  // Name of the definition used as main; empty when main is a bare term.
  std::string main_name;
};

class ParseError : public std::runtime_error {
 public:
  enum class Kind { lexical, syntax, scope, shape };

  ParseError(Kind kind, int line, int column, std::string message);

  Kind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  Kind kind_;
  int line_;
  int column_;
  std::string message_;
};

const char* to_string(ParseError::Kind kind);

// Grammar (ASCII; the angle brackets U+27E8/U+27E9 are accepted for < >):
//   unit    := ("let" NAME "=" term ";"?)* term?
//   term    := unary ("|" unary)*
//   unary   := "0" | "*" unary | "[" binder ("," binder)* "]" unary
//            | choice | invoke | "(" term ")" | NAME   (a definition)
//   invoke  := atom "!" atom "<" (atom ("," atom)*)? ">"
//   choice  := receive ("+" receive)*
//   receive := NAME "?" NAME "<" (atom ("," atom)*)? ">" ("." unary)?
// where variables are written $x, names are bare identifiers and
// literals are integers or double-quoted strings. A receive continuation
// never absorbs a following "+"; prefixing binds tighter than choice.
// Comments run from "//" to the end of the line.
SourceUnit parse(std::string_view source);

// Parses a single term (no definitions).
Term parse_term(std::string_view source);

std::string pretty(const Term& t);
std::string pretty(const SourceUnit& unit);

}  // namespace mucows
