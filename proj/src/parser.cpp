#include "mucows/parser.hpp"

#include <charconv>
#include <map>

namespace mucows {

ParseError::ParseError(Kind kind, int line, int column, std::string message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + to_string(kind) +
                         " error: " + message),
      kind_(kind),
      line_(line),
      column_(column),
      message_(std::move(message)) {}

const char* to_string(ParseError::Kind kind) {
  switch (kind) {
    case ParseError::Kind::lexical: return "lexical";
    case ParseError::Kind::syntax: return "syntax";
    case ParseError::Kind::scope: return "scope";
    case ParseError::Kind::shape: return "shape";
  }
  return "unknown";
}

namespace {

enum class Tok {
  ident,
  var,
  integer,
  string,
  kw_let,
  bang,
  query,
  langle,
  rangle,
  lparen,
  rparen,
  lbrack,
  rbrack,
  comma,
  dot,
  bar,
  plus,
  star,
  equals,
  semicolon,
  end
};

const char* describe(Tok t) {
  switch (t) {
    case Tok::ident: return "a name";
    case Tok::var: return "a variable";
    case Tok::integer: return "an integer";
    case Tok::string: return "a string";
    case Tok::kw_let: return "'let'";
    case Tok::bang: return "'!'";
    case Tok::query: return "'?'";
    case Tok::langle: return "'<'";
    case Tok::rangle: return "'>'";
    case Tok::lparen: return "'('";
    case Tok::rparen: return "')'";
    case Tok::lbrack: return "'['";
    case Tok::rbrack: return "']'";
    case Tok::comma: return "','";
    case Tok::dot: return "'.'";
    case Tok::bar: return "'|'";
    case Tok::plus: return "'+'";
    case Tok::star: return "'*'";
    case Tok::equals: return "'='";
    case Tok::semicolon: return "';'";
    case Tok::end: return "end of input";
  }
  return "?";
}

struct Token {
  Tok kind;
  std::string text;
  std::int64_t number = 0;
  int line = 1;
  int column = 1;
};

bool ident_start(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; }
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9') || c == '\''; }
bool digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.line = line_;
      t.column = column_;
      if (pos_ >= src_.size()) {
        t.kind = Tok::end;
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (src_.substr(pos_, 3) == "\xE2\x9F\xA8") {
        advance(3);
        t.kind = Tok::langle;
      } else if (src_.substr(pos_, 3) == "\xE2\x9F\xA9") {
        advance(3);
        t.kind = Tok::rangle;
      } else if (ident_start(c)) {
        t.text = take_ident();
        t.kind = t.text == "let" ? Tok::kw_let : Tok::ident;
      } else if (c == '$') {
        advance(1);
        if (pos_ >= src_.size() || !ident_start(src_[pos_]))
          throw ParseError(ParseError::Kind::lexical, t.line, t.column, "'$' must be followed by a variable name");
        t.text = take_ident();
        t.kind = Tok::var;
      } else if (digit(c) || (c == '-' && pos_ + 1 < src_.size() && digit(src_[pos_ + 1]))) {
        std::size_t start = pos_;
        advance(1);
        while (pos_ < src_.size() && digit(src_[pos_])) advance(1);
        t.text = std::string(src_.substr(start, pos_ - start));
        auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
        if (ec != std::errc())
          throw ParseError(ParseError::Kind::lexical, t.line, t.column, "integer literal out of range: " + t.text);
        t.kind = Tok::integer;
      } else if (c == '"') {
        t.text = take_string(t);
        t.kind = Tok::string;
      } else {
        t.kind = punct(c, t);
        advance(1);
      }
      out.push_back(std::move(t));
    }
  }

 private:
  Tok punct(char c, const Token& t) {
    switch (c) {
      case '!': return Tok::bang;
      case '?': return Tok::query;
      case '<': return Tok::langle;
      case '>': return Tok::rangle;
      case '(': return Tok::lparen;
      case ')': return Tok::rparen;
      case '[': return Tok::lbrack;
      case ']': return Tok::rbrack;
      case ',': return Tok::comma;
      case '.': return Tok::dot;
      case '|': return Tok::bar;
      case '+': return Tok::plus;
      case '*': return Tok::star;
      case '=': return Tok::equals;
      case ';': return Tok::semicolon;
      default: break;
    }
    std::string shown = (static_cast<unsigned char>(c) < 0x20 || static_cast<unsigned char>(c) >= 0x80)
                            ? "byte 0x" + hex(static_cast<unsigned char>(c))
                            : std::string("'") + c + "'";
    throw ParseError(ParseError::Kind::lexical, t.line, t.column, "unexpected character " + shown);
  }

  static std::string hex(unsigned v) {
    const char* digits = "0123456789abcdef";
    return {digits[v >> 4], digits[v & 15]};
  }

  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i) {
      char c = src_[pos_++];
      if (c == '\n') {
        ++line_;
        column_ = 1;
      } else if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
        ++column_;
      }
    }
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance(1);
      } else if (src_.substr(pos_, 2) == "//") {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance(1);
      } else {
        break;
      }
    }
  }

  std::string take_ident() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && ident_char(src_[pos_])) advance(1);
    return std::string(src_.substr(start, pos_ - start));
  }

  std::string take_string(const Token& t) {
    advance(1);
    std::string out;
    for (;;) {
      if (pos_ >= src_.size() || src_[pos_] == '\n')
        throw ParseError(ParseError::Kind::lexical, t.line, t.column, "unterminated string literal");
      char c = src_[pos_];
      if (c == '"') {
        advance(1);
        return out;
      }
      if (c == '\\') {
        if (pos_ + 1 >= src_.size())
          throw ParseError(ParseError::Kind::lexical, line_, column_, "unterminated escape");
        char e = src_[pos_ + 1];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: throw ParseError(ParseError::Kind::lexical, line_, column_, std::string("unknown escape \\") + e);
        }
        advance(2);
        continue;
      }
      out += c;
      advance(1);
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  SourceUnit unit() {
    SourceUnit out;
    while (peek().kind == Tok::kw_let) {
      next();
      const Token& name = expect(Tok::ident);
      if (defs_.count(name.text)) fail(ParseError::Kind::scope, name, "definition '" + name.text + "' already exists");
      expect(Tok::equals);
      Term body = term();
      if (peek().kind == Tok::semicolon) next();
      defs_.emplace(name.text, body);
      out.definitions.push_back({name.text, body});
    }
    if (peek().kind != Tok::end) {
      out.main = term();
      if (peek().kind != Tok::end) unexpected(peek(), "'|' or end of input");
      return out;
    }
    if (out.definitions.empty()) unexpected(peek(), "a term");
    auto it = defs_.find("main");
    out.main_name = it != defs_.end() ? "main" : out.definitions.back().name;
    out.main = defs_.at(out.main_name);
    return out;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }

  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  const Token& expect(Tok kind) {
    if (peek().kind != kind) unexpected(peek(), describe(kind));
    return next();
  }

  [[noreturn]] void fail(ParseError::Kind kind, const Token& at, std::string message) const {
    throw ParseError(kind, at.line, at.column, std::move(message));
  }

  [[noreturn]] void unexpected(const Token& at, const std::string& wanted) const {
    std::string got = describe(at.kind);
    if (!at.text.empty()) got += " '" + (at.kind == Tok::var ? "$" + at.text : at.text) + "'";
    fail(ParseError::Kind::syntax, at, "expected " + wanted + ", found " + got);
  }

  Term term() {
    std::vector<Term> parts;
    parts.push_back(unary(true));
    while (peek().kind == Tok::bar) {
      next();
      parts.push_back(unary(true));
    }
    if (parts.size() == 1) return parts.front();
    return Term::parallel(std::move(parts));
  }

  // allow_plus is false inside a receive continuation, where '+' belongs
  // to the enclosing choice.
  Term unary(bool allow_plus) {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::integer:
        if (peek(1).kind == Tok::bang) return invoke();
        if (peek(1).kind == Tok::query) fail(ParseError::Kind::shape, t, "receive endpoint must be a name");
        if (t.text == "0") {
          next();
          return Term::nil();
        }
        unexpected(t, "a term");
      case Tok::string:
        if (peek(1).kind == Tok::bang) return invoke();
        if (peek(1).kind == Tok::query) fail(ParseError::Kind::shape, t, "receive endpoint must be a name");
        unexpected(t, "a term");
      case Tok::var:
        if (peek(1).kind == Tok::bang) return invoke();
        if (peek(1).kind == Tok::query)
          fail(ParseError::Kind::shape, t, "receive endpoint must be a name, not the variable $" + t.text);
        unexpected(peek(1), "'!'");
      case Tok::ident:
        if (peek(1).kind == Tok::bang) return invoke();
        if (peek(1).kind == Tok::query) return choice(allow_plus);
        return reference();
      case Tok::star:
        next();
        return Term::repl(unary(allow_plus));
      case Tok::lbrack:
        return delimitation(allow_plus);
      case Tok::lparen: {
        next();
        Term inner = term();
        expect(Tok::rparen);
        return inner;
      }
      default:
        unexpected(t, "a term");
    }
  }

  Term reference() {
    const Token& t = next();
    auto it = defs_.find(t.text);
    if (it == defs_.end()) {
      if (peek().kind == Tok::langle)
        fail(ParseError::Kind::syntax, peek(), "expected '!' or '?' between partner and operation");
      fail(ParseError::Kind::scope, t, "unknown definition '" + t.text + "'");
    }
    return rename_binders(it->second, next_id_);
  }

  Term delimitation(bool allow_plus) {
    const Token& open = next();
    std::vector<Identifier> binders;
    for (;;) {
      const Token& b = peek();
      Identifier id;
      if (b.kind == Tok::var) {
        id = Identifier::variable(next_id_++, b.text);
      } else if (b.kind == Tok::ident) {
        id = Identifier::bound_name(next_id_++, b.text);
      } else {
        unexpected(b, "a name or variable to bind");
      }
      for (const auto& prev : binders)
        if (prev.kind == id.kind && prev.display == id.display)
          fail(ParseError::Kind::scope, b, "binder '" + b.text + "' repeated in one delimitation");
      next();
      binders.push_back(std::move(id));
      if (peek().kind != Tok::comma) break;
      next();
    }
    expect(Tok::rbrack);
    (void)open;
    for (const auto& b : binders) scope_.push_back(b);
    Term body = unary(allow_plus);
    scope_.resize(scope_.size() - binders.size());
    return Term::delim(std::move(binders), std::move(body));
  }

  Term choice(bool allow_plus) {
    std::vector<ReceiveBranch> branches;
    branches.push_back(receive());
    while (allow_plus && peek().kind == Tok::plus) {
      next();
      const Token& t = peek();
      if (t.kind == Tok::var && peek(1).kind == Tok::query)
        fail(ParseError::Kind::shape, t, "receive endpoint must be a name, not the variable $" + t.text);
      if (t.kind != Tok::ident || peek(1).kind != Tok::query)
        fail(ParseError::Kind::shape, t, "every branch of a choice must start with a receive");
      branches.push_back(receive());
    }
    return Term::choice(std::move(branches));
  }

  ReceiveBranch receive() {
    const Token& partner = expect(Tok::ident);
    expect(Tok::query);
    const Token& op = peek();
    if (op.kind == Tok::var)
      fail(ParseError::Kind::shape, op, "receive endpoint must be a name, not the variable $" + op.text);
    if (op.kind != Tok::ident) {
      if (op.kind == Tok::integer || op.kind == Tok::string)
        fail(ParseError::Kind::shape, op, "receive endpoint must be a name");
      unexpected(op, "an operation name");
    }
    next();
    Endpoint ep{Expression::of(name_value(partner.text)), Expression::of(name_value(op.text))};
    std::vector<TemplateElement> pattern = tuple(true);
    Term cont;
    if (peek().kind == Tok::dot) {
      next();
      cont = unary(false);
    }
    return {std::move(ep), std::move(pattern), std::move(cont)};
  }

  Term invoke() {
    Expression partner = atom();
    expect(Tok::bang);
    Expression op = atom();
    auto args = tuple(false);
    return Term::invoke({std::move(partner), std::move(op)}, std::move(args));
  }

  std::vector<Expression> tuple(bool is_template) {
    expect(Tok::langle);
    std::vector<Expression> out;
    std::vector<std::string> vars;
    if (peek().kind != Tok::rangle) {
      for (;;) {
        const Token& at = peek();
        Expression e = atom();
        if (is_template && e.variable()) {
          for (const auto& v : vars)
            if (v == at.text) fail(ParseError::Kind::shape, at, "variable $" + at.text + " repeated in one template");
          vars.push_back(at.text);
        }
        out.push_back(std::move(e));
        if (peek().kind != Tok::comma) break;
        next();
      }
    }
    expect(Tok::rangle);
    return out;
  }

  Expression atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::ident:
        next();
        return Expression::of(name_value(t.text));
      case Tok::var: {
        next();
        for (std::size_t i = scope_.size(); i-- > 0;)
          if (scope_[i].is_variable() && scope_[i].display == t.text) return Expression::var(scope_[i]);
        fail(ParseError::Kind::scope, t, "variable $" + t.text + " is not bound by any enclosing delimitation");
      }
      case Tok::integer:
        next();
        return Expression::of(Value::integer(t.number));
      case Tok::string:
        next();
        return Expression::of(Value::string(t.text));
      default:
        unexpected(t, "a name, variable or literal");
    }
  }

  Value name_value(const std::string& text) const {
    for (std::size_t i = scope_.size(); i-- > 0;)
      if (scope_[i].is_name() && scope_[i].display == text) return Value::name(scope_[i]);
    return Value::name(Identifier::global_name(text));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::uint64_t next_id_ = 1;
  std::vector<Identifier> scope_;
  std::map<std::string, Term> defs_;
};

}  // namespace

SourceUnit parse(std::string_view source) {
  Parser p(Lexer(source).run());
  return p.unit();
}

Term parse_term(std::string_view source) { return parse(source).main; }

}  // namespace mucows
