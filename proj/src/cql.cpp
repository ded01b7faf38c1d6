#include "ceramdw/cql.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace ceramdw::cql {

std::string_view to_string(TokenKind k) {
  switch (k) {
    case TokenKind::keyword: return "keyword";
    case TokenKind::identifier: return "identifier";
    case TokenKind::string: return "string";
    case TokenKind::lparen: return "'('";
    case TokenKind::rparen: return "')'";
    case TokenKind::lbrace: return "'{'";
    case TokenKind::rbrace: return "'}'";
    case TokenKind::comma: return "','";
    case TokenKind::dot: return "'.'";
    case TokenKind::equals: return "'='";
    case TokenKind::semicolon: return "';'";
  }
  return "?";
}

SyntaxError::SyntaxError(SourceSpan span, std::string message, std::vector<std::string> expected)
    : Error(std::move(message)), span_(span), expected_(std::move(expected)) {}

UnexpectedChar::UnexpectedChar(std::size_t offset, std::string message)
    : SyntaxError(SourceSpan{offset, offset + 1}, std::move(message)) {}

SemanticError::SemanticError(SourceSpan span, std::string message)
    : Error(std::move(message)), span_(span) {}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

namespace {

constexpr std::array<std::string_view, 8> kKeywords = {"MEASURE", "WHERE", "GROUP",   "BY",
                                                       "AT",      "OF",    "IN", "CONTAINS"};

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

bool is_keyword(std::string_view word) {
  const auto u = upper(word);
  return std::find(kKeywords.begin(), kKeywords.end(), u) != kKeywords.end();
}

}  // namespace

std::vector<Token> lex(std::string_view input) {
  std::vector<Token> out;
  std::size_t pos = 0;
  auto punct = [&](TokenKind kind) {
    out.push_back(Token{kind, std::string(1, input[pos]), std::string(1, input[pos]), {pos, pos + 1}});
    ++pos;
  };
  while (pos < input.size()) {
    const char c = input[pos];
    if (is_space(c)) {
      ++pos;
      continue;
    }
    switch (c) {
      case '(': punct(TokenKind::lparen); continue;
      case ')': punct(TokenKind::rparen); continue;
      case '{': punct(TokenKind::lbrace); continue;
      case '}': punct(TokenKind::rbrace); continue;
      case ',': punct(TokenKind::comma); continue;
      case '.': punct(TokenKind::dot); continue;
      case '=': punct(TokenKind::equals); continue;
      case ';': punct(TokenKind::semicolon); continue;
      default: break;
    }
    if (c == '"') {
      const std::size_t start = pos++;
      std::string value;
      bool closed = false;
      while (pos < input.size()) {
        const char ch = input[pos];
        if (ch == '"') {
          ++pos;
          closed = true;
          break;
        }
        if (ch == '\\') {
          if (pos + 1 >= input.size()) break;
          const char esc = input[pos + 1];
          switch (esc) {
            case '"': value.push_back('"'); break;
            case '\\': value.push_back('\\'); break;
            case 'n': value.push_back('\n'); break;
            case 't': value.push_back('\t'); break;
            default: throw UnexpectedChar(pos + 1, std::string("invalid escape \\") + esc);
          }
          pos += 2;
          continue;
        }
        value.push_back(ch);
        ++pos;
      }
      if (!closed) throw UnexpectedChar(start, "unterminated string literal");
      out.push_back(Token{TokenKind::string, std::string(input.substr(start, pos - start)),
                          std::move(value), {start, pos}});
      continue;
    }
    if (is_ident_start(c)) {
      const std::size_t start = pos;
      while (pos < input.size() && is_ident_char(input[pos])) ++pos;
      const std::string_view word = input.substr(start, pos - start);
      if (is_keyword(word)) {
        out.push_back(Token{TokenKind::keyword, std::string(word), upper(word), {start, pos}});
      } else {
        out.push_back(Token{TokenKind::identifier, std::string(word), std::string(word), {start, pos}});
      }
      continue;
    }
    throw UnexpectedChar(pos, std::string("unexpected character '") + c + "'");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

class Parser {
 public:
  Parser(const std::vector<Token>& tokens, std::size_t input_end)
      : tokens_(tokens), input_end_(input_end) {}

  QueryAst parse_query() {
    QueryAst ast;
    ast.measure = parse_measure();
    while (at_keyword("WHERE")) ast.filters.push_back(parse_filter());
    while (at_keyword("GROUP")) {
      GroupClause g = parse_group();
      for (const auto& prev : ast.group_by) {
        if (prev.dim == g.dim)
          throw SyntaxError(g.span, "dimension '" + g.dim + "' grouped more than once");
      }
      ast.group_by.push_back(std::move(g));
    }
    if (peek() && peek()->kind == TokenKind::semicolon) ++pos_;
    if (peek()) {
      std::vector<std::string> expected;
      if (ast.group_by.empty()) expected.push_back("WHERE");
      expected.insert(expected.end(), {"GROUP", "';'", "end of input"});
      fail("unexpected " + describe(*peek()), std::move(expected));
    }
    return ast;
  }

 private:
  const Token* peek() const { return pos_ < tokens_.size() ? &tokens_[pos_] : nullptr; }

  bool at_keyword(std::string_view kw) const {
    const Token* t = peek();
    return t && t->kind == TokenKind::keyword && t->value == kw;
  }

  SourceSpan here() const {
    if (const Token* t = peek()) return t->span;
    return SourceSpan{input_end_, input_end_};
  }

  static std::string describe(const Token& t) {
    return std::string(to_string(t.kind)) + " '" + t.lexeme + "'";
  }

  [[noreturn]] void fail(const std::string& message, std::vector<std::string> expected) const {
    throw SyntaxError(here(), message, std::move(expected));
  }

  [[noreturn]] void fail_expected(std::vector<std::string> expected) const {
    std::string what = peek() ? describe(*peek()) : "end of input";
    std::string list;
    for (std::size_t i = 0; i < expected.size(); ++i) list += (i ? ", " : "") + expected[i];
    fail("expected " + list + ", found " + what, std::move(expected));
  }

  const Token& expect_keyword(std::string_view kw) {
    if (!at_keyword(kw)) fail_expected({std::string(kw)});
    return tokens_[pos_++];
  }

  const Token& expect(TokenKind kind) {
    const Token* t = peek();
    if (!t || t->kind != kind) fail_expected({std::string(to_string(kind))});
    ++pos_;
    return *t;
  }

  bool accept(TokenKind kind) {
    const Token* t = peek();
    if (t && t->kind == kind) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::string expect_name(std::string_view what) {
    const Token* t = peek();
    if (!t || t->kind != TokenKind::identifier) fail_expected({std::string(what)});
    ++pos_;
    return t->value;
  }

  // Level names may collide with keywords (the groups dimension has a level "group").
  std::string expect_level() {
    const Token* t = peek();
    if (t && (t->kind == TokenKind::identifier || t->kind == TokenKind::keyword)) {
      ++pos_;
      return t->lexeme;
    }
    fail_expected({"level"});
  }

  // Component names may collide with keywords (e.g. the element In) or need quoting.
  std::string expect_component() {
    const Token* t = peek();
    if (t && (t->kind == TokenKind::identifier || t->kind == TokenKind::string)) {
      ++pos_;
      return t->value;
    }
    if (t && t->kind == TokenKind::keyword) {
      ++pos_;
      return t->lexeme;
    }
    fail_expected({"component"});
  }

  SourceSpan span_from(std::size_t begin) const {
    return SourceSpan{begin, pos_ > 0 ? tokens_[pos_ - 1].span.end : begin};
  }

  MeasureClause parse_measure() {
    MeasureClause m;
    const std::size_t begin = here().begin;
    expect_keyword("MEASURE");
    m.name = expect_name("measure name");
    if (accept(TokenKind::lparen)) {
      m.args.push_back(expect_name("argument"));
      while (accept(TokenKind::comma)) m.args.push_back(expect_name("argument"));
      expect(TokenKind::rparen);
    }
    if (at_keyword("OF")) {
      ++pos_;
      MeasureOf of;
      of.technique = expect_name("technique");
      expect(TokenKind::dot);
      of.component = expect_component();
      if (at_keyword("IN")) {
        ++pos_;
        of.unit = expect_name("unit");
      }
      m.of = std::move(of);
    }
    m.span = span_from(begin);
    return m;
  }

  FilterClause parse_filter() {
    FilterClause f;
    const std::size_t begin = here().begin;
    expect_keyword("WHERE");
    f.dim = expect_name("dimension");
    if (accept(TokenKind::dot)) f.level = expect_level();
    if (accept(TokenKind::equals)) {
      f.op = FilterClause::Op::equals;
      f.values.push_back(expect(TokenKind::string).value);
    } else if (at_keyword("IN")) {
      ++pos_;
      f.op = FilterClause::Op::in;
      expect(TokenKind::lbrace);
      f.values.push_back(expect(TokenKind::string).value);
      while (accept(TokenKind::comma)) f.values.push_back(expect(TokenKind::string).value);
      expect(TokenKind::rbrace);
    } else if (at_keyword("CONTAINS")) {
      ++pos_;
      f.op = FilterClause::Op::contains;
      f.values.push_back(expect(TokenKind::string).value);
    } else {
      fail_expected(f.level ? std::vector<std::string>{"'='", "IN", "CONTAINS"}
                            : std::vector<std::string>{"'.'", "'='", "IN", "CONTAINS"});
    }
    f.span = span_from(begin);
    return f;
  }

  GroupClause parse_group() {
    GroupClause g;
    const std::size_t begin = here().begin;
    expect_keyword("GROUP");
    expect_keyword("BY");
    g.dim = expect_name("dimension");
    if (at_keyword("AT")) {
      ++pos_;
      g.level = expect_level();
    }
    g.span = span_from(begin);
    return g;
  }

  const std::vector<Token>& tokens_;
  std::size_t input_end_;
  std::size_t pos_ = 0;
};

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

bool plain_identifier(std::string_view s) {
  if (s.empty() || !is_ident_start(s[0]) || is_keyword(s)) return false;
  return std::all_of(s.begin(), s.end(), is_ident_char);
}

}  // namespace

QueryAst parse(const std::vector<Token>& tokens) {
  const std::size_t end = tokens.empty() ? 0 : tokens.back().span.end;
  return Parser(tokens, end).parse_query();
}

QueryAst parse(std::string_view input) { return Parser(lex(input), input.size()).parse_query(); }

std::string pretty_print(const QueryAst& ast) {
  std::string out = "MEASURE " + ast.measure.name;
  if (!ast.measure.args.empty()) {
    out += "(";
    for (std::size_t i = 0; i < ast.measure.args.size(); ++i)
      out += (i ? ", " : "") + ast.measure.args[i];
    out += ")";
  }
  if (const auto& of = ast.measure.of) {
    out += " OF " + of->technique + "." +
           (plain_identifier(of->component) ? of->component : quote(of->component));
    if (of->unit) out += " IN " + *of->unit;
  }
  for (const auto& f : ast.filters) {
    out += " WHERE " + f.dim;
    if (f.level) out += "." + *f.level;
    switch (f.op) {
      case FilterClause::Op::equals: out += " = " + quote(f.values.at(0)); break;
      case FilterClause::Op::contains: out += " CONTAINS " + quote(f.values.at(0)); break;
      case FilterClause::Op::in:
        out += " IN {";
        for (std::size_t i = 0; i < f.values.size(); ++i) out += (i ? ", " : "") + quote(f.values[i]);
        out += "}";
        break;
    }
  }
  for (const auto& g : ast.group_by) {
    out += " GROUP BY " + g.dim;
    if (g.level) out += " AT " + *g.level;
  }
  out += ";";
  return out;
}

// ---------------------------------------------------------------------------
// Planner
// ---------------------------------------------------------------------------

namespace {

template <typename Fn>
auto semantic(SourceSpan span, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const SemanticError&) {
    throw;
  } catch (const Error& e) {
    throw SemanticError(span, e.what());
  }
}

MeasureSpec plan_measure(const MeasureClause& m, const Cube& cube) {
  MeasureSpec spec;
  const auto& args = m.args;
  auto bad = [&](const std::string& msg) { throw SemanticError(m.span, msg); };

  if (m.name == "count") {
    if (args.size() > 1) bad("count takes one argument: samples, facts or analyses");
    const std::string what = args.empty() ? "samples" : args[0];
    if (what == "samples") spec.measure = Measure::count_samples;
    else if (what == "facts") spec.measure = Measure::count_facts;
    else if (what == "analyses") spec.measure = Measure::count_analyses;
    else bad("cannot count '" + what + "'; use samples, facts or analyses");
  } else if (auto parsed = parse_measure(m.name)) {
    spec.measure = *parsed;
    if (spec.measure == Measure::avg_samples_per_child) {
      if (args.size() != 1) bad("avg_samples_per_child takes one dimension argument");
      cube.dim_index(args[0]);
      spec.child_dim = args[0];
    } else if (!args.empty()) {
      bad(m.name + " takes no arguments");
    }
  } else {
    bad("unknown measure '" + m.name + "'");
  }

  if (m.of) {
    MeasureTarget target;
    auto tech = parse_technique(m.of->technique);
    if (!tech) bad("unknown technique '" + m.of->technique + "'");
    target.technique = *tech;
    target.component = m.of->component;
    if (m.of->unit) {
      auto unit = parse_unit(*m.of->unit);
      if (!unit) bad("unknown unit '" + *m.of->unit + "'");
      target.unit = *unit;
    }
    spec.over = std::move(target);
  }
  return spec;
}

std::string level_or_finest(const Cube& cube, const std::string& dim,
                            const std::optional<std::string>& level) {
  const auto d = cube.dim_index(dim);
  if (level) {
    cube.level_index(d, *level);
    return *level;
  }
  return cube.dims()[d].levels.front();
}

}  // namespace

Plan plan(const QueryAst& ast, const Cube& cube) {
  Plan p;
  p.measure = semantic(ast.measure.span, [&] { return plan_measure(ast.measure, cube); });
  for (const auto& f : ast.filters) {
    semantic(f.span, [&] {
      cube.dim_index(f.dim);
      if (f.op == FilterClause::Op::contains) {
        p.dice.push_back(Predicate::contains(f.dim, f.level, f.values.at(0)));
        return 0;
      }
      const std::string level = level_or_finest(cube, f.dim, f.level);
      if (level == kAllLevel) throw SemanticError(f.span, "cannot filter at level all");
      const auto d = cube.dim_index(f.dim);
      const auto l = cube.level_index(d, level);
      for (const auto& v : f.values) {
        if (!cube.find_member(d, l, v)) throw UnknownMember(f.dim, level, v);
      }
      if (f.op == FilterClause::Op::equals) {
        p.slices.push_back(Predicate::equals(f.dim, level, f.values.at(0)));
      } else {
        p.dice.push_back(Predicate::member_set(f.dim, level, f.values));
      }
      return 0;
    });
  }
  for (const auto& g : ast.group_by) {
    semantic(g.span, [&] {
      p.group_by.push_back(Axis{g.dim, level_or_finest(cube, g.dim, g.level)});
      return 0;
    });
  }
  return p;
}

ResultTable execute(const Plan& plan, const CubePtr& cube) {
  CubeView view = cube->base_view();
  view = dice(view, plan.dice);
  for (const auto& s : plan.slices) view = slice_at(view, s.dim, *s.level, s.values.at(0));
  view = with_levels(view, plan.group_by);
  ResultTable table = aggregate(view, plan.measure);

  // View columns follow cube order; present them in GROUP BY order.
  std::vector<std::size_t> order;
  for (const auto& axis : plan.group_by) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      if (table.columns[i].dim == axis.dim) order.push_back(i);
    }
  }
  return table.reordered(order);
}

ResultTable plan_and_execute(const QueryAst& ast, const CubePtr& cube) {
  const Plan p = plan(ast, *cube);
  try {
    return execute(p, cube);
  } catch (const Error& e) {
    throw SemanticError(ast.measure.span, e.what());
  }
}

}  // namespace ceramdw::cql
