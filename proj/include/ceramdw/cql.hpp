#pragma once

// CQL: a small query language over the cube.
//
//   query          := measure_clause {filter_clause} {group_clause} [";"]
//   measure_clause := "MEASURE" name ["(" name {"," name} ")"]
//                     ["OF" technique "." component ["IN" unit]]
//   filter_clause  := "WHERE" dim ["." level]
//                     ("=" string | "IN" "{" string {"," string} "}" | "CONTAINS" string)
//   group_clause   := "GROUP" "BY" dim ["AT" level]
//
// Keywords are case-insensitive; strings are double-quoted with backslash escapes.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ceramdw/cube.hpp"
#include "ceramdw/errors.hpp"

namespace ceramdw::cql {

struct SourceSpan {
  std::size_t begin = 0;  // byte offsets, half-open
  std::size_t end = 0;

  bool operator==(const SourceSpan&) const = default;
};

enum class TokenKind {
  keyword,
  identifier,
  string,
  lparen,
  rparen,
  lbrace,
  rbrace,
  comma,
  dot,
  equals,
  semicolon,
};

std::string_view to_string(TokenKind k);

struct Token {
  TokenKind kind = TokenKind::identifier;
  std::string lexeme;  // exact source text
  std::string value;   // keyword: upper case; string: unescaped; otherwise the lexeme
  SourceSpan span;

  bool operator==(const Token&) const = default;
};

class SyntaxError : public Error {
 public:
  SyntaxError(SourceSpan span, std::string message, std::vector<std::string> expected = {});
  const SourceSpan& span() const { return span_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  SourceSpan span_;
  std::vector<std::string> expected_;
};

class UnexpectedChar : public SyntaxError {
 public:
  UnexpectedChar(std::size_t offset, std::string message);
};

class SemanticError : public Error {
 public:
  SemanticError(SourceSpan span, std::string message);
  const SourceSpan& span() const { return span_; }

 private:
  SourceSpan span_;
};

std::vector<Token> lex(std::string_view input);

struct MeasureOf {
  std::string technique;
  std::string component;
  std::optional<std::string> unit;

  bool operator==(const MeasureOf&) const = default;
};

struct MeasureClause {
  std::string name;
  std::vector<std::string> args;
  std::optional<MeasureOf> of;
  SourceSpan span;

  bool operator==(const MeasureClause& o) const {
    return name == o.name && args == o.args && of == o.of;
  }
};

struct FilterClause {
  enum class Op { equals, in, contains };

  std::string dim;
  std::optional<std::string> level;
  Op op = Op::equals;
  std::vector<std::string> values;
  SourceSpan span;

  bool operator==(const FilterClause& o) const {
    return dim == o.dim && level == o.level && op == o.op && values == o.values;
  }
};

struct GroupClause {
  std::string dim;
  std::optional<std::string> level;
  SourceSpan span;

  bool operator==(const GroupClause& o) const { return dim == o.dim && level == o.level; }
};

/// Equality is structural: spans are ignored.
struct QueryAst {
  MeasureClause measure;
  std::vector<FilterClause> filters;
  std::vector<GroupClause> group_by;
  std::string source;  // cube name; set by the caller

  bool operator==(const QueryAst& o) const {
    return measure == o.measure && filters == o.filters && group_by == o.group_by &&
           source == o.source;
  }
};

/// Throws SyntaxError at the first offending token.
QueryAst parse(const std::vector<Token>& tokens);
/// lex + parse; spans of errors refer to `input`.
QueryAst parse(std::string_view input);

/// Canonical text; parse(pretty_print(ast)) == ast.
std::string pretty_print(const QueryAst& ast);

/// Resolved engine request for a query.
struct Plan {
  std::vector<Predicate> dice;    // IN / CONTAINS clauses, in query order
  std::vector<Predicate> slices;  // "=" clauses, in query order
  std::vector<Axis> group_by;     // query order
  MeasureSpec measure;
};

/// Throws SemanticError for unknown dimensions, levels, members, measures or units.
Plan plan(const QueryAst& ast, const Cube& cube);

/// dice -> slice -> rollup -> aggregate. Result columns follow GROUP BY order.
ResultTable execute(const Plan& plan, const CubePtr& cube);

ResultTable plan_and_execute(const QueryAst& ast, const CubePtr& cube);

}  // namespace ceramdw::cql
