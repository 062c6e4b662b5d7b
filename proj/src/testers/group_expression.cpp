/*
 * Copyright 2026 The ModelProbe Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "modelprobe/testers/group_expression.hpp"

#include <algorithm>
#include <cctype>

#include "modelprobe/common/csv.hpp"
#include "modelprobe/common/error.hpp"

namespace modelprobe::testers {

struct GroupExpression::Node {
  enum class Kind { kCompare, kAnd, kOr, kNot };
  Kind kind = Kind::kCompare;
  std::string column;
  bool equal = true;
  std::string literal;
  std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using Node = GroupExpression::Node;
using NodePtr = std::shared_ptr<const Node>;

enum class Tok { kIdent, kString, kEq, kNe, kLParen, kRParen, kAnd, kOr, kEnd };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-' || c == '+';
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

[[noreturn]] void syntax(std::size_t pos, const std::string& what) {
  fail(ErrorCode::kInvalidArgument, "group expression: " + what + " at position " + std::to_string(pos));
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '(' || c == ')') {
      out.push_back({c == '(' ? Tok::kLParen : Tok::kRParen, std::string(1, c), i});
      ++i;
    } else if ((c == '=' || c == '!') && i + 1 < s.size() && s[i + 1] == '=') {
      out.push_back({c == '=' ? Tok::kEq : Tok::kNe, std::string(s.substr(i, 2)), i});
      i += 2;
    } else if (c == '\'' || c == '"') {
      const std::size_t start = i++;
      std::string text;
      while (i < s.size() && s[i] != c) {
        if (s[i] == '\\' && i + 1 < s.size()) ++i;
        text += s[i++];
      }
      if (i >= s.size()) syntax(start, "unterminated string");
      ++i;
      out.push_back({Tok::kString, text, start});
    } else if (ident_char(c)) {
      const std::size_t start = i;
      while (i < s.size() && ident_char(s[i])) ++i;
      std::string text(s.substr(start, i - start));
      const std::string k = lower(text);
      Tok kind = k == "and" ? Tok::kAnd : k == "or" ? Tok::kOr : Tok::kIdent;
      out.push_back({kind, text, start});
    } else {
      syntax(i, std::string("unexpected '") + c + "'");
    }
  }
  out.push_back({Tok::kEnd, "", s.size()});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : t_(std::move(tokens)) {}

  NodePtr parse() {
    auto e = disjunction();
    if (peek().kind != Tok::kEnd) syntax(peek().pos, "unexpected '" + peek().text + "'");
    return e;
  }

 private:
  const Token& peek() const { return t_[i_]; }
  const Token& next() { return t_[i_++]; }

  NodePtr binary(Node::Kind kind, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
  }

  NodePtr disjunction() {
    auto e = conjunction();
    while (peek().kind == Tok::kOr) {
      next();
      e = binary(Node::Kind::kOr, e, conjunction());
    }
    return e;
  }

  NodePtr conjunction() {
    auto e = primary();
    while (peek().kind == Tok::kAnd) {
      next();
      e = binary(Node::Kind::kAnd, e, primary());
    }
    return e;
  }

  NodePtr primary() {
    if (peek().kind == Tok::kLParen) {
      next();
      auto e = disjunction();
      if (peek().kind != Tok::kRParen) syntax(peek().pos, "expected ')'");
      next();
      return e;
    }
    const Token& column = next();
    if (column.kind != Tok::kIdent) syntax(column.pos, "expected a column name");
    const Token& op = next();
    if (op.kind != Tok::kEq && op.kind != Tok::kNe) syntax(op.pos, "expected '==' or '!='");
    const Token& lit = next();
    if (lit.kind != Tok::kString && lit.kind != Tok::kIdent) syntax(lit.pos, "expected a literal");
    auto n = std::make_shared<Node>();
    n->column = column.text;
    n->equal = op.kind == Tok::kEq;
    n->literal = lit.text;
    return n;
  }

  std::vector<Token> t_;
  std::size_t i_ = 0;
};

std::string value_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return format_number(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

bool same_value(const std::string& a, const std::string& b) {
  const auto x = parse_number(a);
  const auto y = parse_number(b);
  if (x && y) return *x == *y;
  return a == b;
}

bool eval(const Node& n, const Json& sample) {
  switch (n.kind) {
    case Node::Kind::kAnd: return eval(*n.lhs, sample) && eval(*n.rhs, sample);
    case Node::Kind::kOr: return eval(*n.lhs, sample) || eval(*n.rhs, sample);
    case Node::Kind::kNot: return !eval(*n.lhs, sample);
    case Node::Kind::kCompare: {
      if (!sample.is_object() || !sample.contains(n.column)) return false;
      const bool eq = same_value(value_text(sample.at(n.column)), n.literal);
      return n.equal ? eq : !eq;
    }
  }
  return false;
}

void collect(const Node& n, std::vector<std::string>& out) {
  if (n.kind == Node::Kind::kCompare) {
    if (std::find(out.begin(), out.end(), n.column) == out.end()) out.push_back(n.column);
    return;
  }
  if (n.lhs) collect(*n.lhs, out);
  if (n.rhs) collect(*n.rhs, out);
}

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'' || c == '\\') out += '\\';
    out += c;
  }
  return out + "'";
}

std::string render(const Node& n) {
  switch (n.kind) {
    case Node::Kind::kCompare: return n.column + (n.equal ? " == " : " != ") + quote(n.literal);
    case Node::Kind::kAnd: return "(" + render(*n.lhs) + " and " + render(*n.rhs) + ")";
    case Node::Kind::kOr: return "(" + render(*n.lhs) + " or " + render(*n.rhs) + ")";
    case Node::Kind::kNot: return "not " + render(*n.lhs);
  }
  return "";
}

}  // namespace

GroupExpression GroupExpression::parse(std::string_view text) {
  return GroupExpression(Parser(tokenize(text)).parse());
}

bool GroupExpression::matches(const Json& sample) const { return eval(*root_, sample); }

std::vector<std::string> GroupExpression::columns() const {
  std::vector<std::string> out;
  collect(*root_, out);
  return out;
}

GroupExpression GroupExpression::negated() const {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::kNot;
  n->lhs = root_;
  return GroupExpression(n);
}

std::string GroupExpression::to_string() const { return render(*root_); }

}  // namespace modelprobe::testers
