#include <cctype>

#include "expr_parser.hpp"

namespace gyrstab::detail {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

void Cursor::skip_ws() {
  while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
}

bool Cursor::eat(char c) {
  skip_ws();
  if (pos < text.size() && text[pos] == c) {
    ++pos;
    return true;
  }
  return false;
}

void Cursor::expect(char c, const char* what) {
  if (!eat(c)) fail(std::string("expected '") + c + "'" + (what ? std::string(" ") + what : std::string()));
}

char Cursor::peek() {
  skip_ws();
  return pos < text.size() ? text[pos] : '\0';
}

char Cursor::peek_at(std::size_t off) {
  skip_ws();
  return pos + off < text.size() ? text[pos + off] : '\0';
}

bool Cursor::at_end() {
  skip_ws();
  return pos >= text.size();
}

std::string Cursor::ident() {
  skip_ws();
  if (pos >= text.size() || !is_ident_start(text[pos])) fail("expected identifier");
  std::size_t start = pos;
  while (pos < text.size() && is_ident_char(text[pos])) ++pos;
  return std::string(text.substr(start, pos - start));
}

Int Cursor::integer() {
  skip_ws();
  std::size_t start = pos;
  if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) ++pos;
  if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos]))) {
    pos = start;
    fail("expected integer");
  }
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
  try {
    return std::stoll(std::string(text.substr(start, pos - start)));
  } catch (const std::out_of_range&) {
    pos = start;
    fail("integer out of range");
  }
}

bool Cursor::next_is_ident_then(char c) {
  skip_ws();
  std::size_t p = pos;
  if (p >= text.size() || !is_ident_start(text[p])) return false;
  while (p < text.size() && is_ident_char(text[p])) ++p;
  while (p < text.size() && (text[p] == ' ' || text[p] == '\t')) ++p;
  return p < text.size() && text[p] == c;
}

bool Cursor::next_is_int_then(char c) {
  skip_ws();
  std::size_t p = pos;
  if (p >= text.size() || !std::isdigit(static_cast<unsigned char>(text[p]))) return false;
  while (p < text.size() && std::isdigit(static_cast<unsigned char>(text[p]))) ++p;
  while (p < text.size() && (text[p] == ' ' || text[p] == '\t')) ++p;
  return p < text.size() && text[p] == c;
}

[[noreturn]] void Cursor::fail(const std::string& msg) const {
  throw ExprParseError(static_cast<int>(base_column + pos), msg);
}

static Expr parse_sum(Cursor& c);

static Node parse_node(Cursor& c) {
  char ch = c.peek();
  if (ch == '(') {
    c.eat('(');
    Expr inner = parse_sum(c);
    c.expect(')', "to close group");
    return Node::group(std::move(inner));
  }
  if (!is_ident_start(ch)) c.fail("expected a class (atom, wh(...), S^k(...), parameter or parenthesised sum)");
  std::size_t save = c.pos;
  std::string id = c.ident();
  if (id == "S" && c.peek() == '^') {
    c.eat('^');
    Int k = c.integer();
    if (k <= 0) c.fail("suspension degree must be positive");
    c.expect('(', "after S^k");
    Expr inner = parse_sum(c);
    c.expect(')', "to close S^k(...)");
    return Node::susp(static_cast<int>(k), std::move(inner));
  }
  if (id == "wh") {
    c.expect('(', "after wh");
    Expr a = parse_sum(c);
    c.expect(',', "between Whitehead arguments");
    Expr b = parse_sum(c);
    c.expect(')', "to close wh(...)");
    return Node::whitehead(std::move(a), std::move(b));
  }
  if (c.peek() == '(') {
    c.eat('(');
    Int n = c.integer();
    c.expect(')', "after sphere index");
    if (n < 0) {
      c.pos = save;
      c.fail("negative sphere index");
    }
    return Node::atom(std::move(id), static_cast<int>(n));
  }
  return Node::param(std::move(id));
}

static Term parse_term(Cursor& c, Int sign) {
  Term t;
  t.coef = sign;
  while (true) {
    if (c.next_is_int_then('*')) {
      t.coef *= c.integer();
      c.expect('*');
      continue;
    }
    if (c.next_is_ident_then('*')) {
      std::size_t save = c.pos;
      std::string id = c.ident();
      if (id == "wh" || id == "S") {
        c.pos = save;
        c.fail("misplaced '*'");
      }
      c.expect('*');
      t.scalars.push_back(std::move(id));
      continue;
    }
    break;
  }
  if (std::isdigit(static_cast<unsigned char>(c.peek()))) {
    Int v = c.integer();
    if (v != 0) c.fail("bare integer " + std::to_string(v) + " is not a homotopy class");
    t.coef = 0;
    return t;
  }
  t.chain.push_back(parse_node(c));
  while (c.eat('.')) t.chain.push_back(parse_node(c));
  return t;
}

static Expr parse_sum(Cursor& c) {
  Expr e;
  Int sign = 1;
  if (c.eat('-'))
    sign = -1;
  else
    c.eat('+');
  while (true) {
    Term t = parse_term(c, sign);
    if (t.coef != 0) e.terms.push_back(std::move(t));
    if (c.eat('+'))
      sign = 1;
    else if (c.eat('-'))
      sign = -1;
    else
      break;
  }
  return e;
}

Expr parse_expr_at(Cursor& c) { return parse_sum(c); }

}  // namespace gyrstab::detail

namespace gyrstab {

Expr parse_expr(std::string_view text) {
  detail::Cursor c{text, 0, 1};
  Expr e = detail::parse_expr_at(c);
  if (!c.at_end()) c.fail("unexpected trailing input");
  return e;
}

}  // namespace gyrstab
