#pragma once

#include <string>
#include <string_view>

#include "gyrstab/expr.hpp"

namespace gyrstab::detail {

bool is_ident_start(char c);
bool is_ident_char(char c);

// Column-tracking scanner shared by the expression and dataset parsers.
struct Cursor {
  std::string_view text;
  std::size_t pos = 0;
  std::size_t base_column = 1;

  void skip_ws();
  bool eat(char c);
  void expect(char c, const char* what = nullptr);
  char peek();
  char peek_at(std::size_t off);
  bool at_end();
  std::string ident();
  Int integer();
  bool next_is_ident_then(char c);
  bool next_is_int_then(char c);
  [[noreturn]] void fail(const std::string& msg) const;
};

Expr parse_expr_at(Cursor& c);

}  // namespace gyrstab::detail
