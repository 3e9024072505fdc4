#pragma once

#include <span>
#include <string>
#include <string_view>

#include "expr.hpp"

namespace poisntt {

// Parses the infix DSL over the given variable names.
//
// Grammar (precedence: ^ above unary minus above * / above + -):
//   expr   := term  (("+" | "-") term)*
//   term   := unary (("*" | "/") unary)*
//   unary  := "-" unary | power
//   power  := atom ("^" unary)?          -- right-associative
//   atom   := number | ident | ident "(" expr ")" | "(" expr ")"
//
// Identifiers are the declared variable names or the function names
// sin, cos, exp, ln, sqrt, abs. Numbers are exact rationals (integers,
// decimals, scientific notation). Power exponents must fold to a rational
// constant. Throws ParseError with a 1-based column on failure.
Expr parse_expression(std::string_view source,
                      std::span<const std::string> vars);

}  // namespace poisntt
