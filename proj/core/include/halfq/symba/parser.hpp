#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "halfq/symba/expression.hpp"

namespace halfq::symba {

/// Raised for malformed input or out-of-range DOF indices. `position` is the
/// 0-based offset into the input text.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t position, const std::string& message);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Parse an expression over the declared system.
///
/// Grammar (whitespace insensitive):
///
///     expr    := term (('+' | '-') term)*
///     term    := unary (('*' | '/') unary)*
///     unary   := ('+' | '-') unary | power
///     power   := primary ('^' ['-'] integer)?
///     primary := number | identifier | '(' expr ')'
///
/// Identifiers: q<i>, p<i> classical variables (1 <= i <= M); qh<i>, ph<i>
/// classical-sector operators (1 <= i <= M); Q<a>, P<a> quantum-sector
/// operators (1 <= a <= N); `hbar`; `i` the imaginary unit; anything else is a
/// named real parameter (m, M, k, t, ...). Numbers are exact decimals
/// ("0.25", "1e-3"). Division and negative powers are allowed only for scalar
/// monomials. Products keep their written operator order.
Expression parse_expression(std::string_view text, SystemDecl system);

/// Deterministic rendering in the same grammar; parse(print(e)) == e.
std::string print_expression(const Expression& e);

}  // namespace halfq::symba
