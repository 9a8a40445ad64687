#include "halfq/symba/parser.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <vector>

namespace halfq::symba {

ParseError::ParseError(std::size_t position, const std::string& message)
    : std::runtime_error("parse error at position " + std::to_string(position) + ": " + message),
      position_(position) {}

namespace {

class Parser {
 public:
  Parser(std::string_view text, SystemDecl system) : text_(text), system_(system) {}

  Expression parse() {
    Expression e = parse_sum();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }
  [[noreturn]] void fail_at(std::size_t at, const std::string& msg) const {
    throw ParseError(at, msg);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expression parse_sum() {
    Expression acc = parse_product();
    for (;;) {
      if (accept('+')) {
        acc += parse_product();
      } else if (accept('-')) {
        acc -= parse_product();
      } else {
        return acc;
      }
    }
  }

  Expression parse_product() {
    Expression acc = parse_unary();
    for (;;) {
      if (accept('*')) {
        acc *= parse_unary();
      } else if (accept('/')) {
        skip_ws();
        const std::size_t at = pos_;
        Expression divisor = parse_unary();
        if (divisor.is_zero()) fail_at(at, "division by zero");
        if (!divisor.is_scalar_monomial()) {
          fail_at(at, "division is only defined by numbers, hbar and parameters");
        }
        acc *= divisor.inverse();
      } else {
        return acc;
      }
    }
  }

  Expression parse_unary() {
    if (accept('-')) return -parse_unary();
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  Expression parse_power() {
    Expression base = parse_primary();
    if (!accept('^')) return base;
    skip_ws();
    const std::size_t at = pos_;
    bool negative = accept('-');
    skip_ws();
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      fail("expected integer exponent");
    }
    long long n = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      n = n * 10 + (text_[pos_++] - '0');
      if (n > 64) fail_at(at, "exponent too large");
    }
    if (negative) {
      if (!base.is_scalar_monomial()) fail_at(at, "negative powers need a scalar monomial base");
      return base.pow(-static_cast<int>(n));
    }
    return base.pow(static_cast<int>(n));
  }

  Expression parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expression e = parse_sum();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expression parse_number() {
    const std::size_t start = pos_;
    Integer mantissa = 0;
    int frac_digits = 0;
    bool any_digit = false;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      mantissa = mantissa * 10 + (text_[pos_++] - '0');
      any_digit = true;
    }
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        mantissa = mantissa * 10 + (text_[pos_++] - '0');
        ++frac_digits;
        any_digit = true;
      }
    }
    if (!any_digit) fail_at(start, "malformed number");
    int exponent = -frac_digits;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      int sign = 1;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
        sign = text_[pos_] == '-' ? -1 : 1;
        ++pos_;
      }
      if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        pos_ = save;
        fail("malformed exponent in number");
      }
      int e = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        e = e * 10 + (text_[pos_++] - '0');
        if (e > 300) fail_at(start, "number exponent out of range");
      }
      exponent += sign * e;
    }
    Rational value(mantissa);
    Integer scale = 1;
    for (int k = 0; k < std::abs(exponent); ++k) scale *= 10;
    if (exponent >= 0) {
      value *= Rational(scale);
    } else {
      value /= Rational(scale);
    }
    return Expression(Coefficient(value));
  }

  Expression parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string id(text_.substr(start, pos_ - start));
    if (id == "hbar") return Expression::hbar();
    if (id == "i") return Expression::imaginary_unit();

    static const std::vector<std::string> prefixes = {"qh", "ph", "q", "p", "Q", "P"};
    for (const auto& prefix : prefixes) {
      if (id.rfind(prefix, 0) != 0) continue;
      const std::string rest = id.substr(prefix.size());
      if (rest.empty()) fail_at(start, "symbol '" + id + "' needs a DOF index");
      if (!std::all_of(rest.begin(), rest.end(),
                       [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
        // e.g. "qa": a parameter name that merely starts with a symbol letter
        if (std::isdigit(static_cast<unsigned char>(rest.front()))) {
          fail_at(start, "malformed symbol '" + id + "'");
        }
        continue;
      }
      if (rest.size() > 6) fail_at(start, "index out of declared range in '" + id + "'");
      const int index = std::stoi(rest);
      const bool quantum = prefix == "Q" || prefix == "P";
      const int limit = quantum ? system_.quantum : system_.classical;
      if (index < 1 || index > limit) {
        fail_at(start, "index out of declared range in '" + id + "' (" +
                           (quantum ? "quantum" : "classical") + " DOFs: " +
                           std::to_string(limit) + ")");
      }
      if (prefix == "q") return Expression::classical(Symbol::q(index));
      if (prefix == "p") return Expression::classical(Symbol::p(index));
      if (prefix == "qh") return Expression::op_q(Sector::Classical, index);
      if (prefix == "ph") return Expression::op_p(Sector::Classical, index);
      if (prefix == "Q") return Expression::op_q(Sector::Quantum, index);
      return Expression::op_p(Sector::Quantum, index);
    }
    return Expression::parameter(id);
  }

  std::string_view text_;
  SystemDecl system_;
  std::size_t pos_ = 0;
};

std::string power_str(const std::string& base, int n) {
  return n == 1 ? base : base + "^" + std::to_string(n);
}

struct RenderedTerm {
  bool negative = false;
  std::string body;
};

RenderedTerm render_term(const MonomialKey& key, const Coefficient& c) {
  std::vector<std::string> num;
  std::vector<std::string> den;
  for (const auto& [name, n] : key.parameters) {
    (n > 0 ? num : den).push_back(power_str(name, std::abs(n)));
  }
  if (key.hbar_power != 0) {
    (key.hbar_power > 0 ? num : den).push_back(power_str("hbar", std::abs(key.hbar_power)));
  }
  for (const auto& [sym, n] : key.classical) num.push_back(power_str(sym.str(), n));
  for (const auto& [dof, pw] : key.operators) {
    const bool cs = dof.sector == Sector::Classical;
    const std::string idx = std::to_string(dof.index);
    if (pw.q > 0) num.push_back(power_str((cs ? "qh" : "Q") + idx, pw.q));
    if (pw.p > 0) num.push_back(power_str((cs ? "ph" : "P") + idx, pw.p));
  }

  RenderedTerm out;
  Coefficient coeff = c;
  // Pull the sign out of real or purely imaginary coefficients.
  if ((coeff.is_real() && coeff.real() < 0) || (coeff.real() == 0 && coeff.imag() < 0)) {
    out.negative = true;
    coeff = -coeff;
  }
  std::string factors;
  for (std::size_t k = 0; k < num.size(); ++k) factors += (k ? "*" : "") + num[k];
  if (coeff == Coefficient(1)) {
    out.body = factors.empty() ? "1" : factors;
  } else {
    out.body = coeff.str() + (factors.empty() ? "" : "*" + factors);
  }
  for (const auto& d : den) out.body += "/" + d;
  return out;
}

}  // namespace

Expression parse_expression(std::string_view text, SystemDecl system) {
  return Parser(text, system).parse();
}

std::string print_expression(const Expression& e) {
  if (e.is_zero()) return "0";
  std::vector<const std::pair<const MonomialKey, Coefficient>*> order;
  for (const auto& t : e.terms()) order.push_back(&t);
  std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) {
    const int da = a->first.classical_degree() + a->first.operator_degree();
    const int db = b->first.classical_degree() + b->first.operator_degree();
    if (a->first.hbar_power != b->first.hbar_power) return a->first.hbar_power < b->first.hbar_power;
    return da > db;
  });
  std::string out;
  bool first = true;
  for (const auto* t : order) {
    RenderedTerm r = render_term(t->first, t->second);
    if (first) {
      out = (r.negative ? "-" : "") + r.body;
    } else {
      out += (r.negative ? " - " : " + ") + r.body;
    }
    first = false;
  }
  return out;
}

std::string Expression::str() const { return print_expression(*this); }

}  // namespace halfq::symba
