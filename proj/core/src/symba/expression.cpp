#include "halfq/symba/expression.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace halfq::symba {

std::string Symbol::str() const {
  return (kind == Canonical::Position ? "q" : "p") + std::to_string(index);
}

int MonomialKey::classical_degree() const {
  int d = 0;
  for (const auto& [s, n] : classical) d += n;
  return d;
}

int MonomialKey::operator_degree() const {
  int d = 0;
  for (const auto& [dof, pw] : operators) d += pw.degree();
  return d;
}

std::vector<OrderedTerm> multiply_dof(const OperatorPower& left, const OperatorPower& right) {
  std::vector<OrderedTerm> out;
  const int kmax = std::min(left.p, right.q);
  const Coefficient minus_i(Rational(0), Rational(-1));
  for (int k = 0; k <= kmax; ++k) {
    Integer mult = factorial(k) * binomial(left.p, k) * binomial(right.q, k);
    Coefficient c{Rational(mult)};
    c *= minus_i.pow(k);
    out.push_back({c, k, {left.q + right.q - k, left.p + right.p - k}});
  }
  return out;
}

Expression::Expression(Coefficient c) {
  if (!c.is_zero()) terms_.emplace(MonomialKey{}, std::move(c));
}

Expression Expression::term(Coefficient c, MonomialKey key) {
  Expression e;
  e.add_term(key, c);
  return e;
}

Expression Expression::classical(Symbol s) {
  MonomialKey k;
  k.classical[s] = 1;
  return term(Coefficient(1), std::move(k));
}

Expression Expression::op_q(Sector sector, int index) {
  MonomialKey k;
  k.operators[{sector, index}] = {1, 0};
  return term(Coefficient(1), std::move(k));
}

Expression Expression::op_p(Sector sector, int index) {
  MonomialKey k;
  k.operators[{sector, index}] = {0, 1};
  return term(Coefficient(1), std::move(k));
}

Expression Expression::parameter(const std::string& name, int power) {
  MonomialKey k;
  if (power != 0) k.parameters[name] = power;
  return term(Coefficient(1), std::move(k));
}

Expression Expression::hbar(int power) {
  MonomialKey k;
  k.hbar_power = power;
  return term(Coefficient(1), std::move(k));
}

Expression Expression::imaginary_unit() { return Expression(Coefficient::imaginary_unit()); }

void Expression::add_term(const MonomialKey& key, const Coefficient& c) {
  if (c.is_zero()) return;
  auto it = terms_.find(key);
  if (it == terms_.end()) {
    terms_.emplace(key, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) terms_.erase(it);
}

bool Expression::is_scalar_valued() const {
  return std::none_of(terms_.begin(), terms_.end(),
                      [](const auto& t) { return t.first.has_operators(); });
}

bool Expression::has_classical_symbols() const {
  return std::any_of(terms_.begin(), terms_.end(),
                     [](const auto& t) { return !t.first.classical.empty(); });
}

bool Expression::has_sector(Sector s) const {
  for (const auto& [key, c] : terms_)
    for (const auto& [dof, pw] : key.operators)
      if (dof.sector == s) return true;
  return false;
}

bool Expression::is_scalar_monomial() const {
  if (terms_.size() != 1) return false;
  const auto& key = terms_.begin()->first;
  return key.classical.empty() && key.operators.empty();
}

Expression& Expression::operator+=(const Expression& o) {
  for (const auto& [k, c] : o.terms_) add_term(k, c);
  return *this;
}

Expression& Expression::operator-=(const Expression& o) {
  for (const auto& [k, c] : o.terms_) add_term(k, -c);
  return *this;
}

Expression& Expression::operator*=(const Coefficient& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [k, v] : terms_) v *= c;
  return *this;
}

Expression& Expression::operator*=(const Expression& o) {
  *this = *this * o;
  return *this;
}

namespace {

template <typename K>
void merge_powers(std::map<K, int>& into, const std::map<K, int>& from) {
  for (const auto& [k, n] : from) {
    auto it = into.find(k);
    if (it == into.end()) {
      into.emplace(k, n);
    } else if ((it->second += n) == 0) {
      into.erase(it);
    }
  }
}

// Product of two monomials, expanding the per-DOF normal ordering.
void multiply_into(const MonomialKey& a, const Coefficient& ca, const MonomialKey& b,
                   const Coefficient& cb,
                   const std::function<void(const MonomialKey&, const Coefficient&)>& emit) {
  MonomialKey base;
  base.hbar_power = a.hbar_power + b.hbar_power;
  base.parameters = a.parameters;
  merge_powers(base.parameters, b.parameters);
  base.classical = a.classical;
  merge_powers(base.classical, b.classical);

  std::vector<std::pair<OperatorDof, std::vector<OrderedTerm>>> shared;
  base.operators = a.operators;
  for (const auto& [dof, pw] : b.operators) {
    auto it = base.operators.find(dof);
    if (it == base.operators.end()) {
      base.operators.emplace(dof, pw);
    } else {
      shared.emplace_back(dof, multiply_dof(it->second, pw));
      base.operators.erase(it);
    }
  }

  const Coefficient c0 = ca * cb;
  // Cartesian product over DOFs shared by both factors.
  std::function<void(std::size_t, MonomialKey&, Coefficient)> expand =
      [&](std::size_t idx, MonomialKey& key, Coefficient c) {
        if (idx == shared.size()) {
          emit(key, c);
          return;
        }
        const auto& [dof, options] = shared[idx];
        for (const auto& opt : options) {
          MonomialKey next = key;
          next.hbar_power += opt.hbar_power;
          if (opt.power.degree() > 0) next.operators[dof] = opt.power;
          expand(idx + 1, next, c * opt.coefficient);
        }
      };
  expand(0, base, c0);
}

}  // namespace

Expression operator*(const Expression& a, const Expression& b) {
  Expression result;
  for (const auto& [ka, ca] : a.terms_) {
    for (const auto& [kb, cb] : b.terms_) {
      multiply_into(ka, ca, kb, cb,
                    [&](const MonomialKey& k, const Coefficient& c) { result.add_term(k, c); });
    }
  }
  return result;
}

Expression Expression::operator-() const {
  Expression r = *this;
  for (auto& [k, c] : r.terms_) c = -c;
  return r;
}

Expression Expression::inverse() const {
  if (!is_scalar_monomial()) {
    throw SymbolicError("only scalar monomials (numbers, hbar, parameters) can be inverted");
  }
  const auto& [key, c] = *terms_.begin();
  MonomialKey inv;
  inv.hbar_power = -key.hbar_power;
  for (const auto& [name, n] : key.parameters) inv.parameters[name] = -n;
  return term(c.inverse(), std::move(inv));
}

Expression Expression::pow(int exponent) const {
  if (exponent < 0) return inverse().pow(-exponent);
  Expression result(1);
  Expression base = *this;
  while (exponent > 0) {
    if (exponent & 1) result *= base;
    exponent >>= 1;
    if (exponent > 0) base = base * base;
  }
  return result;
}

Expression Expression::divide_by_i_hbar() const {
  Expression r;
  const Coefficient minus_i(Rational(0), Rational(-1));
  for (const auto& [k, c] : terms_) {
    MonomialKey nk = k;
    nk.hbar_power -= 1;
    r.add_term(nk, c * minus_i);
  }
  return r;
}

Expression Expression::multiply_by_i_hbar() const {
  Expression r;
  const Coefficient i = Coefficient::imaginary_unit();
  for (const auto& [k, c] : terms_) {
    MonomialKey nk = k;
    nk.hbar_power += 1;
    r.add_term(nk, c * i);
  }
  return r;
}

Expression Expression::adjoint() const {
  Expression result;
  for (const auto& [key, c] : terms_) {
    MonomialKey scalar = key;
    scalar.operators.clear();
    Expression acc = term(c.conj(), scalar);
    // Operators on distinct DOFs commute, so the adjoint of each DOF factor
    // Q^a P^b is P^b Q^a, re-ordered independently.
    for (const auto& [dof, pw] : key.operators) {
      Expression factor;
      for (const auto& t : multiply_dof({0, pw.p}, {pw.q, 0})) {
        MonomialKey k;
        k.hbar_power = t.hbar_power;
        if (t.power.degree() > 0) k.operators[dof] = t.power;
        factor.add_term(k, t.coefficient);
      }
      acc = acc * factor;
    }
    result += acc;
  }
  return result;
}

Expression Expression::substitute(const std::string& parameter, const Coefficient& value) const {
  Expression r;
  for (const auto& [key, c] : terms_) {
    auto it = key.parameters.find(parameter);
    if (it == key.parameters.end()) {
      r.add_term(key, c);
      continue;
    }
    MonomialKey nk = key;
    nk.parameters.erase(parameter);
    r.add_term(nk, c * value.pow(it->second));
  }
  return r;
}

Expression Expression::substitute(Symbol s, const Coefficient& value) const {
  Expression r;
  for (const auto& [key, c] : terms_) {
    auto it = key.classical.find(s);
    if (it == key.classical.end()) {
      r.add_term(key, c);
      continue;
    }
    MonomialKey nk = key;
    nk.classical.erase(s);
    r.add_term(nk, c * value.pow(it->second));
  }
  return r;
}

Expression Expression::grade(int hbar_power) const {
  Expression r;
  for (const auto& [k, c] : terms_)
    if (k.hbar_power == hbar_power) r.terms_.emplace(k, c);
  return r;
}

int Expression::min_hbar_power() const {
  int m = 0;
  bool first = true;
  for (const auto& [k, c] : terms_) {
    m = first ? k.hbar_power : std::min(m, k.hbar_power);
    first = false;
  }
  return m;
}

int Expression::max_hbar_power() const {
  int m = 0;
  bool first = true;
  for (const auto& [k, c] : terms_) {
    m = first ? k.hbar_power : std::max(m, k.hbar_power);
    first = false;
  }
  return m;
}

int Expression::total_degree() const {
  int d = 0;
  for (const auto& [k, c] : terms_) d = std::max(d, k.classical_degree() + k.operator_degree());
  return d;
}

std::vector<Symbol> Expression::classical_symbols() const {
  std::set<Symbol> s;
  for (const auto& [k, c] : terms_)
    for (const auto& [sym, n] : k.classical) s.insert(sym);
  return {s.begin(), s.end()};
}

std::vector<std::string> Expression::parameter_names() const {
  std::set<std::string> s;
  for (const auto& [k, c] : terms_)
    for (const auto& [name, n] : k.parameters) s.insert(name);
  return {s.begin(), s.end()};
}

}  // namespace halfq::symba
