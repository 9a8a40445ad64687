#include "halfq/symba/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace halfq::symba {

namespace {

// sum_k k! C(a,k) C(b,k) (sign * i/2)^k hbar^k X^(a-k) Y^(b-k), with the
// monomial X^m Y^n produced by `make`.
template <typename Make>
Expression ordering_change(int a, int b, int sign, Make make) {
  Expression out;
  const Coefficient half_i(Rational(0), Rational(sign, 2));
  for (int k = 0; k <= std::min(a, b); ++k) {
    Coefficient c{Rational(factorial(k) * binomial(a, k) * binomial(b, k))};
    c *= half_i.pow(k);
    MonomialKey key = make(a - k, b - k);
    key.hbar_power += k;
    out += Expression::term(c, key);
  }
  return out;
}

MonomialKey operator_key(Sector sector, int index, int a, int b) {
  MonomialKey key;
  if (a + b > 0) key.operators[{sector, index}] = {a, b};
  return key;
}

MonomialKey classical_key(int index, int a, int b) {
  MonomialKey key;
  if (a > 0) key.classical[Symbol::q(index)] = a;
  if (b > 0) key.classical[Symbol::p(index)] = b;
  return key;
}

// Per-DOF (q power, p power) of the classical part of a monomial.
std::map<int, std::pair<int, int>> classical_powers(const MonomialKey& key) {
  std::map<int, std::pair<int, int>> out;
  for (const auto& [sym, n] : key.classical) {
    auto& slot = out[sym.index];
    (sym.kind == Canonical::Position ? slot.first : slot.second) = n;
  }
  return out;
}

Expression scalar_part(const MonomialKey& key, const Coefficient& c) {
  MonomialKey s;
  s.hbar_power = key.hbar_power;
  s.parameters = key.parameters;
  return Expression::term(c, s);
}

void require_no_operators(const Expression& a) {
  if (!a.is_scalar_valued()) throw SymbolicError("weyl_quantize expects a classical polynomial");
}

}  // namespace

Expression commutator(const Expression& a, const Expression& b) { return a * b - b * a; }

Expression partial_derivative(const Expression& a, Symbol s) {
  Expression out;
  for (const auto& [key, c] : a.terms()) {
    auto it = key.classical.find(s);
    if (it == key.classical.end()) continue;
    MonomialKey nk = key;
    if (it->second == 1) {
      nk.classical.erase(s);
    } else {
      nk.classical[s] = it->second - 1;
    }
    out += Expression::term(c * Coefficient(it->second), nk);
  }
  return out;
}

Expression poisson_bracket(const Expression& a, const Expression& b) {
  std::set<int> dofs;
  for (const auto& s : a.classical_symbols()) dofs.insert(s.index);
  for (const auto& s : b.classical_symbols()) dofs.insert(s.index);
  Expression out;
  for (int i : dofs) {
    out += partial_derivative(a, Symbol::q(i)) * partial_derivative(b, Symbol::p(i));
    out -= partial_derivative(a, Symbol::p(i)) * partial_derivative(b, Symbol::q(i));
  }
  return out;
}

Expression double_bracket(const Expression& a, const Expression& b) {
  return (poisson_bracket(a, b) - poisson_bracket(b, a)) * Coefficient::ratio(1, 2);
}

Expression hybrid_bracket(const Expression& a, const Expression& b) {
  return commutator(a, b) + double_bracket(a, b).multiply_by_i_hbar();
}

Expression jacobiator(const Expression& a, const Expression& b, const Expression& c) {
  return hybrid_bracket(a, hybrid_bracket(b, c)) + hybrid_bracket(b, hybrid_bracket(c, a)) +
         hybrid_bracket(c, hybrid_bracket(a, b));
}

Split Split::contiguous(int m, int n) {
  Split s;
  for (int i = 1; i <= m; ++i) s.classical.push_back(i);
  for (int i = 1; i <= n; ++i) s.quantum.push_back(m + i);
  return s;
}

void Split::validate() const {
  std::set<int> seen;
  for (const auto* list : {&classical, &quantum}) {
    for (int i : *list) {
      if (!seen.insert(i).second) {
        throw SymbolicError("split is overlapping: DOF " + std::to_string(i) + " listed twice");
      }
    }
  }
  for (int i = 1; i <= total(); ++i) {
    if (!seen.contains(i)) {
      throw SymbolicError("split is incomplete: DOF " + std::to_string(i) + " is not assigned");
    }
  }
}

Expression weyl_quantize(const Expression& a, Sector sector) {
  require_no_operators(a);
  Expression out;
  for (const auto& [key, c] : a.terms()) {
    Expression acc = scalar_part(key, c);
    for (const auto& [index, pw] : classical_powers(key)) {
      acc *= ordering_change(pw.first, pw.second, -1, [&](int x, int y) {
        return operator_key(sector, index, x, y);
      });
    }
    out += acc;
  }
  return out;
}

Expression weyl_quantize(const Expression& a, const Split& split) {
  split.validate();
  require_no_operators(a);
  std::map<int, OperatorDof> target;
  for (std::size_t j = 0; j < split.classical.size(); ++j) {
    target[split.classical[j]] = {Sector::Classical, static_cast<int>(j) + 1};
  }
  for (std::size_t j = 0; j < split.quantum.size(); ++j) {
    target[split.quantum[j]] = {Sector::Quantum, static_cast<int>(j) + 1};
  }
  Expression out;
  for (const auto& [key, c] : a.terms()) {
    Expression acc = scalar_part(key, c);
    for (const auto& [index, pw] : classical_powers(key)) {
      auto it = target.find(index);
      if (it == target.end()) {
        throw SymbolicError("split is incomplete: DOF " + std::to_string(index) +
                            " appears in the expression but is not assigned");
      }
      const OperatorDof dof = it->second;
      acc *= ordering_change(pw.first, pw.second, -1, [&](int x, int y) {
        return operator_key(dof.sector, dof.index, x, y);
      });
    }
    out += acc;
  }
  return out;
}

Expression unquantize(const Expression& a, SystemDecl system) {
  if (system.classical == 0) {
    throw SymbolicError("unquantize needs at least one classical DOF");
  }
  Expression out;
  for (const auto& [key, c] : a.terms()) {
    MonomialKey rest = key;
    std::vector<std::pair<int, OperatorPower>> classical_ops;
    for (auto it = rest.operators.begin(); it != rest.operators.end();) {
      if (it->first.sector == Sector::Classical) {
        classical_ops.emplace_back(it->first.index, it->second);
        it = rest.operators.erase(it);
      } else {
        ++it;
      }
    }
    Expression acc = Expression::term(c, rest);
    for (const auto& [index, pw] : classical_ops) {
      acc *= ordering_change(pw.q, pw.p, +1,
                             [&](int x, int y) { return classical_key(index, x, y); });
    }
    out += acc;
  }
  return out;
}

UnquantizeCheck unquantize_checked(const Expression& a, SystemDecl system, double hbar,
                                   double factor) {
  UnquantizeCheck r;
  r.result = unquantize(a, system);
  for (const auto& [key, c] : r.result.terms()) {
    if (key.hbar_power == 0) {
      r.leading_norm += c.l1_magnitude();
    } else if (key.hbar_power >= 2) {
      r.residual_norm += c.l1_magnitude() * std::pow(hbar, key.hbar_power);
    }
  }
  r.reliable = r.residual_norm == 0 || r.leading_norm >= factor * r.residual_norm;
  if (!r.reliable) {
    std::ostringstream os;
    os << "unquantization unreliable: hbar^0 norm " << r.leading_norm
       << " does not dominate hbar^2 residual " << r.residual_norm << " by factor " << factor;
    r.message = os.str();
  }
  return r;
}

Expression half_quantize(const Expression& a, const Split& split) {
  const Expression quantized = weyl_quantize(a, split);
  if (split.classical.empty()) return quantized;
  return unquantize(quantized, split.target());
}

SeriesResult heisenberg_series(const Expression& o, const Expression& h,
                               const SeriesOptions& options) {
  SeriesResult r;
  r.iterates.push_back(o);
  r.value = o;
  Expression current = o;
  const Expression t = Expression::parameter(options.time);
  Expression t_power(1);
  Rational inv_factorial(1);
  for (int n = 1;; ++n) {
    if (options.truncation_order > 0 && n > options.truncation_order) break;
    if (options.truncation_order == 0 && n > options.max_iterates) {
      throw NonTerminatingSeries("bracket chain did not terminate within " +
                                     std::to_string(options.max_iterates) +
                                     " iterates; supply a truncation order",
                                 r.iterates);
    }
    const Expression b = options.bracket == BracketKind::Hybrid ? hybrid_bracket(current, h)
                                                                : commutator(current, h);
    current = b.divide_by_i_hbar();
    if (current.is_zero()) {
      r.terminated = true;
      break;
    }
    r.iterates.push_back(current);
    t_power *= t;
    inv_factorial /= n;
    r.value += t_power * current * Coefficient(inv_factorial);
  }
  return r;
}

std::vector<Expression> hybrid_monomials(int max_degree) {
  std::vector<Expression> out;
  for (int d = 1; d <= max_degree; ++d) {
    for (int a = d; a >= 0; --a) {
      for (int b = d - a; b >= 0; --b) {
        for (int c = d - a - b; c >= 0; --c) {
          const int e = d - a - b - c;
          MonomialKey key = classical_key(1, a, b);
          if (c + e > 0) key.operators[{Sector::Quantum, 1}] = {c, e};
          out.push_back(Expression::term(Coefficient(1), key));
        }
      }
    }
  }
  return out;
}

std::optional<JacobiWitness> find_jacobi_witness(int max_degree) {
  const auto monomials = hybrid_monomials(max_degree);
  std::vector<int> degree;
  for (const auto& m : monomials) degree.push_back(m.total_degree());
  const int n = static_cast<int>(monomials.size());
  for (int total = 3; total <= 3 * max_degree; ++total) {
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        const int k_degree = total - degree[i] - degree[j];
        if (k_degree < 1 || k_degree > max_degree) continue;
        for (int k = j; k < n; ++k) {
          if (degree[k] != k_degree) continue;
          const auto& a = monomials[i];
          const auto& b = monomials[j];
          const auto& c = monomials[k];
          const bool classical = a.has_classical_symbols() || b.has_classical_symbols() ||
                                 c.has_classical_symbols();
          const bool quantum = a.has_sector(Sector::Quantum) || b.has_sector(Sector::Quantum) ||
                               c.has_sector(Sector::Quantum);
          if (!classical || !quantum) continue;
          Expression j_value = jacobiator(a, b, c);
          if (!j_value.is_zero()) return JacobiWitness{a, b, c, std::move(j_value)};
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace halfq::symba
