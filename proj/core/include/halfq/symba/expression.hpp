#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "halfq/symba/coefficient.hpp"

namespace halfq::symba {

/// Degree-of-freedom counts of a half quantum system: M classical, N quantum.
struct SystemDecl {
  int classical = 0;
  int quantum = 0;
  friend bool operator==(const SystemDecl&, const SystemDecl&) = default;
};

struct PhysicalConstants {
  double hbar = 1.0;
};

/// Scalar classical variable q_i or p_i (a c-number).
enum class Canonical : std::uint8_t { Position, Momentum };

struct Symbol {
  Canonical kind = Canonical::Position;
  int index = 1;

  static Symbol q(int i) { return {Canonical::Position, i}; }
  static Symbol p(int i) { return {Canonical::Momentum, i}; }

  auto operator<=>(const Symbol& o) const {
    if (auto c = index <=> o.index; c != 0) return c;
    return kind <=> o.kind;
  }
  bool operator==(const Symbol&) const = default;
  std::string str() const;
};

/// Which Hilbert-space factor an operator symbol acts on.
///  - Classical: operators q^_i, p^_i on the classical sector (written qh<i>, ph<i>).
///  - Quantum:   operators Q^_a, P^_a on the quantum sector (written Q<a>, P<a>).
enum class Sector : std::uint8_t { Classical, Quantum };

struct OperatorDof {
  Sector sector = Sector::Quantum;
  int index = 1;
  auto operator<=>(const OperatorDof&) const = default;
  bool operator==(const OperatorDof&) const = default;
};

/// Normal-ordered power Q^a P^b of one operator DOF.
struct OperatorPower {
  int q = 0;
  int p = 0;
  auto operator<=>(const OperatorPower&) const = default;
  bool operator==(const OperatorPower&) const = default;
  int degree() const { return q + p; }
};

/// Everything about a monomial except its coefficient. Two monomials with
/// equal keys are combined.
struct MonomialKey {
  int hbar_power = 0;
  std::map<std::string, int> parameters;        // commuting named constants (m, M, k, t, ...)
  std::map<Symbol, int> classical;              // c-number factors q_i^n p_i^m
  std::map<OperatorDof, OperatorPower> operators;  // canonical normal order per DOF

  auto operator<=>(const MonomialKey&) const = default;
  bool operator==(const MonomialKey&) const = default;

  bool has_operators() const { return !operators.empty(); }
  int classical_degree() const;
  int operator_degree() const;
};

/// An hbar-graded polynomial over classical c-numbers and ordered operator
/// symbols, held in canonical form: operators on distinct DOFs commute, each
/// DOF is normal ordered (all Q before all P), equal keys are combined, zero
/// terms are dropped. Equality of expressions is equality of canonical forms.
class Expression {
 public:
  using TermMap = std::map<MonomialKey, Coefficient>;

  Expression() = default;
  Expression(Coefficient c);  // NOLINT(google-explicit-constructor)
  Expression(long long c) : Expression(Coefficient(c)) {}  // NOLINT(google-explicit-constructor)

  static Expression term(Coefficient c, MonomialKey key);
  static Expression classical(Symbol s);
  static Expression op_q(Sector sector, int index);
  static Expression op_p(Sector sector, int index);
  static Expression parameter(const std::string& name, int power = 1);
  static Expression hbar(int power = 1);
  static Expression imaginary_unit();

  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  /// True when no monomial contains an operator symbol.
  bool is_scalar_valued() const;
  bool has_classical_symbols() const;
  bool has_sector(Sector s) const;
  /// A single monomial with no classical or operator symbols (invertible scalar).
  bool is_scalar_monomial() const;

  Expression& operator+=(const Expression& o);
  Expression& operator-=(const Expression& o);
  Expression& operator*=(const Expression& o);
  Expression& operator*=(const Coefficient& c);

  friend Expression operator+(Expression a, const Expression& b) { return a += b; }
  friend Expression operator-(Expression a, const Expression& b) { return a -= b; }
  friend Expression operator*(const Expression& a, const Expression& b);
  friend Expression operator*(Expression a, const Coefficient& c) { return a *= c; }
  friend Expression operator*(const Coefficient& c, Expression a) { return a *= c; }
  Expression operator-() const;

  friend bool operator==(const Expression&, const Expression&) = default;

  /// Inverse of a scalar monomial; throws std::domain_error otherwise.
  Expression inverse() const;
  Expression pow(int exponent) const;

  /// Multiply by (i*hbar)^-1.
  Expression divide_by_i_hbar() const;
  Expression multiply_by_i_hbar() const;

  /// Hermitian adjoint: conjugated coefficients, reversed operator order,
  /// re-normal-ordered. Classical symbols and parameters are real.
  Expression adjoint() const;

  /// Replace a named parameter by an exact value.
  Expression substitute(const std::string& parameter, const Coefficient& value) const;
  /// Replace a classical symbol by an exact value.
  Expression substitute(Symbol s, const Coefficient& value) const;

  /// Terms with hbar_power == grade only.
  Expression grade(int hbar_power) const;
  int min_hbar_power() const;
  int max_hbar_power() const;
  int total_degree() const;  // max over monomials of classical + operator degree

  std::vector<Symbol> classical_symbols() const;
  std::vector<std::string> parameter_names() const;

  std::string str() const;

 private:
  void add_term(const MonomialKey& key, const Coefficient& c);
  TermMap terms_;
};

/// Multiply two normal-ordered single-DOF powers: (Q^a P^b)(Q^c P^d) as
/// sum_k k! C(b,k) C(c,k) (-i hbar)^k Q^{a+c-k} P^{b+d-k}.
struct OrderedTerm {
  Coefficient coefficient;
  int hbar_power;
  OperatorPower power;
};
std::vector<OrderedTerm> multiply_dof(const OperatorPower& left, const OperatorPower& right);

class SymbolicError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace halfq::symba
