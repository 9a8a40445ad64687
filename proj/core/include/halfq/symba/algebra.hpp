#pragma once

#include <optional>
#include <string>
#include <vector>

#include "halfq/symba/expression.hpp"

namespace halfq::symba {

/// [A, B] = AB - BA.
Expression commutator(const Expression& a, const Expression& b);

/// Formal derivative with respect to a classical c-number symbol. Operator
/// factors are untouched.
Expression partial_derivative(const Expression& a, Symbol s);

/// sum_i dA/dq_i dB/dp_i - dA/dp_i dB/dq_i over the classical symbols present,
/// operator factors multiplied in written order (A-side first).
Expression poisson_bracket(const Expression& a, const Expression& b);

/// The symmetrized double bracket 1/2 ({A,B} - {B,A}) with operator order kept.
Expression double_bracket(const Expression& a, const Expression& b);

/// (A, B) = [A, B] + i hbar {{A, B}}.
Expression hybrid_bracket(const Expression& a, const Expression& b);

/// (A,(B,C)) + (B,(C,A)) + (C,(A,B)).
Expression jacobiator(const Expression& a, const Expression& b, const Expression& c);

/// Which DOFs of a fully classical system stay classical and which become
/// quantum. Entries are 1-based DOF indices of the source system; the j-th
/// classical entry becomes classical DOF j, the a-th quantum entry becomes
/// quantum DOF a.
struct Split {
  std::vector<int> classical;
  std::vector<int> quantum;

  /// DOFs 1..M classical, M+1..M+N quantum.
  static Split contiguous(int m, int n);
  int total() const { return static_cast<int>(classical.size() + quantum.size()); }
  SystemDecl target() const {
    return {static_cast<int>(classical.size()), static_cast<int>(quantum.size())};
  }
  /// Throws SymbolicError when an index repeats or 1..total() is not covered.
  void validate() const;
};

/// Weyl (fully symmetrized) quantization of a classical polynomial:
/// q^a p^b -> sum_k k! C(a,k) C(b,k) (-i hbar/2)^k Q^(a-k) P^(b-k) in normal
/// order. Every symbol q_i, p_i maps to the operator of the same index in
/// `sector`. Throws if the input already contains operators.
Expression weyl_quantize(const Expression& a, Sector sector = Sector::Classical);

/// Weyl quantization with DOFs relabelled by `split`: classical entries land on
/// the classical-sector operators qh/ph, quantum entries on Q/P.
Expression weyl_quantize(const Expression& a, const Split& split);

/// The unquantization map: classical-sector operators are rewritten in the
/// Weyl-symbol basis and replaced by c-numbers,
/// qh^a ph^b -> sum_k k! C(a,k) C(b,k) (+i hbar/2)^k q^(a-k) p^(b-k);
/// quantum-sector factors pass through. Inverse of weyl_quantize on the
/// classical sector. Throws if the system declares no classical DOFs.
Expression unquantize(const Expression& a, SystemDecl system);

struct UnquantizeCheck {
  Expression result;
  double leading_norm = 0;  // L1 norm of the hbar^0 grade
  double residual_norm = 0;  // L1 norm of grades >= 2, weighted by hbar^grade
  bool reliable = true;     // leading_norm >= factor * residual_norm
  std::string message;
};

/// unquantize plus the magnitude guard: flags the result as unreliable when
/// the hbar^0 part does not dominate the hbar^2-and-higher residual by
/// `factor`. Parameters count as 1 in the norms.
UnquantizeCheck unquantize_checked(const Expression& a, SystemDecl system, double hbar,
                                   double factor = 1e3);

/// The half-quantization map: unquantize(weyl_quantize(a, split)).
Expression half_quantize(const Expression& a, const Split& split);

enum class BracketKind { Commutator, Hybrid };

struct SeriesOptions {
  std::string time = "t";
  BracketKind bracket = BracketKind::Hybrid;
  /// Highest power of t kept when the chain does not terminate; 0 means the
  /// chain must terminate on its own.
  int truncation_order = 0;
  /// Iterates tried before giving up (without truncation) and reported in the
  /// error.
  int max_iterates = 24;
};

struct SeriesResult {
  Expression value;                 // sum_n t^n / n! C_n
  std::vector<Expression> iterates;  // C_0 = O, C_{n+1} = (C_n, H) / (i hbar)
  bool terminated = false;          // some iterate vanished
};

class NonTerminatingSeries : public SymbolicError {
 public:
  NonTerminatingSeries(const std::string& message, std::vector<Expression> iterates)
      : SymbolicError(message), iterates_(std::move(iterates)) {}
  const std::vector<Expression>& iterates() const { return iterates_; }

 private:
  std::vector<Expression> iterates_;
};

/// Heisenberg-picture series O(t) = sum_n (1/n!) (t / i hbar)^n (...(O, H)..., H).
SeriesResult heisenberg_series(const Expression& o, const Expression& h,
                               const SeriesOptions& options = {});

struct JacobiWitness {
  Expression a, b, c;
  Expression value;
};

/// Enumerate unit-coefficient monomials over {q1, p1, Q1, P1} with each
/// factor of degree <= max_degree, visiting triples in order of combined
/// degree, and return the first mixed triple whose jacobiator is nonzero.
std::optional<JacobiWitness> find_jacobi_witness(int max_degree = 3);

/// All unit monomials over {q1, p1, Q1, P1} of degree 1..max_degree in a fixed
/// order (also used by tests).
std::vector<Expression> hybrid_monomials(int max_degree);

}  // namespace halfq::symba
