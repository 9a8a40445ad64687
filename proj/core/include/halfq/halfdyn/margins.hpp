#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "halfq/errorket/classicality.hpp"
#include "halfq/hilbert/evaluate.hpp"
#include "halfq/symba/expression.hpp"

namespace halfq::halfdyn {

using hilbert::OperatorMatrix;
using hilbert::State;
using symba::Expression;
using symba::Symbol;

class BoundError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A hybrid observable B = sum_j A_j^c(q, p) A_j^Q with its classical data
/// and the grids of the quantum sector.
struct HybridObservable {
  std::string name;
  Expression expr;
  errorket::ClassicalData binding;
  std::vector<hilbert::Grid> quantum_grids;  // grid of quantum DOF a at a - 1
  std::map<std::string, double> parameters;
  double hbar = 1.0;

  /// Throws BoundError when a classical symbol has no data, a quantum DOF has
  /// no grid, or an operator of the classical sector is present.
  void validate() const;
  hilbert::Bindings bindings() const;
  /// Matrix of `e` on the quantum sector with classical symbols bound to their
  /// data values.
  OperatorMatrix quantum_matrix(const Expression& e) const;
  OperatorMatrix quantum_matrix() const { return quantum_matrix(expr); }
};

struct MarginTerm {
  std::vector<Symbol> symbols;  // the derivative sequence
  double expectation = 0;       // |<xi|(D^dagger)^L D^L|xi>|^(1/2L)
  double contribution = 0;      // expectation * product of margins / n!
};

struct MarginReport {
  int order = 1;
  double first_order = 0;
  double second_order = 0;
  double truncation = 0;  // magnitude of the omitted third-order terms
  std::vector<MarginTerm> terms;
  double value() const { return first_order + second_order; }
};

/// delta_L(B) with xi^Q on the quantum grids: first-order sum over classical
/// symbols plus the second-order terms; third-order terms are reported as
/// the truncation magnitude. Throws BoundError for unbound symbols.
MarginReport delta_L_margin(const HybridObservable& b, const State& xi_q, int order);

/// Exact scalar derivative dB/dO_i when it carries no operators, for the
/// symbolic margin column. Throws BoundError otherwise.
std::map<Symbol, Expression> margin_coefficients(const Expression& b,
                                                 const std::vector<Symbol>& symbols);

struct BoundConfig {
  int order = 1;
  double p = 0.99;
  /// xi-state half-width; unset means I_B = delta_L.
  std::optional<double> i_b;

  void validate() const;
  double half_width(double delta_l) const { return i_b.value_or(delta_l); }
  /// 1 - p taken from the shortest decimal form of p, so 0.99 gives 0.01.
  double complement() const;
};

/// (delta_L + I_B) / (1 - p)^(1/2L).
double spread_Delta_L(double delta_l, const BoundConfig& cfg);

}  // namespace halfq::halfdyn
