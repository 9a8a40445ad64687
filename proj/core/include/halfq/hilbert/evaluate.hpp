#pragma once

#include <map>
#include <string>

#include "halfq/hilbert/grid.hpp"
#include "halfq/symba/expression.hpp"

namespace halfq::hilbert {

/// Numeric values for the free symbols of an expression.
struct Bindings {
  std::map<symba::Symbol, double> classical;
  std::map<std::string, double> parameters;
};

class UnboundSymbol : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Scalar value of a monomial's c-number part (coefficient, parameters,
/// hbar, classical symbols).
cplx scalar_value(const symba::MonomialKey& key, const symba::Coefficient& c, const Bindings& b,
                  double hbar);

/// Matrix of an expression on the tensor product of `grids` (map order:
/// classical-sector operator DOFs first, then quantum-sector). Each monomial
/// becomes the Kronecker product of its per-DOF factors X^a P^b. The
/// Hermitian flag is set when the expression is symbolically self-adjoint.
/// Throws UnboundSymbol for a classical symbol or parameter without a value
/// and for an operator DOF without a grid.
OperatorMatrix evaluate_symbolic(const symba::Expression& e, const Bindings& b,
                                 const std::map<symba::OperatorDof, Grid>& grids, double hbar);

/// Scalar-valued expressions only.
cplx evaluate_scalar(const symba::Expression& e, const Bindings& b, double hbar);

}  // namespace halfq::hilbert
