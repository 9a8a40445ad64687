#pragma once

#include <vector>

#include "halfq/hilbert/grid.hpp"
#include "halfq/hilbert/spectral.hpp"

namespace halfq::errorket {

using hilbert::cplx;
using hilbert::OperatorMatrix;
using hilbert::State;

class ErrorKetError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// (X_1 - x_1)(X_2 - x_2)...(X_n - x_n)|psi>, the rightmost factor applied
/// first. Throws ErrorKetError on length or dimension mismatch.
State error_ket(const std::vector<OperatorMatrix>& ops, const std::vector<cplx>& centers,
                const State& psi);

/// Delta_n = (<E|E> / (1 - p))^(1/2n). Throws unless 0 < p < 1 and n >= 1.
double spread_from_norm(double norm_squared, int n, double p);

/// Spread of the mixed error ket built from `ops`, n = ops.size().
double spread_n(const std::vector<OperatorMatrix>& ops, const std::vector<cplx>& centers,
                const State& psi, double p);

/// Spread of the n-th power error ket (X - x0)^n |psi>.
double spread_n(const OperatorMatrix& x, double center, const State& psi, int n, double p);

struct TailCheck {
  double measured = 0;  // probability outside [x0 - dist, x0 + dist]
  double bound = 0;     // <E^n|E^n> / dist^(2n)
  bool holds(double tol = 1e-10) const { return measured <= bound + tol; }
};

/// Tail probability of psi in the spectral representation `d` against the
/// error-ket bound, both computed from the same eigenbasis. Throws unless
/// dist > 0 and n >= 1.
TailCheck tail_probability(const hilbert::SpectralDecomp& d, const State& psi, double x0,
                           double dist, int n);

}  // namespace halfq::errorket
