#pragma once

#include <vector>

#include "halfq/halfdyn/margins.hpp"
#include "halfq/hilbert/spectral.hpp"

namespace halfq::halfdyn {

using hilbert::Interval;

/// One coarse-grained spectral component of phi^Q.
struct XiState {
  double centre = 0;  // central value b_u
  State xi_q;         // normalized quantum-sector part
  State xi;           // phi^c (x) xi_q
  double weight = 0;  // <xi_u|phi>, real and positive
};

/// Bins the eigencomponents of phi^Q into windows [b_u - I_B, b_u + I_B)
/// with b_u = b_min + 2 u I_B; empty bins are skipped. Throws BoundError
/// unless I_B > 0 and B is Hermitian.
std::vector<XiState> xi_states(const OperatorMatrix& b_q, const State& phi_q, const State& phi_c,
                               double i_b);
std::vector<XiState> xi_states(const hilbert::SpectralDecomp& d, const State& phi_q,
                               const State& phi_c, double i_b);

/// (1 - p) Delta_L / (2 (2L - 1) I_B); 0 when Delta_L = 0.
double leakage_bound(double delta_big, const BoundConfig& cfg, double i_b);

/// 2 sqrt(P) sqrt(X) + X with P clamped to [0, 1].
double error_term(double probability, double x);

struct PredictionBound {
  Interval i0, imin, imax;
  int order = 1;
  double p = 0.99;
  double i_b = 0;
  double delta_l = 0;
  double Delta_l = 0;
  double pmin = 0;  // P(b in Imin)
  double pmax = 0;  // P(b in Imax)
  double x = 0;     // leakage bound
  double emin = 0;
  double emax = 0;
  double lower_raw() const { return pmin - emin; }
  double upper_raw() const { return pmax + emax; }
  double lower() const;
  double upper() const;
  bool contains(double probability, double tol = 0) const {
    return probability >= lower_raw() - tol && probability <= upper_raw() + tol;
  }
};

/// Bounds from an already decomposed quantum-sector B and a known delta_L.
/// Throws BoundError unless D > Delta_L.
PredictionBound bounds_from(const hilbert::SpectralDecomp& d, const State& phi_q,
                            double delta_l, const BoundConfig& cfg, const Interval& i0);

/// delta_L from phi^Q, Delta_L, Imin/Imax, Pmin/Pmax and Emin/Emax.
PredictionBound prediction_bounds(const HybridObservable& b, const State& phi_q,
                                  const BoundConfig& cfg, const Interval& i0);

/// Worst-case constants with I_B = delta_L and both probability factors 1.
struct ErrorConstants {
  int order = 1;
  double p = 0.99;
  double widening = 0;  // Delta_L / delta_L
  double x = 0;
  double error = 0;
  double sqrt_term = 0;  // 2 sqrt(X)
};
ErrorConstants worst_case_constants(int order, double p);

enum class LeakageKind { X1, X2 };

struct LeakageCheck {
  double measured = 0;
  double bound = 0;
  bool holds(double tol = 1e-10) const { return measured <= bound + tol; }
};

/// X1: weight inside I0 of A(t) carried by bins with b_u outside Imax.
/// X2: weight outside I0 of A(t) carried by bins with b_u inside Imin.
/// Both are compared against the same leakage bound.
LeakageCheck tail_leakage(const hilbert::SpectralDecomp& d, const State& phi_q,
                          const State& phi_c, const PredictionBound& pb,
                          const hilbert::HeisenbergObservable& a_full, LeakageKind which);

struct Discrepancy {
  double lhs = 0;  // |<psi|(A - B)^(2L)|psi>|^(1/2L)
  double rhs = 0;  // delta_L with first and second order terms
  bool holds(double rel = 1e-6) const { return lhs <= rhs * (1 + rel) + 1e-12; }
};

/// Compares the full-quantum A(t) with I (x) B_Q on psi = phi^c (x) psi^Q.
Discrepancy operator_discrepancy(const hilbert::HeisenbergObservable& a_full,
                                 const HybridObservable& b, const State& phi_c,
                                 const State& psi_q, int order);

/// Applies I (x) B_Q to a vector on classical (x) quantum grids.
hilbert::Vector apply_quantum(const hilbert::Matrix& b_q, const hilbert::Vector& v);

}  // namespace halfq::halfdyn
