#pragma once

#include <string>
#include <vector>

#include "halfq/harness/config.hpp"

namespace halfq::harness {

/// Two interacting particles: a classical one of mass m coupled through
/// k q P to a quantum one of mass M. Defaults m = M = 1, k = 0.1, hbar = 1,
/// 64-point grids on [-10, 10], classical data (0, 1, 1, 1).
SystemConfig build_example();

/// The half-quantized Hamiltonian on the hybrid system.
symba::Expression hybrid_hamiltonian(const SystemConfig& cfg);

/// A fundamental observable of the hybrid system and where its full-quantum
/// counterpart lives: local position or momentum on tensor slot `slot`.
struct Observable {
  std::string name;  // q1, p1, Q1, P1, ...
  symba::Expression expr;
  bool position = true;
  std::size_t slot = 0;
};

/// q_i, p_i for the classical sector then Q_a, P_a, filtered by
/// cfg.sweep.observables when that list is nonempty. Throws ConfigError for
/// an unknown name.
std::vector<Observable> fundamental_observables(const SystemConfig& cfg);

/// Hybrid-bracket series of one observable with time parameter t.
symba::SeriesResult evolve_observable(const SystemConfig& cfg, const symba::Expression& o);

struct ClosedFormRow {
  std::string observable;
  symba::Expression computed;
  symba::Expression expected;
  bool solution_match = false;
  /// d(computed)/dq1 and d(computed)/dp1 against the expected coefficients,
  /// compared up to sign since delta_L only sees their magnitude.
  std::vector<symba::Expression> margin_computed;
  std::vector<symba::Expression> margin_expected;
  bool margin_match = false;
  bool pass() const { return solution_match && margin_match; }
};

struct ClosedFormCheck {
  std::vector<ClosedFormRow> rows;
  bool pass() const;
};

/// Evolves q1, p1, Q1, P1 under the example's hybrid Hamiltonian and compares
/// with the known solutions and margin coefficients as exact polynomials.
/// Throws ConfigError when cfg is not the example Hamiltonian (any
/// parameter values are allowed).
ClosedFormCheck closed_form_check(const SystemConfig& cfg);

/// Closed-form delta_L of the example observable at time t:
/// sum_i |coefficient_i| delta_i with the parameters of cfg.
double closed_form_delta(const SystemConfig& cfg, const std::string& observable, double t);

}  // namespace halfq::harness
