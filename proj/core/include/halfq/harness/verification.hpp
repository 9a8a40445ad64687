#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "halfq/errorket/classicality.hpp"
#include "halfq/halfdyn/bounds.hpp"
#include "halfq/harness/config.hpp"
#include "halfq/harness/example.hpp"
#include "halfq/hilbert/spectral.hpp"

namespace halfq::harness {

/// A state with too much mass near the grid boundary or the Nyquist modes.
class UnconvergedGrid : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

hilbert::State classical_state(const SystemConfig& cfg);
hilbert::State quantum_state(const SystemConfig& cfg);

struct ConsistencyCheck {
  double residual = 0;  // max |H_symbolic - H_reference| / max |H_reference|
  double tolerance = 0;
  bool pass() const { return residual <= tolerance; }
};

/// Compares the oracle Hamiltonian (symbolic Weyl quantization evaluated on
/// the grids) with an independent numeric construction: each monomial
/// q^a p^b becomes the average over all orderings of its factor matrices.
ConsistencyCheck hamiltonian_consistency(const SystemConfig& cfg, const hilbert::OperatorMatrix& h);

/// The full-quantum experiment: every DOF on its grid, classical sector
/// first, diagonalized once and reused for all times.
class Oracle {
 public:
  /// Throws UnconvergedGrid if the initial state fails the edge guard.
  explicit Oracle(const SystemConfig& cfg, bool check_consistency = true);

  const std::vector<hilbert::Grid>& grids() const { return grids_; }
  const hilbert::State& phi_c() const { return phi_c_; }
  const hilbert::State& phi_q() const { return phi_q_; }
  const hilbert::State& psi0() const { return psi0_; }
  const std::shared_ptr<const hilbert::Eigenbasis>& basis() const { return basis_; }
  /// "dense" or "blocked on slot <k>".
  const std::string& solver() const { return solver_; }
  const std::optional<ConsistencyCheck>& consistency() const { return consistency_; }
  hilbert::EdgeMass initial_edge() const { return edge0_; }

  /// psi(t); throws UnconvergedGrid when the evolved state fails the guard.
  hilbert::State evolve(double t) const;
  hilbert::EdgeMass edge(const hilbert::State& psi) const;
  /// Local A0 of a fundamental observable embedded on the full grids.
  hilbert::EmbeddedDecomp local(const Observable& o) const;
  hilbert::HeisenbergObservable heisenberg(const Observable& o, double t) const;

 private:
  SystemConfig cfg_;
  std::vector<hilbert::Grid> grids_;
  hilbert::State phi_c_, phi_q_, psi0_;
  std::shared_ptr<const hilbert::Eigenbasis> basis_;
  std::string solver_;
  std::optional<ConsistencyCheck> consistency_;
  hilbert::EdgeMass edge0_;
};

struct BoundRow {
  std::string observable;
  double t = 0;
  double a0 = 0;  // centre of I0
  double D = 0;   // half-width of I0
  halfdyn::PredictionBound bound;
  double oracle = 0;  // P(a in I0) from the full-quantum experiment
  bool verdict = false;
  halfdyn::LeakageCheck x1, x2;
  bool leakage_pass = false;
};

struct DiscrepancyRow {
  std::string observable;
  double t = 0;
  int order = 1;
  halfdyn::Discrepancy d;
  bool pass = false;
};

struct MarginRow {
  std::string observable;
  double t = 0;
  std::string expression;
  halfdyn::MarginReport margin;
  double bin_max = 0;  // largest delta_L over the xi-state bins
  double used = 0;     // max(margin, bin_max)
  double mean = 0;     // <phi^Q|B|phi^Q>
  double sigma = 0;    // spread of B in phi^Q
};

struct VerificationReport {
  std::string config_name;
  int order = 1;
  double p = 0.99;
  bool applicable = false;
  std::string status;
  std::vector<errorket::SequenceSpec> sequences;
  errorket::ClassicalityCertificate certificate;
  std::optional<ClosedFormCheck> closed_form;
  halfdyn::ErrorConstants constants;
  std::optional<ConsistencyCheck> consistency;
  std::vector<MarginRow> margins;
  std::vector<BoundRow> rows;
  std::vector<DiscrepancyRow> discrepancies;
  // Environment metadata.
  std::vector<hilbert::Grid> classical_grids, quantum_grids;
  std::size_t oracle_dimension = 0;
  std::string solver;
  double worst_edge_mass = 0;
  Tolerances tolerances;
  unsigned seed = 0;

  std::size_t bound_violations() const;
  std::size_t leakage_violations() const;
  std::size_t discrepancy_violations() const;
  /// Applicable and every row, leakage check, discrepancy and consistency
  /// check passes.
  bool pass() const;
};

/// Gate, oracle, bounds, leakage and discrepancy rows for cfg.bounds.order.
/// Throws UnconvergedGrid from the edge guard.
VerificationReport run_verification(const SystemConfig& cfg);
/// Reuses an oracle built from the same cfg (grids, states, Hamiltonian);
/// only the bound settings and sweep may differ.
VerificationReport run_verification(const SystemConfig& cfg, const Oracle& oracle);

/// Classicality sequences of the evolved fundamental observables and the
/// certificate of the classical factor at cfg's order.
errorket::ClassicalityCertificate certify_config(const SystemConfig& cfg,
                                                 std::vector<errorket::SequenceSpec>* sequences = nullptr);

/// Bounds only (no oracle): margin rows and PredictionBounds for the sweep.
struct BoundsTable {
  std::vector<MarginRow> margins;
  std::vector<BoundRow> rows;  // oracle fields left at 0
};
BoundsTable bounds_table(const SystemConfig& cfg);

}  // namespace halfq::harness
