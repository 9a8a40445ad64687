#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "halfq/errorket/classicality.hpp"
#include "halfq/halfdyn/margins.hpp"
#include "halfq/hilbert/grid.hpp"
#include "halfq/symba/algebra.hpp"

namespace halfq::harness {

inline constexpr int kSchemaVersion = 1;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Packet exp(-(x-q0)^2 / 4 dq^2 + i p0 x / hbar).
struct GaussianSpec {
  double q0 = 0;
  double p0 = 0;
  double dq = 1;
};

/// Quantum-sector factor of one DOF: a Gaussian or a two-column amplitude file.
struct StateSpec {
  std::optional<GaussianSpec> gaussian;
  std::string amplitude_file;
};

struct SweepSpec {
  std::vector<double> times{0.0, 0.5, 1.0};
  /// D = factor * Delta_L (or factor * the spread of B in phi^Q when Delta_L = 0).
  std::vector<double> d_factors{1.25, 2.0, 4.0};
  /// Also use the centre shifted by +D.
  bool offset_centres = true;
  /// Fundamental observables by name (q1, p1, Q1, P1, ...); empty means all.
  std::vector<std::string> observables;
};

/// Every numeric tolerance in one place; reports echo them.
struct Tolerances {
  double hermitian = 1e-10;
  double edge_mass = 1e-6;
  int edge_cells = 4;
  double verdict = 1e-9;
  double leakage = 1e-10;
  double discrepancy_rel = 1e-6;
  double consistency = 1e-10;
};

struct SystemConfig {
  int schema_version = kSchemaVersion;
  std::string name;
  int classical_dofs = 1;  // M
  int quantum_dofs = 1;    // N
  /// Classical Hamiltonian over M + N DOFs; DOFs 1..M form the classical
  /// sector and M+1..M+N the quantum sector.
  std::string hamiltonian;
  std::map<std::string, double> parameters;
  double hbar = 1.0;
  std::vector<hilbert::Grid> classical_grids;  // oracle mode
  std::vector<hilbert::Grid> quantum_grids;
  std::vector<errorket::ClassicalDof> classical_data;
  std::vector<GaussianSpec> classical_state;  // the true phi^c used by the oracle
  std::vector<StateSpec> quantum_state;
  halfdyn::BoundConfig bounds;
  SweepSpec sweep;
  Tolerances tolerances;
  unsigned seed = 0;

  symba::SystemDecl full_system() const { return {classical_dofs + quantum_dofs, 0}; }
  symba::SystemDecl hybrid_system() const { return {classical_dofs, quantum_dofs}; }
  symba::Split split() const { return symba::Split::contiguous(classical_dofs, quantum_dofs); }
  errorket::ClassicalData data() const { return {classical_data, hbar}; }

  /// Throws ConfigError with the first problem found: counts, parseability,
  /// margins, and Gaussian packets that do not fit their grids.
  void validate() const;
};

nlohmann::ordered_json to_json(const SystemConfig& c);
SystemConfig config_from_json(const nlohmann::json& j);
SystemConfig load_config(const std::string& path);

}  // namespace halfq::harness
