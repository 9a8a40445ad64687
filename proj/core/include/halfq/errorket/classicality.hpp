#pragma once

#include <string>
#include <vector>

#include "halfq/errorket/errorket.hpp"
#include "halfq/symba/expression.hpp"

namespace halfq::errorket {

using symba::Symbol;

/// Value and margin of one classical DOF, in phase-space units.
struct ClassicalDof {
  double q0 = 0;
  double p0 = 0;
  double delta_q = 1;
  double delta_p = 1;
};

/// Classical-sector initial data O_i^0 with margins delta_i.
class ClassicalData {
 public:
  ClassicalData() = default;
  /// Throws ErrorKetError unless every margin is > 0.
  ClassicalData(std::vector<ClassicalDof> dofs, double hbar);

  const std::vector<ClassicalDof>& dofs() const { return dofs_; }
  std::size_t size() const { return dofs_.size(); }
  double hbar() const { return hbar_; }

  /// Throws ErrorKetError when the symbol's index has no data.
  double value(Symbol s) const;
  double margin(Symbol s) const;
  bool contains(Symbol s) const { return s.index >= 1 && s.index <= static_cast<int>(size()); }
  /// delta_q * delta_p >= hbar / 2 for every DOF.
  bool uncertainty_feasible() const;
  std::vector<Symbol> symbols() const;

 private:
  std::vector<ClassicalDof> dofs_;
  double hbar_ = 1.0;
};

/// A sequence of classical observables, optionally composed `power` times.
struct SequenceSpec {
  std::vector<Symbol> symbols;
  int power = 1;

  /// symbols repeated `power` times.
  std::vector<Symbol> expanded() const;
  std::string str() const;
  friend bool operator==(const SequenceSpec&, const SequenceSpec&) = default;
};

/// All multisets of classical symbols (size 1 .. highest classical degree)
/// along which some solution has a nonvanishing mixed partial derivative.
/// Symbols are those of DOFs 1..m. Order: by size, then lexicographic.
std::vector<SequenceSpec> classicality_sequences(const std::vector<symba::Expression>& solutions,
                                                 int m);

struct CertificateRow {
  SequenceSpec sequence;  // one composed L-order sequence, power 1
  double lhs = 0;         // <E_S|E_S>
  double rhs = 0;         // product of squared margins
  double slack() const { return rhs - lhs; }
};

struct ClassicalityCertificate {
  int order = 1;
  std::vector<CertificateRow> rows;  // ascending slack
  bool pass() const;
  const CertificateRow* worst() const { return rows.empty() ? nullptr : &rows.front(); }
};

/// Position and momentum operators of the classical sector acting on
/// psi_c's grids (one grid per classical DOF).
OperatorMatrix classical_operator(Symbol s, const std::vector<hilbert::Grid>& grids, double hbar);

/// Evaluates <E|E> for every ordered L-tuple of the given first-order
/// sequences, concatenated into one mixed error ket, against the product of
/// squared margins. Throws ErrorKetError when psi_c does not carry one grid
/// per classical DOF.
ClassicalityCertificate certify(const State& psi_c, const ClassicalData& data, int order,
                                const std::vector<SequenceSpec>& sequences);

struct MomentCheck {
  Symbol symbol;
  double moment = 0;  // <(O - O^0)^(2L)>
  double bound = 0;   // delta^(2L)
  bool pass() const { return moment <= bound; }
};

/// The Schwarz-reduced sufficient conditions on single-symbol 2L-th moments,
/// a fast pre-check only.
std::vector<MomentCheck> moment_precheck(const State& psi_c, const ClassicalData& data, int order);

/// (2L - 1)!!, the Gaussian moment factor E[(x - mu)^(2L)] / sigma^(2L).
double double_factorial_odd(int order);
/// ((2L - 1)!!)^(1/2L).
double moment_constant(int order);
/// The literal reading (2L - 1)! / (2 (L - 1)!) of the printed Gaussian
/// constant, kept for the report's comparison with the verified law.
double literal_moment_factor(int order);

struct FeasibleRange {
  double lo = 0;  // from the momentum side, hbar c_L / (2 delta_p)
  double hi = 0;  // from the position side, delta_q / c_L
  bool feasible() const { return lo <= hi; }
  std::string reason;
};

struct GaussianFeasibility {
  int order = 1;
  std::vector<FeasibleRange> ranges;  // one per classical DOF, in dq
  bool feasible() const;
};

/// Packet widths dq for which a minimum-uncertainty Gaussian satisfies the
/// L-order moment conditions: (2L-1)!! dq^(2L) <= delta_q^(2L) and
/// (2L-1)!! (hbar / 2 dq)^(2L) <= delta_p^(2L).
GaussianFeasibility gaussian_feasibility(const ClassicalData& data, int order, double hbar);

}  // namespace halfq::errorket
