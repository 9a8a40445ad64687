#pragma once

#include <memory>
#include <vector>

#include "halfq/hilbert/grid.hpp"

namespace halfq::hilbert {

/// Closed real interval.
struct Interval {
  double lo = 0;
  double hi = 0;
  bool contains(double x, double tol = 0) const { return x >= lo - tol && x <= hi + tol; }
  double width() const { return hi - lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Ascending eigenvalues and column-orthonormal eigenvectors.
struct SpectralDecomp {
  RealVector eigenvalues;
  Matrix eigenvectors;

  std::size_t dimension() const { return static_cast<std::size_t>(eigenvalues.size()); }
  double range() const;
  Matrix reconstruct() const;
  /// |<v_n|psi>|^2 per eigenvector.
  RealVector weights(const Vector& psi) const;
};

/// Dense Hermitian eigensolver (LAPACK zheevd). Throws std::invalid_argument
/// when the matrix is not flagged and checked Hermitian.
SpectralDecomp spectral_decompose(const OperatorMatrix& a);
SpectralDecomp spectral_decompose(const Matrix& hermitian);

/// Eigenvalues within 1e-9 * spectral range of an endpoint count as inside.
double endpoint_tolerance(double spectral_range);

/// Sum of |<v_n|psi>|^2 over eigenvalues in the closed interval.
double interval_probability(const SpectralDecomp& d, const State& psi, const Interval& i);
double interval_probability(const RealVector& eigenvalues, const RealVector& weights,
                            const Interval& i, double tol);

/// Eigenbasis of a Hamiltonian, either dense or block-diagonal with respect to
/// a conserved local observable. Coordinates are in an internal eigenvector
/// order matching eigenvalues().
class Eigenbasis {
 public:
  static Eigenbasis dense(const OperatorMatrix& h);

  /// Uses a local Hermitian `symmetry` on tensor slot `slot` that commutes
  /// with h. Its eigenbasis block-diagonalizes h; each block is solved
  /// densely. Throws std::invalid_argument if the off-block residual exceeds
  /// `tol` times ||h||_max.
  static Eigenbasis blocked(const OperatorMatrix& h, const Matrix& symmetry, std::size_t slot,
                            double tol = 1e-9);

  const RealVector& eigenvalues() const { return eigenvalues_; }
  std::size_t dimension() const { return static_cast<std::size_t>(eigenvalues_.size()); }
  const std::vector<Grid>& grids() const { return grids_; }
  std::size_t block_count() const { return blocks_.empty() ? 1 : blocks_.size(); }
  /// Largest off-block magnitude seen while blocking (0 for dense).
  double off_block_residual() const { return off_block_; }

  /// V^dagger v.
  Vector to_eigen(const Vector& v) const;
  /// V c.
  Vector from_eigen(const Vector& c) const;
  /// Materialized V (columns ordered as eigenvalues()).
  Matrix eigenvectors() const;
  /// Sorted dense decomposition.
  SpectralDecomp decomposition() const;
  /// Probability of eigenvalues in the closed interval for the vector v.
  double probability(const Vector& v, const Interval& i) const;

 private:
  struct Block {
    std::vector<Eigen::Index> local_modes;  // symmetry eigenvector indices in this block
    Matrix vectors;                         // block eigenvectors
  };

  // Rows of `v` indexed (outer, slot, inner) in row-major tensor order.
  Vector rotate(const Vector& v, bool adjoint) const;

  RealVector eigenvalues_;
  std::vector<Grid> grids_;
  Matrix dense_;
  Matrix symmetry_vectors_;
  std::vector<Block> blocks_;
  std::size_t slot_ = 0;
  Eigen::Index outer_ = 1;
  Eigen::Index local_ = 1;
  Eigen::Index inner_ = 1;
  double off_block_ = 0;
};

/// exp(-i E t / hbar) in the eigenbasis.
Vector evolve(const Eigenbasis& h, const Vector& psi0, double t, double hbar);

/// psi(t) = exp(-i H t / hbar) psi0 via spectral decomposition.
State evolve_full_quantum(const OperatorMatrix& h, const State& psi0, double t, double hbar);
State evolve_full_quantum(const Eigenbasis& h, const State& psi0, double t, double hbar);

/// Spectral decomposition of a local observable embedded on one tensor slot.
/// Each local eigenvalue carries the full multiplicity of the other slots.
struct EmbeddedDecomp {
  SpectralDecomp local;
  Matrix local_matrix;
  std::vector<Grid> grids;
  std::size_t slot = 0;

  static EmbeddedDecomp make(const OperatorMatrix& local, const std::vector<Grid>& grids,
                             std::size_t slot);
  /// Probability weight of each local eigenvalue in psi.
  RealVector weights(const Vector& psi) const;
  double probability(const Vector& psi, const Interval& i) const;
  /// Local observable applied to v.
  Vector apply(const Vector& v) const;
  /// Projection of v onto the eigenspaces with eigenvalues in i.
  Vector project(const Vector& v, const Interval& i) const;
};

/// Heisenberg-picture observable A(t) = U^dagger A0 U with U = exp(-i H t / hbar)
/// and A0 a local observable, evaluated through the Schrodinger picture.
class HeisenbergObservable {
 public:
  HeisenbergObservable(std::shared_ptr<const Eigenbasis> h, EmbeddedDecomp a0, double t,
                       double hbar);

  double time() const { return t_; }
  /// <v| Pi_I(A(t)) |v> for an arbitrary (unnormalized) vector.
  double probability(const Vector& v, const Interval& i) const;
  /// A(t) v.
  Vector apply(const Vector& v) const;
  const EmbeddedDecomp& initial() const { return a0_; }

 private:
  std::shared_ptr<const Eigenbasis> h_;
  EmbeddedDecomp a0_;
  double t_;
  double hbar_;
};

}  // namespace halfq::hilbert
