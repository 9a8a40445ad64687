#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace halfq::hilbert {

using cplx = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

class GridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform periodic grid x_j = xmin + j * spacing, j = 0..npoints-1.
struct Grid {
  int npoints = 64;
  double xmin = -10.0;
  double xmax = 10.0;

  Grid() = default;
  Grid(int n, double lo, double hi);  // throws GridError: npoints < 8 or xmax <= xmin

  double length() const { return xmax - xmin; }
  double spacing() const { return length() / npoints; }
  double point(int j) const { return xmin + j * spacing(); }
  RealVector points() const;
  /// Discrete Fourier wave numbers 2 pi / L * (j for j < n/2, j - n otherwise).
  RealVector wavenumbers() const;

  friend bool operator==(const Grid&, const Grid&) = default;
};

std::size_t total_dimension(const std::vector<Grid>& grids);

/// Complex amplitudes over the tensor-product grid; the first grid is the
/// slowest index. Error kets use the same type without normalization.
struct State {
  Vector amplitudes;
  std::vector<Grid> grids;

  State() = default;
  State(Vector amps, std::vector<Grid> g);  // throws on dimension mismatch

  std::size_t dimension() const { return static_cast<std::size_t>(amplitudes.size()); }
  double norm() const { return amplitudes.norm(); }
  bool is_normalized(double tol = 1e-12) const { return std::abs(norm() - 1.0) <= tol; }
  State normalized() const;
  cplx inner(const State& other) const;  // <this|other>
};

/// Dense operator on the tensor-product grid.
struct OperatorMatrix {
  Matrix entries;
  std::vector<Grid> grids;
  bool hermitian = false;

  OperatorMatrix() = default;
  OperatorMatrix(Matrix m, std::vector<Grid> g, bool herm);

  std::size_t dimension() const { return static_cast<std::size_t>(entries.rows()); }
  /// ||A - A^dagger||_max <= tol * ||A||_max.
  bool check_hermitian(double tol = 1e-10) const;
  State apply(const State& psi) const;
};

/// Normalized packet proportional to exp(-(q-q0)^2 / (4 dq^2) + i p0 q / hbar).
/// Throws GridError unless [q0 - 6 dq, q0 + 6 dq] lies inside the grid.
State gaussian_state(const Grid& g, double q0, double p0, double dq, double hbar);

/// Two-column text (real imag) per grid point; '#' starts a comment. The
/// result is normalized; throws GridError on a count mismatch or zero norm.
State load_amplitudes(const std::string& path, const Grid& g);

State tensor(const State& a, const State& b);
OperatorMatrix tensor(const OperatorMatrix& a, const OperatorMatrix& b);
Matrix kron(const Matrix& a, const Matrix& b);

/// Probability mass in the `cells` outermost cells of each grid, in position
/// space and in momentum space (the modes closest to the Nyquist frequency).
struct EdgeMass {
  double position = 0;
  double momentum = 0;
  double worst() const { return std::max(position, momentum); }
};
EdgeMass edge_mass(const State& psi, int cells = 4);

/// Marginal probability distribution of one tensor slot.
RealVector marginal(const State& psi, std::size_t slot);

}  // namespace halfq::hilbert
