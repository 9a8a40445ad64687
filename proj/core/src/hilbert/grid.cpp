#include "halfq/hilbert/grid.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "halfq/hilbert/operators.hpp"

namespace halfq::hilbert {

Grid::Grid(int n, double lo, double hi) : npoints(n), xmin(lo), xmax(hi) {
  if (n < 8) throw GridError("grid needs at least 8 points");
  if (!(hi > lo)) throw GridError("grid needs xmax > xmin");
}

RealVector Grid::points() const {
  RealVector x(npoints);
  for (int j = 0; j < npoints; ++j) x[j] = point(j);
  return x;
}

RealVector Grid::wavenumbers() const {
  RealVector k(npoints);
  const double base = 2.0 * std::numbers::pi / length();
  for (int j = 0; j < npoints; ++j) k[j] = base * (j < npoints / 2 ? j : j - npoints);
  return k;
}

std::size_t total_dimension(const std::vector<Grid>& grids) {
  std::size_t d = 1;
  for (const auto& g : grids) d *= static_cast<std::size_t>(g.npoints);
  return d;
}

State::State(Vector amps, std::vector<Grid> g) : amplitudes(std::move(amps)), grids(std::move(g)) {
  if (dimension() != total_dimension(grids)) {
    throw std::invalid_argument("state dimension does not match its grids");
  }
}

State State::normalized() const {
  const double n = norm();
  if (n == 0) throw std::domain_error("cannot normalize a zero state");
  return {amplitudes / n, grids};
}

cplx State::inner(const State& other) const { return amplitudes.dot(other.amplitudes); }

OperatorMatrix::OperatorMatrix(Matrix m, std::vector<Grid> g, bool herm)
    : entries(std::move(m)), grids(std::move(g)), hermitian(herm) {
  if (entries.rows() != entries.cols()) throw std::invalid_argument("operator must be square");
  if (dimension() != total_dimension(grids)) {
    throw std::invalid_argument("operator dimension does not match its grids");
  }
}

bool OperatorMatrix::check_hermitian(double tol) const {
  const double scale = entries.cwiseAbs().maxCoeff();
  if (scale == 0) return true;
  const double diff = (entries - entries.adjoint()).cwiseAbs().maxCoeff();
  return diff <= tol * scale;
}

State OperatorMatrix::apply(const State& psi) const {
  if (psi.dimension() != dimension()) throw std::invalid_argument("dimension mismatch");
  return {entries * psi.amplitudes, psi.grids};
}

State gaussian_state(const Grid& g, double q0, double p0, double dq, double hbar) {
  if (!(dq > 0)) throw GridError("packet width must be positive");
  if (q0 - 6 * dq < g.xmin || q0 + 6 * dq > g.xmax) {
    std::ostringstream os;
    os << "packet too wide for grid: [" << q0 - 6 * dq << ", " << q0 + 6 * dq
       << "] not inside [" << g.xmin << ", " << g.xmax << "]";
    throw GridError(os.str());
  }
  Vector a(g.npoints);
  for (int j = 0; j < g.npoints; ++j) {
    const double x = g.point(j);
    const double env = std::exp(-(x - q0) * (x - q0) / (4 * dq * dq));
    a[j] = env * std::polar(1.0, p0 * x / hbar);
  }
  return State(a / a.norm(), {g});
}

State load_amplitudes(const std::string& path, const Grid& g) {
  std::ifstream in(path);
  if (!in) throw GridError("cannot open amplitude file " + path);
  std::vector<cplx> values;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double re = 0, im = 0;
    if (!(ls >> re)) continue;
    if (!(ls >> im)) throw GridError("amplitude line needs two columns: " + line);
    values.emplace_back(re, im);
  }
  if (static_cast<int>(values.size()) != g.npoints) {
    throw GridError("amplitude file has " + std::to_string(values.size()) + " rows, grid has " +
                    std::to_string(g.npoints));
  }
  Vector a = Eigen::Map<Vector>(values.data(), g.npoints);
  if (a.norm() == 0) throw GridError("amplitude file has zero norm");
  return State(a / a.norm(), {g});
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

State tensor(const State& a, const State& b) {
  Vector out(a.amplitudes.size() * b.amplitudes.size());
  for (Eigen::Index i = 0; i < a.amplitudes.size(); ++i) {
    out.segment(i * b.amplitudes.size(), b.amplitudes.size()) = a.amplitudes[i] * b.amplitudes;
  }
  std::vector<Grid> g = a.grids;
  g.insert(g.end(), b.grids.begin(), b.grids.end());
  return {std::move(out), std::move(g)};
}

OperatorMatrix tensor(const OperatorMatrix& a, const OperatorMatrix& b) {
  std::vector<Grid> g = a.grids;
  g.insert(g.end(), b.grids.begin(), b.grids.end());
  return {kron(a.entries, b.entries), std::move(g), a.hermitian && b.hermitian};
}

RealVector marginal(const State& psi, std::size_t slot) {
  const auto& grids = psi.grids;
  Eigen::Index outer = 1, inner = 1;
  for (std::size_t s = 0; s < slot; ++s) outer *= grids[s].npoints;
  for (std::size_t s = slot + 1; s < grids.size(); ++s) inner *= grids[s].npoints;
  const Eigen::Index local = grids[slot].npoints;
  RealVector m = RealVector::Zero(local);
  for (Eigen::Index o = 0; o < outer; ++o)
    for (Eigen::Index l = 0; l < local; ++l)
      m[l] += psi.amplitudes.segment((o * local + l) * inner, inner).squaredNorm();
  return m;
}

EdgeMass edge_mass(const State& psi, int cells) {
  EdgeMass e;
  for (std::size_t s = 0; s < psi.grids.size(); ++s) {
    const int n = psi.grids[s].npoints;
    const RealVector pos = marginal(psi, s);
    e.position = std::max(e.position, pos.head(cells).sum() + pos.tail(cells).sum());

    Matrix dft(n, n);
    for (int m = 0; m < n; ++m)
      for (int j = 0; j < n; ++j)
        dft(m, j) = std::polar(1.0 / std::sqrt(n), -2.0 * std::numbers::pi * m * j / n);
    const State mom(apply_local(dft, psi.grids, s, psi.amplitudes), psi.grids);
    const RealVector pm = marginal(mom, s);
    e.momentum = std::max(e.momentum, pm.segment(n / 2 - cells / 2, cells).sum());
  }
  return e;
}

}  // namespace halfq::hilbert
