#include "halfq/hilbert/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "halfq/hilbert/operators.hpp"

namespace halfq::hilbert {

double SpectralDecomp::range() const {
  if (eigenvalues.size() == 0) return 0;
  return eigenvalues.maxCoeff() - eigenvalues.minCoeff();
}

Matrix SpectralDecomp::reconstruct() const {
  return eigenvectors * eigenvalues.cast<cplx>().asDiagonal() * eigenvectors.adjoint();
}

RealVector SpectralDecomp::weights(const Vector& psi) const {
  return (eigenvectors.adjoint() * psi).cwiseAbs2();
}

SpectralDecomp spectral_decompose(const Matrix& hermitian) {
  const auto n = static_cast<lapack_int>(hermitian.rows());
  SpectralDecomp d;
  d.eigenvectors = hermitian;
  d.eigenvalues.resize(n);
  if (n == 0) return d;
  const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', n, d.eigenvectors.data(), n,
                                         d.eigenvalues.data());
  if (info != 0) throw std::runtime_error("zheevd failed with info " + std::to_string(info));
  return d;
}

SpectralDecomp spectral_decompose(const OperatorMatrix& a) {
  if (!a.hermitian || !a.check_hermitian()) {
    throw std::invalid_argument("spectral_decompose needs a Hermitian operator");
  }
  return spectral_decompose(a.entries);
}

double endpoint_tolerance(double spectral_range) { return 1e-9 * spectral_range + 1e-14; }

double interval_probability(const RealVector& eigenvalues, const RealVector& weights,
                            const Interval& i, double tol) {
  double p = 0;
  for (Eigen::Index n = 0; n < eigenvalues.size(); ++n) {
    if (i.contains(eigenvalues[n], tol)) p += weights[n];
  }
  return p;
}

double interval_probability(const SpectralDecomp& d, const State& psi, const Interval& i) {
  if (psi.dimension() != d.dimension()) throw std::invalid_argument("dimension mismatch");
  return interval_probability(d.eigenvalues, d.weights(psi.amplitudes), i,
                              endpoint_tolerance(d.range()));
}

Eigenbasis Eigenbasis::dense(const OperatorMatrix& h) {
  SpectralDecomp d = spectral_decompose(h);
  Eigenbasis e;
  e.eigenvalues_ = std::move(d.eigenvalues);
  e.dense_ = std::move(d.eigenvectors);
  e.grids_ = h.grids;
  return e;
}

Vector Eigenbasis::rotate(const Vector& v, bool adjoint) const {
  const Matrix u = adjoint ? Matrix(symmetry_vectors_.adjoint()) : symmetry_vectors_;
  return apply_local(u, grids_, slot_, v);
}

Eigenbasis Eigenbasis::blocked(const OperatorMatrix& h, const Matrix& symmetry, std::size_t slot,
                               double tol) {
  if (!h.hermitian || !h.check_hermitian()) {
    throw std::invalid_argument("Eigenbasis::blocked needs a Hermitian operator");
  }
  Eigenbasis e;
  e.grids_ = h.grids;
  e.slot_ = slot;
  for (std::size_t k = 0; k < slot; ++k) e.outer_ *= h.grids[k].npoints;
  e.local_ = h.grids.at(slot).npoints;
  for (std::size_t k = slot + 1; k < h.grids.size(); ++k) e.inner_ *= h.grids[k].npoints;
  if (symmetry.rows() != e.local_) throw std::invalid_argument("symmetry dimension mismatch");

  const SpectralDecomp sym = spectral_decompose(symmetry);
  e.symmetry_vectors_ = sym.eigenvectors;

  // Group degenerate symmetry eigenvalues.
  const double gtol = endpoint_tolerance(sym.range());
  std::vector<int> group_of(e.local_);
  int groups = 0;
  for (Eigen::Index m = 0; m < e.local_; ++m) {
    if (m > 0 && sym.eigenvalues[m] - sym.eigenvalues[m - 1] > gtol) ++groups;
    group_of[m] = groups;
  }
  const int ngroups = group_of.back() + 1;

  // R^dagger H R with R = I x U x I, one column at a time.
  const Eigen::Index n = h.entries.rows();
  Matrix a(n, n);
  for (Eigen::Index c = 0; c < n; ++c) a.col(c) = e.rotate(h.entries.col(c), true);
  Matrix rotated(n, n);
  {
    const Matrix at = a.adjoint();
    a.resize(0, 0);
    for (Eigen::Index c = 0; c < n; ++c) rotated.col(c) = e.rotate(at.col(c), true);
  }

  auto group_of_index = [&](Eigen::Index idx) {
    return group_of[(idx / e.inner_) % e.local_];
  };
  const double scale = h.entries.cwiseAbs().maxCoeff();
  double off = 0;
  for (Eigen::Index c = 0; c < n; ++c) {
    const int gc = group_of_index(c);
    for (Eigen::Index r = 0; r < n; ++r) {
      if (group_of_index(r) != gc) off = std::max(off, std::abs(rotated(r, c)));
    }
  }
  e.off_block_ = off;
  if (off > tol * std::max(scale, 1e-300)) {
    throw std::invalid_argument("symmetry does not commute with the operator (off-block residual " +
                                std::to_string(off) + ")");
  }

  std::vector<double> values;
  values.reserve(n);
  for (int g = 0; g < ngroups; ++g) {
    Block b;
    for (Eigen::Index m = 0; m < e.local_; ++m)
      if (group_of[m] == g) b.local_modes.push_back(m);
    std::vector<Eigen::Index> idx;
    for (Eigen::Index o = 0; o < e.outer_; ++o)
      for (Eigen::Index m : b.local_modes)
        for (Eigen::Index i = 0; i < e.inner_; ++i) idx.push_back((o * e.local_ + m) * e.inner_ + i);
    const auto bs = static_cast<Eigen::Index>(idx.size());
    Matrix sub(bs, bs);
    for (Eigen::Index c = 0; c < bs; ++c)
      for (Eigen::Index r = 0; r < bs; ++r) sub(r, c) = rotated(idx[r], idx[c]);
    sub = (sub + sub.adjoint()).eval() / 2.0;
    SpectralDecomp d = spectral_decompose(sub);
    for (Eigen::Index k = 0; k < bs; ++k) values.push_back(d.eigenvalues[k]);
    b.vectors = std::move(d.eigenvectors);
    e.blocks_.push_back(std::move(b));
  }
  e.eigenvalues_ = Eigen::Map<RealVector>(values.data(), static_cast<Eigen::Index>(values.size()));
  return e;
}

Vector Eigenbasis::to_eigen(const Vector& v) const {
  if (blocks_.empty()) return dense_.adjoint() * v;
  const Vector r = rotate(v, true);
  Vector out(v.size());
  Eigen::Index offset = 0;
  for (const auto& b : blocks_) {
    const Eigen::Index bs = b.vectors.rows();
    Vector sub(bs);
    Eigen::Index k = 0;
    for (Eigen::Index o = 0; o < outer_; ++o)
      for (Eigen::Index m : b.local_modes)
        for (Eigen::Index i = 0; i < inner_; ++i) sub[k++] = r[(o * local_ + m) * inner_ + i];
    out.segment(offset, bs) = b.vectors.adjoint() * sub;
    offset += bs;
  }
  return out;
}

Vector Eigenbasis::from_eigen(const Vector& c) const {
  if (blocks_.empty()) return dense_ * c;
  Vector r(c.size());
  Eigen::Index offset = 0;
  for (const auto& b : blocks_) {
    const Eigen::Index bs = b.vectors.rows();
    const Vector sub = b.vectors * c.segment(offset, bs);
    Eigen::Index k = 0;
    for (Eigen::Index o = 0; o < outer_; ++o)
      for (Eigen::Index m : b.local_modes)
        for (Eigen::Index i = 0; i < inner_; ++i) r[(o * local_ + m) * inner_ + i] = sub[k++];
    offset += bs;
  }
  return rotate(r, false);
}

Matrix Eigenbasis::eigenvectors() const {
  if (blocks_.empty()) return dense_;
  const auto n = static_cast<Eigen::Index>(dimension());
  Matrix v(n, n);
  for (Eigen::Index k = 0; k < n; ++k) v.col(k) = from_eigen(Vector::Unit(n, k));
  return v;
}

SpectralDecomp Eigenbasis::decomposition() const {
  const auto n = static_cast<Eigen::Index>(dimension());
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return eigenvalues_[a] < eigenvalues_[b]; });
  const Matrix v = eigenvectors();
  SpectralDecomp d;
  d.eigenvalues.resize(n);
  d.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    d.eigenvalues[k] = eigenvalues_[order[k]];
    d.eigenvectors.col(k) = v.col(order[k]);
  }
  return d;
}

double Eigenbasis::probability(const Vector& v, const Interval& i) const {
  const RealVector w = to_eigen(v).cwiseAbs2();
  const double range = eigenvalues_.maxCoeff() - eigenvalues_.minCoeff();
  return interval_probability(eigenvalues_, w, i, endpoint_tolerance(range));
}

Vector evolve(const Eigenbasis& h, const Vector& psi0, double t, double hbar) {
  if (t == 0) return psi0;
  Vector c = h.to_eigen(psi0);
  const RealVector& e = h.eigenvalues();
  for (Eigen::Index k = 0; k < c.size(); ++k) c[k] *= std::polar(1.0, -e[k] * t / hbar);
  return h.from_eigen(c);
}

State evolve_full_quantum(const Eigenbasis& h, const State& psi0, double t, double hbar) {
  if (psi0.dimension() != h.dimension()) throw std::invalid_argument("dimension mismatch");
  return {evolve(h, psi0.amplitudes, t, hbar), psi0.grids};
}

State evolve_full_quantum(const OperatorMatrix& h, const State& psi0, double t, double hbar) {
  if (t == 0) return psi0;
  return evolve_full_quantum(Eigenbasis::dense(h), psi0, t, hbar);
}

EmbeddedDecomp EmbeddedDecomp::make(const OperatorMatrix& local, const std::vector<Grid>& grids,
                                    std::size_t slot) {
  if (slot >= grids.size() || local.grids.size() != 1 || !(local.grids[0] == grids[slot])) {
    throw std::invalid_argument("local observable does not live on the requested slot");
  }
  return {spectral_decompose(local), local.entries, grids, slot};
}

RealVector EmbeddedDecomp::weights(const Vector& psi) const {
  const Vector rotated = apply_local(local.eigenvectors.adjoint(), grids, slot, psi);
  return marginal(State(rotated, grids), slot);
}

double EmbeddedDecomp::probability(const Vector& psi, const Interval& i) const {
  return interval_probability(local.eigenvalues, weights(psi), i, endpoint_tolerance(local.range()));
}

Vector EmbeddedDecomp::apply(const Vector& v) const {
  return apply_local(local_matrix, grids, slot, v);
}

Vector EmbeddedDecomp::project(const Vector& v, const Interval& i) const {
  const double tol = endpoint_tolerance(local.range());
  Matrix keep = Matrix::Zero(local.eigenvalues.size(), local.eigenvalues.size());
  for (Eigen::Index k = 0; k < local.eigenvalues.size(); ++k)
    if (i.contains(local.eigenvalues[k], tol)) keep(k, k) = 1;
  const Matrix proj = local.eigenvectors * keep * local.eigenvectors.adjoint();
  return apply_local(proj, grids, slot, v);
}

HeisenbergObservable::HeisenbergObservable(std::shared_ptr<const Eigenbasis> h, EmbeddedDecomp a0,
                                           double t, double hbar)
    : h_(std::move(h)), a0_(std::move(a0)), t_(t), hbar_(hbar) {
  if (h_->dimension() != total_dimension(a0_.grids)) {
    throw std::invalid_argument("observable and Hamiltonian dimensions differ");
  }
}

double HeisenbergObservable::probability(const Vector& v, const Interval& i) const {
  return a0_.probability(evolve(*h_, v, t_, hbar_), i);
}

Vector HeisenbergObservable::apply(const Vector& v) const {
  return evolve(*h_, a0_.apply(evolve(*h_, v, t_, hbar_)), -t_, hbar_);
}

}  // namespace halfq::hilbert
