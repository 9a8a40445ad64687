#include "halfq/hilbert/operators.hpp"

#include <cmath>

namespace halfq::hilbert {

namespace {

struct SlotShape {
  Eigen::Index outer = 1;
  Eigen::Index local = 1;
  Eigen::Index inner = 1;
};

SlotShape slot_shape(const std::vector<Grid>& grids, std::size_t slot) {
  if (slot >= grids.size()) throw std::invalid_argument("tensor slot out of range");
  SlotShape s;
  for (std::size_t k = 0; k < slot; ++k) s.outer *= grids[k].npoints;
  s.local = grids[slot].npoints;
  for (std::size_t k = slot + 1; k < grids.size(); ++k) s.inner *= grids[k].npoints;
  return s;
}

}  // namespace

OperatorMatrix identity_operator(const std::vector<Grid>& grids) {
  const auto n = static_cast<Eigen::Index>(total_dimension(grids));
  return {Matrix::Identity(n, n), grids, true};
}

OperatorMatrix position_operator(const Grid& g) {
  return {g.points().cast<cplx>().asDiagonal(), {g}, true};
}

OperatorMatrix momentum_operator(const Grid& g, double hbar) {
  const int n = g.npoints;
  const RealVector k = g.wavenumbers();
  Matrix p(n, n);
  for (int j = 0; j < n; ++j) {
    for (int l = 0; l < n; ++l) {
      cplx s = 0;
      for (int m = 0; m < n; ++m) s += k[m] * std::polar(1.0, k[m] * (j - l) * g.spacing());
      p(j, l) = hbar * s / static_cast<double>(n);
    }
  }
  // Exact Hermitian symmetrization removes rounding asymmetry.
  Matrix herm = (p + p.adjoint()) / 2.0;
  return {std::move(herm), {g}, true};
}

OperatorMatrix embed(const Matrix& local, const std::vector<Grid>& grids, std::size_t slot,
                     bool hermitian) {
  const SlotShape s = slot_shape(grids, slot);
  if (local.rows() != s.local) throw std::invalid_argument("local operator dimension mismatch");
  Matrix m = kron(kron(Matrix::Identity(s.outer, s.outer), local),
                  Matrix::Identity(s.inner, s.inner));
  return {std::move(m), grids, hermitian};
}

Vector apply_local(const Matrix& local, const std::vector<Grid>& grids, std::size_t slot,
                   const Vector& v) {
  const SlotShape s = slot_shape(grids, slot);
  if (local.cols() != s.local || v.size() != s.outer * s.local * s.inner) {
    throw std::invalid_argument("dimension mismatch in apply_local");
  }
  Vector out(v.size());
  const Eigen::Index block = s.local * s.inner;
  for (Eigen::Index o = 0; o < s.outer; ++o) {
    // Within one outer index the slice is an (inner x local) column-major matrix.
    Eigen::Map<const Matrix> x(v.data() + o * block, s.inner, s.local);
    Eigen::Map<Matrix> y(out.data() + o * block, s.inner, local.rows());
    y.noalias() = x * local.transpose();
  }
  return out;
}

}  // namespace halfq::hilbert
