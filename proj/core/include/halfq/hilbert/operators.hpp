#pragma once

#include <vector>

#include "halfq/hilbert/grid.hpp"

namespace halfq::hilbert {

OperatorMatrix identity_operator(const std::vector<Grid>& grids);

/// Diagonal matrix of grid coordinates.
OperatorMatrix position_operator(const Grid& g);

/// Spectral derivative -i hbar d/dx = F^-1 diag(hbar k) F on the periodic grid.
/// [q, p] = i hbar holds only on states negligible near the grid edges.
OperatorMatrix momentum_operator(const Grid& g, double hbar);

/// Local matrix acting on tensor slot `slot` of `grids`, identity elsewhere.
OperatorMatrix embed(const Matrix& local, const std::vector<Grid>& grids, std::size_t slot,
                     bool hermitian);

/// (I x ... x local x ... x I) v without forming the embedded matrix.
Vector apply_local(const Matrix& local, const std::vector<Grid>& grids, std::size_t slot,
                   const Vector& v);

}  // namespace halfq::hilbert
