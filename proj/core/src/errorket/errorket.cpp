#include "halfq/errorket/errorket.hpp"

#include <cmath>
#include <string>

namespace halfq::errorket {

State error_ket(const std::vector<OperatorMatrix>& ops, const std::vector<cplx>& centers,
                const State& psi) {
  if (ops.size() != centers.size()) {
    throw ErrorKetError("error_ket: " + std::to_string(ops.size()) + " operators but " +
                        std::to_string(centers.size()) + " centers");
  }
  hilbert::Vector v = psi.amplitudes;
  for (std::size_t k = ops.size(); k-- > 0;) {
    const auto& x = ops[k];
    if (x.entries.rows() != v.size() || x.entries.cols() != v.size()) {
      throw ErrorKetError("error_ket: operator " + std::to_string(k) + " has dimension " +
                          std::to_string(x.entries.rows()) + ", state has " +
                          std::to_string(v.size()));
    }
    v = x.entries * v - centers[k] * v;
  }
  return State(std::move(v), psi.grids);
}

double spread_from_norm(double norm_squared, int n, double p) {
  if (!(p > 0 && p < 1)) throw ErrorKetError("spread: p must lie in (0, 1)");
  if (n < 1) throw ErrorKetError("spread: order must be >= 1");
  return std::pow(norm_squared / (1 - p), 1.0 / (2 * n));
}

double spread_n(const std::vector<OperatorMatrix>& ops, const std::vector<cplx>& centers,
                const State& psi, double p) {
  const double e = error_ket(ops, centers, psi).amplitudes.squaredNorm();
  return spread_from_norm(e, static_cast<int>(ops.size()), p);
}

double spread_n(const OperatorMatrix& x, double center, const State& psi, int n, double p) {
  if (n < 1) throw ErrorKetError("spread: order must be >= 1");
  return spread_n(std::vector<OperatorMatrix>(n, x), std::vector<cplx>(n, center), psi, p);
}

TailCheck tail_probability(const hilbert::SpectralDecomp& d, const State& psi, double x0,
                           double dist, int n) {
  if (!(dist > 0)) throw ErrorKetError("tail_probability: dist must be > 0");
  if (n < 1) throw ErrorKetError("tail_probability: order must be >= 1");
  if (static_cast<std::size_t>(d.dimension()) != psi.dimension()) {
    throw ErrorKetError("tail_probability: dimension mismatch");
  }
  const hilbert::RealVector w = d.weights(psi.amplitudes);
  TailCheck out;
  double moment = 0;
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    const double r = std::abs(d.eigenvalues[k] - x0);
    if (r > dist) out.measured += w[k];
    moment += w[k] * std::pow(r / dist, 2 * n);
  }
  out.bound = moment;
  return out;
}

}  // namespace halfq::errorket
