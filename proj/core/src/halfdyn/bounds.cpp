#include "halfq/halfdyn/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace halfq::halfdyn {

using hilbert::Vector;

namespace {

struct Bin {
  double centre;
  Vector projection;  // unnormalized component of phi^Q
};

// Bins of width 2 I_B centred on b_min + 2 u I_B. I_B = 0 groups equal
// eigenvalues (within the endpoint tolerance).
std::vector<Bin> bin_components(const hilbert::SpectralDecomp& d, const State& phi_q,
                                double i_b) {
  if (static_cast<std::size_t>(d.dimension()) != phi_q.dimension()) {
    throw BoundError("xi states: dimension mismatch between B and phi^Q");
  }
  const Vector c = d.eigenvectors.adjoint() * phi_q.amplitudes;
  const double lo = d.eigenvalues.minCoeff();
  const double tol = hilbert::endpoint_tolerance(d.range());
  std::map<long long, Bin> bins;
  long long group = 0;
  for (Eigen::Index k = 0; k < d.eigenvalues.size(); ++k) {
    const double ev = d.eigenvalues[k];
    long long u;
    double centre;
    if (i_b > 0) {
      u = static_cast<long long>(std::floor((ev - lo + i_b) / (2 * i_b)));
      centre = lo + 2.0 * static_cast<double>(u) * i_b;
    } else {
      if (k > 0 && ev - d.eigenvalues[k - 1] > tol) ++group;
      u = group;
      centre = bins.contains(u) ? bins.at(u).centre : ev;
    }
    auto [it, fresh] = bins.try_emplace(u, Bin{centre, Vector::Zero(phi_q.amplitudes.size())});
    it->second.projection += c[k] * d.eigenvectors.col(k);
  }
  std::vector<Bin> out;
  for (auto& [u, b] : bins) {
    if (b.projection.squaredNorm() > 0) out.push_back(std::move(b));
  }
  return out;
}

}  // namespace

std::vector<XiState> xi_states(const hilbert::SpectralDecomp& d, const State& phi_q,
                               const State& phi_c, double i_b) {
  if (!(i_b > 0)) throw BoundError("xi states: I_B must be > 0");
  std::vector<XiState> out;
  for (auto& b : bin_components(d, phi_q, i_b)) {
    const double w = b.projection.norm();
    State xq(b.projection / w, phi_q.grids);
    State full = hilbert::tensor(phi_c, xq);
    out.push_back({b.centre, std::move(xq), std::move(full), w});
  }
  return out;
}

std::vector<XiState> xi_states(const OperatorMatrix& b_q, const State& phi_q, const State& phi_c,
                               double i_b) {
  if (!(i_b > 0)) throw BoundError("xi states: I_B must be > 0");
  if (!b_q.hermitian) throw BoundError("xi states: B must be Hermitian");
  return xi_states(hilbert::spectral_decompose(b_q), phi_q, phi_c, i_b);
}

double leakage_bound(double delta_big, const BoundConfig& cfg, double i_b) {
  if (delta_big == 0) return 0;
  if (i_b == 0) return std::numeric_limits<double>::infinity();
  return cfg.complement() * delta_big / (2 * (2 * cfg.order - 1) * i_b);
}

double error_term(double probability, double x) {
  const double pr = std::clamp(probability, 0.0, 1.0);
  return 2 * std::sqrt(pr) * std::sqrt(x) + x;
}

double PredictionBound::lower() const { return std::clamp(lower_raw(), 0.0, 1.0); }
double PredictionBound::upper() const { return std::clamp(upper_raw(), 0.0, 1.0); }

PredictionBound bounds_from(const hilbert::SpectralDecomp& d, const State& phi_q,
                            double delta_l, const BoundConfig& cfg, const Interval& i0) {
  cfg.validate();
  if (!(i0.hi >= i0.lo)) throw BoundError("prediction bounds: empty interval I0");
  PredictionBound pb;
  pb.i0 = i0;
  pb.order = cfg.order;
  pb.p = cfg.p;
  pb.delta_l = delta_l;
  pb.i_b = cfg.half_width(delta_l);
  pb.Delta_l = spread_Delta_L(delta_l, cfg);
  const double a0 = (i0.lo + i0.hi) / 2;
  const double half = (i0.hi - i0.lo) / 2;
  if (!(half > pb.Delta_l)) {
    throw BoundError("prediction bounds: D = " + std::to_string(half) +
                     " must exceed Delta_L = " + std::to_string(pb.Delta_l));
  }
  pb.imin = {a0 - (half - pb.Delta_l), a0 + (half - pb.Delta_l)};
  pb.imax = {a0 - (half + pb.Delta_l), a0 + (half + pb.Delta_l)};
  pb.pmin = hilbert::interval_probability(d, phi_q, pb.imin);
  pb.pmax = hilbert::interval_probability(d, phi_q, pb.imax);
  pb.x = leakage_bound(pb.Delta_l, cfg, pb.i_b);
  pb.emin = error_term(1 - pb.pmin, pb.x);
  pb.emax = error_term(pb.pmax, pb.x);
  return pb;
}

PredictionBound prediction_bounds(const HybridObservable& b, const State& phi_q,
                                  const BoundConfig& cfg, const Interval& i0) {
  b.validate();
  const auto bq = b.quantum_matrix();
  if (!bq.hermitian) throw BoundError(b.name + ": B is not Hermitian on the quantum grids");
  const double delta = delta_L_margin(b, phi_q, cfg.order).value();
  return bounds_from(hilbert::spectral_decompose(bq), phi_q, delta, cfg, i0);
}

ErrorConstants worst_case_constants(int order, double p) {
  const BoundConfig cfg{order, p, std::nullopt};
  const double delta = 1;
  ErrorConstants c;
  c.order = order;
  c.p = p;
  const double big = spread_Delta_L(delta, cfg);
  c.widening = big / delta;
  c.x = leakage_bound(big, cfg, cfg.half_width(delta));
  c.error = error_term(1, c.x);
  c.sqrt_term = 2 * std::sqrt(c.x);
  return c;
}

LeakageCheck tail_leakage(const hilbert::SpectralDecomp& d, const State& phi_q,
                          const State& phi_c, const PredictionBound& pb,
                          const hilbert::HeisenbergObservable& a_full, LeakageKind which) {
  const double tol = hilbert::endpoint_tolerance(d.range());
  Vector w = Vector::Zero(phi_q.amplitudes.size());
  for (const auto& b : bin_components(d, phi_q, pb.i_b)) {
    const bool take = which == LeakageKind::X1 ? !pb.imax.contains(b.centre, tol)
                                               : pb.imin.contains(b.centre, tol);
    if (take) w += b.projection;
  }
  const Vector full = hilbert::tensor(phi_c, State(w, phi_q.grids)).amplitudes;
  if (static_cast<std::size_t>(full.size()) != hilbert::total_dimension(a_full.initial().grids)) {
    throw BoundError("tail leakage: dimension mismatch");
  }
  LeakageCheck out;
  out.bound = pb.x;
  const double inside = a_full.probability(full, pb.i0);
  out.measured = which == LeakageKind::X1 ? inside : full.squaredNorm() - inside;
  out.measured = std::max(out.measured, 0.0);
  return out;
}

Vector apply_quantum(const hilbert::Matrix& b_q, const Vector& v) {
  const Eigen::Index nq = b_q.rows();
  if (nq == 0 || v.size() % nq != 0) throw BoundError("apply_quantum: dimension mismatch");
  const Eigen::Index nc = v.size() / nq;
  Eigen::Map<const hilbert::Matrix> m(v.data(), nq, nc);
  hilbert::Matrix r = b_q * m;
  return Eigen::Map<const Vector>(r.data(), r.size());
}

Discrepancy operator_discrepancy(const hilbert::HeisenbergObservable& a_full,
                                 const HybridObservable& b, const State& phi_c,
                                 const State& psi_q, int order) {
  if (order < 1) throw BoundError("operator discrepancy: order must be >= 1");
  const auto bq = b.quantum_matrix().entries;
  Vector v = hilbert::tensor(phi_c, psi_q).amplitudes;
  for (int k = 0; k < order; ++k) v = a_full.apply(v) - apply_quantum(bq, v);
  Discrepancy out;
  out.lhs = std::pow(v.squaredNorm(), 0.5 / order);
  out.rhs = delta_L_margin(b, psi_q, order).value();
  return out;
}

}  // namespace halfq::halfdyn
