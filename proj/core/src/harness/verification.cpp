#include "halfq/harness/verification.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "halfq/hilbert/evaluate.hpp"
#include "halfq/hilbert/operators.hpp"
#include "halfq/symba/parser.hpp"

namespace halfq::harness {

using hilbert::Grid;
using hilbert::Matrix;
using hilbert::State;
using hilbert::Vector;

namespace {

State product_state(const std::vector<State>& factors) {
  State out = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) out = hilbert::tensor(out, factors[i]);
  return out;
}

std::string edge_message(const char* what, double t, const hilbert::EdgeMass& e, double limit) {
  std::ostringstream s;
  s << "unconverged grid: " << what << " at t = " << t << " has edge mass position " << e.position
    << ", momentum " << e.momentum << " (limit " << limit << "); widen the grid or add points";
  return s.str();
}

std::map<symba::OperatorDof, Grid> oracle_grid_map(const SystemConfig& cfg) {
  std::map<symba::OperatorDof, Grid> m;
  for (int i = 0; i < cfg.classical_dofs; ++i) m[{symba::Sector::Classical, i + 1}] = cfg.classical_grids[i];
  for (int a = 0; a < cfg.quantum_dofs; ++a) m[{symba::Sector::Quantum, a + 1}] = cfg.quantum_grids[a];
  return m;
}

std::vector<Grid> oracle_grids(const SystemConfig& cfg) {
  std::vector<Grid> g = cfg.classical_grids;
  g.insert(g.end(), cfg.quantum_grids.begin(), cfg.quantum_grids.end());
  return g;
}

// Average of all distinct words with a copies of x and b copies of p.
Matrix symmetrized(const Matrix& x, const Matrix& p, int a, int b) {
  const auto n = x.rows();
  Matrix sum = Matrix::Zero(n, n);
  std::vector<int> word(static_cast<std::size_t>(a + b), 1);
  std::fill(word.begin(), word.begin() + a, 0);
  long count = 0;
  do {
    Matrix m = Matrix::Identity(n, n);
    for (int w : word) m = m * (w == 0 ? x : p);
    sum += m;
    ++count;
  } while (std::next_permutation(word.begin(), word.end()));
  return sum / static_cast<double>(count);
}

// target += c * (a kron rest), with rest already the kron of the later slots.
void kron_add(Matrix& target, const Matrix& a, const Matrix& rest, hilbert::cplx c) {
  const auto r = rest.rows();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (a(i, j) != 0.0) target.block(i * r, j * r, r, r) += (c * a(i, j)) * rest;
    }
  }
}

struct Prepared {
  MarginRow row;
  halfdyn::HybridObservable b;
  hilbert::SpectralDecomp d;
};

Prepared prepare(const SystemConfig& cfg, const Observable& o, const symba::Expression& evolved,
                 double t, const State& phi_q, const State& phi_c) {
  Prepared p;
  auto& b = p.b;
  b.name = o.name;
  b.expr = evolved;
  b.binding = cfg.data();
  b.quantum_grids = cfg.quantum_grids;
  b.parameters = cfg.parameters;
  b.parameters["t"] = t;
  b.hbar = cfg.hbar;
  b.validate();
  const auto bq = b.quantum_matrix();
  if (!bq.hermitian || !bq.check_hermitian(cfg.tolerances.hermitian)) {
    throw halfdyn::BoundError(o.name + "(t): B is not Hermitian on the quantum grids");
  }
  p.d = hilbert::spectral_decompose(bq);
  const int order = cfg.bounds.order;
  auto& r = p.row;
  r.observable = o.name;
  r.t = t;
  r.expression = symba::print_expression(evolved);
  r.margin = halfdyn::delta_L_margin(b, phi_q, order);
  const double delta = r.margin.value();
  const double i_b = cfg.bounds.half_width(delta);
  if (i_b > 0) {
    for (const auto& xi : halfdyn::xi_states(p.d, phi_q, phi_c, i_b)) {
      r.bin_max = std::max(r.bin_max, halfdyn::delta_L_margin(b, xi.xi_q, order).value());
    }
  }
  r.used = std::max(delta, r.bin_max);
  const Vector bphi = bq.entries * phi_q.amplitudes;
  r.mean = phi_q.amplitudes.dot(bphi).real();
  r.sigma = std::sqrt(std::max(0.0, bphi.squaredNorm() - r.mean * r.mean));
  return p;
}

std::vector<std::pair<Observable, symba::Expression>> evolved_observables(const SystemConfig& cfg) {
  std::vector<std::pair<Observable, symba::Expression>> out;
  for (const auto& o : fundamental_observables(cfg)) out.emplace_back(o, evolve_observable(cfg, o.expr).value);
  return out;
}

// Bound rows of one prepared observable at one time; oracle fields unset.
std::vector<BoundRow> sweep_rows(const SystemConfig& cfg, const Prepared& p, const State& phi_q) {
  std::vector<BoundRow> rows;
  const double big = halfdyn::spread_Delta_L(p.row.used, cfg.bounds);
  const double scale = big > 0 ? big : std::max(p.row.sigma, cfg.quantum_grids.front().spacing());
  for (double f : cfg.sweep.d_factors) {
    const double d = f * scale;
    std::vector<double> centres{p.row.mean};
    if (cfg.sweep.offset_centres) centres.push_back(p.row.mean + d);
    for (double c : centres) {
      BoundRow row;
      row.observable = p.row.observable;
      row.t = p.row.t;
      row.a0 = c;
      row.D = d;
      row.bound = halfdyn::bounds_from(p.d, phi_q, p.row.used, cfg.bounds, {c - d, c + d});
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace

State classical_state(const SystemConfig& cfg) {
  std::vector<State> f;
  for (int i = 0; i < cfg.classical_dofs; ++i) {
    const auto& g = cfg.classical_state[i];
    f.push_back(hilbert::gaussian_state(cfg.classical_grids[i], g.q0, g.p0, g.dq, cfg.hbar));
  }
  return product_state(f);
}

State quantum_state(const SystemConfig& cfg) {
  std::vector<State> f;
  for (int a = 0; a < cfg.quantum_dofs; ++a) {
    const auto& s = cfg.quantum_state[a];
    if (s.gaussian) {
      f.push_back(hilbert::gaussian_state(cfg.quantum_grids[a], s.gaussian->q0, s.gaussian->p0,
                                          s.gaussian->dq, cfg.hbar));
    } else {
      f.push_back(hilbert::load_amplitudes(s.amplitude_file, cfg.quantum_grids[a]));
    }
  }
  return product_state(f);
}

ConsistencyCheck hamiltonian_consistency(const SystemConfig& cfg, const hilbert::OperatorMatrix& h) {
  const auto grids = oracle_grids(cfg);
  const auto hc = symba::parse_expression(cfg.hamiltonian, cfg.full_system());
  const hilbert::Bindings bind{{}, cfg.parameters};
  std::vector<Matrix> xs, ps;
  for (const auto& g : grids) {
    xs.push_back(hilbert::position_operator(g).entries);
    ps.push_back(hilbert::momentum_operator(g, cfg.hbar).entries);
  }
  const auto dim = static_cast<Eigen::Index>(hilbert::total_dimension(grids));
  Matrix ref = Matrix::Zero(dim, dim);
  for (const auto& [key, coeff] : hc.terms()) {
    symba::MonomialKey scalar = key;
    scalar.classical.clear();
    const auto c = hilbert::scalar_value(scalar, coeff, bind, cfg.hbar);
    std::vector<Matrix> local;
    for (std::size_t s = 0; s < grids.size(); ++s) {
      const int i = static_cast<int>(s) + 1;
      const auto qi = key.classical.find(symba::Symbol::q(i));
      const auto pi = key.classical.find(symba::Symbol::p(i));
      const int a = qi == key.classical.end() ? 0 : qi->second;
      const int b = pi == key.classical.end() ? 0 : pi->second;
      local.push_back(symmetrized(xs[s], ps[s], a, b));
    }
    Matrix rest = local.back();
    for (std::size_t s = local.size() - 1; s-- > 1;) rest = hilbert::kron(local[s], rest);
    if (local.size() == 1) {
      ref += c * rest;
    } else {
      kron_add(ref, local.front(), rest, c);
    }
  }
  double diff = 0;
  for (Eigen::Index j = 0; j < dim; ++j) {
    diff = std::max(diff, (h.entries.col(j) - ref.col(j)).cwiseAbs().maxCoeff());
  }
  const double scale = std::max(ref.cwiseAbs().maxCoeff(), 1e-300);
  return {diff / scale, cfg.tolerances.consistency};
}

Oracle::Oracle(const SystemConfig& cfg, bool check_consistency) : cfg_(cfg), grids_(oracle_grids(cfg)) {
  cfg_.validate();
  phi_c_ = classical_state(cfg_);
  phi_q_ = quantum_state(cfg_);
  psi0_ = hilbert::tensor(phi_c_, phi_q_);
  edge0_ = edge(psi0_);
  if (edge0_.worst() >= cfg_.tolerances.edge_mass) {
    throw UnconvergedGrid(edge_message("initial state", 0, edge0_, cfg_.tolerances.edge_mass));
  }
  const auto hc = symba::parse_expression(cfg_.hamiltonian, cfg_.full_system());
  const auto hq = symba::weyl_quantize(hc, cfg_.split());
  std::shared_ptr<hilbert::Eigenbasis> basis;
  {
    const auto h = hilbert::evaluate_symbolic(hq, {{}, cfg_.parameters}, oracle_grid_map(cfg_), cfg_.hbar);
    if (!h.hermitian || !h.check_hermitian(cfg_.tolerances.hermitian)) {
      throw ConfigError("oracle Hamiltonian is not Hermitian");
    }
    if (check_consistency) consistency_ = hamiltonian_consistency(cfg_, h);
    for (std::size_t s = 0; s < grids_.size() && !basis; ++s) {
      try {
        const auto sym = hilbert::momentum_operator(grids_[s], cfg_.hbar).entries;
        basis = std::make_shared<hilbert::Eigenbasis>(hilbert::Eigenbasis::blocked(h, sym, s));
        solver_ = "blocked on slot " + std::to_string(s);
      } catch (const std::invalid_argument&) {
      }
    }
    if (!basis) {
      basis = std::make_shared<hilbert::Eigenbasis>(hilbert::Eigenbasis::dense(h));
      solver_ = "dense";
    }
  }
  basis_ = std::move(basis);
}

hilbert::EdgeMass Oracle::edge(const State& psi) const {
  return hilbert::edge_mass(psi, cfg_.tolerances.edge_cells);
}

State Oracle::evolve(double t) const {
  State psi(hilbert::evolve(*basis_, psi0_.amplitudes, t, cfg_.hbar), grids_);
  const auto e = edge(psi);
  if (e.worst() >= cfg_.tolerances.edge_mass) {
    throw UnconvergedGrid(edge_message("evolved state", t, e, cfg_.tolerances.edge_mass));
  }
  return psi;
}

hilbert::EmbeddedDecomp Oracle::local(const Observable& o) const {
  const auto& g = grids_.at(o.slot);
  const auto a0 = o.position ? hilbert::position_operator(g) : hilbert::momentum_operator(g, cfg_.hbar);
  return hilbert::EmbeddedDecomp::make(a0, grids_, o.slot);
}

hilbert::HeisenbergObservable Oracle::heisenberg(const Observable& o, double t) const {
  return {basis_, local(o), t, cfg_.hbar};
}

std::size_t VerificationReport::bound_violations() const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return !r.verdict; }));
}

std::size_t VerificationReport::leakage_violations() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const auto& r) { return !r.leakage_pass; }));
}

std::size_t VerificationReport::discrepancy_violations() const {
  return static_cast<std::size_t>(
      std::count_if(discrepancies.begin(), discrepancies.end(), [](const auto& r) { return !r.pass; }));
}

bool VerificationReport::pass() const {
  if (!applicable || rows.empty()) return false;
  if (consistency && !consistency->pass()) return false;
  if (closed_form && !closed_form->pass()) return false;
  return bound_violations() == 0 && leakage_violations() == 0 && discrepancy_violations() == 0;
}

errorket::ClassicalityCertificate certify_config(const SystemConfig& cfg,
                                                 std::vector<errorket::SequenceSpec>* sequences) {
  SystemConfig all = cfg;
  all.sweep.observables.clear();
  std::vector<symba::Expression> solutions;
  for (const auto& [o, e] : evolved_observables(all)) solutions.push_back(e);
  const auto seqs = errorket::classicality_sequences(solutions, cfg.classical_dofs);
  if (sequences) *sequences = seqs;
  return errorket::certify(classical_state(cfg), cfg.data(), cfg.bounds.order, seqs);
}

BoundsTable bounds_table(const SystemConfig& cfg) {
  cfg.validate();
  BoundsTable out;
  const auto phi_c = classical_state(cfg);
  const auto phi_q = quantum_state(cfg);
  const auto evolved = evolved_observables(cfg);
  for (double t : cfg.sweep.times) {
    for (const auto& [o, e] : evolved) {
      const auto p = prepare(cfg, o, e, t, phi_q, phi_c);
      for (auto& r : sweep_rows(cfg, p, phi_q)) out.rows.push_back(std::move(r));
      out.margins.push_back(p.row);
    }
  }
  return out;
}

VerificationReport run_verification(const SystemConfig& cfg) {
  cfg.validate();
  std::vector<errorket::SequenceSpec> seqs;
  auto cert = certify_config(cfg, &seqs);
  if (!cert.pass()) {
    // Skip the oracle: the report is "not applicable" either way.
    VerificationReport r;
    r.config_name = cfg.name;
    r.order = cfg.bounds.order;
    r.p = cfg.bounds.p;
    r.sequences = seqs;
    r.certificate = std::move(cert);
    r.status = "not applicable: classical data not L-order valid";
    r.classical_grids = cfg.classical_grids;
    r.quantum_grids = cfg.quantum_grids;
    r.oracle_dimension = total_dimension(oracle_grids(cfg));
    r.constants = halfdyn::worst_case_constants(cfg.bounds.order, cfg.bounds.p);
    r.tolerances = cfg.tolerances;
    r.seed = cfg.seed;
    return r;
  }
  const Oracle oracle(cfg);
  return run_verification(cfg, oracle);
}

VerificationReport run_verification(const SystemConfig& cfg, const Oracle& oracle) {
  cfg.validate();
  VerificationReport r;
  r.config_name = cfg.name;
  r.order = cfg.bounds.order;
  r.p = cfg.bounds.p;
  r.classical_grids = cfg.classical_grids;
  r.quantum_grids = cfg.quantum_grids;
  r.oracle_dimension = total_dimension(oracle.grids());
  r.solver = oracle.solver();
  r.tolerances = cfg.tolerances;
  r.seed = cfg.seed;
  r.constants = halfdyn::worst_case_constants(cfg.bounds.order, cfg.bounds.p);
  r.consistency = oracle.consistency();
  r.worst_edge_mass = oracle.initial_edge().worst();

  r.certificate = certify_config(cfg, &r.sequences);
  if (!r.certificate.pass()) {
    r.status = "not applicable: classical data not L-order valid";
    return r;
  }
  r.applicable = true;
  try {
    r.closed_form = closed_form_check(cfg);
  } catch (const ConfigError&) {
  }

  const auto& phi_c = oracle.phi_c();
  const auto& phi_q = oracle.phi_q();
  const auto evolved = evolved_observables(cfg);
  std::vector<hilbert::EmbeddedDecomp> locals;
  for (const auto& [o, e] : evolved) locals.push_back(oracle.local(o));

  for (double t : cfg.sweep.times) {
    const auto psi_t = oracle.evolve(t);
    r.worst_edge_mass = std::max(r.worst_edge_mass, oracle.edge(psi_t).worst());
    for (std::size_t k = 0; k < evolved.size(); ++k) {
      const auto& [o, e] = evolved[k];
      const auto p = prepare(cfg, o, e, t, phi_q, phi_c);
      const auto a = oracle.heisenberg(o, t);
      for (auto& row : sweep_rows(cfg, p, phi_q)) {
        row.oracle = locals[k].probability(psi_t.amplitudes, row.bound.i0);
        row.verdict = row.bound.contains(row.oracle, cfg.tolerances.verdict);
        row.x1 = halfdyn::tail_leakage(p.d, phi_q, phi_c, row.bound, a, halfdyn::LeakageKind::X1);
        row.x2 = halfdyn::tail_leakage(p.d, phi_q, phi_c, row.bound, a, halfdyn::LeakageKind::X2);
        row.leakage_pass = row.x1.holds(cfg.tolerances.leakage) && row.x2.holds(cfg.tolerances.leakage);
        r.rows.push_back(std::move(row));
      }
      DiscrepancyRow d;
      d.observable = o.name;
      d.t = t;
      d.order = cfg.bounds.order;
      d.d = halfdyn::operator_discrepancy(a, p.b, phi_c, phi_q, cfg.bounds.order);
      d.pass = d.d.holds(cfg.tolerances.discrepancy_rel);
      r.discrepancies.push_back(d);
      r.margins.push_back(p.row);
    }
  }
  r.status = r.pass() ? "pass" : "fail";
  return r;
}

}  // namespace halfq::harness
