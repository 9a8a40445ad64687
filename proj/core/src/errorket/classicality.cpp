#include "halfq/errorket/classicality.hpp"

#include <algorithm>
#include <cmath>

#include "halfq/hilbert/operators.hpp"
#include "halfq/symba/algebra.hpp"

namespace halfq::errorket {

ClassicalData::ClassicalData(std::vector<ClassicalDof> dofs, double hbar)
    : dofs_(std::move(dofs)), hbar_(hbar) {
  for (std::size_t i = 0; i < dofs_.size(); ++i) {
    if (!(dofs_[i].delta_q > 0) || !(dofs_[i].delta_p > 0)) {
      throw ErrorKetError("classical DOF " + std::to_string(i + 1) +
                          ": margins must be strictly positive");
    }
  }
  if (!(hbar > 0)) throw ErrorKetError("hbar must be positive");
}

double ClassicalData::value(Symbol s) const {
  if (!contains(s)) throw ErrorKetError("no classical data for " + s.str());
  const auto& d = dofs_[s.index - 1];
  return s.kind == symba::Canonical::Position ? d.q0 : d.p0;
}

double ClassicalData::margin(Symbol s) const {
  if (!contains(s)) throw ErrorKetError("no classical data for " + s.str());
  const auto& d = dofs_[s.index - 1];
  return s.kind == symba::Canonical::Position ? d.delta_q : d.delta_p;
}

bool ClassicalData::uncertainty_feasible() const {
  return std::all_of(dofs_.begin(), dofs_.end(),
                     [&](const ClassicalDof& d) { return d.delta_q * d.delta_p >= hbar_ / 2; });
}

std::vector<Symbol> ClassicalData::symbols() const {
  std::vector<Symbol> out;
  for (int i = 1; i <= static_cast<int>(size()); ++i) {
    out.push_back(Symbol::q(i));
    out.push_back(Symbol::p(i));
  }
  return out;
}

std::vector<Symbol> SequenceSpec::expanded() const {
  std::vector<Symbol> out;
  for (int k = 0; k < power; ++k) out.insert(out.end(), symbols.begin(), symbols.end());
  return out;
}

std::string SequenceSpec::str() const {
  std::string s = "(";
  for (std::size_t k = 0; k < symbols.size(); ++k) s += (k ? "," : "") + symbols[k].str();
  s += ")";
  if (power != 1) s += "^" + std::to_string(power);
  return s;
}

namespace {

void multisets(const std::vector<Symbol>& alphabet, std::size_t size, std::size_t start,
               std::vector<Symbol>& cur, std::vector<std::vector<Symbol>>& out) {
  if (cur.size() == size) {
    out.push_back(cur);
    return;
  }
  for (std::size_t k = start; k < alphabet.size(); ++k) {
    cur.push_back(alphabet[k]);
    multisets(alphabet, size, k, cur, out);
    cur.pop_back();
  }
}

int classical_degree(const symba::Expression& e) {
  int d = 0;
  for (const auto& [key, c] : e.terms()) d = std::max(d, key.classical_degree());
  return d;
}

}  // namespace

std::vector<SequenceSpec> classicality_sequences(const std::vector<symba::Expression>& solutions,
                                                 int m) {
  std::vector<Symbol> alphabet;
  for (int i = 1; i <= m; ++i) {
    alphabet.push_back(Symbol::q(i));
    alphabet.push_back(Symbol::p(i));
  }
  int max_degree = 0;
  for (const auto& e : solutions) max_degree = std::max(max_degree, classical_degree(e));

  std::vector<SequenceSpec> out;
  for (int size = 1; size <= max_degree; ++size) {
    std::vector<std::vector<Symbol>> sets;
    std::vector<Symbol> cur;
    multisets(alphabet, static_cast<std::size_t>(size), 0, cur, sets);
    for (const auto& s : sets) {
      const bool live = std::any_of(solutions.begin(), solutions.end(), [&](const auto& e) {
        symba::Expression d = e;
        for (const auto& sym : s) {
          d = symba::partial_derivative(d, sym);
          if (d.is_zero()) return false;
        }
        return true;
      });
      if (live) out.push_back({s, 1});
    }
  }
  return out;
}

bool ClassicalityCertificate::pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.slack() >= 0; });
}

OperatorMatrix classical_operator(Symbol s, const std::vector<hilbert::Grid>& grids,
                                  double hbar) {
  if (s.index < 1 || s.index > static_cast<int>(grids.size())) {
    throw ErrorKetError("no classical-sector grid for " + s.str());
  }
  const auto& g = grids[static_cast<std::size_t>(s.index - 1)];
  const auto local = s.kind == symba::Canonical::Position ? hilbert::position_operator(g)
                                                          : hilbert::momentum_operator(g, hbar);
  return hilbert::embed(local.entries, grids, static_cast<std::size_t>(s.index - 1), true);
}

namespace {

void check_grids(const State& psi_c, const ClassicalData& data) {
  if (psi_c.grids.size() != data.size()) {
    throw ErrorKetError("classical state has " + std::to_string(psi_c.grids.size()) +
                        " grids for " + std::to_string(data.size()) + " classical DOFs");
  }
}

// Local operator matrices, applied slot by slot without embedding.
struct LocalOps {
  std::vector<hilbert::Matrix> q, p;
  LocalOps(const std::vector<hilbert::Grid>& grids, double hbar) {
    for (const auto& g : grids) {
      q.push_back(hilbert::position_operator(g).entries);
      p.push_back(hilbert::momentum_operator(g, hbar).entries);
    }
  }
  hilbert::Vector shifted(Symbol s, const ClassicalData& data,
                          const std::vector<hilbert::Grid>& grids,
                          const hilbert::Vector& v) const {
    const auto slot = static_cast<std::size_t>(s.index - 1);
    const auto& m = s.kind == symba::Canonical::Position ? q[slot] : p[slot];
    return hilbert::apply_local(m, grids, slot, v) - data.value(s) * v;
  }
};

}  // namespace

ClassicalityCertificate certify(const State& psi_c, const ClassicalData& data, int order,
                                const std::vector<SequenceSpec>& sequences) {
  if (order < 1) throw ErrorKetError("certify: order must be >= 1");
  check_grids(psi_c, data);
  const LocalOps ops(psi_c.grids, data.hbar());

  ClassicalityCertificate cert;
  cert.order = order;
  if (sequences.empty()) return cert;
  std::vector<std::size_t> pick(static_cast<std::size_t>(order), 0);
  while (true) {
    SequenceSpec composed;
    for (auto k : pick) {
      const auto e = sequences[k].expanded();
      composed.symbols.insert(composed.symbols.end(), e.begin(), e.end());
    }
    hilbert::Vector v = psi_c.amplitudes;
    double rhs = 1;
    for (auto it = composed.symbols.rbegin(); it != composed.symbols.rend(); ++it) {
      v = ops.shifted(*it, data, psi_c.grids, v);
      rhs *= data.margin(*it) * data.margin(*it);
    }
    cert.rows.push_back({std::move(composed), v.squaredNorm(), rhs});

    std::size_t k = 0;
    while (k < pick.size() && ++pick[k] == sequences.size()) pick[k++] = 0;
    if (k == pick.size()) break;
  }
  std::stable_sort(cert.rows.begin(), cert.rows.end(),
                   [](const auto& a, const auto& b) { return a.slack() < b.slack(); });
  return cert;
}

std::vector<MomentCheck> moment_precheck(const State& psi_c, const ClassicalData& data,
                                         int order) {
  check_grids(psi_c, data);
  const LocalOps ops(psi_c.grids, data.hbar());
  std::vector<MomentCheck> out;
  for (const auto& s : data.symbols()) {
    hilbert::Vector v = psi_c.amplitudes;
    for (int k = 0; k < order; ++k) v = ops.shifted(s, data, psi_c.grids, v);
    out.push_back({s, v.squaredNorm(), std::pow(data.margin(s), 2 * order)});
  }
  return out;
}

double double_factorial_odd(int order) {
  double f = 1;
  for (int k = 2 * order - 1; k > 1; k -= 2) f *= k;
  return f;
}

double moment_constant(int order) { return std::pow(double_factorial_odd(order), 0.5 / order); }

double literal_moment_factor(int order) {
  return std::tgamma(2.0 * order) / (2 * std::tgamma(static_cast<double>(order)));
}

bool GaussianFeasibility::feasible() const {
  return std::all_of(ranges.begin(), ranges.end(), [](const auto& r) { return r.feasible(); });
}

GaussianFeasibility gaussian_feasibility(const ClassicalData& data, int order, double hbar) {
  if (order < 1) throw ErrorKetError("gaussian_feasibility: order must be >= 1");
  GaussianFeasibility out;
  out.order = order;
  const double c = moment_constant(order);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& d = data.dofs()[i];
    FeasibleRange r;
    r.lo = hbar * c / (2 * d.delta_p);
    r.hi = d.delta_q / c;
    if (!r.feasible()) {
      r.reason = "DOF " + std::to_string(i + 1) + ": momentum side needs dq >= " +
                 std::to_string(r.lo) + " but position side needs dq <= " + std::to_string(r.hi);
      if (d.delta_q * d.delta_p < hbar / 2) r.reason += " (delta_q * delta_p < hbar/2)";
    }
    out.ranges.push_back(std::move(r));
  }
  return out;
}

}  // namespace halfq::errorket
