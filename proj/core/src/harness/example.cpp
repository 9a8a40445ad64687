#include "halfq/harness/example.hpp"

#include <cmath>

#include "halfq/halfdyn/margins.hpp"
#include "halfq/hilbert/evaluate.hpp"
#include "halfq/symba/parser.hpp"

namespace halfq::harness {

using symba::Expression;
using symba::Symbol;

namespace {

constexpr const char* kExampleHamiltonian = "p2^2/(2*M) + p1^2/(2*m) + k*q1*p2";
constexpr const char* kHybridHamiltonian = "P1^2/(2*M) + p1^2/(2*m) + k*q1*P1";

struct KnownSolution {
  const char* name;
  const char* solution;
  const char* dq;  // coefficient of delta_q
  const char* dp;  // coefficient of delta_p
};

constexpr KnownSolution kSolutions[] = {
    {"q1", "q1 + p1*t/m - k*P1*t^2/(2*m)", "1", "t/m"},
    {"p1", "p1 - k*P1*t", "0", "1"},
    {"Q1", "Q1 + (P1/M + k*q1)*t + k*p1*t^2/(2*m) - k^2*P1*t^3/(6*m)", "k*t", "k*t^2/(2*m)"},
    {"P1", "P1", "0", "0"},
};

const KnownSolution& known(const std::string& name) {
  for (const auto& s : kSolutions) {
    if (name == s.name) return s;
  }
  throw ConfigError("no closed form for observable '" + name + "'");
}

}  // namespace

SystemConfig build_example() {
  SystemConfig c;
  c.name = "two interacting particles";
  c.classical_dofs = 1;
  c.quantum_dofs = 1;
  c.hamiltonian = kExampleHamiltonian;
  c.parameters = {{"M", 1.0}, {"k", 0.1}, {"m", 1.0}};
  c.hbar = 1.0;
  c.classical_grids = {hilbert::Grid(64, -10, 10)};
  c.quantum_grids = {hilbert::Grid(64, -10, 10)};
  c.classical_data = {{0.0, 1.0, 1.0, 1.0}};
  // dq = 1/sqrt(2) gives hbar/(2 dq) = 1/sqrt(2) too: certified at L = 1 and 2.
  c.classical_state = {{0.0, 1.0, 1.0 / std::sqrt(2.0)}};
  StateSpec q;
  q.gaussian = GaussianSpec{0.0, 0.5, 1.0};
  c.quantum_state = {q};
  c.bounds = {1, 0.99, std::nullopt};
  return c;
}

Expression hybrid_hamiltonian(const SystemConfig& cfg) {
  const auto h = symba::parse_expression(cfg.hamiltonian, cfg.full_system());
  return symba::half_quantize(h, cfg.split());
}

std::vector<Observable> fundamental_observables(const SystemConfig& cfg) {
  std::vector<Observable> all;
  for (int i = 1; i <= cfg.classical_dofs; ++i) {
    const auto slot = static_cast<std::size_t>(i - 1);
    all.push_back({"q" + std::to_string(i), Expression::classical(Symbol::q(i)), true, slot});
    all.push_back({"p" + std::to_string(i), Expression::classical(Symbol::p(i)), false, slot});
  }
  for (int a = 1; a <= cfg.quantum_dofs; ++a) {
    const auto slot = static_cast<std::size_t>(cfg.classical_dofs + a - 1);
    all.push_back({"Q" + std::to_string(a), Expression::op_q(symba::Sector::Quantum, a), true, slot});
    all.push_back({"P" + std::to_string(a), Expression::op_p(symba::Sector::Quantum, a), false, slot});
  }
  if (cfg.sweep.observables.empty()) return all;
  std::vector<Observable> out;
  for (const auto& name : cfg.sweep.observables) {
    bool found = false;
    for (const auto& o : all) {
      if (o.name == name) {
        out.push_back(o);
        found = true;
      }
    }
    if (!found) throw ConfigError("unknown observable '" + name + "'");
  }
  return out;
}

symba::SeriesResult evolve_observable(const SystemConfig& cfg, const Expression& o) {
  symba::SeriesOptions opt;
  opt.bracket = symba::BracketKind::Hybrid;
  return symba::heisenberg_series(o, hybrid_hamiltonian(cfg), opt);
}

bool ClosedFormCheck::pass() const {
  if (rows.empty()) return false;
  for (const auto& r : rows) {
    if (!r.pass()) return false;
  }
  return true;
}

ClosedFormCheck closed_form_check(const SystemConfig& cfg) {
  const auto sys = cfg.hybrid_system();
  if (cfg.classical_dofs != 1 || cfg.quantum_dofs != 1 ||
      hybrid_hamiltonian(cfg) != symba::parse_expression(kHybridHamiltonian, sys)) {
    throw ConfigError("closed-form check needs the example Hamiltonian " +
                      std::string(kHybridHamiltonian));
  }
  const std::vector<Symbol> symbols{Symbol::q(1), Symbol::p(1)};
  ClosedFormCheck out;
  SystemConfig all = cfg;
  all.sweep.observables.clear();
  for (const auto& o : fundamental_observables(all)) {
    const auto& k = known(o.name);
    ClosedFormRow row;
    row.observable = o.name;
    row.computed = evolve_observable(cfg, o.expr).value;
    row.expected = symba::parse_expression(k.solution, sys);
    row.solution_match = row.computed == row.expected;
    row.margin_expected = {symba::parse_expression(k.dq, sys), symba::parse_expression(k.dp, sys)};
    row.margin_match = true;
    try {
      const auto coeffs = halfdyn::margin_coefficients(row.computed, symbols);
      for (std::size_t i = 0; i < symbols.size(); ++i) {
        const auto& c = coeffs.at(symbols[i]);
        row.margin_computed.push_back(c);
        const auto& e = row.margin_expected[i];
        if (c != e && c != -e) row.margin_match = false;
      }
    } catch (const halfdyn::BoundError&) {
      row.margin_match = false;
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

double closed_form_delta(const SystemConfig& cfg, const std::string& observable, double t) {
  const auto& k = known(observable);
  hilbert::Bindings b{{}, cfg.parameters};
  b.parameters["t"] = t;
  const auto sys = cfg.hybrid_system();
  const auto& d = cfg.classical_data.at(0);
  return std::abs(hilbert::evaluate_scalar(symba::parse_expression(k.dq, sys), b, cfg.hbar)) * d.delta_q +
         std::abs(hilbert::evaluate_scalar(symba::parse_expression(k.dp, sys), b, cfg.hbar)) * d.delta_p;
}

}  // namespace halfq::harness
