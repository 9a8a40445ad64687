#include "halfq/halfdyn/margins.hpp"

#include <charconv>
#include <cmath>
#include <string_view>

#include "halfq/symba/algebra.hpp"

namespace halfq::halfdyn {

void HybridObservable::validate() const {
  for (const auto& s : expr.classical_symbols()) {
    if (!binding.contains(s)) throw BoundError(name + ": no classical data for " + s.str());
  }
  for (const auto& [key, c] : expr.terms()) {
    for (const auto& [dof, pw] : key.operators) {
      if (dof.sector == symba::Sector::Classical) {
        throw BoundError(name + ": classical-sector operator in a hybrid observable");
      }
      if (dof.index < 1 || dof.index > static_cast<int>(quantum_grids.size())) {
        throw BoundError(name + ": no grid for quantum DOF " + std::to_string(dof.index));
      }
    }
  }
  for (const auto& n : expr.parameter_names()) {
    if (!parameters.contains(n)) throw BoundError(name + ": unbound parameter '" + n + "'");
  }
  if (quantum_grids.empty()) throw BoundError(name + ": no quantum grids");
}

hilbert::Bindings HybridObservable::bindings() const {
  hilbert::Bindings b;
  for (const auto& s : binding.symbols()) b.classical[s] = binding.value(s);
  b.parameters = parameters;
  return b;
}

OperatorMatrix HybridObservable::quantum_matrix(const Expression& e) const {
  std::map<symba::OperatorDof, hilbert::Grid> grids;
  for (std::size_t a = 0; a < quantum_grids.size(); ++a) {
    grids[{symba::Sector::Quantum, static_cast<int>(a + 1)}] = quantum_grids[a];
  }
  try {
    return hilbert::evaluate_symbolic(e, bindings(), grids, hbar);
  } catch (const hilbert::UnboundSymbol& err) {
    throw BoundError(name + ": " + err.what());
  }
}

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

// Ordered derivative sequences of length n over the classical symbols, with
// their derivative expressions; vanishing ones are dropped.
void sequences(const Expression& e, const std::vector<Symbol>& alphabet, int n,
               std::vector<Symbol>& cur,
               std::vector<std::pair<std::vector<Symbol>, Expression>>& out) {
  if (static_cast<int>(cur.size()) == n) {
    out.emplace_back(cur, e);
    return;
  }
  for (const auto& s : alphabet) {
    Expression d = symba::partial_derivative(e, s);
    if (d.is_zero()) continue;
    cur.push_back(s);
    sequences(d, alphabet, n, cur, out);
    cur.pop_back();
  }
}

}  // namespace

MarginReport delta_L_margin(const HybridObservable& b, const State& xi_q, int order) {
  if (order < 1) throw BoundError("delta_L: order must be >= 1");
  b.validate();
  const auto alphabet = b.binding.symbols();
  MarginReport out;
  out.order = order;
  for (int n = 1; n <= 3; ++n) {
    std::vector<std::pair<std::vector<Symbol>, Expression>> found;
    std::vector<Symbol> cur;
    sequences(b.expr, alphabet, n, cur, found);
    for (const auto& [seq, d] : found) {
      const auto m = b.quantum_matrix(d).entries;
      if (m.rows() != xi_q.amplitudes.size()) throw BoundError("delta_L: xi^Q dimension mismatch");
      hilbert::Vector v = xi_q.amplitudes;
      for (int k = 0; k < order; ++k) v = m * v;
      MarginTerm t;
      t.symbols = seq;
      t.expectation = std::pow(v.squaredNorm(), 0.5 / order);
      double margins = 1;
      for (const auto& s : seq) margins *= b.binding.margin(s);
      t.contribution = t.expectation * margins / factorial(n);
      if (n == 1) out.first_order += t.contribution;
      if (n == 2) out.second_order += t.contribution;
      if (n == 3) {
        out.truncation += t.contribution;
        continue;
      }
      out.terms.push_back(std::move(t));
    }
  }
  return out;
}

std::map<Symbol, Expression> margin_coefficients(const Expression& b,
                                                 const std::vector<Symbol>& symbols) {
  std::map<Symbol, Expression> out;
  for (const auto& s : symbols) {
    Expression d = symba::partial_derivative(b, s);
    if (!d.is_scalar_valued()) {
      throw BoundError("derivative along " + s.str() + " carries operators");
    }
    out.emplace(s, std::move(d));
  }
  return out;
}

void BoundConfig::validate() const {
  if (order < 1) throw BoundError("bound config: order must be >= 1");
  if (!(p > 0 && p < 1)) throw BoundError("bound config: p must lie in (0, 1)");
  if (i_b && !(*i_b > 0)) throw BoundError("bound config: I_B must be positive");
}

double BoundConfig::complement() const {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, p);
  const std::string_view text(buf, static_cast<std::size_t>(res.ptr - buf));
  const auto dot = text.find('.');
  if (res.ec != std::errc{} || text.find('e') != std::string_view::npos || dot == std::string_view::npos ||
      text.size() - dot - 1 > 15 || text.substr(0, dot) != "0") {
    return 1 - p;
  }
  const auto digits = text.substr(dot + 1);
  long long num = 0, scale = 1;
  for (char ch : digits) {
    num = num * 10 + (ch - '0');
    scale *= 10;
  }
  return static_cast<double>(scale - num) / static_cast<double>(scale);
}

double spread_Delta_L(double delta_l, const BoundConfig& cfg) {
  cfg.validate();
  return (delta_l + cfg.half_width(delta_l)) / std::pow(cfg.complement(), 0.5 / cfg.order);
}

}  // namespace halfq::halfdyn
