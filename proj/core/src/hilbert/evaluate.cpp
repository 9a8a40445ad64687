#include "halfq/hilbert/evaluate.hpp"

#include <cmath>
#include <vector>

#include "halfq/hilbert/operators.hpp"

namespace halfq::hilbert {

using symba::Expression;
using symba::OperatorDof;
using symba::OperatorPower;

cplx scalar_value(const symba::MonomialKey& key, const symba::Coefficient& c, const Bindings& b,
                  double hbar) {
  cplx v = c.to_complex();
  for (const auto& [name, n] : key.parameters) {
    auto it = b.parameters.find(name);
    if (it == b.parameters.end()) throw UnboundSymbol("unbound parameter '" + name + "'");
    v *= std::pow(it->second, n);
  }
  for (const auto& [sym, n] : key.classical) {
    auto it = b.classical.find(sym);
    if (it == b.classical.end()) throw UnboundSymbol("unbound classical symbol '" + sym.str() + "'");
    v *= std::pow(it->second, n);
  }
  if (key.hbar_power != 0) v *= std::pow(hbar, key.hbar_power);
  return v;
}

cplx evaluate_scalar(const Expression& e, const Bindings& b, double hbar) {
  if (!e.is_scalar_valued()) throw std::invalid_argument("expression contains operators");
  cplx v = 0;
  for (const auto& [key, c] : e.terms()) v += scalar_value(key, c, b, hbar);
  return v;
}

namespace {

// out += c * (factors[0] x factors[1] x ...), skipping zero entries of the
// leading factor.
void kron_accumulate(Matrix& out, cplx c, const std::vector<const Matrix*>& factors) {
  Matrix rest = Matrix::Identity(1, 1);
  for (std::size_t k = 1; k < factors.size(); ++k) rest = kron(rest, *factors[k]);
  const Matrix& a = *factors[0];
  const Eigen::Index s = rest.rows();
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (a(i, j) == cplx(0)) continue;
      out.block(i * s, j * s, s, s) += (c * a(i, j)) * rest;
    }
  }
}

}  // namespace

OperatorMatrix evaluate_symbolic(const Expression& e, const Bindings& b,
                                 const std::map<OperatorDof, Grid>& grids, double hbar) {
  if (grids.empty()) throw std::invalid_argument("evaluate_symbolic needs at least one grid");
  std::vector<OperatorDof> dofs;
  std::vector<Grid> grid_list;
  for (const auto& [dof, g] : grids) {
    dofs.push_back(dof);
    grid_list.push_back(g);
  }

  // Combine scalar parts of monomials that share an operator part.
  std::map<std::map<OperatorDof, OperatorPower>, cplx> by_operator;
  for (const auto& [key, c] : e.terms()) {
    for (const auto& [dof, pw] : key.operators) {
      if (!grids.contains(dof)) {
        throw UnboundSymbol(std::string("no grid for operator DOF ") +
                            (dof.sector == symba::Sector::Classical ? "qh/ph" : "Q/P") +
                            std::to_string(dof.index));
      }
    }
    by_operator[key.operators] += scalar_value(key, c, b, hbar);
  }

  std::map<std::pair<OperatorDof, OperatorPower>, Matrix> cache;
  std::map<OperatorDof, std::pair<Matrix, Matrix>> xp;
  for (std::size_t k = 0; k < dofs.size(); ++k) {
    xp[dofs[k]] = {position_operator(grid_list[k]).entries,
                   momentum_operator(grid_list[k], hbar).entries};
  }
  auto local = [&](OperatorDof dof, OperatorPower pw) -> const Matrix& {
    auto key = std::make_pair(dof, pw);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const auto& [x, p] = xp.at(dof);
    Matrix m = Matrix::Identity(x.rows(), x.cols());
    for (int k = 0; k < pw.q; ++k) m = m * x;
    for (int k = 0; k < pw.p; ++k) m = m * p;
    return cache.emplace(key, std::move(m)).first->second;
  };

  const auto n = static_cast<Eigen::Index>(total_dimension(grid_list));
  Matrix out = Matrix::Zero(n, n);
  for (const auto& [ops, c] : by_operator) {
    if (c == cplx(0)) continue;
    std::vector<const Matrix*> factors;
    for (const auto& dof : dofs) {
      auto it = ops.find(dof);
      factors.push_back(&local(dof, it == ops.end() ? OperatorPower{} : it->second));
    }
    kron_accumulate(out, c, factors);
  }
  // Same-DOF products such as Q P - i hbar/2 are self-adjoint symbolically but
  // only approximately on a periodic grid; the flag requires both.
  OperatorMatrix m(std::move(out), std::move(grid_list), false);
  m.hermitian = e == e.adjoint() && m.check_hermitian();
  return m;
}

}  // namespace halfq::hilbert
