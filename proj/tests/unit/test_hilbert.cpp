#include <memory>
#include <random>

#include "doctest.h"
#include "halfq/hilbert/evaluate.hpp"
#include "halfq/hilbert/operators.hpp"
#include "halfq/hilbert/spectral.hpp"
#include "halfq/symba/algebra.hpp"
#include "halfq/symba/parser.hpp"
#include "numeric_oracles.hpp"

using namespace halfq::hilbert;
using halfq::symba::OperatorDof;
using halfq::symba::parse_expression;
using halfq::symba::Sector;
using halfq::symba::Symbol;
using halfq::symba::SystemDecl;
namespace oracle = halfq::testing;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("grid") {
  TEST_CASE("grid validation and coordinates") {
    CHECK_THROWS_AS(Grid(4, 0, 1), GridError);
    CHECK_THROWS_AS(Grid(16, 1, 1), GridError);
    const Grid g(64, -10, 10);
    CHECK(g.spacing() == doctest::Approx(20.0 / 64));
    CHECK(g.point(0) == -10);
    CHECK(g.point(32) == doctest::Approx(0.0));
    const RealVector k = g.wavenumbers();
    CHECK(k[1] == doctest::Approx(2 * std::numbers::pi / 20));
    CHECK(k[32] == doctest::Approx(-32 * 2 * std::numbers::pi / 20));
  }

  TEST_CASE("gaussian packet moments on the grid") {
    const Grid g(64, -10, 10);
    const double hbar = 1.0;
    const State psi = gaussian_state(g, 0.0, 1.0, 1.0, hbar);
    CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(oracle::grid_moment(psi, 0, 1)) < 1e-8);
    CHECK(oracle::grid_moment(psi, 0, 2) ==
          doctest::Approx(oracle::gaussian_central_moment(1.0, 2)).epsilon(1e-6));
    CHECK(oracle::grid_moment(psi, 0, 4) ==
          doctest::Approx(oracle::gaussian_central_moment(1.0, 4)).epsilon(1e-6));
    const State shifted = gaussian_state(g, 1.5, 0, 0.8, hbar);
    CHECK(oracle::grid_moment(shifted, 1.5, 1) == doctest::Approx(0).epsilon(1e-8));
    const OperatorMatrix q = position_operator(g);
    CHECK(shifted.inner(q.apply(shifted)).real() == doctest::Approx(1.5).epsilon(1e-8));
  }

  TEST_CASE("momentum expectation of a boosted packet") {
    const Grid g(64, -10, 10);
    for (double hbar : {1.0, 0.5}) {
      const State psi = gaussian_state(g, 0.3, 1.0, 1.0, hbar);
      const OperatorMatrix p = momentum_operator(g, hbar);
      CHECK(psi.inner(p.apply(psi)).real() == doctest::Approx(1.0).epsilon(1e-6));
      const double var = psi.inner(p.apply(p.apply(psi))).real() - 1.0;
      CHECK(var == doctest::Approx(hbar * hbar / 4).epsilon(1e-6));
    }
  }

  TEST_CASE("packet too wide for the grid") {
    CHECK_THROWS_AS(gaussian_state(Grid(64, -10, 10), 5, 0, 1, 1), GridError);
  }

  TEST_CASE("tensor products") {
    const Grid a(8, 0, 1), b(10, -1, 1);
    const OperatorMatrix ia = identity_operator({a}), ib = identity_operator({b});
    const OperatorMatrix iab = tensor(ia, ib);
    CHECK(max_abs(iab.entries - Matrix::Identity(80, 80)) == 0);
    const OperatorMatrix qa = position_operator(a);
    const OperatorMatrix pb = momentum_operator(b, 1.0);
    const Matrix lhs = tensor(qa, ib).entries * tensor(ia, pb).entries;
    CHECK(max_abs(lhs - tensor(qa, pb).entries) < 1e-12);
    const State s = tensor(gaussian_state(Grid(32, -8, 8), 0, 0, 1, 1), gaussian_state(Grid(32, -8, 8), 1, 0, 1, 1));
    CHECK(s.norm() == doctest::Approx(1.0));
    CHECK(s.grids.size() == 2);
  }

  TEST_CASE("local application matches the embedded matrix") {
    std::mt19937 rng(1);
    const std::vector<Grid> grids{Grid(8, 0, 1), Grid(9, 0, 1), Grid(10, 0, 1)};
    for (std::size_t slot = 0; slot < 3; ++slot) {
      const Matrix local = oracle::random_hermitian(rng, grids[slot].npoints);
      const Vector v = oracle::random_state(rng, 720);
      const OperatorMatrix full = embed(local, grids, slot, true);
      CHECK((full.entries * v - apply_local(local, grids, slot, v)).norm() < 1e-12);
    }
  }

  TEST_CASE("edge mass of a centred packet is negligible") {
    const Grid g(64, -10, 10);
    const State s = tensor(gaussian_state(g, 0, 1, 1 / std::sqrt(2.0), 1), gaussian_state(g, 0, 0.5, 1, 1));
    const EdgeMass e = edge_mass(s);
    CHECK(e.position < 1e-6);
    CHECK(e.momentum < 1e-6);
    const State flat(Vector::Constant(64, 1.0 / 8.0), {g});
    CHECK(edge_mass(flat).position == doctest::Approx(8.0 / 64));
    // A single Nyquist-neighbour mode sits entirely in the momentum edge.
    Vector wave(64);
    for (int j = 0; j < 64; ++j) wave[j] = std::polar(1.0 / 8.0, std::numbers::pi * 31 * j / 32.0);
    CHECK(edge_mass(State(wave, {g})).momentum == doctest::Approx(1.0));
  }
}

TEST_SUITE("spectral") {
  TEST_CASE("diagonal and Pauli matrices") {
    Matrix d = Matrix::Zero(3, 3);
    d(0, 0) = 3;
    d(1, 1) = -1;
    d(2, 2) = 2;
    const SpectralDecomp sd = spectral_decompose(d);
    CHECK(sd.eigenvalues[0] == doctest::Approx(-1));
    CHECK(sd.eigenvalues[1] == doctest::Approx(2));
    CHECK(sd.eigenvalues[2] == doctest::Approx(3));
    Matrix y(2, 2);
    y << 0, cplx(0, -1), cplx(0, 1), 0;
    const SpectralDecomp sy = spectral_decompose(y);
    CHECK(sy.eigenvalues[0] == doctest::Approx(-1));
    CHECK(sy.eigenvalues[1] == doctest::Approx(1));
  }

  TEST_CASE("random Hermitian reconstruction and orthonormality") {
    std::mt19937 rng(2);
    const Matrix a = oracle::random_hermitian(rng, 50);
    const SpectralDecomp d = spectral_decompose(a);
    CHECK(max_abs(a - d.reconstruct()) <= 1e-8 * max_abs(a));
    CHECK(max_abs(d.eigenvectors.adjoint() * d.eigenvectors - Matrix::Identity(50, 50)) <= 1e-10);
    for (Eigen::Index k = 1; k < 50; ++k) CHECK(d.eigenvalues[k - 1] <= d.eigenvalues[k]);
  }

  TEST_CASE("non-Hermitian input is rejected") {
    Matrix a = Matrix::Zero(8, 8);
    a(0, 1) = 1;
    CHECK_THROWS_AS(spectral_decompose(OperatorMatrix(a, {Grid(8, 0, 1)}, true)), std::invalid_argument);
    CHECK_THROWS_AS(spectral_decompose(OperatorMatrix(a, {Grid(8, 0, 1)}, false)), std::invalid_argument);
  }

  TEST_CASE("momentum spectrum is the Fourier ladder") {
    const Grid g(16, -4, 4);
    const SpectralDecomp d = spectral_decompose(momentum_operator(g, 1.0));
    for (Eigen::Index k = 0; k < 16; ++k) {
      CHECK(d.eigenvalues[k] == doctest::Approx(2 * std::numbers::pi * (k - 8) / 8.0).epsilon(1e-10));
    }
  }

  TEST_CASE("interval probabilities") {
    const Grid g(200, -10, 10);
    const State psi = gaussian_state(g, 0.05, 0.7, 1.0, 1.0);
    const SpectralDecomp d = spectral_decompose(position_operator(g));
    CHECK(interval_probability(d, psi, {-20, 20}) == doctest::Approx(1.0).epsilon(1e-10));
    // Endpoints at cell midpoints.
    CHECK(std::abs(interval_probability(d, psi, {-0.95, 1.05}) - oracle::normal_within(1)) < 1e-3);
    const double left = interval_probability(d, psi, {-20, 0.05});
    const double right = interval_probability(d, psi, {0.050001, 20});
    CHECK(left + right == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(interval_probability(d, psi, {-1, 1}) <= interval_probability(d, psi, {-2, 1}));
    State eig(d.eigenvectors.col(7), {g});
    CHECK(interval_probability(d, eig, {d.eigenvalues[7], d.eigenvalues[7]}) == doctest::Approx(1.0));
  }

  TEST_CASE("evolution: identity at t = 0, phases for diagonal H, unitarity") {
    const Grid g(16, -4, 4);
    const State psi = gaussian_state(g, 0, 0.5, 0.6, 1.0);
    const OperatorMatrix q = position_operator(g);
    CHECK((evolve_full_quantum(q, psi, 0, 1).amplitudes - psi.amplitudes).norm() == 0);
    const State out = evolve_full_quantum(q, psi, 0.7, 1.0);
    for (int j = 0; j < 16; ++j) {
      const cplx expect = psi.amplitudes[j] * std::polar(1.0, -g.point(j) * 0.7);
      CHECK(std::abs(out.amplitudes[j] - expect) < 1e-12);
    }
    std::mt19937 rng(4);
    const OperatorMatrix h(oracle::random_hermitian(rng, 16), {g}, true);
    CHECK(evolve_full_quantum(h, psi, 3.3, 1.0).norm() == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("free packet dispersion") {
    const Grid g(128, -20, 20);
    const double hbar = 1, m = 1, dq = 1;
    const State psi = gaussian_state(g, 0, 0, dq, hbar);
    const OperatorMatrix p = momentum_operator(g, hbar);
    const OperatorMatrix h(p.entries * p.entries / (2 * m), {g}, true);
    const double t = 2 * m * dq * dq / hbar;
    const State out = evolve_full_quantum(h, psi, t, hbar);
    const double mean = oracle::grid_moment(out, 0, 1);
    const double var = oracle::grid_moment(out, mean, 2);
    CHECK(std::abs(var - oracle::free_packet_variance(dq, hbar, m, t)) < 1e-4);
  }

  TEST_CASE("symmetry-blocked decomposition agrees with the dense one") {
    const Grid g(20, -8, 8);
    const double hbar = 1;
    const auto h_sym = halfq::symba::weyl_quantize(
        parse_expression("p2^2/(2*M) + p1^2/(2*m) + k*q1*p2", SystemDecl{2, 0}),
        halfq::symba::Split::contiguous(1, 1));
    const Bindings b{{}, {{"m", 1.0}, {"M", 1.3}, {"k", 0.4}}};
    const std::map<OperatorDof, Grid> grids{{{Sector::Classical, 1}, g}, {{Sector::Quantum, 1}, g}};
    const OperatorMatrix h = evaluate_symbolic(h_sym, b, grids, hbar);
    REQUIRE(h.hermitian);
    const Eigenbasis dense = Eigenbasis::dense(h);
    const Eigenbasis blocked = Eigenbasis::blocked(h, momentum_operator(g, hbar).entries, 1);
    CHECK(blocked.block_count() == 20);
    CHECK(blocked.off_block_residual() < 1e-10);
    const SpectralDecomp sd = blocked.decomposition();
    CHECK((sd.eigenvalues - dense.eigenvalues()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(max_abs(sd.reconstruct() - h.entries) < 1e-9 * max_abs(h.entries));
    const State psi = tensor(gaussian_state(g, 0, 1, 0.7, hbar), gaussian_state(g, 0, 0.5, 1, hbar));
    for (double t : {0.3, 1.0}) {
      const Vector a = evolve(dense, psi.amplitudes, t, hbar);
      const Vector c = evolve(blocked, psi.amplitudes, t, hbar);
      CHECK((a - c).norm() < 1e-10);
    }
    CHECK_THROWS_AS(Eigenbasis::blocked(h, position_operator(g).entries, 1), std::invalid_argument);
  }
}

TEST_SUITE("evaluate") {
  TEST_CASE("scalar times identity") {
    const Grid g(16, -4, 4);
    const SystemDecl sys{1, 1};
    const Bindings b{{{Symbol::q(1), 2.0}}, {}};
    const OperatorMatrix m =
        evaluate_symbolic(parse_expression("q1", sys), b, {{{Sector::Quantum, 1}, g}}, 1.0);
    CHECK(max_abs(m.entries - 2.0 * Matrix::Identity(16, 16)) == 0);
    CHECK(m.hermitian);
  }

  TEST_CASE("canonical commutator acts as i hbar on smooth states") {
    const Grid g(64, -10, 10);
    const double hbar = 0.7;
    const OperatorMatrix c = evaluate_symbolic(parse_expression("Q1*P1 - P1*Q1", SystemDecl{0, 1}) , {},
                                               {{{Sector::Quantum, 1}, g}}, hbar);
    // The engine cancels the product symbolically, so also evaluate the raw matrices.
    const OperatorMatrix q = position_operator(g), p = momentum_operator(g, hbar);
    const Matrix raw = q.entries * p.entries - p.entries * q.entries;
    const State psi = gaussian_state(g, 0.5, 0.3, 1.0, hbar);
    CHECK((c.entries * psi.amplitudes - cplx(0, hbar) * psi.amplitudes).norm() < 1e-12);
    CHECK((raw * psi.amplitudes - cplx(0, hbar) * psi.amplitudes).norm() < 1e-6);
  }

  TEST_CASE("closed-form classical trajectory becomes 1 - 0.05 P") {
    const Grid g(64, -10, 10);
    const auto q_t = parse_expression("q1 + p1*t/m - k*P1*t^2/(2*m)", SystemDecl{1, 1});
    const Bindings b{{{Symbol::q(1), 0.0}, {Symbol::p(1), 1.0}}, {{"t", 1.0}, {"m", 1.0}, {"k", 0.1}}};
    const OperatorMatrix m = evaluate_symbolic(q_t, b, {{{Sector::Quantum, 1}, g}}, 1.0);
    const Matrix expect = Matrix::Identity(64, 64) - 0.05 * momentum_operator(g, 1.0).entries;
    CHECK(max_abs(m.entries - expect) < 1e-14);
  }

  TEST_CASE("unbound symbols are errors") {
    const Grid g(16, -4, 4);
    const auto e = parse_expression("q1*P1 + k", SystemDecl{1, 1});
    CHECK_THROWS_AS(evaluate_symbolic(e, {{}, {{"k", 1}}}, {{{Sector::Quantum, 1}, g}}, 1), UnboundSymbol);
    CHECK_THROWS_AS(evaluate_symbolic(e, {{{Symbol::q(1), 1}}, {}}, {{{Sector::Quantum, 1}, g}}, 1), UnboundSymbol);
    CHECK_THROWS_AS(evaluate_symbolic(e, {{{Symbol::q(1), 1}}, {{"k", 1}}}, {{{Sector::Classical, 1}, g}}, 1),
                    UnboundSymbol);
  }

  TEST_CASE("linearity in the expression") {
    const Grid g(12, -3, 3);
    const SystemDecl sys{0, 1};
    const std::map<OperatorDof, Grid> grids{{{Sector::Quantum, 1}, g}};
    const auto a = parse_expression("Q1^2*P1 + P1", sys), b = parse_expression("3*Q1 - P1^3", sys);
    const Matrix lhs = evaluate_symbolic(a * halfq::symba::Coefficient(2) + b, {}, grids, 1).entries;
    const Matrix rhs = 2.0 * evaluate_symbolic(a, {}, grids, 1).entries + evaluate_symbolic(b, {}, grids, 1).entries;
    CHECK(max_abs(lhs - rhs) < 1e-10);
  }

  TEST_CASE("Heisenberg and Schrodinger pictures agree on the example system") {
    const Grid g(64, -10, 10);
    const double hbar = 1.0, t = 0.8;
    const auto h_classical = parse_expression("p2^2/(2*M) + p1^2/(2*m) + k*q1*p2", SystemDecl{2, 0});
    const auto h_full = halfq::symba::weyl_quantize(h_classical, halfq::symba::Split{{1}, {2}});
    const Bindings b{{}, {{"m", 1.0}, {"M", 1.0}, {"k", 0.1}, {"t", t}}};
    const std::map<OperatorDof, Grid> grids{{{Sector::Classical, 1}, g}, {{Sector::Quantum, 1}, g}};
    const Matrix p_local = momentum_operator(g, hbar).entries;
    auto basis = std::make_shared<Eigenbasis>(
        Eigenbasis::blocked(evaluate_symbolic(h_full, b, grids, hbar), p_local, 1));
    const State psi0 =
        tensor(gaussian_state(g, 0, 1, 1 / std::sqrt(2.0), hbar), gaussian_state(g, 0, 0.5, 1, hbar));
    const State psit = evolve_full_quantum(*basis, psi0, t, hbar);
    CHECK(psit.norm() == doctest::Approx(1.0).epsilon(1e-9));

    halfq::symba::SeriesOptions opt;
    opt.bracket = halfq::symba::BracketKind::Commutator;
    struct Case {
      std::string name;
      halfq::symba::Expression initial;
      std::size_t slot;
      bool position;
    };
    const std::vector<Case> cases{
        {"q", halfq::symba::Expression::op_q(Sector::Classical, 1), 0, true},
        {"p", halfq::symba::Expression::op_p(Sector::Classical, 1), 0, false},
        {"Q", halfq::symba::Expression::op_q(Sector::Quantum, 1), 1, true},
        {"P", halfq::symba::Expression::op_p(Sector::Quantum, 1), 1, false},
    };
    for (const auto& c : cases) {
      CAPTURE(c.name);
      const auto series = halfq::symba::heisenberg_series(c.initial, h_full, opt);
      REQUIRE(series.terminated);
      const OperatorMatrix a_t = evaluate_symbolic(series.value, b, grids, hbar);
      REQUIRE(a_t.hermitian);
      const OperatorMatrix local = c.position ? position_operator(g) : momentum_operator(g, hbar);
      const EmbeddedDecomp a0 = EmbeddedDecomp::make(local, {g, g}, c.slot);
      const HeisenbergObservable view(basis, a0, t, hbar);

      // Moments: <psi0|A(t)^n|psi0> against <psi(t)|A0^n|psi(t)>.
      Vector heis = psi0.amplitudes, schr = psit.amplitudes;
      for (int n = 1; n <= 2; ++n) {
        heis = a_t.entries * heis;
        schr = a0.apply(schr);
        CHECK(std::abs(psi0.amplitudes.dot(heis) - psit.amplitudes.dot(schr)) < 1e-6);
      }
      CHECK((view.apply(psi0.amplitudes) - a_t.entries * psi0.amplitudes).norm() < 1e-6);

      // Indicator functions; Q(t) has no local symmetry and a dense 4096
      // eigensolve is left to the acceptance run.
      if (c.name == "Q") continue;
      const Eigenbasis a_basis = Eigenbasis::blocked(a_t, p_local, 1);
      const double mean = psit.amplitudes.dot(a0.apply(psit.amplitudes)).real();
      const RealVector& ev = a0.local.eigenvalues;
      Eigen::Index centre = 0;
      (ev.array() - mean).abs().minCoeff(&centre);
      for (Eigen::Index w : {2, 4, 7}) {
        // Endpoints halfway between local eigenvalues, away from knife edges.
        const Interval iv{(ev[centre - w] + ev[centre - w - 1]) / 2,
                          (ev[centre + w] + ev[centre + w + 1]) / 2};
        const double p_heis = a_basis.probability(psi0.amplitudes, iv);
        const double p_schr = a0.probability(psit.amplitudes, iv);
        CAPTURE(w);
        // On a periodic box q + t p / m has a lattice spectrum of spacing
        // 2 pi t / (m L), independent of the point count, so narrow q
        // intervals miss this bound at L = 20.
        CHECK(std::abs(p_heis - p_schr) < 1e-3);
        CHECK(view.probability(psi0.amplitudes, iv) == doctest::Approx(p_schr).epsilon(1e-12));
      }
    }
  }
}
