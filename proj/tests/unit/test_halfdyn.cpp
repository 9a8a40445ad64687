#include <cmath>
#include <memory>
#include <random>

#include "doctest.h"
#include "halfq/halfdyn/bounds.hpp"
#include "halfq/hilbert/operators.hpp"
#include "halfq/symba/algebra.hpp"
#include "halfq/symba/parser.hpp"
#include "numeric_oracles.hpp"

using namespace halfq;
using namespace halfq::halfdyn;
using hilbert::Grid;
using hilbert::Interval;
using symba::Symbol;

namespace oracle = halfq::testing;

namespace {

const symba::SystemDecl kSys{1, 1};

HybridObservable observable(const std::string& text, double t, double dq = 0.7, double dp = 1.3,
                            const Grid& g = Grid(64, -10, 10)) {
  HybridObservable b;
  b.name = text;
  b.expr = symba::parse_expression(text, kSys);
  b.binding = errorket::ClassicalData({{0.4, 0.9, dq, dp}}, 1.0);
  b.quantum_grids = {g};
  b.parameters = {{"m", 1.5}, {"M", 1.0}, {"k", 0.3}, {"t", t}};
  return b;
}

const char* kQ = "q1 + p1*t/m - k*P1*t^2/(2*m)";
const char* kBigQ = "Q1 + (P1/M + k*q1)*t + k*p1*t^2/(2*m) - k^2*P1*t^3/(6*m)";

}  // namespace

TEST_SUITE("margins") {
  TEST_CASE("closed-form margins of the coupled example hold for any order and xi") {
    std::mt19937 rng(7);
    const Grid g(64, -10, 10);
    for (double t : {0.0, 0.6, 1.7}) {
      for (int order = 1; order <= 3; ++order) {
        const State xi(oracle::random_state(rng, 64), {g});
        const double m = 1.5, k = 0.3, dq = 0.7, dp = 1.3;
        CAPTURE(t);
        CAPTURE(order);
        const auto q = delta_L_margin(observable(kQ, t), xi, order);
        CHECK(q.value() == doctest::Approx(dq + std::abs(t / m) * dp).epsilon(1e-12));
        CHECK(q.second_order == 0.0);
        CHECK(q.truncation == 0.0);
        const auto bq = delta_L_margin(observable(kBigQ, t), xi, order);
        CHECK(bq.value() ==
              doctest::Approx(std::abs(k * t) * dq + std::abs(k * t * t / (2 * m)) * dp).epsilon(1e-12));
        CHECK(delta_L_margin(observable("p1 - k*P1*t", t), xi, order).value() ==
              doctest::Approx(dp).epsilon(1e-12));
        CHECK(delta_L_margin(observable("P1", t), xi, order).value() == 0.0);
      }
    }
  }

  TEST_CASE("operator-valued derivatives enter through their L-th powers") {
    const Grid g(64, -10, 10);
    const auto xi = hilbert::gaussian_state(g, 0.3, 0.8, 1.2, 1);
    const auto b = observable("q1^2*P1", 0);
    const auto pm = hilbert::momentum_operator(g, 1).entries;
    for (int order : {1, 2}) {
      hilbert::Vector v = xi.amplitudes;
      for (int k = 0; k < order; ++k) v = pm * v;
      const double pl = std::pow(v.squaredNorm(), 0.5 / order);  // ||P^L xi||^(1/L)
      const auto r = delta_L_margin(b, xi, order);
      CHECK(r.first_order == doctest::Approx(2 * 0.4 * pl * 0.7).epsilon(1e-10));
      CHECK(r.second_order == doctest::Approx(0.5 * 2 * pl * 0.7 * 0.7).epsilon(1e-10));
      CHECK(r.truncation == 0.0);
    }
  }

  TEST_CASE("unbound parameters and classical symbols are reported") {
    const Grid g(16, -5, 5);
    const State xi(hilbert::Vector::Constant(16, 0.25), {g});
    auto b = observable("q1*P1*w", 0);
    CHECK_THROWS_AS(delta_L_margin(b, xi, 1), BoundError);
    auto c = observable("q1", 0);
    c.expr = symba::parse_expression("q2*P1", {2, 1});
    CHECK_THROWS_AS(delta_L_margin(c, xi, 1), BoundError);
  }

  TEST_CASE("symbolic margin coefficients of the example") {
    const auto b = symba::parse_expression(kBigQ, kSys);
    const auto c = margin_coefficients(b, {Symbol::q(1), Symbol::p(1)});
    CHECK(c.at(Symbol::q(1)) == symba::parse_expression("k*t", kSys));
    CHECK(c.at(Symbol::p(1)) == symba::parse_expression("k*t^2/(2*m)", kSys));
    CHECK_THROWS_AS(margin_coefficients(symba::parse_expression("q1*P1", kSys), {Symbol::q(1)}),
                    BoundError);
  }

  TEST_CASE("spreads") {
    const BoundConfig l1{1, 0.99, std::nullopt};
    CHECK(spread_Delta_L(0.37, l1) == doctest::Approx(20 * 0.37));
    const BoundConfig l10{10, 0.99999, std::nullopt};
    CHECK(spread_Delta_L(1.0, l10) == doctest::Approx(3.6).epsilon(0.05 / 3.6));
    CHECK(spread_Delta_L(0, l1) == 0.0);
    CHECK_THROWS_AS(spread_Delta_L(1, BoundConfig{1, 1.0, std::nullopt}), BoundError);
    CHECK_THROWS_AS(spread_Delta_L(1, BoundConfig{0, 0.5, std::nullopt}), BoundError);
  }
}

TEST_SUITE("xi states") {
  TEST_CASE("a window wider than the spectrum gives the product state") {
    const Grid g(32, -8, 8);
    const auto phi_q = hilbert::gaussian_state(g, 0, 0.5, 1, 1);
    const auto phi_c = hilbert::gaussian_state(g, 1, 0, 0.8, 1);
    const auto b = hilbert::position_operator(g);
    const auto xs = xi_states(b, phi_q, phi_c, 100);
    REQUIRE(xs.size() == 1);
    CHECK(xs[0].weight == doctest::Approx(1.0));
    CHECK((xs[0].xi.amplitudes - hilbert::tensor(phi_c, phi_q).amplitudes).norm() < 1e-12);
  }

  TEST_CASE("narrow windows give eigenprojections") {
    const Grid g(16, -4, 4);
    const auto phi_q = hilbert::gaussian_state(g, 0, 0, 0.6, 1);
    const State phi_c(hilbert::Vector::Ones(1), {});
    const auto xs = xi_states(hilbert::position_operator(g), phi_q, phi_c, 1e-6);
    REQUIRE(xs.size() == 16);
    for (std::size_t u = 0; u < xs.size(); ++u) {
      CHECK(xs[u].centre == doctest::Approx(g.point(static_cast<int>(u))));
      CHECK(std::abs(xs[u].xi_q.amplitudes[static_cast<Eigen::Index>(u)]) == doctest::Approx(1.0));
    }
  }

  TEST_CASE("random operator: orthonormal and complete") {
    std::mt19937 rng(11);
    const Grid g(64, -10, 10);
    const hilbert::OperatorMatrix b(oracle::random_hermitian(rng, 64), {g}, true);
    const State phi_q(oracle::random_state(rng, 64), {g});
    const State phi_c(hilbert::Vector::Ones(1), {});
    const auto xs = xi_states(b, phi_q, phi_c, 0.4);
    CHECK(xs.size() > 3);
    hilbert::Vector sum = hilbert::Vector::Zero(64);
    for (std::size_t u = 0; u < xs.size(); ++u) {
      sum += xs[u].weight * xs[u].xi.amplitudes;
      CHECK(std::abs(xs[u].xi.amplitudes.dot(phi_q.amplitudes) - xs[u].weight) < 1e-10);
      for (std::size_t v = 0; v < xs.size(); ++v) {
        const double expect = u == v ? 1.0 : 0.0;
        CHECK(std::abs(xs[u].xi.amplitudes.dot(xs[v].xi.amplitudes) - expect) < 1e-10);
      }
      if (u > 0) CHECK(xs[u].centre - xs[u - 1].centre >= 0.8 - 1e-12);
    }
    CHECK((sum - phi_q.amplitudes).norm() < 1e-10);
    CHECK_THROWS_AS(xi_states(b, phi_q, phi_c, 0), BoundError);
  }
}

TEST_SUITE("prediction bounds") {
  TEST_CASE("worst-case constants") {
    const auto c1 = worst_case_constants(1, 0.99);
    CHECK(c1.widening == doctest::Approx(20.0).epsilon(1e-14));
    CHECK(c1.x == doctest::Approx(0.1));
    CHECK(std::abs(c1.error - 0.72) <= 0.02);
    CHECK(c1.error == doctest::Approx(2 * std::sqrt(0.1) + 0.1));
    const auto c10 = worst_case_constants(10, 0.99999);
    CHECK(std::abs(c10.error - 0.0019) <= 0.0001);
    CHECK(std::abs(c10.x - 9.4e-7) <= 0.1e-7);
    CHECK(std::abs(c10.widening - 3.6) <= 0.05);
  }

  TEST_CASE("interval structure and ordering") {
    const auto b = observable(kQ, 0.8);
    const auto phi_q = hilbert::gaussian_state(b.quantum_grids[0], 0, 0.5, 1, 1);
    const BoundConfig cfg{1, 0.99, std::nullopt};
    const double delta = delta_L_margin(b, phi_q, 1).value();
    const double big = spread_Delta_L(delta, cfg);
    const Interval i0{1 - 2 * big, 1 + 2 * big};
    const auto pb = prediction_bounds(b, phi_q, cfg, i0);
    CHECK(pb.delta_l == doctest::Approx(delta));
    CHECK(pb.Delta_l == doctest::Approx(big));
    CHECK(pb.imin.lo > pb.i0.lo);
    CHECK(pb.imin.hi < pb.i0.hi);
    CHECK(pb.imax.lo < pb.i0.lo);
    CHECK(pb.imax.hi > pb.i0.hi);
    CHECK(pb.lower_raw() <= pb.upper_raw());
    CHECK(pb.lower() >= 0.0);
    CHECK(pb.upper() <= 1.0);
    CHECK(pb.pmin <= pb.pmax);
    CHECK_THROWS_AS(prediction_bounds(b, phi_q, cfg, Interval{1 - big, 1 + big}), BoundError);
  }

  TEST_CASE("exact quantum sector with no classical blur") {
    const auto b = observable("P1", 0.4);
    const auto phi_q = hilbert::gaussian_state(b.quantum_grids[0], 0, 0.5, 1, 1);
    const BoundConfig cfg{1, 0.99, std::nullopt};
    const Interval i0{-0.3, 1.1};
    const auto pb = prediction_bounds(b, phi_q, cfg, i0);
    CHECK(pb.delta_l == 0.0);
    CHECK(pb.x == 0.0);
    CHECK(pb.lower_raw() == pb.pmin);
    CHECK(pb.upper_raw() == pb.pmax);
    CHECK(pb.pmin == pb.pmax);
  }

  TEST_CASE("wider margins never tighten the bound") {
    const Grid g(64, -10, 10);
    const auto phi_q = hilbert::gaussian_state(g, 0, 0.5, 1, 1);
    for (double t : {0.5, 1.0}) {
      for (int order : {1, 2}) {
        double last = -1;
        for (double scale : {0.02, 0.05, 0.1, 0.2}) {
          const auto b = observable(kBigQ, t, 1.0 * scale, 1.0 * scale);
          const BoundConfig cfg{order, 0.9, std::nullopt};
          const Interval i0{-4, 4};
          const auto pb = prediction_bounds(b, phi_q, cfg, i0);
          const double width = pb.upper_raw() - pb.lower_raw();
          CHECK(width >= last);
          last = width;
        }
      }
    }
  }
}

TEST_SUITE("verification checks") {
  // Coupled example on a 32 x 32 grid with the classical-sector packet
  // certified at L = 1 and L = 2 by data (0, 1, 1, 1).
  struct Small {
    Grid g{32, -10, 10};
    double t;
    State phi_c, phi_q, psi_t;
    std::shared_ptr<hilbert::Eigenbasis> basis;

    explicit Small(double time) : t(time) {
      const auto hc = symba::parse_expression("p2^2/(2*M) + p1^2/(2*m) + k*q1*p2", {2, 0});
      const auto hq = symba::weyl_quantize(hc, symba::Split{{1}, {2}});
      const hilbert::Bindings bind{{}, {{"m", 1.0}, {"M", 1.0}, {"k", 0.1}}};
      const std::map<symba::OperatorDof, Grid> grids{{{symba::Sector::Classical, 1}, g},
                                                     {{symba::Sector::Quantum, 1}, g}};
      basis = std::make_shared<hilbert::Eigenbasis>(hilbert::Eigenbasis::blocked(
          hilbert::evaluate_symbolic(hq, bind, grids, 1.0), hilbert::momentum_operator(g, 1).entries, 1));
      phi_c = hilbert::gaussian_state(g, 0, 1, 1 / std::sqrt(2.0), 1);
      phi_q = hilbert::gaussian_state(g, 0, 0.5, 1, 1);
    }

    HybridObservable half(const std::string& text) const {
      HybridObservable b;
      b.name = text;
      b.expr = symba::parse_expression(text, kSys);
      b.binding = errorket::ClassicalData({{0, 1, 1, 1}}, 1.0);
      b.quantum_grids = {g};
      b.parameters = {{"m", 1.0}, {"M", 1.0}, {"k", 0.1}, {"t", t}};
      return b;
    }

    hilbert::HeisenbergObservable full(bool position, std::size_t slot) const {
      const auto local = position ? hilbert::position_operator(g) : hilbert::momentum_operator(g, 1);
      return {basis, hilbert::EmbeddedDecomp::make(local, {g, g}, slot), t, 1.0};
    }
  };

  TEST_CASE("operator discrepancy and leakage on the coupled example") {
    for (double t : {0.5, 1.0}) {
      const Small s(t);
      struct Obs {
        const char* text;
        bool position;
        std::size_t slot;
      };
      for (const auto& o : {Obs{kQ, true, 0}, Obs{"p1 - k*P1*t", false, 0}, Obs{kBigQ, true, 1},
                            Obs{"P1", false, 1}}) {
        const auto b = s.half(o.text);
        const auto a = s.full(o.position, o.slot);
        CAPTURE(o.text);
        CAPTURE(t);
        for (int order : {1, 2}) {
          const auto d = operator_discrepancy(a, b, s.phi_c, s.phi_q, order);
          CHECK(d.holds());
          if (std::string(o.text) == "P1") CHECK(d.lhs < 1e-9);

          const BoundConfig cfg{order, 0.9, std::nullopt};
          const auto decomp = hilbert::spectral_decompose(b.quantum_matrix());
          const double delta = delta_L_margin(b, s.phi_q, order).value();
          const double big = spread_Delta_L(delta, cfg);
          const double mean = s.phi_q.amplitudes.dot(b.quantum_matrix().entries * s.phi_q.amplitudes).real();
          for (double scale : {1.25, 2.0}) {
            const double half = delta > 0 ? scale * big : scale;
            const auto pb = bounds_from(decomp, s.phi_q, delta, cfg, {mean - half, mean + half});
            const auto x1 = tail_leakage(decomp, s.phi_q, s.phi_c, pb, a, LeakageKind::X1);
            const auto x2 = tail_leakage(decomp, s.phi_q, s.phi_c, pb, a, LeakageKind::X2);
            CHECK(x1.holds());
            CHECK(x2.holds());
          }
        }
      }
    }
  }

  TEST_CASE("no weight outside Imax means no X1 leakage") {
    const Small s(0.5);
    const auto b = s.half(kQ);
    const auto a = s.full(true, 0);
    const BoundConfig cfg{1, 0.99, std::nullopt};
    const auto decomp = hilbert::spectral_decompose(b.quantum_matrix());
    const double delta = delta_L_margin(b, s.phi_q, 1).value();
    const double big = spread_Delta_L(delta, cfg);
    const auto pb = bounds_from(decomp, s.phi_q, delta, cfg, {0.5 - 2 * big, 0.5 + 2 * big});
    const auto x1 = tail_leakage(decomp, s.phi_q, s.phi_c, pb, a, LeakageKind::X1);
    CHECK(x1.measured == 0.0);
    CHECK(x1.bound == doctest::Approx(0.1));
  }

  TEST_CASE("apply_quantum acts on the fast index") {
    const Grid g(8, -2, 2);
    std::mt19937 rng(3);
    const auto bq = oracle::random_hermitian(rng, 8);
    const hilbert::Vector v = oracle::random_state(rng, 64);
    const hilbert::Matrix full = hilbert::kron(hilbert::Matrix::Identity(8, 8), bq);
    CHECK((apply_quantum(bq, v) - full * v).norm() < 1e-12);
  }
}

TEST_CASE("complement of p uses its decimal form") {
  CHECK(BoundConfig{1, 0.99, std::nullopt}.complement() == 0.01);
  CHECK(BoundConfig{1, 0.99999, std::nullopt}.complement() == 1e-5);
  CHECK(BoundConfig{1, 0.9, std::nullopt}.complement() == 0.1);
  const double odd = 1.0 / 3.0;
  CHECK(BoundConfig{1, odd, std::nullopt}.complement() == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(halfdyn::worst_case_constants(1, 0.99).widening == 20.0);
}
