#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "halfq/harness/report.hpp"
#include "halfq/hilbert/evaluate.hpp"
#include "halfq/hilbert/operators.hpp"
#include "halfq/symba/parser.hpp"

using namespace halfq;
using namespace halfq::harness;
using hilbert::Grid;

namespace {

const symba::SystemDecl kHybrid{1, 1};

// Example on coarser grids; 48 points keep the Nyquist modes empty.
SystemConfig small_example(int order = 1, double p = 0.99) {
  auto c = build_example();
  c.classical_grids = {Grid(48, -10, 10)};
  c.quantum_grids = {Grid(48, -10, 10)};
  c.bounds.order = order;
  c.bounds.p = p;
  c.sweep.times = {0.0, 0.5};
  c.sweep.d_factors = {1.25, 2.0};
  return c;
}

symba::Expression hybrid(const char* text) { return symba::parse_expression(text, kHybrid); }

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("example defaults validate and round-trip through JSON") {
    const auto c = build_example();
    CHECK_NOTHROW(c.validate());
    CHECK(c.parameters.at("m") == 1.0);
    CHECK(c.parameters.at("M") == 1.0);
    CHECK(c.parameters.at("k") == 0.1);
    CHECK(c.hbar == 1.0);
    CHECK(c.quantum_grids.front().npoints == 64);
    CHECK(c.classical_grids.front().npoints == 64);
    const auto j = to_json(c);
    const auto back = config_from_json(nlohmann::json::parse(j.dump()));
    CHECK(to_json(back).dump() == j.dump());
  }

  TEST_CASE("config file load") {
    const auto path = std::filesystem::temp_directory_path() / "halfq_test_config.json";
    {
      std::ofstream out(path);
      out << to_json(build_example()).dump(2);
    }
    CHECK(to_json(load_config(path.string())).dump() == to_json(build_example()).dump());
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_config(path.string()), ConfigError);
  }

  TEST_CASE("invalid configs are rejected") {
    auto bad = [](auto mutate) {
      auto c = build_example();
      mutate(c);
      return c;
    };
    CHECK_THROWS_AS(bad([](SystemConfig& c) { c.schema_version = 2; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](SystemConfig& c) { c.hamiltonian = "p1^2 +"; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](SystemConfig& c) { c.hamiltonian = "P1^2"; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](SystemConfig& c) { c.parameters.erase("k"); }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](SystemConfig& c) { c.parameters["t"] = 1; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](SystemConfig& c) { c.classical_state[0].dq = 2; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](SystemConfig& c) { c.quantum_state[0].gaussian->q0 = 5; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](SystemConfig& c) { c.classical_data[0].delta_q = 0; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](SystemConfig& c) { c.bounds.p = 1; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](SystemConfig& c) { c.sweep.d_factors = {1.0}; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](SystemConfig& c) { c.quantum_grids.clear(); }).validate(), ConfigError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"schema_version": 1})")), ConfigError);
  }

  TEST_CASE("observable filter") {
    auto c = build_example();
    CHECK(fundamental_observables(c).size() == 4);
    c.sweep.observables = {"P1", "q1"};
    const auto obs = fundamental_observables(c);
    REQUIRE(obs.size() == 2);
    CHECK(obs[0].name == "P1");
    CHECK(obs[0].slot == 1);
    CHECK_FALSE(obs[0].position);
    CHECK(obs[1].slot == 0);
    c.sweep.observables = {"x1"};
    CHECK_THROWS_AS(fundamental_observables(c), ConfigError);
  }
}

TEST_SUITE("example") {
  TEST_CASE("hybrid Hamiltonian of the example") {
    CHECK(hybrid_hamiltonian(build_example()) == hybrid("P1^2/(2*M) + p1^2/(2*m) + k*q1*P1"));
  }

  TEST_CASE("evolved observables match the published solutions") {
    const auto c = build_example();
    CHECK(evolve_observable(c, hybrid("q1")).value == hybrid("q1 + p1*t/m - k*P1*t^2/(2*m)"));
    CHECK(evolve_observable(c, hybrid("p1")).value == hybrid("p1 - k*P1*t"));
    CHECK(evolve_observable(c, hybrid("Q1")).value ==
          hybrid("Q1 + (P1/M + k*q1)*t + k*p1*t^2/(2*m) - k^2*P1*t^3/(6*m)"));
    CHECK(evolve_observable(c, hybrid("P1")).value == hybrid("P1"));
    const auto check = closed_form_check(c);
    CHECK(check.pass());
    REQUIRE(check.rows.size() == 4);
    for (const auto& r : check.rows) {
      CAPTURE(r.observable);
      CHECK(r.solution_match);
      CHECK(r.margin_match);
    }
  }

  TEST_CASE("k = 0 reduces to free evolution") {
    auto c = build_example();
    const auto free = [&](const char* o) {
      return evolve_observable(c, hybrid(o)).value.substitute("k", symba::Coefficient(0));
    };
    CHECK(free("q1") == hybrid("q1 + p1*t/m"));
    CHECK(free("p1") == hybrid("p1"));
    CHECK(free("Q1") == hybrid("Q1 + P1*t/M"));
    c.parameters["k"] = 0;
    CHECK(closed_form_delta(c, "Q1", 2.0) == 0.0);
    CHECK(closed_form_delta(c, "q1", 2.0) == doctest::Approx(1 + 2.0));
  }

  TEST_CASE("heavy classical mass shrinks the momentum-margin terms") {
    auto c = build_example();
    const double t = 1.5;
    double previous = HUGE_VAL;
    for (double m : {1.0, 10.0, 100.0, 1e4}) {
      c.parameters["m"] = m;
      // |t/m| delta_p + delta_q with delta_q = delta_p = 1.
      CHECK(closed_form_delta(c, "q1", t) == doctest::Approx(1 + t / m));
      CHECK(closed_form_delta(c, "Q1", t) == doctest::Approx(0.1 * t + 0.1 * t * t / (2 * m)));
      CHECK(closed_form_delta(c, "q1", t) < previous);
      previous = closed_form_delta(c, "q1", t);
    }
  }

  TEST_CASE("closed-form check needs the example Hamiltonian") {
    auto c = build_example();
    c.hamiltonian = "p2^2/(2*M) + p1^2/(2*m) + k*q1*q2";
    CHECK_THROWS_AS(closed_form_check(c), ConfigError);
  }

  TEST_CASE("a flipped coupling sign is not the example") {
    auto c = build_example();
    c.hamiltonian = "p2^2/(2*M) + p1^2/(2*m) - k*q1*p2";
    CHECK_THROWS_AS(closed_form_check(c), ConfigError);
  }
}

TEST_SUITE("verification") {
  TEST_CASE("example classical factor is certified at L = 1 and 2") {
    for (int order : {1, 2}) {
      auto c = build_example();
      c.bounds.order = order;
      std::vector<errorket::SequenceSpec> seqs;
      const auto cert = certify_config(c, &seqs);
      REQUIRE(seqs.size() == 2);
      CHECK(seqs[0].str() == "(q1)");
      CHECK(seqs[1].str() == "(p1)");
      CHECK(cert.pass());
      CHECK(cert.rows.size() == static_cast<std::size_t>(order == 1 ? 2 : 4));
    }
  }

  TEST_CASE("uncertified classical factor is not applicable") {
    auto c = build_example();
    c.classical_state[0].dq = 5 * c.classical_data[0].delta_q;
    c.classical_grids = {Grid(128, -40, 40)};
    const auto r = run_verification(c);
    CHECK_FALSE(r.applicable);
    CHECK_FALSE(r.pass());
    CHECK(r.rows.empty());
    CHECK(r.status.find("not applicable") != std::string::npos);
    CHECK_FALSE(r.certificate.pass());
    CHECK(to_text(r).find("not applicable") != std::string::npos);
  }

  TEST_CASE("Hamiltonian consistency between symbolic and numeric quantization") {
    auto c = build_example();
    c.hamiltonian = "p2^2/(2*M) + p1^2/(2*m) + k*q1*p2 + q1^2*p2^2 + p1^4 + q2^3*p1";
    c.classical_grids = {Grid(16, -6, 6)};
    c.quantum_grids = {Grid(16, -6, 6)};
    const auto hc = symba::parse_expression(c.hamiltonian, c.full_system());
    const std::map<symba::OperatorDof, Grid> grids{{{symba::Sector::Classical, 1}, c.classical_grids[0]},
                                                   {{symba::Sector::Quantum, 1}, c.quantum_grids[0]}};
    auto h = hilbert::evaluate_symbolic(symba::weyl_quantize(hc, c.split()), {{}, c.parameters}, grids, 1.0);
    const auto ok = hamiltonian_consistency(c, h);
    CHECK(ok.pass());
    CHECK(ok.residual < 1e-12);
    {
      // Same-DOF products are normal-ordered with the continuum CCR, which a
      // finite grid does not satisfy, so the two constructions part ways.
      auto m = c;
      m.hamiltonian = "p1^2/(2*m) + q1^2*p1^2";
      const auto hm = symba::parse_expression(m.hamiltonian, m.full_system());
      const auto mixed = hilbert::evaluate_symbolic(symba::weyl_quantize(hm, m.split()), {{}, m.parameters}, grids, 1.0);
      CHECK(hamiltonian_consistency(m, mixed).residual > 1e-3);
    }
    // A normal-ordered q^2 p^2 differs from the Weyl form by an O(hbar^2) constant.
    const auto normal = symba::parse_expression("qh1^2*ph1^2", {1, 1});
    const auto weyl = symba::weyl_quantize(symba::parse_expression("q1^2*p1^2", {2, 0}), c.split());
    h.entries += hilbert::evaluate_symbolic(normal - weyl, {}, grids, 1.0).entries;
    CHECK_FALSE(hamiltonian_consistency(c, h).pass());
  }

  TEST_CASE("unconverged grid aborts") {
    auto c = small_example();
    c.classical_grids = {Grid(24, -10, 10)};  // p0 = 1 packet reaches the Nyquist modes
    CHECK_THROWS_AS(Oracle(c, false), UnconvergedGrid);
  }

  TEST_CASE("small example passes the full verification at L = 1 and 2") {
    for (int order : {1, 2}) {
      const auto c = small_example(order, order == 1 ? 0.99 : 0.9);
      const auto r = run_verification(c);
      CAPTURE(order);
      CHECK(r.applicable);
      CHECK(r.solver == "blocked on slot 1");
      REQUIRE(r.consistency.has_value());
      CHECK(r.consistency->pass());
      REQUIRE(r.closed_form.has_value());
      CHECK(r.closed_form->pass());
      CHECK(r.rows.size() == 4 * 2 * 2 * 2);
      CHECK(r.discrepancies.size() == 4 * 2);
      CHECK(r.bound_violations() == 0);
      CHECK(r.leakage_violations() == 0);
      CHECK(r.discrepancy_violations() == 0);
      CHECK(r.pass());
      CHECK(r.worst_edge_mass < 1e-6);
      for (const auto& m : r.margins) {
        CAPTURE(m.observable);
        CAPTURE(m.t);
        CHECK(m.used == doctest::Approx(closed_form_delta(c, m.observable, m.t)).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("P at t = 0 gives the exact quantum probability") {
    auto c = small_example();
    c.sweep.times = {0.0};
    c.sweep.observables = {"P1"};
    const auto r = run_verification(c);
    REQUIRE(!r.rows.empty());
    for (const auto& row : r.rows) {
      CHECK(row.bound.delta_l == 0);
      CHECK(row.bound.Delta_l == 0);
      CHECK(row.bound.x == 0);
      CHECK(row.bound.lower_raw() == doctest::Approx(row.bound.upper_raw()).epsilon(1e-12));
      CHECK(row.oracle == doctest::Approx(row.bound.pmin).epsilon(1e-10));
    }
  }

  TEST_CASE("k = 0 decouples the sectors") {
    auto c = small_example();
    c.parameters["k"] = 0;
    const auto t = bounds_table(c);
    for (const auto& m : t.margins) {
      CAPTURE(m.observable);
      if (m.observable == "Q1" || m.observable == "P1") CHECK(m.used == 0);
      if (m.observable == "q1") CHECK(m.used == doctest::Approx(1 + m.t));
      if (m.observable == "p1") CHECK(m.used == doctest::Approx(1));
    }
    for (const auto& r : t.rows) {
      if (r.observable == "Q1" || r.observable == "P1") {
        CHECK(r.bound.pmin == r.bound.pmax);
        CHECK(r.bound.emin == 0);
        CHECK(r.bound.emax == 0);
      }
    }
  }

  TEST_CASE("reports are deterministic and carry the required fields") {
    const auto c = small_example();
    const auto a = to_json(run_verification(c)).dump();
    const auto r = run_verification(c);
    CHECK(to_json(r).dump() == a);
    const auto j = to_json(r);
    for (const char* key : {"t", "a0", "D", "L", "p", "I_B", "delta_L", "Delta_L", "Pmin", "Pmax", "Emin",
                            "Emax", "lower", "upper", "oracle_P", "verdict"}) {
      CAPTURE(key);
      CHECK(j["rows"][0].contains(key));
    }
    CHECK(j["environment"]["seed"] == 0);
    CHECK(j["environment"]["tolerances"]["verdict"] == 1e-9);
    const auto csv = to_csv(r);
    CHECK(csv.rfind("observable,t,a0,D,lower,oracle,upper\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(r.rows.size() + 1));
    CHECK(to_text(r).find("PASS") != std::string::npos);
    CHECK(to_json(bounds_table(c)).dump() == to_json(bounds_table(c)).dump());
  }
}
