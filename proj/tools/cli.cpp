#include "cli.hpp"

#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "halfq/harness/report.hpp"
#include "halfq/symba/algebra.hpp"
#include "halfq/symba/parser.hpp"

namespace halfq::cli {

namespace {

using harness::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Output {
  bool json = false;
  bool csv = false;
  std::string out_path;
};

struct Overrides {
  std::string config_path;
  std::optional<int> order;
  std::optional<double> p;
  std::optional<double> i_b;
  std::vector<double> times;
  std::vector<std::string> observables;
};

void add_output(CLI::App* c, Output& o, bool csv) {
  c->add_flag("--json", o.json, "Machine-readable JSON on stdout");
  if (csv) {
    c->add_flag("--csv", o.csv, "CSV on stdout");
    c->add_option("--out", o.out_path, "Also write plot-ready CSV to this path");
  }
}

void add_overrides(CLI::App* c, Overrides& o, bool sweep) {
  c->add_option("--config", o.config_path, "System config (JSON); defaults to the built-in example");
  c->add_option("--order,-L", o.order, "Classicality order L")->check(CLI::PositiveNumber);
  if (!sweep) return;
  c->add_option("--p", o.p, "Confidence p in (0, 1)");
  c->add_option("--ib", o.i_b, "Fixed xi-state half-width I_B (default delta_L)");
  c->add_option("--times", o.times, "Times to sweep");
  c->add_option("--observables", o.observables, "Observables to sweep (q1 p1 Q1 P1 ...)");
}

harness::SystemConfig load(const Overrides& o) {
  auto c = o.config_path.empty() ? harness::build_example() : harness::load_config(o.config_path);
  if (o.order) c.bounds.order = *o.order;
  if (o.p) c.bounds.p = *o.p;
  if (o.i_b) c.bounds.i_b = *o.i_b;
  if (!o.times.empty()) c.sweep.times = o.times;
  if (!o.observables.empty()) c.sweep.observables = o.observables;
  c.validate();
  return c;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw UsageError("cannot write '" + path + "'");
  f << text;
}

// Text, JSON or CSV on `out`; CSV copy to --out when requested.
void emit(std::ostream& out, const Output& o, const std::string& text, const ordered_json& j,
          const std::string& csv = {}) {
  if (o.json) {
    out << j.dump(2) << "\n";
  } else if (o.csv) {
    out << csv;
  } else {
    out << text;
  }
  if (!o.out_path.empty()) write_file(o.out_path, csv);
}

std::string constants_text(const std::vector<halfdyn::ErrorConstants>& rows) {
  std::ostringstream s;
  s << "  L   p          widening   X            error\n";
  for (const auto& c : rows) {
    char line[160];
    std::snprintf(line, sizeof line, "  %-3d %-10s %-10s %-12s %s\n", c.order, harness::fmt(c.p).c_str(),
                  harness::fmt(c.widening, 5).c_str(), harness::fmt(c.x, 4).c_str(),
                  harness::fmt(c.error, 4).c_str());
    s << line;
  }
  return s.str();
}

std::string constants_csv(const std::vector<halfdyn::ErrorConstants>& rows) {
  std::ostringstream s;
  s << "L,p,widening,X,error\n";
  for (const auto& c : rows) {
    s << c.order << ',' << harness::fmt(c.p, 17) << ',' << harness::fmt(c.widening, 17) << ','
      << harness::fmt(c.x, 17) << ',' << harness::fmt(c.error, 17) << '\n';
  }
  return s.str();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Half-quantum dynamics: symbolic evolution, classicality certificates and verified bounds",
               "halfq"};
  app.require_subcommand(1);

  // parse
  std::string expr_text;
  int classical = 1, quantum = 1;
  Output parse_out;
  auto* parse = app.add_subcommand("parse", "Echo an expression in canonical form");
  parse->add_option("expression", expr_text, "Expression in the halfq grammar")->required();
  parse->add_option("--classical,-M", classical, "Classical DOFs")->check(CLI::NonNegativeNumber);
  parse->add_option("--quantum,-N", quantum, "Quantum DOFs")->check(CLI::NonNegativeNumber);
  add_output(parse, parse_out, false);

  // halfquantize
  Output hq_out;
  auto* hq = app.add_subcommand("halfquantize", "Half-quantize a classical Hamiltonian over M + N DOFs");
  hq->add_option("expression", expr_text, "Classical expression over q1..q(M+N), p1..p(M+N)")->required();
  hq->add_option("--classical,-M", classical, "DOFs 1..M stay classical")->check(CLI::PositiveNumber);
  hq->add_option("--quantum,-N", quantum, "DOFs M+1..M+N become quantum")->check(CLI::PositiveNumber);
  add_output(hq, hq_out, false);

  // evolve
  Overrides ev_cfg;
  Output ev_out;
  std::vector<std::string> ev_observables;
  std::string bracket = "hybrid";
  int truncate = 0;
  auto* evolve = app.add_subcommand("evolve", "Heisenberg-series solutions under the half-quantized Hamiltonian");
  evolve->add_option("observables", ev_observables, "Hybrid expressions (default: all fundamental observables)");
  evolve->add_option("--config", ev_cfg.config_path, "System config (JSON); defaults to the built-in example");
  evolve->add_option("--bracket", bracket, "hybrid or commutator")
      ->check(CLI::IsMember({"hybrid", "commutator"}));
  evolve->add_option("--truncate", truncate, "Keep powers of t up to this order when the series does not end")
      ->check(CLI::NonNegativeNumber);
  add_output(evolve, ev_out, false);

  // certify
  Overrides cert_cfg;
  Output cert_out;
  auto* certify = app.add_subcommand("certify", "Classicality certificate of the classical factor");
  add_overrides(certify, cert_cfg, false);
  add_output(certify, cert_out, false);

  // bounds
  Overrides b_cfg;
  Output b_out;
  auto* bounds = app.add_subcommand("bounds", "Prediction-bound table for the sweep (no oracle)");
  add_overrides(bounds, b_cfg, true);
  add_output(bounds, b_out, true);

  // verify
  Overrides v_cfg;
  Output v_out;
  auto* verify = app.add_subcommand("verify", "Full verification against the full-quantum oracle");
  add_overrides(verify, v_cfg, true);
  add_output(verify, v_out, true);

  // jacobi-demo
  int max_degree = 3;
  Output j_out;
  auto* jacobi = app.add_subcommand("jacobi-demo", "Print a nonzero jacobiator of the hybrid bracket");
  jacobi->add_option("--max-degree", max_degree, "Largest monomial degree searched")->check(CLI::Range(1, 4));
  add_output(jacobi, j_out, false);

  // constants
  std::optional<int> c_order;
  std::optional<double> c_p;
  Output c_out;
  auto* constants = app.add_subcommand("constants", "Worst-case error constants (default: L=1 p=0.99 and L=10 p=0.99999)");
  constants->add_option("--order,-L", c_order, "Order L")->check(CLI::PositiveNumber);
  constants->add_option("--p", c_p, "Confidence p in (0, 1)");
  add_output(constants, c_out, true);

  // example-config
  auto* example = app.add_subcommand("example-config", "Print the built-in example config as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*parse) {
      const auto e = symba::parse_expression(expr_text, {classical, quantum});
      const auto canon = symba::print_expression(e);
      emit(out, parse_out, canon + "\n", {{"input", expr_text}, {"canonical", canon}});
      return 0;
    }
    if (*hq) {
      const auto e = symba::parse_expression(expr_text, {classical + quantum, 0});
      if (!e.is_scalar_valued()) throw UsageError("halfquantize expects a classical expression");
      const auto r = symba::half_quantize(e, symba::Split::contiguous(classical, quantum));
      const auto text = symba::print_expression(r);
      emit(out, hq_out, text + "\n", {{"input", expr_text}, {"half_quantized", text}});
      return 0;
    }
    if (*evolve) {
      const auto cfg = load(ev_cfg);
      const auto h = harness::hybrid_hamiltonian(cfg);
      std::vector<std::pair<std::string, symba::Expression>> obs;
      if (ev_observables.empty()) {
        auto all = cfg;
        all.sweep.observables.clear();
        for (const auto& o : harness::fundamental_observables(all)) obs.emplace_back(o.name, o.expr);
      } else {
        for (const auto& s : ev_observables) obs.emplace_back(s, symba::parse_expression(s, cfg.hybrid_system()));
      }
      symba::SeriesOptions opt;
      opt.bracket = bracket == "hybrid" ? symba::BracketKind::Hybrid : symba::BracketKind::Commutator;
      opt.truncation_order = truncate;
      std::ostringstream text;
      text << "H = " << symba::print_expression(h) << "\n";
      ordered_json j{{"hamiltonian", symba::print_expression(h)}, {"bracket", bracket}};
      j["solutions"] = ordered_json::array();
      for (const auto& [name, e] : obs) {
        const auto r = symba::heisenberg_series(e, h, opt);
        const auto v = symba::print_expression(r.value);
        text << name << "(t) = " << v << (r.terminated ? "" : "  [truncated]") << "\n";
        j["solutions"].push_back({{"observable", name}, {"solution", v}, {"terminated", r.terminated}});
      }
      emit(out, ev_out, text.str(), j);
      return 0;
    }
    if (*certify) {
      const auto cfg = load(cert_cfg);
      std::vector<errorket::SequenceSpec> seqs;
      const auto cert = harness::certify_config(cfg, &seqs);
      std::ostringstream text;
      text << "sequences:";
      for (const auto& s : seqs) text << " " << s.str();
      text << "\n" << harness::to_text(cert);
      const auto feas = errorket::gaussian_feasibility(cfg.data(), cfg.bounds.order, cfg.hbar);
      auto j = harness::to_json(cert);
      j["gaussian_feasibility"] = ordered_json::array();
      for (std::size_t i = 0; i < feas.ranges.size(); ++i) {
        const auto& r = feas.ranges[i];
        text << "gaussian dq range for DOF " << i + 1 << ": [" << harness::fmt(r.lo) << ", " << harness::fmt(r.hi)
             << "] " << (r.feasible() ? "feasible" : "infeasible") << "\n";
        j["gaussian_feasibility"].push_back({{"dof", i + 1}, {"lo", r.lo}, {"hi", r.hi}, {"feasible", r.feasible()}});
      }
      emit(out, cert_out, text.str(), j);
      return cert.pass() ? 0 : 1;
    }
    if (*bounds) {
      const auto cfg = load(b_cfg);
      const auto t = harness::bounds_table(cfg);
      emit(out, b_out, harness::to_text(t), harness::to_json(t), harness::to_csv(t));
      return 0;
    }
    if (*verify) {
      const auto cfg = load(v_cfg);
      const auto r = harness::run_verification(cfg);
      emit(out, v_out, harness::to_text(r), harness::to_json(r), harness::to_csv(r));
      return r.pass() ? 0 : 1;
    }
    if (*jacobi) {
      const auto w = symba::find_jacobi_witness(max_degree);
      if (!w) {
        emit(out, j_out, "no nonzero jacobiator up to degree " + std::to_string(max_degree) + "\n",
             {{"found", false}});
        return 1;
      }
      const auto a = symba::print_expression(w->a), b = symba::print_expression(w->b),
                 c = symba::print_expression(w->c), v = symba::print_expression(w->value);
      std::ostringstream text;
      text << "A = " << a << "\nB = " << b << "\nC = " << c << "\n(A,(B,C)) + (B,(C,A)) + (C,(A,B)) = " << v << "\n";
      emit(out, j_out, text.str(), {{"found", true}, {"A", a}, {"B", b}, {"C", c}, {"jacobiator", v}});
      return 0;
    }
    if (*constants) {
      std::vector<halfdyn::ErrorConstants> rows;
      if (c_order || c_p) {
        rows.push_back(halfdyn::worst_case_constants(c_order.value_or(1), c_p.value_or(0.99)));
      } else {
        rows.push_back(halfdyn::worst_case_constants(1, 0.99));
        rows.push_back(halfdyn::worst_case_constants(10, 0.99999));
      }
      ordered_json j = ordered_json::array();
      for (const auto& r : rows) j.push_back(harness::to_json(r));
      emit(out, c_out, constants_text(rows), j, constants_csv(rows));
      return 0;
    }
    if (*example) {
      out << harness::to_json(harness::build_example()).dump(2) << "\n";
      return 0;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const harness::ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const symba::ParseError& e) {
    err << "error: " << e.what() << " (at offset " << e.position() << ")\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace halfq::cli
