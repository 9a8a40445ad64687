#include "halfq/harness/report.hpp"

#include <cstdio>
#include <sstream>

#include "halfq/symba/parser.hpp"

namespace halfq::harness {

namespace {

ordered_json interval_json(const hilbert::Interval& i) { return ordered_json::array({i.lo, i.hi}); }

ordered_json grids_json(const std::vector<hilbert::Grid>& gs) {
  auto a = ordered_json::array();
  for (const auto& g : gs) a.push_back({{"points", g.npoints}, {"min", g.xmin}, {"max", g.xmax}});
  return a;
}

}  // namespace

std::string fmt(double x, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, x);
  return buf;
}

ordered_json to_json(const errorket::ClassicalityCertificate& c) {
  ordered_json j;
  j["order"] = c.order;
  j["verdict"] = c.pass() ? "pass" : "fail";
  j["rows"] = ordered_json::array();
  for (const auto& r : c.rows) {
    j["rows"].push_back(
        {{"sequence", r.sequence.str()}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"slack", r.slack()}});
  }
  return j;
}

ordered_json to_json(const halfdyn::ErrorConstants& c) {
  return {{"L", c.order},          {"p", c.p},         {"widening", c.widening},
          {"X", c.x},              {"error", c.error}, {"sqrt_term", c.sqrt_term}};
}

ordered_json to_json(const ClosedFormCheck& c) {
  ordered_json j;
  j["pass"] = c.pass();
  j["rows"] = ordered_json::array();
  for (const auto& r : c.rows) {
    ordered_json row;
    row["observable"] = r.observable;
    row["computed"] = symba::print_expression(r.computed);
    row["expected"] = symba::print_expression(r.expected);
    row["solution_match"] = r.solution_match;
    row["margin_computed"] = ordered_json::array();
    for (const auto& e : r.margin_computed) row["margin_computed"].push_back(symba::print_expression(e));
    row["margin_expected"] = ordered_json::array();
    for (const auto& e : r.margin_expected) row["margin_expected"].push_back(symba::print_expression(e));
    row["margin_match"] = r.margin_match;
    j["rows"].push_back(row);
  }
  return j;
}

ordered_json to_json(const MarginRow& m) {
  return {{"observable", m.observable},
          {"t", m.t},
          {"B", m.expression},
          {"L", m.margin.order},
          {"delta_L", m.used},
          {"first_order", m.margin.first_order},
          {"second_order", m.margin.second_order},
          {"truncation", m.margin.truncation},
          {"bin_max", m.bin_max},
          {"mean", m.mean},
          {"sigma", m.sigma}};
}

ordered_json to_json(const BoundRow& r, bool with_oracle) {
  const auto& b = r.bound;
  ordered_json j;
  j["observable"] = r.observable;
  j["t"] = r.t;
  j["a0"] = r.a0;
  j["D"] = r.D;
  j["L"] = b.order;
  j["p"] = b.p;
  j["I_B"] = b.i_b;
  j["delta_L"] = b.delta_l;
  j["Delta_L"] = b.Delta_l;
  j["Imin"] = interval_json(b.imin);
  j["Imax"] = interval_json(b.imax);
  j["Pmin"] = b.pmin;
  j["Pmax"] = b.pmax;
  j["X"] = b.x;
  j["Emin"] = b.emin;
  j["Emax"] = b.emax;
  j["lower"] = b.lower();
  j["upper"] = b.upper();
  j["lower_raw"] = b.lower_raw();
  j["upper_raw"] = b.upper_raw();
  if (with_oracle) {
    j["oracle_P"] = r.oracle;
    j["verdict"] = r.verdict ? "pass" : "fail";
    j["X1"] = {{"measured", r.x1.measured}, {"bound", r.x1.bound}};
    j["X2"] = {{"measured", r.x2.measured}, {"bound", r.x2.bound}};
    j["leakage"] = r.leakage_pass ? "pass" : "fail";
  }
  return j;
}

ordered_json to_json(const DiscrepancyRow& r) {
  return {{"observable", r.observable}, {"t", r.t},     {"L", r.order},
          {"lhs", r.d.lhs},             {"rhs", r.d.rhs}, {"verdict", r.pass ? "pass" : "fail"}};
}

ordered_json to_json(const VerificationReport& r) {
  ordered_json j;
  j["config"] = r.config_name;
  j["L"] = r.order;
  j["p"] = r.p;
  j["status"] = r.status;
  j["pass"] = r.pass();
  j["applicable"] = r.applicable;
  j["summary"] = {{"bound_rows", r.rows.size()},
                  {"bound_violations", r.bound_violations()},
                  {"leakage_violations", r.leakage_violations()},
                  {"discrepancy_rows", r.discrepancies.size()},
                  {"discrepancy_violations", r.discrepancy_violations()}};
  j["sequences"] = ordered_json::array();
  for (const auto& s : r.sequences) j["sequences"].push_back(s.str());
  j["certificate"] = to_json(r.certificate);
  j["constants"] = to_json(r.constants);
  j["closed_form"] = r.closed_form ? to_json(*r.closed_form) : ordered_json(nullptr);
  j["hamiltonian_consistency"] =
      r.consistency ? ordered_json{{"residual", r.consistency->residual},
                                   {"tolerance", r.consistency->tolerance},
                                   {"pass", r.consistency->pass()}}
                    : ordered_json(nullptr);
  j["margins"] = ordered_json::array();
  for (const auto& m : r.margins) j["margins"].push_back(to_json(m));
  j["rows"] = ordered_json::array();
  for (const auto& row : r.rows) j["rows"].push_back(to_json(row));
  j["discrepancies"] = ordered_json::array();
  for (const auto& d : r.discrepancies) j["discrepancies"].push_back(to_json(d));
  const auto& t = r.tolerances;
  j["environment"] = {{"classical_grids", grids_json(r.classical_grids)},
                      {"quantum_grids", grids_json(r.quantum_grids)},
                      {"oracle_dimension", r.oracle_dimension},
                      {"solver", r.solver},
                      {"worst_edge_mass", r.worst_edge_mass},
                      {"tolerances",
                       {{"hermitian", t.hermitian},
                        {"edge_mass", t.edge_mass},
                        {"edge_cells", t.edge_cells},
                        {"verdict", t.verdict},
                        {"leakage", t.leakage},
                        {"discrepancy_rel", t.discrepancy_rel},
                        {"consistency", t.consistency}}},
                      {"seed", r.seed}};
  return j;
}

ordered_json to_json(const BoundsTable& t) {
  ordered_json j;
  j["margins"] = ordered_json::array();
  for (const auto& m : t.margins) j["margins"].push_back(to_json(m));
  j["rows"] = ordered_json::array();
  for (const auto& r : t.rows) j["rows"].push_back(to_json(r, false));
  return j;
}

std::string to_csv(const VerificationReport& r) {
  std::ostringstream s;
  s << "observable,t,a0,D,lower,oracle,upper\n";
  for (const auto& row : r.rows) {
    s << row.observable << ',' << fmt(row.t, 17) << ',' << fmt(row.a0, 17) << ',' << fmt(row.D, 17) << ','
      << fmt(row.bound.lower(), 17) << ',' << fmt(row.oracle, 17) << ',' << fmt(row.bound.upper(), 17)
      << '\n';
  }
  return s.str();
}

std::string to_csv(const BoundsTable& t) {
  std::ostringstream s;
  s << "observable,t,a0,D,lower,upper\n";
  for (const auto& row : t.rows) {
    s << row.observable << ',' << fmt(row.t, 17) << ',' << fmt(row.a0, 17) << ',' << fmt(row.D, 17) << ','
      << fmt(row.bound.lower(), 17) << ',' << fmt(row.bound.upper(), 17) << '\n';
  }
  return s.str();
}

std::string to_text(const errorket::ClassicalityCertificate& c) {
  std::ostringstream s;
  s << "certificate L=" << c.order << ": " << (c.pass() ? "pass" : "fail") << "\n";
  s << "  sequence                      <E|E>          delta^2        slack\n";
  for (const auto& r : c.rows) {
    char line[160];
    std::snprintf(line, sizeof line, "  %-28s %-14s %-14s %s\n", r.sequence.str().c_str(), fmt(r.lhs).c_str(),
                  fmt(r.rhs).c_str(), fmt(r.slack()).c_str());
    s << line;
  }
  return s.str();
}

namespace {

void margins_text(std::ostringstream& s, const std::vector<MarginRow>& margins) {
  s << "half-quantum observables:\n";
  for (const auto& m : margins) {
    s << "  " << m.observable << "(t=" << fmt(m.t) << ") = " << m.expression << "  delta_L = " << fmt(m.used);
    if (m.margin.truncation > 0) s << " (truncated " << fmt(m.margin.truncation) << ")";
    s << "\n";
  }
}

void bound_line(std::ostringstream& s, const BoundRow& r, bool with_oracle) {
  char line[256];
  std::snprintf(line, sizeof line, "  %-3s %-5s %-10s %-10s %-10s %-10s", r.observable.c_str(), fmt(r.t, 3).c_str(),
                fmt(r.a0, 5).c_str(), fmt(r.D, 5).c_str(), fmt(r.bound.lower_raw(), 5).c_str(),
                fmt(r.bound.upper_raw(), 5).c_str());
  s << line;
  if (with_oracle) {
    std::snprintf(line, sizeof line, " %-10s %-5s X1 %-9s X2 %-9s <= %s", fmt(r.oracle, 5).c_str(),
                  r.verdict ? "pass" : "FAIL", fmt(r.x1.measured, 3).c_str(), fmt(r.x2.measured, 3).c_str(),
                  fmt(r.x1.bound, 3).c_str());
    s << line;
  }
  s << "\n";
}

}  // namespace

std::string to_text(const VerificationReport& r) {
  std::ostringstream s;
  s << "verification of '" << r.config_name << "' at L=" << r.order << ", p=" << fmt(r.p) << "\n";
  s << "status: " << r.status << "\n";
  s << "oracle: " << r.oracle_dimension << "-dim, solver " << (r.solver.empty() ? "-" : r.solver)
    << ", worst edge mass " << fmt(r.worst_edge_mass, 3) << "\n";
  s << "sequences:";
  for (const auto& q : r.sequences) s << " " << q.str();
  s << "\n" << to_text(r.certificate);
  if (!r.applicable) return s.str();
  if (r.consistency) {
    s << "hamiltonian consistency: residual " << fmt(r.consistency->residual, 3) << " ("
      << (r.consistency->pass() ? "pass" : "FAIL") << ")\n";
  }
  if (r.closed_form) s << "closed-form check: " << (r.closed_form->pass() ? "pass" : "FAIL") << "\n";
  s << "worst-case constants: widening " << fmt(r.constants.widening) << ", X " << fmt(r.constants.x)
    << ", error " << fmt(r.constants.error) << "\n";
  margins_text(s, r.margins);
  s << "bounds (raw):\n  obs t     a0         D          lower      upper      oracle     verdict\n";
  for (const auto& row : r.rows) bound_line(s, row, true);
  s << "operator discrepancy:\n";
  for (const auto& d : r.discrepancies) {
    s << "  " << d.observable << " t=" << fmt(d.t, 3) << " L=" << d.order << "  " << fmt(d.d.lhs) << " <= "
      << fmt(d.d.rhs) << "  " << (d.pass ? "pass" : "FAIL") << "\n";
  }
  s << "rows " << r.rows.size() << ", bound violations " << r.bound_violations() << ", leakage violations "
    << r.leakage_violations() << ", discrepancy violations " << r.discrepancy_violations() << "\n";
  s << (r.pass() ? "PASS" : "FAIL") << "\n";
  return s.str();
}

std::string to_text(const BoundsTable& t) {
  std::ostringstream s;
  margins_text(s, t.margins);
  s << "bounds (raw):\n  obs t     a0         D          lower      upper\n";
  for (const auto& row : t.rows) bound_line(s, row, false);
  return s.str();
}

}  // namespace halfq::harness
