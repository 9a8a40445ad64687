#include "halfq/harness/config.hpp"

#include <fstream>

#include "halfq/symba/parser.hpp"

namespace halfq::harness {

using nlohmann::json;
using nlohmann::ordered_json;

void SystemConfig::validate() const {
  if (schema_version != kSchemaVersion) {
    throw ConfigError("unsupported schema_version " + std::to_string(schema_version));
  }
  if (classical_dofs < 1 || quantum_dofs < 1) throw ConfigError("need M >= 1 and N >= 1");
  if (classical_dofs + quantum_dofs > 3) throw ConfigError("at most 3 DOFs are supported");
  auto count = [](const char* what, std::size_t have, int want) {
    if (have != static_cast<std::size_t>(want)) {
      throw ConfigError(std::string(what) + ": expected " + std::to_string(want) + " entries, got " +
                        std::to_string(have));
    }
  };
  count("classical_grids", classical_grids.size(), classical_dofs);
  count("quantum_grids", quantum_grids.size(), quantum_dofs);
  count("classical_data", classical_data.size(), classical_dofs);
  count("classical_state", classical_state.size(), classical_dofs);
  count("quantum_state", quantum_state.size(), quantum_dofs);
  if (!(hbar > 0)) throw ConfigError("hbar must be positive");
  if (parameters.contains("t")) throw ConfigError("parameter 't' is reserved for time");
  try {
    const auto h = symba::parse_expression(hamiltonian, full_system());
    if (!h.is_scalar_valued()) throw ConfigError("hamiltonian must be classical (no operators)");
    for (const auto& n : h.parameter_names()) {
      if (!parameters.contains(n)) throw ConfigError("hamiltonian parameter '" + n + "' has no value");
    }
  } catch (const symba::ParseError& e) {
    throw ConfigError(std::string("hamiltonian: ") + e.what());
  }
  try {
    (void)data();
    bounds.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  auto fits = [&](const GaussianSpec& g, const hilbert::Grid& grid, const std::string& what) {
    if (!(g.dq > 0) || g.q0 - 6 * g.dq < grid.xmin || g.q0 + 6 * g.dq > grid.xmax) {
      throw ConfigError(what + ": packet q0 +- 6 dq must lie inside [" + std::to_string(grid.xmin) +
                        ", " + std::to_string(grid.xmax) + "]");
    }
  };
  for (int i = 0; i < classical_dofs; ++i) {
    fits(classical_state[i], classical_grids[i], "classical_state[" + std::to_string(i) + "]");
  }
  for (int a = 0; a < quantum_dofs; ++a) {
    const auto& s = quantum_state[a];
    if (s.gaussian) {
      fits(*s.gaussian, quantum_grids[a], "quantum_state[" + std::to_string(a) + "]");
    } else if (s.amplitude_file.empty()) {
      throw ConfigError("quantum_state[" + std::to_string(a) + "]: needs gaussian or amplitude_file");
    }
  }
  if (sweep.times.empty()) throw ConfigError("sweep.times is empty");
  for (double f : sweep.d_factors) {
    if (!(f > 1)) throw ConfigError("sweep.d_factors must exceed 1 so that D > Delta_L");
  }
}

namespace {

ordered_json grid_json(const hilbert::Grid& g) {
  return {{"points", g.npoints}, {"min", g.xmin}, {"max", g.xmax}};
}

hilbert::Grid grid_from(const json& j) {
  try {
    return {j.at("points").get<int>(), j.at("min").get<double>(), j.at("max").get<double>()};
  } catch (const hilbert::GridError& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
}

ordered_json gaussian_json(const GaussianSpec& g) {
  return {{"q0", g.q0}, {"p0", g.p0}, {"dq", g.dq}};
}

GaussianSpec gaussian_from(const json& j) {
  return {j.at("q0").get<double>(), j.at("p0").get<double>(), j.at("dq").get<double>()};
}

template <class T, class F>
std::vector<T> list_from(const json& j, const char* key, F f) {
  std::vector<T> out;
  if (!j.contains(key)) return out;
  for (const auto& e : j.at(key)) out.push_back(f(e));
  return out;
}

}  // namespace

ordered_json to_json(const SystemConfig& c) {
  ordered_json j;
  j["schema_version"] = c.schema_version;
  j["name"] = c.name;
  j["classical_dofs"] = c.classical_dofs;
  j["quantum_dofs"] = c.quantum_dofs;
  j["hamiltonian"] = c.hamiltonian;
  j["parameters"] = ordered_json::object();
  for (const auto& [k, v] : c.parameters) j["parameters"][k] = v;
  j["hbar"] = c.hbar;
  j["classical_grids"] = ordered_json::array();
  for (const auto& g : c.classical_grids) j["classical_grids"].push_back(grid_json(g));
  j["quantum_grids"] = ordered_json::array();
  for (const auto& g : c.quantum_grids) j["quantum_grids"].push_back(grid_json(g));
  j["classical_data"] = ordered_json::array();
  for (const auto& d : c.classical_data) {
    j["classical_data"].push_back(
        {{"q0", d.q0}, {"p0", d.p0}, {"delta_q", d.delta_q}, {"delta_p", d.delta_p}});
  }
  j["classical_state"] = ordered_json::array();
  for (const auto& g : c.classical_state) j["classical_state"].push_back(gaussian_json(g));
  j["quantum_state"] = ordered_json::array();
  for (const auto& s : c.quantum_state) {
    if (s.gaussian) {
      j["quantum_state"].push_back({{"gaussian", gaussian_json(*s.gaussian)}});
    } else {
      j["quantum_state"].push_back({{"amplitude_file", s.amplitude_file}});
    }
  }
  j["bounds"] = {{"order", c.bounds.order}, {"p", c.bounds.p}};
  j["bounds"]["i_b"] = c.bounds.i_b ? ordered_json(*c.bounds.i_b) : ordered_json(nullptr);
  j["sweep"] = {{"times", c.sweep.times},
                {"d_factors", c.sweep.d_factors},
                {"offset_centres", c.sweep.offset_centres},
                {"observables", c.sweep.observables}};
  const auto& t = c.tolerances;
  j["tolerances"] = {{"hermitian", t.hermitian},       {"edge_mass", t.edge_mass},
                     {"edge_cells", t.edge_cells},     {"verdict", t.verdict},
                     {"leakage", t.leakage},           {"discrepancy_rel", t.discrepancy_rel},
                     {"consistency", t.consistency}};
  j["seed"] = c.seed;
  return j;
}

SystemConfig config_from_json(const json& j) {
  SystemConfig c;
  try {
    c.schema_version = j.at("schema_version").get<int>();
    if (c.schema_version != kSchemaVersion) {
      throw ConfigError("unsupported schema_version " + std::to_string(c.schema_version));
    }
    c.name = j.value("name", "");
    c.classical_dofs = j.at("classical_dofs").get<int>();
    c.quantum_dofs = j.at("quantum_dofs").get<int>();
    c.hamiltonian = j.at("hamiltonian").get<std::string>();
    if (j.contains("parameters")) c.parameters = j.at("parameters").get<std::map<std::string, double>>();
    c.hbar = j.value("hbar", 1.0);
    c.classical_grids = list_from<hilbert::Grid>(j, "classical_grids", grid_from);
    c.quantum_grids = list_from<hilbert::Grid>(j, "quantum_grids", grid_from);
    c.classical_data = list_from<errorket::ClassicalDof>(j, "classical_data", [](const json& e) {
      return errorket::ClassicalDof{e.at("q0").get<double>(), e.at("p0").get<double>(),
                                    e.at("delta_q").get<double>(), e.at("delta_p").get<double>()};
    });
    c.classical_state = list_from<GaussianSpec>(j, "classical_state", gaussian_from);
    c.quantum_state = list_from<StateSpec>(j, "quantum_state", [](const json& e) {
      StateSpec s;
      if (e.contains("gaussian")) s.gaussian = gaussian_from(e.at("gaussian"));
      s.amplitude_file = e.value("amplitude_file", "");
      return s;
    });
    if (j.contains("bounds")) {
      const auto& b = j.at("bounds");
      c.bounds.order = b.value("order", 1);
      c.bounds.p = b.value("p", 0.99);
      if (b.contains("i_b") && !b.at("i_b").is_null()) c.bounds.i_b = b.at("i_b").get<double>();
    }
    if (j.contains("sweep")) {
      const auto& s = j.at("sweep");
      c.sweep.times = s.value("times", c.sweep.times);
      c.sweep.d_factors = s.value("d_factors", c.sweep.d_factors);
      c.sweep.offset_centres = s.value("offset_centres", true);
      c.sweep.observables = s.value("observables", std::vector<std::string>{});
    }
    if (j.contains("tolerances")) {
      const auto& t = j.at("tolerances");
      auto& o = c.tolerances;
      o.hermitian = t.value("hermitian", o.hermitian);
      o.edge_mass = t.value("edge_mass", o.edge_mass);
      o.edge_cells = t.value("edge_cells", o.edge_cells);
      o.verdict = t.value("verdict", o.verdict);
      o.leakage = t.value("leakage", o.leakage);
      o.discrepancy_rel = t.value("discrepancy_rel", o.discrepancy_rel);
      o.consistency = t.value("consistency", o.consistency);
    }
    c.seed = j.value("seed", 0u);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

}  // namespace halfq::harness
