#include "pobs/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pobs/canonical.hpp"
#include "pobs/matrix_io.hpp"
#include "pobs/random.hpp"

namespace pobs {

using Json = nlohmann::ordered_json;

namespace {

double number_at(const Json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) throw ConfigError(path + "/" + key, "missing field");
  if (!j[key].is_number()) throw ConfigError(path + "/" + key, "expected a number");
  const double v = j[key].get<double>();
  if (!std::isfinite(v)) throw ConfigError(path + "/" + key, "must be finite");
  return v;
}

long integer_at(const Json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) throw ConfigError(path + "/" + key, "missing field");
  if (!j[key].is_number_integer()) throw ConfigError(path + "/" + key, "expected an integer");
  return j[key].get<long>();
}

std::string string_at(const Json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) throw ConfigError(path + "/" + key, "missing field");
  if (!j[key].is_string()) throw ConfigError(path + "/" + key, "expected a string");
  return j[key].get<std::string>();
}

Matrix builtin_operator(const std::string& name, const std::string& path) {
  Matrix m = Matrix::Zero(2, 2);
  if (name == "pauli_x") {
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
  } else if (name == "pauli_y") {
    m(0, 1) = -kI;
    m(1, 0) = kI;
  } else if (name == "pauli_z") {
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
  } else if (name == "identity") {
    m = Matrix::Identity(2, 2);
  } else {
    throw ConfigError(path, "unknown built-in operator '" + name + "'");
  }
  return m;
}

Matrix operator_from(const Json& j, const std::string& path, const std::filesystem::path& base) {
  if (j.is_string()) return builtin_operator(j.get<std::string>(), path);
  if (j.is_object() && j.contains("file")) {
    if (!j["file"].is_string()) throw ConfigError(path + "/file", "expected a string");
    return io::load_matrix(base / j["file"].get<std::string>()).matrix();
  }
  return io::matrix_from_json(j, path).matrix();
}

void check_parse(const std::string& src, const std::string& path) {
  try {
    (void)parse_expr(src);
  } catch (const ParseError& e) {
    throw ConfigError(path, e.what());
  }
}

}  // namespace

ScenarioConfig parse_scenario(const Json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("", "config must be a JSON object");
  ScenarioConfig c;
  c.name = string_at(j, "name", "");
  if (c.name.empty() || c.name.find_first_of("/\\") != std::string::npos) {
    throw ConfigError("/name", "must be a non-empty file-name-safe string");
  }
  if (j.contains("hbar")) c.hbar = number_at(j, "hbar", "");
  if (!(c.hbar > 0.0)) throw ConfigError("/hbar", "must be positive");

  if (j.contains("n")) {
    const long n = integer_at(j, "n", "");
    if (n < 2 || n > 4096) throw ConfigError("/n", "must be an integer in [2, 4096]");
    c.n = static_cast<int>(n);
    c.epsilon = number_at(j, "epsilon", "");
    if (!(c.epsilon > 0.0)) throw ConfigError("/epsilon", "must be positive");
    c.dim = 2 * n;
  }
  if (j.contains("dim")) {
    const long d = integer_at(j, "dim", "");
    if (d < 2) throw ConfigError("/dim", "must be >= 2");
    if (c.n && d != c.dim) throw ConfigError("/dim", "conflicts with 2n");
    c.dim = d;
  }

  if (j.contains("operators")) {
    const auto& ops = j["operators"];
    if (!ops.is_object()) throw ConfigError("/operators", "expected an object");
    for (const auto& [key, value] : ops.items()) {
      const std::string path = "/operators/" + key;
      Matrix m = operator_from(value, path, base_dir);
      if (c.dim == 0) c.dim = m.rows();
      if (m.rows() != c.dim) throw ConfigError(path, "dimension does not match the scenario");
      if (!is_hermitian(m)) throw ConfigError(path, "operator is not Hermitian");
      if (key == "i" || key == "pi" || key == "t" || (c.n && (key == "Q" || key == "P"))) {
        throw ConfigError(path, "name is reserved");
      }
      c.operators.emplace_back(key, std::move(m));
    }
  }
  if (c.dim < 2) throw ConfigError("/dim", "scenario dimension is undetermined (give n or dim)");

  if (j.contains("constants")) {
    const auto& cs = j["constants"];
    if (!cs.is_object()) throw ConfigError("/constants", "expected an object");
    for (const auto& [key, value] : cs.items()) {
      if (!value.is_number()) throw ConfigError("/constants/" + key, "expected a number");
      c.constants.emplace_back(key, value.get<double>());
    }
  }

  c.hamiltonian = string_at(j, "hamiltonian", "");
  check_parse(c.hamiltonian, "/hamiltonian");

  if (!j.contains("initial_state")) throw ConfigError("/initial_state", "missing field");
  const auto& st = j["initial_state"];
  if (!st.is_object()) throw ConfigError("/initial_state", "expected an object");
  const int kinds = static_cast<int>(st.contains("basis_index")) + static_cast<int>(st.contains("amplitudes")) +
                    static_cast<int>(st.contains("density_file")) + static_cast<int>(st.contains("gaussian"));
  if (kinds != 1) {
    throw ConfigError("/initial_state", "give exactly one of basis_index, amplitudes, gaussian, density_file");
  }
  if (st.contains("basis_index")) {
    const long k = integer_at(st, "basis_index", "/initial_state");
    if (k < 0 || k >= c.dim) throw ConfigError("/initial_state/basis_index", "out of range");
    c.basis_index = k;
  } else if (st.contains("amplitudes")) {
    Vector v = io::complex_list_from_json(st["amplitudes"], "/initial_state/amplitudes");
    if (v.size() != c.dim) throw ConfigError("/initial_state/amplitudes", "length does not match dimension");
    if (!(v.norm() > 0.0)) throw ConfigError("/initial_state/amplitudes", "zero vector");
    c.amplitudes = v / v.norm();
  } else if (st.contains("gaussian")) {
    const auto& g = st["gaussian"];
    const std::string path = "/initial_state/gaussian";
    if (!g.is_object()) throw ConfigError(path, "expected an object");
    if (!c.n) throw ConfigError(path, "needs a canonical pair (n, epsilon)");
    const double centre = number_at(g, "center", path);
    const double width = number_at(g, "width", path);
    const double k = g.contains("momentum") ? number_at(g, "momentum", path) : 0.0;
    if (!(width > 0.0)) throw ConfigError(path + "/width", "must be positive");
    Vector v(c.dim);
    for (int j = -*c.n; j < *c.n; ++j) {
      const double x = j * c.epsilon;
      const double envelope = std::exp(-0.5 * ((x - centre) / width) * ((x - centre) / width));
      v(j + *c.n) = std::polar(envelope, k * x / c.hbar);
    }
    if (!(v.norm() > 0.0)) throw ConfigError(path, "packet vanishes on the grid");
    c.amplitudes = v / v.norm();
  } else {
    const std::string file = string_at(st, "density_file", "/initial_state");
    Matrix d;
    try {
      d = io::load_matrix(base_dir / file).matrix();
    } catch (const ConfigError& e) {
      throw ConfigError("/initial_state/density_file", e.what());
    }
    if (d.rows() != c.dim) throw ConfigError("/initial_state/density_file", "dimension does not match");
    if (!validate_density(d).ok()) throw ConfigError("/initial_state/density_file", "not a valid density");
    c.density = d;
  }

  if (!j.contains("grid") || !j["grid"].is_object()) throw ConfigError("/grid", "missing or not an object");
  const auto& g = j["grid"];
  const double tau = number_at(g, "tau", "/grid");
  const long steps = integer_at(g, "steps", "/grid");
  const double t0 = g.contains("t0") ? number_at(g, "t0", "/grid") : 0.0;
  if (!(tau > 0.0)) throw ConfigError("/grid/tau", "must be positive");
  if (steps <= 0 || steps > 10'000'000) throw ConfigError("/grid/steps", "must be a positive integer");
  c.grid = TimeGrid::make(tau, steps, t0);

  if (j.contains("observables")) {
    const auto& obs = j["observables"];
    if (!obs.is_object()) throw ConfigError("/observables", "expected an object");
    for (const auto& [key, value] : obs.items()) {
      const std::string path = "/observables/" + key;
      if (!value.is_string()) throw ConfigError(path, "expected an expression string");
      check_parse(value.get<std::string>(), path);
      c.observables.emplace_back(key, value.get<std::string>());
    }
  }

  if (j.contains("picture")) {
    const std::string p = string_at(j, "picture", "");
    if (p == "heisenberg") {
      c.picture = Picture::Heisenberg;
    } else if (p == "schrodinger") {
      c.picture = Picture::Schrodinger;
    } else {
      throw ConfigError("/picture", "expected \"heisenberg\" or \"schrodinger\"");
    }
  }
  if (j.contains("seed")) {
    const long s = integer_at(j, "seed", "");
    if (s < 0) throw ConfigError("/seed", "must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  if (j.contains("halvings")) {
    const long h = integer_at(j, "halvings", "");
    if (h < 0 || h > 12) throw ConfigError("/halvings", "must be in [0, 12]");
    c.halvings = static_cast<int>(h);
  }
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError(file.string(), "cannot open config file");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(file.string(), e.what());
  }
  return parse_scenario(j, file.parent_path().empty() ? std::filesystem::path(".") : file.parent_path());
}

EvolutionEngine make_engine(const ScenarioConfig& cfg) {
  EvalContext ctx(cfg.dim);
  std::vector<CanonicalPair> pairs;
  if (cfg.n) {
    pairs.push_back(make_canonical_pair(make_position(*cfg.n, cfg.epsilon), cfg.hbar));
    ctx.bind("Q", pairs.back().q.observable());
    ctx.bind("P", pairs.back().p);
  }
  for (const auto& [name, m] : cfg.operators) ctx.bind(name, Observable(m));
  ctx.set("hbar", cfg.hbar);
  for (const auto& [name, v] : cfg.constants) ctx.set(name, v);

  std::optional<Hamiltonian> h;
  try {
    h.emplace(parse_expr(cfg.hamiltonian), ctx);
    (void)h->at(cfg.grid.t0);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("/hamiltonian", e.what());
  }
  for (const auto& [name, src] : cfg.observables) {
    try {
      (void)evaluate(parse_expr(src), ctx.at(cfg.grid.t0));
    } catch (const Error& e) {
      throw ConfigError("/observables/" + name, e.what());
    }
  }
  EvolutionEngine engine(std::move(*h), cfg.grid, cfg.hbar, cfg.picture);
  engine.with_pairs(std::move(pairs));
  return engine;
}

// ---------------------------------------------------------------------------

bool ScenarioResult::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckReport& r) { return r.pass; });
}

std::string ScenarioResult::trace_csv() const {
  std::ostringstream os;
  for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      os << (c ? "," : "");
      if (c == 0) {
        os << static_cast<long>(row[c]);
      } else {
        os << io::csv_number(row[c]);
      }
    }
    os << '\n';
  }
  return os.str();
}

Json ScenarioResult::audit_json() const {
  Json j;
  j["name"] = name;
  j["pass"] = pass();
  Json arr = Json::array();
  for (const auto& c : checks) arr.push_back(c.to_json());
  j["checks"] = std::move(arr);
  return j;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  const EvolutionEngine engine = make_engine(cfg);
  const auto& grid = engine.grid();
  const Index d = engine.dim();
  const EvalContext& ctx = engine.hamiltonian().context();
  const bool time_dependent = engine.hamiltonian().time_dependent();

  std::optional<StateVector> psi0;
  Matrix d0;
  if (cfg.basis_index) {
    psi0 = StateVector::basis(d, *cfg.basis_index);
  } else if (cfg.amplitudes) {
    psi0 = StateVector::normalized(*cfg.amplitudes);
  }
  d0 = psi0 ? pure_density(*psi0).matrix() : DensityObservable(*cfg.density).matrix();

  std::vector<ObservableExpr> exprs;
  for (const auto& [name, src] : cfg.observables) exprs.push_back(parse_expr(src));

  ScenarioResult res;
  res.name = cfg.name;
  res.columns = {"step", "t"};
  for (const auto& [name, src] : cfg.observables) res.columns.push_back(name);
  res.columns.insert(res.columns.end(), {"unitarity", "picture_gap", "trace_defect"});

  Matrix a = Matrix::Identity(d, d);
  const Matrix id = Matrix::Identity(d, d);
  double worst_unitarity = 0.0;
  double worst_gap = 0.0;
  double worst_trace = 0.0;
  double energy0 = 0.0;
  double energy_drift = 0.0;
  const Matrix h0 = engine.hamiltonian().at(grid.t0).matrix();

  for (long m = 0; m <= grid.steps; ++m) {
    const double t = grid.time(m);
    try {
      const Matrix u = minimal_evolution_unitary(engine, t).matrix();
      const Matrix dm = a.adjoint() * d0 * a;
      std::vector<double> row{static_cast<double>(m), t};
      double gap = 0.0;
      for (const auto& e : exprs) {
        const Matrix o = evaluate(e, ctx.at(t)).matrix();
        const double heis = (d0 * (a * o * a.adjoint())).trace().real();
        const double schr = (dm * o).trace().real();
        gap = std::max(gap, std::abs(heis - schr) / (1.0 + std::abs(heis)));
        row.push_back(cfg.picture == Picture::Heisenberg ? heis : schr);
      }
      const double unitarity = spectral_norm(Matrix(u.adjoint() * u - id));
      const double trace_defect = std::abs(dm.trace() - Complex(1.0));
      row.insert(row.end(), {unitarity, gap, trace_defect});
      res.rows.push_back(std::move(row));
      worst_unitarity = std::max(worst_unitarity, unitarity);
      worst_gap = std::max(worst_gap, gap);
      worst_trace = std::max(worst_trace, trace_defect);
      if (!time_dependent) {
        const double e = (dm * h0).trace().real();
        if (m == 0) energy0 = e;
        energy_drift = std::max(energy_drift, std::abs(e - energy0));
      }
      a = a * u;
    } catch (const Error& e) {
      throw RuntimeFailure(m, e.what());
    }
  }

  auto& checks = res.checks;
  {
    CheckReport r("unitarity");
    r.add("max_unitarity_defect", worst_unitarity);
    r.require(worst_unitarity <= tol::recon);
    checks.push_back(r);
  }
  {
    CheckReport r("picture_equivalence");
    r.add("max_relative_gap", worst_gap);
    r.require(worst_gap <= 1e-10);
    checks.push_back(r);
  }
  {
    CheckReport r("density_trace");
    r.add("max_trace_defect", worst_trace);
    const auto v = validate_density(a.adjoint() * d0 * a);
    r.add("final_min_eigenvalue", v.min_eigenvalue);
    r.primary = worst_trace;
    r.require(worst_trace <= 1e-10 && v.min_eigenvalue >= -tol::density_positivity);
    checks.push_back(r);
  }
  if (!time_dependent) {
    CheckReport r("energy_conservation");
    r.add("energy", energy0).add("drift", energy_drift);
    r.primary = energy_drift;
    r.require(energy_drift <= 1e-10 * std::max(1.0, std::abs(energy0)));
    checks.push_back(r);
  }

  if (cfg.halvings > 0) {
    if (!exprs.empty()) {
      checks.push_back(halving_study(engine, EquationKind::Heisenberg, exprs.front(),
                                     StateVector::basis(d, 0), cfg.halvings, grid.t0)
                           .report());
    }
    if (psi0) {
      checks.push_back(halving_study(engine, EquationKind::Schrodinger, ObservableExpr(), *psi0,
                                     cfg.halvings, grid.t0)
                           .report());
      checks.push_back(halving_study(engine, EquationKind::VonNeumann, ObservableExpr(), *psi0,
                                     cfg.halvings, grid.t0)
                           .report());
    } else {
      checks.push_back(von_neumann_halving(engine, DensityObservable(d0), cfg.halvings, grid.t0).report());
    }
  }

  auto rng = rnd::stream(cfg.seed, 0x5c, static_cast<std::uint64_t>(d));
  const Observable probe(rnd::hermitian(d, rng));
  checks.push_back(reversal_round_trip_check(engine, probe, std::min<long>(100, grid.steps)));

  if (!time_dependent) {
    const double k_even = spectral_norm(Matrix(h0.conjugate() - h0)) / std::max(1.0, spectral_norm(h0));
    if (k_even <= 1e-12) {
      checks.push_back(reversal_agreement_check(engine, probe, grid.t0));
    } else {
      CheckReport r("reversal_agreement");
      r.add("k_even_defect", k_even);
      r.note("skipped: H is not invariant under time reversal, so the two realizations do not apply");
      r.primary = 0.0;
      checks.push_back(r);
    }
    checks.push_back(symmetry_check(engine, engine.hamiltonian().at(grid.t0)));
    if (!exprs.empty() && !depends_on_time(exprs.front())) {
      const PseudoObservable o = evaluate(exprs.front(), ctx);
      if (is_hermitian(o.matrix())) {
        checks.push_back(spectrum_constancy_check(engine, Observable(0.5 * (o.matrix() + o.matrix().adjoint()))));
      }
    }
  }
  return res;
}

}  // namespace pobs
