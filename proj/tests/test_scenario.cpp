#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "oracles.hpp"
#include "pobs/errors.hpp"
#include "pobs/scenario.hpp"

using namespace pobs;
namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

const fs::path kSource = POBS_SOURCE_DIR;
const std::string kCli = POBS_CLI_PATH;

fs::path scratch(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("pobs_test_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" + kCli + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Json minimal() {
  return Json::parse(R"({
    "name": "tiny",
    "dim": 2,
    "operators": {"sx": "pauli_x", "sz": "pauli_z"},
    "hamiltonian": "sx",
    "initial_state": {"basis_index": 0},
    "grid": {"tau": 0.01, "steps": 10},
    "observables": {"z": "sz"}
  })");
}

std::string config_error_path(const Json& j) {
  try {
    parse_scenario(j);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<accepted>";
}

// Max deviation of `got` from `want` over the named columns.
double column_gap(const oracle::Csv& got, const oracle::Csv& want, const std::vector<std::string>& cols) {
  double worst = 0.0;
  for (const auto& c : cols) {
    const auto a = got.values(c), b = want.values(c);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
  }
  return worst;
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("minimal config parses") {
  const auto c = parse_scenario(minimal());
  CHECK(c.name == "tiny");
  CHECK(c.dim == 2);
  CHECK(c.picture == Picture::Heisenberg);
  CHECK(c.halvings == 3);
  CHECK(c.observables.size() == 1);
  CHECK(c.basis_index.value_or(-1) == 0);
}

TEST_CASE("config errors name the offending field") {
  auto with = [](auto edit) {
    Json j = minimal();
    edit(j);
    return config_error_path(j);
  };
  CHECK(with([](Json& j) { j.erase("name"); }) == "/name");
  CHECK(with([](Json& j) { j["name"] = "a/b"; }) == "/name");
  CHECK(with([](Json& j) { j.erase("hamiltonian"); }) == "/hamiltonian");
  CHECK(with([](Json& j) { j["hamiltonian"] = "sx +"; }) == "/hamiltonian");
  CHECK(with([](Json& j) { j["grid"]["tau"] = 0.0; }) == "/grid/tau");
  CHECK(with([](Json& j) { j["grid"]["steps"] = -1; }) == "/grid/steps");
  CHECK(with([](Json& j) { j["grid"]["steps"] = 1.5; }) == "/grid/steps");
  CHECK(with([](Json& j) { j["operators"]["sy"] = "pauli_w"; }) == "/operators/sy");
  CHECK(with([](Json& j) { j["operators"]["m"] = Json::parse("[[[0,0],[1,0]],[[0,0],[0,0]]]"); }) == "/operators/m");
  CHECK(with([](Json& j) { j["operators"]["t"] = "pauli_x"; }) == "/operators/t");
  CHECK(with([](Json& j) { j["picture"] = "interaction"; }) == "/picture");
  CHECK(with([](Json& j) { j["initial_state"]["amplitudes"] = Json::parse("[[1,0],[0,0]]"); }) == "/initial_state");
  CHECK(with([](Json& j) { j["initial_state"] = Json::object(); }) == "/initial_state");
  CHECK(with([](Json& j) { j["initial_state"]["basis_index"] = 2; }) == "/initial_state/basis_index");
  CHECK(with([](Json& j) {
          j["initial_state"] = Json::parse(R"({"gaussian": {"center": 0, "width": 1}})");
        }) == "/initial_state/gaussian");
  CHECK(with([](Json& j) { j["hbar"] = -1.0; }) == "/hbar");
  CHECK(with([](Json& j) { j["halvings"] = 13; }) == "/halvings");
  CHECK(with([](Json& j) { j["observables"]["bad"] = "(("; }) == "/observables/bad");
  CHECK(with([](Json& j) {
          j.erase("dim");
          j.erase("operators");
          j["hamiltonian"] = "1";
          j.erase("observables");
        }) == "/dim");
  CHECK(config_error_path(Json::array()) == "");
  CHECK_THROWS_AS(load_scenario(kSource / "scenarios" / "does_not_exist.json"), ConfigError);
}

TEST_CASE("all shipped scenarios pass") {
  for (const char* name : {"rabi", "oscillator", "free_particle", "temporal_abscissa"}) {
    const auto cfg = load_scenario(kSource / "scenarios" / (std::string(name) + ".json"));
    const auto r = run_scenario(cfg);
    CHECK_MESSAGE(r.pass(), name);
    for (const auto& c : r.checks) CHECK_MESSAGE(c.pass, name << ": " << c.name);
  }
}

TEST_CASE("traces match the independent fixtures") {
  const std::vector<std::pair<std::string, std::vector<std::string>>> cases{
      {"rabi", {"sz", "sy"}},
      {"oscillator", {"position", "momentum", "energy"}},
      {"free_particle", {}},
      {"temporal_abscissa", {"time"}}};
  for (const auto& [name, cols_in] : cases) {
    const auto want = oracle::parse_csv(oracle::slurp(kSource / "scenarios" / "expected" / (name + ".csv")));
    const auto got = oracle::parse_csv(run_scenario(load_scenario(kSource / "scenarios" / (name + ".json"))).trace_csv());
    std::vector<std::string> cols = cols_in;
    if (cols.empty()) cols.assign(want.header.begin() + 2, want.header.end());
    CHECK(got.rows.size() == want.rows.size());
    CHECK_MESSAGE(column_gap(got, want, cols) < 1e-9, name);
    CHECK(column_gap(got, want, {"t"}) < 1e-12);
  }
}

TEST_CASE("Rabi trace tracks the closed form") {
  const auto got = oracle::parse_csv(run_scenario(load_scenario(kSource / "scenarios" / "rabi.json")).trace_csv());
  const auto t = got.values("t"), z = got.values("sz"), y = got.values("sy");
  double worst = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    worst = std::max(worst, std::abs(z[k] - oracle::rabi_sz(1.0, t[k])));
    worst = std::max(worst, std::abs(y[k] - oracle::rabi_sy(1.0, t[k])));
  }
  CHECK(worst < 1e-3);
  CHECK(t.back() == doctest::Approx(2 * M_PI).epsilon(1e-12));
}

TEST_CASE("oscillator energy is conserved along the trace") {
  const auto got = oracle::parse_csv(run_scenario(load_scenario(kSource / "scenarios" / "oscillator.json")).trace_csv());
  const auto e = got.values("energy");
  for (double v : e) CHECK(std::abs(v - e.front()) < 1e-10);
}

TEST_CASE("trivial Hamiltonian gives a constant trace") {
  Json j = minimal();
  j["hamiltonian"] = "0";
  j["observables"]["x"] = "sx";
  const auto r = run_scenario(parse_scenario(j));
  CHECK(r.pass());
  const auto csv = oracle::parse_csv(r.trace_csv());
  for (double v : csv.values("z")) CHECK(v == 1.0);
  for (double v : csv.values("x")) CHECK(v == 0.0);
}

TEST_CASE("evaluation failure during stepping names the step") {
  Json j = minimal();
  j["hamiltonian"] = "sx/(t - 0.05)";
  try {
    run_scenario(parse_scenario(j));
    FAIL("no failure");
  } catch (const RuntimeFailure& e) {
    CHECK(e.step() == 5);
  }
}

TEST_CASE("trace CSV layout") {
  const auto r = run_scenario(parse_scenario(minimal()));
  const std::string csv = r.trace_csv();
  CHECK(csv.rfind("step,t,z,", 0) == 0);
  const auto parsed = oracle::parse_csv(csv);
  CHECK(parsed.rows.size() == 11);
  CHECK(csv.find("1.0000000000000000e-02") != std::string::npos);
  const auto audit = r.audit_json();
  CHECK(audit["name"] == "tiny");
  CHECK(audit["pass"] == true);
  CHECK(audit["checks"].size() == r.checks.size());
}

}  // TEST_SUITE

TEST_SUITE("cli") {

TEST_CASE("argument and config errors exit with 2") {
  const auto dir = scratch("args");
  CHECK(run("") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("run") == 2);
  CHECK(run("run \"" + (dir / "missing.json").string() + "\"") == 2);
  CHECK(run("sweep sideways") == 2);
  CHECK(run("audit --trials 0") == 2);
  CHECK(run("audit --dims 1") == 2);

  std::ofstream(dir / "bad.json") << R"({"name": "bad", "dim": 2, "hamiltonian": "x +"})";
  CHECK(run("run \"" + (dir / "bad.json").string() + "\" --out \"" + dir.string() + "\"") == 2);
  std::ofstream(dir / "garbage.json") << "{ not json";
  CHECK(run("run \"" + (dir / "garbage.json").string() + "\"") == 2);
  fs::remove_all(dir);
}

TEST_CASE("runtime failure exits with 3") {
  const auto dir = scratch("rt");
  Json j = minimal();
  j["hamiltonian"] = "sx/(t - 0.05)";
  std::ofstream(dir / "rt.json") << j.dump();
  CHECK(run("run \"" + (dir / "rt.json").string() + "\" --out \"" + dir.string() + "\"") == 3);
  fs::remove_all(dir);
}

TEST_CASE("run writes byte-identical outputs on repeat") {
  const auto a = scratch("rep_a"), b = scratch("rep_b");
  const std::string cfg = (kSource / "scenarios" / "oscillator.json").string();
  REQUIRE(run("run \"" + cfg + "\" --out \"" + a.string() + "\"") == 0);
  REQUIRE(run("run \"" + cfg + "\" --out \"" + b.string() + "\"") == 0);
  for (const char* f : {"oscillator_trace.csv", "oscillator_audit.json"}) {
    const auto x = oracle::slurp(a / f), y = oracle::slurp(b / f);
    CHECK(!x.empty());
    CHECK_MESSAGE(x == y, f);
  }
  const auto audit = Json::parse(oracle::slurp(a / "oscillator_audit.json"));
  CHECK(audit["pass"] == true);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("POBS_OUT_DIR sets the default output directory") {
  const auto dir = scratch("env");
  const std::string cfg = (kSource / "scenarios" / "rabi.json").string();
  CHECK(run("run \"" + cfg + "\"", "POBS_OUT_DIR=\"" + dir.string() + "\"") == 0);
  CHECK(fs::exists(dir / "rabi_trace.csv"));
  CHECK(fs::exists(dir / "rabi_audit.json"));
  CHECK(run("audit --dims 4 --trials 5 --seed 3", "POBS_OUT_DIR=\"" + dir.string() + "\"") == 0);
  CHECK(fs::exists(dir / "audit_seed3.json"));
  fs::remove_all(dir);
}

TEST_CASE("audit passes, is deterministic, and flags a planted failure") {
  const auto dir = scratch("audit");
  const std::string base = "audit --dims 4 8 --trials 10 --seed 17 --out ";
  CHECK(run(base + "\"" + (dir / "a.json").string() + "\"") == 0);
  CHECK(run(base + "\"" + (dir / "b.json").string() + "\"") == 0);
  CHECK(oracle::slurp(dir / "a.json") == oracle::slurp(dir / "b.json"));
  const auto j = Json::parse(oracle::slurp(dir / "a.json"));
  CHECK(j["pass"] == true);
  CHECK(j["seed"] == 17);

  CHECK(run(base + "\"" + (dir / "p.json").string() + "\" --plant-failure") == 1);
  const auto p = Json::parse(oracle::slurp(dir / "p.json"));
  CHECK(p["pass"] == false);
  int failing = 0;
  for (const auto& c : p["checks"]) failing += c["pass"] == false;
  CHECK(failing >= 1);
  fs::remove_all(dir);
}

TEST_CASE("sweep tables") {
  const auto dir = scratch("sweep");
  REQUIRE(run("sweep weyl --n-list 4 8 16 --out \"" + (dir / "w.csv").string() + "\"") == 0);
  const auto w = oracle::parse_csv(oracle::slurp(dir / "w.csv"));
  CHECK(w.header == std::vector<std::string>{"n", "epsilon", "trace_residual", "interior_max_dev", "edge_defect_weight"});
  CHECK(w.rows.size() == 3);
  const auto dev = w.values("interior_max_dev");
  CHECK(dev[2] < dev[0]);
  for (double v : w.values("trace_residual")) CHECK(v < 1e-12);

  REQUIRE(run("sweep weyl --n-list 8 --out \"" + (dir / "one.csv").string() + "\"") == 0);
  CHECK(oracle::parse_csv(oracle::slurp(dir / "one.csv")).rows.size() == 1);

  REQUIRE(run("sweep convergence --n-list 4 8 --halvings 2 --out \"" + (dir / "c.csv").string() + "\"") == 0);
  // The equation column is text; count data lines instead of parsing.
  const std::string c = oracle::slurp(dir / "c.csv");
  CHECK(c.rfind("n,epsilon,equation,tau,residual,ratio\n", 0) == 0);
  CHECK(std::count(c.begin(), c.end(), '\n') == 1 + 2 * 3 * 3);
  CHECK(run("sweep convergence --halvings 0") == 2);
  fs::remove_all(dir);
}

}  // TEST_SUITE
