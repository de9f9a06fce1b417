// pobs: scenario runner, invariant auditor and convergence sweeps.
//
//   pobs run <config> [--out dir]
//   pobs audit [--dims 4,8,16] [--seed k] [--plant-failure] [--out file]
//   pobs sweep weyl|convergence [--n-list 8,16,32,64] [--out file]
//
// POBS_OUT_DIR sets the default output directory. Exit codes: 0 all checks
// pass, 1 a check failed, 2 invalid arguments or config, 3 runtime failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pobs/audit.hpp"
#include "pobs/errors.hpp"
#include "pobs/scenario.hpp"
#include "pobs/sweep.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kInvalid = 2;
constexpr int kRuntime = 3;

std::optional<fs::path> env_out_dir() {
  const char* v = std::getenv("POBS_OUT_DIR");
  if (v == nullptr || *v == '\0') return std::nullopt;
  return fs::path(v);
}

void write_file(const fs::path& file, const std::string& content) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw pobs::Error("cannot write " + file.string());
  out << content;
  if (!out) throw pobs::Error("write failed for " + file.string());
}

// Writes to `out` if given, else into POBS_OUT_DIR/default_name, else stdout.
void emit(const std::string& content, const std::string& out, const std::string& default_name) {
  if (!out.empty()) {
    write_file(out, content);
  } else if (auto dir = env_out_dir()) {
    write_file(*dir / default_name, content);
  } else {
    std::cout << content;
  }
}

int cmd_run(const std::string& config, const std::string& out_dir) {
  const auto cfg = pobs::load_scenario(config);
  const auto result = pobs::run_scenario(cfg);
  fs::path dir = out_dir.empty() ? env_out_dir().value_or(fs::path(".")) : fs::path(out_dir);
  write_file(dir / (cfg.name + "_trace.csv"), result.trace_csv());
  write_file(dir / (cfg.name + "_audit.json"), result.audit_json().dump(2) + "\n");
  for (const auto& c : result.checks) {
    if (!c.pass) std::cerr << "check failed: " << c.name << '\n';
  }
  std::cout << cfg.name << ": " << (result.pass() ? "pass" : "FAIL") << " (" << result.checks.size()
            << " checks, " << result.rows.size() << " trace rows) -> " << dir.string() << '\n';
  return result.pass() ? kOk : kCheckFailed;
}

int cmd_audit(const pobs::AuditOptions& opts, const std::string& out) {
  const auto report = pobs::run_audit(opts);
  emit(report.to_json().dump(2) + "\n", out, "audit_seed" + std::to_string(opts.seed) + ".json");
  for (const auto& s : report.suites) {
    if (!s.pass) std::cerr << "check failed: " << s.name << '\n';
  }
  return report.pass() ? kOk : kCheckFailed;
}

int cmd_sweep(const std::string& kind, const std::vector<int>& n_list, int halvings, const std::string& out) {
  if (kind == "weyl") {
    emit(pobs::weyl_sweep_csv(pobs::commutator_limit_probe(n_list)), out, "sweep_weyl.csv");
  } else {
    emit(pobs::convergence_sweep_csv(pobs::convergence_sweep(n_list, halvings)), out, "sweep_convergence.csv");
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pseudo-observable algebra engine"};
  app.require_subcommand(1);

  std::string config;
  std::string run_out;
  auto* run = app.add_subcommand("run", "run a scenario config, write trace CSV and audit JSON");
  run->add_option("config", config, "scenario config (JSON)")->required();
  run->add_option("--out", run_out, "output directory");

  pobs::AuditOptions audit_opts;
  std::string audit_out;
  auto* audit = app.add_subcommand("audit", "randomized invariant audit");
  audit->add_option("--dims", audit_opts.dims, "dimensions")->delimiter(',');
  audit->add_option("--seed", audit_opts.seed, "generator seed");
  audit->add_option("--trials", audit_opts.trials, "trials for the heavy suites")->check(CLI::PositiveNumber);
  audit->add_flag("--plant-failure", audit_opts.plant_failure, "add a check that must fail");
  audit->add_option("--out", audit_out, "output file");

  std::string sweep_kind;
  std::vector<int> n_list{8, 16, 32, 64};
  int halvings = 3;
  std::string sweep_out;
  auto* sweep = app.add_subcommand("sweep", "convergence sweep tables");
  sweep->add_option("kind", sweep_kind, "weyl | convergence")
      ->required()
      ->check(CLI::IsMember({"weyl", "convergence"}));
  sweep->add_option("--n-list", n_list, "half level counts")->delimiter(',');
  sweep->add_option("--halvings", halvings, "tau halvings (convergence)")->check(CLI::Range(1, 12));
  sweep->add_option("--out", sweep_out, "output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*run) return cmd_run(config, run_out);
    if (*audit) return cmd_audit(audit_opts, audit_out);
    return cmd_sweep(sweep_kind, n_list, halvings, sweep_out);
  } catch (const pobs::ConfigError& e) {
    std::cerr << "config error at " << (e.path().empty() ? "/" : e.path()) << ": " << e.what() << '\n';
    return kInvalid;
  } catch (const pobs::InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kInvalid;
  } catch (const pobs::RuntimeFailure& e) {
    std::cerr << "runtime failure at " << e.what() << '\n';
    return kRuntime;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return kRuntime;
  }
}
