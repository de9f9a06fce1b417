#include "pobs/audit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "pobs/canonical.hpp"
#include "pobs/errors.hpp"
#include "pobs/evolution.hpp"
#include "pobs/parallel.hpp"
#include "pobs/random.hpp"
#include "pobs/states.hpp"
#include "pobs/transforms.hpp"

namespace pobs {

namespace {

enum class Suite : std::uint64_t {
  Automorphism = 1,
  Generatrix,
  Invariance,
  Spectrum,
  TraceInner,
  Duality,
  Purity,
  Canonical,
  Reversal,
  Planted,
};

const char* suite_name(Suite s) {
  switch (s) {
    case Suite::Automorphism:
      return "automorphism";
    case Suite::Generatrix:
      return "generatrix_round_trip";
    case Suite::Invariance:
      return "invariance_biconditional";
    case Suite::Spectrum:
      return "spectrum_preservation";
    case Suite::TraceInner:
      return "trace_inner_product_invariance";
    case Suite::Duality:
      return "picture_duality";
    case Suite::Purity:
      return "purity_diagram";
    case Suite::Canonical:
      return "canonical_pair";
    case Suite::Reversal:
      return "reversal_round_trip";
    case Suite::Planted:
      return "planted_failure";
  }
  return "unknown";
}

struct Task {
  Suite suite;
  int dim;
  int trial;
};

Transformation random_transformation(Index d, rnd::Rng& rng) {
  return Transformation::from_unitary(PseudoObservable(rnd::unitary(d, rng)));
}

CheckReport merge(const std::string& name, const std::vector<CheckReport>& parts) {
  CheckReport r(name);
  double worst = 0.0;
  for (const auto& p : parts) {
    for (const auto& [k, v] : p.residuals) r.add(p.name + "." + k, v);
    r.require(p.pass);
    const double h = std::isnan(p.primary) ? p.headline() : p.primary;
    if (std::isfinite(h)) worst = std::max(worst, std::abs(h));
  }
  r.primary = worst;
  return r;
}

CheckReport run_task(const Task& task, std::uint64_t seed) {
  const Index d = task.dim;
  auto rng = rnd::stream(seed, static_cast<std::uint64_t>(task.dim), static_cast<std::uint64_t>(task.suite),
                         static_cast<std::uint64_t>(task.trial));
  switch (task.suite) {
    case Suite::Automorphism: {
      const auto t = random_transformation(d, rng);
      const PseudoObservable a(rnd::complex_matrix(d, rng));
      const PseudoObservable b(rnd::complex_matrix(d, rng));
      return automorphism_check(t, a, b, rnd::gaussian_complex(rng));
    }
    case Suite::Generatrix: {
      const Observable g(rnd::generatrix(d, rng));
      const auto t = Transformation::from_unitary(unitary_exponential(g));
      CheckReport r("generatrix_round_trip");
      const double dev = spectral_norm(Matrix(t.generatrix().matrix() - g.matrix()));
      r.add("generatrix_error", dev).add("unit_circle", t.unit_circle_residual());
      r.primary = dev;
      r.require(dev <= 1e-9);
      return r;
    }
    case Suite::Invariance: {
      const auto t = Transformation::from_generatrix(Observable(rnd::generatrix(d, rng)));
      Observable a = Observable::zero(d);
      if (task.trial % 2 == 0) {
        const double c1 = rnd::uniform(rng, -2.0, 2.0);
        const double c2 = rnd::uniform(rng, -2.0, 2.0);
        a = apply_function([c1, c2](double x) { return c1 * x + c2 * std::cos(x) + x * x; }, t.generatrix());
      } else {
        a = Observable(rnd::hermitian(d, rng));
      }
      return invariance_characterization(t, a, 1e-9);
    }
    case Suite::Spectrum: {
      std::vector<double> spec(static_cast<std::size_t>(d));
      for (auto& x : spec) x = rnd::uniform(rng, -3.0, 3.0);
      spec[1] = spec[0];
      const Observable a(rnd::hermitian_with_spectrum(spec, rng));
      return spectrum_preservation_check(random_transformation(d, rng), a);
    }
    case Suite::TraceInner: {
      const auto t = random_transformation(d, rng);
      const PseudoObservable x(rnd::complex_matrix(d, rng));
      const PseudoObservable y(rnd::complex_matrix(d, rng));
      return merge("trace_inner_product", {trace_invariance_check(t, x), inner_product_invariance_check(t, x, y)});
    }
    case Suite::Duality: {
      const auto t = random_transformation(d, rng);
      const DensityObservable dens(rnd::density(d, rng));
      const PseudoObservable p(rnd::complex_matrix(d, rng));
      return duality_check(t, dens, p);
    }
    case Suite::Purity: {
      const auto t = random_transformation(d, rng);
      return purity_diagram_check(t, StateVector(rnd::state(d, rng)));
    }
    case Suite::Canonical: {
      const int n = task.dim / 2;
      const double eps = rnd::uniform(rng, 0.2, 1.5);
      const double hbar = rnd::uniform(rng, 0.5, 2.0);
      const auto pair = make_canonical_pair(make_position(n, eps), hbar);
      const long s = std::uniform_int_distribution<long>(-4L * n, 4L * n)(rng);
      return merge("canonical_pair", {shift_cyclicity_check(pair), weyl_residual(pair).report(),
                                      conjugation_parity_check(pair), translation_label_check(pair, s)});
    }
    case Suite::Reversal: {
      const Observable h(rnd::hermitian(d, rng));
      const EvolutionEngine engine(Hamiltonian::constant(h), TimeGrid::make(0.05, 100));
      return reversal_round_trip_check(engine, Observable(rnd::hermitian(d, rng)), 100);
    }
    case Suite::Planted: {
      // Negative control: multiplicativity tested across two different
      // transformations, which no automorphism satisfies.
      const auto t1 = random_transformation(d, rng);
      const auto t2 = random_transformation(d, rng);
      const PseudoObservable a(rnd::complex_matrix(d, rng));
      const PseudoObservable b(rnd::complex_matrix(d, rng));
      const Matrix lhs = apply(t1, a * b).matrix();
      const Matrix rhs = apply(t1, a).matrix() * apply(t2, b).matrix();
      const double dev = spectral_norm(Matrix(lhs - rhs)) / std::max(1.0, spectral_norm(lhs));
      CheckReport r("planted_failure");
      r.add("multiplicativity", dev);
      r.require(dev <= 1e-10);
      return r;
    }
  }
  throw InvalidArgument("audit: unknown suite");
}

}  // namespace

bool AuditReport::pass() const {
  return std::all_of(suites.begin(), suites.end(), [](const CheckReport& r) { return r.pass; });
}

nlohmann::ordered_json AuditReport::to_json() const {
  nlohmann::ordered_json j;
  j["seed"] = options.seed;
  j["dims"] = options.dims;
  j["pass"] = pass();
  auto arr = nlohmann::ordered_json::array();
  for (const auto& s : suites) arr.push_back(s.to_json());
  j["checks"] = std::move(arr);
  return j;
}

AuditReport run_audit(const AuditOptions& options) {
  if (options.dims.empty()) throw InvalidArgument("audit: no dimensions given");
  for (int d : options.dims) {
    if (d < 2) throw InvalidArgument("audit: every dimension must be >= 2");
  }
  if (options.trials < 1 || options.light_trials < 1 || options.reversal_trials < 1) {
    throw InvalidArgument("audit: trial counts must be positive");
  }

  std::vector<std::pair<Suite, int>> plan{{Suite::Automorphism, options.trials},
                                          {Suite::Generatrix, options.light_trials},
                                          {Suite::Invariance, options.trials},
                                          {Suite::Spectrum, options.light_trials},
                                          {Suite::TraceInner, options.light_trials},
                                          {Suite::Duality, options.trials},
                                          {Suite::Purity, options.light_trials},
                                          {Suite::Canonical, 1},
                                          {Suite::Reversal, options.reversal_trials}};
  if (options.plant_failure) plan.emplace_back(Suite::Planted, 1);

  std::vector<Task> tasks;
  std::vector<std::pair<std::size_t, std::size_t>> groups;  // [begin, end) per (dim, suite)
  std::vector<std::string> names;
  for (int d : options.dims) {
    for (const auto& [suite, count] : plan) {
      if (suite == Suite::Canonical && d % 2 != 0) continue;
      const std::size_t begin = tasks.size();
      for (int k = 0; k < count; ++k) tasks.push_back(Task{suite, d, k});
      groups.emplace_back(begin, tasks.size());
      names.push_back(std::string(suite_name(suite)) + "/d=" + std::to_string(d));
    }
  }

  auto fn = [&](std::size_t i) { return run_task(tasks[i], options.seed); };
  const auto results = options.parallel ? par::map_indexed(tasks.size(), fn) : par::map_indexed_serial(tasks.size(), fn);

  AuditReport report;
  report.options = options;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    CheckReport r(names[g]);
    double worst = 0.0;
    int failures = 0;
    for (std::size_t i = groups[g].first; i < groups[g].second; ++i) {
      const auto& c = results[i];
      if (!c.pass) ++failures;
      const double h = std::isnan(c.primary) ? c.headline() : c.primary;
      if (std::isfinite(h)) worst = std::max(worst, std::abs(h));
    }
    r.add("trials", static_cast<double>(groups[g].second - groups[g].first));
    r.add("failures", failures);
    r.add("worst", worst);
    r.primary = worst;
    r.require(failures == 0);
    report.suites.push_back(std::move(r));
  }
  return report;
}

}  // namespace pobs
