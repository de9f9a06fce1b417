#include "pobs/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pobs/errors.hpp"
#include "pobs/random.hpp"

namespace pobs {

namespace {

Matrix hermitized(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

double relative(double value, double scale) { return value / std::max(1.0, scale); }

}  // namespace

TimeGrid TimeGrid::make(double tau, long steps, double t0) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidArgument("time grid: tau must be positive");
  if (steps <= 0) throw InvalidArgument("time grid: steps must be positive");
  if (!std::isfinite(t0)) throw InvalidArgument("time grid: t0 must be finite");
  return TimeGrid{tau, steps, t0};
}

// ---------------------------------------------------------------------------

Hamiltonian::Hamiltonian(ObservableExpr expr, EvalContext ctx)
    : expr_(std::move(expr)), ctx_(std::move(ctx)), time_dependent_(depends_on_time(expr_)) {
  if (!time_dependent_) {
    ctx_.time.reset();
    cached_ = std::make_shared<const Observable>(at(0.0));
  }
}

Hamiltonian Hamiltonian::constant(const Observable& h) {
  EvalContext ctx(h.dim());
  ctx.bind("H", h);
  return Hamiltonian(ex::id("H"), std::move(ctx));
}

Observable Hamiltonian::at(double t) const {
  if (cached_) return *cached_;
  const Matrix m = evaluate(expr_, time_dependent_ ? ctx_.at(t) : ctx_).matrix();
  const double defect = hermiticity_defect(m);
  if (defect > tol::herm) {
    std::ostringstream os;
    os << "Hamiltonian evaluated at t = " << t << " is not Hermitian (relative defect " << defect << ")";
    throw NotHermitian(os.str());
  }
  return Observable(hermitized(m), std::string("energy"));
}

// ---------------------------------------------------------------------------

EvolutionEngine::EvolutionEngine(Hamiltonian h, TimeGrid grid, double hbar, Picture picture)
    : h_(std::move(h)), grid_(grid), hbar_(hbar), picture_(picture) {
  if (!(hbar_ > 0.0) || !std::isfinite(hbar_)) throw InvalidArgument("evolution: hbar must be positive");
  grid_ = TimeGrid::make(grid.tau, grid.steps, grid.t0);
  if (!h_.time_dependent()) {
    const Observable g((grid_.tau / hbar_) * h_.at(grid_.t0).matrix());
    cached_u_ = std::make_shared<const PseudoObservable>(unitary_exponential(g));
  }
}

EvolutionEngine EvolutionEngine::with_tau(double tau) const {
  EvolutionEngine e(h_, TimeGrid::make(tau, grid_.steps, grid_.t0), hbar_, picture_);
  e.pairs_ = pairs_;
  return e;
}

double EvolutionEngine::step_phase(double t) const { return grid_.tau * spectral_norm(h_.at(t)) / hbar_; }

EvolutionEngine& EvolutionEngine::with_pairs(std::vector<CanonicalPair> pairs) {
  pairs_ = std::move(pairs);
  return *this;
}

PseudoObservable minimal_evolution_unitary(const EvolutionEngine& engine, double t) {
  if (engine.cached_u_) return *engine.cached_u_;
  const Observable g((engine.tau() / engine.hbar()) * engine.hamiltonian().at(t).matrix());
  return unitary_exponential(g);
}

PseudoObservable heisenberg_step(const EvolutionEngine& engine, const PseudoObservable& o, double t) {
  require_same_dim(engine.dim(), o.dim(), "heisenberg_step");
  const Matrix u = minimal_evolution_unitary(engine, t).matrix();
  return PseudoObservable(u * o.matrix() * u.adjoint(), o.unit_tag());
}

Observable heisenberg_step(const EvolutionEngine& engine, const Observable& o, double t) {
  const auto p = heisenberg_step(engine, static_cast<const PseudoObservable&>(o), t);
  return Observable(hermitized(p.matrix()), p.unit_tag());
}

PseudoObservable heisenberg_step_explicit(const EvolutionEngine& engine, const ObservableExpr& o,
                                          double t) {
  const PseudoObservable moved = evaluate(o, engine.hamiltonian().context().at(t + engine.tau()));
  return heisenberg_step(engine, moved, t);
}

Observable reverse_step(const EvolutionEngine& engine, const Observable& o, double t) {
  require_same_dim(engine.dim(), o.dim(), "reverse_step");
  const Matrix u = minimal_evolution_unitary(engine, t - engine.tau()).matrix();
  return Observable(hermitized(u.adjoint() * o.matrix() * u), o.unit_tag());
}

StateVector schrodinger_step(const EvolutionEngine& engine, const StateVector& psi, double t) {
  require_same_dim(engine.dim(), psi.dim(), "schrodinger_step");
  const Matrix u = minimal_evolution_unitary(engine, t).matrix();
  return StateVector(u.adjoint() * psi.amplitudes());
}

StateVector schrodinger_step(const EvolutionEngine& engine, const Vector& psi, double t) {
  const double dev = std::abs(psi.norm() - 1.0);
  if (!(dev <= tol::step_input_norm)) {
    std::ostringstream os;
    os << "schrodinger_step: input is not normalized (| ||psi|| - 1 | = " << dev << ")";
    throw InvalidState(os.str());
  }
  return schrodinger_step(engine, StateVector::normalized(psi), t);
}

DensityObservable von_neumann_step(const EvolutionEngine& engine, const DensityObservable& d, double t) {
  require_same_dim(engine.dim(), d.dim(), "von_neumann_step");
  const Matrix u = minimal_evolution_unitary(engine, t).matrix();
  return DensityObservable(u.adjoint() * d.matrix() * u);
}

Matrix propagator(const EvolutionEngine& engine, long m) {
  Matrix a = Matrix::Identity(engine.dim(), engine.dim());
  for (long k = 0; k < m; ++k) a = a * minimal_evolution_unitary(engine, engine.grid().time(k)).matrix();
  return a;
}

// ---------------------------------------------------------------------------
// Equation residuals

double heisenberg_equation_residual(const EvolutionEngine& engine, const ObservableExpr& o, double t) {
  const EvalContext ctx = engine.hamiltonian().context().at(t);
  const Matrix now = evaluate(o, ctx).matrix();
  const Matrix next = heisenberg_step_explicit(engine, o, t).matrix();
  const Matrix h = engine.hamiltonian().at(t).matrix();
  const Matrix dodt = explicit_time_derivative(o, ctx, engine.tau() / 64.0).matrix();
  const Matrix r = (next - now) / engine.tau() - (now * h - h * now) / (kI * engine.hbar()) - dodt;
  return spectral_norm(r);
}

double schrodinger_equation_residual(const EvolutionEngine& engine, const StateVector& psi, double t) {
  const Vector next = schrodinger_step(engine, psi, t).amplitudes();
  const Matrix h = engine.hamiltonian().at(t).matrix();
  const Vector r = (next - psi.amplitudes()) / engine.tau() + (kI / engine.hbar()) * (h * psi.amplitudes());
  return r.norm();
}

double von_neumann_equation_residual(const EvolutionEngine& engine, const DensityObservable& d, double t) {
  const Matrix next = von_neumann_step(engine, d, t).matrix();
  const Matrix h = engine.hamiltonian().at(t).matrix();
  const Matrix& dm = d.matrix();
  const Matrix r = (next - dm) / engine.tau() - (h * dm - dm * h) / (kI * engine.hbar());
  return spectral_norm(r);
}

CheckReport heisenberg_residual(const EvolutionEngine& engine, const ObservableExpr& o, double t) {
  CheckReport r("heisenberg_residual");
  const double r1 = heisenberg_equation_residual(engine, o, t);
  const double r2 = heisenberg_equation_residual(engine.with_tau(engine.tau() / 2.0), o, t);
  const EvalContext ctx = engine.hamiltonian().context().at(t);
  const Matrix now = evaluate(o, ctx).matrix();
  const Matrix h = engine.hamiltonian().at(t).matrix();
  const double comm = spectral_norm(Matrix((now * h - h * now) / engine.hbar()));
  const double explicit_term = spectral_norm(explicit_time_derivative(o, ctx, engine.tau() / 64.0));
  const double scale = spectral_norm(now) * spectral_norm(h) / engine.hbar();
  const double phase = engine.step_phase(t);

  r.add("residual_tau", r1).add("residual_half_tau", r2).add("commutator_term", comm).add(
      "explicit_term", explicit_term);
  r.add("step_phase", phase);
  r.primary = r1;
  const bool negligible = r1 <= 1e-12 * std::max(1.0, scale * scale);
  if (!negligible) r.add("halving_ratio", r2 / r1);
  r.require(negligible || r2 <= 0.6 * r1);
  if (phase > 0.5) r.note("tau ||H|| / hbar exceeds 0.5; the first-order regime is not reached");
  return r;
}

std::string to_string(EquationKind k) {
  switch (k) {
    case EquationKind::Heisenberg:
      return "heisenberg";
    case EquationKind::Schrodinger:
      return "schrodinger";
    case EquationKind::VonNeumann:
      return "von_neumann";
  }
  return "unknown";
}

CheckReport HalvingStudy::report() const {
  CheckReport r(to_string(kind) + "_halving");
  for (std::size_t i = 0; i < residuals.size(); ++i) r.add("residual_" + std::to_string(i), residuals[i]);
  double worst = 0.0;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    r.add("ratio_" + std::to_string(i), ratios[i]);
    if (exact_pairs == 0) worst = std::max(worst, std::abs(ratios[i] - 0.5));
  }
  if (exact_pairs > 0) {
    r.add("exact_pairs", exact_pairs);
    r.note("residuals at roundoff level: the step is exact for this Hamiltonian");
  }
  r.primary = worst;
  r.require(pass);
  return r;
}

namespace {
template <class Residual>
HalvingStudy run_halving(const EvolutionEngine& engine, EquationKind kind, int halvings, Residual&& residual) {
  if (halvings < 1) throw InvalidArgument("halving study: need at least one halving");
  HalvingStudy s;
  s.kind = kind;
  double tau = engine.tau();
  for (int i = 0; i <= halvings; ++i) {
    s.taus.push_back(tau);
    s.residuals.push_back(residual(engine.with_tau(tau)));
    tau /= 2.0;
  }
  s.pass = true;
  // Residuals at roundoff level mean the step is exact (e.g. H = 0); there is
  // nothing left to halve.
  const double floor = 1e-12 * std::max(1.0, s.residuals.front());
  for (std::size_t i = 1; i < s.residuals.size(); ++i) {
    const double ratio = s.residuals[i - 1] > 0.0 ? s.residuals[i] / s.residuals[i - 1] : 0.0;
    s.ratios.push_back(ratio);
    if (s.residuals[i - 1] <= floor && s.residuals[i] <= floor) {
      ++s.exact_pairs;
      continue;
    }
    s.pass = s.pass && ratio >= 0.4 && ratio <= 0.6;
  }
  return s;
}
}  // namespace

HalvingStudy halving_study(const EvolutionEngine& engine, EquationKind kind, const ObservableExpr& o,
                           const StateVector& psi, int halvings, double t) {
  switch (kind) {
    case EquationKind::Heisenberg:
      return run_halving(engine, kind, halvings,
                         [&](const EvolutionEngine& e) { return heisenberg_equation_residual(e, o, t); });
    case EquationKind::Schrodinger:
      return run_halving(engine, kind, halvings,
                         [&](const EvolutionEngine& e) { return schrodinger_equation_residual(e, psi, t); });
    case EquationKind::VonNeumann:
      break;
  }
  return von_neumann_halving(engine, pure_density(psi), halvings, t);
}

HalvingStudy von_neumann_halving(const EvolutionEngine& engine, const DensityObservable& d, int halvings,
                                 double t) {
  return run_halving(engine, EquationKind::VonNeumann, halvings,
                     [&](const EvolutionEngine& e) { return von_neumann_equation_residual(e, d, t); });
}

// ---------------------------------------------------------------------------
// Reversal

CheckReport reversal_round_trip_check(const EvolutionEngine& engine, const Observable& o, long steps,
                                      double tol) {
  CheckReport r("reversal_round_trip");
  const auto& grid = engine.grid();
  Observable cur = o;
  for (long m = 0; m < steps; ++m) cur = heisenberg_step(engine, cur, grid.time(m));
  const double moved = spectral_norm(Matrix(cur.matrix() - o.matrix()));
  for (long m = steps; m > 0; --m) cur = reverse_step(engine, cur, grid.time(m));
  const double err = spectral_norm(Matrix(cur.matrix() - o.matrix()));
  const double scale = spectral_norm(o);
  r.add("steps", static_cast<double>(steps)).add("forward_displacement", moved).add("recovery", err);
  r.primary = relative(err, scale);
  r.require(err <= tol * std::max(1.0, scale));
  if (engine.hamiltonian().time_dependent()) {
    r.note("H depends on time: the reverse step inverts the recorded steps only");
  }
  return r;
}

CheckReport reversal_agreement_check(const EvolutionEngine& engine, const Observable& o, double t) {
  CheckReport r("reversal_agreement");
  const Matrix h = engine.hamiltonian().at(t).matrix();
  const double h_norm = spectral_norm(h);
  const double k_even = relative(spectral_norm(Matrix(h.conjugate() - h)), h_norm);

  const Matrix inverse_step = reverse_step(engine, o, t + engine.tau()).matrix();
  const Observable ko(hermitized(o.matrix().conjugate()));
  const Matrix conjugated = heisenberg_step(engine, ko, t).matrix().conjugate();
  const double agreement = relative(spectral_norm(Matrix(inverse_step - conjugated)), spectral_norm(o));

  r.add("k_even_defect", k_even).add("agreement", agreement);
  r.primary = agreement;
  r.require(k_even <= 1e-12);
  r.require(agreement <= 1e-10);

  const auto& expr = engine.hamiltonian().expr();
  if (!expr.empty()) {
    const EvalContext ctx = engine.hamiltonian().context().at(-t);
    const Matrix reversed = evaluate(time_reverse(expr), ctx).matrix();
    const double subst = relative(spectral_norm(Matrix(reversed - h)), h_norm);
    const bool involution = time_reverse(time_reverse(expr)) == expr;
    r.add("substitution_defect", subst).add("involution", involution ? 0.0 : 1.0);
    r.require(subst <= 1e-12 && involution);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Symmetries and constants of motion

double constant_of_motion_drift(const EvolutionEngine& engine, const Observable& f) {
  const auto& grid = engine.grid();
  const double scale = spectral_norm(f);
  PseudoObservable cur = f;
  double drift = 0.0;
  for (long m = 0; m < grid.steps; ++m) {
    cur = heisenberg_step(engine, cur, grid.time(m));
    drift = std::max(drift, spectral_norm(Matrix(cur.matrix() - f.matrix())));
  }
  return scale > 0.0 ? drift / scale : drift;
}

CheckReport symmetry_check(const EvolutionEngine& engine, const Observable& f,
                           const std::vector<double>& xi_samples) {
  CheckReport r("symmetry_correspondence");
  const double t0 = engine.grid().t0;
  const Observable h = engine.hamiltonian().at(t0);
  const double hn = spectral_norm(h);
  const double fn = spectral_norm(f);

  double conj_dev = 0.0;
  for (double xi : xi_samples) {
    const Matrix rx = unitary_exponential(Observable(xi * f.matrix())).matrix();
    conj_dev = std::max(conj_dev, spectral_norm(Matrix(rx * h.matrix() * rx.adjoint() - h.matrix())));
  }
  const double comm = spectral_norm(commutator(f, h));
  const double drift = constant_of_motion_drift(engine, f) * (fn > 0.0 ? fn : 1.0);

  const bool a = conj_dev <= 1e-9 * hn;
  const bool b = comm <= 1e-9 * fn * hn;
  const bool c = drift <= 1e-9 * fn;
  r.add("conjugation_defect", conj_dev).add("commutator", comm).add("drift", drift);
  r.add("symmetric", (a && b && c) ? 1.0 : 0.0);
  r.primary = std::abs(static_cast<double>(a) - static_cast<double>(b)) +
              std::abs(static_cast<double>(b) - static_cast<double>(c));
  r.require(a == b && b == c);
  if (!(a == b && b == c)) r.note("the three symmetry criteria disagree");
  return r;
}

CheckReport compatibility_persistence_check(const EvolutionEngine& engine, const Observable& a,
                                            const Observable& b) {
  CheckReport r("compatibility_persistence");
  const auto& grid = engine.grid();
  const double scale = spectral_norm(a) * spectral_norm(b);
  const double c0 = spectral_norm(commutator(a, b));
  PseudoObservable am = a;
  PseudoObservable bm = b;
  double dev = 0.0;
  for (long m = 0; m < grid.steps; ++m) {
    am = heisenberg_step(engine, am, grid.time(m));
    bm = heisenberg_step(engine, bm, grid.time(m));
    dev = std::max(dev, std::abs(spectral_norm(commutator(am, bm)) - c0));
  }
  r.add("initial_commutator", c0).add("commutator_drift", dev);
  r.primary = dev;
  r.require(dev <= 1e-10 * scale);
  if (c0 <= 1e-10 * scale) r.note("initially compatible");
  return r;
}

CheckReport spectrum_constancy_check(const EvolutionEngine& engine, const Observable& o) {
  CheckReport r("spectrum_constancy");
  const auto& grid = engine.grid();
  const auto sd0 = spectral_decompose(o);
  double radius = 0.0;
  for (double v : sd0.eigenvalues) radius = std::max(radius, std::abs(v));
  const double tol = tol::grouping * std::max(1.0, radius);
  Observable cur = o;
  double worst = 0.0;
  bool multiplicities = true;
  for (long m = 0; m < grid.steps; ++m) {
    cur = heisenberg_step(engine, cur, grid.time(m));
    const auto sd = spectral_decompose(cur);
    if (sd.eigenvalues.size() != sd0.eigenvalues.size() || sd.multiplicities != sd0.multiplicities) {
      multiplicities = false;
      break;
    }
    for (std::size_t k = 0; k < sd.eigenvalues.size(); ++k) {
      worst = std::max(worst, std::abs(sd.eigenvalues[k] - sd0.eigenvalues[k]));
    }
  }
  r.add("eigenvalue_drift", worst).add("multiplicities_preserved", multiplicities ? 1.0 : 0.0);
  r.primary = worst;
  r.require(multiplicities && worst <= tol);
  return r;
}

// ---------------------------------------------------------------------------
// Temporal abscissa

CheckReport temporal_abscissa_check(int n, double tau, double hbar, std::uint64_t seed) {
  CheckReport r("temporal_abscissa");
  const auto t_obs = LinearSpectrumObservable::make(n, tau, std::string("time"));
  const auto pair = make_canonical_pair(t_obs, hbar);
  const Observable& h = pair.p;
  const Matrix u = unitary_exponential(Observable((tau / hbar) * h.matrix())).matrix();
  const Index d = pair.dim();
  const auto& basis = t_obs.basis();

  auto rng = rnd::stream(seed, static_cast<std::uint64_t>(n), 0x7a);
  std::vector<long> shifts{0, 1, 2L * n - 1, 2L * n};
  shifts.push_back(static_cast<long>(std::uniform_int_distribution<long>(2, 4L * n)(rng)));

  double label = 0.0;
  for (long s : shifts) {
    Matrix us = Matrix::Identity(d, d);
    for (long k = 0; k < s; ++k) us = us * u;
    for (int j = -n; j < n; ++j) {
      const Matrix moved = us * basis.projector(static_cast<std::size_t>(j + n)) * us.adjoint();
      const int target = LinearSpectrumObservable::wrap_label(static_cast<long>(j) - s, n);
      const Matrix& expect = basis.projector(static_cast<std::size_t>(target + n));
      label = std::max(label, spectral_norm(Matrix(moved - expect)));
    }
  }

  // U T U^dagger = T + tau, except the level that wraps from -n to n - 1.
  const Matrix& t = t_obs.observable().matrix();
  const Matrix translated = u * t * u.adjoint();
  const Matrix expected = t + tau * Matrix::Identity(d, d) -
                          (2.0 * n * tau) * basis.projector(static_cast<std::size_t>(2 * n - 1));
  const double translation = spectral_norm(Matrix(translated - expected));

  // Time-reversal parity in the eigenbasis of H.
  const Matrix kt = conjugate_in_basis(t, pair.fourier);
  const Matrix parity_expected = -t + 2.0 * (-n * tau) * basis.projector(0);
  const double parity = spectral_norm(Matrix(kt - parity_expected));
  const double edge = spectral_norm(Matrix(kt + t));

  const double scale = std::max(1.0, spectral_norm(t));
  r.add("label_residual", label)
      .add("translation_residual", translation)
      .add("parity_residual", parity)
      .add("edge_defect_norm", edge)
      .add("edge_defect_expected", 2.0 * n * tau);
  r.primary = std::max({label, translation / scale, parity / scale});
  r.require(label <= tol::recon);
  r.require(translation <= tol::recon * scale);
  r.require(parity <= tol::recon * scale);
  r.require(std::abs(edge - 2.0 * n * tau) <= tol::recon * scale);
  return r;
}

}  // namespace pobs
