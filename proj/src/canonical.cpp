#include "pobs/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pobs/errors.hpp"
#include "pobs/parallel.hpp"
#include "pobs/transforms.hpp"

namespace pobs {

namespace {

constexpr double kPi = std::numbers::pi;

Matrix matrix_power(Matrix base, unsigned long k) {
  Matrix out = Matrix::Identity(base.rows(), base.cols());
  while (k > 0) {
    if (k & 1UL) out = out * base;
    k >>= 1UL;
    if (k > 0) base = base * base;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Linear-spectrum coordinate

int LinearSpectrumObservable::wrap_label(long j, int n) noexcept {
  const long period = 2L * n;
  long r = (j + n) % period;
  if (r < 0) r += period;
  return static_cast<int>(r - n);
}

LinearSpectrumObservable LinearSpectrumObservable::make(int n, double epsilon,
                                                        std::optional<std::string> unit_tag) {
  if (n < 2) throw InvalidArgument("make_position: n must be >= 2");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidArgument("make_position: epsilon must be positive and finite");
  }
  const Index d = 2 * n;
  Matrix q = Matrix::Zero(d, d);
  std::vector<double> labels;
  labels.reserve(static_cast<std::size_t>(d));
  for (int j = -n; j < n; ++j) {
    q(index_of(j, n), index_of(j, n)) = j * epsilon;
    labels.push_back(j * epsilon);
  }
  auto basis = ProjectorBasis::trusted(ProjectorBasis::coordinate(d).projectors(), std::move(labels));
  return LinearSpectrumObservable(n, epsilon, Observable(std::move(q), std::move(unit_tag)),
                                  std::move(basis));
}

TranslationSpec TranslationSpec::decompose(double delta, double epsilon, double rel_tol) {
  if (!(epsilon > 0.0)) throw InvalidArgument("TranslationSpec: epsilon must be positive");
  TranslationSpec t;
  t.delta = delta;
  const double ratio = delta / epsilon;
  t.steps = static_cast<long>(std::floor(ratio));
  t.xi = delta - static_cast<double>(t.steps) * epsilon;
  if (t.xi >= epsilon * (1.0 - rel_tol)) {
    t.steps += 1;
    t.xi = 0.0;
  } else if (t.xi <= epsilon * rel_tol) {
    t.xi = 0.0;
  }
  return t;
}

// ---------------------------------------------------------------------------
// Canonical pair

double CanonicalPair::momentum_resolution() const noexcept {
  return kPi * hbar / (n() * epsilon());
}

CanonicalPair make_canonical_pair(const LinearSpectrumObservable& q, double hbar) {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw InvalidArgument("make_canonical_pair: hbar must be positive");
  const int n = q.n();
  const Index d = q.dim();
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  Matrix f(d, d);
  for (int j = -n; j < n; ++j) {
    for (int k = -n; k < n; ++k) {
      f(LinearSpectrumObservable::index_of(j, n), LinearSpectrumObservable::index_of(k, n)) =
          norm * std::polar(1.0, kPi * k * j / n);
    }
  }

  SpectralDecomposition sd;
  sd.eigenvectors = f;
  std::vector<Matrix> projectors;
  projectors.reserve(static_cast<std::size_t>(d));
  for (int k = -n; k < n; ++k) {
    const double pk = k * kPi * hbar / (n * q.epsilon());
    sd.eigenvalues.push_back(pk);
    sd.multiplicities.push_back(1);
    const auto col = f.col(LinearSpectrumObservable::index_of(k, n));
    projectors.emplace_back(col * col.adjoint());
  }
  sd.basis = ProjectorBasis::trusted(std::move(projectors), sd.eigenvalues);

  const Matrix pm = sd.reconstruct();
  Observable p(0.5 * (pm + pm.adjoint()), std::string("momentum"));
  const double ratio = q.epsilon() / hbar;
  PseudoObservable s = apply_complex_function([ratio](double x) { return std::exp(kI * ratio * x); }, sd);

  return CanonicalPair{q, std::move(s), std::move(p), hbar, sd.basis, std::move(f), sd.eigenvalues};
}

Matrix shift_permutation(int n) {
  const Index d = 2 * n;
  Matrix s = Matrix::Zero(d, d);
  for (int j = -n; j < n; ++j) {
    const int target = LinearSpectrumObservable::wrap_label(j - 1, n);
    s(LinearSpectrumObservable::index_of(target, n), LinearSpectrumObservable::index_of(j, n)) = 1.0;
  }
  return s;
}

Matrix shift_power(const CanonicalPair& pair, long s) {
  const long period = 2L * pair.n();
  long r = s % period;
  if (r < 0) r += period;
  return matrix_power(pair.s.matrix(), static_cast<unsigned long>(r));
}

int translated_label(int j, long s, int n) { return LinearSpectrumObservable::wrap_label(j - s, n); }

Observable translate(const CanonicalPair& pair, double delta) {
  const auto spec = TranslationSpec::decompose(delta, pair.epsilon());
  if (spec.xi != 0.0) {
    std::ostringstream os;
    os << "translate: displacement " << delta << " leaves remainder xi = " << spec.xi
       << " over the lattice of resolution " << pair.epsilon()
       << "; a translation must map the spectrum onto itself, which forces xi = 0";
    throw NonLatticeTranslation(os.str());
  }
  const Matrix u = shift_power(pair, spec.steps);
  const Matrix moved = u * pair.q.observable().matrix() * u.adjoint();
  return Observable(0.5 * (moved + moved.adjoint()), pair.q.observable().unit_tag());
}

CheckReport translation_label_check(const CanonicalPair& pair, long s) {
  CheckReport r("translation_labels");
  const int n = pair.n();
  const Matrix u = shift_power(pair, s);
  const auto moved = par::conjugate_all(u, pair.q.basis().projectors());
  double worst = 0.0;
  for (int j = -n; j < n; ++j) {
    const auto& target = pair.q.basis().projector(static_cast<std::size_t>(
        LinearSpectrumObservable::index_of(translated_label(j, s, n), n)));
    worst = std::max(worst, spectral_norm(Matrix(moved[static_cast<std::size_t>(j + n)] - target)));
  }
  r.add("steps", static_cast<double>(s)).add("label_residual", worst);
  r.primary = worst;
  r.require(worst <= tol::recon);
  return r;
}

std::vector<double> momenta_from_shift(const CanonicalPair& pair) {
  const auto t = Transformation::from_unitary(pair.s);
  std::vector<double> out;
  out.reserve(t.phases().size());
  for (double theta : t.phases()) {
    // The principal generatrix branch is (-pi, pi]; the momentum window is
    // [-pi, pi), so the single phase on the cut belongs to k = -n.
    if (theta > kPi - 1e-9) theta -= 2.0 * kPi;
    out.push_back(theta * pair.hbar / pair.epsilon());
  }
  std::sort(out.begin(), out.end());
  return out;
}

CheckReport shift_cyclicity_check(const CanonicalPair& pair) {
  CheckReport r("shift_cyclicity");
  const int n = pair.n();
  const Index d = pair.dim();
  const Matrix& s = pair.s.matrix();
  const Matrix id = Matrix::Identity(d, d);

  const double unitarity = spectral_norm(Matrix(s.adjoint() * s - id));
  const double period = spectral_norm(Matrix(matrix_power(s, static_cast<unsigned long>(2 * n)) - id));
  const double perm = spectral_norm(Matrix(s - shift_permutation(n)));
  const auto step = translation_label_check(pair, 1);
  const double exp_dev = spectral_norm(Matrix(
      unitary_exponential(Observable((pair.epsilon() / pair.hbar) * pair.p.matrix())).matrix() - s));

  const auto recovered = momenta_from_shift(pair);
  double mom_dev = 0.0;
  for (std::size_t k = 0; k < recovered.size(); ++k) {
    mom_dev = std::max(mom_dev, std::abs(recovered[k] - pair.momenta[k]));
  }
  double window = 0.0;
  const double bound = kPi * pair.hbar / pair.epsilon();
  for (double pk : pair.momenta) window = std::max(window, std::abs(pk) - bound);

  r.add("unitarity", unitarity)
      .add("period_residual", period)
      .add("permutation_residual", perm)
      .add("label_residual", step.residual("label_residual"))
      .add("exponential_residual", exp_dev)
      .add("momentum_recovery", mom_dev)
      .add("momentum_window_excess", std::max(0.0, window));
  r.require(unitarity <= tol::recon && period <= tol::recon && step.pass && exp_dev <= tol::recon &&
            window <= 1e-12 * bound);  // p_{-n} = -n pi hbar / (n eps) may round past the bound
  r.require(mom_dev <= 1e-10 * std::max(1.0, bound));
  return r;
}

// ---------------------------------------------------------------------------
// Weyl obstruction

double smearing_width(int n) { return std::sqrt(static_cast<double>(n)); }

WeylResidual weyl_residual(const CanonicalPair& pair) {
  WeylResidual w;
  const int n = pair.n();
  const Index d = pair.dim();
  w.n = n;
  w.epsilon = pair.epsilon();
  const Matrix& q = pair.q.observable().matrix();
  const Matrix& p = pair.p.matrix();
  const Matrix comm = q * p - p * q;
  const Matrix c = comm / (kI * pair.hbar);

  w.trace_commutator = std::abs(comm.trace());
  w.scale = spectral_norm(q) * spectral_norm(p);
  w.trace_identity = static_cast<double>(Matrix::Identity(d, d).trace().real());
  w.commutator_norm = spectral_norm(comm);
  w.coordinate_diagonal.resize(static_cast<std::size_t>(d));
  for (Index i = 0; i < d; ++i) w.coordinate_diagonal[static_cast<std::size_t>(i)] = c(i, i);

  const double sigma = smearing_width(n);
  for (int centre = -(n / 2); centre < n / 2; ++centre) {
    Vector g(d);
    for (int j = -n; j < n; ++j) {
      const int dist = LinearSpectrumObservable::wrap_label(j - centre, n);
      g(LinearSpectrumObservable::index_of(j, n)) = std::exp(-0.5 * (dist / sigma) * (dist / sigma));
    }
    g /= g.norm();
    const double value = (g.adjoint() * c * g)(0, 0).real();
    w.smeared_diagonal.push_back(value);
    w.interior_max_dev = std::max(w.interior_max_dev, std::abs(value - 1.0));
  }
  return w;
}

CheckReport WeylResidual::report() const {
  CheckReport r("weyl_residual");
  double diag = 0.0;
  for (auto z : coordinate_diagonal) diag = std::max(diag, std::abs(z));
  r.add("n", n)
      .add("trace_commutator", trace_commutator)
      .add("trace_commutator_rel", scale > 0 ? trace_commutator / scale : 0.0)
      .add("trace_identity", trace_identity)
      .add("commutator_norm", commutator_norm)
      .add("coordinate_diagonal_max", diag)
      .add("interior_max_dev", interior_max_dev);
  r.primary = scale > 0 ? trace_commutator / scale : 0.0;
  r.require(trace_commutator <= 1e-9 * scale);
  r.require(trace_identity == 2.0 * n);
  // [Q, P] = i hbar 1 is unattainable, and [Q, P] never vanishes either.
  r.require(commutator_norm > 0.0);
  return r;
}

EpsilonRule inverse_sqrt_rule(double c) {
  return [c](int n) { return c / std::sqrt(static_cast<double>(n)); };
}

namespace {
LimitRow limit_row(int n, const EpsilonRule& rule, double hbar) {
  const double eps = rule(n);
  const auto pair = make_canonical_pair(make_position(n, eps), hbar);
  const auto w = weyl_residual(pair);
  const auto parity = conjugation_parity(pair);
  return LimitRow{n, eps, w.scale > 0 ? w.trace_commutator / w.scale : 0.0, w.interior_max_dev,
                  parity.relative_weight};
}

std::vector<LimitRow> sorted(std::vector<LimitRow> rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.n < b.n; });
  return rows;
}
}  // namespace

std::vector<LimitRow> commutator_limit_probe(const std::vector<int>& n_list, const EpsilonRule& rule,
                                             double hbar) {
  return sorted(par::map_indexed(n_list.size(), [&](std::size_t i) { return limit_row(n_list[i], rule, hbar); }));
}

std::vector<LimitRow> commutator_limit_probe_serial(const std::vector<int>& n_list,
                                                    const EpsilonRule& rule, double hbar) {
  return sorted(par::map_indexed_serial(n_list.size(),
                                        [&](std::size_t i) { return limit_row(n_list[i], rule, hbar); }));
}

// ---------------------------------------------------------------------------
// Conjugation parity

Matrix conjugate_in_basis(const Matrix& m, const Matrix& v) {
  return v * (v.adjoint() * m * v).conjugate() * v.adjoint();
}

ParityDefect conjugation_parity(const CanonicalPair& pair) {
  ParityDefect out;
  const int n = pair.n();
  const Matrix& q = pair.q.observable().matrix();
  const Matrix& p = pair.p.matrix();
  out.coordinate_defect = q.conjugate() - q;
  out.momentum_defect = p.conjugate() + p;
  out.expected_defect = 2.0 * pair.momenta.front() * pair.momentum_basis.projector(0);
  out.defect_norm = spectral_norm(out.momentum_defect);
  out.expected_norm = 2.0 * kPi * pair.hbar / pair.epsilon();
  const Matrix herm = 0.5 * (out.momentum_defect + out.momentum_defect.adjoint());
  out.relative_weight = trace_norm(herm) / trace_norm(p);
  (void)n;
  return out;
}

CheckReport conjugation_parity_check(const CanonicalPair& pair) {
  CheckReport r("conjugation_parity");
  const auto par = conjugation_parity(pair);
  const double q_dev = par.coordinate_defect.cwiseAbs().maxCoeff();
  const double shape = spectral_norm(Matrix(par.momentum_defect - par.expected_defect));
  const double norm_dev = std::abs(par.defect_norm - par.expected_norm);
  const double weight_expected = 2.0 / pair.n();
  r.add("coordinate_defect", q_dev)
      .add("momentum_defect_shape", shape)
      .add("defect_norm", par.defect_norm)
      .add("expected_defect_norm", par.expected_norm)
      .add("relative_weight", par.relative_weight)
      .add("relative_weight_expected", weight_expected);
  r.primary = std::max(q_dev, shape);
  const double scale = std::max(1.0, spectral_norm(pair.p));
  r.require(q_dev == 0.0);
  r.require(shape <= tol::recon * scale);
  r.require(norm_dev <= tol::recon * scale);
  r.require(std::abs(par.relative_weight - weight_expected) <= 1e-9);
  return r;
}

}  // namespace pobs
