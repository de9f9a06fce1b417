#include "pobs/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "pobs/errors.hpp"
#include "pobs/parallel.hpp"

namespace pobs {

namespace {

constexpr double kPi = std::numbers::pi;
// Phases this close to -pi are treated as sitting on the branch cut.
constexpr double kBranchEps = 1e-12;
// Eigenvalue clusters of the mixed operator R + 2I that are refined by a
// second diagonalization.
constexpr double kClusterTol = 1e-5;

double unitarity_defect(const Matrix& w) {
  const Matrix id = Matrix::Identity(w.rows(), w.cols());
  return std::max(spectral_norm(Matrix(w.adjoint() * w - id)),
                  spectral_norm(Matrix(w * w.adjoint() - id)));
}

std::vector<std::pair<Index, Index>> clusters(const Eigen::VectorXd& ev, double tol) {
  std::vector<std::pair<Index, Index>> out;
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  Index start = 0;
  for (Index i = 1; i <= ev.size(); ++i) {
    if (i == ev.size() || ev(i) - ev(i - 1) > tol * scale) {
      out.emplace_back(start, i - start);
      start = i;
    }
  }
  return out;
}

// Rotates the columns of `basis` so that they diagonalize `op` restricted to
// their span; clusters of the restricted spectrum are refined with the
// operators in `rest`.
void refine(Matrix& basis, const std::vector<const Matrix*>& ops, std::size_t level) {
  if (level >= ops.size() || basis.cols() <= 1) return;
  const Matrix restricted = basis.adjoint() * (*ops[level]) * basis;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (restricted + restricted.adjoint()));
  if (es.info() != Eigen::Success) throw EigenSolverFailure("generatrix: eigensolver failed");
  basis = basis * es.eigenvectors();
  for (auto [start, count] : clusters(es.eigenvalues(), kClusterTol)) {
    if (count > 1) {
      Matrix block = basis.middleCols(start, count);
      refine(block, ops, level + 1);
      basis.middleCols(start, count) = block;
    }
  }
}

Matrix assemble_hermitian(const Matrix& vecs, const std::vector<double>& values) {
  Eigen::VectorXd v(static_cast<Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v(static_cast<Index>(i)) = values[i];
  const Matrix h = vecs * v.cast<Complex>().asDiagonal() * vecs.adjoint();
  return 0.5 * (h + h.adjoint());
}

Matrix assemble_phases(const Matrix& vecs, const std::vector<double>& phases) {
  Vector v(static_cast<Index>(phases.size()));
  for (std::size_t i = 0; i < phases.size(); ++i) v(static_cast<Index>(i)) = std::polar(1.0, phases[i]);
  return vecs * v.asDiagonal() * vecs.adjoint();
}

}  // namespace

double fold_phase(double theta) {
  double t = theta - 2.0 * kPi * std::ceil((theta - kPi) / (2.0 * kPi));
  if (t <= -kPi + kBranchEps) t = kPi;
  return t;
}

Transformation::Transformation(PseudoObservable w, Observable g, Matrix vecs,
                               std::vector<double> phases, double circle_residual)
    : w_(std::move(w)),
      g_(std::move(g)),
      vecs_(std::move(vecs)),
      phases_(std::move(phases)),
      circle_residual_(circle_residual) {}

Transformation Transformation::from_eigendata(Matrix vecs, std::vector<double> phases,
                                              double circle) {
  for (auto& p : phases) p = fold_phase(p);
  PseudoObservable w(assemble_phases(vecs, phases));
  Observable g(assemble_hermitian(vecs, phases));
  return Transformation(std::move(w), std::move(g), std::move(vecs), std::move(phases), circle);
}

Transformation Transformation::from_unitary(const PseudoObservable& w) {
  const double defect = unitarity_defect(w.matrix());
  if (defect > tol::recon) {
    std::ostringstream os;
    os << "from_unitary: input is not unitary (defect " << defect << ")";
    throw NotUnitary(os.str());
  }
  // W_R and W_I commute for unitary W; a generic linear combination of them
  // separates almost every joint eigenspace, and the refinement handles the
  // rest.
  const Matrix re = 0.5 * (w.matrix() + w.matrix().adjoint());
  const Matrix im = (w.matrix() - w.matrix().adjoint()) / (2.0 * kI);
  const Matrix mixed = re + 2.0 * im;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (mixed + mixed.adjoint()));
  if (es.info() != Eigen::Success) throw EigenSolverFailure("from_unitary: eigensolver failed");
  Matrix vecs = es.eigenvectors();
  const std::vector<const Matrix*> ops{&re, &im};
  for (auto [start, count] : clusters(es.eigenvalues(), kClusterTol)) {
    if (count > 1) {
      Matrix block = vecs.middleCols(start, count);
      refine(block, ops, 0);
      vecs.middleCols(start, count) = block;
    }
  }

  const Index d = w.dim();
  std::vector<double> phases(static_cast<std::size_t>(d));
  double circle = 0.0;
  for (Index j = 0; j < d; ++j) {
    const auto v = vecs.col(j);
    const double alpha = (v.adjoint() * re * v)(0, 0).real();
    const double beta = (v.adjoint() * im * v)(0, 0).real();
    circle = std::max(circle, std::abs(alpha * alpha + beta * beta - 1.0));
    phases[static_cast<std::size_t>(j)] = std::atan2(beta, alpha);
  }
  auto t = from_eigendata(std::move(vecs), std::move(phases), circle);
  // Keep the caller's W rather than the re-assembled one.
  t.w_ = PseudoObservable(w.matrix(), w.unit_tag());
  return t;
}

Transformation Transformation::from_generatrix(const Observable& g) {
  const auto sd = spectral_decompose(g);
  std::vector<double> phases;
  phases.reserve(static_cast<std::size_t>(g.dim()));
  for (std::size_t j = 0; j < sd.eigenvalues.size(); ++j) {
    for (Index m = 0; m < sd.multiplicities[j]; ++m) phases.push_back(sd.eigenvalues[j]);
  }
  // W = cos(G) + i sin(G) through the same spectral decomposition.
  PseudoObservable w = apply_complex_function([](double x) { return std::exp(kI * x); }, sd);
  auto t = from_eigendata(sd.eigenvectors, std::move(phases), 0.0);
  t.w_ = std::move(w);
  return t;
}

Transformation Transformation::identity(Index dim) {
  return from_eigendata(Matrix::Identity(dim, dim), std::vector<double>(static_cast<std::size_t>(dim), 0.0),
                        0.0);
}

ProjectorBasis Transformation::phase_basis(double grouping_tol) const {
  const std::size_t d = phases_.size();
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return phases_[a] < phases_[b]; });

  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t idx = 0; idx < d; ++idx) {
    const std::size_t j = order[idx];
    if (!groups.empty() && phases_[j] - phases_[groups.back().back()] <= grouping_tol) {
      groups.back().push_back(j);
    } else {
      groups.push_back({j});
    }
  }
  // Angular distance wraps around the branch cut.
  if (groups.size() > 1 &&
      phases_[groups.front().front()] + 2.0 * kPi - phases_[groups.back().back()] <= grouping_tol) {
    groups.back().insert(groups.back().end(), groups.front().begin(), groups.front().end());
    groups.erase(groups.begin());
  }

  std::vector<Matrix> projectors;
  std::vector<double> labels;
  for (const auto& g : groups) {
    Matrix p = Matrix::Zero(dim(), dim());
    double mean = 0.0;
    for (auto j : g) {
      p += vecs_.col(static_cast<Index>(j)) * vecs_.col(static_cast<Index>(j)).adjoint();
      mean += phases_[j];
    }
    projectors.push_back(std::move(p));
    labels.push_back(mean / static_cast<double>(g.size()));
  }
  return ProjectorBasis::trusted(std::move(projectors), std::move(labels));
}

PseudoObservable apply(const Transformation& t, const PseudoObservable& p) {
  require_same_dim(t.dim(), p.dim(), "apply");
  const Matrix& w = t.unitary().matrix();
  return PseudoObservable(w * p.matrix() * w.adjoint(), p.unit_tag());
}

Observable apply(const Transformation& t, const Observable& a) {
  const PseudoObservable p = apply(t, static_cast<const PseudoObservable&>(a));
  return Observable(0.5 * (p.matrix() + p.matrix().adjoint()), p.unit_tag());
}

Transformation inverse(const Transformation& t) {
  std::vector<double> phases = t.phases_;
  for (auto& p : phases) p = -p;
  auto inv = Transformation::from_eigendata(t.vecs_, std::move(phases), t.circle_residual_);
  inv.w_ = PseudoObservable(t.w_.matrix().adjoint());
  return inv;
}

Transformation compose(const Transformation& t1, const Transformation& t2) {
  require_same_dim(t1.dim(), t2.dim(), "compose");
  return Transformation::from_unitary(PseudoObservable(t1.unitary().matrix() * t2.unitary().matrix()));
}

ProjectorBasis transform_basis(const Transformation& t, const ProjectorBasis& basis) {
  require_same_dim(t.dim(), basis.dim(), "transform_basis");
  auto moved = par::conjugate_all(t.unitary().matrix(), basis.projectors());
  for (auto& p : moved) p = 0.5 * (p + p.adjoint());
  return ProjectorBasis::trusted(std::move(moved), basis.labels());
}

DyadBasis transform_basis(const Transformation& t, const DyadBasis& basis) {
  require_same_dim(t.dim(), basis.dim(), "transform_basis");
  std::vector<Matrix> dyads;
  dyads.reserve(basis.size() * basis.size());
  for (std::size_t j = 0; j < basis.size(); ++j) {
    for (std::size_t k = 0; k < basis.size(); ++k) dyads.push_back(basis.dyad(j, k));
  }
  return DyadBasis::trusted(transform_basis(t, basis.base()),
                            par::conjugate_all(t.unitary().matrix(), dyads));
}

bool is_invariant(const Transformation& t, const Observable& a, double tol) {
  const Matrix diff = apply(t, static_cast<const PseudoObservable&>(a)).matrix() - a.matrix();
  return spectral_norm(diff) <= tol * spectral_norm(a);
}

CheckReport invariance_characterization(const Transformation& t, const Observable& a, double tol) {
  CheckReport r("invariance_characterization");
  const double norm_a = spectral_norm(a);
  const double norm_g = spectral_norm(t.generatrix());
  const Matrix diff = apply(t, static_cast<const PseudoObservable&>(a)).matrix() - a.matrix();
  const double change = spectral_norm(diff);
  const double comm = spectral_norm(commutator(a, t.generatrix()));
  const bool invariant = change <= tol * norm_a;
  const bool compatible = comm <= tol * norm_a * norm_g;
  r.add("transform_change", change)
      .add("transform_change_rel", norm_a > 0 ? change / norm_a : 0.0)
      .add("commutator_with_generatrix", comm)
      .add("commutator_rel", norm_a * norm_g > 0 ? comm / (norm_a * norm_g) : 0.0)
      .add("invariant", invariant ? 1.0 : 0.0)
      .add("compatible", compatible ? 1.0 : 0.0);
  r.primary = invariant == compatible ? 0.0 : 1.0;
  r.require(invariant == compatible);
  return r;
}

CheckReport spectrum_preservation_check(const Transformation& t, const Observable& a) {
  CheckReport r("spectrum_preservation");
  const Observable moved = apply(t, a);
  const auto before = spectral_decompose(a);
  const auto after = spectral_decompose(moved);
  const bool same_count = before.eigenvalues.size() == after.eigenvalues.size();
  r.add("term_count_before", static_cast<double>(before.eigenvalues.size()))
      .add("term_count_after", static_cast<double>(after.eigenvalues.size()));
  r.require(same_count);
  if (!same_count) {
    r.note("number of distinct spectral terms changed");
    r.primary = 1.0;
    return r;
  }
  const double radius = std::max(std::abs(before.eigenvalues.front()), std::abs(before.eigenvalues.back()));
  double eig_dev = 0.0;
  double proj_dev = 0.0;
  bool mult_ok = true;
  const auto moved_projectors = par::conjugate_all(t.unitary().matrix(), before.basis.projectors());
  for (std::size_t j = 0; j < before.eigenvalues.size(); ++j) {
    eig_dev = std::max(eig_dev, std::abs(before.eigenvalues[j] - after.eigenvalues[j]));
    mult_ok = mult_ok && before.multiplicities[j] == after.multiplicities[j];
    proj_dev = std::max(proj_dev, spectral_norm(Matrix(moved_projectors[j] - after.basis.projector(j))));
  }
  r.add("eigenvalue_deviation", eig_dev)
      .add("projector_deviation", proj_dev)
      .add("multiplicities_equal", mult_ok ? 1.0 : 0.0);
  r.primary = std::max(eig_dev, proj_dev);
  r.require(eig_dev <= tol::grouping * std::max(1.0, radius));
  r.require(proj_dev <= tol::recon);
  r.require(mult_ok);
  return r;
}

CheckReport trace_invariance_check(const Transformation& t, const PseudoObservable& p) {
  CheckReport r("trace_invariance");
  const Complex before = trace(p);
  const Complex after = trace(apply(t, p));
  const double dev = std::abs(after - before);
  r.add("trace_deviation", dev).add("trace_abs", std::abs(before));
  r.primary = dev;
  r.require(dev <= 1e-10 * (1.0 + std::abs(before)));
  return r;
}

CheckReport inner_product_invariance_check(const Transformation& t, const PseudoObservable& x,
                                           const PseudoObservable& y) {
  CheckReport r("inner_product_invariance");
  const Complex before = inner_product(x, y);
  const Complex after = inner_product(apply(t, x), apply(t, y));
  const double dev = std::abs(after - before);
  r.add("inner_product_deviation", dev).add("inner_product_abs", std::abs(before));
  r.primary = dev;
  r.require(dev <= 1e-10 * (1.0 + std::abs(before)));
  return r;
}

CheckReport automorphism_check(const Transformation& t, const PseudoObservable& a,
                               const PseudoObservable& b, Complex gamma, double tol) {
  CheckReport r("automorphism");
  const auto safe = [](double x) { return x > 0.0 ? x : 1.0; };
  const double na = spectral_norm(a);
  const double nb = spectral_norm(b);
  const PseudoObservable ta = apply(t, a);
  const PseudoObservable tb = apply(t, b);

  const double add = spectral_norm(apply(t, a + b) - (ta + tb)) / safe(na + nb);
  const double mul = spectral_norm(apply(t, a * b) - ta * tb) / safe(na * nb);
  const auto c = PseudoObservable::scalar(gamma, t.dim());
  const double scal = spectral_norm(apply(t, c) - c) / safe(std::abs(gamma));
  const double dag = spectral_norm(apply(t, dagger(a)) - dagger(ta)) / safe(na);
  r.add("additivity", add).add("multiplicativity", mul).add("scalar_invariance", scal).add("dagger_equivariance", dag);
  r.require(add < tol && mul < tol && scal < tol && dag < tol);
  return r;
}

}  // namespace pobs
