#include "pobs/core_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pobs/errors.hpp"
#include "pobs/parallel.hpp"

namespace pobs {

void require_same_dim(Index a, Index b, const char* where) {
  if (a != b) {
    std::ostringstream os;
    os << where << ": dimension mismatch (" << a << " vs " << b << ")";
    throw DimensionMismatch(os.str());
  }
}

// ---------------------------------------------------------------------------
// PseudoObservable

namespace {
std::optional<std::string> merge_tags(const std::optional<std::string>& a,
                                      const std::optional<std::string>& b) {
  return a == b ? a : std::nullopt;
}
}  // namespace

PseudoObservable::PseudoObservable(Matrix entries, std::optional<std::string> unit_tag)
    : m_(std::move(entries)), tag_(std::move(unit_tag)) {
  if (m_.rows() != m_.cols()) {
    throw DimensionMismatch("pseudo-observable must be square, got " + std::to_string(m_.rows()) +
                            "x" + std::to_string(m_.cols()));
  }
  if (m_.rows() < 2) throw InvalidArgument("pseudo-observable dimension must be >= 2");
}

PseudoObservable PseudoObservable::identity(Index dim) {
  return PseudoObservable(Matrix::Identity(dim, dim));
}

PseudoObservable PseudoObservable::zero(Index dim) {
  return PseudoObservable(Matrix::Zero(dim, dim));
}

PseudoObservable PseudoObservable::scalar(Complex value, Index dim) {
  return PseudoObservable(value * Matrix::Identity(dim, dim));
}

PseudoObservable PseudoObservable::with_unit(std::optional<std::string> tag) const {
  return PseudoObservable(m_, std::move(tag));
}

PseudoObservable PseudoObservable::operator-() const { return PseudoObservable(-m_, tag_); }

PseudoObservable operator+(const PseudoObservable& a, const PseudoObservable& b) {
  require_same_dim(a.dim(), b.dim(), "operator+");
  return PseudoObservable(a.m_ + b.m_, merge_tags(a.tag_, b.tag_));
}

PseudoObservable operator-(const PseudoObservable& a, const PseudoObservable& b) {
  require_same_dim(a.dim(), b.dim(), "operator-");
  return PseudoObservable(a.m_ - b.m_, merge_tags(a.tag_, b.tag_));
}

PseudoObservable operator*(const PseudoObservable& a, const PseudoObservable& b) {
  require_same_dim(a.dim(), b.dim(), "operator*");
  return PseudoObservable(a.m_ * b.m_);
}

PseudoObservable operator*(Complex s, const PseudoObservable& a) {
  return PseudoObservable(s * a.m_, a.tag_);
}

// ---------------------------------------------------------------------------
// Observable

double hermiticity_defect(const Matrix& m) {
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() / scale;
}

bool is_hermitian(const Matrix& m, double rel_tol) {
  return m.rows() == m.cols() && hermiticity_defect(m) <= rel_tol;
}

Observable::Observable(Matrix entries, std::optional<std::string> unit_tag)
    : PseudoObservable(std::move(entries), std::move(unit_tag)) {
  const double defect = hermiticity_defect(matrix());
  if (defect > tol::herm) {
    std::ostringstream os;
    os << "observable is not Hermitian (relative defect " << defect << ")";
    throw NotHermitian(os.str());
  }
}

Observable::Observable(const PseudoObservable& p) : Observable(p.matrix(), p.unit_tag()) {}

Observable Observable::identity(Index dim) { return Observable(Matrix::Identity(dim, dim)); }
Observable Observable::zero(Index dim) { return Observable(Matrix::Zero(dim, dim)); }

// ---------------------------------------------------------------------------
// Norms

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (is_hermitian(m, 0.0)) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw EigenSolverFailure("spectral_norm: eigensolver failed");
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double spectral_norm(const PseudoObservable& p) { return spectral_norm(p.matrix()); }

double trace_norm(const Matrix& m) {
  if (is_hermitian(m, 0.0)) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw EigenSolverFailure("trace_norm: eigensolver failed");
    return es.eigenvalues().cwiseAbs().sum();
  }
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

Index numerical_rank(const Matrix& m, double threshold) {
  Eigen::BDCSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 0;
  const double cut = threshold * std::max(1.0, s(0));
  Index r = 0;
  for (Index i = 0; i < s.size(); ++i) r += s(i) > cut ? 1 : 0;
  return r;
}

// ---------------------------------------------------------------------------
// Primitive operations

PseudoObservable dagger(const PseudoObservable& p) {
  return PseudoObservable(p.matrix().adjoint(), p.unit_tag());
}

Observable real_part(const PseudoObservable& p) {
  return Observable(0.5 * (p.matrix() + p.matrix().adjoint()), p.unit_tag());
}

Observable imag_part(const PseudoObservable& p) {
  return Observable((p.matrix() - p.matrix().adjoint()) / (2.0 * kI), p.unit_tag());
}

Complex trace(const PseudoObservable& p) { return p.matrix().trace(); }

Complex inner_product(const PseudoObservable& x, const PseudoObservable& y) {
  require_same_dim(x.dim(), y.dim(), "inner_product");
  // tr(X^dagger Y) = sum_ab conj(X_ab) Y_ab
  return (x.matrix().conjugate().array() * y.matrix().array()).sum();
}

PseudoObservable commutator(const PseudoObservable& a, const PseudoObservable& b) {
  require_same_dim(a.dim(), b.dim(), "commutator");
  return PseudoObservable(a.matrix() * b.matrix() - b.matrix() * a.matrix());
}

bool is_compatible(const PseudoObservable& a, const PseudoObservable& b, double tol) {
  const double c = spectral_norm(commutator(a, b));
  return c <= tol * spectral_norm(a) * spectral_norm(b);
}

// ---------------------------------------------------------------------------
// ProjectorBasis

ProjectorBasis::ProjectorBasis(std::vector<Matrix> projectors, std::vector<double> labels)
    : projectors_(std::move(projectors)), labels_(std::move(labels)) {
  if (projectors_.empty()) throw InvalidBasis("projector basis must not be empty");
  const Index d = projectors_.front().rows();
  for (const auto& p : projectors_) {
    if (p.rows() != d || p.cols() != d) throw DimensionMismatch("projector basis: inconsistent dims");
  }
  if (!labels_.empty() && labels_.size() != projectors_.size()) {
    throw InvalidArgument("projector basis: label count does not match projector count");
  }
}

ProjectorBasis ProjectorBasis::trusted(std::vector<Matrix> projectors, std::vector<double> labels) {
  return ProjectorBasis(std::move(projectors), std::move(labels));
}

ProjectorBasis ProjectorBasis::checked(std::vector<Matrix> projectors, std::vector<double> labels) {
  ProjectorBasis b(std::move(projectors), std::move(labels));
  const auto r = b.residuals();
  if (!r.ok()) {
    std::ostringstream os;
    os << "invalid projector basis: idempotency " << r.idempotency << ", hermiticity "
       << r.hermiticity << ", exclusivity " << r.exclusivity << ", closure " << r.closure;
    throw InvalidBasis(os.str());
  }
  return b;
}

ProjectorBasis ProjectorBasis::coordinate(Index dim) {
  std::vector<Matrix> ps;
  ps.reserve(static_cast<std::size_t>(dim));
  for (Index i = 0; i < dim; ++i) {
    Matrix e = Matrix::Zero(dim, dim);
    e(i, i) = 1.0;
    ps.push_back(std::move(e));
  }
  return ProjectorBasis(std::move(ps), {});
}

Index ProjectorBasis::dim() const { return projectors_.empty() ? 0 : projectors_.front().rows(); }

std::vector<Index> ProjectorBasis::ranks() const {
  return par::map_indexed(projectors_.size(),
                          [&](std::size_t i) { return numerical_rank(projectors_[i]); });
}

bool ProjectorBasis::elementary() const {
  const auto r = ranks();
  return std::all_of(r.begin(), r.end(), [](Index x) { return x == 1; });
}

bool ProjectorBasis::Residuals::ok(double tol) const {
  return idempotency <= tol && hermiticity <= tol::herm && exclusivity <= tol && closure <= tol;
}

ProjectorBasis::Residuals ProjectorBasis::residuals() const {
  Residuals r;
  const Index d = dim();
  Matrix sum = Matrix::Zero(d, d);
  for (const auto& p : projectors_) {
    r.idempotency = std::max(r.idempotency, spectral_norm(Matrix(p * p - p)));
    r.hermiticity = std::max(r.hermiticity, hermiticity_defect(p));
    sum += p;
  }
  r.closure = spectral_norm(Matrix(sum - Matrix::Identity(d, d)));
  r.exclusivity = par::max_cross_overlap(par::range_bases(projectors_));
  return r;
}

Matrix SpectralDecomposition::reconstruct() const {
  const Index d = basis.dim();
  Matrix out = Matrix::Zero(d, d);
  for (std::size_t j = 0; j < eigenvalues.size(); ++j) out += eigenvalues[j] * basis.projector(j);
  return out;
}

// ---------------------------------------------------------------------------
// Spectral decomposition and spectral calculus

SpectralDecomposition spectral_decompose(const Observable& a, double grouping_tol) {
  const Matrix h = 0.5 * (a.matrix() + a.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) throw EigenSolverFailure("spectral_decompose: eigensolver failed");
  const auto& ev = es.eigenvalues();
  const Matrix& vecs = es.eigenvectors();
  const Index d = ev.size();
  const double radius = std::max(std::abs(ev(0)), std::abs(ev(d - 1)));
  const double thr = grouping_tol * std::max(1.0, radius);

  SpectralDecomposition sd;
  sd.eigenvectors = vecs;
  std::vector<Matrix> projectors;
  Index start = 0;
  for (Index i = 1; i <= d; ++i) {
    if (i == d || ev(i) - ev(i - 1) > thr) {
      const Index count = i - start;
      const auto block = vecs.middleCols(start, count);
      projectors.emplace_back(block * block.adjoint());
      sd.eigenvalues.push_back(ev.segment(start, count).mean());
      sd.multiplicities.push_back(count);
      start = i;
    }
  }
  sd.basis = ProjectorBasis::trusted(std::move(projectors), sd.eigenvalues);
  return sd;
}

namespace {

template <class Values>
Matrix assemble(const SpectralDecomposition& sd, const Values& values) {
  const Index d = sd.eigenvectors.rows();
  Vector diag(d);
  Index col = 0;
  for (std::size_t j = 0; j < sd.eigenvalues.size(); ++j) {
    for (Index m = 0; m < sd.multiplicities[j]; ++m) diag(col++) = values[j];
  }
  return sd.eigenvectors * diag.asDiagonal() * sd.eigenvectors.adjoint();
}

void require_finite(Complex v, double at) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
    std::ostringstream os;
    os << "function undefined at spectrum point " << at;
    throw DomainError(os.str());
  }
}

}  // namespace

Observable apply_function(const RealFunction& f, const SpectralDecomposition& sd) {
  std::vector<double> values;
  values.reserve(sd.eigenvalues.size());
  for (double a : sd.eigenvalues) {
    const double v = f(a);
    require_finite(v, a);
    values.push_back(v);
  }
  const Matrix m = assemble(sd, values);
  return Observable(0.5 * (m + m.adjoint()));
}

Observable apply_function(const RealFunction& f, const Observable& a) {
  return apply_function(f, spectral_decompose(a));
}

Observable apply_function(const std::vector<std::pair<double, double>>& table, const Observable& a) {
  const auto sd = spectral_decompose(a);
  const double radius = std::max(std::abs(sd.eigenvalues.front()), std::abs(sd.eigenvalues.back()));
  const double thr = tol::grouping * std::max(1.0, radius);
  return apply_function(
      [&](double x) {
        for (const auto& [abscissa, value] : table) {
          if (std::abs(abscissa - x) <= thr) return value;
        }
        std::ostringstream os;
        os << "tabulated function has no entry for spectrum point " << x;
        throw DomainError(os.str());
      },
      sd);
}

PseudoObservable apply_complex_function(const ComplexFunction& f, const SpectralDecomposition& sd) {
  std::vector<Complex> values;
  values.reserve(sd.eigenvalues.size());
  for (double a : sd.eigenvalues) {
    const Complex v = f(a);
    require_finite(v, a);
    values.push_back(v);
  }
  return PseudoObservable(assemble(sd, values));
}

PseudoObservable apply_complex_function(const ComplexFunction& f, const Observable& a) {
  return apply_complex_function(f, spectral_decompose(a));
}

PseudoObservable unitary_exponential(const Observable& g) {
  return apply_complex_function([](double x) { return std::exp(kI * x); }, g);
}

// ---------------------------------------------------------------------------
// Dyad bases

DyadBasis DyadBasis::trusted(ProjectorBasis base, std::vector<Matrix> dyads) {
  if (dyads.size() != base.size() * base.size()) {
    throw InvalidArgument("dyad basis: expected size()^2 dyads");
  }
  return DyadBasis(std::move(base), std::move(dyads));
}

double DyadBasis::invariant_residual() const {
  const std::size_t k = size();
  double worst = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    worst = std::max(worst, spectral_norm(Matrix(dyad(j, j) - base_.projector(j))));
    for (std::size_t l = 0; l < k; ++l) {
      worst = std::max(worst, spectral_norm(Matrix(dyad(j, l).adjoint() - dyad(l, j))));
    }
  }
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t l = 0; l < k; ++l) {
      for (std::size_t lp = 0; lp < k; ++lp) {
        for (std::size_t m = 0; m < k; ++m) {
          Matrix prod = dyad(j, l) * dyad(lp, m);
          if (l == lp) prod -= dyad(j, m);
          worst = std::max(worst, spectral_norm(prod));
        }
      }
    }
  }
  return worst;
}

DyadBasis dyad_basis_from(const ProjectorBasis& base, const std::vector<Matrix>& cores) {
  const std::size_t k = base.size();
  if (cores.size() != k * k) throw InvalidArgument("dyad_basis_from: expected size()^2 cores");
  if (!base.elementary()) throw InvalidBasis("dyad_basis_from: base projectors must be rank 1");
  std::vector<Matrix> dyads;
  dyads.reserve(k * k);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t l = 0; l < k; ++l) {
      const Matrix& core = cores[j * k + l];
      require_same_dim(core.rows(), base.dim(), "dyad_basis_from");
      Matrix raw = base.projector(j) * core * base.projector(l);
      const double size = raw.norm();
      if (size <= tol::rank * std::max(1.0, core.norm())) {
        throw ZeroDyad("dyad_basis_from: core (" + std::to_string(j) + "," + std::to_string(l) +
                       ") is annihilated by its flanking projectors");
      }
      dyads.push_back(raw / size);
    }
  }
  auto out = DyadBasis::trusted(base, std::move(dyads));
  const double r = out.invariant_residual();
  if (r > tol::recon) {
    std::ostringstream os;
    os << "dyad_basis_from: cores give an inconsistent dyad family (residual " << r << ")";
    throw InvalidBasis(os.str());
  }
  return out;
}

}  // namespace pobs
