// Value types and primitive operations of the pseudo-observable algebra:
// dense complex matrices with their Hermitian structure, spectral
// decomposition into projector bases, dyad bases, and functions of
// observables (spectral calculus).

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pobs/tolerances.hpp"

namespace pobs {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

inline constexpr Complex kI{0.0, 1.0};

/// Generic element of the algebra: a square complex matrix of dimension >= 2
/// with an optional, purely advisory, physical-unit label.
class PseudoObservable {
 public:
  explicit PseudoObservable(Matrix entries,
                            std::optional<std::string> unit_tag = std::nullopt);

  static PseudoObservable identity(Index dim);
  static PseudoObservable zero(Index dim);
  static PseudoObservable scalar(Complex value, Index dim);

  Index dim() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  Complex operator()(Index row, Index col) const { return m_(row, col); }
  const std::optional<std::string>& unit_tag() const noexcept { return tag_; }
  PseudoObservable with_unit(std::optional<std::string> tag) const;

  PseudoObservable operator-() const;
  friend PseudoObservable operator+(const PseudoObservable& a, const PseudoObservable& b);
  friend PseudoObservable operator-(const PseudoObservable& a, const PseudoObservable& b);
  friend PseudoObservable operator*(const PseudoObservable& a, const PseudoObservable& b);
  friend PseudoObservable operator*(Complex s, const PseudoObservable& a);
  friend PseudoObservable operator*(const PseudoObservable& a, Complex s) { return s * a; }

 private:
  Matrix m_;
  std::optional<std::string> tag_;
};

/// Hermitian pseudo-observable. Construction validates Hermiticity at
/// tol::herm relative to the largest entry and throws NotHermitian otherwise.
class Observable : public PseudoObservable {
 public:
  explicit Observable(Matrix entries, std::optional<std::string> unit_tag = std::nullopt);
  explicit Observable(const PseudoObservable& p);

  static Observable identity(Index dim);
  static Observable zero(Index dim);
};

bool is_hermitian(const Matrix& m, double rel_tol = tol::herm);
// max |m - m^dagger| / max(|m_ij|); zero for the zero matrix.
double hermiticity_defect(const Matrix& m);

/// Complete family of mutually exclusive Hermitian idempotents summing to the
/// identity, optionally labelled by real eigenvalues.
class ProjectorBasis {
 public:
  ProjectorBasis() = default;

  /// Validates every invariant (idempotent, Hermitian, exclusive, closed)
  /// and throws InvalidBasis with the offending residual on failure.
  static ProjectorBasis checked(std::vector<Matrix> projectors,
                                std::vector<double> labels = {});
  /// Skips validation; for constructions that hold the invariants by
  /// construction (eigenvector outer products, conjugated bases).
  static ProjectorBasis trusted(std::vector<Matrix> projectors,
                                std::vector<double> labels = {});
  static ProjectorBasis coordinate(Index dim);

  std::size_t size() const noexcept { return projectors_.size(); }
  Index dim() const;
  const Matrix& projector(std::size_t i) const { return projectors_.at(i); }
  const std::vector<Matrix>& projectors() const noexcept { return projectors_; }
  const std::vector<double>& labels() const noexcept { return labels_; }
  bool has_labels() const noexcept { return !labels_.empty(); }
  std::vector<Index> ranks() const;
  bool elementary() const;

  struct Residuals {
    double idempotency = 0.0;
    double hermiticity = 0.0;
    double exclusivity = 0.0;
    double closure = 0.0;
    bool ok(double tol = tol::recon) const;
  };
  Residuals residuals() const;

 private:
  ProjectorBasis(std::vector<Matrix> projectors, std::vector<double> labels);
  std::vector<Matrix> projectors_;
  std::vector<double> labels_;
};

/// A = sum_j a_j I_j with strictly increasing distinct a_j.
struct SpectralDecomposition {
  std::vector<double> eigenvalues;
  ProjectorBasis basis;
  std::vector<Index> multiplicities;
  // Orthonormal eigenvectors, columns grouped to match `eigenvalues`.
  Matrix eigenvectors;

  Matrix reconstruct() const;
};

/// Matrix-unit family Gamma_jk over an elementary projector basis.
class DyadBasis {
 public:
  Index dim() const { return base_.dim(); }
  std::size_t size() const noexcept { return base_.size(); }
  const Matrix& dyad(std::size_t j, std::size_t k) const { return dyads_.at(j * size() + k); }
  const ProjectorBasis& base() const noexcept { return base_; }

  /// Largest violation of Gamma_jj = I_j, Gamma_jk^dagger = Gamma_kj and
  /// Gamma_jl Gamma_l'k = delta_ll' Gamma_jk.
  double invariant_residual() const;

  static DyadBasis trusted(ProjectorBasis base, std::vector<Matrix> dyads);

 private:
  DyadBasis(ProjectorBasis base, std::vector<Matrix> dyads)
      : base_(std::move(base)), dyads_(std::move(dyads)) {}
  ProjectorBasis base_;
  std::vector<Matrix> dyads_;
};

PseudoObservable dagger(const PseudoObservable& p);
Observable real_part(const PseudoObservable& p);
Observable imag_part(const PseudoObservable& p);

Complex trace(const PseudoObservable& p);
/// <X|Y> = tr(X^dagger Y).
Complex inner_product(const PseudoObservable& x, const PseudoObservable& y);

PseudoObservable commutator(const PseudoObservable& a, const PseudoObservable& b);
/// True iff ||[A,B]|| <= tol * ||A|| * ||B|| (spectral norms).
bool is_compatible(const PseudoObservable& a, const PseudoObservable& b, double tol);

double spectral_norm(const Matrix& m);
double spectral_norm(const PseudoObservable& p);
/// Sum of singular values.
double trace_norm(const Matrix& m);
Index numerical_rank(const Matrix& m, double threshold = tol::rank);

/// Groups eigenvalues within grouping_tol * max(1, spectral radius).
SpectralDecomposition spectral_decompose(const Observable& a,
                                         double grouping_tol = tol::grouping);

using RealFunction = std::function<double(double)>;
using ComplexFunction = std::function<Complex(double)>;

/// f(A) = sum_j f(a_j) I_j. Throws DomainError if f is non-finite at a
/// spectrum point.
Observable apply_function(const RealFunction& f, const Observable& a);
Observable apply_function(const RealFunction& f, const SpectralDecomposition& sd);
/// Tabulated f: each spectrum point must match a table abscissa within the
/// grouping tolerance.
Observable apply_function(const std::vector<std::pair<double, double>>& table,
                          const Observable& a);
PseudoObservable apply_complex_function(const ComplexFunction& f, const Observable& a);
PseudoObservable apply_complex_function(const ComplexFunction& f,
                                        const SpectralDecomposition& sd);

/// exp(i G) by spectral calculus.
PseudoObservable unitary_exponential(const Observable& g);

/// Gamma_jk = I_j C_jk I_k, rescaled to unit modulus. `cores` is row-major
/// with size() * size() entries. Throws ZeroDyad when a core is annihilated
/// by its flanking projectors and InvalidBasis when the rescaled family
/// violates the dyad multiplication rules.
DyadBasis dyad_basis_from(const ProjectorBasis& base, const std::vector<Matrix>& cores);

void require_same_dim(Index a, Index b, const char* where);

}  // namespace pobs
