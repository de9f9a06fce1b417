// Linear-spectrum coordinates on 2n levels, modular translations, and the
// conjugate momentum built from the discrete Fourier vectors of the
// coordinate basis (clock-and-shift pair). Levels are labelled
// j = -n, ..., n-1 and stored at matrix index j + n.

#pragma once

#include <functional>
#include <vector>

#include "pobs/core_algebra.hpp"
#include "pobs/report.hpp"

namespace pobs {

class LinearSpectrumObservable {
 public:
  /// diag(-n eps, ..., (n-1) eps) with the coordinate projector basis.
  /// Throws InvalidArgument unless n >= 2 and epsilon > 0.
  static LinearSpectrumObservable make(int n, double epsilon,
                                       std::optional<std::string> unit_tag = std::nullopt);

  int n() const noexcept { return n_; }
  double epsilon() const noexcept { return eps_; }
  Index dim() const noexcept { return 2 * n_; }
  const Observable& observable() const noexcept { return q_; }
  const ProjectorBasis& basis() const noexcept { return basis_; }
  /// Eigenvalue j * epsilon for label j in [-n, n).
  double level(int j) const noexcept { return j * eps_; }
  static Index index_of(int j, int n) noexcept { return static_cast<Index>(j + n); }
  /// Label arithmetic modulo 2n, result in [-n, n).
  static int wrap_label(long j, int n) noexcept;

 private:
  LinearSpectrumObservable(int n, double eps, Observable q, ProjectorBasis basis)
      : n_(n), eps_(eps), q_(std::move(q)), basis_(std::move(basis)) {}
  int n_;
  double eps_;
  Observable q_;
  ProjectorBasis basis_;
};

inline LinearSpectrumObservable make_position(int n, double epsilon) {
  return LinearSpectrumObservable::make(n, epsilon);
}

/// delta = xi + steps * epsilon with 0 <= xi < epsilon.
struct TranslationSpec {
  double delta = 0.0;
  long steps = 0;
  double xi = 0.0;

  /// Remainders within rel_tol * epsilon of 0 or epsilon snap to the lattice.
  static TranslationSpec decompose(double delta, double epsilon, double rel_tol = 1e-9);
};

struct CanonicalPair {
  LinearSpectrumObservable q;
  PseudoObservable s;           // minimal shift, S e_j = e_{j-1}
  Observable p;                 // conjugate momentum
  double hbar;
  ProjectorBasis momentum_basis;  // Fourier projectors, k = -n .. n-1
  Matrix fourier;               // column k + n is f_k
  std::vector<double> momenta;  // p_k = k pi hbar / (n eps)

  int n() const noexcept { return q.n(); }
  double epsilon() const noexcept { return q.epsilon(); }
  Index dim() const noexcept { return q.dim(); }
  /// Resolution of the momentum spectrum, pi hbar / (n eps).
  double momentum_resolution() const noexcept;
};

/// Throws InvalidArgument unless hbar > 0.
CanonicalPair make_canonical_pair(const LinearSpectrumObservable& q, double hbar = 1.0);

/// The 2n x 2n cyclic permutation with S e_j = e_{j-1}, built directly.
Matrix shift_permutation(int n);
/// S^s by repeated squaring; s is reduced modulo 2n first.
Matrix shift_power(const CanonicalPair& pair, long s);

/// tau_delta(Q) = S^s Q S^-s. Throws NonLatticeTranslation unless delta is an
/// integer multiple of epsilon.
Observable translate(const CanonicalPair& pair, double delta);
/// Label image of I_j under s minimal translations: j - s (mod 2n).
int translated_label(int j, long s, int n);
/// Compares S^s I_j S^-s with I_{j-s} for every j.
CheckReport translation_label_check(const CanonicalPair& pair, long s);

/// Eigenphases of S mapped back to momenta on the window [-pi hbar/eps,
/// pi hbar/eps), sorted ascending.
std::vector<double> momenta_from_shift(const CanonicalPair& pair);
/// S^{2n} = 1, S I_j S^dagger = I_{j-1}, exp(i eps P / hbar) = S and
/// recovery of the momentum spectrum from S.
CheckReport shift_cyclicity_check(const CanonicalPair& pair);

/// Weyl obstruction diagnostics for C = [Q, P] / (i hbar).
struct WeylResidual {
  int n = 0;
  double epsilon = 0.0;
  double trace_commutator = 0.0;  // |tr [Q,P]|
  double scale = 0.0;             // ||Q|| ||P||
  double trace_identity = 0.0;    // 2n
  double commutator_norm = 0.0;   // ||[Q,P]||
  std::vector<Complex> coordinate_diagonal;  // C_jj, identically zero
  // <g_c|C|g_c> for Gaussian packets of width sqrt(n) sites centred on every
  // interior site c in [-n/2, n/2).
  std::vector<double> smeared_diagonal;
  double interior_max_dev = 0.0;

  CheckReport report() const;
};

WeylResidual weyl_residual(const CanonicalPair& pair);
double smearing_width(int n);

struct LimitRow {
  int n = 0;
  double epsilon = 0.0;
  double trace_residual = 0.0;  // |tr [Q,P]| / (||Q|| ||P||)
  double interior_max_dev = 0.0;
  double edge_defect_weight = 0.0;
};

using EpsilonRule = std::function<double(int)>;
/// epsilon = c / sqrt(n).
EpsilonRule inverse_sqrt_rule(double c = 1.0);

/// One row per n, evaluated concurrently, returned sorted by n.
std::vector<LimitRow> commutator_limit_probe(const std::vector<int>& n_list,
                                             const EpsilonRule& rule = inverse_sqrt_rule(),
                                             double hbar = 1.0);
std::vector<LimitRow> commutator_limit_probe_serial(const std::vector<int>& n_list,
                                                    const EpsilonRule& rule = inverse_sqrt_rule(),
                                                    double hbar = 1.0);

/// Complex conjugation in the orthonormal basis given by the columns of v:
/// M -> V conj(V^dagger M V) V^dagger.
Matrix conjugate_in_basis(const Matrix& m, const Matrix& v);

struct ParityDefect {
  Matrix coordinate_defect;   // conj(Q) - Q
  Matrix momentum_defect;     // conj(P) + P
  Matrix expected_defect;     // 2 p_{-n} I~_{-n}
  double defect_norm = 0.0;
  double expected_norm = 0.0;  // 2 pi hbar / eps
  double relative_weight = 0.0;  // ||conj(P)+P||_1 / ||P||_1
};

ParityDefect conjugation_parity(const CanonicalPair& pair);
/// Entrywise conjugation in the coordinate basis: conj(Q) = Q exactly and
/// conj(P) = -P up to the unpaired k = -n edge mode.
CheckReport conjugation_parity_check(const CanonicalPair& pair);

}  // namespace pobs
