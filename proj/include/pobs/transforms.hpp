// Transformations as unitary conjugations tau(P) = W P W^dagger, with the
// generatrix G (W = exp(iG), spectrum folded into (-pi, pi]) and the
// invariance checks that follow from the automorphism axioms.

#pragma once

#include <vector>

#include "pobs/core_algebra.hpp"
#include "pobs/report.hpp"

namespace pobs {

class Transformation {
 public:
  /// Throws NotUnitary when ||W^dagger W - 1|| or ||W W^dagger - 1||
  /// exceeds tol::recon.
  static Transformation from_unitary(const PseudoObservable& w);
  static Transformation from_generatrix(const Observable& g);
  static Transformation identity(Index dim);

  Index dim() const noexcept { return w_.dim(); }
  const PseudoObservable& unitary() const noexcept { return w_; }
  const Observable& generatrix() const noexcept { return g_; }
  /// theta_j for each column of eigenvectors(), in (-pi, pi].
  const std::vector<double>& phases() const noexcept { return phases_; }
  const Matrix& eigenvectors() const noexcept { return vecs_; }
  /// W = sum_j e^{i theta_j} I_j with phases grouped by angular distance.
  ProjectorBasis phase_basis(double grouping_tol = tol::grouping) const;
  /// max_j |alpha_j^2 + beta_j^2 - 1| from the joint real/imaginary
  /// decomposition; zero for transformations built from a generatrix.
  double unit_circle_residual() const noexcept { return circle_residual_; }

 private:
  Transformation(PseudoObservable w, Observable g, Matrix vecs, std::vector<double> phases,
                 double circle_residual);
  static Transformation from_eigendata(Matrix vecs, std::vector<double> phases, double circle);

  PseudoObservable w_;
  Observable g_;
  Matrix vecs_;
  std::vector<double> phases_;
  double circle_residual_ = 0.0;

  friend Transformation inverse(const Transformation& t);
};

/// Maps theta into (-pi, pi]; -pi itself goes to +pi.
double fold_phase(double theta);

PseudoObservable apply(const Transformation& t, const PseudoObservable& p);
Observable apply(const Transformation& t, const Observable& a);

Transformation inverse(const Transformation& t);
/// apply(compose(t1, t2), P) == apply(t1, apply(t2, P)); W = W1 W2.
Transformation compose(const Transformation& t1, const Transformation& t2);

ProjectorBasis transform_basis(const Transformation& t, const ProjectorBasis& basis);
DyadBasis transform_basis(const Transformation& t, const DyadBasis& basis);

/// ||tau(A) - A|| <= tol * ||A||.
bool is_invariant(const Transformation& t, const Observable& a, double tol);
/// Evaluates both sides of "invariant iff compatible with G" and passes when
/// they agree.
CheckReport invariance_characterization(const Transformation& t, const Observable& a, double tol);

CheckReport spectrum_preservation_check(const Transformation& t, const Observable& a);
CheckReport trace_invariance_check(const Transformation& t, const PseudoObservable& p);
CheckReport inner_product_invariance_check(const Transformation& t, const PseudoObservable& x,
                                           const PseudoObservable& y);
/// Additivity, multiplicativity, scalar fixing and dagger-equivariance, each
/// as a relative residual against `tol`.
CheckReport automorphism_check(const Transformation& t, const PseudoObservable& a,
                               const PseudoObservable& b, Complex gamma, double tol = 1e-10);

}  // namespace pobs
