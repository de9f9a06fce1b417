// State vectors, density observables and the expectation bookkeeping that
// ties the Heisenberg and Schroedinger pictures together:
// <tau(P)> = <D|tau(P)> = <tau^-1(D)|P>.

#pragma once

#include "pobs/core_algebra.hpp"
#include "pobs/report.hpp"
#include "pobs/transforms.hpp"

namespace pobs {

class StateVector {
 public:
  /// Throws InvalidState when | ||psi|| - 1 | > tol::state_norm.
  explicit StateVector(Vector amplitudes);
  /// Rescales to unit norm; throws InvalidState for the zero vector.
  static StateVector normalized(Vector amplitudes);
  static StateVector basis(Index dim, Index index);

  Index dim() const noexcept { return v_.size(); }
  const Vector& amplitudes() const noexcept { return v_; }

 private:
  struct Trusted {};
  StateVector(Vector v, Trusted) : v_(std::move(v)) {}
  Vector v_;
  friend StateVector transform_state(const Transformation& t, const StateVector& psi);
};

class DensityObservable {
 public:
  /// Validates Hermiticity, unit trace (1e-10) and positivity (smallest
  /// eigenvalue >= -1e-10); throws InvalidState naming the failing test and,
  /// for positivity, the most negative eigenvalue.
  explicit DensityObservable(const Matrix& m);
  static DensityObservable maximally_mixed(Index dim);

  Index dim() const noexcept { return d_.dim(); }
  const Observable& observable() const noexcept { return d_; }
  const Matrix& matrix() const noexcept { return d_.matrix(); }
  double min_eigenvalue() const noexcept { return min_eig_; }

 private:
  Observable d_;
  double min_eig_ = 0.0;
};

struct DensityValidation {
  double hermiticity = 0.0;
  double trace_defect = 0.0;
  double min_eigenvalue = 0.0;
  bool ok() const;
};
DensityValidation validate_density(const Matrix& m);

/// <D|P> = tr(D^dagger P) = tr(D P).
Complex expectation(const DensityObservable& d, const PseudoObservable& p);
/// <psi|P psi>.
Complex expectation(const StateVector& psi, const PseudoObservable& p);

DensityObservable pure_density(const StateVector& psi);

/// psi' = W^dagger psi.
StateVector transform_state(const Transformation& t, const StateVector& psi);
/// D' = tau^-1(D) = W^dagger D W.
DensityObservable transform_density(const Transformation& t, const DensityObservable& d);

/// Compares expectation(d, apply(t, P)) with expectation(transform_density(t, d), P).
CheckReport duality_check(const Transformation& t, const DensityObservable& d,
                          const PseudoObservable& p, double tol = 1e-10);
/// pure_density(transform_state(psi)) against transform_density(pure_density(psi)).
CheckReport purity_diagram_check(const Transformation& t, const StateVector& psi,
                                 double tol = 1e-10);

}  // namespace pobs
