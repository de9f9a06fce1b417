#include "pobs/states.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pobs/errors.hpp"

namespace pobs {

StateVector::StateVector(Vector amplitudes) : v_(std::move(amplitudes)) {
  if (v_.size() < 2) throw InvalidState("state vector: dim must be >= 2");
  const double dev = std::abs(v_.norm() - 1.0);
  if (!(dev <= tol::state_norm)) {
    std::ostringstream os;
    os << "state vector is not normalized (| ||psi|| - 1 | = " << dev << ")";
    throw InvalidState(os.str());
  }
}

StateVector StateVector::normalized(Vector amplitudes) {
  const double n = amplitudes.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidState("state vector: cannot normalize a zero vector");
  return StateVector(amplitudes / n);
}

StateVector StateVector::basis(Index dim, Index index) {
  if (index < 0 || index >= dim) throw InvalidArgument("state vector: basis index out of range");
  Vector v = Vector::Zero(dim);
  v(index) = 1.0;
  return StateVector(std::move(v));
}

bool DensityValidation::ok() const {
  return hermiticity <= tol::herm && trace_defect <= tol::state_norm &&
         min_eigenvalue >= -tol::density_positivity;
}

DensityValidation validate_density(const Matrix& m) {
  if (m.rows() != m.cols()) throw InvalidState("density: matrix is not square");
  DensityValidation v;
  v.hermiticity = hermiticity_defect(m);
  v.trace_defect = std::abs(m.trace() - Complex(1.0));
  const Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw EigenSolverFailure("density: eigensolver failed");
  v.min_eigenvalue = es.eigenvalues().minCoeff();
  return v;
}

namespace {
Matrix checked_density(const Matrix& m, double& min_eig) {
  const auto v = validate_density(m);
  min_eig = v.min_eigenvalue;
  std::ostringstream os;
  if (v.hermiticity > tol::herm) {
    os << "density is not Hermitian (relative defect " << v.hermiticity << ")";
  } else if (v.trace_defect > tol::state_norm) {
    os << "density trace differs from 1 by " << v.trace_defect;
  } else if (v.min_eigenvalue < -tol::density_positivity) {
    os << "density is not positive (most negative eigenvalue " << v.min_eigenvalue << ")";
  } else {
    return 0.5 * (m + m.adjoint());
  }
  throw InvalidState(os.str());
}
}  // namespace

DensityObservable::DensityObservable(const Matrix& m)
    : d_(Observable::identity(std::max<Index>(m.rows(), 2))) {
  if (m.rows() < 2) throw InvalidState("density: dim must be >= 2");
  d_ = Observable(checked_density(m, min_eig_));
}

DensityObservable DensityObservable::maximally_mixed(Index dim) {
  return DensityObservable(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

Complex expectation(const DensityObservable& d, const PseudoObservable& p) {
  return inner_product(d.observable(), p);
}

Complex expectation(const StateVector& psi, const PseudoObservable& p) {
  require_same_dim(psi.dim(), p.dim(), "expectation");
  return psi.amplitudes().dot(p.matrix() * psi.amplitudes());
}

DensityObservable pure_density(const StateVector& psi) {
  const Vector& v = psi.amplitudes();
  return DensityObservable(v * v.adjoint());
}

StateVector transform_state(const Transformation& t, const StateVector& psi) {
  require_same_dim(t.dim(), psi.dim(), "transform_state");
  Vector out = t.unitary().matrix().adjoint() * psi.amplitudes();
  return StateVector(std::move(out), StateVector::Trusted{});
}

DensityObservable transform_density(const Transformation& t, const DensityObservable& d) {
  require_same_dim(t.dim(), d.dim(), "transform_density");
  const Matrix& w = t.unitary().matrix();
  return DensityObservable(w.adjoint() * d.matrix() * w);
}

CheckReport duality_check(const Transformation& t, const DensityObservable& d,
                          const PseudoObservable& p, double tol) {
  CheckReport r("picture_duality");
  const Complex heis = expectation(d, apply(t, p));
  const Complex schr = expectation(transform_density(t, d), p);
  const double dev = std::abs(heis - schr);
  r.add("duality", dev).add("scale", 1.0 + std::abs(heis));
  r.primary = dev;
  r.require(dev <= tol * (1.0 + std::abs(heis)));
  return r;
}

CheckReport purity_diagram_check(const Transformation& t, const StateVector& psi, double tol) {
  CheckReport r("purity_diagram");
  const Matrix a = pure_density(transform_state(t, psi)).matrix();
  const Matrix b = transform_density(t, pure_density(psi)).matrix();
  const double dev = spectral_norm(Matrix(a - b));
  const double norm_dev = std::abs(transform_state(t, psi).amplitudes().norm() - 1.0);
  r.add("diagram", dev).add("norm", norm_dev);
  r.require(dev <= tol && norm_dev <= tol);
  return r;
}

}  // namespace pobs
