#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pobs/errors.hpp"
#include "pobs/random.hpp"
#include "pobs/states.hpp"

using namespace pobs;

TEST_SUITE("states") {

TEST_CASE("state vectors validate their norm") {
  Vector v = Vector::Zero(3);
  v(0) = 1.0;
  CHECK_NOTHROW(StateVector{v});
  v(0) = 1.0 + 1e-9;
  CHECK_THROWS_AS(StateVector{v}, InvalidState);
  CHECK(StateVector::normalized(v).amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(StateVector::normalized(Vector::Zero(3)), InvalidState);
  const auto b = StateVector::basis(4, 2);
  CHECK(b.amplitudes()(2) == Complex(1.0, 0.0));
  CHECK_THROWS(StateVector::basis(4, 4));
}

TEST_CASE("density validation reports the failing test") {
  CHECK_NOTHROW(DensityObservable(Matrix::Identity(3, 3) / 3.0));
  CHECK_THROWS_AS(DensityObservable(Matrix::Identity(3, 3)), InvalidState);

  Matrix neg = Matrix::Zero(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  try {
    DensityObservable d(neg);
    FAIL("negative density accepted");
  } catch (const InvalidState& e) {
    const std::string what = e.what();
    CHECK(what.find("positiv") != std::string::npos);
    CHECK(what.find("-0.5") != std::string::npos);
  }
  const auto v = validate_density(neg);
  CHECK_FALSE(v.ok());
  CHECK(v.min_eigenvalue == doctest::Approx(-0.5));
  CHECK(v.trace_defect < 1e-15);

  // Grazing negative eigenvalue inside the tolerance is accepted.
  Matrix graze = Matrix::Zero(2, 2);
  graze(0, 0) = 1.0 + 5e-11;
  graze(1, 1) = -5e-11;
  CHECK(validate_density(graze).ok());

  Matrix off = Matrix::Identity(2, 2) / 2.0;
  off(0, 1) = 0.3;
  CHECK_THROWS_AS(DensityObservable{off}, InvalidState);
}

TEST_CASE("expectations") {
  CHECK(std::abs(expectation(DensityObservable::maximally_mixed(5), PseudoObservable::identity(5)) - 1.0) < 1e-15);

  auto rng = rnd::stream(41);
  const Observable h(rnd::hermitian(4, rng));
  const Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
  const StateVector eig(es.eigenvectors().col(2));
  const auto pure = pure_density(eig);
  CHECK(std::abs(expectation(pure, h) - es.eigenvalues()(2)) < 1e-12);
  CHECK(std::abs(expectation(eig, h) - es.eigenvalues()(2)) < 1e-12);

  const DensityObservable d(rnd::density(4, rng));
  const PseudoObservable p(rnd::complex_matrix(4, rng));
  CHECK(std::abs(expectation(d, p) - oracle::trace_product(d.matrix(), p.matrix())) < 1e-12);
  CHECK(std::abs(expectation(d, h).imag()) < 1e-12);
  CHECK_THROWS_AS(expectation(d, PseudoObservable::identity(3)), DimensionMismatch);
}

TEST_CASE("pure densities") {
  const auto e1 = pure_density(StateVector::basis(3, 1));
  CHECK(oracle::max_abs(e1.matrix() - ProjectorBasis::coordinate(3).projector(1)) == 0.0);

  Vector plus(2);
  plus << 1.0, 1.0;
  const auto half = pure_density(StateVector::normalized(plus));
  CHECK(oracle::max_abs(half.matrix() - Matrix::Constant(2, 2, 0.5)) < 1e-15);
  CHECK(std::abs(trace(half.observable()) - 1.0) < 1e-15);

  auto rng = rnd::stream(42);
  const StateVector psi(rnd::state(5, rng));
  const auto rho = pure_density(psi);
  CHECK(numerical_rank(rho.matrix()) == 1);
  CHECK(oracle::max_abs(rho.matrix() * rho.matrix() - rho.matrix()) < 1e-14);
  const PseudoObservable p(rnd::complex_matrix(5, rng));
  CHECK(std::abs(expectation(rho, p) - expectation(psi, p)) < 1e-12);

  // <psi | tau(P) psi> = <W^dagger psi | P W^dagger psi>.
  const auto t = Transformation::from_unitary(PseudoObservable(rnd::unitary(5, rng)));
  const Vector moved = t.unitary().matrix().adjoint() * psi.amplitudes();
  CHECK(std::abs(expectation(psi, apply(t, p)) - moved.dot(p.matrix() * moved)) < 1e-12);
}

TEST_CASE("state and density transformations") {
  auto rng = rnd::stream(43);
  const StateVector psi(rnd::state(4, rng));
  const DensityObservable d(rnd::density(4, rng));
  const auto id = Transformation::identity(4);
  CHECK((transform_state(id, psi).amplitudes() - psi.amplitudes()).norm() < 1e-15);
  CHECK(oracle::max_abs(transform_density(id, d).matrix() - d.matrix()) < 1e-15);

  const auto t = Transformation::from_unitary(PseudoObservable(rnd::unitary(4, rng)));
  CHECK(transform_state(t, psi).amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-13));
  const auto dt = transform_density(t, d);
  CHECK(std::abs(trace(dt.observable()) - 1.0) < 1e-13);
  CHECK(dt.min_eigenvalue() >= -1e-12);
  CHECK(validate_density(dt.matrix()).ok());
}

TEST_CASE("duality and purity diagrams") {
  auto rng = rnd::stream(44);
  for (Index dim : {2, 4, 8}) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto t = Transformation::from_unitary(PseudoObservable(rnd::unitary(dim, rng)));
      const DensityObservable d(rnd::density(dim, rng));
      const PseudoObservable p(rnd::complex_matrix(dim, rng));
      const auto r = duality_check(t, d, p);
      CHECK(r.pass);
      // Both sides evaluated directly.
      const Matrix w = t.unitary().matrix();
      const Complex heis = oracle::trace_product(d.matrix(), w * p.matrix() * w.adjoint());
      const Complex schr = oracle::trace_product(w.adjoint() * d.matrix() * w, p.matrix());
      CHECK(std::abs(heis - schr) < 1e-10 * (1.0 + std::abs(heis)));
      CHECK(purity_diagram_check(t, StateVector(rnd::state(dim, rng))).pass);
    }
  }
}

TEST_CASE("density compatible with the generatrix is invariant") {
  auto rng = rnd::stream(45);
  const Observable g(rnd::generatrix(4, rng));
  const auto t = Transformation::from_generatrix(g);
  const auto weights = apply_function([](double x) { return std::exp(-x); }, g);
  const Matrix d = weights.matrix() / trace(weights).real();
  const DensityObservable dens(d);
  CHECK(oracle::max_abs(transform_density(t, dens).matrix() - d) < 1e-12);
}

}  // TEST_SUITE
