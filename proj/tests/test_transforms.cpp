#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "pobs/errors.hpp"
#include "pobs/matrix_io.hpp"
#include "pobs/random.hpp"
#include "pobs/transforms.hpp"

using namespace pobs;

namespace {

double gap(const Matrix& a, const Matrix& b) { return spectral_norm(Matrix(a - b)); }

// Hermitian G with spectrum in (-pi, pi) and a random eigenbasis.
Observable random_generatrix(Index d, rnd::Rng& rng) { return Observable(rnd::generatrix(d, rng)); }

}  // namespace

TEST_SUITE("transforms") {

TEST_CASE("identity and scalar-phase unitaries") {
  const auto id = Transformation::from_unitary(PseudoObservable::identity(4));
  CHECK(oracle::max_abs(id.generatrix().matrix()) < 1e-14);

  const auto phase = Transformation::from_unitary(PseudoObservable::scalar(kI, 3));
  CHECK(gap(phase.generatrix().matrix(), (std::numbers::pi / 2) * Matrix::Identity(3, 3)) < 1e-12);

  const auto minus = Transformation::from_unitary(PseudoObservable::scalar(-1.0, 2));
  // -1 sits on the branch cut; it folds to +pi.
  CHECK(gap(minus.generatrix().matrix(), std::numbers::pi * Matrix::Identity(2, 2)) < 1e-12);

  CHECK_THROWS_AS(Transformation::from_unitary(PseudoObservable::scalar(2.0, 2)), NotUnitary);
}

TEST_CASE("fold_phase keeps the principal branch") {
  CHECK(fold_phase(0.0) == 0.0);
  CHECK(fold_phase(std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(fold_phase(-std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(fold_phase(3 * std::numbers::pi / 2) == doctest::Approx(-std::numbers::pi / 2));
}

TEST_CASE("generatrix round trip") {
  auto rng = rnd::stream(21);
  for (Index d : {2, 4, 8, 16}) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto g = random_generatrix(d, rng);
      const auto w = unitary_exponential(g);
      const auto t = Transformation::from_unitary(w);
      CHECK(gap(t.generatrix().matrix(), g.matrix()) < 1e-9);
      CHECK(t.unit_circle_residual() < 1e-12);
      for (double th : t.phases()) {
        CHECK(th > -std::numbers::pi);
        CHECK(th <= std::numbers::pi);
      }
      // Mirror: from_generatrix then re-extraction.
      const auto tg = Transformation::from_generatrix(g);
      CHECK(gap(tg.unitary().matrix(), oracle::expm(kI * g.matrix())) < 1e-10);
      CHECK(gap(Transformation::from_unitary(tg.unitary()).generatrix().matrix(), g.matrix()) < 1e-9);
    }
  }
}

TEST_CASE("degenerate unitary phases are grouped") {
  auto rng = rnd::stream(22);
  const Matrix g = rnd::hermitian_with_spectrum({0.7, 0.7, -2.0, 1.1}, rng);
  const auto t = Transformation::from_unitary(unitary_exponential(Observable(g)));
  const auto basis = t.phase_basis();
  CHECK(basis.size() == 3);
  CHECK(basis.residuals().ok());
}

TEST_CASE("apply: identity, constants, products") {
  auto rng = rnd::stream(23);
  const PseudoObservable p(rnd::complex_matrix(4, rng));
  CHECK(gap(apply(Transformation::identity(4), p).matrix(), p.matrix()) < 1e-15);

  const auto t = Transformation::from_unitary(PseudoObservable(rnd::unitary(4, rng)));
  const Complex gamma{1.5, -0.25};
  CHECK(gap(apply(t, PseudoObservable::scalar(gamma, 4)).matrix(), gamma * Matrix::Identity(4, 4)) < 1e-14);

  const PseudoObservable a(rnd::complex_matrix(4, rng));
  const PseudoObservable b(rnd::complex_matrix(4, rng));
  const Matrix lhs = apply(t, a * b).matrix();
  const Matrix rhs = apply(t, a).matrix() * apply(t, b).matrix();
  CHECK(gap(lhs, rhs) < 1e-10 * spectral_norm(lhs));
  CHECK(gap(apply(t, dagger(a)).matrix(), oracle::dagger(apply(t, a).matrix())) < 1e-12);

  // Observables stay observables.
  const Observable h(rnd::hermitian(4, rng));
  CHECK(is_hermitian(apply(t, h).matrix()));

  CHECK_THROWS_AS(apply(t, PseudoObservable::identity(3)), DimensionMismatch);
}

TEST_CASE("inverse and compose") {
  auto rng = rnd::stream(24);
  const auto id = Transformation::identity(3);
  CHECK(gap(inverse(id).unitary().matrix(), Matrix::Identity(3, 3)) < 1e-15);

  const auto t = Transformation::from_unitary(PseudoObservable(rnd::unitary(5, rng)));
  const auto round = compose(t, inverse(t));
  CHECK(gap(round.unitary().matrix(), Matrix::Identity(5, 5)) < 1e-10);
  CHECK(oracle::max_abs(round.generatrix().matrix()) < 1e-9);

  const PseudoObservable p(rnd::complex_matrix(5, rng));
  CHECK(gap(apply(inverse(t), apply(t, p)).matrix(), p.matrix()) < tol::recon);

  const auto t2 = Transformation::from_unitary(PseudoObservable(rnd::unitary(5, rng)));
  const Matrix seq = apply(t, apply(t2, p)).matrix();
  CHECK(gap(apply(compose(t, t2), p).matrix(), seq) < 1e-10 * spectral_norm(seq));
  const auto t12 = compose(t, t2);
  for (double th : t12.phases()) {
    CHECK(th > -std::numbers::pi);
    CHECK(th <= std::numbers::pi);
  }
}

TEST_CASE("transform_basis preserves invariants and ranks") {
  auto rng = rnd::stream(25);
  const auto coord = ProjectorBasis::coordinate(6);
  CHECK(gap(transform_basis(Transformation::identity(6), coord).projector(2), coord.projector(2)) == 0.0);

  const auto t = Transformation::from_unitary(PseudoObservable(rnd::unitary(6, rng)));
  const auto moved = transform_basis(t, coord);
  const auto res = moved.residuals();
  CHECK(res.closure < 1e-10);
  CHECK(res.exclusivity < 1e-10);
  CHECK(moved.elementary());

  const Matrix a = rnd::hermitian_with_spectrum({1, 1, 2, 3, 3, 3}, rng);
  const auto sd = spectral_decompose(Observable(a));
  const auto sd_moved = transform_basis(t, sd.basis);
  CHECK(sd_moved.ranks() == sd.basis.ranks());
  for (std::size_t j = 0; j < sd.basis.size(); ++j) {
    CHECK(numerical_rank(sd_moved.projector(j)) == numerical_rank(sd.basis.projector(j)));
  }

  const auto dy = dyad_basis_from(coord, std::vector<Matrix>(36, Matrix::Ones(6, 6)));
  const auto dy_moved = transform_basis(t, dy);
  CHECK(dy_moved.invariant_residual() < 1e-10);
  const Matrix w = t.unitary().matrix();
  CHECK(gap(dy_moved.dyad(1, 4), w * dy.dyad(1, 4) * w.adjoint()) < 1e-12);
}

TEST_CASE("invariance characterization") {
  auto rng = rnd::stream(26);
  const auto g = random_generatrix(5, rng);
  const auto t = Transformation::from_generatrix(g);

  CHECK(is_invariant(t, g, 1e-9));
  const auto r1 = invariance_characterization(t, g, 1e-9);
  CHECK(r1.pass);
  CHECK(r1.residual("invariant") == 1.0);
  CHECK(r1.residual("compatible") == 1.0);

  const auto f = apply_function([](double x) { return x * x * x - std::cos(x); }, g);
  CHECK(is_invariant(t, f, 1e-9));
  CHECK(invariance_characterization(t, f, 1e-9).pass);

  const Observable a(rnd::hermitian(5, rng));
  const auto r2 = invariance_characterization(t, a, 1e-9);
  CHECK(r2.pass);
  CHECK(r2.residual("invariant") == 0.0);
  CHECK(r2.residual("compatible") == 0.0);
  CHECK_FALSE(is_invariant(t, a, 1e-9));
}

TEST_CASE("spectrum preservation") {
  auto rng = rnd::stream(27);
  const Observable a5(rnd::hermitian(5, rng));
  CHECK(spectrum_preservation_check(Transformation::identity(5), a5).pass);

  const auto t = Transformation::from_unitary(PseudoObservable(rnd::unitary(5, rng)));
  const auto r = spectrum_preservation_check(t, a5);
  CHECK(r.pass);

  // Independent re-decomposition with Eigen's solver.
  const Eigen::SelfAdjointEigenSolver<Matrix> before(a5.matrix());
  const Eigen::SelfAdjointEigenSolver<Matrix> after(apply(t, a5).matrix());
  CHECK((before.eigenvalues() - after.eigenvalues()).cwiseAbs().maxCoeff() < 1e-12);

  const Observable deg(rnd::hermitian_with_spectrum({-1, -1, 0.5, 2, 2, 2}, rng));
  const auto rd = spectrum_preservation_check(Transformation::from_unitary(PseudoObservable(rnd::unitary(6, rng))), deg);
  CHECK(rd.pass);
  CHECK(rd.residual("multiplicities_equal") == 1.0);
  CHECK(rd.residual("term_count_before") == 3.0);
  CHECK(rd.residual("term_count_after") == 3.0);
}

TEST_CASE("trace and inner product invariance") {
  auto rng = rnd::stream(28);
  const PseudoObservable x(rnd::complex_matrix(4, rng));
  const PseudoObservable y(rnd::complex_matrix(4, rng));
  CHECK(trace_invariance_check(Transformation::identity(4), x).pass);
  const auto t = Transformation::from_unitary(PseudoObservable(rnd::unitary(4, rng)));
  CHECK(trace_invariance_check(t, x).pass);
  CHECK(inner_product_invariance_check(t, x, y).pass);

  // A projector's trace is its rank and survives the transformation.
  const Matrix pr = rnd::hermitian_with_spectrum({1, 1, 0, 0}, rng);
  CHECK(std::abs(trace(apply(t, PseudoObservable(pr))) - Complex(2.0, 0.0)) < 1e-12);
}

TEST_CASE("automorphism check on random triples") {
  auto rng = rnd::stream(29);
  for (Index d : {4, 8}) {
    const auto t = Transformation::from_unitary(PseudoObservable(rnd::unitary(d, rng)));
    const auto r = automorphism_check(t, PseudoObservable(rnd::complex_matrix(d, rng)),
                                      PseudoObservable(rnd::complex_matrix(d, rng)), rnd::gaussian_complex(rng));
    CHECK(r.pass);
    for (const char* key : {"additivity", "multiplicativity", "scalar_invariance", "dagger_equivariance"}) {
      CHECK(r.residual(key) < 1e-10);
    }
  }
}

TEST_CASE("transformations serialize as the matrix of W") {
  auto rng = rnd::stream(30);
  const auto t = Transformation::from_unitary(PseudoObservable(rnd::unitary(3, rng)));
  const auto j = io::matrix_to_json(t.unitary());
  const auto back = Transformation::from_unitary(io::matrix_from_json(j));
  CHECK(gap(back.unitary().matrix(), t.unitary().matrix()) == 0.0);
  CHECK(gap(back.generatrix().matrix(), t.generatrix().matrix()) < 1e-12);
}

}  // TEST_SUITE
