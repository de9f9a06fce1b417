#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "pobs/core_algebra.hpp"
#include "pobs/errors.hpp"
#include "pobs/random.hpp"

using namespace pobs;

namespace {

Matrix diag(std::initializer_list<double> values) {
  Matrix m = Matrix::Zero(static_cast<Index>(values.size()), static_cast<Index>(values.size()));
  Index i = 0;
  for (double v : values) {
    m(i, i) = v;
    ++i;
  }
  return m;
}

Matrix pauli_x() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = m(1, 0) = 1.0;
  return m;
}

}  // namespace

TEST_SUITE("core_algebra") {

TEST_CASE("construction validates shape and hermiticity") {
  CHECK_THROWS_AS(PseudoObservable(Matrix::Zero(2, 3)), DimensionMismatch);
  CHECK_THROWS_AS(PseudoObservable(Matrix::Zero(1, 1)), InvalidArgument);
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  CHECK_THROWS_AS(Observable{m}, NotHermitian);
  CHECK_NOTHROW(Observable(pauli_x()));
  // A defect below the relative tolerance is accepted.
  Matrix near = pauli_x();
  near(0, 1) += 1e-12;
  CHECK_NOTHROW(Observable{near});
}

TEST_CASE("unit tags are advisory") {
  const PseudoObservable a(Matrix::Identity(2, 2), "energy");
  const PseudoObservable b(Matrix::Identity(2, 2), "length");
  CHECK(a.unit_tag().value() == "energy");
  const auto sum = a + b;
  CHECK(spectral_norm(Matrix(sum.matrix() - 2.0 * Matrix::Identity(2, 2))) == 0.0);
  CHECK(a.with_unit(std::nullopt).unit_tag() == std::nullopt);
}

TEST_CASE("dagger") {
  CHECK(dagger(PseudoObservable::identity(3)).matrix() == Matrix::Identity(3, 3));
  const auto s = dagger(PseudoObservable::scalar(kI, 3));
  CHECK(s.matrix() == (-kI * Matrix::Identity(3, 3)).eval());

  auto rng = rnd::stream(11);
  const Matrix m = rnd::complex_matrix(3, rng);
  const PseudoObservable p(m);
  CHECK(dagger(p).matrix() == oracle::dagger(m));
  CHECK(dagger(dagger(p)).matrix() == m);

  const PseudoObservable a(rnd::complex_matrix(5, rng));
  const PseudoObservable b(rnd::complex_matrix(5, rng));
  const Matrix lhs = dagger(a * b).matrix();
  const Matrix rhs = (dagger(b) * dagger(a)).matrix();
  CHECK(oracle::max_abs(lhs - rhs) < 1e-12);
}

TEST_CASE("real and imaginary parts") {
  const auto id = PseudoObservable::identity(3);
  CHECK(real_part(id).matrix() == Matrix::Identity(3, 3));
  CHECK(oracle::max_abs(imag_part(id).matrix()) == 0.0);

  auto rng = rnd::stream(12);
  const Matrix m = rnd::complex_matrix(4, rng);
  const PseudoObservable p(m);
  const Matrix back = real_part(p).matrix() + kI * imag_part(p).matrix();
  CHECK(oracle::max_abs(back - m) < 1e-12);

  // Real and imaginary parts of a unitary commute.
  const PseudoObservable w(rnd::unitary(6, rng));
  CHECK(spectral_norm(commutator(real_part(w), imag_part(w))) < 1e-12);
}

TEST_CASE("trace and inner product") {
  for (Index d : {2, 5, 9}) CHECK(trace(PseudoObservable::identity(d)) == Complex(static_cast<double>(d), 0.0));
  const auto z = PseudoObservable::zero(3);
  CHECK(inner_product(z, z) == Complex(0.0, 0.0));

  auto rng = rnd::stream(13);
  const PseudoObservable x(rnd::complex_matrix(3, rng));
  const PseudoObservable y(rnd::complex_matrix(3, rng));
  CHECK(std::abs(inner_product(x, y) - oracle::inner(x.matrix(), y.matrix())) < 1e-12);
  CHECK(std::abs(inner_product(x, y) - std::conj(inner_product(y, x))) < 1e-12);
  CHECK(inner_product(x, x).real() > 0.0);
  CHECK_THROWS_AS(trace(x * PseudoObservable::identity(4)), DimensionMismatch);

  const PseudoObservable a(rnd::complex_matrix(6, rng));
  const PseudoObservable b(rnd::complex_matrix(6, rng));
  CHECK(std::abs(trace(a * b) - trace(b * a)) < 1e-12 * (1.0 + std::abs(trace(a * b))));
}

TEST_CASE("spectral decomposition of a diagonal matrix") {
  const auto sd = spectral_decompose(Observable(diag({-2, -1, 0, 1})));
  REQUIRE(sd.eigenvalues.size() == 4);
  CHECK(sd.eigenvalues == std::vector<double>{-2, -1, 0, 1});
  const auto coord = ProjectorBasis::coordinate(4);
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(oracle::max_abs(sd.basis.projector(j) - coord.projector(j)) < 1e-14);
  }
  CHECK(sd.basis.elementary());
}

TEST_CASE("spectral decomposition of pauli x") {
  const auto sd = spectral_decompose(Observable(pauli_x()));
  REQUIRE(sd.eigenvalues.size() == 2);
  CHECK(sd.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(sd.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-14));
  const Matrix id = Matrix::Identity(2, 2);
  CHECK(oracle::max_abs(sd.basis.projector(0) - (id - pauli_x()) / 2.0) < 1e-14);
  CHECK(oracle::max_abs(sd.basis.projector(1) - (id + pauli_x()) / 2.0) < 1e-14);
}

TEST_CASE("planted double eigenvalue is grouped") {
  auto rng = rnd::stream(14);
  const std::vector<double> spec{-1.5, 0.25, 0.25, 0.9, 2.0, 3.5};
  const Matrix a = rnd::hermitian_with_spectrum(spec, rng);
  const auto sd = spectral_decompose(Observable(a));
  REQUIRE(sd.eigenvalues.size() == 5);
  CHECK(sd.multiplicities == std::vector<Index>{1, 2, 1, 1, 1});
  CHECK(sd.eigenvalues[1] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(sd.basis.ranks() == std::vector<Index>{1, 2, 1, 1, 1});
  CHECK(spectral_norm(Matrix(sd.reconstruct() - a)) < 1e-10);
  CHECK(sd.basis.residuals().ok());
}

TEST_CASE("reconstruction and closure on random observables") {
  auto rng = rnd::stream(15);
  for (Index d : {2, 3, 7, 16}) {
    const Observable a(rnd::hermitian(d, rng));
    const auto sd = spectral_decompose(a);
    CHECK(spectral_norm(Matrix(sd.reconstruct() - a.matrix())) < tol::recon);
    const auto res = sd.basis.residuals();
    CHECK(res.closure < tol::recon);
    CHECK(res.exclusivity < tol::recon);
    CHECK(res.idempotency < tol::recon);
    Index total = 0;
    for (Index m : sd.multiplicities) total += m;
    CHECK(total == d);
    for (std::size_t j = 1; j < sd.eigenvalues.size(); ++j) CHECK(sd.eigenvalues[j] > sd.eigenvalues[j - 1]);
  }
}

TEST_CASE("checked projector basis rejects broken families") {
  Matrix p = Matrix::Zero(2, 2);
  p(0, 0) = 1.0;
  CHECK_THROWS_AS(ProjectorBasis::checked({p}), InvalidBasis);          // not closed
  CHECK_THROWS_AS(ProjectorBasis::checked({p, p}), InvalidBasis);       // not exclusive
  CHECK_THROWS_AS(ProjectorBasis::checked({2.0 * p, Matrix::Identity(2, 2) - p}), InvalidBasis);
  CHECK_THROWS_AS(ProjectorBasis::checked({}), InvalidBasis);
  CHECK_NOTHROW(ProjectorBasis::checked({p, Matrix::Identity(2, 2) - p}, {0.0, 1.0}));
}

TEST_CASE("apply_function") {
  auto rng = rnd::stream(16);
  const Observable a(rnd::hermitian(5, rng));
  const auto same = apply_function([](double x) { return x; }, a);
  CHECK(spectral_norm(Matrix(same.matrix() - a.matrix())) < 1e-12);

  // exp(i theta) on a diagonal.
  const auto e = apply_complex_function([](double x) { return std::exp(kI * x); }, Observable(diag({0.3, -1.1})));
  CHECK(std::abs(e(0, 0) - std::exp(kI * 0.3)) < 1e-15);
  CHECK(std::abs(e(1, 1) - std::exp(kI * -1.1)) < 1e-15);
  CHECK(std::abs(e(0, 1)) == 0.0);

  // Composition.
  auto f = [](double x) { return std::sin(x) + 0.5 * x; };
  auto g = [](double x) { return x * x - 1.0; };
  const auto gf = apply_function(g, apply_function(f, a));
  const auto direct = apply_function([&](double x) { return g(f(x)); }, a);
  CHECK(spectral_norm(Matrix(gf.matrix() - direct.matrix())) < 1e-10);

  // Result commutes with the argument.
  CHECK(spectral_norm(commutator(apply_function(f, a), a)) < 1e-12);

  // Undefined at a spectrum point.
  CHECK_THROWS_AS(apply_function([](double x) { return std::log(x); }, Observable(diag({-1.0, 2.0}))), DomainError);
}

TEST_CASE("tabulated apply_function") {
  const Observable a(diag({-1.0, 0.0, 2.0}));
  const auto f = apply_function({{-1.0, 10.0}, {0.0, 20.0}, {2.0, 30.0}}, a);
  CHECK(oracle::max_abs(f.matrix() - diag({10.0, 20.0, 30.0})) < 1e-14);
  CHECK_THROWS_AS(apply_function({{-1.0, 10.0}, {2.0, 30.0}}, a), DomainError);
}

TEST_CASE("Euler formula against the unitary exponential") {
  auto rng = rnd::stream(17);
  for (Index d : {2, 4, 8}) {
    const Observable g(rnd::hermitian(d, rng));
    const Matrix euler = apply_function([](double x) { return std::cos(x); }, g).matrix() +
                         kI * apply_function([](double x) { return std::sin(x); }, g).matrix();
    CHECK(spectral_norm(Matrix(euler - unitary_exponential(g).matrix())) < 1e-12);
    CHECK(spectral_norm(Matrix(unitary_exponential(g).matrix() - oracle::expm(kI * g.matrix()))) < 1e-10);
  }
}

TEST_CASE("commutator and compatibility") {
  auto rng = rnd::stream(18);
  const PseudoObservable a(rnd::complex_matrix(4, rng));
  CHECK(spectral_norm(commutator(a, a)) == 0.0);
  const Observable d1(diag({1, 2, 3})), d2(diag({-4, 0.5, 7}));
  CHECK(spectral_norm(commutator(d1, d2)) == 0.0);
  CHECK(is_compatible(d1, d2, 1e-12));
  const Observable h(rnd::hermitian(3, rng));
  CHECK_FALSE(is_compatible(d1, h, 1e-9));
  CHECK_THROWS_AS(commutator(d1, Observable(pauli_x())), DimensionMismatch);
}

TEST_CASE("norms and rank") {
  CHECK(spectral_norm(diag({-3.0, 1.0, 2.0})) == doctest::Approx(3.0));
  CHECK(trace_norm(diag({-3.0, 1.0, 2.0})) == doctest::Approx(6.0));
  Matrix r = Matrix::Zero(3, 3);
  r(0, 0) = 1.0;
  r(1, 1) = 1e-12;
  CHECK(numerical_rank(r) == 1);
}

TEST_CASE("dyad basis over the coordinate basis") {
  const auto base = ProjectorBasis::coordinate(2);
  std::vector<Matrix> cores(4, Matrix::Ones(2, 2));
  const auto dy = dyad_basis_from(base, cores);
  for (Index j = 0; j < 2; ++j) {
    for (Index k = 0; k < 2; ++k) {
      Matrix unit = Matrix::Zero(2, 2);
      unit(j, k) = 1.0;
      CHECK(oracle::max_abs(dy.dyad(j, k) - unit) < 1e-15);
    }
  }
  for (std::size_t j = 0; j < 2; ++j) CHECK(oracle::max_abs(dy.dyad(j, j) - base.projector(j)) < 1e-15);
  CHECK(dy.invariant_residual() < 1e-14);
}

TEST_CASE("dyad basis over a rotated basis satisfies all product rules") {
  auto rng = rnd::stream(19);
  const Matrix w = rnd::unitary(3, rng);
  std::vector<Matrix> projectors;
  for (Index j = 0; j < 3; ++j) projectors.push_back(w.col(j) * w.col(j).adjoint());
  const auto base = ProjectorBasis::checked(projectors);
  // All-ones cores give phases of the form alpha_k - alpha_j, which are consistent.
  const auto dy = dyad_basis_from(base, std::vector<Matrix>(9, Matrix::Ones(3, 3)));

  // Direct multiplication of every product against delta_ll' Gamma_jk.
  double worst = 0.0;
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t k = 0; k < 3; ++k) {
      worst = std::max(worst, oracle::max_abs(oracle::dagger(dy.dyad(j, k)) - dy.dyad(k, j)));
      for (std::size_t l = 0; l < 3; ++l) {
        for (std::size_t l2 = 0; l2 < 3; ++l2) {
          const Matrix prod = dy.dyad(j, l) * dy.dyad(l2, k);
          const Matrix expect = l == l2 ? dy.dyad(j, k) : Matrix::Zero(3, 3);
          worst = std::max(worst, oracle::max_abs(prod - expect));
        }
      }
    }
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("inconsistent core phases are rejected") {
  auto rng = rnd::stream(20);
  const Matrix w = rnd::unitary(3, rng);
  std::vector<Matrix> projectors;
  for (Index j = 0; j < 3; ++j) projectors.push_back(w.col(j) * w.col(j).adjoint());
  std::vector<Matrix> cores;
  for (int k = 0; k < 9; ++k) cores.push_back(rnd::complex_matrix(3, rng));
  CHECK_THROWS_AS(dyad_basis_from(ProjectorBasis::checked(projectors), cores), InvalidBasis);
}

TEST_CASE("dyad basis with an annihilated core") {
  const auto base = ProjectorBasis::coordinate(2);
  std::vector<Matrix> cores(4, Matrix::Ones(2, 2));
  cores[1] = Matrix::Zero(2, 2);
  cores[1](1, 0) = 1.0;  // I_0 C I_1 = 0
  CHECK_THROWS_AS(dyad_basis_from(base, cores), ZeroDyad);
}

}  // TEST_SUITE
