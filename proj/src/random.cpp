#include "pobs/random.hpp"

#include <numbers>

namespace pobs::rnd {

Rng stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                    static_cast<std::uint32_t>(c)};
  return Rng(seq);
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Complex gaussian_complex(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

Matrix complex_matrix(Index dim, Rng& rng) {
  Matrix m(dim, dim);
  for (Index c = 0; c < dim; ++c) {
    for (Index r = 0; r < dim; ++r) m(r, c) = gaussian_complex(rng);
  }
  return m;
}

Matrix hermitian(Index dim, Rng& rng) {
  const Matrix m = complex_matrix(dim, rng);
  return 0.5 * (m + m.adjoint());
}

Matrix unitary(Index dim, Rng& rng) {
  const Matrix z = complex_matrix(dim, rng);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index i = 0; i < dim; ++i) {
    const Complex d = r(i, i);
    const double a = std::abs(d);
    if (a > 0.0) q.col(i) *= d / a;
  }
  return q;
}

Matrix hermitian_with_spectrum(const std::vector<double>& spectrum, Rng& rng) {
  const Index d = static_cast<Index>(spectrum.size());
  const Matrix v = unitary(d, rng);
  Vector s(d);
  for (Index i = 0; i < d; ++i) s(i) = spectrum[static_cast<std::size_t>(i)];
  const Matrix h = v * s.asDiagonal() * v.adjoint();
  return 0.5 * (h + h.adjoint());
}

Matrix generatrix(Index dim, Rng& rng) {
  std::vector<double> s(static_cast<std::size_t>(dim));
  for (auto& x : s) x = uniform(rng, -std::numbers::pi, std::numbers::pi);
  return hermitian_with_spectrum(s, rng);
}

Vector state(Index dim, Rng& rng) {
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = gaussian_complex(rng);
  return v / v.norm();
}

Matrix density(Index dim, Rng& rng) {
  const Matrix g = complex_matrix(dim, rng);
  Matrix w = g * g.adjoint();
  w = 0.5 * (w + w.adjoint());
  return w / w.trace().real();
}

}  // namespace pobs::rnd
