#include "pobs/parallel.hpp"

#include "pobs/errors.hpp"

#include <omp.h>

#include <algorithm>

namespace pobs::par {

namespace {

Matrix range_basis(const Matrix& p) {
  const Matrix h = 0.5 * (p + p.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) throw EigenSolverFailure("range_basis: eigensolver failed");
  const auto& ev = es.eigenvalues();
  Index first = 0;
  while (first < ev.size() && ev(first) < 0.5) ++first;
  return es.eigenvectors().rightCols(ev.size() - first);
}

double overlap_row(const std::vector<Matrix>& bases, std::size_t j) {
  double worst = 0.0;
  for (std::size_t k = j + 1; k < bases.size(); ++k) {
    if (bases[j].cols() == 0 || bases[k].cols() == 0) continue;
    worst = std::max(worst, (bases[j].adjoint() * bases[k]).norm());
  }
  return worst;
}

}  // namespace

std::vector<Matrix> range_bases(const std::vector<Matrix>& projectors) {
  return map_indexed(projectors.size(), [&](std::size_t i) { return range_basis(projectors[i]); });
}

std::vector<Matrix> range_bases_serial(const std::vector<Matrix>& projectors) {
  return map_indexed_serial(projectors.size(),
                            [&](std::size_t i) { return range_basis(projectors[i]); });
}

double max_cross_overlap(const std::vector<Matrix>& bases) {
  double worst = 0.0;
  const long n = static_cast<long>(bases.size());
#pragma omp parallel for schedule(dynamic) reduction(max : worst)
  for (long j = 0; j < n; ++j) {
    worst = std::max(worst, overlap_row(bases, static_cast<std::size_t>(j)));
  }
  return worst;
}

double max_cross_overlap_serial(const std::vector<Matrix>& bases) {
  double worst = 0.0;
  for (std::size_t j = 0; j < bases.size(); ++j) worst = std::max(worst, overlap_row(bases, j));
  return worst;
}

std::vector<Matrix> conjugate_all(const Matrix& u, const std::vector<Matrix>& ops) {
  const Matrix ud = u.adjoint();
  return map_indexed(ops.size(), [&](std::size_t i) -> Matrix { return u * ops[i] * ud; });
}

std::vector<Matrix> conjugate_all_serial(const Matrix& u, const std::vector<Matrix>& ops) {
  const Matrix ud = u.adjoint();
  std::vector<Matrix> out;
  out.reserve(ops.size());
  for (const auto& x : ops) out.emplace_back(u * x * ud);
  return out;
}

namespace {
double trace_product_real(const Matrix& d, const Matrix& x) {
  // tr(D X) = sum_ab D_ab X_ba
  return (d.array() * x.transpose().array()).sum().real();
}
}  // namespace

std::vector<double> expectations(const Matrix& density, const std::vector<Matrix>& ops) {
  return map_indexed(ops.size(),
                     [&](std::size_t i) { return trace_product_real(density, ops[i]); });
}

std::vector<double> expectations_serial(const Matrix& density, const std::vector<Matrix>& ops) {
  std::vector<double> out;
  out.reserve(ops.size());
  for (const auto& x : ops) out.push_back(trace_product_real(density, x));
  return out;
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace pobs::par
