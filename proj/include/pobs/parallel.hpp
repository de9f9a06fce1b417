// OpenMP kernels for the data-parallel parts of the engine, each paired with
// a serial reference implementation. The serial twins are the test oracles:
// every kernel must return bit-identical results to its reference.

#pragma once

#include <cstddef>
#include <exception>
#include <optional>
#include <type_traits>
#include <vector>

#include "pobs/core_algebra.hpp"

namespace pobs::par {

/// Orthonormal basis (d x rank) of the range of each projector.
std::vector<Matrix> range_bases(const std::vector<Matrix>& projectors);
std::vector<Matrix> range_bases_serial(const std::vector<Matrix>& projectors);

/// max over j < k of ||V_j^dagger V_k||_F; bounds ||I_j I_k|| from above.
double max_cross_overlap(const std::vector<Matrix>& bases);
double max_cross_overlap_serial(const std::vector<Matrix>& bases);

/// U X U^dagger for every X.
std::vector<Matrix> conjugate_all(const Matrix& u, const std::vector<Matrix>& ops);
std::vector<Matrix> conjugate_all_serial(const Matrix& u, const std::vector<Matrix>& ops);

/// tr(D X) for every X, real part.
std::vector<double> expectations(const Matrix& density, const std::vector<Matrix>& ops);
std::vector<double> expectations_serial(const Matrix& density, const std::vector<Matrix>& ops);

int max_threads();

/// Evaluates fn(0..n-1) concurrently and returns results in index order.
/// If any call throws, the exception of the lowest failing index is
/// rethrown after all workers finish.
template <class Fn>
auto map_indexed(std::size_t n, Fn&& fn) -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
  using R = std::invoke_result_t<Fn&, std::size_t>;
  std::vector<std::optional<R>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    try {
      slots[static_cast<std::size_t>(i)].emplace(fn(static_cast<std::size_t>(i)));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<R> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

template <class Fn>
auto map_indexed_serial(std::size_t n, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
  std::vector<std::invoke_result_t<Fn&, std::size_t>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(fn(i));
  return out;
}

}  // namespace pobs::par
