#pragma once

#include <cstdint>
#include <vector>

#include <omp.h>

namespace kac {

// Deterministic parallel reduction: terms are accumulated into fixed-size
// chunks and the chunk partials are summed in index order, so the result is
// bit-identical for any thread count.
template <class Term>
double chunked_sum(std::int64_t n, Term&& term, std::int64_t chunk = 8192) {
  if (n <= 0) return 0.0;
  std::int64_t nchunks = (n + chunk - 1) / chunk;
  std::vector<double> partial(static_cast<std::size_t>(nchunks), 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < nchunks; ++c) {
    std::int64_t lo = c * chunk;
    std::int64_t hi = lo + chunk < n ? lo + chunk : n;
    double s = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) s += term(i);
    partial[static_cast<std::size_t>(c)] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

// Serial reference of the same reduction; kept so tests and the benchmark
// can compare kernels with and without OpenMP on identical summation order.
template <class Term>
double chunked_sum_serial(std::int64_t n, Term&& term, std::int64_t chunk = 8192) {
  if (n <= 0) return 0.0;
  std::int64_t nchunks = (n + chunk - 1) / chunk;
  std::vector<double> partial(static_cast<std::size_t>(nchunks), 0.0);
  for (std::int64_t c = 0; c < nchunks; ++c) {
    std::int64_t lo = c * chunk;
    std::int64_t hi = lo + chunk < n ? lo + chunk : n;
    double s = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) s += term(i);
    partial[static_cast<std::size_t>(c)] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

enum class Execution { Serial, Parallel };

}  // namespace kac
