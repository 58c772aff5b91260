#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace hkc {

/// Execution policy for the data-parallel kernels. Every OpenMP kernel has a
/// serial twin that must produce bit-identical results; the tests rely on it.
enum class Exec { Serial, OpenMP };

/// Combine partial sums with a fixed pairwise tree, independent of how the
/// partials were produced.
inline double pairwise_combine(std::vector<double>& partials) {
  if (partials.empty()) return 0.0;
  std::size_t n = partials.size();
  while (n > 1) {
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i + half < n; ++i) partials[i] += partials[i + half];
    n = half;
  }
  return partials[0];
}

/// Deterministic chunked summation of f(i) for i in [0, n).
///
/// The index range is split into fixed-size chunks; each chunk is summed
/// sequentially in index order and the chunk sums are combined pairwise.
/// The chunk layout does not depend on the thread count, so Serial and
/// OpenMP agree bitwise.
template <class F>
double indexed_sum(std::size_t n, F&& f, Exec exec, std::size_t chunk = 8192) {
  if (n == 0) return 0.0;
  const std::size_t nchunks = (n + chunk - 1) / chunk;
  std::vector<double> partial(nchunks, 0.0);
  if (exec == Exec::OpenMP) {
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(nchunks); ++c) {
      const std::size_t lo = static_cast<std::size_t>(c) * chunk;
      const std::size_t hi = lo + chunk < n ? lo + chunk : n;
      double s = 0.0;
      for (std::size_t i = lo; i < hi; ++i) s += f(i);
      partial[static_cast<std::size_t>(c)] = s;
    }
  } else {
    for (std::size_t c = 0; c < nchunks; ++c) {
      const std::size_t lo = c * chunk;
      const std::size_t hi = lo + chunk < n ? lo + chunk : n;
      double s = 0.0;
      for (std::size_t i = lo; i < hi; ++i) s += f(i);
      partial[c] = s;
    }
  }
  return pairwise_combine(partial);
}

}  // namespace hkc
