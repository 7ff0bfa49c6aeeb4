#include "ergodic_mi/kernels.hpp"

#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ergodic_mi {

namespace {

void check_uniform(std::span<const ChannelPair> pairs, const char* what) {
  if (pairs.empty()) throw DimensionError(std::string(what) + ": needs at least one pair");
  const Index n = pairs[0].f.rows();
  const Index k = pairs[0].f.cols();
  for (const ChannelPair& p : pairs) {
    if (p.f.rows() != n || p.f.cols() != k || p.g.rows() != n || p.g.cols() != k) {
      throw DimensionError(std::string(what) + ": mixed block shapes");
    }
  }
}

// Writes the diagonal block of row i and the coupling to row i + 1. The ring
// matrix has the same blocks plus one corner term.
void chain_block_row(std::span<const ChannelPair> pairs, double rho, std::size_t i,
                     ComplexMatrix& out) {
  const Index n = pairs[0].f.rows();
  const Index r0 = static_cast<Index>(i) * n;
  const ChannelPair& p = pairs[i];
  out.block(r0, r0, n, n) = rho * (p.f * p.f.adjoint() + p.g * p.g.adjoint());
  out.block(r0, r0, n, n).diagonal().array() += 1.0;
  if (i + 1 < pairs.size()) {
    const ComplexMatrix c = rho * (p.g * pairs[i + 1].f.adjoint());
    out.block(r0, r0 + n, n, n) = c;
    out.block(r0 + n, r0, n, n) = c.adjoint();
  }
}

// Row 0 and row M share column block M (F_0 and G_M).
void ring_corner(std::span<const ChannelPair> pairs, double rho, ComplexMatrix& out) {
  const Index n = pairs[0].f.rows();
  const Index last = static_cast<Index>(pairs.size() - 1) * n;
  const ComplexMatrix c = rho * (pairs[0].f * pairs.back().g.adjoint());
  out.block(0, last, n, n) += c;
  out.block(last, 0, n, n) += c.adjoint();
}

}  // namespace

ComplexMatrix identity_plus_gram_serial(std::span<const ChannelPair> pairs, double rho) {
  check_uniform(pairs, "identity_plus_gram");
  const Index dim = static_cast<Index>(pairs.size()) * pairs[0].f.rows();
  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  for (std::size_t i = 0; i < pairs.size(); ++i) chain_block_row(pairs, rho, i, out);
  return out;
}

ComplexMatrix identity_plus_gram(std::span<const ChannelPair> pairs, double rho) {
  check_uniform(pairs, "identity_plus_gram");
  const Index dim = static_cast<Index>(pairs.size()) * pairs[0].f.rows();
  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  const auto count = static_cast<std::ptrdiff_t>(pairs.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    chain_block_row(pairs, rho, static_cast<std::size_t>(i), out);
  }
  return out;
}

ComplexMatrix identity_plus_ring_gram_serial(std::span<const ChannelPair> pairs, double rho) {
  check_uniform(pairs, "identity_plus_ring_gram");
  if (pairs.size() < 2) throw DimensionError("identity_plus_ring_gram: needs at least two pairs");
  const Index dim = static_cast<Index>(pairs.size()) * pairs[0].f.rows();
  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  for (std::size_t i = 0; i < pairs.size(); ++i) chain_block_row(pairs, rho, i, out);
  ring_corner(pairs, rho, out);
  return out;
}

ComplexMatrix identity_plus_ring_gram(std::span<const ChannelPair> pairs, double rho) {
  check_uniform(pairs, "identity_plus_ring_gram");
  if (pairs.size() < 2) throw DimensionError("identity_plus_ring_gram: needs at least two pairs");
  const Index dim = static_cast<Index>(pairs.size()) * pairs[0].f.rows();
  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  const auto count = static_cast<std::ptrdiff_t>(pairs.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    chain_block_row(pairs, rho, static_cast<std::size_t>(i), out);
  }
  ring_corner(pairs, rho, out);
  return out;
}

int resolve_thread_count(int requested) {
#ifdef _OPENMP
  return requested > 0 ? requested : omp_get_max_threads();
#else
  (void)requested;
  return 1;
#endif
}

namespace detail {

void parallel_for(std::size_t count, int threads, void (*body)(std::size_t, void*), void* ctx) {
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto n = static_cast<std::ptrdiff_t>(count);
  const int workers = resolve_thread_count(threads);
  (void)workers;
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i), ctx);
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

}  // namespace ergodic_mi
