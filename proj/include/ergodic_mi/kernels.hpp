#pragma once

// Data-parallel kernels. Each has a serial reference kept for tests and the
// benchmark target; the two must agree bit for bit.

#include <cstddef>
#include <optional>
#include <span>
#include <type_traits>
#include <vector>

#include "ergodic_mi/channel_models.hpp"

namespace ergodic_mi {

// I + rho H H* for the block-bidiagonal H built from `pairs`. The result is
// block tridiagonal: diagonal F_i F_i* + G_i G_i*, super-diagonal G_i F_{i+1}*.
ComplexMatrix identity_plus_gram(std::span<const ChannelPair> pairs, double rho);
ComplexMatrix identity_plus_gram_serial(std::span<const ChannelPair> pairs, double rho);

// Same layout for the ring matrix (G_i diagonal, F_{i+1} sub-diagonal, F_0 in
// the top-right corner).
ComplexMatrix identity_plus_ring_gram(std::span<const ChannelPair> pairs, double rho);
ComplexMatrix identity_plus_ring_gram_serial(std::span<const ChannelPair> pairs, double rho);

// Number of worker threads to use: `requested` if positive, else the OpenMP
// default. Always 1 when built without OpenMP.
int resolve_thread_count(int requested);

// Runs fn(i) for i in [0, count) on `threads` workers and returns the results
// in index order. fn must be independent across indices.
template <class Fn>
auto map_indices(std::size_t count, int threads, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, std::size_t>>;

template <class Fn>
auto map_indices_serial(std::size_t count, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
  std::vector<std::invoke_result_t<Fn&, std::size_t>> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(fn(i));
  return out;
}

namespace detail {
// Runs body(i) for every i, capturing the first exception and rethrowing it.
void parallel_for(std::size_t count, int threads, void (*body)(std::size_t, void*), void* ctx);
}  // namespace detail

template <class Fn>
auto map_indices(std::size_t count, int threads, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
  using R = std::invoke_result_t<Fn&, std::size_t>;
  std::vector<std::optional<R>> slots(count);
  struct Ctx {
    std::remove_reference_t<Fn>* fn;
    std::vector<std::optional<R>>* slots;
  } ctx{&fn, &slots};
  detail::parallel_for(
      count, threads,
      [](std::size_t i, void* p) {
        auto* c = static_cast<Ctx*>(p);
        (*c->slots)[i].emplace((*c->fn)(i));
      },
      &ctx);
  std::vector<R> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace ergodic_mi
