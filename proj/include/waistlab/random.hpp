#pragma once

#include "waistlab/core.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace waistlab {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of substream `stream` under `seed`. Substreams are the unit of
/// parallel work, so results never depend on how many workers run them.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(derive_seed(seed, stream)),
                    static_cast<std::uint32_t>(derive_seed(seed, stream) >> 32),
                    static_cast<std::uint32_t>(stream)};
  return Rng(seq);
}

inline std::uint64_t entropy_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

/// Worker count: WAISTLAB_THREADS if set, else hardware concurrency.
inline unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("WAISTLAB_THREADS")) {
    try {
      long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(std::min<long>(v, 1024));
    } catch (...) {
    }
  }
  return hw;
}

/// Runs fn(block) for block in [0, blocks) on up to worker_count() threads.
template <class Fn>
void parallel_for_blocks(std::size_t blocks, Fn&& fn) {
  unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), blocks));
  if (workers <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) fn(b);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t b = w; b < blocks; b += workers) fn(b);
    });
  }
  for (auto& t : pool) t.join();
}

inline constexpr std::size_t kMonteCarloBlock = 1 << 14;

/// Counts successes of `trial(rng)` over `samples` draws. Draws are split into
/// fixed-size blocks, each with its own substream, so the count is a pure
/// function of (seed, samples).
template <class Trial>
std::size_t count_hits(std::size_t samples, std::uint64_t seed, Trial&& trial) {
  std::size_t blocks = (samples + kMonteCarloBlock - 1) / kMonteCarloBlock;
  std::vector<std::size_t> hits(blocks, 0);
  parallel_for_blocks(blocks, [&](std::size_t b) {
    Rng rng = make_rng(seed, b);
    std::size_t begin = b * kMonteCarloBlock;
    std::size_t end = std::min(samples, begin + kMonteCarloBlock);
    std::size_t h = 0;
    for (std::size_t i = begin; i < end; ++i) h += trial(rng) ? 1 : 0;
    hits[b] = h;
  });
  std::size_t total = 0;
  for (auto h : hits) total += h;
  return total;
}

struct Estimate {
  double value = 0.0;
  double standard_error = 0.0;
};

inline Estimate proportion(std::size_t hits, std::size_t samples) {
  if (samples == 0) return {};
  double p = static_cast<double>(hits) / static_cast<double>(samples);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
}

inline Vec gaussian_vector(int n, Rng& rng) {
  std::normal_distribution<double> normal;
  Vec g(n);
  for (int i = 0; i < n; ++i) g(i) = normal(rng);
  return g;
}

/// Uniform point on S^{n-1} ⊂ R^n.
inline Vec uniform_on_sphere(int n, Rng& rng) {
  for (;;) {
    Vec g = gaussian_vector(n, rng);
    double r = g.norm();
    if (r > 1e-300) return g / r;
  }
}

/// Uniform point in the Euclidean ball of radius `radius` in R^n.
inline Vec uniform_in_ball(int n, double radius, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vec x = uniform_on_sphere(n, rng);
  return x * (radius * std::pow(unif(rng), 1.0 / n));
}

}  // namespace waistlab
