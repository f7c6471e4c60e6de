#pragma once

// Threading knobs, deterministic reductions and the counter-based sampler.
//
// Every parallel kernel in the library partitions its index space into
// chunks of a fixed size that does not depend on the thread count, sums each
// chunk serially and combines chunk sums with pairwise_sum.  Results are
// therefore bit-identical for any number of threads.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace snowflake {

/// Caps OpenMP parallelism from the SNOWFLAKE_THREADS environment variable.
/// Returns the number of threads in effect.
int configure_threads_from_env();

void set_thread_count(int threads);
int thread_count();

/// Pairwise (tree) summation; the association order depends only on size.
double pairwise_sum(std::span<const double> values);

/// Work unit for chunked kernels.
inline constexpr std::size_t kChunkSize = 4096;

inline std::size_t chunk_count(std::size_t n) { return (n + kChunkSize - 1) / kChunkSize; }

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: the k-th draw of stream `stream` under `seed`
/// is a pure function of (seed, stream, k).
class CounterRng {
 public:
  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(mix64(seed ^ mix64(stream))) {}

  constexpr std::uint64_t bits(std::uint64_t index) const { return mix64(key_ ^ mix64(index + 0x632be59bd9b4e019ULL)); }

  /// Uniform in [0,1) from the top 53 bits.
  constexpr double uniform(std::uint64_t index) const {
    return static_cast<double>(bits(index) >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t index, std::uint64_t bound) const;

 private:
  std::uint64_t key_;
};

/// Sequential stream on top of CounterRng, for serial algorithms (search).
class SeededStream {
 public:
  SeededStream(std::uint64_t seed, std::uint64_t stream) : rng_(seed, stream) {}

  double uniform() { return rng_.uniform(next_++); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t below(std::uint64_t bound) { return rng_.below(next_++, bound); }

 private:
  CounterRng rng_;
  std::uint64_t next_ = 0;
};

/// Mean and standard error of a sample, in deterministic order.
struct SampleStats {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
};

SampleStats sample_stats(std::span<const double> values);

}  // namespace snowflake
