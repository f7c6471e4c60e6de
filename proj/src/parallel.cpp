#include "snowflake/parallel.hpp"

#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <string>

namespace snowflake {

int configure_threads_from_env() {
  if (const char* env = std::getenv("SNOWFLAKE_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && n >= 1) set_thread_count(static_cast<int>(n));
  }
  return thread_count();
}

void set_thread_count(int threads) { omp_set_num_threads(threads < 1 ? 1 : threads); }

int thread_count() { return omp_get_max_threads(); }

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

std::uint64_t CounterRng::below(std::uint64_t index, std::uint64_t bound) const {
  // Multiply-shift; bias is < bound / 2^64.
  const unsigned __int128 product = static_cast<unsigned __int128>(bits(index)) * bound;
  return static_cast<std::uint64_t>(product >> 64);
}

SampleStats sample_stats(std::span<const double> values) {
  SampleStats s;
  s.count = values.size();
  if (values.empty()) return s;
  s.mean = pairwise_sum(values) / static_cast<double>(values.size());
  if (values.size() < 2) return s;
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) sq[i] = (values[i] - s.mean) * (values[i] - s.mean);
  const double variance = pairwise_sum(sq) / static_cast<double>(values.size() - 1);
  s.std_error = std::sqrt(variance / static_cast<double>(values.size()));
  return s;
}

}  // namespace snowflake
