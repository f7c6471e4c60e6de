// Reference implementations: one pattern / vertex / grid point at a time,
// recomputed from scratch.  Slow on purpose; the tests compare them with the
// OpenMP kernels.

#include <bit>
#include <cmath>

#include "snowflake/kernels.hpp"
#include "snowflake/spaces.hpp"

namespace snowflake::serial {

double rademacher_moment_exact(const PointSet& vectors, double exponent) {
  const std::size_t n = vectors.count();
  const std::size_t patterns = std::size_t{1} << n;
  double total = 0.0;
  std::vector<double> sum(vectors.dim);
  for (std::size_t eps = 0; eps < patterns; ++eps) {
    std::fill(sum.begin(), sum.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const double sign = (eps >> j) & 1U ? -1.0 : 1.0;
      for (std::size_t k = 0; k < vectors.dim; ++k) sum[k] += sign * vectors.row(j)[k];
    }
    total += std::pow(p_norm(sum, vectors.p, vectors.block), exponent);
  }
  return total / static_cast<double>(patterns);
}

SampleStats rademacher_moment_sampled(const PointSet& vectors, double exponent,
                                      std::uint64_t seed, std::size_t count) {
  const std::size_t n = vectors.count();
  const std::size_t words = (n + 63) / 64;
  const CounterRng rng(seed, 0);
  std::vector<double> values(count);
  std::vector<double> sum(vectors.dim);
  for (std::size_t k = 0; k < count; ++k) {
    std::fill(sum.begin(), sum.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const double sign = (rng.bits(k * words + j / 64) >> (j % 64)) & 1U ? -1.0 : 1.0;
      for (std::size_t d = 0; d < vectors.dim; ++d) sum[d] += sign * vectors.row(j)[d];
    }
    values[k] = std::pow(p_norm(sum, vectors.p, vectors.block), exponent);
  }
  return sample_stats(values);
}

HypercubeSums hypercube_sums(const PointSet& images, unsigned n) {
  const std::size_t vertices = std::size_t{1} << n;
  HypercubeSums sums;
  for (std::size_t s = 0; s < vertices; ++s) {
    for (std::size_t t = s + 1; t < vertices; ++t) {
      const int differing = std::popcount(s ^ t);
      if (differing != 1 && differing != static_cast<int>(n)) continue;
      const double d = images.distance(s, t);
      // For n = 1 the single edge is also the single diagonal.
      if (differing == 1) sums.edge_sq += d * d;
      if (differing == static_cast<int>(n)) sums.diagonal_sq += d * d;
    }
  }
  return sums;
}

CotypeSums cotype_sums_exact(const PointSet& images, unsigned n, unsigned m, double q) {
  std::size_t points = 1;
  std::size_t steps = 1;
  for (unsigned j = 0; j < n; ++j) {
    points *= m;
    steps *= 3;
  }
  const auto encode = [&](const std::vector<long>& digits) {
    std::size_t idx = 0;
    for (unsigned j = n; j-- > 0;) idx = idx * m + static_cast<std::size_t>(((digits[j] % m) + m) % m);
    return idx;
  };
  CotypeSums sums;
  std::vector<long> s(n), t(n);
  for (std::size_t idx = 0; idx < points; ++idx) {
    std::size_t rest = idx;
    for (unsigned j = 0; j < n; ++j) {
      s[j] = static_cast<long>(rest % m);
      rest /= m;
    }
    for (unsigned j = 0; j < n; ++j) {
      t = s;
      t[j] += m / 2;
      sums.half_shift += std::pow(images.distance(encode(t), idx), q);
    }
    for (std::size_t e = 0; e < steps; ++e) {
      std::size_t code = e;
      for (unsigned j = 0; j < n; ++j) {
        t[j] = s[j] + static_cast<long>(code % 3) - 1;
        code /= 3;
      }
      sums.unit_step += std::pow(images.distance(encode(t), idx), q);
    }
  }
  sums.half_shift /= static_cast<double>(points);
  sums.unit_step /= static_cast<double>(points) * static_cast<double>(steps);
  return sums;
}

}  // namespace snowflake::serial
