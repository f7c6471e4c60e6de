#include <omp.h>

#include <bit>
#include <cmath>

#include "snowflake/kernels.hpp"
#include "snowflake/spaces.hpp"

namespace snowflake {

namespace {

double power(double x, double e) {
  if (e == 1.0) return x;
  if (e == 2.0) return x * x;
  return std::pow(x, e);
}

// p-norm of a - b without allocation; block moduli are Euclidean.
double row_distance(std::span<const double> a, std::span<const double> b, double p, std::size_t block) {
  double acc = 0.0;
  for (std::size_t g = 0; g < a.size(); g += block) {
    double modulus;
    if (block == 1) {
      modulus = std::abs(a[g] - b[g]);
    } else {
      double s = 0.0;
      for (std::size_t k = 0; k < block; ++k) s += (a[g + k] - b[g + k]) * (a[g + k] - b[g + k]);
      modulus = std::sqrt(s);
    }
    if (p == kInfinity) {
      acc = std::max(acc, modulus);
    } else {
      acc += power(modulus, p);
    }
  }
  return p == kInfinity || p == 1.0 ? acc : std::pow(acc, 1.0 / p);
}

double vector_norm(std::span<const double> v, double p, std::size_t block) {
  return p_norm(v, p, block);
}

std::size_t ipow(std::size_t base, unsigned e) {
  std::size_t r = 1;
  for (unsigned i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

double PointSet::distance(std::size_t i, std::size_t j) const { return row_distance(row(i), row(j), p, block); }

namespace kernels {

double rademacher_moment_exact(const PointSet& vectors, double exponent) {
  const auto n = static_cast<unsigned>(vectors.count());
  const std::size_t dim = vectors.dim;
  const std::size_t patterns = std::size_t{1} << n;
  const std::size_t chunks = chunk_count(patterns);
  std::vector<double> chunk_sums(chunks, 0.0);

#pragma omp parallel
  {
    std::vector<double> sum(dim);
#pragma omp for schedule(static)
    for (std::size_t c = 0; c < chunks; ++c) {
      const std::size_t begin = c * kChunkSize;
      const std::size_t end = std::min(patterns, begin + kChunkSize);
      // Gray-code walk: consecutive patterns differ in one sign.
      const std::size_t gray0 = begin ^ (begin >> 1);
      std::fill(sum.begin(), sum.end(), 0.0);
      for (unsigned j = 0; j < n; ++j) {
        const double sign = (gray0 >> j) & 1U ? -1.0 : 1.0;
        const auto u = vectors.row(j);
        for (std::size_t k = 0; k < dim; ++k) sum[k] += sign * u[k];
      }
      double acc = power(vector_norm(sum, vectors.p, vectors.block), exponent);
      for (std::size_t i = begin + 1; i < end; ++i) {
        const auto j = static_cast<unsigned>(std::countr_zero(i));
        const bool now_negative = ((i ^ (i >> 1)) >> j) & 1U;
        const double delta = now_negative ? -2.0 : 2.0;
        const auto u = vectors.row(j);
        for (std::size_t k = 0; k < dim; ++k) sum[k] += delta * u[k];
        acc += power(vector_norm(sum, vectors.p, vectors.block), exponent);
      }
      chunk_sums[c] = acc;
    }
  }
  return pairwise_sum(chunk_sums) / static_cast<double>(patterns);
}

SampleStats rademacher_moment_sampled(const PointSet& vectors, double exponent,
                                      std::uint64_t seed, std::size_t count) {
  const std::size_t n = vectors.count();
  const std::size_t dim = vectors.dim;
  const std::size_t words = (n + 63) / 64;
  const CounterRng rng(seed, 0);
  std::vector<double> values(count);

#pragma omp parallel
  {
    std::vector<double> sum(dim);
#pragma omp for schedule(static)
    for (std::size_t k = 0; k < count; ++k) {
      std::fill(sum.begin(), sum.end(), 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        const std::uint64_t word = rng.bits(k * words + j / 64);
        const double sign = (word >> (j % 64)) & 1U ? -1.0 : 1.0;
        const auto u = vectors.row(j);
        for (std::size_t d = 0; d < dim; ++d) sum[d] += sign * u[d];
      }
      values[k] = power(vector_norm(sum, vectors.p, vectors.block), exponent);
    }
  }
  return sample_stats(values);
}

HypercubeSums hypercube_sums(const PointSet& images, unsigned n) {
  const std::size_t vertices = std::size_t{1} << n;
  const std::size_t mask = vertices - 1;
  const std::size_t half = vertices >> 1;
  const std::size_t chunks = chunk_count(vertices);
  std::vector<double> diag(chunks, 0.0);
  std::vector<double> edge(chunks, 0.0);

#pragma omp parallel for schedule(static)
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t end = std::min(vertices, (c + 1) * kChunkSize);
    double d_acc = 0.0;
    double e_acc = 0.0;
    for (std::size_t s = c * kChunkSize; s < end; ++s) {
      for (unsigned j = 0; j < n; ++j) {
        if ((s >> j) & 1U) continue;
        const double d = images.distance(s, s | (std::size_t{1} << j));
        e_acc += d * d;
      }
      if (s < half) {
        const double d = images.distance(s, s ^ mask);
        d_acc += d * d;
      }
    }
    diag[c] = d_acc;
    edge[c] = e_acc;
  }
  return {pairwise_sum(diag), pairwise_sum(edge)};
}

CotypeSums cotype_sums_exact(const PointSet& images, unsigned n, unsigned m, double q) {
  const std::size_t points = ipow(m, n);
  const std::size_t steps = ipow(3, n);
  const std::size_t chunks = chunk_count(points);
  std::vector<double> half_sums(chunks, 0.0);
  std::vector<double> unit_sums(chunks, 0.0);
  std::vector<std::size_t> stride(n);
  for (unsigned j = 0; j < n; ++j) stride[j] = ipow(m, j);

#pragma omp parallel
  {
    std::vector<unsigned> digits(n);
    std::vector<unsigned> eps(n);
#pragma omp for schedule(static)
    for (std::size_t c = 0; c < chunks; ++c) {
      const std::size_t end = std::min(points, (c + 1) * kChunkSize);
      double h_acc = 0.0;
      double u_acc = 0.0;
      for (std::size_t s = c * kChunkSize; s < end; ++s) {
        std::size_t rest = s;
        for (unsigned j = 0; j < n; ++j) {
          digits[j] = static_cast<unsigned>(rest % m);
          rest /= m;
        }
        for (unsigned j = 0; j < n; ++j) {
          const unsigned shifted = (digits[j] + m / 2) % m;
          const std::size_t t = s - digits[j] * stride[j] + shifted * stride[j];
          h_acc += power(images.distance(t, s), q);
        }
        // eps digit e in {0,1,2} encodes step e - 1.
        std::fill(eps.begin(), eps.end(), 0U);
        for (std::size_t e = 0; e < steps; ++e) {
          std::size_t t = 0;
          for (unsigned j = 0; j < n; ++j) t += ((digits[j] + m + eps[j] - 1) % m) * stride[j];
          u_acc += power(images.distance(t, s), q);
          for (unsigned j = 0; j < n && ++eps[j] == 3; ++j) eps[j] = 0;
        }
      }
      half_sums[c] = h_acc;
      unit_sums[c] = u_acc;
    }
  }
  const double pts = static_cast<double>(points);
  return {pairwise_sum(half_sums) / pts, pairwise_sum(unit_sums) / (pts * static_cast<double>(steps))};
}

CotypeSampled cotype_sums_sampled(const GridImage& image, std::size_t dim, double p, std::size_t block,
                                  unsigned n, unsigned m, double q, std::uint64_t seed, std::size_t count) {
  const CounterRng rng(seed, 1);
  std::vector<double> half(count);
  std::vector<double> unit(count);
  // Draws per sample: n digits of s, one coordinate j, n step digits.
  const std::size_t draws = 2 * static_cast<std::size_t>(n) + 1;

#pragma omp parallel
  {
    std::vector<unsigned> s(n), t(n);
    std::vector<double> hs(dim), ht(dim);
    const auto distance = [&] { return row_distance(hs, ht, p, block); };
#pragma omp for schedule(static)
    for (std::size_t k = 0; k < count; ++k) {
      const std::size_t base = k * draws;
      for (unsigned j = 0; j < n; ++j) s[j] = static_cast<unsigned>(rng.below(base + j, m));
      image(s, hs);
      const auto j = static_cast<unsigned>(rng.below(base + n, n));
      t = s;
      t[j] = (s[j] + m / 2) % m;
      image(t, ht);
      half[k] = static_cast<double>(n) * power(distance(), q);
      for (unsigned i = 0; i < n; ++i) {
        const auto e = static_cast<unsigned>(rng.below(base + n + 1 + i, 3));
        t[i] = (s[i] + m + e - 1) % m;
      }
      image(t, ht);
      unit[k] = power(distance(), q);
    }
  }
  return {sample_stats(half), sample_stats(unit)};
}

}  // namespace kernels

}  // namespace snowflake
