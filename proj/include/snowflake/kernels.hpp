#pragma once

// Data-parallel inner loops.  `snowflake::kernels` holds the OpenMP versions
// used by the library; `snowflake::serial` holds straightforward reference
// implementations kept for tests and the benchmark.  The OpenMP kernels are
// bit-stable across thread counts (fixed chunking + pairwise reduction); the
// serial references agree with them to rounding.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "snowflake/parallel.hpp"

namespace snowflake {

/// Row-major set of points in one normed space.
struct PointSet {
  std::vector<double> coords;
  std::size_t dim = 0;
  double p = 2.0;
  std::size_t block = 1;

  std::size_t count() const { return dim == 0 ? 0 : coords.size() / dim; }
  std::span<const double> row(std::size_t i) const { return {coords.data() + i * dim, dim}; }
  double distance(std::size_t i, std::size_t j) const;
};

/// Diagonal and edge sums of squared distances for a map {0,1}^n -> X.
struct HypercubeSums {
  double diagonal_sq = 0.0;
  double edge_sq = 0.0;
};

/// Sums for the metric-cotype inequality on Z_m^n.
struct CotypeSums {
  /// sum_j E_s d(H(s + m/2 e_j), H(s))^q
  double half_shift = 0.0;
  /// E_{eps,s} d(H(s + eps), H(s))^q
  double unit_step = 0.0;
};

/// Sampled estimates with standard errors.
struct CotypeSampled {
  SampleStats half_shift;  // already multiplied by n
  SampleStats unit_step;
};

namespace kernels {

/// 2^-n sum over sign patterns of ||sum_j eps_j u_j||^exponent.
double rademacher_moment_exact(const PointSet& vectors, double exponent);

/// Same average over `count` patterns drawn from CounterRng(seed, 0).
SampleStats rademacher_moment_sampled(const PointSet& vectors, double exponent,
                                      std::uint64_t seed, std::size_t count);

/// images has 2^n rows indexed by the vertex bitmask.
HypercubeSums hypercube_sums(const PointSet& images, unsigned n);

/// images has m^n rows, vertex s at index sum_j s_j m^j.
CotypeSums cotype_sums_exact(const PointSet& images, unsigned n, unsigned m, double q);

/// Image of grid point s, written into `out` (length dim).
using GridImage = std::function<void(std::span<const unsigned> s, std::span<double> out)>;

CotypeSampled cotype_sums_sampled(const GridImage& image, std::size_t dim, double p, std::size_t block,
                                  unsigned n, unsigned m, double q, std::uint64_t seed, std::size_t count);

}  // namespace kernels

namespace serial {

double rademacher_moment_exact(const PointSet& vectors, double exponent);
SampleStats rademacher_moment_sampled(const PointSet& vectors, double exponent,
                                      std::uint64_t seed, std::size_t count);
HypercubeSums hypercube_sums(const PointSet& images, unsigned n);
CotypeSums cotype_sums_exact(const PointSet& images, unsigned n, unsigned m, double q);

}  // namespace serial

}  // namespace snowflake
