#pragma once

// Minimizing the Hölder constant A of a finite metric space mapped into
// l_q^k: exhaustive grid search for tiny instances, multi-start local
// improvement otherwise, and the chain lower bound on paths.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "snowflake/spaces.hpp"

namespace snowflake {

struct SearchConfig {
  std::size_t target_dim = 2;
  double target_exponent = 2.0;
  double alpha = 1.0;
  std::size_t restarts = 1;
  /// Iteration 1 evaluates the initialization; each further iteration
  /// proposes one perturbation.
  std::size_t iterations = 10000;
  /// 0 means diameter^alpha / 4.
  double initial_step = 0.0;
  double step_decay = 0.95;
  std::size_t decay_patience = 100;
  std::uint64_t seed = 0;
  /// Brute force: grid spacing, half-width of the box (0 means
  /// 1.5 * diameter^alpha) and the cap on gauge-fixed placements.
  double grid_resolution = 0.05;
  double box_radius = 0.0;
  double max_placements = 1e10;
  /// Starting coordinates for restart 0, one row per point.
  std::optional<std::vector<std::vector<double>>> initial;
};

struct SearchResult {
  double constantA = kInfinity;
  /// max over pairs |log d' - alpha log d| = log A.
  double objective = kInfinity;
  EmbeddingTable table;
  /// Best A reached by each restart (brute force: one entry).
  std::vector<double> restart_values;
  /// Gauge-fixed grid size (brute force) or objective evaluations (local search).
  std::size_t evaluations = 0;
};

/// Exhaustive search over grid placements with the first point at the
/// origin, the second on the positive first axis and, in the plane, the
/// third in the closed upper half-plane.  |M| <= 5, target_dim <= 2.
SearchResult brute_min_distortion(const FiniteMetricSpace& space, const SearchConfig& config);

/// Multi-start random local search on the log-space objective.
SearchResult local_min_distortion(const FiniteMetricSpace& space, const SearchConfig& config);

/// Whether A^2 >= n^(alpha - 1) for a report on the path {0, 1/n, ..., 1}.
/// `relative_tolerance` absorbs rounding at equality.
bool path_alpha_bound_check(std::size_t n, double alpha, const DistortionReport& report,
                            double relative_tolerance = 1e-12);

/// Path {0, 1/n, ..., 1} with n + 1 points.
FiniteMetricSpace path_space(std::size_t n);
/// Cycle graph metric on n points.
FiniteMetricSpace cycle_space(std::size_t n);
/// Equilateral triangle with unit sides.
FiniteMetricSpace triangle_space();
/// {0,1}^n with the l_p metric.
FiniteMetricSpace hypercube_space(unsigned n, double p);

/// "path:<n>", "cycle:<n>", "triangle", "hypercube:<n>:<p>".
FiniteMetricSpace builtin_space(const std::string& name);

}  // namespace snowflake
