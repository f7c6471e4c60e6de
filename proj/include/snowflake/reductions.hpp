#pragma once

// Pairing-based reduction maps between sequence spaces, the 2^n-rescaled
// family built from one base map, the unit-window map for sup-norm
// sequences, and finite-horizon traces of sum_n d_n^p.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "snowflake/spaces.hpp"

namespace snowflake {

/// Diagonal bijection N^2 -> N: (n+m)(n+m+1)/2 + m.
std::uint64_t cantor_pair(std::uint64_t n, std::uint64_t m);
std::pair<std::uint64_t, std::uint64_t> cantor_unpair(std::uint64_t k);

/// Two finite sequences of points, x(n) and y(n) for n < horizon.
class SequencePair {
 public:
  SequencePair(std::vector<PNormVector> x, std::vector<PNormVector> y);

  std::size_t horizon() const { return x_.size(); }
  const std::vector<PNormVector>& x() const { return x_; }
  const std::vector<PNormVector>& y() const { return y_; }
  /// d(x(n), y(n)) for every n.
  std::vector<double> distances() const;

 private:
  std::vector<PNormVector> x_;
  std::vector<PNormVector> y_;
};

/// Index-dependent maps T_n with thresholds eps_n, delta_n and constants
/// A, C, D.  T_n(u) is an element of l_q(X) with X = R^block (Euclidean):
/// component m occupies coordinates [m*block, (m+1)*block).
struct ReductionFamily {
  std::function<PNormVector(std::size_t n, const PNormVector& u)> map;
  std::function<double(std::size_t n)> eps;
  std::function<double(std::size_t n)> delta;
  double A = 1.0;
  double C = 1.0;
  double D = 1.0;
  double p = 1.0;
  double q = 1.0;
};

/// A base map T with the two-regime hypothesis: |u-v| < c implies
/// |Tu - Tv| < d, and |u-v| >= c implies the Hölder(p/q) sandwich with A.
struct BaseMap {
  std::string name;
  std::function<PNormVector(const PNormVector&)> apply;
  double A = 1.0;
  /// The Hölder exponent p/q of the sandwich.
  double exponent = 1.0;
  /// T(2u) = 2^(p/q) T(u) for the exponents it is used with; the rescaled
  /// maps then coincide with T and no 2^n overflow can occur.
  bool homogeneous = false;
};

/// u -> (u, 2u) from R into l_q^2; A = (1 + 2^q)^(1/q); homogeneous when p = q.
BaseMap linear_base_map(double q);
/// Identity on R^1 into l_q^1; A = 1; homogeneous when p = q.
BaseMap identity_base_map(double q);
/// K^infinity of the curve with exponent alpha, R -> l_2^2; A estimated on
/// `pairs` random pairs and inflated by `safety`.
BaseMap koch_base_map(double alpha, std::size_t pairs = 20000, double safety = 1.5, std::uint64_t seed = 0);

/// T_n(u) = 2^(-np/q) T(2^n u), eps_n = 2^-n c, delta_n = 2^(-np/q) d,
/// C = c, D = C^(p/q) / A, for n = 0, 1, ...  Requires p/q = base.exponent.
ReductionFamily scaled_family(const BaseMap& base, double p, double q, double c, double d);

/// One entry of theta(x): flat index <n,m>, block index n, component m.
struct ThetaEntry {
  std::uint64_t index = 0;
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<double> values;
};

/// theta(x)(<n,m>) = T_n(x(n))(m), sorted by flat index.
std::vector<ThetaEntry> theta(const ReductionFamily& family, const std::vector<PNormVector>& x);

/// The two summation orders of sum ||theta x - theta y||^q at a horizon.
struct ThetaSums {
  double flat = 0.0;       // over flat indices, in index order
  double blockwise = 0.0;  // sum_n ||T_n x(n) - T_n y(n)||_q^q
};

/// Restricted to blocks n < horizon.  Entries must come from theta() on
/// sequences of equal length and the same family.
ThetaSums theta_partial_sums(const std::vector<ThetaEntry>& tx, const std::vector<ThetaEntry>& ty, double q,
                             std::size_t horizon);

/// Partial sums S_N = sum_{n<N} d_n^p for N = 1..H (p >= 1), or the running
/// tail supremum t_N = max_{N-1 <= n < H} d_n (p = 0).
std::vector<double> ep_partial_sums(std::span<const double> d, double p);
std::vector<double> ep_partial_sums(const SequencePair& pair, double p);

/// Planting DSL for d-sequences: "geometric:<ratio>" gives ratio^n from
/// n = 0, "power:<exponent>" gives n^-exponent from n = 1.
std::vector<double> planted_distances(const std::string& spec, std::size_t horizon);

/// Pairs in R with |x(n) - y(n)| = d[n]; base points and signs come from
/// CounterRng(seed, 11).
SequencePair plant_pair(std::span<const double> d, std::uint64_t seed);

enum class Regime { small, large, middle };

struct ReductionViolation {
  std::size_t n = 0;
  std::size_t pair = 0;
  Regime regime = Regime::middle;
  double source_distance = 0.0;
  double image_distance = 0.0;
  double lower = 0.0;  // required lower bound (0 when none)
  double upper = 0.0;  // required upper bound (inf when none)
};

struct CauchyDiagnostic {
  std::size_t horizon = 0;
  double sum = 0.0;
  double last_decade_relative_change = 0.0;
  bool numerically_cauchy = false;  // change < 1e-6; a diagnostic, not a proof
};

struct ReductionReport {
  std::size_t pairs_checked = 0;
  std::size_t small_count = 0;
  std::size_t large_count = 0;
  std::size_t middle_count = 0;
  std::vector<ReductionViolation> violations;
  CauchyDiagnostic eps_sum;    // sum eps_n^p
  CauchyDiagnostic delta_sum;  // sum delta_n^q
};

/// samples[n] holds the sampled (u, v) pairs for index n.
using IndexedSamples = std::vector<std::vector<std::pair<PNormVector, PNormVector>>>;

ReductionReport verify_reduction_conditions(const ReductionFamily& family, const IndexedSamples& samples,
                                            std::size_t cauchy_horizon = 10000);

/// `per_index` pairs in R for each n < indices, with log-uniform distances
/// spanning all three regimes of the family.
IndexedSamples sample_regime_pairs(const ReductionFamily& family, std::size_t indices, std::size_t per_index,
                                   std::uint64_t seed);

/// Samples of f at 1 + k*step, k = 0..N/step, cut into windows
/// f(. + n + 1) on [0,1], each holding its 1/step + 1 grid values.
std::vector<StepFunction> theta_window(std::span<const double> samples, double step);

}  // namespace snowflake
