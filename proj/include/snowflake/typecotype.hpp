#pragma once

// Rademacher type/cotype ratios, Bourgain-Milman-Wolfson metric type,
// Mendel-Naor metric cotype, the torus map sigma_n, the type/cotype profile
// algebra of classical spaces and the reducibility verdicts built on it.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "snowflake/kernels.hpp"
#include "snowflake/spaces.hpp"

namespace snowflake {

struct ExactMode {};
struct SampledMode {
  std::uint64_t seed = 0;
  std::size_t count = 10000;
};
using Mode = std::variant<ExactMode, SampledMode>;

/// Exact enumeration limits; configuration values.
struct EnumerationLimits {
  unsigned max_rademacher_terms = 24;      // 2^n patterns
  double max_cotype_evaluations = 1e8;     // m^n * 3^n
  unsigned max_hypercube_dimension = 24;
};

/// Ratio estimate; std_error is 0 in exact mode.
struct RatioEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

/// (2^-n sum_eps ||sum eps_j u_j||^p)^(1/p) / (sum ||u_j||^p)^(1/p).
RatioEstimate rademacher_type_ratio(const std::vector<PNormVector>& vectors, double p, const Mode& mode = ExactMode{},
                                    const EnumerationLimits& limits = {});

/// Same quotient with the cotype exponent q >= 2.
RatioEstimate rademacher_cotype_ratio(const std::vector<PNormVector>& vectors, double q,
                                      const Mode& mode = ExactMode{}, const EnumerationLimits& limits = {});

/// Images of the 2^n vertices of {0,1}^n, indexed by bitmask (bit j = coordinate j).
class HypercubeMap {
 public:
  HypercubeMap(unsigned n, std::vector<PNormVector> images);

  /// Vertex coordinates in l_p^n.
  static HypercubeMap identity(unsigned n, double p);

  unsigned n() const { return n_; }
  const std::vector<PNormVector>& images() const { return images_; }
  PointSet point_set() const;

 private:
  unsigned n_;
  std::vector<PNormVector> images_;
};

/// (sum_D d^2)^(1/2) / (n^(1/p - 1/2) (sum_E d^2)^(1/2)).
double metric_type_ratio(const HypercubeMap& map, double p, const EnumerationLimits& limits = {});

/// A map Z_m^n -> normed space, given by a generator; `dense()` tabulates it.
class GridMap {
 public:
  using Generator = std::function<PNormVector(const std::vector<unsigned>&)>;

  GridMap(unsigned n, unsigned m, Generator generator);

  /// Dense table with m^n images, point s at index sum_j s_j m^j.
  static GridMap from_table(unsigned n, unsigned m, std::vector<PNormVector> images);

  /// sigma_n with modulus-wise exponent q.
  static GridMap sigma(unsigned n, unsigned m, double q);

  unsigned n() const { return n_; }
  unsigned m() const { return m_; }
  PNormVector operator()(const std::vector<unsigned>& s) const { return generator_(s); }

  PointSet dense() const;

 private:
  unsigned n_;
  unsigned m_;
  Generator generator_;
};

/// Least Gamma for which the metric cotype inequality holds for this map:
/// ((sum_j E_s d(H(s + m/2 e_j), H(s))^q) / E_{eps,s} d(H(s+eps), H(s))^q)^(1/q) / m.
/// Constant maps give 0.
RatioEstimate metric_cotype_ratio(const GridMap& map, double q, const Mode& mode = ExactMode{},
                                  const EnumerationLimits& limits = {});

/// sigma_n(s) = (exp(2 pi i s_j / m))_j as real pairs, block 2, exponent q.
PNormVector sigma_embed(const std::vector<unsigned>& s, unsigned m, double q);

/// Type supremum and cotype infimum.
struct TypeCotypeProfile {
  double p_sup = 2.0;
  double q_inf = 2.0;

  bool operator==(const TypeCotypeProfile&) const = default;
};

/// l_r, L_r, c_0 or l_q(inner).
class SpaceDescriptor {
 public:
  enum class Kind { ell, L, c0, ell_of };

  static SpaceDescriptor ell(double r);
  static SpaceDescriptor lebesgue(double r);
  static SpaceDescriptor c0();
  static SpaceDescriptor ell_of(double q, SpaceDescriptor inner);

  /// Grammar: "l<r>", "L<r>", "c0", "l<q>(<inner>)", e.g. "l3(L1.5)".
  static SpaceDescriptor parse(const std::string& text);

  Kind kind() const { return kind_; }
  double exponent() const { return exponent_; }
  const SpaceDescriptor& inner() const { return *inner_; }
  std::string to_string() const;

 private:
  SpaceDescriptor(Kind kind, double exponent, std::shared_ptr<const SpaceDescriptor> inner)
      : kind_(kind), exponent_(exponent), inner_(std::move(inner)) {}
  Kind kind_;
  double exponent_;
  std::shared_ptr<const SpaceDescriptor> inner_;
};

TypeCotypeProfile space_profile(const SpaceDescriptor& space);

/// The three necessary conditions for E(l_r,p) <=_B E(l_s,q):
/// p <= q; min(r/p, 2/p) >= min(s/q, 1, 2/q); max(r,2) <= max(s,q,2).
struct NecessaryConditions {
  bool exponent_order = false;
  bool type_clause = false;
  bool cotype_clause = false;

  bool all() const { return exponent_order && type_clause && cotype_clause; }
  bool operator==(const NecessaryConditions&) const = default;
};

NecessaryConditions necessary_conditions(double r, double s, double p, double q);

/// For r, s in [1,2], p, q >= 1 and s <= q: E(L_r,p) <=_B E(L_s,q) iff
/// p <= q and r/p >= s/q.  Arguments outside the hypotheses are rejected.
bool iff_verdict(double r, double p, double s, double q);

/// One row of the hypercube obstruction experiment.
struct ObstructionRow {
  unsigned n = 0;
  double constantA = 0.0;
  double a_squared = 0.0;
  double target_metric_type_ratio = 0.0;
  double source_metric_type_ratio = 0.0;
  double growth = 0.0;  // n^(alpha/p_src - 1/p_tgt), informational
};

struct ObstructionConfig {
  std::vector<unsigned> n_values;
  double p_src = 2.0;
  double p_tgt = 2.0;
  double alpha = 1.0;
  /// Exponent p in the metric type ratios; 0 means min(p_tgt, 2).
  double type_exponent = 0.0;
  std::size_t restarts = 1;
  std::size_t iterations = 1;  // 1 = evaluate the identity-coordinates candidate only
  std::uint64_t seed = 0;
};

std::vector<ObstructionRow> hypercube_obstruction_experiment(const ObstructionConfig& config);

}  // namespace snowflake
