#pragma once

// Explicit embeddings: the Koch-type curve K_r and its extension to the
// whole line, the Hölder line map R -> R^(2^k), the lifts into L_s and c_0,
// the sampling map L_r -> l_r, the Kuratowski embedding into sup-norm and
// dyadic rounding.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "snowflake/io.hpp"
#include "snowflake/spaces.hpp"

namespace snowflake {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point2&) const = default;
};

/// Parameters of the four-map similarity system whose attractor is K_r:
/// the segment (0,0)-(1,0) is replaced by the polyline
/// (0,0)-(r,0)-(1/2,h)-(1-r,0)-(1,0), each piece of length r.
class KochParams {
 public:
  /// r in (1/4, 1/2).
  static KochParams from_ratio(double r);
  /// alpha in (1/2, 1); r = 4^-alpha.
  static KochParams from_alpha(double alpha);

  double r() const { return r_; }
  double alpha() const { return alpha_; }
  double h() const { return h_; }

  /// Vertex i (0..4) of the generator polyline.
  Point2 vertex(int i) const;

 private:
  KochParams(double r, double alpha);
  double r_;
  double alpha_;
  double h_;
};

inline constexpr int kDefaultKochDepth = 64;

/// K_r(t) for t in [0,1], descending `depth` base-4 digits of t.
Point2 koch_eval(const KochParams& params, double t, int depth = kDefaultKochDepth);

/// Affine data of the m-th extension K^m(t) = scale * K_r((t - a) / 4^m) + c
/// on [a, a + 4^m].  Odd steps extend by a first quarter, even steps by a
/// last quarter.
struct ExtensionFrame {
  int m = 0;
  double a = 0.0;
  Point2 c;
  double scale = 1.0;  // r^-m

  double length() const;  // 4^m
  bool contains(double t) const { return t >= a && t <= a + length(); }
};

ExtensionFrame extension_frame(const KochParams& params, int m);

inline constexpr int kDefaultMaxSteps = 64;

/// K_r^infinity(t): evaluated in the smallest frame containing t.  Throws
/// ValidationError ("increase max_steps") when no frame up to max_steps does.
Point2 koch_extend(const KochParams& params, double t, int max_steps = kDefaultMaxSteps);

/// Hölder(alpha) map R -> R^(2^k), alpha in (0,1].  alpha = 1 is the identity
/// on R; otherwise k = floor(log2(1/alpha)) + 1 stages of K^infinity with
/// ratio exponent beta = alpha^(1/k), each stage applied coordinatewise.
class HolderLineMap {
 public:
  explicit HolderLineMap(double alpha, int max_steps = kDefaultMaxSteps);

  double alpha() const { return alpha_; }
  int stages() const { return stages_; }
  double stage_exponent() const { return beta_; }
  std::size_t dimension() const { return std::size_t{1} << stages_; }

  std::vector<double> operator()(double t) const;

 private:
  double alpha_;
  int stages_;
  double beta_;
  std::optional<KochParams> params_;
  int max_steps_;
};

std::vector<double> holder_line_map(double alpha, double t);

/// A map R -> R^n known on finitely many inputs.  With a declared uniform
/// grid, lookups snap to the nearest grid node (within 1e-9 of a step).
class TabulatedMap {
 public:
  struct Grid {
    double start = 0.0;
    double step = 1.0;
    std::size_t count = 0;
  };

  TabulatedMap() = default;

  /// Tabulates `fn` on the grid start + i * step, i < count.
  template <typename Fn>
  static TabulatedMap on_grid(Grid grid, Fn&& fn) {
    TabulatedMap map;
    map.grid_ = grid;
    for (std::size_t i = 0; i < grid.count; ++i) {
      const double x = grid.start + static_cast<double>(i) * grid.step;
      map.insert(x, fn(x));
    }
    return map;
  }

  /// Tabulates `fn` at the listed inputs.
  template <typename Fn>
  static TabulatedMap at_points(std::span<const double> inputs, Fn&& fn) {
    TabulatedMap map;
    for (double x : inputs) map.insert(x, fn(x));
    return map;
  }

  void insert(double input, std::vector<double> output);

  bool defined_at(double x) const { return find(x) != nullptr; }
  /// Throws ValidationError if x is not tabulated.
  const std::vector<double>& at(double x) const;

  std::size_t dimension() const { return dim_; }
  std::size_t size() const { return table_.size(); }
  const std::optional<Grid>& grid() const { return grid_; }
  const std::map<double, std::vector<double>>& entries() const { return table_; }

  io::Json to_json() const;
  static TabulatedMap from_json(const io::Json& j);

 private:
  const std::vector<double>* find(double x) const;

  std::map<double, std::vector<double>> table_;
  std::optional<Grid> grid_;
  std::size_t dim_ = 0;
};

/// Lift of T: R -> R^n to L_r -> L_s: block k of n holds n^(1/s) T(f(.))(k).
StepFunction lift_lr(const TabulatedMap& map, const StepFunction& f, double r, double s);

/// Right-hand side of the lift norm identity:
/// integral over tau of ||T(f(tau)) - T(g(tau))||_s^s, over the common refinement.
double lift_lr_integrand(const TabulatedMap& map, const StepFunction& f, const StepFunction& g, double s);

/// Output index of (k, m) for lift_c0, m = 1..n.
inline std::size_t c0_pair_index(std::size_t k, std::size_t m, std::size_t n) { return n * k + (m - 1); }

/// Lift of T: R -> R^n to c_0 -> c_0: out(<k,m>_n) = T(x(k))(m).
std::vector<double> lift_c0(const TabulatedMap& map, std::span<const double> x);

/// T_F(f) = m^(-1/r) (f(0), f(1/m), ..., f((m-1)/m)) with f(k/m) read as the
/// value of the piece starting at k/m.
std::vector<PNormVector> discretize_lr(const std::vector<StepFunction>& family, double r, std::size_t m);

/// Smallest m for which the sampled distances provably lie within a factor
/// of 2 of the L_r distances for every pair of the family.
std::size_t discretization_threshold(const std::vector<StepFunction>& family, double r);

enum class Recenter {
  none,
  shift,  // subtract each coordinate's minimum: coordinates in [0, diam]
  unit,   // shift, then divide by diam: coordinates in [0, 1]
};

/// T(u)(m) = d(u, x_m) into l_inf^n (an isometry for Recenter::none/shift).
EmbeddingTable kuratowski_embed(const FiniteMetricSpace& space, Recenter recenter = Recenter::none);

/// floor(x 2^n) / 2^n for x in [0,1].
double dyadic_round(double x, std::size_t n);

/// Rounds entry i at index first_index + i.
std::vector<double> dyadic_round(std::span<const double> x, std::size_t first_index = 0);

/// Least-squares slope of log(output) on log(input).
double fit_log_slope(std::span<const double> input_dists, std::span<const double> output_dists);

/// Random pairs in [lo, hi]: left end uniform, gap log-uniform in
/// [min_gap, hi - lo], drawn from CounterRng(seed, stream).
std::vector<std::pair<double, double>> sample_pairs(std::size_t count, double lo, double hi,
                                                    double min_gap, std::uint64_t seed);

/// Writes "t,x,y" rows of K_r at `samples` points of [0,1]; the grid points
/// nearest 0, 1/4, 1/2, 3/4, 1 are replaced by the anchors themselves.
void write_curve_csv(std::ostream& out, const KochParams& params, std::size_t samples,
                     int depth = kDefaultKochDepth);

}  // namespace snowflake
