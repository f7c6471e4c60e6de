#pragma once

// Core value types shared by every module: finite-dimensional p-norm
// vectors, step functions on [0,1], finite metric spaces and the Hölder
// distortion of a map between them.

#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace snowflake {

/// Raised when an input violates a documented precondition.  The CLI maps
/// it to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Absolute tolerance for comparisons of computed invariants.
inline constexpr double kTolerance = 1e-9;

/// Throws ValidationError with `message` unless `condition` holds.
inline void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

/// A point of l_p^d.  `block` groups consecutive coordinates: each group of
/// `block` reals is measured by its Euclidean modulus and the moduli are
/// combined with exponent p.  block = 1 is the plain l_p norm; block = 2
/// realizes l_p^n(C) over real pairs.
class PNormVector {
 public:
  PNormVector(std::vector<double> coords, double p, std::size_t block = 1);

  const std::vector<double>& coords() const { return coords_; }
  double p() const { return p_; }
  std::size_t block() const { return block_; }
  std::size_t size() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }

  /// True when both vectors live in the same space (exponent, dimension, block).
  bool same_space(const PNormVector& other) const;

  PNormVector operator-(const PNormVector& other) const;
  PNormVector scaled(double c) const;

 private:
  std::vector<double> coords_;
  double p_;
  std::size_t block_;
};

/// (sum |x_i|^p)^(1/p), or max |x_i| for p = infinity; block moduli first.
double p_norm(const PNormVector& v);

/// Norm of the raw coordinate span; the kernel behind p_norm.
double p_norm(std::span<const double> coords, double p, std::size_t block = 1);

/// p_norm(a - b) without materializing the difference.
double p_distance(const PNormVector& a, const PNormVector& b);

/// Desk-scale element of L_r[0,1]: value k (0-based) lives on ((k)/m, (k+1)/m],
/// the first piece also covering 0.
class StepFunction {
 public:
  explicit StepFunction(std::vector<double> values);

  std::size_t pieces() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t k) const { return values_[k]; }

  /// Same function on a partition with `factor` times more pieces.
  StepFunction refined(std::size_t factor) const;

  /// Coarsest uniform partition representing the same function.
  StepFunction coarsened() const;

  /// Value of the piece whose interior starts at `t` (right limit); t in [0,1).
  double right_limit(double t) const;

 private:
  std::vector<double> values_;
};

/// L_r distance of two step functions, exact over their common refinement.
/// Both functions are coarsened first, so refining either input never
/// changes the result.
double lr_distance(const StepFunction& f, const StepFunction& g, double r);

/// sup |f - g| over the common refinement.
double sup_distance(const StepFunction& f, const StepFunction& g);

/// Labeled points with a symmetric distance matrix.  The constructor checks
/// symmetry, zero diagonal and positivity off the diagonal; the triangle
/// inequality is checked separately (it is O(n^3)).
class FiniteMetricSpace {
 public:
  FiniteMetricSpace(std::vector<std::string> labels,
                    std::vector<std::vector<double>> dist);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::size_t i) const { return labels_[i]; }
  double distance(std::size_t i, std::size_t j) const { return dist_[i][j]; }
  const std::vector<std::vector<double>>& matrix() const { return dist_; }

  /// Index of `label`; throws ValidationError if absent.
  std::size_t index_of(const std::string& label) const;

  double diameter() const;

  /// Exhaustive triangle check with absolute slack `tol`.
  bool satisfies_triangle_inequality(double tol = kTolerance) const;

  bool operator==(const FiniteMetricSpace&) const = default;

 private:
  std::vector<std::string> labels_;
  std::vector<std::vector<double>> dist_;
};

/// Metric induced by p_norm on a set of points sharing exponent and dimension.
FiniteMetricSpace metric_space_from_points(const std::vector<PNormVector>& points,
                                           std::vector<std::string> labels);

/// Same, labels "0", "1", ...
FiniteMetricSpace metric_space_from_points(const std::vector<PNormVector>& points);

/// A map from the points of a finite metric space to a normed space, with
/// the Hölder exponent it claims.  images[i] is the image of source.label(i).
class EmbeddingTable {
 public:
  EmbeddingTable(FiniteMetricSpace source, std::vector<PNormVector> images, double alpha);

  const FiniteMetricSpace& source() const { return source_; }
  const std::vector<PNormVector>& images() const { return images_; }
  const PNormVector& image(std::size_t i) const { return images_[i]; }
  const PNormVector& image(const std::string& label) const;
  double alpha() const { return alpha_; }
  double p() const { return images_.front().p(); }
  std::size_t dimension() const { return images_.front().size(); }

 private:
  FiniteMetricSpace source_;
  std::vector<PNormVector> images_;
  double alpha_;
};

using LabelPair = std::pair<std::string, std::string>;

struct DistortionReport {
  double alpha = 1.0;
  /// Least A with (1/A) d^alpha <= d' <= A d^alpha over all pairs.
  double constantA = 1.0;
  /// max and min of d'/d^alpha over distinct pairs.
  double max_ratio = 1.0;
  double min_ratio = 1.0;
  LabelPair worst_expanding_pair;
  LabelPair worst_contracting_pair;
  std::size_t point_count = 0;

  /// Classical two-sided distortion max_ratio / min_ratio (= A^2 when balanced).
  double distortion() const { return max_ratio / min_ratio; }
};

/// Least Hölder(alpha) constant of `table` over all distinct source pairs.
/// Throws ValidationError if the table collapses a pair or has < 2 points.
DistortionReport holder_distortion(const FiniteMetricSpace& space, const EmbeddingTable& table);
DistortionReport holder_distortion(const EmbeddingTable& table);

}  // namespace snowflake
