#include "snowflake/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace snowflake {

namespace {

bool valid_exponent(double p) { return p == kInfinity || (std::isfinite(p) && p >= 1.0); }

// Ties within this relative margin of the extreme are resolved by label order.
constexpr double kTieMargin = 1e-12;

LabelPair ordered_pair(const std::string& a, const std::string& b) {
  return a <= b ? LabelPair{a, b} : LabelPair{b, a};
}

}  // namespace

PNormVector::PNormVector(std::vector<double> coords, double p, std::size_t block)
    : coords_(std::move(coords)), p_(p), block_(block) {
  require(!coords_.empty(), "PNormVector: coordinates must be nonempty");
  require(valid_exponent(p_), "PNormVector: exponent must satisfy p >= 1 or p = inf");
  require(block_ >= 1 && coords_.size() % block_ == 0,
          "PNormVector: dimension must be a multiple of the block size");
  for (double c : coords_) require(std::isfinite(c), "PNormVector: coordinates must be finite");
}

bool PNormVector::same_space(const PNormVector& other) const {
  return p_ == other.p_ && block_ == other.block_ && coords_.size() == other.coords_.size();
}

PNormVector PNormVector::operator-(const PNormVector& other) const {
  require(same_space(other), "PNormVector: difference of vectors from different spaces");
  std::vector<double> out(coords_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = coords_[i] - other.coords_[i];
  return PNormVector(std::move(out), p_, block_);
}

PNormVector PNormVector::scaled(double c) const {
  std::vector<double> out(coords_);
  for (double& x : out) x *= c;
  return PNormVector(std::move(out), p_, block_);
}

double p_norm(std::span<const double> coords, double p, std::size_t block) {
  if (block == 1) {
    if (p == kInfinity) {
      double m = 0.0;
      for (double c : coords) m = std::max(m, std::abs(c));
      return m;
    }
    if (p == 1.0) {
      double s = 0.0;
      for (double c : coords) s += std::abs(c);
      return s;
    }
    if (p == 2.0) {
      double s = 0.0;
      for (double c : coords) s += c * c;
      return std::sqrt(s);
    }
    double s = 0.0;
    for (double c : coords) s += std::pow(std::abs(c), p);
    return std::pow(s, 1.0 / p);
  }
  std::vector<double> moduli(coords.size() / block);
  for (std::size_t g = 0; g < moduli.size(); ++g) {
    double s = 0.0;
    for (std::size_t k = 0; k < block; ++k) {
      const double c = coords[g * block + k];
      s += c * c;
    }
    moduli[g] = std::sqrt(s);
  }
  return p_norm(moduli, p, 1);
}

double p_norm(const PNormVector& v) { return p_norm(v.coords(), v.p(), v.block()); }

double p_distance(const PNormVector& a, const PNormVector& b) {
  require(a.same_space(b), "p_distance: vectors from different spaces");
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = a[i] - b[i];
  return p_norm(diff, a.p(), a.block());
}

StepFunction::StepFunction(std::vector<double> values) : values_(std::move(values)) {
  require(!values_.empty(), "StepFunction: piece count must be >= 1");
  for (double v : values_) require(std::isfinite(v), "StepFunction: values must be finite");
}

StepFunction StepFunction::refined(std::size_t factor) const {
  require(factor >= 1, "StepFunction::refined: factor must be >= 1");
  std::vector<double> out;
  out.reserve(values_.size() * factor);
  for (double v : values_) out.insert(out.end(), factor, v);
  return StepFunction(std::move(out));
}

StepFunction StepFunction::coarsened() const {
  const std::size_t m = values_.size();
  // The representable partitions are closed under gcd, so the first
  // divisor that works is the unique coarsest one.
  for (std::size_t d = 1; d < m; ++d) {
    if (m % d != 0) continue;
    const std::size_t width = m / d;
    bool constant = true;
    for (std::size_t k = 0; k < m && constant; ++k) constant = values_[k] == values_[k - k % width];
    if (!constant) continue;
    std::vector<double> out(d);
    for (std::size_t b = 0; b < d; ++b) out[b] = values_[b * width];
    return StepFunction(std::move(out));
  }
  return *this;
}

double StepFunction::right_limit(double t) const {
  require(t >= 0.0 && t < 1.0, "StepFunction::right_limit: t must lie in [0,1)");
  const auto k = static_cast<std::size_t>(std::floor(t * static_cast<double>(values_.size())));
  return values_[std::min(k, values_.size() - 1)];
}

namespace {

// Visits (|f_k - g_k|, width) over the common refinement of the coarsened inputs.
template <typename Visit>
void visit_common_refinement(const StepFunction& f0, const StepFunction& g0, Visit&& visit) {
  const StepFunction f = f0.coarsened();
  const StepFunction g = g0.coarsened();
  const std::size_t mf = f.pieces();
  const std::size_t mg = g.pieces();
  const std::size_t common = std::lcm(mf, mg);
  const std::size_t sf = common / mf;
  const std::size_t sg = common / mg;
  const double width = 1.0 / static_cast<double>(common);
  for (std::size_t k = 0; k < common; ++k) visit(std::abs(f[k / sf] - g[k / sg]), width);
}

}  // namespace

double lr_distance(const StepFunction& f, const StepFunction& g, double r) {
  require(std::isfinite(r) && r >= 1.0, "lr_distance: exponent r must be >= 1");
  double sum = 0.0;
  visit_common_refinement(f, g, [&](double diff, double width) {
    sum += width * (r == 1.0 ? diff : std::pow(diff, r));
  });
  return r == 1.0 ? sum : std::pow(sum, 1.0 / r);
}

double sup_distance(const StepFunction& f, const StepFunction& g) {
  double m = 0.0;
  visit_common_refinement(f, g, [&](double diff, double) { m = std::max(m, diff); });
  return m;
}

FiniteMetricSpace::FiniteMetricSpace(std::vector<std::string> labels,
                                     std::vector<std::vector<double>> dist)
    : labels_(std::move(labels)), dist_(std::move(dist)) {
  const std::size_t n = labels_.size();
  require(n >= 1, "FiniteMetricSpace: at least one point required");
  require(dist_.size() == n, "FiniteMetricSpace: distance matrix must be n x n");
  {
    std::vector<std::string> sorted(labels_);
    std::sort(sorted.begin(), sorted.end());
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
            "FiniteMetricSpace: labels must be distinct");
  }
  for (std::size_t i = 0; i < n; ++i) {
    require(dist_[i].size() == n, "FiniteMetricSpace: distance matrix must be n x n");
    require(dist_[i][i] == 0.0, "FiniteMetricSpace: diagonal must be zero");
    for (std::size_t j = 0; j < n; ++j) {
      require(std::isfinite(dist_[i][j]), "FiniteMetricSpace: distances must be finite");
      if (j < i) {
        require(dist_[i][j] == dist_[j][i], "FiniteMetricSpace: distance matrix must be symmetric");
      }
      if (j != i) require(dist_[i][j] > 0.0, "FiniteMetricSpace: distinct points must have positive distance");
    }
  }
}

std::size_t FiniteMetricSpace::index_of(const std::string& label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  require(it != labels_.end(), "FiniteMetricSpace: unknown label '" + label + "'");
  return static_cast<std::size_t>(it - labels_.begin());
}

double FiniteMetricSpace::diameter() const {
  double d = 0.0;
  for (const auto& row : dist_)
    for (double x : row) d = std::max(d, x);
  return d;
}

bool FiniteMetricSpace::satisfies_triangle_inequality(double tol) const {
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        if (dist_[i][k] > dist_[i][j] + dist_[j][k] + tol) return false;
  return true;
}

FiniteMetricSpace metric_space_from_points(const std::vector<PNormVector>& points,
                                           std::vector<std::string> labels) {
  require(!points.empty(), "metric_space_from_points: no points");
  require(labels.size() == points.size(), "metric_space_from_points: one label per point required");
  for (const auto& pt : points)
    require(pt.same_space(points.front()),
            "metric_space_from_points: points must share exponent and dimension");
  const std::size_t n = points.size();
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) dist[i][j] = dist[j][i] = p_distance(points[i], points[j]);
  return FiniteMetricSpace(std::move(labels), std::move(dist));
}

FiniteMetricSpace metric_space_from_points(const std::vector<PNormVector>& points) {
  std::vector<std::string> labels(points.size());
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = std::to_string(i);
  return metric_space_from_points(points, std::move(labels));
}

EmbeddingTable::EmbeddingTable(FiniteMetricSpace source, std::vector<PNormVector> images, double alpha)
    : source_(std::move(source)), images_(std::move(images)), alpha_(alpha) {
  require(images_.size() == source_.size(), "EmbeddingTable: every source point needs exactly one image");
  require(std::isfinite(alpha_) && alpha_ > 0.0, "EmbeddingTable: alpha must be positive");
  for (const auto& img : images_)
    require(img.same_space(images_.front()), "EmbeddingTable: image dimensions and exponents must agree");
}

const PNormVector& EmbeddingTable::image(const std::string& label) const {
  return images_[source_.index_of(label)];
}

DistortionReport holder_distortion(const FiniteMetricSpace& space, const EmbeddingTable& table) {
  require(space == table.source(), "holder_distortion: table source differs from the space");
  const std::size_t n = space.size();
  require(n >= 2, "holder_distortion: at least two points required");

  struct Ratio {
    double value;
    LabelPair pair;
  };
  std::vector<Ratio> ratios;
  ratios.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double image_dist = p_distance(table.image(i), table.image(j));
      const LabelPair pair = ordered_pair(space.label(i), space.label(j));
      if (image_dist == 0.0)
        throw ValidationError("embedding collapses a pair (" + pair.first + ", " + pair.second + ")");
      ratios.push_back({image_dist / std::pow(space.distance(i, j), table.alpha()), pair});
    }
  }

  double hi = 0.0;
  double lo = kInfinity;
  for (const auto& r : ratios) {
    hi = std::max(hi, r.value);
    lo = std::min(lo, r.value);
  }
  DistortionReport report;
  report.alpha = table.alpha();
  report.max_ratio = hi;
  report.min_ratio = lo;
  report.constantA = std::max(hi, 1.0 / lo);
  report.point_count = n;
  bool have_hi = false;
  bool have_lo = false;
  for (const auto& r : ratios) {
    if (r.value >= hi * (1.0 - kTieMargin) && (!have_hi || r.pair < report.worst_expanding_pair)) {
      report.worst_expanding_pair = r.pair;
      have_hi = true;
    }
    if (r.value <= lo * (1.0 + kTieMargin) && (!have_lo || r.pair < report.worst_contracting_pair)) {
      report.worst_contracting_pair = r.pair;
      have_lo = true;
    }
  }
  return report;
}

DistortionReport holder_distortion(const EmbeddingTable& table) {
  return holder_distortion(table.source(), table);
}

}  // namespace snowflake
