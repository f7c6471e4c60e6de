#include "snowflake/embeddings.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <ostream>

#include "snowflake/parallel.hpp"

namespace snowflake {

namespace {

using Complex = std::complex<double>;

Complex as_complex(Point2 p) { return {p.x, p.y}; }
Point2 as_point(Complex z) { return {z.real(), z.imag()}; }

}  // namespace

KochParams::KochParams(double r, double alpha)
    : r_(r), alpha_(alpha), h_(std::sqrt(r * r - (0.5 - r) * (0.5 - r))) {}

KochParams KochParams::from_ratio(double r) {
  require(r > 0.25 && r < 0.5, "KochParams: ratio r must lie in (1/4, 1/2)");
  return KochParams(r, std::log(1.0 / r) / std::log(4.0));
}

KochParams KochParams::from_alpha(double alpha) {
  require(alpha > 0.5 && alpha < 1.0, "KochParams: alpha must lie in (1/2, 1)");
  return KochParams(std::pow(4.0, -alpha), alpha);
}

Point2 KochParams::vertex(int i) const {
  switch (i) {
    case 0: return {0.0, 0.0};
    case 1: return {r_, 0.0};
    case 2: return {0.5, h_};
    case 3: return {1.0 - r_, 0.0};
    case 4: return {1.0, 0.0};
    default: throw ValidationError("KochParams::vertex: index must be in 0..4");
  }
}

Point2 koch_eval(const KochParams& params, double t, int depth) {
  require(t >= 0.0 && t <= 1.0, "koch_eval: t must lie in [0,1]");
  require(depth >= 1, "koch_eval: depth must be positive");
  Complex vertices[5];
  for (int i = 0; i < 5; ++i) vertices[i] = as_complex(params.vertex(i));

  // Composition of the chosen similarities is z -> offset + scale * z.
  Complex offset = 0.0;
  Complex scale = 1.0;
  for (int level = 0; level < depth && t > 0.0; ++level) {
    const double scaled = 4.0 * t;
    const int digit = std::min(static_cast<int>(scaled), 3);
    t = scaled - digit;
    offset += scale * vertices[digit];
    scale *= vertices[digit + 1] - vertices[digit];
  }
  return as_point(offset + scale * t);
}

double ExtensionFrame::length() const { return std::ldexp(1.0, 2 * m); }

ExtensionFrame extension_frame(const KochParams& params, int m) {
  require(m >= 0, "extension_frame: m must be >= 0");
  ExtensionFrame frame;
  for (int step = 1; step <= m; ++step) {
    const double previous_scale = frame.scale;
    const double previous_length = frame.length();
    frame.m = step;
    frame.scale = previous_scale / params.r();
    if (step % 2 == 0) {
      // Old domain becomes the last quarter of the new one.
      frame.a -= 3.0 * previous_length;
      frame.c.x -= frame.scale - previous_scale;
    }
  }
  return frame;
}

Point2 koch_extend(const KochParams& params, double t, int max_steps) {
  require(std::isfinite(t), "koch_extend: t must be finite");
  ExtensionFrame frame;
  for (int m = 0; m <= max_steps; ++m) {
    if (m > 0) frame = extension_frame(params, m);
    if (frame.contains(t)) {
      const double u = std::clamp((t - frame.a) / frame.length(), 0.0, 1.0);
      const Point2 k = koch_eval(params, u);
      return {frame.scale * k.x + frame.c.x, frame.scale * k.y + frame.c.y};
    }
  }
  throw ValidationError("koch_extend: t outside the domain reachable in max_steps frames; increase max_steps");
}

HolderLineMap::HolderLineMap(double alpha, int max_steps) : alpha_(alpha), stages_(0), beta_(1.0), max_steps_(max_steps) {
  require(alpha > 0.0 && alpha <= 1.0, "holder_line_map: alpha must lie in (0, 1]");
  if (alpha == 1.0) return;
  stages_ = static_cast<int>(std::floor(std::log2(1.0 / alpha))) + 1;
  beta_ = std::pow(alpha, 1.0 / stages_);
  // Guard against log2 rounding at exact powers of two.
  while (beta_ <= 0.5) beta_ = std::pow(alpha, 1.0 / ++stages_);
  params_ = KochParams::from_alpha(beta_);
}

std::vector<double> HolderLineMap::operator()(double t) const {
  std::vector<double> current{t};
  for (int stage = 0; stage < stages_; ++stage) {
    std::vector<double> next;
    next.reserve(2 * current.size());
    for (double c : current) {
      const Point2 p = koch_extend(*params_, c, max_steps_);
      next.push_back(p.x);
      next.push_back(p.y);
    }
    current = std::move(next);
  }
  return current;
}

std::vector<double> holder_line_map(double alpha, double t) { return HolderLineMap(alpha)(t); }

void TabulatedMap::insert(double input, std::vector<double> output) {
  require(std::isfinite(input), "TabulatedMap: inputs must be finite");
  require(!output.empty(), "TabulatedMap: outputs must be nonempty");
  if (table_.empty()) dim_ = output.size();
  require(output.size() == dim_, "TabulatedMap: all outputs must share one dimension");
  table_[input] = std::move(output);
}

const std::vector<double>* TabulatedMap::find(double x) const {
  if (auto it = table_.find(x); it != table_.end()) return &it->second;
  if (grid_ && grid_->step > 0.0) {
    const double pos = (x - grid_->start) / grid_->step;
    const double node = std::round(pos);
    if (std::abs(pos - node) <= 1e-9 && node >= 0.0 && node < static_cast<double>(grid_->count)) {
      const double key = grid_->start + node * grid_->step;
      if (auto it = table_.find(key); it != table_.end()) return &it->second;
    }
  }
  return nullptr;
}

const std::vector<double>& TabulatedMap::at(double x) const {
  const auto* out = find(x);
  if (out == nullptr) throw ValidationError("TabulatedMap: map undefined at " + io::format_double(x));
  return *out;
}

io::Json TabulatedMap::to_json() const {
  io::Json pairs = io::Json::array();
  for (const auto& [x, y] : table_) pairs.push_back(io::Json::array({x, y}));
  io::Json j{{"pairs", pairs}};
  if (grid_) j["grid"] = {{"start", grid_->start}, {"step", grid_->step}, {"count", grid_->count}};
  return j;
}

TabulatedMap TabulatedMap::from_json(const io::Json& j) {
  TabulatedMap map;
  const io::Json& pairs = j.is_array() ? j : j.at("pairs");
  for (const auto& entry : pairs) {
    require(entry.is_array() && entry.size() == 2, "TabulatedMap JSON: each pair must be [input, [outputs]]");
    map.insert(entry[0].get<double>(), entry[1].get<std::vector<double>>());
  }
  if (j.is_object() && j.contains("grid")) {
    const auto& g = j.at("grid");
    map.grid_ = Grid{g.at("start").get<double>(), g.at("step").get<double>(), g.at("count").get<std::size_t>()};
    require(map.grid_->step > 0.0, "TabulatedMap JSON: grid step must be positive");
  }
  return map;
}

StepFunction lift_lr(const TabulatedMap& map, const StepFunction& f, double r, double s) {
  require(std::isfinite(r) && r >= 1.0, "lift_lr: r must be >= 1");
  require(std::isfinite(s) && s >= 1.0, "lift_lr: s must be >= 1");
  const std::size_t n = map.dimension();
  require(n >= 1, "lift_lr: empty map");
  const std::size_t m = f.pieces();
  const double factor = std::pow(static_cast<double>(n), 1.0 / s);
  std::vector<double> out(n * m);
  for (std::size_t j = 0; j < m; ++j) {
    const auto& image = map.at(f[j]);
    for (std::size_t k = 0; k < n; ++k) out[k * m + j] = factor * image[k];
  }
  return StepFunction(std::move(out));
}

double lift_lr_integrand(const TabulatedMap& map, const StepFunction& f, const StepFunction& g, double s) {
  const std::size_t common = std::lcm(f.pieces(), g.pieces());
  const std::size_t sf = common / f.pieces();
  const std::size_t sg = common / g.pieces();
  double total = 0.0;
  for (std::size_t k = 0; k < common; ++k) {
    const auto& a = map.at(f[k / sf]);
    const auto& b = map.at(g[k / sg]);
    double piece = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) piece += std::pow(std::abs(a[i] - b[i]), s);
    total += piece / static_cast<double>(common);
  }
  return total;
}

std::vector<double> lift_c0(const TabulatedMap& map, std::span<const double> x) {
  const std::size_t n = map.dimension();
  std::vector<double> out(n * x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const auto& image = map.at(x[k]);
    for (std::size_t m = 1; m <= n; ++m) out[c0_pair_index(k, m, n)] = image[m - 1];
  }
  return out;
}

std::vector<PNormVector> discretize_lr(const std::vector<StepFunction>& family, double r, std::size_t m) {
  require(m >= 1, "discretize_lr: sample count m must be >= 1");
  require(std::isfinite(r) && r >= 1.0, "discretize_lr: r must be >= 1");
  const double weight = std::pow(static_cast<double>(m), -1.0 / r);
  std::vector<PNormVector> out;
  out.reserve(family.size());
  for (const auto& f : family) {
    std::vector<double> samples(m);
    // Piece containing (k/m, k/m + eps): floor(k * pieces / m), exact in integers.
    for (std::size_t k = 0; k < m; ++k) samples[k] = weight * f[k * f.pieces() / m];
    out.emplace_back(std::move(samples), r);
  }
  return out;
}

std::size_t discretization_threshold(const std::vector<StepFunction>& family, double r) {
  require(std::isfinite(r) && r >= 1.0, "discretization_threshold: r must be >= 1");
  double worst = 1.0;
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t j = i + 1; j < family.size(); ++j) {
      const StepFunction f = family[i].coarsened();
      const StepFunction g = family[j].coarsened();
      const double norm = lr_distance(f, g, r);
      if (norm == 0.0) continue;
      const std::size_t common = std::lcm(f.pieces(), g.pieces());
      double lo = kInfinity, hi = -kInfinity;
      for (std::size_t k = 0; k < common; ++k) {
        const double h = f[k * f.pieces() / common] - g[k * g.pieces() / common];
        lo = std::min(lo, h);
        hi = std::max(hi, h);
      }
      // At most common - 1 sample cells straddle a breakpoint; each contributes
      // at most (hi - lo)^r / m to the r-th power of the sampling error.
      const double needed = static_cast<double>(common - 1) * std::pow(2.0 * (hi - lo) / norm, r);
      worst = std::max(worst, std::ceil(needed));
    }
  }
  require(worst < 1e15, "discretization_threshold: threshold exceeds representable sample counts");
  return static_cast<std::size_t>(worst);
}

EmbeddingTable kuratowski_embed(const FiniteMetricSpace& space, Recenter recenter) {
  const std::size_t n = space.size();
  std::vector<std::vector<double>> rows(n, std::vector<double>(n));
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t m = 0; m < n; ++m) rows[u][m] = space.distance(u, m);
  if (recenter != Recenter::none) {
    const double diam = space.diameter();
    for (std::size_t m = 0; m < n; ++m) {
      double lo = kInfinity;
      for (std::size_t u = 0; u < n; ++u) lo = std::min(lo, rows[u][m]);
      for (std::size_t u = 0; u < n; ++u) {
        rows[u][m] -= lo;
        if (recenter == Recenter::unit && diam > 0.0) rows[u][m] /= diam;
      }
    }
  }
  std::vector<PNormVector> images;
  images.reserve(n);
  for (auto& row : rows) images.emplace_back(std::move(row), kInfinity);
  return EmbeddingTable(space, std::move(images), 1.0);
}

double dyadic_round(double x, std::size_t n) {
  require(x >= 0.0 && x <= 1.0, "dyadic_round: entries must lie in [0,1]");
  // Every double in [0,1] is a multiple of 2^-1074.
  if (n >= 1074) return x;
  const int e = static_cast<int>(n);
  return std::ldexp(std::floor(std::ldexp(x, e)), -e);
}

std::vector<double> dyadic_round(std::span<const double> x, std::size_t first_index) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = dyadic_round(x[i], first_index + i);
  return out;
}

double fit_log_slope(std::span<const double> input_dists, std::span<const double> output_dists) {
  require(input_dists.size() == output_dists.size() && input_dists.size() >= 2,
          "fit_log_slope: need at least two matched distances");
  const std::size_t n = input_dists.size();
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    require(input_dists[i] > 0.0 && output_dists[i] > 0.0, "fit_log_slope: distances must be positive");
    xs[i] = std::log(input_dists[i]);
    ys[i] = std::log(output_dists[i]);
  }
  const double mx = pairwise_sum(xs) / static_cast<double>(n);
  const double my = pairwise_sum(ys) / static_cast<double>(n);
  std::vector<double> sxy(n), sxx(n);
  for (std::size_t i = 0; i < n; ++i) {
    sxy[i] = (xs[i] - mx) * (ys[i] - my);
    sxx[i] = (xs[i] - mx) * (xs[i] - mx);
  }
  const double denom = pairwise_sum(sxx);
  require(denom > 0.0, "fit_log_slope: input distances are all equal");
  return pairwise_sum(sxy) / denom;
}

std::vector<std::pair<double, double>> sample_pairs(std::size_t count, double lo, double hi,
                                                    double min_gap, std::uint64_t seed) {
  require(hi > lo && min_gap > 0.0 && min_gap < hi - lo, "sample_pairs: need lo < hi and 0 < min_gap < hi - lo");
  const CounterRng rng(seed, 7);
  const double log_min = std::log(min_gap);
  const double log_max = std::log(hi - lo);
  std::vector<std::pair<double, double>> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double gap = std::exp(log_min + (log_max - log_min) * rng.uniform(2 * k));
    const double left = lo + (hi - lo - gap) * rng.uniform(2 * k + 1);
    out[k] = {left, std::min(hi, left + gap)};
  }
  return out;
}

void write_curve_csv(std::ostream& out, const KochParams& params, std::size_t samples, int depth) {
  require(samples >= 5, "curve export: at least 5 samples required to include the anchors");
  std::vector<double> ts(samples);
  for (std::size_t i = 0; i < samples; ++i) ts[i] = static_cast<double>(i) / static_cast<double>(samples - 1);
  for (double anchor : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const auto nearest = static_cast<std::size_t>(std::llround(anchor * static_cast<double>(samples - 1)));
    ts[nearest] = anchor;
  }
  std::vector<Point2> points(samples);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < samples; ++i) points[i] = koch_eval(params, ts[i], depth);

  io::CsvWriter csv(out);
  csv.header({"t", "x", "y"});
  for (std::size_t i = 0; i < samples; ++i) csv.row({ts[i], points[i].x, points[i].y});
}

}  // namespace snowflake
