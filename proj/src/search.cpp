#include "snowflake/search.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <numeric>
#include <charconv>
#include <cmath>

#include "snowflake/parallel.hpp"

namespace snowflake {

namespace {

double target_distance(const double* a, const double* b, std::size_t dim, double q) {
  if (dim == 1) return std::abs(a[0] - b[0]);
  double acc = 0.0;
  if (q == 2.0) {
    for (std::size_t k = 0; k < dim; ++k) acc += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(acc);
  }
  if (std::isinf(q)) {
    for (std::size_t k = 0; k < dim; ++k) acc = std::max(acc, std::abs(a[k] - b[k]));
    return acc;
  }
  for (std::size_t k = 0; k < dim; ++k) acc += std::pow(std::abs(a[k] - b[k]), q);
  return std::pow(acc, 1.0 / q);
}

void validate(const FiniteMetricSpace& space, const SearchConfig& config) {
  require(space.size() >= 2, "search: the space needs at least two points");
  require(config.target_dim >= 1, "search: target_dim must be >= 1");
  require(config.target_exponent >= 1.0, "search: target exponent must be >= 1");
  require(config.alpha > 0.0 && std::isfinite(config.alpha), "search: alpha must be positive");
  require(config.restarts >= 1 && config.iterations >= 1, "search: restarts and iterations must be >= 1");
  require(config.step_decay > 0.0 && config.step_decay <= 1.0, "search: step decay must lie in (0, 1]");
  require(config.decay_patience >= 1, "search: decay patience must be >= 1");
}

EmbeddingTable make_table(const FiniteMetricSpace& space, const std::vector<double>& coords, std::size_t dim,
                          double q, double alpha) {
  std::vector<PNormVector> images;
  images.reserve(space.size());
  for (std::size_t i = 0; i < space.size(); ++i)
    images.emplace_back(std::vector<double>(coords.begin() + static_cast<std::ptrdiff_t>(i * dim),
                                            coords.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim)),
                        q);
  return EmbeddingTable(space, std::move(images), alpha);
}

// Target powers d(u,v)^alpha, row-major.
std::vector<double> source_powers(const FiniteMetricSpace& space, double alpha) {
  const std::size_t n = space.size();
  std::vector<double> out(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) out[i * n + j] = std::pow(space.distance(i, j), alpha);
  return out;
}

struct BruteBest {
  double a = kInfinity;
  std::vector<double> coords;
};

class BruteSearch {
 public:
  BruteSearch(const FiniteMetricSpace& space, const SearchConfig& config, std::size_t half_cells,
              const std::atomic<double>& shared_bound)
      : shared_bound_(shared_bound),
        n_(space.size()),
        dim_(config.target_dim),
        q_(config.target_exponent),
        res_(config.grid_resolution),
        half_(static_cast<long>(half_cells)),
        powers_(source_powers(space, config.alpha)),
        coords_(n_ * dim_, 0.0) {}

  BruteBest run_ray(long ray) {
    best_ = BruteBest{};
    coords_.assign(n_ * dim_, 0.0);
    coords_[dim_] = static_cast<double>(ray) * res_;
    const double a = partial_constant(1, 1.0);
    descend(2, a);
    return best_;
  }

 private:
  // Subtrees are cut when they cannot beat this ray's best (>=) or when they
  // exceed the best value any ray has reached (>).  The strict cut never
  // removes a placement that could tie the final optimum, so the witness
  // found for each ray does not depend on thread timing.
  bool cut(double a) const { return a >= best_.a || a > shared_bound_.load(std::memory_order_relaxed); }

  // max over pairs (i, j), j < i, of max(rho, 1/rho), folded into `current`.
  double partial_constant(std::size_t i, double current) const {
    for (std::size_t j = 0; j < i; ++j) {
      const double d = target_distance(&coords_[i * dim_], &coords_[j * dim_], dim_, q_);
      if (d == 0.0) return kInfinity;
      const double rho = d / powers_[i * n_ + j];
      current = std::max(current, std::max(rho, 1.0 / rho));
    }
    return current;
  }

  void descend(std::size_t i, double current) {
    if (cut(current)) return;
    if (i == n_) {
      best_.a = current;
      best_.coords = coords_;
      return;
    }
    const long y_lo = (dim_ == 2 && i == 2) ? 0 : -half_;
    const long y_hi = dim_ == 2 ? half_ : 0;
    for (long gx = -half_; gx <= half_; ++gx) {
      coords_[i * dim_] = static_cast<double>(gx) * res_;
      for (long gy = (dim_ == 2 ? y_lo : 0); gy <= y_hi; ++gy) {
        if (dim_ == 2) coords_[i * dim_ + 1] = static_cast<double>(gy) * res_;
        const double a = partial_constant(i, current);
        if (!cut(a)) descend(i + 1, a);
      }
    }
  }

  const std::atomic<double>& shared_bound_;
  std::size_t n_;
  std::size_t dim_;
  double q_;
  double res_;
  long half_;
  std::vector<double> powers_;
  std::vector<double> coords_;
  BruteBest best_;
};

}  // namespace

SearchResult brute_min_distortion(const FiniteMetricSpace& space, const SearchConfig& config) {
  validate(space, config);
  require(space.size() <= 5, "brute_min_distortion: at most 5 points supported");
  require(config.target_dim <= 2, "brute_min_distortion: target_dim must be 1 or 2");
  require(config.grid_resolution > 0.0, "brute_min_distortion: grid resolution must be positive");
  const double radius =
      config.box_radius > 0.0 ? config.box_radius : 1.5 * std::pow(space.diameter(), config.alpha);
  const auto half = static_cast<std::size_t>(std::floor(radius / config.grid_resolution + 1e-9));
  require(half >= 1, "brute_min_distortion: grid too coarse for the box");

  const double axis = static_cast<double>(2 * half + 1);
  const double full = config.target_dim == 2 ? axis * axis : axis;
  const double upper_half = config.target_dim == 2 ? axis * static_cast<double>(half + 1) : axis;
  double count = static_cast<double>(half);
  if (space.size() >= 3) count *= upper_half;
  for (std::size_t i = 3; i < space.size(); ++i) count *= full;
  if (count > config.max_placements) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "brute_min_distortion: %.0f gauge-fixed placements exceed the budget of %.0f",
                  count, config.max_placements);
    throw ValidationError(buf);
  }

  // Rays nearest the source distance of the first pair go first, so the
  // shared bound tightens early; the order does not affect the result.
  const long rays = static_cast<long>(half);
  const double first_gap = std::pow(space.distance(0, 1), config.alpha);
  std::vector<long> order(static_cast<std::size_t>(rays));
  std::iota(order.begin(), order.end(), 1L);
  std::stable_sort(order.begin(), order.end(), [&](long a, long b) {
    return std::abs(static_cast<double>(a) * config.grid_resolution - first_gap) <
           std::abs(static_cast<double>(b) * config.grid_resolution - first_gap);
  });
  std::atomic<double> shared_bound{kInfinity};
  std::vector<BruteBest> per_ray(static_cast<std::size_t>(rays));
#pragma omp parallel
  {
    BruteSearch search(space, config, half, shared_bound);
#pragma omp for schedule(dynamic, 1)
    for (long k = 0; k < rays; ++k) {
      const long ray = order[static_cast<std::size_t>(k)];
      BruteBest found = search.run_ray(ray);
      double seen = shared_bound.load();
      while (found.a < seen && !shared_bound.compare_exchange_weak(seen, found.a)) {
      }
      per_ray[static_cast<std::size_t>(ray - 1)] = std::move(found);
    }
  }

  BruteBest best;
  for (const auto& b : per_ray)
    if (b.a < best.a) best = b;
  require(std::isfinite(best.a), "brute_min_distortion: no non-collapsing placement on the grid");
  EmbeddingTable table = make_table(space, best.coords, config.target_dim, config.target_exponent, config.alpha);
  const DistortionReport report = holder_distortion(space, table);
  return SearchResult{report.constantA, std::log(report.constantA), std::move(table), {report.constantA},
                      static_cast<std::size_t>(count)};
}

namespace {

struct LocalRun {
  double objective = kInfinity;
  std::vector<double> coords;
  std::size_t evaluations = 0;
};

class LocalSearch {
 public:
  LocalSearch(const FiniteMetricSpace& space, const SearchConfig& config)
      : n_(space.size()), dim_(config.target_dim), q_(config.target_exponent), config_(config) {
    log_source_.assign(n_ * n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        if (i != j) log_source_[i * n_ + j] = config.alpha * std::log(space.distance(i, j));
    scale_ = std::pow(space.diameter(), config.alpha);
  }

  LocalRun run(std::size_t restart) {
    SeededStream rng(config_.seed, restart);
    std::vector<double> coords(n_ * dim_);
    if (restart == 0 && config_.initial) {
      for (std::size_t i = 0; i < n_; ++i)
        std::copy((*config_.initial)[i].begin(), (*config_.initial)[i].end(), coords.begin() + static_cast<std::ptrdiff_t>(i * dim_));
    } else {
      for (double& c : coords) c = rng.uniform(0.0, scale_);
    }
    terms_.assign(n_ * n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) update_row(coords, i);
    LocalRun out;
    out.objective = max_term();
    out.evaluations = 1;

    double step = config_.initial_step > 0.0 ? config_.initial_step : scale_ / 4.0;
    std::size_t idle = 0;
    std::vector<double> saved_row(n_);
    std::vector<double> saved_point(dim_);
    for (std::size_t it = 1; it < config_.iterations; ++it) {
      std::size_t point;
      if (rng.uniform() < 0.5) {
        point = rng.uniform() < 0.5 ? worst_i_ : worst_j_;
      } else {
        point = static_cast<std::size_t>(rng.below(n_));
      }
      std::copy_n(coords.begin() + static_cast<std::ptrdiff_t>(point * dim_), dim_, saved_point.begin());
      for (std::size_t j = 0; j < n_; ++j) saved_row[j] = terms_[point * n_ + j];
      const std::size_t saved_i = worst_i_, saved_j = worst_j_;
      for (std::size_t k = 0; k < dim_; ++k) coords[point * dim_ + k] += rng.uniform(-step, step);
      update_row(coords, point);
      const double candidate = max_term();
      ++out.evaluations;
      if (candidate < out.objective) {
        out.objective = candidate;
        idle = 0;
      } else {
        std::copy_n(saved_point.begin(), dim_, coords.begin() + static_cast<std::ptrdiff_t>(point * dim_));
        for (std::size_t j = 0; j < n_; ++j) {
          terms_[point * n_ + j] = saved_row[j];
          terms_[j * n_ + point] = saved_row[j];
        }
        worst_i_ = saved_i;
        worst_j_ = saved_j;
        if (++idle >= config_.decay_patience) {
          step *= config_.step_decay;
          idle = 0;
        }
      }
    }
    out.coords = std::move(coords);
    return out;
  }

 private:
  void update_row(const std::vector<double>& coords, std::size_t i) {
    for (std::size_t j = 0; j < n_; ++j) {
      if (j == i) continue;
      const double d = target_distance(&coords[i * dim_], &coords[j * dim_], dim_, q_);
      const double t = d > 0.0 ? std::abs(std::log(d) - log_source_[i * n_ + j]) : kInfinity;
      terms_[i * n_ + j] = t;
      terms_[j * n_ + i] = t;
    }
  }

  double max_term() {
    double best = -1.0;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j)
        if (terms_[i * n_ + j] > best) {
          best = terms_[i * n_ + j];
          worst_i_ = i;
          worst_j_ = j;
        }
    return best;
  }

  std::size_t n_;
  std::size_t dim_;
  double q_;
  const SearchConfig& config_;
  std::vector<double> log_source_;
  std::vector<double> terms_;
  double scale_ = 1.0;
  std::size_t worst_i_ = 0;
  std::size_t worst_j_ = 1;
};

}  // namespace

SearchResult local_min_distortion(const FiniteMetricSpace& space, const SearchConfig& config) {
  validate(space, config);
  if (config.initial) {
    require(config.initial->size() == space.size(), "local_min_distortion: initial embedding has the wrong point count");
    for (const auto& row : *config.initial)
      require(row.size() == config.target_dim, "local_min_distortion: initial embedding has the wrong dimension");
  }
  std::vector<LocalRun> runs(config.restarts);
#pragma omp parallel
  {
    LocalSearch search(space, config);
#pragma omp for schedule(dynamic, 1)
    for (std::size_t r = 0; r < config.restarts; ++r) runs[r] = search.run(r);
  }
  std::size_t best = 0;
  std::size_t evaluations = 0;
  std::vector<double> values;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    evaluations += runs[r].evaluations;
    values.push_back(std::exp(runs[r].objective));
    if (runs[r].objective < runs[best].objective) best = r;
  }
  require(std::isfinite(runs[best].objective), "local_min_distortion: every restart collapses a pair");
  EmbeddingTable table =
      make_table(space, runs[best].coords, config.target_dim, config.target_exponent, config.alpha);
  const DistortionReport report = holder_distortion(space, table);
  return SearchResult{report.constantA, runs[best].objective, std::move(table), std::move(values), evaluations};
}

bool path_alpha_bound_check(std::size_t n, double alpha, const DistortionReport& report, double relative_tolerance) {
  require(n >= 1, "path_alpha_bound_check: n must be >= 1");
  require(report.point_count == n + 1, "path_alpha_bound_check: report is not on a path with n + 1 points");
  require(std::abs(report.alpha - alpha) <= 1e-12, "path_alpha_bound_check: report exponent differs from alpha");
  const double bound = std::pow(static_cast<double>(n), alpha - 1.0);
  return report.constantA * report.constantA >= bound * (1.0 - relative_tolerance);
}

FiniteMetricSpace path_space(std::size_t n) {
  require(n >= 1, "path_space: n must be >= 1");
  std::vector<PNormVector> points;
  for (std::size_t i = 0; i <= n; ++i)
    points.emplace_back(std::vector<double>{static_cast<double>(i) / static_cast<double>(n)}, 2.0);
  return metric_space_from_points(points);
}

FiniteMetricSpace cycle_space(std::size_t n) {
  require(n >= 3, "cycle_space: n must be >= 3");
  std::vector<std::string> labels;
  std::vector<std::vector<double>> dist(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    labels.push_back(std::to_string(i));
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t gap = i > j ? i - j : j - i;
      dist[i][j] = static_cast<double>(std::min(gap, n - gap));
    }
  }
  return FiniteMetricSpace(std::move(labels), std::move(dist));
}

FiniteMetricSpace triangle_space() {
  return FiniteMetricSpace({"0", "1", "2"}, {{0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
}

FiniteMetricSpace hypercube_space(unsigned n, double p) {
  require(n >= 1 && n <= 16, "hypercube_space: n must be in 1..16");
  std::vector<PNormVector> points;
  for (std::size_t s = 0; s < (std::size_t{1} << n); ++s) {
    std::vector<double> coords(n);
    for (unsigned j = 0; j < n; ++j) coords[j] = static_cast<double>((s >> j) & 1U);
    points.emplace_back(std::move(coords), p);
  }
  return metric_space_from_points(points);
}

namespace {

double parse_field(const std::string& text, const std::string& name) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  require(ec == std::errc() && ptr == text.data() + text.size(),
          "unknown built-in space '" + name + "' (expected path:<n>, cycle:<n>, triangle, hypercube:<n>:<p>)");
  return value;
}

}  // namespace

FiniteMetricSpace builtin_space(const std::string& name) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto colon = name.find(':', start);
    parts.push_back(name.substr(start, colon - start));
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  const auto integer = [&](const std::string& text) {
    const double v = parse_field(text, name);
    require(v >= 0 && v == std::floor(v), "built-in space '" + name + "': size must be a non-negative integer");
    return static_cast<std::size_t>(v);
  };
  if (parts[0] == "triangle" && parts.size() == 1) return triangle_space();
  if (parts[0] == "path" && parts.size() == 2) return path_space(integer(parts[1]));
  if (parts[0] == "cycle" && parts.size() == 2) return cycle_space(integer(parts[1]));
  if (parts[0] == "hypercube" && parts.size() == 3)
    return hypercube_space(static_cast<unsigned>(integer(parts[1])), parse_field(parts[2], name));
  throw ValidationError("unknown built-in space '" + name +
                        "' (expected path:<n>, cycle:<n>, triangle, hypercube:<n>:<p>)");
}

}  // namespace snowflake
