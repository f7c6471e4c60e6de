#include "snowflake/reductions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "snowflake/embeddings.hpp"
#include "snowflake/parallel.hpp"

namespace snowflake {

namespace {

// Relative slack for the non-strict and strict comparisons in the regime
// checks; the linear base maps attain their constant A exactly.
constexpr double kRelativeSlack = 1e-12;

std::uint64_t isqrt(std::uint64_t x) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(x)));
  while (r > 0 && r * r > x) --r;
  while ((r + 1) * (r + 1) <= x) ++r;
  return r;
}

double parse_number(const std::string& text, const std::string& spec) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  require(ec == std::errc() && ptr == text.data() + text.size(),
          "planting spec '" + spec + "': malformed number '" + text + "'");
  return value;
}

}  // namespace

std::uint64_t cantor_pair(std::uint64_t n, std::uint64_t m) {
  const std::uint64_t s = n + m;
  return (s % 2 == 0 ? (s / 2) * (s + 1) : s * ((s + 1) / 2)) + m;
}

std::pair<std::uint64_t, std::uint64_t> cantor_unpair(std::uint64_t k) {
  // Largest s with s(s+1)/2 <= k.
  std::uint64_t s = (isqrt(8 * k + 1) - 1) / 2;
  while (s * (s + 1) / 2 > k) --s;
  const std::uint64_t m = k - s * (s + 1) / 2;
  return {s - m, m};
}

SequencePair::SequencePair(std::vector<PNormVector> x, std::vector<PNormVector> y)
    : x_(std::move(x)), y_(std::move(y)) {
  require(x_.size() == y_.size(), "SequencePair: x and y must have equal length");
  for (std::size_t n = 0; n < x_.size(); ++n) {
    require(x_[n].same_space(x_.front()) && y_[n].same_space(x_.front()),
            "SequencePair: entry " + std::to_string(n) + " is not in the declared space");
  }
}

std::vector<double> SequencePair::distances() const {
  std::vector<double> d(x_.size());
  for (std::size_t n = 0; n < x_.size(); ++n) d[n] = p_distance(x_[n], y_[n]);
  return d;
}

BaseMap linear_base_map(double q) {
  require(q >= 1.0 && std::isfinite(q), "linear base map: q must be >= 1");
  BaseMap base;
  base.name = "linear";
  base.apply = [q](const PNormVector& u) {
    require(u.size() == 1, "linear base map: input must be a real number");
    return PNormVector({u[0], 2.0 * u[0]}, q);
  };
  base.A = std::pow(1.0 + std::pow(2.0, q), 1.0 / q);
  base.exponent = 1.0;
  base.homogeneous = true;
  return base;
}

BaseMap identity_base_map(double q) {
  require(q >= 1.0 && std::isfinite(q), "identity base map: q must be >= 1");
  BaseMap base;
  base.name = "identity";
  base.apply = [q](const PNormVector& u) {
    require(u.size() == 1, "identity base map: input must be a real number");
    return PNormVector({u[0]}, q);
  };
  base.A = 1.0;
  base.exponent = 1.0;
  base.homogeneous = true;
  return base;
}

BaseMap koch_base_map(double alpha, std::size_t pairs, double safety, std::uint64_t seed) {
  const KochParams params = KochParams::from_alpha(alpha);
  require(safety >= 1.0, "koch base map: safety factor must be >= 1");
  const auto samples = sample_pairs(pairs, -4096.0, 4096.0, 1e-6, seed);
  double max_ratio = 0.0;
  double min_ratio = kInfinity;
  for (const auto& [s, t] : samples) {
    const Point2 a = koch_extend(params, s);
    const Point2 b = koch_extend(params, t);
    const double ratio = std::hypot(a.x - b.x, a.y - b.y) / std::pow(std::abs(s - t), alpha);
    max_ratio = std::max(max_ratio, ratio);
    min_ratio = std::min(min_ratio, ratio);
  }
  BaseMap base;
  base.name = "koch";
  base.apply = [params](const PNormVector& u) {
    require(u.size() == 1, "koch base map: input must be a real number");
    const Point2 z = koch_extend(params, u[0]);
    return PNormVector({z.x, z.y}, 2.0);
  };
  base.A = safety * std::max(max_ratio, 1.0 / min_ratio);
  base.exponent = alpha;
  base.homogeneous = false;
  return base;
}

ReductionFamily scaled_family(const BaseMap& base, double p, double q, double c, double d) {
  require(p >= 1.0 && q >= 1.0 && std::isfinite(p) && std::isfinite(q), "scaled_family: p, q must be >= 1");
  require(c > 0.0 && d > 0.0, "scaled_family: c and d must be positive");
  require(std::abs(p / q - base.exponent) <= 1e-12,
          "scaled_family: p/q must equal the base map's Hölder exponent");
  const double ratio = p / q;
  ReductionFamily family;
  family.p = p;
  family.q = q;
  family.A = base.A;
  family.C = c;
  family.D = std::pow(c, ratio) / base.A;
  family.eps = [c](std::size_t n) { return std::ldexp(c, -static_cast<int>(std::min<std::size_t>(n, 1 << 20))); };
  family.delta = [d, ratio](std::size_t n) { return d * std::exp2(-ratio * static_cast<double>(n)); };
  if (base.homogeneous) {
    family.map = [apply = base.apply](std::size_t, const PNormVector& u) { return apply(u); };
  } else {
    family.map = [apply = base.apply, ratio](std::size_t n, const PNormVector& u) {
      const double scale = std::ldexp(1.0, static_cast<int>(std::min<std::size_t>(n, 4096)));
      require(std::isfinite(scale) && n < 1000,
              "scaled_family: 2^n overflows at n = " + std::to_string(n) + " for a non-homogeneous base map");
      const PNormVector image = apply(u.scaled(scale));
      return image.scaled(std::exp2(-ratio * static_cast<double>(n)));
    };
  }
  return family;
}

std::vector<ThetaEntry> theta(const ReductionFamily& family, const std::vector<PNormVector>& x) {
  std::vector<PNormVector> images;
  images.reserve(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) images.push_back(family.map(n, x[n]));
  std::vector<ThetaEntry> entries;
  for (std::size_t n = 0; n < images.size(); ++n) {
    const PNormVector& img = images[n];
    const std::size_t block = img.block();
    for (std::size_t m = 0; m * block < img.size(); ++m) {
      ThetaEntry e;
      e.index = cantor_pair(n, m);
      e.n = n;
      e.m = m;
      e.values.assign(img.coords().begin() + static_cast<std::ptrdiff_t>(m * block),
                      img.coords().begin() + static_cast<std::ptrdiff_t>((m + 1) * block));
      entries.push_back(std::move(e));
    }
  }
  std::sort(entries.begin(), entries.end(), [](const ThetaEntry& a, const ThetaEntry& b) { return a.index < b.index; });
  return entries;
}

ThetaSums theta_partial_sums(const std::vector<ThetaEntry>& tx, const std::vector<ThetaEntry>& ty, double q,
                             std::size_t horizon) {
  require(tx.size() == ty.size(), "theta_partial_sums: sequences have different shapes");
  std::vector<double> flat;
  // Per block: the concatenated difference T_n x(n) - T_n y(n) and its block size.
  std::vector<std::vector<double>> blocks;
  std::vector<std::size_t> block_size;
  for (std::size_t i = 0; i < tx.size(); ++i) {
    require(tx[i].index == ty[i].index && tx[i].values.size() == ty[i].values.size(),
            "theta_partial_sums: sequences have different shapes");
    if (tx[i].n >= horizon) continue;
    double sq = 0.0;
    for (std::size_t k = 0; k < tx[i].values.size(); ++k) {
      const double diff = tx[i].values[k] - ty[i].values[k];
      sq += diff * diff;
    }
    flat.push_back(std::pow(std::sqrt(sq), q));
    if (blocks.size() <= tx[i].n) {
      blocks.resize(tx[i].n + 1);
      block_size.resize(tx[i].n + 1, 1);
    }
    auto& diff = blocks[tx[i].n];
    const std::size_t width = tx[i].values.size();
    block_size[tx[i].n] = width;
    if (diff.size() < (tx[i].m + 1) * width) diff.resize((tx[i].m + 1) * width);
    for (std::size_t k = 0; k < width; ++k) diff[tx[i].m * width + k] = tx[i].values[k] - ty[i].values[k];
  }
  ThetaSums sums;
  sums.flat = pairwise_sum(flat);
  std::vector<double> block_totals;
  block_totals.reserve(blocks.size());
  for (std::size_t n = 0; n < blocks.size(); ++n)
    block_totals.push_back(blocks[n].empty() ? 0.0 : std::pow(p_norm(blocks[n], q, block_size[n]), q));
  sums.blockwise = pairwise_sum(block_totals);
  return sums;
}

std::vector<double> ep_partial_sums(std::span<const double> d, double p) {
  require(!d.empty(), "ep_partial_sums: horizon must be >= 1");
  require(p == 0.0 || (p >= 1.0 && std::isfinite(p)), "ep_partial_sums: p must be 0 or >= 1");
  std::vector<double> trace(d.size());
  if (p == 0.0) {
    double tail = 0.0;
    for (std::size_t i = d.size(); i-- > 0;) {
      tail = std::max(tail, d[i]);
      trace[i] = tail;
    }
    return trace;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    sum += std::pow(d[i], p);
    trace[i] = sum;
  }
  return trace;
}

std::vector<double> ep_partial_sums(const SequencePair& pair, double p) {
  const std::vector<double> d = pair.distances();
  return ep_partial_sums(d, p);
}

std::vector<double> planted_distances(const std::string& spec, std::size_t horizon) {
  const auto colon = spec.find(':');
  require(colon != std::string::npos, "planting spec '" + spec + "': expected geometric:<ratio> or power:<exponent>");
  const std::string kind = spec.substr(0, colon);
  const double value = parse_number(spec.substr(colon + 1), spec);
  std::vector<double> d(horizon);
  if (kind == "geometric") {
    require(value > 0.0, "planting spec '" + spec + "': ratio must be positive");
    for (std::size_t n = 0; n < horizon; ++n) d[n] = std::pow(value, static_cast<double>(n));
  } else if (kind == "power") {
    require(value > 0.0, "planting spec '" + spec + "': exponent must be positive");
    for (std::size_t n = 0; n < horizon; ++n) d[n] = std::pow(static_cast<double>(n + 1), -value);
  } else {
    throw ValidationError("planting spec '" + spec + "': unknown generator '" + kind + "'");
  }
  return d;
}

SequencePair plant_pair(std::span<const double> d, std::uint64_t seed) {
  const CounterRng rng(seed, 11);
  std::vector<PNormVector> x, y;
  x.reserve(d.size());
  y.reserve(d.size());
  for (std::size_t n = 0; n < d.size(); ++n) {
    const double base = 2.0 * rng.uniform(2 * n) - 1.0;
    const double sign = rng.uniform(2 * n + 1) < 0.5 ? -1.0 : 1.0;
    x.emplace_back(std::vector<double>{base}, 2.0);
    y.emplace_back(std::vector<double>{base + sign * d[n]}, 2.0);
  }
  return SequencePair(std::move(x), std::move(y));
}

namespace {

CauchyDiagnostic cauchy(const std::function<double(std::size_t)>& term, double exponent, std::size_t horizon) {
  CauchyDiagnostic diag;
  diag.horizon = horizon;
  const std::size_t decade = horizon / 10;
  double sum = 0.0;
  double at_decade = 0.0;
  for (std::size_t n = 0; n < horizon; ++n) {
    sum += std::pow(term(n), exponent);
    if (n + 1 == decade) at_decade = sum;
  }
  diag.sum = sum;
  diag.last_decade_relative_change = sum > 0.0 ? (sum - at_decade) / sum : 0.0;
  diag.numerically_cauchy = diag.last_decade_relative_change < 1e-6;
  return diag;
}

}  // namespace

ReductionReport verify_reduction_conditions(const ReductionFamily& family, const IndexedSamples& samples,
                                            std::size_t cauchy_horizon) {
  require(cauchy_horizon >= 10, "verify_reduction_conditions: Cauchy horizon must be >= 10");
  ReductionReport report;
  report.eps_sum = cauchy(family.eps, family.p, cauchy_horizon);
  report.delta_sum = cauchy(family.delta, family.q, cauchy_horizon);
  const double ratio = family.p / family.q;
  for (std::size_t n = 0; n < samples.size(); ++n) {
    const double eps = family.eps(n);
    for (std::size_t k = 0; k < samples[n].size(); ++k) {
      const auto& [u, v] = samples[n][k];
      const double d = p_distance(u, v);
      const double image = p_distance(family.map(n, u), family.map(n, v));
      ReductionViolation w;
      w.n = n;
      w.pair = k;
      w.source_distance = d;
      w.image_distance = image;
      bool ok = true;
      if (d < eps) {
        w.regime = Regime::small;
        w.upper = family.delta(n);
        ok = image < w.upper * (1.0 + kRelativeSlack);
        ++report.small_count;
      } else if (d > family.C) {
        w.regime = Regime::large;
        w.lower = family.D;
        w.upper = kInfinity;
        ok = image > w.lower * (1.0 - kRelativeSlack);
        ++report.large_count;
      } else {
        w.regime = Regime::middle;
        w.lower = std::pow(d, ratio) / family.A;
        w.upper = family.A * std::pow(d, ratio);
        ok = image >= w.lower * (1.0 - kRelativeSlack) && image <= w.upper * (1.0 + kRelativeSlack);
        ++report.middle_count;
      }
      ++report.pairs_checked;
      if (!ok) report.violations.push_back(w);
    }
  }
  return report;
}

IndexedSamples sample_regime_pairs(const ReductionFamily& family, std::size_t indices, std::size_t per_index,
                                   std::uint64_t seed) {
  const CounterRng rng(seed, 13);
  IndexedSamples samples(indices);
  std::uint64_t draw = 0;
  for (std::size_t n = 0; n < indices; ++n) {
    require(family.eps(n) > 0.0, "sample_regime_pairs: eps_n underflows at n = " + std::to_string(n));
    const double lo = std::log(family.eps(n) / 8.0);
    const double hi = std::log(family.C * 8.0);
    for (std::size_t k = 0; k < per_index; ++k) {
      const double u = 2.0 * rng.uniform(draw++) - 1.0;
      const double d = std::exp(lo + (hi - lo) * rng.uniform(draw++));
      const double sign = rng.uniform(draw++) < 0.5 ? -1.0 : 1.0;
      samples[n].emplace_back(PNormVector({u}, 2.0), PNormVector({u + sign * d}, 2.0));
    }
  }
  return samples;
}

std::vector<StepFunction> theta_window(std::span<const double> samples, double step) {
  require(step > 0.0 && step <= 1.0, "theta_window: grid step must lie in (0, 1]");
  const double inverse = 1.0 / step;
  const auto per_unit = static_cast<std::size_t>(std::llround(inverse));
  require(per_unit >= 1 && std::abs(inverse - static_cast<double>(per_unit)) <= 1e-9 * inverse,
          "theta_window: misaligned grid (1/step must be an integer)");
  require(samples.size() >= per_unit + 1 && (samples.size() - 1) % per_unit == 0,
          "theta_window: misaligned grid (sample count must be N/step + 1 for an integer N >= 1)");
  const std::size_t windows = (samples.size() - 1) / per_unit;
  std::vector<StepFunction> out;
  out.reserve(windows);
  for (std::size_t n = 0; n < windows; ++n) {
    const auto first = samples.begin() + static_cast<std::ptrdiff_t>(n * per_unit);
    out.emplace_back(std::vector<double>(first, first + static_cast<std::ptrdiff_t>(per_unit + 1)));
  }
  return out;
}

}  // namespace snowflake
