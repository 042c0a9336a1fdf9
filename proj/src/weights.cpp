#include "dyadic/weights.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dyadic/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dyadic {

namespace {
constexpr double kMaxValueRatio = 1e4;  // recipes keep max/min <= this

void clamp_ratio(std::vector<double>& v) {
  double hi = 0.0;
  for (double x : v) hi = std::max(hi, x);
  const double lo = hi / kMaxValueRatio;
  for (double& x : v) x = std::max(x, lo);
}
}  // namespace

Weight::Weight(GridFunction values) : values_(std::move(values)), sums_(values_) {
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (!(values_[i] > 0.0)) throw std::invalid_argument("Weight: values must be strictly positive");
}

// the mutex guards only the memo table, so copies start with a fresh one
Weight::Weight(const Weight& o) : values_(o.values_), sums_(o.sums_), label_(o.label_) {
  std::lock_guard<std::mutex> lock(o.cache_mutex_);
  ap_cache_ = o.ap_cache_;
}

Weight& Weight::operator=(const Weight& o) {
  if (this == &o) return *this;
  std::map<double, double> cache;
  {
    std::lock_guard<std::mutex> lock(o.cache_mutex_);
    cache = o.ap_cache_;
  }
  values_ = o.values_;
  sums_ = o.sums_;
  label_ = o.label_;
  std::lock_guard<std::mutex> lock(cache_mutex_);
  ap_cache_ = std::move(cache);
  return *this;
}

Weight::Weight(Weight&& o) noexcept
    : values_(std::move(o.values_)), sums_(std::move(o.sums_)), label_(std::move(o.label_)) {
  ap_cache_ = std::move(o.ap_cache_);
}

Weight& Weight::operator=(Weight&& o) noexcept {
  if (this == &o) return *this;
  values_ = std::move(o.values_);
  sums_ = std::move(o.sums_);
  label_ = std::move(o.label_);
  ap_cache_ = std::move(o.ap_cache_);
  return *this;
}

DyadicRectangle Weight::full_rect() const {
  std::array<DyadicInterval, 3> iv{};
  for (int t = 0; t < spec().param_count(); ++t) iv[static_cast<std::size_t>(t)] = {t, 0, 0};
  return DyadicRectangle(std::span<const DyadicInterval>(iv.data(), static_cast<std::size_t>(spec().param_count())));
}

double Weight::ap_constant(double p) const {
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = ap_cache_.find(p);
    if (it != ap_cache_.end()) return it->second;
  }
  const double value = dyadic::ap_constant(values_, p);
  std::lock_guard<std::mutex> lock(cache_mutex_);
  ap_cache_.emplace(p, value);
  return value;
}

double ap_constant(const GridFunction& w, double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("ap_constant: p must be in (1, inf)");
  const GridSpec& spec = w.spec();
  const double dual_exp = p / (p - 1.0);
  GridFunction sigma(spec, 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) sigma[i] = std::pow(w[i], 1.0 - dual_exp);
  const CellSums ws(w);
  const CellSums ss(sigma);
  const auto rects = enumerate_rectangles(spec);
  double best = 0.0;
#pragma omp parallel for reduction(max : best) schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(rects.size()); ++i) {
    const auto& rect = rects[static_cast<std::size_t>(i)];
    const double v = ws.average(rect) * std::pow(ss.average(rect), p - 1.0);
    best = std::max(best, v);
  }
  return best;
}

double ainf_constant(const Weight& w) {
  const GridSpec& spec = w.spec();
  GridFunction logw(spec, 0.0);
  for (std::size_t i = 0; i < spec.total_cells(); ++i) logw[i] = std::log(w[i]);
  const CellSums ls(logw);
  const auto rects = enumerate_rectangles(spec);
  double best = 0.0;
#pragma omp parallel for reduction(max : best) schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(rects.size()); ++i) {
    const auto& rect = rects[static_cast<std::size_t>(i)];
    const double v = w.sums().average(rect) * std::exp(-ls.average(rect));
    best = std::max(best, v);
  }
  return best;
}

namespace {
double ap_1d(std::span<const double> values, double p) {
  const int n = static_cast<int>(values.size());
  int depth = 0;
  while ((1 << depth) < n) ++depth;
  const double dual_exp = p / (p - 1.0);
  // prefix sums of w and w^{1-p'}
  std::vector<double> pw(static_cast<std::size_t>(n) + 1, 0.0), ps(static_cast<std::size_t>(n) + 1, 0.0);
  for (int i = 0; i < n; ++i) {
    pw[static_cast<std::size_t>(i) + 1] = pw[static_cast<std::size_t>(i)] + values[static_cast<std::size_t>(i)];
    ps[static_cast<std::size_t>(i) + 1] = ps[static_cast<std::size_t>(i)] + std::pow(values[static_cast<std::size_t>(i)], 1.0 - dual_exp);
  }
  double best = 0.0;
  for (int k = 0; k <= depth; ++k) {
    const int len = n >> k;
    for (int j = 0; j < (1 << k); ++j) {
      const int a = j * len, b = a + len;
      const double aw = (pw[static_cast<std::size_t>(b)] - pw[static_cast<std::size_t>(a)]) / len;
      const double as = (ps[static_cast<std::size_t>(b)] - ps[static_cast<std::size_t>(a)]) / len;
      best = std::max(best, aw * std::pow(as, p - 1.0));
    }
  }
  return best;
}
}  // namespace

double iterated_ap_axis(const Weight& w, double p, int axis) {
  if (!(p > 1.0)) throw std::invalid_argument("iterated_ap_axis: p must be in (1, inf)");
  const GridSpec& spec = w.spec();
  if (axis < 0 || axis >= spec.param_count()) throw std::invalid_argument("iterated_ap_axis: bad axis");
  const std::size_t n = static_cast<std::size_t>(spec.axis_cells(axis));
  const std::size_t step = spec.stride(axis);
  const std::size_t lines = spec.total_cells() / n;
  double best = 0.0;
  std::vector<double> slice(n);
  for (std::size_t li = 0; li < lines; ++li) {
    const std::size_t outer = li / step;
    const std::size_t inner = li % step;
    const std::size_t base = outer * (n * step) + inner;
    for (std::size_t i = 0; i < n; ++i) slice[i] = w[base + i * step];
    best = std::max(best, ap_1d(slice, p));
  }
  return best;
}

std::pair<double, double> iterated_ap(const Weight& w, double p) {
  if (w.spec().param_count() != 2)
    throw std::invalid_argument("iterated_ap: bi-parameter grids only; use iterated_ap_axis");
  return {iterated_ap_axis(w, p, 0), iterated_ap_axis(w, p, 1)};
}

WeightRecipe WeightRecipe::make_constant(double c) {
  WeightRecipe r;
  r.kind = Kind::Constant;
  r.constant = c;
  return r;
}
WeightRecipe WeightRecipe::make_random_bounded_ratio(double rho) {
  WeightRecipe r;
  r.kind = Kind::RandomBoundedRatio;
  r.ratio = rho;
  return r;
}
WeightRecipe WeightRecipe::make_power_like(std::vector<double> exps) {
  WeightRecipe r;
  r.kind = Kind::PowerLike;
  r.exponents = std::move(exps);
  return r;
}
WeightRecipe WeightRecipe::make_tensor(std::vector<WeightRecipe> one_d) {
  WeightRecipe r;
  r.kind = Kind::Tensor;
  r.factors = std::move(one_d);
  return r;
}
WeightRecipe WeightRecipe::make_non_tensor_mix(WeightRecipe a, WeightRecipe b, double mixing) {
  WeightRecipe r;
  r.kind = Kind::NonTensorMix;
  r.factors.push_back(std::move(a));
  r.factors.push_back(std::move(b));
  r.mixing = mixing;
  return r;
}

std::string WeightRecipe::describe() const {
  switch (kind) {
    case Kind::Constant:
      return "const(" + std::to_string(constant) + ")";
    case Kind::RandomBoundedRatio:
      return "rbr(" + std::to_string(ratio) + ")";
    case Kind::PowerLike: {
      std::string s = "power(";
      for (std::size_t i = 0; i < exponents.size(); ++i)
        s += (i ? "," : "") + std::to_string(exponents[i]);
      return s + ")";
    }
    case Kind::Tensor: {
      std::string s = "tensor(";
      for (std::size_t i = 0; i < factors.size(); ++i) s += (i ? "," : "") + factors[i].describe();
      return s + ")";
    }
    case Kind::NonTensorMix:
      return "mix(" + factors[0].describe() + ";" + factors[1].describe() + ";" +
             std::to_string(mixing) + ")";
  }
  return "?";
}

namespace {
std::vector<double> generate_values(const GridSpec& spec, const WeightRecipe& recipe,
                                    std::uint64_t seed) {
  const std::size_t total = spec.total_cells();
  std::vector<double> v(total, 1.0);
  switch (recipe.kind) {
    case WeightRecipe::Kind::Constant: {
      if (!(recipe.constant > 0.0)) throw std::invalid_argument("weight recipe: constant must be > 0");
      std::fill(v.begin(), v.end(), recipe.constant);
      break;
    }
    case WeightRecipe::Kind::RandomBoundedRatio: {
      if (recipe.ratio < 1.0) throw std::invalid_argument("weight recipe: ratio must be >= 1");
      Rng rng(seed);
      for (double& x : v) x = rng.uniform(1.0 / recipe.ratio, recipe.ratio);
      break;
    }
    case WeightRecipe::Kind::PowerLike: {
      if (recipe.exponents.size() != static_cast<std::size_t>(spec.param_count()))
        throw std::invalid_argument("weight recipe: one exponent per axis");
      for (std::size_t i = 0; i < total; ++i) {
        const auto c = spec.cell_coords(i);
        double x = 1.0;
        for (int t = 0; t < spec.param_count(); ++t) {
          const double center = (c[static_cast<std::size_t>(t)] + 0.5) / spec.axis_cells(t);
          x *= std::pow(center, recipe.exponents[static_cast<std::size_t>(t)]);
        }
        v[i] = x;
      }
      break;
    }
    case WeightRecipe::Kind::Tensor: {
      if (recipe.factors.size() != static_cast<std::size_t>(spec.param_count()))
        throw std::invalid_argument("weight recipe: one tensor factor per axis");
      std::fill(v.begin(), v.end(), 1.0);
      for (int t = 0; t < spec.param_count(); ++t) {
        GridSpec line({spec.depth(t)});
        const auto fv = generate_values(line, recipe.factors[static_cast<std::size_t>(t)],
                                        split_seed(seed, static_cast<std::uint64_t>(t)));
        for (std::size_t i = 0; i < total; ++i) {
          const auto c = spec.cell_coords(i);
          v[i] *= fv[static_cast<std::size_t>(c[static_cast<std::size_t>(t)])];
        }
      }
      break;
    }
    case WeightRecipe::Kind::NonTensorMix: {
      if (recipe.factors.size() != 2)
        throw std::invalid_argument("weight recipe: mix needs two components");
      if (!(recipe.mixing > 0.0) || !(recipe.mixing < 1.0))
        throw std::invalid_argument("weight recipe: mixing must be in (0,1)");
      if (spec.param_count() < 2)
        throw std::invalid_argument("weight recipe: mix needs at least two axes");
      const auto a = generate_values(spec, recipe.factors[0], split_seed(seed, 11));
      const auto b = generate_values(spec, recipe.factors[1], split_seed(seed, 23));
      for (std::size_t i = 0; i < total; ++i)
        v[i] = recipe.mixing * a[i] + (1.0 - recipe.mixing) * b[i];
      break;
    }
  }
  clamp_ratio(v);
  return v;
}

bool is_tensor_factorable(const GridSpec& spec, const std::vector<double>& v) {
  // cross-ratio test on axis-0 x axis-1 pairs, remaining coords at 0
  const std::size_t s0 = spec.stride(0), s1 = spec.stride(1);
  const int n0 = spec.axis_cells(0), n1 = spec.axis_cells(1);
  for (int a = 0; a < n0; ++a)
    for (int a2 = a + 1; a2 < n0; ++a2)
      for (int b = 0; b < n1; ++b)
        for (int b2 = b + 1; b2 < n1; ++b2) {
          const double lhs = v[static_cast<std::size_t>(a) * s0 + static_cast<std::size_t>(b) * s1] *
                             v[static_cast<std::size_t>(a2) * s0 + static_cast<std::size_t>(b2) * s1];
          const double rhs = v[static_cast<std::size_t>(a) * s0 + static_cast<std::size_t>(b2) * s1] *
                             v[static_cast<std::size_t>(a2) * s0 + static_cast<std::size_t>(b) * s1];
          if (std::fabs(lhs - rhs) > 1e-9 * (std::fabs(lhs) + std::fabs(rhs))) return false;
        }
  return true;
}
}  // namespace

Weight generate_weight(const GridSpec& spec, const WeightRecipe& recipe, std::uint64_t seed) {
  auto v = generate_values(spec, recipe, seed);
  if (recipe.kind == WeightRecipe::Kind::NonTensorMix && is_tensor_factorable(spec, v))
    throw std::invalid_argument("weight recipe: mix components degenerate to a tensor weight");
  Weight w{GridFunction(spec, std::move(v))};
  w.set_label(recipe.describe());
  return w;
}

BloomWeight bloom_nu(const Weight& mu, const Weight& lambda, double p) {
  if (mu.spec() != lambda.spec()) throw std::invalid_argument("bloom_nu: grid mismatch");
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("bloom_nu: p must be in (1, inf)");
  GridFunction nu(mu.spec(), 0.0);
  for (std::size_t i = 0; i < nu.size(); ++i)
    nu[i] = std::pow(mu[i], 1.0 / p) * std::pow(lambda[i], -1.0 / p);
  Weight nw{std::move(nu)};
  nw.set_label("bloom(" + mu.describe() + "," + lambda.describe() + ")");
  return BloomWeight{mu, lambda, p, std::move(nw)};
}

}  // namespace dyadic
