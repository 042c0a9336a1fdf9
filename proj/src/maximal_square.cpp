#include "dyadic/maximal_square.hpp"

#include <cmath>
#include <stdexcept>

#include "dyadic/haar.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dyadic {

namespace {

GridFunction abs_values(const GridFunction& f) {
  GridFunction a = f;
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::fabs(a[i]);
  return a;
}

// Number of joint scale tuples = prod (depth_t + 1).
std::size_t scale_tuple_count(const GridSpec& spec) {
  std::size_t n = 1;
  for (int t = 0; t < spec.param_count(); ++t) n *= static_cast<std::size_t>(spec.depth(t)) + 1;
  return n;
}

DyadicRectangle ancestor_rect(const GridSpec& spec, const std::array<int, 3>& coords,
                              const std::array<int, 3>& scales) {
  std::array<DyadicInterval, 3> iv{};
  for (int t = 0; t < spec.param_count(); ++t) {
    const int k = scales[static_cast<std::size_t>(t)];
    iv[static_cast<std::size_t>(t)] = {t, k, coords[static_cast<std::size_t>(t)] >> (spec.depth(t) - k)};
  }
  return DyadicRectangle(std::span<const DyadicInterval>(iv.data(), static_cast<std::size_t>(spec.param_count())));
}

}  // namespace

GridFunction maximal(const GridFunction& f, MaximalMode mode) {
  const GridSpec& spec = f.spec();
  if (mode != MaximalMode::Full) {
    const int axis = mode == MaximalMode::Axis0 ? 0 : (mode == MaximalMode::Axis1 ? 1 : 2);
    if (axis >= spec.param_count()) throw std::invalid_argument("maximal: axis mode exceeds grid");
    GridFunction out(spec, 0.0);
    const std::size_t n = static_cast<std::size_t>(spec.axis_cells(axis));
    const std::size_t step = spec.stride(axis);
    const std::size_t lines = spec.total_cells() / n;
    const int depth = spec.depth(axis);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t li = 0; li < static_cast<std::ptrdiff_t>(lines); ++li) {
      const std::size_t outer = static_cast<std::size_t>(li) / step;
      const std::size_t inner = static_cast<std::size_t>(li) % step;
      const std::size_t base = outer * (n * step) + inner;
      std::vector<double> prefix(n + 1, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        prefix[i + 1] = prefix[i] + std::fabs(f[base + i * step]);
      for (std::size_t i = 0; i < n; ++i) {
        double best = 0.0;
        for (int k = 0; k <= depth; ++k) {
          const std::size_t len = n >> k;
          const std::size_t a = (i / len) * len;
          best = std::max(best, (prefix[a + len] - prefix[a]) / static_cast<double>(len));
        }
        out[base + i * step] = best;
      }
    }
    return out;
  }

  const CellSums sums(abs_values(f));
  GridFunction out(spec, 0.0);
  const std::size_t total = spec.total_cells();
  const int m = spec.param_count();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t idx = 0; idx < static_cast<std::ptrdiff_t>(total); ++idx) {
    const auto coords = spec.cell_coords(static_cast<std::size_t>(idx));
    // the singleton-cell rectangle contributes |f| exactly
    double best = std::fabs(f[static_cast<std::size_t>(idx)]);
    std::array<int, 3> scales{0, 0, 0};
    const std::size_t tuples = scale_tuple_count(spec);
    for (std::size_t n = 0; n < tuples; ++n) {
      best = std::max(best, sums.average(ancestor_rect(spec, coords, scales)));
      for (int t = m - 1; t >= 0; --t) {
        auto& k = scales[static_cast<std::size_t>(t)];
        if (++k <= spec.depth(t)) break;
        k = 0;
      }
    }
    out[static_cast<std::size_t>(idx)] = best;
  }
  return out;
}

GridFunction weighted_maximal(const GridFunction& f, const Weight& w) {
  const GridSpec& spec = f.spec();
  if (spec != w.spec()) throw std::invalid_argument("weighted_maximal: grid mismatch");
  GridFunction fw = abs_values(f);
  for (std::size_t i = 0; i < fw.size(); ++i) fw[i] *= w[i];
  const CellSums fws(fw);
  GridFunction out(spec, 0.0);
  const std::size_t total = spec.total_cells();
  const int m = spec.param_count();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t idx = 0; idx < static_cast<std::ptrdiff_t>(total); ++idx) {
    const auto coords = spec.cell_coords(static_cast<std::size_t>(idx));
    double best = std::fabs(f[static_cast<std::size_t>(idx)]);
    std::array<int, 3> scales{0, 0, 0};
    const std::size_t tuples = scale_tuple_count(spec);
    for (std::size_t n = 0; n < tuples; ++n) {
      const auto rect = ancestor_rect(spec, coords, scales);
      best = std::max(best, fws.integral(rect) / w.on(rect));
      for (int t = m - 1; t >= 0; --t) {
        auto& k = scales[static_cast<std::size_t>(t)];
        if (++k <= spec.depth(t)) break;
        k = 0;
      }
    }
    out[static_cast<std::size_t>(idx)] = best;
  }
  return out;
}

namespace {

// Index helpers over a masked split of the axes: `combo` enumerates the masked
// axes' wavelet indices, `slice` the unmasked axes' cells.
struct MaskSplit {
  const GridSpec& spec;
  unsigned mask;
  std::vector<int> in_axes, out_axes;

  MaskSplit(const GridSpec& s, unsigned m) : spec(s), mask(m) {
    for (int t = 0; t < s.param_count(); ++t)
      ((m >> t) & 1u ? in_axes : out_axes).push_back(t);
  }
};

}  // namespace

GridFunction square_function(const GridFunction& f, SquareMode mode) {
  const GridSpec& spec = f.spec();
  const int m = spec.param_count();
  if (mode.axes_mask == 0 || mode.axes_mask >= (1u << m))
    throw std::invalid_argument("square_function: mode incompatible with grid");
  const MaskSplit split(spec, mode.axes_mask);

  std::vector<double> data(f.values().begin(), f.values().end());
  for (int t : split.in_axes) haar_sweep_axis(spec, data, t, true);

  if (mode.inner_maximal) {
    if (split.out_axes.empty())
      throw std::invalid_argument("square_function: inner maximal needs a complementary axis");
    std::vector<int> out_depths;
    for (int t : split.out_axes) out_depths.push_back(spec.depth(t));
    GridSpec sub(out_depths);
    // replace each masked-cancellative slice by its maximal over the complement
    const std::size_t total = spec.total_cells();
    std::vector<std::size_t> slice_cells;
    for (std::size_t idx = 0; idx < total; ++idx) {
      const auto c = spec.cell_coords(idx);
      bool canc = true, at_origin = true;
      for (int t : split.in_axes)
        if (c[static_cast<std::size_t>(t)] == 0) canc = false;
      for (int t : split.out_axes)
        if (c[static_cast<std::size_t>(t)] != 0) at_origin = false;
      if (!canc || !at_origin) continue;
      // gather the complement slice starting at this combo
      GridFunction slice(sub, 0.0);
      for (std::size_t s = 0; s < sub.total_cells(); ++s) {
        auto sc = sub.cell_coords(s);
        auto full = c;
        for (std::size_t r = 0; r < split.out_axes.size(); ++r)
          full[static_cast<std::size_t>(split.out_axes[r])] = sc[r];
        slice[s] = data[spec.cell_index(full)];
      }
      GridFunction mslice = maximal(slice, MaximalMode::Full);
      for (std::size_t s = 0; s < sub.total_cells(); ++s) {
        auto sc = sub.cell_coords(s);
        auto full = c;
        for (std::size_t r = 0; r < split.out_axes.size(); ++r)
          full[static_cast<std::size_t>(split.out_axes[r])] = sc[r];
        data[spec.cell_index(full)] = mslice[s];
      }
    }
  }

  GridFunction out(spec, 0.0);
  const std::size_t total = spec.total_cells();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t idx = 0; idx < static_cast<std::ptrdiff_t>(total); ++idx) {
    const auto coords = spec.cell_coords(static_cast<std::size_t>(idx));
    // sum over the scale tuples of the masked axes
    std::size_t tuples = 1;
    for (int t : split.in_axes) tuples *= static_cast<std::size_t>(spec.depth(t));
    double acc = 0.0;
    std::vector<int> ks(split.in_axes.size(), 0);
    for (std::size_t n = 0; n < tuples; ++n) {
      auto widx = coords;
      double inv_measure = 1.0;
      for (std::size_t r = 0; r < split.in_axes.size(); ++r) {
        const int t = split.in_axes[r];
        const int k = ks[r];
        const int pos = coords[static_cast<std::size_t>(t)] >> (spec.depth(t) - k);
        widx[static_cast<std::size_t>(t)] = (1 << k) + pos;
        inv_measure *= static_cast<double>(1 << k);
      }
      const double c = data[spec.cell_index(widx)];
      acc += c * c * inv_measure;
      for (int r = static_cast<int>(split.in_axes.size()) - 1; r >= 0; --r) {
        if (++ks[static_cast<std::size_t>(r)] < spec.depth(split.in_axes[static_cast<std::size_t>(r)])) break;
        ks[static_cast<std::size_t>(r)] = 0;
      }
    }
    out[static_cast<std::size_t>(idx)] = std::sqrt(acc);
  }
  return out;
}

double lp_norm(const GridFunction& f, const NormParams& params) {
  const double p = params.p;
  if (std::isinf(p)) return f.max_abs();
  if (!(p > 0.0)) throw std::invalid_argument("lp_norm: p must be positive");
  if (params.weight != nullptr && params.weight->spec() != f.spec())
    throw std::invalid_argument("lp_norm: weight grid mismatch");
  const double vol = f.spec().cell_volume();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double a = std::fabs(f[i]);
    double ap;
    if (p == 1.0)
      ap = a;
    else if (p == 2.0)
      ap = a * a;
    else if (p == 4.0)
      ap = (a * a) * (a * a);
    else
      ap = std::pow(a, p);
    s += ap * (params.weight ? (*params.weight)[i] : 1.0);
  }
  return std::pow(s * vol, 1.0 / p);
}

double fs_vector_maximal(std::span<const GridFunction> fs, double s, double p, const Weight* w,
                         MaximalMode mode) {
  if (fs.empty()) throw std::invalid_argument("fs_vector_maximal: empty function list");
  if (!(s > 0.0) || !(p > 0.0)) throw std::invalid_argument("fs_vector_maximal: bad exponents");
  GridFunction acc(fs[0].spec(), 0.0);
  for (const GridFunction& f : fs) {
    GridFunction mf = maximal(f, mode);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += std::pow(mf[i], s);
  }
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = std::pow(acc[i], 1.0 / s);
  return lp_norm(acc, NormParams{p, w});
}

}  // namespace dyadic
