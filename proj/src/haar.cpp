#include "dyadic/haar.hpp"

#include <cmath>
#include <stdexcept>

namespace dyadic {

namespace {

// Iterates the flat array as lines along `axis`: line element i sits at
// base + i*step, i in [0, n).
struct AxisLines {
  std::size_t count;  // number of lines
  std::size_t n;      // elements per line
  std::size_t step;   // stride between consecutive elements
  std::size_t block;  // n * step

  AxisLines(const GridSpec& spec, int axis)
      : count(spec.total_cells() / (static_cast<std::size_t>(spec.axis_cells(axis)) * spec.stride(axis))),
        n(static_cast<std::size_t>(spec.axis_cells(axis))),
        step(spec.stride(axis)),
        block(n * step) {}

  std::size_t base(std::size_t line) const {
    const std::size_t outer = line / step;
    const std::size_t inner = line % step;
    return outer * block + inner;
  }
  std::size_t total_lines() const { return count * step; }
};

double sqrt_pow2(int k) {  // 2^{k/2}
  double v = std::ldexp(1.0, k / 2);
  if (k & 1) v *= 1.4142135623730950488;
  return v;
}

void require_axis(const GridSpec& spec, int axis) {
  if (axis < 0 || axis >= spec.param_count())
    throw std::invalid_argument("axis out of range for grid");
}

void require_interval(const GridSpec& spec, const DyadicInterval& iv) {
  require_axis(spec, iv.axis);
  if (iv.scale < 0 || iv.scale > spec.depth(iv.axis) || iv.pos < 0 || iv.pos >= (1 << iv.scale))
    throw std::invalid_argument("interval outside grid");
}

}  // namespace

GridFunction haar_function(const GridSpec& spec, const DyadicInterval& interval,
                           bool cancellative) {
  require_interval(spec, interval);
  const int depth = spec.depth(interval.axis);
  if (cancellative && interval.scale >= depth)
    throw std::domain_error("haar_function: cancellative profile needs children");
  GridSpec line({depth});
  GridFunction out(line, 0.0);
  const double amp = sqrt_pow2(interval.scale);  // |I|^{-1/2}
  const int first = interval.first_cell(depth);
  const int count = interval.cell_count(depth);
  for (int i = 0; i < count; ++i) {
    const bool left = i < count / 2;
    out[static_cast<std::size_t>(first + i)] = cancellative ? (left ? amp : -amp) : amp;
  }
  return out;
}

double haar_coefficient(const GridFunction& f, const DyadicRectangle& rect, HaarIndex eta) {
  const GridSpec& spec = f.spec();
  if (rect.param_count() != spec.param_count())
    throw std::invalid_argument("haar_coefficient: rectangle/grid mismatch");
  const int m = spec.param_count();
  std::array<std::vector<double>, 3> profiles;
  for (int t = 0; t < m; ++t) {
    const DyadicInterval& iv = rect.interval(t);
    require_interval(spec, {t, iv.scale, iv.pos});
    const bool canc = eta.cancellative(t);
    if (canc && iv.scale >= spec.depth(t))
      throw std::domain_error("haar_coefficient: cancellative axis at finest scale");
    std::vector<double> prof(static_cast<std::size_t>(spec.axis_cells(t)), 0.0);
    const double amp = sqrt_pow2(iv.scale);
    const int first = iv.first_cell(spec.depth(t));
    const int count = iv.cell_count(spec.depth(t));
    for (int i = 0; i < count; ++i)
      prof[static_cast<std::size_t>(first + i)] = canc ? (i < count / 2 ? amp : -amp) : amp;
    profiles[static_cast<std::size_t>(t)] = std::move(prof);
  }
  double sum = 0.0;
  const std::size_t total = spec.total_cells();
  for (std::size_t idx = 0; idx < total; ++idx) {
    const auto c = spec.cell_coords(idx);
    double w = f[idx];
    for (int t = 0; t < m; ++t) w *= profiles[static_cast<std::size_t>(t)][static_cast<std::size_t>(c[static_cast<std::size_t>(t)])];
    sum += w;
  }
  return sum * spec.cell_volume();
}

GridFunction partial_coefficient(const GridFunction& f, std::span<const AxisHaar> factors) {
  const GridSpec& spec = f.spec();
  const int m = spec.param_count();
  if (factors.empty() || static_cast<int>(factors.size()) >= m)
    throw std::invalid_argument("partial_coefficient: need a proper nonempty axis subset");
  std::array<bool, 3> used{false, false, false};
  std::array<std::vector<double>, 3> profiles;
  double axis_widths = 1.0;
  for (const AxisHaar& fac : factors) {
    require_interval(spec, fac.interval);
    const int t = fac.interval.axis;
    if (used[static_cast<std::size_t>(t)]) throw std::invalid_argument("partial_coefficient: duplicate axis");
    used[static_cast<std::size_t>(t)] = true;
    if (fac.cancellative && fac.interval.scale >= spec.depth(t))
      throw std::domain_error("partial_coefficient: cancellative axis at finest scale");
    std::vector<double> prof(static_cast<std::size_t>(spec.axis_cells(t)), 0.0);
    const double amp = sqrt_pow2(fac.interval.scale);
    const int first = fac.interval.first_cell(spec.depth(t));
    const int count = fac.interval.cell_count(spec.depth(t));
    for (int i = 0; i < count; ++i)
      prof[static_cast<std::size_t>(first + i)] = fac.cancellative ? (i < count / 2 ? amp : -amp) : amp;
    profiles[static_cast<std::size_t>(t)] = std::move(prof);
    axis_widths /= static_cast<double>(spec.axis_cells(t));
  }
  std::vector<int> rem;
  std::vector<int> rem_depths;
  for (int t = 0; t < m; ++t)
    if (!used[static_cast<std::size_t>(t)]) {
      rem.push_back(t);
      rem_depths.push_back(spec.depth(t));
    }
  GridSpec out_spec(rem_depths);
  GridFunction out(out_spec, 0.0);
  const std::size_t total = spec.total_cells();
  for (std::size_t idx = 0; idx < total; ++idx) {
    const auto c = spec.cell_coords(idx);
    double w = 1.0;
    for (int t = 0; t < m; ++t)
      if (used[static_cast<std::size_t>(t)]) w *= profiles[static_cast<std::size_t>(t)][static_cast<std::size_t>(c[static_cast<std::size_t>(t)])];
    if (w == 0.0) continue;
    std::array<int, 3> oc{0, 0, 0};
    for (std::size_t r = 0; r < rem.size(); ++r) oc[r] = c[static_cast<std::size_t>(rem[r])];
    out[out_spec.cell_index(oc)] += f[idx] * w * axis_widths;
  }
  return out;
}

GridFunction axis_scale_average(const GridFunction& f, int axis, int scale) {
  const GridSpec& spec = f.spec();
  require_axis(spec, axis);
  if (scale < 0 || scale > spec.depth(axis))
    throw std::invalid_argument("axis_scale_average: scale out of range");
  GridFunction out(spec, 0.0);
  const AxisLines lines(spec, axis);
  const std::size_t blocklen = static_cast<std::size_t>(1) << (spec.depth(axis) - scale);
  for (std::size_t li = 0; li < lines.total_lines(); ++li) {
    const std::size_t base = lines.base(li);
    for (std::size_t start = 0; start < lines.n; start += blocklen) {
      double s = 0.0;
      for (std::size_t i = 0; i < blocklen; ++i) s += f[base + (start + i) * lines.step];
      s /= static_cast<double>(blocklen);
      for (std::size_t i = 0; i < blocklen; ++i) out[base + (start + i) * lines.step] = s;
    }
  }
  return out;
}

GridFunction martingale_avg(const GridFunction& f, int axis, const DyadicInterval& interval) {
  const GridSpec& spec = f.spec();
  require_interval(spec, {axis, interval.scale, interval.pos});
  GridFunction out(spec, 0.0);
  const AxisLines lines(spec, axis);
  const std::size_t first = static_cast<std::size_t>(interval.first_cell(spec.depth(axis)));
  const std::size_t count = static_cast<std::size_t>(interval.cell_count(spec.depth(axis)));
  for (std::size_t li = 0; li < lines.total_lines(); ++li) {
    const std::size_t base = lines.base(li);
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) s += f[base + (first + i) * lines.step];
    s /= static_cast<double>(count);
    for (std::size_t i = 0; i < count; ++i) out[base + (first + i) * lines.step] = s;
  }
  return out;
}

GridFunction martingale_diff(const GridFunction& f, int axis, const DyadicInterval& interval) {
  const GridSpec& spec = f.spec();
  require_interval(spec, {axis, interval.scale, interval.pos});
  if (interval.scale >= spec.depth(axis))
    throw std::domain_error("martingale_diff: finest-scale interval has no children");
  GridFunction out(spec, 0.0);
  const AxisLines lines(spec, axis);
  const std::size_t first = static_cast<std::size_t>(interval.first_cell(spec.depth(axis)));
  const std::size_t count = static_cast<std::size_t>(interval.cell_count(spec.depth(axis)));
  const std::size_t half = count / 2;
  for (std::size_t li = 0; li < lines.total_lines(); ++li) {
    const std::size_t base = lines.base(li);
    double sl = 0.0, sr = 0.0;
    for (std::size_t i = 0; i < half; ++i) sl += f[base + (first + i) * lines.step];
    for (std::size_t i = half; i < count; ++i) sr += f[base + (first + i) * lines.step];
    const double avgl = sl / static_cast<double>(half);
    const double avgr = sr / static_cast<double>(half);
    const double avg = 0.5 * (avgl + avgr);
    for (std::size_t i = 0; i < half; ++i) out[base + (first + i) * lines.step] = avgl - avg;
    for (std::size_t i = half; i < count; ++i) out[base + (first + i) * lines.step] = avgr - avg;
  }
  return out;
}

GridFunction martingale_block(const GridFunction& f, int axis, const DyadicInterval& block_root,
                              int rel_depth) {
  const GridSpec& spec = f.spec();
  require_interval(spec, {axis, block_root.scale, block_root.pos});
  if (rel_depth < 0 || block_root.scale + rel_depth + 1 > spec.depth(axis))
    throw std::domain_error("martingale_block: depth overflow");
  const int s = block_root.scale + rel_depth;
  GridFunction fine = axis_scale_average(f, axis, s + 1);
  GridFunction coarse = axis_scale_average(f, axis, s);
  fine -= coarse;
  // restrict to the block root
  GridFunction out(spec, 0.0);
  const AxisLines lines(spec, axis);
  const std::size_t first = static_cast<std::size_t>(block_root.first_cell(spec.depth(axis)));
  const std::size_t count = static_cast<std::size_t>(block_root.cell_count(spec.depth(axis)));
  for (std::size_t li = 0; li < lines.total_lines(); ++li) {
    const std::size_t base = lines.base(li);
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t at = base + (first + i) * lines.step;
      out[at] = fine[at];
    }
  }
  return out;
}

HaarCoefficients::HaarCoefficients(const GridSpec& spec, std::vector<double> data)
    : spec_(spec), data_(std::move(data)) {
  if (data_.size() != spec_.total_cells())
    throw std::invalid_argument("HaarCoefficients: size mismatch");
}

int HaarCoefficients::axis_index(const DyadicInterval& interval, bool cancellative) {
  if (!cancellative) {
    if (interval.scale != 0) throw std::invalid_argument("averaging factor must be the top interval");
    return 0;
  }
  return (1 << interval.scale) + interval.pos;
}

DyadicInterval HaarCoefficients::axis_interval(int axis, int index) {
  if (index == 0) return {axis, 0, 0};
  int k = 0;
  while ((2 << k) <= index) ++k;
  return {axis, k, index - (1 << k)};
}

double HaarCoefficients::coefficient(const DyadicRectangle& rect, HaarIndex eta) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int t = 0; t < spec_.param_count(); ++t) {
    const bool canc = eta.cancellative(t);
    if (canc && rect.interval(t).scale >= spec_.depth(t))
      throw std::domain_error("coefficient: cancellative axis at finest scale");
    idx[static_cast<std::size_t>(t)] = axis_index(rect.interval(t), canc);
  }
  return data_[spec_.cell_index(idx)];
}

double HaarCoefficients::parseval_square_sum() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return s;
}

double HaarCoefficients::cancellative_square_sum() const {
  double s = 0.0;
  const std::size_t total = spec_.total_cells();
  for (std::size_t i = 0; i < total; ++i) {
    const auto c = spec_.cell_coords(i);
    bool all = true;
    for (int t = 0; t < spec_.param_count(); ++t)
      if (c[static_cast<std::size_t>(t)] == 0) {
        all = false;
        break;
      }
    if (all) s += data_[i] * data_[i];
  }
  return s;
}

void haar_sweep_axis(const GridSpec& spec, std::vector<double>& data, int axis, bool forward) {
  require_axis(spec, axis);
  const AxisLines lines(spec, axis);
  const int depth = spec.depth(axis);
  std::vector<double> buf(lines.n);
  for (std::size_t li = 0; li < lines.total_lines(); ++li) {
    const std::size_t base = lines.base(li);
    if (forward) {
      // averages shrink to the front, details land at [2^k, 2^{k+1})
      for (int k = depth - 1; k >= 0; --k) {
        const std::size_t half = static_cast<std::size_t>(1) << k;
        const double det_factor = 0.5 / sqrt_pow2(k);  // 2^{-k/2 - 1}
        for (std::size_t j = 0; j < half; ++j) {
          const double l = data[base + (2 * j) * lines.step];
          const double r = data[base + (2 * j + 1) * lines.step];
          buf[j] = 0.5 * (l + r);
          buf[half + j] = det_factor * (l - r);
        }
        for (std::size_t j = 0; j < 2 * half; ++j) data[base + j * lines.step] = buf[j];
      }
    } else {
      for (int k = 0; k < depth; ++k) {
        const std::size_t half = static_cast<std::size_t>(1) << k;
        const double det_factor = sqrt_pow2(k);  // 2^{k/2}
        for (std::size_t j = 0; j < half; ++j) {
          const double avg = data[base + j * lines.step];
          const double det = data[base + (half + j) * lines.step] * det_factor;
          buf[2 * j] = avg + det;
          buf[2 * j + 1] = avg - det;
        }
        for (std::size_t j = 0; j < 2 * half; ++j) data[base + j * lines.step] = buf[j];
      }
    }
  }
}

HaarCoefficients forward_transform(const GridFunction& f) {
  std::vector<double> data(f.values().begin(), f.values().end());
  for (int t = 0; t < f.spec().param_count(); ++t) haar_sweep_axis(f.spec(), data, t, true);
  return HaarCoefficients(f.spec(), std::move(data));
}

GridFunction inverse_transform(const HaarCoefficients& coefs) {
  std::vector<double> data(coefs.data().begin(), coefs.data().end());
  for (int t = 0; t < coefs.spec().param_count(); ++t)
    haar_sweep_axis(coefs.spec(), data, t, false);
  return GridFunction(coefs.spec(), std::move(data));
}

}  // namespace dyadic
