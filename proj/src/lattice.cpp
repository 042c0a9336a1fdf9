#include "dyadic/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dyadic/rng.hpp"

namespace dyadic {

GridSpec::GridSpec(const std::vector<int>& depths) {
  if (depths.empty() || depths.size() > 3)
    throw std::invalid_argument("GridSpec: need 1..3 parameter axes");
  params_ = static_cast<int>(depths.size());
  total_cells_ = 1;
  for (int t = 0; t < params_; ++t) {
    const int n = depths[static_cast<std::size_t>(t)];
    if (n < 1 || n > 20) throw std::invalid_argument("GridSpec: depth out of range");
    depths_[static_cast<std::size_t>(t)] = n;
    total_cells_ *= static_cast<std::size_t>(1) << n;
  }
  std::size_t stride = 1;
  for (int t = params_ - 1; t >= 0; --t) {
    strides_[static_cast<std::size_t>(t)] = stride;
    stride *= static_cast<std::size_t>(1) << depths_[static_cast<std::size_t>(t)];
  }
  cell_volume_ = 1.0 / static_cast<double>(total_cells_);
}

std::array<int, 3> GridSpec::cell_coords(std::size_t index) const {
  std::array<int, 3> c{0, 0, 0};
  for (int t = params_ - 1; t >= 0; --t) {
    const std::size_t n = static_cast<std::size_t>(1) << depths_[static_cast<std::size_t>(t)];
    c[static_cast<std::size_t>(t)] = static_cast<int>(index % n);
    index /= n;
  }
  return c;
}

std::string GridSpec::describe() const {
  std::string s = "N=";
  for (int t = 0; t < params_; ++t) {
    if (t) s += ",";
    s += std::to_string(depth(t));
  }
  return s;
}

DyadicInterval DyadicInterval::parent() const {
  if (scale == 0) throw std::domain_error("DyadicInterval: top interval has no parent");
  return {axis, scale - 1, pos >> 1};
}

DyadicInterval DyadicInterval::ancestor(int generations) const {
  if (generations < 0 || generations > scale)
    throw std::domain_error("DyadicInterval: ancestor generation out of range");
  return {axis, scale - generations, pos >> generations};
}

DyadicInterval DyadicInterval::child(int side) const {
  return {axis, scale + 1, 2 * pos + side};
}

bool DyadicInterval::contains(const DyadicInterval& other) const {
  return axis == other.axis && other.scale >= scale && (other.pos >> (other.scale - scale)) == pos;
}

DyadicRectangle::DyadicRectangle(std::span<const DyadicInterval> intervals) {
  if (intervals.empty() || intervals.size() > 3)
    throw std::invalid_argument("DyadicRectangle: need 1..3 intervals");
  params_ = static_cast<int>(intervals.size());
  for (int t = 0; t < params_; ++t) iv_[static_cast<std::size_t>(t)] = intervals[static_cast<std::size_t>(t)];
}

DyadicRectangle::DyadicRectangle(const DyadicInterval& i0) : params_(1) { iv_[0] = i0; }
DyadicRectangle::DyadicRectangle(const DyadicInterval& i0, const DyadicInterval& i1) : params_(2) {
  iv_[0] = i0;
  iv_[1] = i1;
}
DyadicRectangle::DyadicRectangle(const DyadicInterval& i0, const DyadicInterval& i1,
                                 const DyadicInterval& i2)
    : params_(3) {
  iv_[0] = i0;
  iv_[1] = i1;
  iv_[2] = i2;
}

double DyadicRectangle::measure() const {
  double m = 1.0;
  for (int t = 0; t < params_; ++t) m *= iv_[static_cast<std::size_t>(t)].length();
  return m;
}

bool DyadicRectangle::contains(const DyadicRectangle& other) const {
  if (params_ != other.params_) return false;
  for (int t = 0; t < params_; ++t)
    if (!interval(t).contains(other.interval(t))) return false;
  return true;
}

std::size_t DyadicRectangle::cell_count(const GridSpec& spec) const {
  std::size_t n = 1;
  for (int t = 0; t < params_; ++t)
    n *= static_cast<std::size_t>(interval(t).cell_count(spec.depth(t)));
  return n;
}

bool DyadicRectangle::operator==(const DyadicRectangle& o) const {
  if (params_ != o.params_) return false;
  for (int t = 0; t < params_; ++t)
    if (!(interval(t) == o.interval(t))) return false;
  return true;
}

std::string DyadicRectangle::describe() const {
  std::string s;
  for (int t = 0; t < params_; ++t) {
    if (t) s += "|";
    s += std::to_string(interval(t).scale) + ":" + std::to_string(interval(t).pos);
  }
  return s;
}

GridFunction::GridFunction(const GridSpec& spec, std::vector<double> values)
    : spec_(spec), values_(std::move(values)) {
  if (values_.size() != spec_.total_cells())
    throw std::invalid_argument("GridFunction: value count does not match grid");
}

double GridFunction::integral() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s * spec_.cell_volume();
}

double GridFunction::average(const DyadicRectangle& rect) const {
  if (rect.param_count() != spec_.param_count())
    throw std::invalid_argument("GridFunction::average: rectangle/grid mismatch");
  std::array<int, 3> lo{0, 0, 0}, n{1, 1, 1};
  std::size_t count = 1;
  for (int t = 0; t < spec_.param_count(); ++t) {
    lo[static_cast<std::size_t>(t)] = rect.interval(t).first_cell(spec_.depth(t));
    n[static_cast<std::size_t>(t)] = rect.interval(t).cell_count(spec_.depth(t));
    count *= static_cast<std::size_t>(n[static_cast<std::size_t>(t)]);
  }
  double s = 0.0;
  std::array<int, 3> c{0, 0, 0};
  for (int a = 0; a < n[0]; ++a)
    for (int b = 0; b < n[1]; ++b)
      for (int d = 0; d < n[2]; ++d) {
        c = {lo[0] + a, lo[1] + b, lo[2] + d};
        s += values_[spec_.cell_index(c)];
      }
  return s / static_cast<double>(count);
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::fabs(v));
  return m;
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  if (spec_ != o.spec_) throw std::invalid_argument("GridFunction: spec mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
  if (spec_ != o.spec_) throw std::invalid_argument("GridFunction: spec mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

GridFunction& GridFunction::operator*=(double c) {
  for (double& v : values_) v *= c;
  return *this;
}

GridFunction GridFunction::product(const GridFunction& a, const GridFunction& b) {
  if (a.spec() != b.spec()) throw std::invalid_argument("GridFunction::product: spec mismatch");
  GridFunction out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
  return out;
}

CellSums::CellSums(const GridFunction& f) : CellSums(f.spec(), f.values()) {}

CellSums::CellSums(const GridSpec& spec, std::span<const double> cell_values) : spec_(spec) {
  const int m = spec.param_count();
  const std::size_t n0 = static_cast<std::size_t>(spec.axis_cells(0));
  const std::size_t nn1 = m > 1 ? static_cast<std::size_t>(spec.axis_cells(1)) : 1;
  const std::size_t nn2 = m > 2 ? static_cast<std::size_t>(spec.axis_cells(2)) : 1;
  n1_ = nn1 + 1;
  n2_ = nn2 + 1;
  table_.assign((n0 + 1) * n1_ * n2_, 0.0);
  const double vol = spec.cell_volume();
  for (std::size_t a = 1; a <= n0; ++a)
    for (std::size_t b = 1; b <= nn1; ++b)
      for (std::size_t c = 1; c <= nn2; ++c) {
        const double v = cell_values[((a - 1) * nn1 + (b - 1)) * nn2 + (c - 1)] * vol;
        table_[(a * n1_ + b) * n2_ + c] =
            v + corner(static_cast<int>(a) - 1, static_cast<int>(b), static_cast<int>(c)) +
            corner(static_cast<int>(a), static_cast<int>(b) - 1, static_cast<int>(c)) +
            corner(static_cast<int>(a), static_cast<int>(b), static_cast<int>(c) - 1) -
            corner(static_cast<int>(a) - 1, static_cast<int>(b) - 1, static_cast<int>(c)) -
            corner(static_cast<int>(a) - 1, static_cast<int>(b), static_cast<int>(c) - 1) -
            corner(static_cast<int>(a), static_cast<int>(b) - 1, static_cast<int>(c) - 1) +
            corner(static_cast<int>(a) - 1, static_cast<int>(b) - 1, static_cast<int>(c) - 1);
      }
}

double CellSums::box_integral(const std::array<int, 3>& lo, const std::array<int, 3>& hi) const {
  const int a0 = lo[0], a1 = hi[0];
  const int b0 = lo[1], b1 = hi[1];
  const int c0 = lo[2], c1 = hi[2];
  return corner(a1, b1, c1) - corner(a0, b1, c1) - corner(a1, b0, c1) - corner(a1, b1, c0) +
         corner(a0, b0, c1) + corner(a0, b1, c0) + corner(a1, b0, c0) - corner(a0, b0, c0);
}

double CellSums::integral(const DyadicRectangle& rect) const {
  std::array<int, 3> lo{0, 0, 0}, hi{1, 1, 1};
  const int m = spec_.param_count();
  for (int t = 0; t < m; ++t) {
    lo[static_cast<std::size_t>(t)] = rect.interval(t).first_cell(spec_.depth(t));
    hi[static_cast<std::size_t>(t)] =
        lo[static_cast<std::size_t>(t)] + rect.interval(t).cell_count(spec_.depth(t));
  }
  return box_integral(lo, hi);
}

double CellSums::average(const DyadicRectangle& rect) const {
  return integral(rect) / rect.measure();
}

namespace {
std::vector<std::uint8_t> full_mask(const GridSpec& spec) {
  return std::vector<std::uint8_t>(spec.total_cells(), 1);
}

std::vector<double> normalize_mask(const GridSpec& spec, std::vector<std::uint8_t>& mask,
                                   std::size_t& count) {
  if (mask.size() != spec.total_cells())
    throw std::invalid_argument("OmegaSet: mask size does not match grid");
  std::vector<double> asdouble(mask.size());
  count = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    mask[i] = mask[i] ? 1 : 0;
    asdouble[i] = mask[i];
    count += mask[i];
  }
  return asdouble;
}
}  // namespace

OmegaSet::OmegaSet(const GridSpec& spec, std::vector<std::uint8_t> mask)
    : spec_(spec),
      mask_(std::move(mask)),
      cell_count_(0),
      counts_(spec_, normalize_mask(spec_, mask_, cell_count_)) {
  if (cell_count_ == 0) throw std::invalid_argument("OmegaSet: empty set");
}

OmegaSet OmegaSet::full(const GridSpec& spec) {
  OmegaSet o(spec, full_mask(spec));
  o.set_label("full");
  return o;
}

OmegaSet OmegaSet::from_rectangle(const GridSpec& spec, const DyadicRectangle& rect) {
  std::vector<std::uint8_t> mask(spec.total_cells(), 0);
  std::array<int, 3> lo{0, 0, 0}, n{1, 1, 1};
  for (int t = 0; t < spec.param_count(); ++t) {
    lo[static_cast<std::size_t>(t)] = rect.interval(t).first_cell(spec.depth(t));
    n[static_cast<std::size_t>(t)] = rect.interval(t).cell_count(spec.depth(t));
  }
  for (int a = 0; a < n[0]; ++a)
    for (int b = 0; b < n[1]; ++b)
      for (int c = 0; c < n[2]; ++c)
        mask[spec.cell_index({lo[0] + a, lo[1] + b, lo[2] + c})] = 1;
  OmegaSet o(spec, std::move(mask));
  o.set_label("rect " + rect.describe());
  return o;
}

OmegaSet OmegaSet::from_cells(const GridSpec& spec, std::span<const std::size_t> cells) {
  std::vector<std::uint8_t> mask(spec.total_cells(), 0);
  for (std::size_t c : cells) {
    if (c >= mask.size()) throw std::invalid_argument("OmegaSet: cell index out of range");
    mask[c] = 1;
  }
  return OmegaSet(spec, std::move(mask));
}

bool OmegaSet::contains(const DyadicRectangle& rect) const {
  // count of member cells inside rect equals rect's cell count
  const double inside = counts_.integral(rect) / spec_.cell_volume();
  const double want = static_cast<double>(rect.cell_count(spec_));
  return inside > want - 0.5;
}

std::vector<std::size_t> OmegaSet::sorted_cells() const {
  std::vector<std::size_t> cells;
  cells.reserve(cell_count_);
  for (std::size_t i = 0; i < mask_.size(); ++i)
    if (mask_[i]) cells.push_back(i);
  return cells;
}

std::vector<DyadicInterval> enumerate_intervals(const GridSpec& spec, int axis) {
  std::vector<DyadicInterval> out;
  out.reserve((static_cast<std::size_t>(2) << spec.depth(axis)) - 1);
  for (int k = 0; k <= spec.depth(axis); ++k)
    for (int j = 0; j < (1 << k); ++j) out.push_back({axis, k, j});
  return out;
}

std::vector<DyadicInterval> enumerate_haar_intervals(const GridSpec& spec, int axis) {
  std::vector<DyadicInterval> out;
  out.reserve((static_cast<std::size_t>(1) << spec.depth(axis)) - 1);
  for (int k = 0; k < spec.depth(axis); ++k)
    for (int j = 0; j < (1 << k); ++j) out.push_back({axis, k, j});
  return out;
}

namespace {
std::vector<DyadicRectangle> product_rectangles(
    const GridSpec& spec, const std::vector<std::vector<DyadicInterval>>& per_axis) {
  std::vector<DyadicRectangle> out;
  std::size_t total = 1;
  for (const auto& v : per_axis) total *= v.size();
  out.reserve(total);
  const int m = spec.param_count();
  std::array<std::size_t, 3> idx{0, 0, 0};
  for (std::size_t n = 0; n < total; ++n) {
    std::array<DyadicInterval, 3> iv{};
    for (int t = 0; t < m; ++t) iv[static_cast<std::size_t>(t)] = per_axis[static_cast<std::size_t>(t)][idx[static_cast<std::size_t>(t)]];
    out.push_back(DyadicRectangle(std::span<const DyadicInterval>(iv.data(), static_cast<std::size_t>(m))));
    for (int t = m - 1; t >= 0; --t) {
      auto& i = idx[static_cast<std::size_t>(t)];
      if (++i < per_axis[static_cast<std::size_t>(t)].size()) break;
      i = 0;
    }
  }
  return out;
}
}  // namespace

std::vector<DyadicRectangle> enumerate_rectangles(const GridSpec& spec) {
  std::vector<std::vector<DyadicInterval>> per_axis;
  for (int t = 0; t < spec.param_count(); ++t) per_axis.push_back(enumerate_intervals(spec, t));
  return product_rectangles(spec, per_axis);
}

std::vector<DyadicRectangle> enumerate_cancellative_rectangles(const GridSpec& spec) {
  std::vector<std::vector<DyadicInterval>> per_axis;
  for (int t = 0; t < spec.param_count(); ++t)
    per_axis.push_back(enumerate_haar_intervals(spec, t));
  return product_rectangles(spec, per_axis);
}

std::string OmegaFamilySpec::describe() const {
  switch (strategy) {
    case OmegaStrategy::AllRectangles:
      return "all-rectangles";
    case OmegaStrategy::FullSpace:
      return "full-space";
    case OmegaStrategy::RandomUnions:
      return "random-unions(K=" + std::to_string(union_size) + ",count=" + std::to_string(count) + ")";
    case OmegaStrategy::LevelSets:
      return "level-sets(" + std::to_string(thresholds.size()) + ")";
  }
  return "?";
}

std::vector<OmegaSet> omega_family(const GridSpec& spec, const OmegaFamilySpec& family,
                                   std::uint64_t seed) {
  std::vector<OmegaSet> out;
  switch (family.strategy) {
    case OmegaStrategy::FullSpace:
      out.push_back(OmegaSet::full(spec));
      break;
    case OmegaStrategy::AllRectangles: {
      for (const auto& rect : enumerate_rectangles(spec))
        out.push_back(OmegaSet::from_rectangle(spec, rect));
      break;
    }
    case OmegaStrategy::RandomUnions: {
      if (family.union_size < 1 || family.count < 1)
        throw std::invalid_argument("omega_family: RandomUnions needs positive sizes");
      const auto rects = enumerate_rectangles(spec);
      for (int i = 0; i < family.count; ++i) {
        Rng rng(split_seed(seed, static_cast<std::uint64_t>(i)));
        std::vector<std::uint8_t> mask(spec.total_cells(), 0);
        for (int k = 0; k < family.union_size; ++k) {
          const auto& rect = rects[rng.below(rects.size())];
          std::array<int, 3> lo{0, 0, 0}, n{1, 1, 1};
          for (int t = 0; t < spec.param_count(); ++t) {
            lo[static_cast<std::size_t>(t)] = rect.interval(t).first_cell(spec.depth(t));
            n[static_cast<std::size_t>(t)] = rect.interval(t).cell_count(spec.depth(t));
          }
          for (int a = 0; a < n[0]; ++a)
            for (int b = 0; b < n[1]; ++b)
              for (int c = 0; c < n[2]; ++c)
                mask[spec.cell_index({lo[0] + a, lo[1] + b, lo[2] + c})] = 1;
        }
        OmegaSet o(spec, std::move(mask));
        o.set_label("union#" + std::to_string(i));
        out.push_back(std::move(o));
      }
      break;
    }
    case OmegaStrategy::LevelSets: {
      if (family.level_function == nullptr)
        throw std::invalid_argument("omega_family: LevelSets needs a level function");
      const GridFunction& g = *family.level_function;
      if (g.spec() != spec) throw std::invalid_argument("omega_family: level function grid mismatch");
      for (double t : family.thresholds) {
        std::vector<std::uint8_t> mask(spec.total_cells(), 0);
        std::size_t n = 0;
        for (std::size_t i = 0; i < mask.size(); ++i)
          if (g[i] > t) {
            mask[i] = 1;
            ++n;
          }
        if (n == 0) continue;  // empty level sets are skipped
        OmegaSet o(spec, std::move(mask));
        o.set_label("level>" + std::to_string(t));
        out.push_back(std::move(o));
      }
      break;
    }
  }
  return out;
}

}  // namespace dyadic
