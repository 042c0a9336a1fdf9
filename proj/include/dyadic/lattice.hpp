#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dyadic {

/// Finite dyadic product grid on [0,1)^m, m in {1,2,3}. Axis t is split into
/// 2^{depth(t)} cells of width 2^{-depth(t)}. Immutable.
class GridSpec {
 public:
  GridSpec(std::initializer_list<int> depths) : GridSpec(std::vector<int>(depths)) {}
  explicit GridSpec(const std::vector<int>& depths);

  int param_count() const { return params_; }
  int depth(int axis) const { return depths_[static_cast<std::size_t>(axis)]; }
  int axis_cells(int axis) const { return 1 << depth(axis); }
  std::size_t total_cells() const { return total_cells_; }
  double cell_volume() const { return cell_volume_; }

  // Row-major flat layout, axis 0 slowest.
  std::size_t stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }
  std::size_t cell_index(const std::array<int, 3>& coords) const {
    std::size_t idx = 0;
    for (int t = 0; t < params_; ++t) idx += static_cast<std::size_t>(coords[static_cast<std::size_t>(t)]) * stride(t);
    return idx;
  }
  std::array<int, 3> cell_coords(std::size_t index) const;

  bool operator==(const GridSpec& o) const { return params_ == o.params_ && depths_ == o.depths_; }
  bool operator!=(const GridSpec& o) const { return !(*this == o); }

  std::string describe() const;

 private:
  int params_ = 0;
  std::array<int, 3> depths_{0, 0, 0};
  std::array<std::size_t, 3> strides_{0, 0, 0};
  std::size_t total_cells_ = 0;
  double cell_volume_ = 1.0;
};

/// Dyadic interval [pos 2^-scale, (pos+1) 2^-scale) on one parameter axis.
struct DyadicInterval {
  int axis = 0;
  int scale = 0;
  int pos = 0;

  double length() const { return 1.0 / static_cast<double>(1 << scale); }
  double left() const { return pos * length(); }

  DyadicInterval parent() const;
  DyadicInterval ancestor(int generations) const;
  DyadicInterval child(int side) const;  // 0 = left half, 1 = right half
  bool contains(const DyadicInterval& other) const;
  bool is_left_half() const { return (pos & 1) == 0; }

  // Finest-cell range [first, first+count) covered at the given axis depth.
  int first_cell(int depth) const { return pos << (depth - scale); }
  int cell_count(int depth) const { return 1 << (depth - scale); }

  bool operator==(const DyadicInterval& o) const {
    return axis == o.axis && scale == o.scale && pos == o.pos;
  }
};

/// Product of one dyadic interval per axis.
class DyadicRectangle {
 public:
  DyadicRectangle() = default;
  explicit DyadicRectangle(std::span<const DyadicInterval> intervals);
  DyadicRectangle(const DyadicInterval& i0);
  DyadicRectangle(const DyadicInterval& i0, const DyadicInterval& i1);
  DyadicRectangle(const DyadicInterval& i0, const DyadicInterval& i1, const DyadicInterval& i2);

  int param_count() const { return params_; }
  const DyadicInterval& interval(int axis) const { return iv_[static_cast<std::size_t>(axis)]; }
  DyadicInterval& interval(int axis) { return iv_[static_cast<std::size_t>(axis)]; }

  double measure() const;
  bool contains(const DyadicRectangle& other) const;
  std::size_t cell_count(const GridSpec& spec) const;

  bool operator==(const DyadicRectangle& o) const;
  std::string describe() const;  // "k:j|k:j|..."

 private:
  int params_ = 0;
  std::array<DyadicInterval, 3> iv_{};
};

/// Cell-constant real function on a grid. Values are stored per finest cell
/// in row-major order (axis 0 slowest); integrals are exact cell sums.
class GridFunction {
 public:
  explicit GridFunction(const GridSpec& spec, double fill = 0.0)
      : spec_(spec), values_(spec.total_cells(), fill) {}
  GridFunction(const GridSpec& spec, std::vector<double> values);

  const GridSpec& spec() const { return spec_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& mutable_values() { return values_; }

  double integral() const;
  double average(const DyadicRectangle& rect) const;
  double max_abs() const;

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(double c);
  friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
  friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
  friend GridFunction operator*(GridFunction a, double c) { return a *= c; }
  friend GridFunction operator*(double c, GridFunction a) { return a *= c; }

  /// Cellwise product.
  static GridFunction product(const GridFunction& a, const GridFunction& b);

 private:
  GridSpec spec_;
  std::vector<double> values_;
};

/// Summed-volume table over the cells of a grid function: O(1) integrals and
/// averages of dyadic rectangles.
class CellSums {
 public:
  explicit CellSums(const GridFunction& f);
  CellSums(const GridSpec& spec, std::span<const double> cell_values);

  double integral(const DyadicRectangle& rect) const;
  double average(const DyadicRectangle& rect) const;
  // Half-open cell box [lo, hi) per axis; missing axes use [0,1).
  double box_integral(const std::array<int, 3>& lo, const std::array<int, 3>& hi) const;
  const GridSpec& spec() const { return spec_; }

 private:
  double corner(int i0, int i1, int i2) const {
    return table_[(static_cast<std::size_t>(i0) * n1_ + static_cast<std::size_t>(i1)) * n2_ +
                  static_cast<std::size_t>(i2)];
  }
  GridSpec spec_;
  std::size_t n1_ = 1, n2_ = 1;  // padded table extents for axes 1, 2 (+1 each)
  std::vector<double> table_;
};

/// Finite union of grid cells; the role of an open set in sup-over-Omega norms.
class OmegaSet {
 public:
  OmegaSet(const GridSpec& spec, std::vector<std::uint8_t> mask);
  static OmegaSet full(const GridSpec& spec);
  static OmegaSet from_rectangle(const GridSpec& spec, const DyadicRectangle& rect);
  static OmegaSet from_cells(const GridSpec& spec, std::span<const std::size_t> cells);

  const GridSpec& spec() const { return spec_; }
  std::size_t cell_count() const { return cell_count_; }
  double measure() const { return static_cast<double>(cell_count_) * spec_.cell_volume(); }
  bool contains_cell(std::size_t index) const { return mask_[index] != 0; }
  bool contains(const DyadicRectangle& rect) const;
  std::span<const std::uint8_t> mask() const { return mask_; }
  std::vector<std::size_t> sorted_cells() const;
  const std::string& label() const { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }

 private:
  GridSpec spec_;
  std::vector<std::uint8_t> mask_;
  std::size_t cell_count_ = 0;
  CellSums counts_;  // prefix counts of the mask, for O(1) containment
  std::string label_;
};

// ---------------------------------------------------------------------------
// Enumeration. Intervals are ordered scale-major (coarse first), then by
// position; rectangles nest the per-axis orders lexicographically.

std::vector<DyadicInterval> enumerate_intervals(const GridSpec& spec, int axis);
// Intervals with children on the grid (scale < depth); these carry Haar functions.
std::vector<DyadicInterval> enumerate_haar_intervals(const GridSpec& spec, int axis);
std::vector<DyadicRectangle> enumerate_rectangles(const GridSpec& spec);
// Rectangles whose every interval carries a Haar function.
std::vector<DyadicRectangle> enumerate_cancellative_rectangles(const GridSpec& spec);

// ---------------------------------------------------------------------------
// Omega families: finite surrogates for the supremum over open sets. The same
// family must be passed to both sides of any compared norm.

enum class OmegaStrategy { AllRectangles, RandomUnions, LevelSets, FullSpace };

struct OmegaFamilySpec {
  OmegaStrategy strategy = OmegaStrategy::AllRectangles;
  int union_size = 3;    // RandomUnions: rectangles per set
  int count = 32;        // RandomUnions: number of sets
  const GridFunction* level_function = nullptr;  // LevelSets
  std::vector<double> thresholds;                // LevelSets
  std::string describe() const;
};

/// Deterministic in (spec, family, seed). Never emits an empty set.
std::vector<OmegaSet> omega_family(const GridSpec& spec, const OmegaFamilySpec& family,
                                   std::uint64_t seed);

}  // namespace dyadic
