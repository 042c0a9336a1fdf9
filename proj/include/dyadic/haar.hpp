#pragma once

#include <span>
#include <vector>

#include "dyadic/lattice.hpp"

namespace dyadic {

/// Per-axis choice between the averaging factor h^0 (bit 0) and the
/// cancellative factor h^1 (bit 1) of a tensor Haar function.
struct HaarIndex {
  unsigned bits = 0;
  bool cancellative(int axis) const { return (bits >> axis) & 1u; }
  static HaarIndex all_cancellative(int params) { return {(1u << params) - 1u}; }
  bool fully_cancellative(int params) const { return bits == (1u << params) - 1u; }
};

/// L^2-normalised one-axis Haar profile on the 1-parameter grid of I's axis:
/// h^0_I = |I|^{-1/2} 1_I, h^1_I = |I|^{-1/2}(1_left - 1_right).
/// The cancellative profile requires scale(I) < depth.
GridFunction haar_function(const GridSpec& spec, const DyadicInterval& interval,
                           bool cancellative);

/// <f, h_R^eta>: full pairing against the tensor Haar function. Cancellative
/// axes must not sit at the finest scale.
double haar_coefficient(const GridFunction& f, const DyadicRectangle& rect, HaarIndex eta);

/// One Haar factor on one axis of a partial pairing.
struct AxisHaar {
  DyadicInterval interval;
  bool cancellative = true;
};

/// Integrates f against Haar profiles on a proper nonempty subset of axes and
/// returns the resulting function of the remaining variables.
GridFunction partial_coefficient(const GridFunction& f, std::span<const AxisHaar> factors);

/// Martingale difference Delta_I on one axis: projection onto h^1_I applied
/// slice-wise. I must not be at the finest scale.
GridFunction martingale_diff(const GridFunction& f, int axis, const DyadicInterval& interval);

/// Martingale average E_I on one axis: 1_I <f>_I slice-wise.
GridFunction martingale_avg(const GridFunction& f, int axis, const DyadicInterval& interval);

/// Martingale block: sum of Delta_J over descendants J of K at relative depth
/// rel_depth on the given axis.
GridFunction martingale_block(const GridFunction& f, int axis, const DyadicInterval& block_root,
                              int rel_depth);

/// Conditional average at a whole scale along one axis (scale in [0, depth]).
GridFunction axis_scale_average(const GridFunction& f, int axis, int scale);

/// Full tensor Haar expansion of a grid function. Layout per axis: wavelet
/// index 0 holds the top averaging coefficient, index 2^k + j the cancellative
/// coefficient of interval (k, j), k < depth. Reconstruction is exact.
class HaarCoefficients {
 public:
  explicit HaarCoefficients(const GridSpec& spec)
      : spec_(spec), data_(spec.total_cells(), 0.0) {}
  HaarCoefficients(const GridSpec& spec, std::vector<double> data);

  const GridSpec& spec() const { return spec_; }
  std::span<const double> data() const { return data_; }
  std::vector<double>& mutable_data() { return data_; }
  double operator[](std::size_t i) const { return data_[i]; }

  static int axis_index(const DyadicInterval& interval, bool cancellative);
  static DyadicInterval axis_interval(int axis, int index);  // inverse of axis_index
  static bool axis_index_cancellative(int index) { return index > 0; }

  /// Coefficient of a basis element: cancellative axes carry the rectangle's
  /// interval, averaging axes must carry the top interval.
  double coefficient(const DyadicRectangle& rect, HaarIndex eta) const;

  double parseval_square_sum() const;
  /// Square sum restricted to fully cancellative basis elements.
  double cancellative_square_sum() const;

 private:
  GridSpec spec_;
  std::vector<double> data_;
};

/// Fast tensor Haar analysis: in-place butterfly sweeps per axis.
HaarCoefficients forward_transform(const GridFunction& f);
GridFunction inverse_transform(const HaarCoefficients& coefs);

// In-place sweeps on a raw buffer in grid layout; exposed for kernels that
// transform only selected axes.
void haar_sweep_axis(const GridSpec& spec, std::vector<double>& data, int axis, bool forward);

}  // namespace dyadic
