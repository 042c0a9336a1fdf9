#pragma once

#include <optional>
#include <span>

#include "dyadic/lattice.hpp"
#include "dyadic/weights.hpp"

namespace dyadic {

/// Maximal operators: Full takes the sup of |f|-averages over all dyadic
/// rectangles containing the point, Axis<t> over intervals of one axis only.
enum class MaximalMode { Full, Axis0, Axis1, Axis2 };

GridFunction maximal(const GridFunction& f, MaximalMode mode = MaximalMode::Full);

/// M^w: sup over rectangles of w(R)^{-1} int_R |f| w.
GridFunction weighted_maximal(const GridFunction& f, const Weight& w);

/// Square function selector: `axes_mask` is the set of axes whose Haar factor
/// is cancellative (all axes = the full square function). `inner_maximal`
/// replaces the partial coefficient by its dyadic maximal over the
/// complementary axes before squaring.
struct SquareMode {
  unsigned axes_mask;
  bool inner_maximal = false;

  static SquareMode full(int params) { return {(1u << params) - 1u, false}; }
  static SquareMode axis(int axis) { return {1u << axis, false}; }
  static SquareMode axis_with_maximal(int axis) { return {1u << axis, true}; }
  static SquareMode axes(std::initializer_list<int> list) {
    unsigned m = 0;
    for (int a : list) m |= 1u << a;
    return {m, false};
  }
};

GridFunction square_function(const GridFunction& f, SquareMode mode);

/// L^p norm with optional weight: (sum |f|^p w vol)^{1/p}; p = inf -> max |f|.
struct NormParams {
  double p = 2.0;
  const Weight* weight = nullptr;
};

double lp_norm(const GridFunction& f, const NormParams& params);
inline double lp_norm(const GridFunction& f, double p, const Weight* w = nullptr) {
  return lp_norm(f, NormParams{p, w});
}

/// || (sum_j (M f_j)^s)^{1/s} ||_{L^p(w)}.
double fs_vector_maximal(std::span<const GridFunction> fs, double s, double p, const Weight* w,
                         MaximalMode mode = MaximalMode::Full);

}  // namespace dyadic
