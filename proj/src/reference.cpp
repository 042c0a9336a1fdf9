#include "dyadic/reference.hpp"

#include <cmath>
#include <stdexcept>

namespace dyadic::ref {

namespace {

// h^0 / h^1 profile value of the interval at one finest cell of its axis.
double haar_value(const GridSpec& spec, const DyadicInterval& iv, bool cancellative, int cell) {
  const int depth = spec.depth(iv.axis);
  const int first = iv.first_cell(depth);
  const int count = iv.cell_count(depth);
  if (cell < first || cell >= first + count) return 0.0;
  double amp = std::sqrt(std::ldexp(1.0, iv.scale));
  if (!cancellative) return amp;
  return (cell - first) < count / 2 ? amp : -amp;
}

bool cell_in(const GridSpec& spec, const DyadicRectangle& rect, const std::array<int, 3>& c) {
  for (int t = 0; t < spec.param_count(); ++t) {
    const auto& iv = rect.interval(t);
    const int first = iv.first_cell(spec.depth(t));
    if (c[static_cast<std::size_t>(t)] < first ||
        c[static_cast<std::size_t>(t)] >= first + iv.cell_count(spec.depth(t)))
      return false;
  }
  return true;
}

}  // namespace

double average(const GridFunction& f, const DyadicRectangle& rect) {
  const GridSpec& spec = f.spec();
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!cell_in(spec, rect, spec.cell_coords(i))) continue;
    sum += f[i];
    ++count;
  }
  return sum / static_cast<double>(count);
}

double haar_coefficient(const GridFunction& f, const DyadicRectangle& rect, HaarIndex eta) {
  const GridSpec& spec = f.spec();
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto c = spec.cell_coords(i);
    double v = f[i];
    for (int t = 0; t < spec.param_count(); ++t)
      v *= haar_value(spec, rect.interval(t), eta.cancellative(t), c[static_cast<std::size_t>(t)]);
    sum += v;
  }
  return sum * spec.cell_volume();
}

GridFunction partial_coefficient(const GridFunction& f, std::span<const AxisHaar> factors) {
  const GridSpec& spec = f.spec();
  std::array<bool, 3> used{false, false, false};
  for (const auto& fac : factors) used[static_cast<std::size_t>(fac.interval.axis)] = true;
  std::vector<int> rem, depths;
  for (int t = 0; t < spec.param_count(); ++t)
    if (!used[static_cast<std::size_t>(t)]) {
      rem.push_back(t);
      depths.push_back(spec.depth(t));
    }
  GridSpec out_spec(depths);
  GridFunction out(out_spec, 0.0);
  double width = 1.0;
  for (const auto& fac : factors) width /= spec.axis_cells(fac.interval.axis);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto c = spec.cell_coords(i);
    double v = f[i] * width;
    for (const auto& fac : factors)
      v *= haar_value(spec, fac.interval, fac.cancellative,
                      c[static_cast<std::size_t>(fac.interval.axis)]);
    if (v == 0.0) continue;
    std::array<int, 3> oc{0, 0, 0};
    for (std::size_t r = 0; r < rem.size(); ++r) oc[r] = c[static_cast<std::size_t>(rem[r])];
    out[out_spec.cell_index(oc)] += v;
  }
  return out;
}

GridFunction martingale_diff(const GridFunction& f, int axis, const DyadicInterval& interval) {
  // projection route: <f, h_I>_axis applied back to h_I
  const GridSpec& spec = f.spec();
  GridFunction out(spec, 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto ci = spec.cell_coords(i);
    const double hi = haar_value(spec, {axis, interval.scale, interval.pos}, true,
                                 ci[static_cast<std::size_t>(axis)]);
    if (hi == 0.0) continue;
    double coef = 0.0;
    for (int cell = 0; cell < spec.axis_cells(axis); ++cell) {
      auto cj = ci;
      cj[static_cast<std::size_t>(axis)] = cell;
      coef += f[spec.cell_index(cj)] *
              haar_value(spec, {axis, interval.scale, interval.pos}, true, cell);
    }
    coef /= static_cast<double>(spec.axis_cells(axis));
    out[i] = coef * hi;
  }
  return out;
}

GridFunction maximal(const GridFunction& f, MaximalMode mode) {
  const GridSpec& spec = f.spec();
  GridFunction out(spec, 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = std::fabs(f[i]);
  if (mode == MaximalMode::Full) {
    for (const auto& rect : enumerate_rectangles(spec)) {
      double sum = 0.0;
      std::size_t n = 0;
      for (std::size_t i = 0; i < f.size(); ++i)
        if (cell_in(spec, rect, spec.cell_coords(i))) {
          sum += std::fabs(f[i]);
          ++n;
        }
      const double avg = sum / static_cast<double>(n);
      for (std::size_t i = 0; i < f.size(); ++i)
        if (cell_in(spec, rect, spec.cell_coords(i))) out[i] = std::max(out[i], avg);
    }
    return out;
  }
  const int axis = mode == MaximalMode::Axis0 ? 0 : (mode == MaximalMode::Axis1 ? 1 : 2);
  for (const auto& iv : enumerate_intervals(spec, axis)) {
    const int first = iv.first_cell(spec.depth(axis));
    const int count = iv.cell_count(spec.depth(axis));
    for (std::size_t i = 0; i < f.size(); ++i) {
      const auto c = spec.cell_coords(i);
      const int x = c[static_cast<std::size_t>(axis)];
      if (x < first || x >= first + count) continue;
      double sum = 0.0;
      for (int cell = first; cell < first + count; ++cell) {
        auto cj = c;
        cj[static_cast<std::size_t>(axis)] = cell;
        sum += std::fabs(f[spec.cell_index(cj)]);
      }
      out[i] = std::max(out[i], sum / count);
    }
  }
  return out;
}

GridFunction weighted_maximal(const GridFunction& f, const Weight& w) {
  const GridSpec& spec = f.spec();
  GridFunction out(spec, 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = std::fabs(f[i]);
  for (const auto& rect : enumerate_rectangles(spec)) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
      if (cell_in(spec, rect, spec.cell_coords(i))) {
        num += std::fabs(f[i]) * w[i];
        den += w[i];
      }
    const double avg = num / den;
    for (std::size_t i = 0; i < f.size(); ++i)
      if (cell_in(spec, rect, spec.cell_coords(i))) out[i] = std::max(out[i], avg);
  }
  return out;
}

GridFunction square_function(const GridFunction& f, SquareMode mode) {
  const GridSpec& spec = f.spec();
  const int m = spec.param_count();
  std::vector<int> in_axes, out_axes, out_depths;
  for (int t = 0; t < m; ++t) {
    if ((mode.axes_mask >> t) & 1u)
      in_axes.push_back(t);
    else {
      out_axes.push_back(t);
      out_depths.push_back(spec.depth(t));
    }
  }
  // enumerate cancellative interval tuples on the masked axes
  std::vector<std::vector<DyadicInterval>> per_axis;
  for (int t : in_axes) per_axis.push_back(enumerate_haar_intervals(spec, t));
  std::size_t tuples = 1;
  for (const auto& v : per_axis) tuples *= v.size();

  GridFunction s2(spec, 0.0);
  for (std::size_t n = 0; n < tuples; ++n) {
    std::vector<AxisHaar> factors;
    std::size_t rest = n;
    double inv_measure = 1.0;
    for (const auto& v : per_axis) {
      const auto iv = v[rest % v.size()];
      rest /= v.size();
      factors.push_back({iv, true});
      inv_measure /= iv.length();
    }
    GridFunction coef = mode.axes_mask == (1u << m) - 1u
                            ? GridFunction(GridSpec({1}), std::vector<double>{0.0, 0.0})
                            : ref::partial_coefficient(f, factors);
    double scalar_coef = 0.0;
    if (out_axes.empty()) {
      DyadicRectangle rect;
      std::array<DyadicInterval, 3> ivs{};
      for (std::size_t r = 0; r < factors.size(); ++r) ivs[r] = factors[r].interval;
      rect = DyadicRectangle(std::span<const DyadicInterval>(ivs.data(), factors.size()));
      scalar_coef = ref::haar_coefficient(f, rect, HaarIndex::all_cancellative(m));
    } else if (mode.inner_maximal) {
      coef = ref::maximal(coef, MaximalMode::Full);
    }
    for (std::size_t i = 0; i < f.size(); ++i) {
      const auto c = spec.cell_coords(i);
      bool inside = true;
      for (const auto& fac : factors) {
        const int x = c[static_cast<std::size_t>(fac.interval.axis)];
        const int first = fac.interval.first_cell(spec.depth(fac.interval.axis));
        if (x < first || x >= first + fac.interval.cell_count(spec.depth(fac.interval.axis))) {
          inside = false;
          break;
        }
      }
      if (!inside) continue;
      double cv;
      if (out_axes.empty()) {
        cv = scalar_coef;
      } else {
        GridSpec sub(out_depths);
        std::array<int, 3> oc{0, 0, 0};
        for (std::size_t r = 0; r < out_axes.size(); ++r)
          oc[r] = c[static_cast<std::size_t>(out_axes[r])];
        cv = coef[sub.cell_index(oc)];
      }
      s2[i] += cv * cv * inv_measure;
    }
  }
  GridFunction out(spec, 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::sqrt(s2[i]);
  return out;
}

double ap_constant(const GridFunction& w, double p) {
  const GridSpec& spec = w.spec();
  const double dual_exp = p / (p - 1.0);
  double best = 0.0;
  for (const auto& rect : enumerate_rectangles(spec)) {
    double aw = 0.0, as = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < w.size(); ++i)
      if (cell_in(spec, rect, spec.cell_coords(i))) {
        aw += w[i];
        as += std::pow(w[i], 1.0 - dual_exp);
        ++n;
      }
    best = std::max(best, (aw / n) * std::pow(as / n, p - 1.0));
  }
  return best;
}

GridFunction sa_omega(const CoefSequence& coefs, const OmegaSet* omega) {
  const GridSpec& spec = coefs.spec();
  GridFunction s2(spec, 0.0);
  for (const auto& e : coefs.entries()) {
    if (omega != nullptr) {
      bool inside = true;
      for (std::size_t i = 0; i < spec.total_cells(); ++i)
        if (cell_in(spec, e.rect, spec.cell_coords(i)) && !omega->contains_cell(i)) {
          inside = false;
          break;
        }
      if (!inside) continue;
    }
    for (std::size_t i = 0; i < spec.total_cells(); ++i)
      if (cell_in(spec, e.rect, spec.cell_coords(i)))
        s2[i] += e.value * e.value / e.rect.measure();
  }
  GridFunction out(spec, 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::sqrt(s2[i]);
  return out;
}

GridFunction linear_paraproduct(const CoefSequence& coefs, const GridFunction& f) {
  const GridSpec& spec = f.spec();
  GridFunction out(spec, 0.0);
  for (const auto& e : coefs.entries()) {
    const double avg = ref::average(f, e.rect);
    for (std::size_t i = 0; i < out.size(); ++i) {
      const auto c = spec.cell_coords(i);
      double h = 1.0;
      for (int t = 0; t < spec.param_count(); ++t)
        h *= haar_value(spec, e.rect.interval(t), true, c[static_cast<std::size_t>(t)]);
      out[i] += e.value * avg * h;
    }
  }
  return out;
}

GridFunction full_paraproduct(const CoefSequence& coefs, const GridFunction& f1,
                              const GridFunction& f2, const FullParaproductSymmetry& sym) {
  const GridSpec& spec = f1.spec();
  GridFunction out(spec, 0.0);
  const double vol = spec.cell_volume();
  for (const auto& e : coefs.entries()) {
    const DyadicInterval i0 = e.rect.interval(0);
    const DyadicInterval i1 = e.rect.interval(1);
    // pairing factor of one argument at one cell
    const auto factor = [&](ParaSlot slot_axis0, ParaSlot slot_axis1, ParaSlot me,
                            const std::array<int, 3>& c) {
      double v = 1.0;
      if (slot_axis0 == me)
        v *= haar_value(spec, i0, true, c[0]);
      else
        v *= haar_value(spec, i0, false, c[0]) * std::sqrt(i0.length());  // 1_I/|I| un-normalised
      if (slot_axis1 == me)
        v *= haar_value(spec, i1, true, c[1]);
      else
        v *= haar_value(spec, i1, false, c[1]) * std::sqrt(i1.length());
      return v;
    };
    // indicator average carries 1/|I|
    double pair1 = 0.0, pair2 = 0.0;
    for (std::size_t i = 0; i < spec.total_cells(); ++i) {
      const auto c = spec.cell_coords(i);
      double v1 = factor(sym.haar_slot_axis0, sym.haar_slot_axis1, ParaSlot::FirstArg, c);
      double v2 = factor(sym.haar_slot_axis0, sym.haar_slot_axis1, ParaSlot::SecondArg, c);
      if (sym.haar_slot_axis0 != ParaSlot::FirstArg) v1 /= i0.length();
      if (sym.haar_slot_axis1 != ParaSlot::FirstArg) v1 /= i1.length();
      if (sym.haar_slot_axis0 != ParaSlot::SecondArg) v2 /= i0.length();
      if (sym.haar_slot_axis1 != ParaSlot::SecondArg) v2 /= i1.length();
      pair1 += f1[i] * v1 * vol;
      pair2 += f2[i] * v2 * vol;
    }
    for (std::size_t i = 0; i < spec.total_cells(); ++i) {
      const auto c = spec.cell_coords(i);
      double vo = factor(sym.haar_slot_axis0, sym.haar_slot_axis1, ParaSlot::Output, c);
      if (sym.haar_slot_axis0 != ParaSlot::Output) vo /= i0.length();
      if (sym.haar_slot_axis1 != ParaSlot::Output) vo /= i1.length();
      out[i] += e.value * pair1 * pair2 * vo;
    }
  }
  return out;
}

GridFunction partial_paraproduct(const PartialParaproductCoefs& coefs, const GridFunction& f) {
  const GridSpec& spec = coefs.spec();
  GridFunction out(spec, 0.0);
  const double vol = spec.cell_volume();
  for (const auto& block : coefs.blocks()) {
    for (const auto& e : block.inner.entries()) {
      const DyadicInterval k2{1, e.rect.interval(0).scale, e.rect.interval(0).pos};
      const DyadicInterval k3{2, e.rect.interval(1).scale, e.rect.interval(1).pos};
      double pairing = 0.0;
      for (std::size_t i = 0; i < spec.total_cells(); ++i) {
        const auto c = spec.cell_coords(i);
        pairing += f[i] * haar_value(spec, block.fine_in, true, c[0]) *
                   haar_value(spec, k2, true, c[1]) *
                   (haar_value(spec, k3, false, c[2]) * std::sqrt(k3.length()) / k3.length()) *
                   vol;
      }
      for (std::size_t i = 0; i < spec.total_cells(); ++i) {
        const auto c = spec.cell_coords(i);
        out[i] += e.value * pairing * haar_value(spec, block.fine_out, true, c[0]) *
                  (haar_value(spec, k2, false, c[1]) * std::sqrt(k2.length()) / k2.length()) *
                  haar_value(spec, k3, true, c[2]);
      }
    }
  }
  return out;
}

GridFunction operator_u(const GridFunction& g, const Weight& nu) {
  const GridSpec& spec = g.spec();
  GridFunction out(spec, 0.0);
  const GridSpec mid({spec.depth(1)});
  for (const auto& v1 : enumerate_haar_intervals(spec, 0)) {
    for (const auto& v3 : enumerate_haar_intervals(spec, 2)) {
      const std::array<AxisHaar, 2> factors{AxisHaar{v1, true}, AxisHaar{{2, v3.scale, v3.pos}, true}};
      const GridFunction slice = ref::partial_coefficient(g, factors);
      const GridFunction sq = ref::square_function(slice, SquareMode::full(1));
      for (std::size_t i = 0; i < spec.total_cells(); ++i) {
        const auto c = spec.cell_coords(i);
        const double h1 = haar_value(spec, v1, true, c[0]);
        const double h3 = haar_value(spec, {2, v3.scale, v3.pos}, true, c[2]);
        if (h1 == 0.0 || h3 == 0.0) continue;
        // <nu>^{0,2}_{V1 x V3} at this axis-1 cell
        double nusum = 0.0;
        std::size_t count = 0;
        for (std::size_t k = 0; k < spec.total_cells(); ++k) {
          const auto ck = spec.cell_coords(k);
          if (ck[1] != c[1]) continue;
          if (haar_value(spec, v1, false, ck[0]) == 0.0) continue;
          if (haar_value(spec, {2, v3.scale, v3.pos}, false, ck[2]) == 0.0) continue;
          nusum += nu[k];
          ++count;
        }
        out[i] += h1 * sq[static_cast<std::size_t>(c[1])] * (nusum / count) * h3;
      }
    }
  }
  return out;
}

}  // namespace dyadic::ref
