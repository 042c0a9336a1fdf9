#include "dyadic/paraproducts.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dyadic/haar.hpp"
#include "dyadic/maximal_square.hpp"
#include "dyadic/rng.hpp"

namespace dyadic {

namespace {

struct AxisLines {
  std::size_t n, step, block, total;
  AxisLines(const GridSpec& spec, int axis)
      : n(static_cast<std::size_t>(spec.axis_cells(axis))),
        step(spec.stride(axis)),
        block(n * step),
        total(spec.total_cells()) {}
  std::size_t lines() const { return total / n; }
  std::size_t base(std::size_t line) const {
    return (line / step) * block + (line % step);
  }
};

// Replace cell values by interval averages along one axis, stored at slots
// (1<<k)+j, k < depth. Slot 0 is zeroed; finest-scale intervals are dropped.
void avg_pyramid_axis(const GridSpec& spec, std::vector<double>& data, int axis) {
  const AxisLines lines(spec, axis);
  const int depth = spec.depth(axis);
  std::vector<double> cur(lines.n), out(lines.n, 0.0);
  for (std::size_t li = 0; li < lines.lines(); ++li) {
    const std::size_t base = lines.base(li);
    for (std::size_t i = 0; i < lines.n; ++i) cur[i] = data[base + i * lines.step];
    std::fill(out.begin(), out.end(), 0.0);
    std::size_t width = lines.n;
    for (int k = depth - 1; k >= 0; --k) {
      width /= 2;
      for (std::size_t j = 0; j < width; ++j) cur[j] = 0.5 * (cur[2 * j] + cur[2 * j + 1]);
      for (std::size_t j = 0; j < width; ++j) out[(static_cast<std::size_t>(1) << k) + j] = cur[j];
    }
    for (std::size_t i = 0; i < lines.n; ++i) data[base + i * lines.step] = out[i];
  }
}

// Expand interval-slot contributions c_I as sum_I c_I 1_I/|I| back to cells.
void indicator_expand_axis(const GridSpec& spec, std::vector<double>& data, int axis) {
  const AxisLines lines(spec, axis);
  const int depth = spec.depth(axis);
  std::vector<double> buf(lines.n), out(lines.n);
  for (std::size_t li = 0; li < lines.lines(); ++li) {
    const std::size_t base = lines.base(li);
    for (std::size_t i = 0; i < lines.n; ++i) buf[i] = data[base + i * lines.step];
    for (std::size_t i = 0; i < lines.n; ++i) {
      double acc = 0.0;
      for (int k = 0; k < depth; ++k)
        acc += buf[(static_cast<std::size_t>(1) << k) + (i >> (depth - k))] *
               static_cast<double>(1 << k);
      out[i] = acc;
    }
    for (std::size_t i = 0; i < lines.n; ++i) data[base + i * lines.step] = out[i];
  }
}

std::size_t slot_index(const DyadicInterval& iv) {
  return (static_cast<std::size_t>(1) << iv.scale) + static_cast<std::size_t>(iv.pos);
}

}  // namespace

GridFunction linear_paraproduct(const CoefSequence& coefs, const GridFunction& f) {
  const GridSpec& spec = f.spec();
  if (coefs.spec() != spec) throw std::invalid_argument("linear_paraproduct: grid mismatch");
  std::vector<double> avg(f.values().begin(), f.values().end());
  for (int t = 0; t < spec.param_count(); ++t) avg_pyramid_axis(spec, avg, t);
  std::vector<double> acc(spec.total_cells(), 0.0);
  for (const auto& e : coefs.entries()) {
    std::array<int, 3> idx{0, 0, 0};
    for (int t = 0; t < spec.param_count(); ++t)
      idx[static_cast<std::size_t>(t)] = static_cast<int>(slot_index(e.rect.interval(t)));
    const std::size_t flat = spec.cell_index(idx);
    acc[flat] += e.value * avg[flat];
  }
  for (int t = 0; t < spec.param_count(); ++t) haar_sweep_axis(spec, acc, t, false);
  return GridFunction(spec, std::move(acc));
}

std::string FullParaproductSymmetry::describe() const {
  const auto name = [](ParaSlot s) {
    switch (s) {
      case ParaSlot::FirstArg:
        return "f1";
      case ParaSlot::SecondArg:
        return "f2";
      case ParaSlot::Output:
        return "out";
    }
    return "?";
  };
  return std::string("h1:") + name(haar_slot_axis0) + ",h2:" + name(haar_slot_axis1);
}

std::array<FullParaproductSymmetry, 9> all_full_symmetries() {
  std::array<FullParaproductSymmetry, 9> out;
  const ParaSlot slots[3] = {ParaSlot::FirstArg, ParaSlot::SecondArg, ParaSlot::Output};
  std::size_t n = 0;
  for (ParaSlot s0 : slots)
    for (ParaSlot s1 : slots) out[n++] = FullParaproductSymmetry{s0, s1};
  return out;
}

namespace {

// Per-axis pairing table of one argument: Haar coefficients on the axes where
// this argument holds the cancellative slot, interval averages elsewhere. The
// slot index (1<<k)+j coincides in both layouts.
std::vector<double> argument_table(const GridFunction& f, const FullParaproductSymmetry& sym,
                                   ParaSlot me) {
  const GridSpec& spec = f.spec();
  std::vector<double> data(f.values().begin(), f.values().end());
  if (sym.haar_slot_axis0 == me)
    haar_sweep_axis(spec, data, 0, true);
  else
    avg_pyramid_axis(spec, data, 0);
  if (sym.haar_slot_axis1 == me)
    haar_sweep_axis(spec, data, 1, true);
  else
    avg_pyramid_axis(spec, data, 1);
  return data;
}

}  // namespace

GridFunction full_paraproduct(const CoefSequence& coefs, const GridFunction& f1,
                              const GridFunction& f2, const FullParaproductSymmetry& sym) {
  const GridSpec& spec = f1.spec();
  if (spec.param_count() != 2)
    throw std::invalid_argument("full_paraproduct: bi-parameter grids only");
  if (f2.spec() != spec || coefs.spec() != spec)
    throw std::invalid_argument("full_paraproduct: grid mismatch");
  const auto t1 = argument_table(f1, sym, ParaSlot::FirstArg);
  const auto t2 = argument_table(f2, sym, ParaSlot::SecondArg);
  std::vector<double> acc(spec.total_cells(), 0.0);
  for (const auto& e : coefs.entries()) {
    const std::size_t flat = spec.cell_index(
        {static_cast<int>(slot_index(e.rect.interval(0))),
         static_cast<int>(slot_index(e.rect.interval(1))), 0});
    acc[flat] += e.value * t1[flat] * t2[flat];
  }
  if (sym.haar_slot_axis0 == ParaSlot::Output)
    haar_sweep_axis(spec, acc, 0, false);
  else
    indicator_expand_axis(spec, acc, 0);
  if (sym.haar_slot_axis1 == ParaSlot::Output)
    haar_sweep_axis(spec, acc, 1, false);
  else
    indicator_expand_axis(spec, acc, 1);
  return GridFunction(spec, std::move(acc));
}

FullParaBoundReport full_paraproduct_bound_report(const CoefSequence& coefs, const Weight& w1,
                                                  const Weight& w2, double p, double q, double r,
                                                  const FullParaproductSymmetry& sym, int samples,
                                                  std::uint64_t seed) {
  const GridSpec& spec = coefs.spec();
  if (spec.param_count() != 2)
    throw std::invalid_argument("full_paraproduct_bound_report: bi-parameter grids only");
  if (!(p > 1.0) || !(q > 1.0) || !(r > 0.0) ||
      std::fabs(1.0 / r - 1.0 / p - 1.0 / q) > 1e-12)
    throw std::invalid_argument("full_paraproduct_bound_report: exponent mismatch");
  if (w1.spec() != spec || w2.spec() != spec)
    throw std::invalid_argument("full_paraproduct_bound_report: weight grid mismatch");

  GridFunction wv(spec, 0.0);
  for (std::size_t i = 0; i < wv.size(); ++i)
    wv[i] = std::pow(w1[i], r / p) * std::pow(w2[i], r / q);
  const Weight w{std::move(wv)};

  // normalise the sequence to unit product BMO norm
  CoefSequence a = coefs;
  const auto family = omega_family(spec, OmegaFamilySpec{OmegaStrategy::AllRectangles}, 0);
  const double anorm = bmo_prod(a, 2.0, family).norm;
  if (anorm > 0.0) a.scale(1.0 / anorm);

  FullParaBoundReport report;
  for (int s = 0; s < samples; ++s) {
    Rng rng(split_seed(seed, static_cast<std::uint64_t>(s)));
    GridFunction f1(spec, 0.0), f2(spec, 0.0);
    for (std::size_t i = 0; i < f1.size(); ++i) f1[i] = rng.uniform(-1.0, 1.0);
    for (std::size_t i = 0; i < f2.size(); ++i) f2[i] = rng.uniform(-1.0, 1.0);
    const double n1 = lp_norm(f1, NormParams{p, &w1});
    const double n2 = lp_norm(f2, NormParams{q, &w2});
    const double denom = n1 * n2;
    const GridFunction pi = full_paraproduct(a, f1, f2, sym);
    const double ratio = denom > 0.0 ? lp_norm(pi, NormParams{r, &w}) / denom : 0.0;

    const auto t1 = argument_table(f1, sym, ParaSlot::FirstArg);
    const auto t2 = argument_table(f2, sym, ParaSlot::SecondArg);
    double dual = 0.0;
    for (const auto& e : a.entries()) {
      const std::size_t flat = spec.cell_index(
          {static_cast<int>(slot_index(e.rect.interval(0))),
           static_cast<int>(slot_index(e.rect.interval(1))), 0});
      dual += std::fabs(e.value) * w.sums().average(e.rect) * std::fabs(t1[flat]) *
              std::fabs(t2[flat]);
    }
    report.ratios.push_back(ratio);
    report.dual_ratios.push_back(denom > 0.0 ? dual / denom : 0.0);
  }
  report.sup_ratio = 0.0;
  report.sup_dual_ratio = 0.0;
  for (double v : report.ratios) report.sup_ratio = std::max(report.sup_ratio, v);
  for (double v : report.dual_ratios) report.sup_dual_ratio = std::max(report.sup_dual_ratio, v);
  std::vector<double> sorted = report.ratios;
  std::sort(sorted.begin(), sorted.end());
  report.median_ratio = sorted.empty() ? 0.0 : sorted[sorted.size() / 2];
  return report;
}

PartialParaproductCoefs::PartialParaproductCoefs(const GridSpec& spec, int complexity_in,
                                                 int complexity_out)
    : spec_(spec),
      inner_spec_({1}),  // placeholder, rebuilt below
      i1_(complexity_in),
      j1_(complexity_out) {
  if (spec.param_count() != 3)
    throw std::invalid_argument("PartialParaproductCoefs: tri-parameter grids only");
  if (i1_ < 0 || j1_ < 0 || i1_ > spec.depth(0) - 1 || j1_ > spec.depth(0) - 1)
    throw std::domain_error("PartialParaproductCoefs: complexity exceeds depth");
  inner_spec_ = GridSpec({spec.depth(1), spec.depth(2)});
}

double PartialParaproductCoefs::normalization_bound(const Block& block) {
  return std::sqrt(block.fine_in.length() * block.fine_out.length()) / block.coarse.length();
}

void PartialParaproductCoefs::add_block(Block block) {
  const auto check_fine = [&](const DyadicInterval& fine, int rel) {
    if (fine.axis != 0 || block.coarse.axis != 0)
      throw std::invalid_argument("PartialParaproductCoefs: shift intervals live on axis 0");
    if (fine.scale != block.coarse.scale + rel || !block.coarse.contains(fine))
      throw std::invalid_argument("PartialParaproductCoefs: fine interval must sit at the stated depth below the coarse one");
    if (fine.scale >= spec_.depth(0))
      throw std::domain_error("PartialParaproductCoefs: fine interval at finest scale");
  };
  check_fine(block.fine_in, i1_);
  check_fine(block.fine_out, j1_);
  if (block.inner.spec() != inner_spec_)
    throw std::invalid_argument("PartialParaproductCoefs: inner sequence grid mismatch");
  blocks_.push_back(std::move(block));
}

bool check_partial_normalization(const PartialParaproductCoefs& coefs,
                                 std::span<const OmegaSet> inner_family, double slack) {
  for (const auto& block : coefs.blocks()) {
    const double bound = PartialParaproductCoefs::normalization_bound(block);
    const double norm = bmo_prod(block.inner, 2.0, inner_family).norm;
    if (norm > bound * slack) return false;
  }
  return true;
}

GridFunction partial_paraproduct(const PartialParaproductCoefs& coefs, const GridFunction& f) {
  const GridSpec& spec = coefs.spec();
  if (f.spec() != spec) throw std::invalid_argument("partial_paraproduct: grid mismatch");
  std::vector<double> table(f.values().begin(), f.values().end());
  haar_sweep_axis(spec, table, 0, true);
  haar_sweep_axis(spec, table, 1, true);
  avg_pyramid_axis(spec, table, 2);

  std::vector<double> acc(spec.total_cells(), 0.0);
  for (const auto& block : coefs.blocks()) {
    const int in0 = static_cast<int>(slot_index(block.fine_in));
    const int out0 = static_cast<int>(slot_index(block.fine_out));
    for (const auto& e : block.inner.entries()) {
      const int mid = static_cast<int>(slot_index(e.rect.interval(0)));
      const int last = static_cast<int>(slot_index(e.rect.interval(1)));
      const double c = e.value * table[spec.cell_index({in0, mid, last})];
      acc[spec.cell_index({out0, mid, last})] += c;
    }
  }
  haar_sweep_axis(spec, acc, 0, false);
  indicator_expand_axis(spec, acc, 1);
  haar_sweep_axis(spec, acc, 2, false);
  return GridFunction(spec, std::move(acc));
}

PartialParaproductCoefs generate_partial_coefs(const GridSpec& spec, int complexity_in,
                                               int complexity_out, int block_count,
                                               std::uint64_t seed) {
  PartialParaproductCoefs out(spec, complexity_in, complexity_out);
  if (block_count == 0) return out;
  if (block_count < 0) throw std::invalid_argument("generate_partial_coefs: negative block count");
  const int max_rel = std::max(complexity_in, complexity_out);
  std::vector<DyadicInterval> coarse_candidates;
  for (int k = 0; k + max_rel <= spec.depth(0) - 1; ++k)
    for (int j = 0; j < (1 << k); ++j) coarse_candidates.push_back({0, k, j});
  if (coarse_candidates.empty())
    throw std::domain_error("generate_partial_coefs: complexity exceeds depth");

  const GridSpec inner = out.inner_spec();
  const auto inner_rects = enumerate_cancellative_rectangles(inner);
  const auto inner_family = omega_family(inner, OmegaFamilySpec{OmegaStrategy::AllRectangles}, 0);

  std::vector<std::array<int, 6>> taken;
  for (int bi = 0; bi < block_count; ++bi) {
    Rng rng(split_seed(seed, static_cast<std::uint64_t>(bi)));
    DyadicInterval k1{}, i1{}, j1{};
    std::array<int, 6> key{};
    for (int attempt = 0;; ++attempt) {
      k1 = coarse_candidates[rng.below(coarse_candidates.size())];
      i1 = {0, k1.scale + complexity_in,
            (k1.pos << complexity_in) + static_cast<int>(rng.below(static_cast<std::uint64_t>(1) << complexity_in))};
      j1 = {0, k1.scale + complexity_out,
            (k1.pos << complexity_out) + static_cast<int>(rng.below(static_cast<std::uint64_t>(1) << complexity_out))};
      key = {k1.scale, k1.pos, i1.scale, i1.pos, j1.scale, j1.pos};
      if (std::find(taken.begin(), taken.end(), key) == taken.end()) break;
      if (attempt > 200)
        throw std::invalid_argument("generate_partial_coefs: block count exceeds distinct shift triples");
    }
    taken.push_back(key);

    CoefSequence seq(inner);
    const std::size_t support = std::min<std::size_t>(6, inner_rects.size());
    std::vector<std::size_t> chosen;
    while (chosen.size() < support) {
      const std::size_t pick = rng.below(inner_rects.size());
      if (std::find(chosen.begin(), chosen.end(), pick) == chosen.end()) chosen.push_back(pick);
    }
    for (std::size_t pick : chosen) {
      const double mag = rng.uniform(0.3, 1.0);
      seq.set(inner_rects[pick], rng.coin() ? mag : -mag);
    }
    const double norm = bmo_prod(seq, 2.0, inner_family).norm;
    PartialParaproductCoefs::Block block{k1, i1, j1, std::move(seq)};
    const double target = PartialParaproductCoefs::normalization_bound(block) * rng.uniform(0.5, 1.0);
    if (norm > 0.0) block.inner.scale(target / norm);
    out.add_block(std::move(block));
  }
  return out;
}

namespace {
void require_distinct_axes(const GridSpec& spec, int a, int b) {
  if (a < 0 || b < 0 || a >= spec.param_count() || b >= spec.param_count() || a == b)
    throw std::invalid_argument("paraproducts: need two distinct axes on the grid");
}

std::vector<GridFunction> scale_pyramid(const GridFunction& f, int axis) {
  std::vector<GridFunction> levels;
  levels.reserve(static_cast<std::size_t>(f.spec().depth(axis)) + 1);
  for (int k = 0; k <= f.spec().depth(axis); ++k)
    levels.push_back(axis_scale_average(f, axis, k));
  return levels;
}
}  // namespace

GridFunction aij(const GridFunction& b, const GridFunction& f, int axis, PairKind kind) {
  const GridSpec& spec = b.spec();
  if (f.spec() != spec) throw std::invalid_argument("aij: grid mismatch");
  if (axis < 0 || axis >= spec.param_count()) throw std::invalid_argument("aij: axis out of range");
  const auto eb = scale_pyramid(b, axis);
  const auto ef = scale_pyramid(f, axis);
  GridFunction out(spec, 0.0);
  const int depth = spec.depth(axis);
  for (int k = 0; k < depth; ++k) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double db = eb[static_cast<std::size_t>(k) + 1][i] - eb[static_cast<std::size_t>(k)][i];
      const double df = ef[static_cast<std::size_t>(k) + 1][i] - ef[static_cast<std::size_t>(k)][i];
      switch (kind) {
        case PairKind::DiffDiff:
          out[i] += db * df;
          break;
        case PairKind::DiffAvg:
          out[i] += db * ef[static_cast<std::size_t>(k)][i];
          break;
        case PairKind::AvgDiff:
          out[i] += eb[static_cast<std::size_t>(k)][i] * df;
          break;
      }
    }
  }
  return out;
}

GridFunction aij2(const GridFunction& b, const GridFunction& f, int axis1, PairKind kind1,
                  int axis2, PairKind kind2) {
  const GridSpec& spec = b.spec();
  if (f.spec() != spec) throw std::invalid_argument("aij2: grid mismatch");
  require_distinct_axes(spec, axis1, axis2);
  const auto eb = scale_pyramid(b, axis2);
  const auto ef = scale_pyramid(f, axis2);
  GridFunction out(spec, 0.0);
  const int depth = spec.depth(axis2);
  for (int k = 0; k < depth; ++k) {
    GridFunction b2 = eb[static_cast<std::size_t>(k) + 1];
    GridFunction f2 = ef[static_cast<std::size_t>(k) + 1];
    // pick the axis2 operator pair for this kind
    if (kind2 == PairKind::DiffDiff || kind2 == PairKind::DiffAvg)
      b2 -= eb[static_cast<std::size_t>(k)];  // martingale difference acting on b
    else
      b2 = eb[static_cast<std::size_t>(k)];  // averaging
    if (kind2 == PairKind::DiffDiff || kind2 == PairKind::AvgDiff)
      f2 -= ef[static_cast<std::size_t>(k)];
    else
      f2 = ef[static_cast<std::size_t>(k)];
    out += aij(b2, f2, axis1, kind1);
  }
  return out;
}

GridFunction pair_coarse_correction(const GridFunction& b, const GridFunction& f, int axis1,
                                    int axis2) {
  const GridSpec& spec = b.spec();
  if (f.spec() != spec) throw std::invalid_argument("pair_coarse_correction: grid mismatch");
  require_distinct_axes(spec, axis1, axis2);
  const GridFunction gb = axis_scale_average(b, axis1, 0);
  const GridFunction gf = axis_scale_average(f, axis1, 0);
  const GridFunction hb = axis_scale_average(b, axis2, 0);
  const GridFunction hf = axis_scale_average(f, axis2, 0);
  GridFunction out(spec, 0.0);
  for (PairKind kind : {PairKind::DiffDiff, PairKind::DiffAvg, PairKind::AvgDiff}) {
    out += aij(gb, gf, axis2, kind);
    out += aij(hb, hf, axis1, kind);
  }
  const GridFunction ghb = axis_scale_average(gb, axis2, 0);
  const GridFunction ghf = axis_scale_average(gf, axis2, 0);
  out += GridFunction::product(ghb, ghf);
  return out;
}

GridFunction operator_u(const GridFunction& g, const Weight& nu) {
  const GridSpec& spec = g.spec();
  if (spec.param_count() != 3) throw std::invalid_argument("operator_u: tri-parameter grids only");
  if (nu.spec() != spec) throw std::invalid_argument("operator_u: grid mismatch");
  std::vector<double> table(g.values().begin(), g.values().end());
  haar_sweep_axis(spec, table, 0, true);
  haar_sweep_axis(spec, table, 2, true);

  const GridSpec mid({spec.depth(1)});
  const int n0 = spec.axis_cells(0), n1 = spec.axis_cells(1), n2 = spec.axis_cells(2);
  const double width1 = 1.0 / static_cast<double>(n1);
  std::vector<double> acc(spec.total_cells(), 0.0);
  for (int a0 = 1; a0 < n0; ++a0) {
    const DyadicInterval v1 = HaarCoefficients::axis_interval(0, a0);
    for (int a2 = 1; a2 < n2; ++a2) {
      const DyadicInterval v3 = HaarCoefficients::axis_interval(2, a2);
      GridFunction line(mid, 0.0);
      for (int x = 0; x < n1; ++x) line[static_cast<std::size_t>(x)] = table[spec.cell_index({a0, x, a2})];
      const GridFunction sq = square_function(line, SquareMode::full(1));
      const int lo0 = v1.first_cell(spec.depth(0)), c0 = v1.cell_count(spec.depth(0));
      const int lo2 = v3.first_cell(spec.depth(2)), c2 = v3.cell_count(spec.depth(2));
      const double denom = v1.length() * v3.length() * width1;
      for (int x = 0; x < n1; ++x) {
        const double nu_box =
            nu.sums().box_integral({lo0, x, lo2}, {lo0 + c0, x + 1, lo2 + c2});
        acc[spec.cell_index({a0, x, a2})] =
            sq[static_cast<std::size_t>(x)] * nu_box / denom;
      }
    }
  }
  haar_sweep_axis(spec, acc, 0, false);
  haar_sweep_axis(spec, acc, 2, false);
  return GridFunction(spec, std::move(acc));
}

}  // namespace dyadic
