#include "dyadic/commutators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "dyadic/bmo.hpp"
#include "dyadic/haar.hpp"
#include "dyadic/maximal_square.hpp"

namespace dyadic {

namespace {

std::size_t slot_index(const DyadicInterval& iv) {
  return (static_cast<std::size_t>(1) << iv.scale) + static_cast<std::size_t>(iv.pos);
}

// shared transforms of the argument function: pairing tables for
// <f, h_{I1} x h_{K2} x 1_{K3}/|K3|> and the axis-(0,1) partial pairings.
struct ArgumentTables {
  std::vector<double> pair12;      // haar axes 0,1; cells on axis 2
  std::vector<double> pair_full;   // haar axes 0,1; interval averages on axis 2
};

void run_avg_pyramid(const GridSpec& spec, std::vector<double>& data, int axis) {
  // interval averages along `axis`, slot layout (1<<k)+j, slot 0 zeroed
  const std::size_t n = static_cast<std::size_t>(spec.axis_cells(axis));
  const std::size_t step = spec.stride(axis);
  const std::size_t lines = spec.total_cells() / n;
  const int depth = spec.depth(axis);
  std::vector<double> cur(n), out(n, 0.0);
  for (std::size_t li = 0; li < lines; ++li) {
    const std::size_t base = (li / step) * (n * step) + (li % step);
    for (std::size_t i = 0; i < n; ++i) cur[i] = data[base + i * step];
    std::fill(out.begin(), out.end(), 0.0);
    std::size_t width = n;
    for (int k = depth - 1; k >= 0; --k) {
      width /= 2;
      for (std::size_t j = 0; j < width; ++j) cur[j] = 0.5 * (cur[2 * j] + cur[2 * j + 1]);
      for (std::size_t j = 0; j < width; ++j) out[(static_cast<std::size_t>(1) << k) + j] = cur[j];
    }
    for (std::size_t i = 0; i < n; ++i) data[base + i * step] = out[i];
  }
}

void run_indicator_expand(const GridSpec& spec, std::vector<double>& data, int axis) {
  const std::size_t n = static_cast<std::size_t>(spec.axis_cells(axis));
  const std::size_t step = spec.stride(axis);
  const std::size_t lines = spec.total_cells() / n;
  const int depth = spec.depth(axis);
  std::vector<double> buf(n), out(n);
  for (std::size_t li = 0; li < lines; ++li) {
    const std::size_t base = (li / step) * (n * step) + (li % step);
    for (std::size_t i = 0; i < n; ++i) buf[i] = data[base + i * step];
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int k = 0; k < depth; ++k)
        acc += buf[(static_cast<std::size_t>(1) << k) + (i >> (depth - k))] *
               static_cast<double>(1 << k);
      out[i] = acc;
    }
    for (std::size_t i = 0; i < n; ++i) data[base + i * step] = out[i];
  }
}

ArgumentTables argument_tables(const GridFunction& f) {
  const GridSpec& spec = f.spec();
  ArgumentTables t;
  t.pair12.assign(f.values().begin(), f.values().end());
  haar_sweep_axis(spec, t.pair12, 0, true);
  haar_sweep_axis(spec, t.pair12, 1, true);
  t.pair_full = t.pair12;
  run_avg_pyramid(spec, t.pair_full, 2);
  return t;
}

DyadicInterval on_axis(const DyadicInterval& iv, int axis) { return {axis, iv.scale, iv.pos}; }

DyadicRectangle triple_rect(const DyadicInterval& i0, const DyadicInterval& i1,
                            const DyadicInterval& i2) {
  return DyadicRectangle(on_axis(i0, 0), on_axis(i1, 1), on_axis(i2, 2));
}

}  // namespace

GridFunction commutator(const GridFunction& b, const PartialParaproductCoefs& coefs,
                        const GridFunction& f) {
  const GridFunction pf = partial_paraproduct(coefs, f);
  const GridFunction bf = GridFunction::product(b, f);
  GridFunction out = GridFunction::product(b, pf);
  out -= partial_paraproduct(coefs, bf);
  return out;
}

GridFunction e1_term(const GridFunction& b, const PartialParaproductCoefs& coefs,
                     const GridFunction& f, bool mirror) {
  const GridSpec& spec = coefs.spec();
  const auto tables = argument_tables(f);
  const CellSums bsums(b);
  std::vector<double> acc(spec.total_cells(), 0.0);
  for (const auto& block : coefs.blocks()) {
    const DyadicInterval& shift_iv = mirror ? block.fine_out : block.fine_in;
    const int in0 = static_cast<int>(slot_index(block.fine_in));
    const int out0 = static_cast<int>(slot_index(block.fine_out));
    for (const auto& e : block.inner.entries()) {
      const DyadicInterval k2 = e.rect.interval(0);
      const DyadicInterval k3 = e.rect.interval(1);
      const double fine_avg = bsums.average(triple_rect(shift_iv, k2, k3));
      const double coarse_avg = bsums.average(triple_rect(block.coarse, k2, k3));
      const double fpair = tables.pair_full[spec.cell_index(
          {in0, static_cast<int>(slot_index(k2)), static_cast<int>(slot_index(k3))})];
      acc[spec.cell_index({out0, static_cast<int>(slot_index(k2)),
                           static_cast<int>(slot_index(k3))})] +=
          e.value * (fine_avg - coarse_avg) * fpair;
    }
  }
  haar_sweep_axis(spec, acc, 0, false);
  run_indicator_expand(spec, acc, 1);
  haar_sweep_axis(spec, acc, 2, false);
  return GridFunction(spec, std::move(acc));
}

GridFunction e2_term(const GridFunction& b, const PartialParaproductCoefs& coefs,
                     const GridFunction& f, bool mirror) {
  const GridSpec& spec = coefs.spec();
  const auto tables = argument_tables(f);
  const CellSums bsums(b);
  const int n1 = spec.axis_cells(1);
  const int n2 = spec.axis_cells(2);
  const double width1 = 1.0 / static_cast<double>(n1);
  const double width2 = 1.0 / static_cast<double>(n2);
  std::vector<double> acc(spec.total_cells(), 0.0);

  for (const auto& block : coefs.blocks()) {
    const int in0 = static_cast<int>(slot_index(block.fine_in));
    const int out0 = static_cast<int>(slot_index(block.fine_out));
    const DyadicInterval j1 = block.fine_out;
    const DyadicInterval i1 = block.fine_in;
    for (const auto& e : block.inner.entries()) {
      const DyadicInterval k2 = e.rect.interval(0);
      const DyadicInterval k3 = e.rect.interval(1);
      const int s2 = static_cast<int>(slot_index(k2));
      const int s3 = static_cast<int>(slot_index(k3));
      if (!mirror) {
        // <b>^{1,3}_{J1 x K3}(x2) - <b>_{J1 x K2 x K3}, emitted inside 1_{K2}/|K2|
        const double full_avg = bsums.average(triple_rect(j1, k2, k3));
        const double fpair = tables.pair_full[spec.cell_index({in0, s2, s3})];
        const int lo0 = j1.first_cell(spec.depth(0)), c0 = j1.cell_count(spec.depth(0));
        const int lo2v = k3.first_cell(spec.depth(2)), c2 = k3.cell_count(spec.depth(2));
        const int lo1 = k2.first_cell(spec.depth(1)), c1 = k2.cell_count(spec.depth(1));
        const double inv_area = 1.0 / (j1.length() * k3.length() * width1);
        const double inv_k2 = 1.0 / k2.length();
        for (int x = 0; x < c1; ++x) {
          const double slice_avg =
              bsums.box_integral({lo0, lo1 + x, lo2v}, {lo0 + c0, lo1 + x + 1, lo2v + c2}) *
              inv_area;
          acc[spec.cell_index({out0, lo1 + x, s3})] +=
              e.value * fpair * (slice_avg - full_avg) * inv_k2;
        }
      } else {
        // < [<b>^{1,2}_{I1 x K2}(x3) - <b>_{I1 x K2 x K3}] <f, h_{I1} x h_{K2}>_{1,2} >_{K3}
        const double full_avg = bsums.average(triple_rect(i1, k2, k3));
        const int lo0 = i1.first_cell(spec.depth(0)), c0 = i1.cell_count(spec.depth(0));
        const int lo1 = k2.first_cell(spec.depth(1)), c1 = k2.cell_count(spec.depth(1));
        const int lo2v = k3.first_cell(spec.depth(2)), c2 = k3.cell_count(spec.depth(2));
        const double inv_area = 1.0 / (i1.length() * k2.length() * width2);
        double inner = 0.0;
        for (int x = 0; x < c2; ++x) {
          const double slice_avg =
              bsums.box_integral({lo0, lo1, lo2v + x}, {lo0 + c0, lo1 + c1, lo2v + x + 1}) *
              inv_area;
          inner += (slice_avg - full_avg) *
                   tables.pair12[spec.cell_index({in0, s2, lo2v + x})];
        }
        inner /= static_cast<double>(c2);
        acc[spec.cell_index({out0, s2, s3})] += e.value * inner;
      }
    }
  }
  haar_sweep_axis(spec, acc, 0, false);
  if (!mirror) {
    // axis 1 already sits in the cell domain
    haar_sweep_axis(spec, acc, 2, false);
  } else {
    run_indicator_expand(spec, acc, 1);
    haar_sweep_axis(spec, acc, 2, false);
  }
  return GridFunction(spec, std::move(acc));
}

GridFunction CommutatorDecomposition::sum() const {
  if (terms.empty()) throw std::logic_error("CommutatorDecomposition: no terms");
  GridFunction out(terms.front().second.spec(), 0.0);
  for (const auto& [name, term] : terms) out += term;
  return out;
}

const GridFunction* CommutatorDecomposition::find(std::string_view name) const {
  for (const auto& [n, term] : terms)
    if (n == name) return &term;
  return nullptr;
}

CommutatorDecomposition decompose(const GridFunction& b, const PartialParaproductCoefs& coefs,
                                  const GridFunction& f) {
  const GridSpec& spec = coefs.spec();
  if (b.spec() != spec || f.spec() != spec) throw std::invalid_argument("decompose: grid mismatch");
  CommutatorDecomposition out;
  const GridFunction pf = partial_paraproduct(coefs, f);
  const PairKind kinds[3] = {PairKind::DiffDiff, PairKind::DiffAvg, PairKind::AvgDiff};

  for (int j1 = 1; j1 <= 3; ++j1)
    for (int j2 = 1; j2 <= 3; ++j2) {
      if (j1 == 3 && j2 == 3) continue;
      out.terms.emplace_back(
          "A13_" + std::to_string(j1) + std::to_string(j2),
          aij2(b, pf, 0, kinds[j1 - 1], 2, kinds[j2 - 1]));
    }
  for (int j1 = 1; j1 <= 3; ++j1)
    for (int j2 = 1; j2 <= 3; ++j2) {
      if (j1 == 3 && j2 == 3) continue;
      GridFunction term =
          partial_paraproduct(coefs, aij2(b, f, 0, kinds[j1 - 1], 1, kinds[j2 - 1]));
      term *= -1.0;
      out.terms.emplace_back("PA12_" + std::to_string(j1) + std::to_string(j2), std::move(term));
    }

  GridFunction e1 = e1_term(b, coefs, f, false);
  e1 *= -1.0;
  out.terms.emplace_back("E1", std::move(e1));
  out.terms.emplace_back("E1m", e1_term(b, coefs, f, true));
  out.terms.emplace_back("E2", e2_term(b, coefs, f, false));
  GridFunction e2m = e2_term(b, coefs, f, true);
  e2m *= -1.0;
  out.terms.emplace_back("E2m", std::move(e2m));

  GridFunction coarse = pair_coarse_correction(b, pf, 0, 2);
  coarse -= partial_paraproduct(coefs, pair_coarse_correction(b, f, 0, 1));
  out.terms.emplace_back("coarse", std::move(coarse));
  return out;
}

std::pair<double, double> e1_dual_bound(const GridFunction& b,
                                        const PartialParaproductCoefs& coefs,
                                        const GridFunction& f, const GridFunction& g,
                                        const Weight& nu) {
  const GridSpec& spec = coefs.spec();
  if (b.spec() != spec || f.spec() != spec || g.spec() != spec || nu.spec() != spec)
    throw std::invalid_argument("e1_dual_bound: grid mismatch");
  const int complexity = coefs.complexity_in();
  if (complexity == 0 || coefs.blocks().empty()) return {0.0, 0.0};

  const auto ftab = argument_tables(f);
  // g pairings <g, h_{J1} x 1_{K2}/|K2| x h_{K3}>
  std::vector<double> gtab(g.values().begin(), g.values().end());
  haar_sweep_axis(spec, gtab, 0, true);
  haar_sweep_axis(spec, gtab, 2, true);
  run_avg_pyramid(spec, gtab, 1);

  // axis-0 Haar pairings of b, |.|, per needed ancestor interval
  std::vector<double> btab(b.values().begin(), b.values().end());
  haar_sweep_axis(spec, btab, 0, true);
  const GridSpec inner({spec.depth(1), spec.depth(2)});
  std::map<int, CellSums> abs_pairings;  // L1 slot -> prefix sums of |<b,h_{L1}>_1|
  const auto abs_pairing_sums = [&](int slot) -> const CellSums& {
    auto it = abs_pairings.find(slot);
    if (it != abs_pairings.end()) return it->second;
    std::vector<double> vals(inner.total_cells());
    for (int x1 = 0; x1 < spec.axis_cells(1); ++x1)
      for (int x2 = 0; x2 < spec.axis_cells(2); ++x2)
        vals[inner.cell_index({x1, x2, 0})] =
            std::fabs(btab[spec.cell_index({slot, x1, x2})]);
    return abs_pairings.emplace(slot, CellSums(inner, vals)).first->second;
  };

  const double vol = spec.cell_volume();
  double lhs = 0.0;
  double rhs = 0.0;
  for (int l = 1; l <= complexity; ++l) {
    // brackets keyed by the ancestor interval L1 (which fixes K1)
    std::map<int, std::vector<double>> brackets;
    for (const auto& block : coefs.blocks()) {
      const DyadicInterval l1 = block.fine_in.ancestor(l);
      const int l1slot = static_cast<int>(slot_index(l1));
      const int in0 = static_cast<int>(slot_index(block.fine_in));
      const int out0 = static_cast<int>(slot_index(block.fine_out));
      auto& bracket = brackets
                          .emplace(l1slot, std::vector<double>())
                          .first->second;
      if (bracket.empty()) bracket.assign(inner.total_cells(), 0.0);
      const double inv_len = 1.0 / std::sqrt(l1.length());  // |L1|^{-1/2}
      for (const auto& e : block.inner.entries()) {
        const DyadicInterval k2 = e.rect.interval(0);
        const DyadicInterval k3 = e.rect.interval(1);
        const int s2 = static_cast<int>(slot_index(k2));
        const int s3 = static_cast<int>(slot_index(k3));
        const double fpair = std::fabs(ftab.pair_full[spec.cell_index({in0, s2, s3})]);
        const double gpair = std::fabs(gtab[spec.cell_index({out0, s2, s3})]);
        const double weight = std::fabs(e.value) * fpair * gpair;
        if (weight == 0.0) continue;
        const DyadicRectangle inner_rect(on_axis(k2, 0), on_axis(k3, 1));
        lhs += weight * inv_len * abs_pairing_sums(l1slot).average(inner_rect);
        // scatter 1_{K2}/|K2| 1_{K3}/|K3| into the bracket
        const int lo1 = k2.first_cell(inner.depth(0)), c1 = k2.cell_count(inner.depth(0));
        const int lo2 = k3.first_cell(inner.depth(1)), c2 = k3.cell_count(inner.depth(1));
        const double dens = weight / (k2.length() * k3.length());
        for (int x = 0; x < c1; ++x)
          for (int y = 0; y < c2; ++y) bracket[inner.cell_index({lo1 + x, lo2 + y, 0})] += dens;
      }
    }
    // rhs integrand: sqrt( sum_{L1 containing x1} bracket^2 / |L1|^2 ) nu
    for (int x0 = 0; x0 < spec.axis_cells(0); ++x0) {
      std::vector<const std::vector<double>*> active;
      std::vector<double> inv_meas2;
      for (const auto& [slot, bracket] : brackets) {
        const DyadicInterval l1 = HaarCoefficients::axis_interval(0, slot);
        const int lo = l1.first_cell(spec.depth(0));
        const int hi = lo + l1.cell_count(spec.depth(0));
        if (x0 >= lo && x0 < hi) {
          active.push_back(&bracket);
          const double inv = 1.0 / l1.length();
          inv_meas2.push_back(inv * inv);
        }
      }
      if (active.empty()) continue;
      for (std::size_t ic = 0; ic < inner.total_cells(); ++ic) {
        double s = 0.0;
        for (std::size_t a = 0; a < active.size(); ++a) {
          const double v = (*active[a])[ic];
          s += v * v * inv_meas2[a];
        }
        if (s == 0.0) continue;
        const auto c = inner.cell_coords(ic);
        const std::size_t full = spec.cell_index({x0, c[0], c[1]});
        rhs += std::sqrt(s) * nu[full] * vol;
      }
    }
  }
  return {lhs, rhs};
}

std::pair<double, double> lemma52_sides(const Lemma52Instance& instance, const Weight& w,
                                        double p, double q) {
  if (!(p > 0.0) || !(q > 0.0)) throw std::invalid_argument("lemma52_sides: exponents must be positive");
  const GridSpec& spec = w.spec();
  if (spec.param_count() != 2) throw std::invalid_argument("lemma52_sides: bi-parameter grids only");
  const auto family = omega_family(spec, OmegaFamilySpec{OmegaStrategy::AllRectangles}, 0);

  GridFunction lhs_acc(spec, 0.0), rhs_acc(spec, 0.0);
  for (const auto& group : instance.groups) {
    GridFunction lhs_j(spec, 0.0), rhs_j(spec, 0.0);
    for (const auto& item : group) {
      if (item.coefs.spec() != spec || item.f.spec() != spec || item.g.spec() != spec)
        throw std::invalid_argument("lemma52_sides: grid mismatch");
      if (bmo_prod(item.coefs, 2.0, family).norm > 1.0 + 1e-9)
        throw std::invalid_argument("lemma52_sides: inner sequence violates the unit BMO normalisation");

      // pairing tables
      std::vector<double> fpair(item.f.values().begin(), item.f.values().end());
      haar_sweep_axis(spec, fpair, 0, true);
      run_avg_pyramid(spec, fpair, 1);
      std::vector<double> gpair(item.g.values().begin(), item.g.values().end());
      run_avg_pyramid(spec, gpair, 0);
      haar_sweep_axis(spec, gpair, 1, true);

      // rhs factor tables: averaged absolute partial pairings
      std::vector<double> fbar(item.f.values().begin(), item.f.values().end());
      haar_sweep_axis(spec, fbar, 0, true);
      for (double& v : fbar) v = std::fabs(v);
      run_avg_pyramid(spec, fbar, 1);
      std::vector<double> gbar(item.g.values().begin(), item.g.values().end());
      haar_sweep_axis(spec, gbar, 1, true);
      for (double& v : gbar) v = std::fabs(v);
      run_avg_pyramid(spec, gbar, 0);

      GridFunction rhs_k2(spec, 0.0);
      for (const auto& e : item.coefs.entries()) {
        const DyadicInterval k2 = e.rect.interval(0);
        const DyadicInterval k3 = e.rect.interval(1);
        const std::size_t flat = spec.cell_index(
            {static_cast<int>(slot_index(k2)), static_cast<int>(slot_index(k3)), 0});
        const double inv_meas = 1.0 / (k2.length() * k3.length());
        const int lo0 = k2.first_cell(spec.depth(0)), c0 = k2.cell_count(spec.depth(0));
        const int lo1 = k3.first_cell(spec.depth(1)), c1 = k3.cell_count(spec.depth(1));
        const double lhs_dens = std::fabs(e.value) * std::fabs(fpair[flat]) *
                                std::fabs(gpair[flat]) * inv_meas;
        const double fb = fbar[flat], gb = gbar[flat];
        const double rhs_dens = fb * fb * gb * gb * inv_meas;
        for (int x = 0; x < c0; ++x)
          for (int y = 0; y < c1; ++y) {
            const std::size_t ci = spec.cell_index({lo0 + x, lo1 + y, 0});
            lhs_j[ci] += lhs_dens;
            rhs_k2[ci] += rhs_dens;
          }
      }
      for (std::size_t i = 0; i < rhs_j.size(); ++i) rhs_j[i] += std::sqrt(rhs_k2[i]);
    }
    for (std::size_t i = 0; i < lhs_acc.size(); ++i) {
      lhs_acc[i] += std::pow(lhs_j[i], p);
      rhs_acc[i] += std::pow(rhs_j[i], p);
    }
  }
  const double vol = spec.cell_volume();
  double lhs = 0.0, rhs = 0.0;
  const double qp = q / p;
  for (std::size_t i = 0; i < lhs_acc.size(); ++i) {
    if (lhs_acc[i] > 0.0) lhs += std::pow(lhs_acc[i], qp) * w[i] * vol;
    if (rhs_acc[i] > 0.0) rhs += std::pow(rhs_acc[i], qp) * w[i] * vol;
  }
  return {lhs, rhs};
}

double bloom_ratio(const GridFunction& b, const PartialParaproductCoefs& coefs,
                   const GridFunction& f, const Weight& mu, const Weight& lambda, double p) {
  const BloomWeight bloom = bloom_nu(mu, lambda, p);
  const double bnorm = little_bmo_bloom(b, bloom.nu);
  const double fnorm = lp_norm(f, NormParams{p, &mu});
  const double denom = bnorm * fnorm;
  if (denom < 1e-14) throw std::domain_error("bloom_ratio: degenerate instance (zero denominator)");
  const double num = lp_norm(commutator(b, coefs, f), NormParams{p, &lambda});
  return num / denom;
}

}  // namespace dyadic
