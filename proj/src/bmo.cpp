#include "dyadic/bmo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dyadic/haar.hpp"
#include "dyadic/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dyadic {

std::uint64_t CoefSequence::rect_key(const GridSpec& spec, const DyadicRectangle& rect) {
  std::uint64_t key = 0;
  for (int t = 0; t < spec.param_count(); ++t) {
    const auto& iv = rect.interval(t);
    key = (key << 21) | static_cast<std::uint64_t>((1 << iv.scale) + iv.pos);
  }
  return key;
}

void CoefSequence::set(const DyadicRectangle& rect, double value) {
  if (rect.param_count() != spec_.param_count())
    throw std::invalid_argument("CoefSequence: rectangle/grid mismatch");
  for (int t = 0; t < spec_.param_count(); ++t) {
    const auto& iv = rect.interval(t);
    if (iv.scale < 0 || iv.scale >= spec_.depth(t) || iv.pos < 0 || iv.pos >= (1 << iv.scale))
      throw std::invalid_argument("CoefSequence: rectangle not fully cancellative on the grid");
  }
  const std::uint64_t key = rect_key(spec_, rect);
  const auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  const std::size_t pos = static_cast<std::size_t>(it - keys_.begin());
  if (it != keys_.end() && *it == key) {
    entries_[pos].value = value;
    return;
  }
  keys_.insert(it, key);
  entries_.insert(entries_.begin() + static_cast<std::ptrdiff_t>(pos), Entry{rect, value});
}

double CoefSequence::at(const DyadicRectangle& rect) const {
  const std::uint64_t key = rect_key(spec_, rect);
  const auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  if (it == keys_.end() || *it != key) return 0.0;
  return entries_[static_cast<std::size_t>(it - keys_.begin())].value;
}

namespace {

struct EntryGeom {
  std::array<int, 3> lo{0, 0, 0};
  std::array<int, 3> n{1, 1, 1};
  double a2 = 0.0;
  double inv_measure = 1.0;
  double wavg = 1.0;  // <w>_R when a weight is present
};

std::vector<EntryGeom> entry_geometry(const CoefSequence& coefs, const Weight* w) {
  const GridSpec& spec = coefs.spec();
  std::vector<EntryGeom> out;
  out.reserve(coefs.size());
  for (const auto& e : coefs.entries()) {
    EntryGeom g;
    for (int t = 0; t < spec.param_count(); ++t) {
      g.lo[static_cast<std::size_t>(t)] = e.rect.interval(t).first_cell(spec.depth(t));
      g.n[static_cast<std::size_t>(t)] = e.rect.interval(t).cell_count(spec.depth(t));
    }
    g.a2 = e.value * e.value;
    g.inv_measure = 1.0 / e.rect.measure();
    if (w) g.wavg = w->sums().average(e.rect);
    out.push_back(g);
  }
  return out;
}

void scatter_square(const GridSpec& spec, const EntryGeom& g, std::vector<double>& s2) {
  const double add = g.a2 * g.inv_measure;
  for (int a = 0; a < g.n[0]; ++a)
    for (int b = 0; b < g.n[1]; ++b)
      for (int c = 0; c < g.n[2]; ++c)
        s2[spec.cell_index({g.lo[0] + a, g.lo[1] + b, g.lo[2] + c})] += add;
}

double integrate_power(const GridSpec& spec, std::span<const double> s2, double half_p,
                       const Weight* w) {
  // integral of (s2)^{p/2} (w) over the grid
  double acc = 0.0;
  for (std::size_t i = 0; i < s2.size(); ++i) {
    const double v = s2[i];
    if (v == 0.0) continue;
    double vp;
    if (half_p == 0.5)
      vp = std::sqrt(v);
    else if (half_p == 1.0)
      vp = v;
    else if (half_p == 2.0)
      vp = v * v;
    else
      vp = std::pow(v, half_p);
    acc += vp * (w ? (*w)[i] : 1.0);
  }
  return acc * spec.cell_volume();
}

enum class BmoKind { Plain, WeightMeasured, WeightNormalised };

std::vector<double> bmo_family_values(const CoefSequence& coefs, double p, const Weight* w,
                                      BmoKind kind, std::span<const OmegaSet> family) {
  const GridSpec& spec = coefs.spec();
  if (family.empty()) throw std::invalid_argument("bmo: empty Omega family");
  if (!(p > 0.0)) throw std::invalid_argument("bmo: p must be positive");
  for (const auto& omega : family)
    if (omega.spec() != spec) throw std::invalid_argument("bmo: Omega family grid mismatch");
  if (w && w->spec() != spec) throw std::invalid_argument("bmo: weight grid mismatch");

  const auto geom = entry_geometry(coefs, w);
  const auto entries = coefs.entries();
  std::vector<double> values(family.size(), 0.0);
  const bool closed_form =
      kind == BmoKind::WeightNormalised || (p == 2.0 && kind != BmoKind::WeightNormalised);

#pragma omp parallel
  {
    std::vector<double> s2(closed_form ? 0 : spec.total_cells(), 0.0);
#pragma omp for schedule(static)
    for (std::ptrdiff_t oi = 0; oi < static_cast<std::ptrdiff_t>(family.size()); ++oi) {
      const OmegaSet& omega = family[static_cast<std::size_t>(oi)];
      const double denom = kind == BmoKind::Plain
                               ? omega.measure()
                               : [&] {
                                   double wm = 0.0;
                                   for (std::size_t i = 0; i < spec.total_cells(); ++i)
                                     if (omega.contains_cell(i)) wm += (*w)[i];
                                   return wm * spec.cell_volume();
                                 }();
      double value = 0.0;
      if (closed_form) {
        double acc = 0.0;
        for (std::size_t ei = 0; ei < entries.size(); ++ei) {
          if (!omega.contains(entries[ei].rect)) continue;
          const auto& g = geom[ei];
          if (kind == BmoKind::WeightNormalised)
            acc += g.a2 / g.wavg;
          else if (kind == BmoKind::WeightMeasured)
            acc += g.a2 * g.wavg;
          else
            acc += g.a2;
        }
        value = std::sqrt(acc / denom);
      } else {
        std::fill(s2.begin(), s2.end(), 0.0);
        for (std::size_t ei = 0; ei < entries.size(); ++ei) {
          if (!omega.contains(entries[ei].rect)) continue;
          scatter_square(spec, geom[ei], s2);
        }
        const double norm_p =
            integrate_power(spec, s2, p / 2.0, kind == BmoKind::WeightMeasured ? w : nullptr);
        value = std::pow(norm_p, 1.0 / p) / std::pow(denom, 1.0 / p);
      }
      values[static_cast<std::size_t>(oi)] = value;
    }
  }
  return values;
}

BmoReport report_from(const std::vector<double>& values, std::span<const OmegaSet> family,
                      double p, const std::string& weight_desc) {
  BmoReport r;
  r.p = p;
  r.weight = weight_desc;
  r.family = "family[" + std::to_string(family.size()) + "]";
  r.norm = 0.0;
  r.omega_index = 0;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] > r.norm) {
      r.norm = values[i];
      r.omega_index = i;
    }
  r.omega_label = family[r.omega_index].label();
  return r;
}

}  // namespace

GridFunction sa(const CoefSequence& coefs) {
  const GridSpec& spec = coefs.spec();
  std::vector<double> s2(spec.total_cells(), 0.0);
  for (const auto& g : entry_geometry(coefs, nullptr)) scatter_square(spec, g, s2);
  GridFunction out(spec, 0.0);
  for (std::size_t i = 0; i < s2.size(); ++i) out[i] = std::sqrt(s2[i]);
  return out;
}

GridFunction sa_omega(const CoefSequence& coefs, const OmegaSet& omega) {
  const GridSpec& spec = coefs.spec();
  if (omega.spec() != spec) throw std::invalid_argument("sa_omega: grid mismatch");
  std::vector<double> s2(spec.total_cells(), 0.0);
  const auto geom = entry_geometry(coefs, nullptr);
  const auto entries = coefs.entries();
  for (std::size_t ei = 0; ei < entries.size(); ++ei)
    if (omega.contains(entries[ei].rect)) scatter_square(spec, geom[ei], s2);
  GridFunction out(spec, 0.0);
  for (std::size_t i = 0; i < s2.size(); ++i) out[i] = std::sqrt(s2[i]);
  return out;
}

BmoReport bmo_prod(const CoefSequence& coefs, double p, std::span<const OmegaSet> family) {
  const auto values = bmo_family_values(coefs, p, nullptr, BmoKind::Plain, family);
  return report_from(values, family, p, "lebesgue");
}

BmoReport bmo_prod_w(const CoefSequence& coefs, double p, const Weight& w,
                     std::span<const OmegaSet> family) {
  const auto values = bmo_family_values(coefs, p, &w, BmoKind::WeightMeasured, family);
  return report_from(values, family, p, w.describe());
}

BmoReport bmo_prod_weighted(const CoefSequence& coefs, const Weight& w,
                            std::span<const OmegaSet> family) {
  const auto values = bmo_family_values(coefs, 2.0, &w, BmoKind::WeightNormalised, family);
  return report_from(values, family, 2.0, w.describe() + " (normalised)");
}

CoefSequence lift_aw(const CoefSequence& coefs, const Weight& w) {
  if (w.spec() != coefs.spec()) throw std::invalid_argument("lift_aw: grid mismatch");
  CoefSequence out(coefs.spec());
  for (const auto& e : coefs.entries()) out.set(e.rect, e.value * w.sums().average(e.rect));
  return out;
}

PairingBound h1_bmo_pairing(const CoefSequence& a, const CoefSequence& b, const Weight& w,
                            std::span<const OmegaSet> family) {
  if (a.spec() != b.spec() || a.spec() != w.spec())
    throw std::invalid_argument("h1_bmo_pairing: grid mismatch");
  PairingBound out;
  for (const auto& e : a.entries()) {
    const double bv = b.at(e.rect);
    if (bv == 0.0) continue;
    out.lhs += std::fabs(e.value) * w.sums().average(e.rect) * std::fabs(bv);
  }
  out.bmo_a = bmo_prod(a, 2.0, family).norm;
  out.sb_l1 = lp_norm(sa(b), NormParams{1.0, &w});
  return out;
}

double little_bmo_bloom(const GridFunction& b, const Weight& nu) {
  const GridSpec& spec = b.spec();
  if (nu.spec() != spec) throw std::invalid_argument("little_bmo_bloom: grid mismatch");
  const CellSums bs(b);
  const auto rects = enumerate_rectangles(spec);
  const double vol = spec.cell_volume();
  double best = 0.0;
#pragma omp parallel for reduction(max : best) schedule(static)
  for (std::ptrdiff_t ri = 0; ri < static_cast<std::ptrdiff_t>(rects.size()); ++ri) {
    const auto& rect = rects[static_cast<std::size_t>(ri)];
    const double avg = bs.average(rect);
    std::array<int, 3> lo{0, 0, 0}, n{1, 1, 1};
    for (int t = 0; t < spec.param_count(); ++t) {
      lo[static_cast<std::size_t>(t)] = rect.interval(t).first_cell(spec.depth(t));
      n[static_cast<std::size_t>(t)] = rect.interval(t).cell_count(spec.depth(t));
    }
    double osc = 0.0, vmin = 0.0, vmax = 0.0;
    bool first = true;
    for (int x = 0; x < n[0]; ++x)
      for (int y = 0; y < n[1]; ++y)
        for (int z = 0; z < n[2]; ++z) {
          const double v = b[spec.cell_index({lo[0] + x, lo[1] + y, lo[2] + z})];
          vmin = first ? v : std::min(vmin, v);
          vmax = first ? v : std::max(vmax, v);
          first = false;
          osc += std::fabs(v - avg);
        }
    if (vmin == vmax) continue;  // constant on R: zero oscillation, exactly
    best = std::max(best, osc * vol / nu.on(rect));
  }
  return best;
}

double dual_bmo_lower(const GridFunction& b, const Weight& nu, unsigned axes_mask,
                      const DualSamplerSpec& sampler, std::uint64_t seed) {
  const GridSpec& spec = b.spec();
  const int m = spec.param_count();
  if (axes_mask == 0 || axes_mask >= (1u << m))
    throw std::invalid_argument("dual_bmo_lower: bad axes mask");
  if (nu.spec() != spec) throw std::invalid_argument("dual_bmo_lower: grid mismatch");
  const SquareMode mode{axes_mask, false};
  const double vol = spec.cell_volume();

  const auto quotient = [&](const GridFunction& f) -> double {
    double pairing = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) pairing += b[i] * f[i];
    pairing = std::fabs(pairing) * vol;
    const double denom = lp_norm(square_function(f, mode), NormParams{1.0, &nu});
    if (denom < 1e-14 * (1.0 + f.max_abs())) return -1.0;  // annihilated; skip
    return pairing / denom;
  };

  double best = 0.0;

  // Haar atoms on the masked axes, constant on the rest.
  std::vector<std::vector<DyadicInterval>> per_axis;
  std::vector<int> masked;
  for (int t = 0; t < m; ++t)
    if ((axes_mask >> t) & 1u) {
      per_axis.push_back(enumerate_haar_intervals(spec, t));
      masked.push_back(t);
    }
  std::size_t atom_count = 1;
  for (const auto& v : per_axis) atom_count *= v.size();
  const std::size_t cap = sampler.atom_samples > 0 ? static_cast<std::size_t>(sampler.atom_samples)
                                                   : atom_count;
  const std::size_t stride = std::max<std::size_t>(1, atom_count / std::max<std::size_t>(cap, 1));
  for (std::size_t n = 0; n < atom_count; n += stride) {
    GridFunction f(spec, 1.0);
    std::size_t rest = n;
    for (std::size_t r = 0; r < per_axis.size(); ++r) {
      const auto& intervals = per_axis[r];
      const DyadicInterval iv = intervals[rest % intervals.size()];
      rest /= intervals.size();
      const GridFunction prof = haar_function(spec, {masked[r], iv.scale, iv.pos}, true);
      for (std::size_t i = 0; i < f.size(); ++i) {
        const auto c = spec.cell_coords(i);
        f[i] *= prof[static_cast<std::size_t>(c[static_cast<std::size_t>(masked[r])])];
      }
    }
    best = std::max(best, quotient(f));
  }

  // Random functions with the masked coarse parts removed.
  for (int s = 0; s < sampler.random_samples; ++s) {
    Rng rng(split_seed(seed, static_cast<std::uint64_t>(s)));
    GridFunction f(spec, 0.0);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = rng.uniform(-1.0, 1.0);
    for (int t : masked) f -= axis_scale_average(f, t, 0);
    best = std::max(best, quotient(f));
  }
  return best;
}

}  // namespace dyadic
