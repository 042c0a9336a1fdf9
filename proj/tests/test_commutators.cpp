#include <doctest.h>

#include <cmath>

#include "dyadic/commutators.hpp"
#include "dyadic/haar.hpp"
#include "dyadic/reference.hpp"
#include "test_helpers.hpp"

using namespace dyadic;
using dyadic::testing::max_abs_diff;
using dyadic::testing::random_function;
using dyadic::testing::random_sequence;

namespace {
GridFunction tensor_atom(const GridSpec& spec, const DyadicInterval& i0, const DyadicInterval& i1,
                         const DyadicInterval& i2) {
  GridFunction out(spec, 0.0);
  const auto p0 = haar_function(spec, i0, true);
  const auto p1 = haar_function(spec, i1, true);
  const auto p2 = haar_function(spec, i2, true);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto c = spec.cell_coords(i);
    out[i] = p0[static_cast<std::size_t>(c[0])] * p1[static_cast<std::size_t>(c[1])] *
             p2[static_cast<std::size_t>(c[2])];
  }
  return out;
}
}  // namespace

TEST_CASE("commutator basics") {
  GridSpec spec({2, 2, 2});
  const auto coefs = generate_partial_coefs(spec, 1, 1, 3, 11);
  const auto f = random_function(spec, 12);

  GridFunction cb(spec, 2.5);
  CHECK(commutator(cb, coefs, f).max_abs() <= 1e-12);

  // f == 1: Pf = 0, so the commutator is -P(b)
  const auto b = random_function(spec, 13);
  GridFunction one(spec, 1.0);
  GridFunction want = partial_paraproduct(coefs, b);
  want *= -1.0;
  CHECK(max_abs_diff(commutator(b, coefs, one), want) <= 1e-12);

  // two-evaluation oracle via the reference operator
  GridFunction direct = GridFunction::product(b, ref::partial_paraproduct(coefs, f));
  direct -= ref::partial_paraproduct(coefs, GridFunction::product(b, f));
  CHECK(max_abs_diff(commutator(b, coefs, f), direct) <= 1e-11);
}

TEST_CASE("decomposition identity") {
  GridSpec spec({2, 2, 2});
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto coefs =
        generate_partial_coefs(spec, s % 2 ? 1 : 0, (s + 1) % 2 ? 1 : 0, 2, 300 + s);
    const auto b = random_function(spec, 310 + s);
    const auto f = random_function(spec, 320 + s);
    const auto dec = decompose(b, coefs, f);
    CHECK(dec.terms.size() == 8 + 8 + 4 + 1);
    CHECK(max_abs_diff(dec.sum(), commutator(b, coefs, f)) <= 1e-10);
  }

  // constant b: every term vanishes
  const auto coefs = generate_partial_coefs(spec, 1, 1, 3, 330);
  GridFunction cb(spec, -1.25);
  const auto f = random_function(spec, 331);
  const auto dec = decompose(cb, coefs, f);
  for (const auto& [name, term] : dec.terms) {
    INFO(name);
    CHECK(term.max_abs() <= 1e-12);
  }

  // shifting b by a constant leaves the commutator unchanged
  const auto b = random_function(spec, 332);
  GridFunction bshift = b;
  for (std::size_t i = 0; i < bshift.size(); ++i) bshift[i] += 5.0;
  CHECK(max_abs_diff(commutator(b, coefs, f), commutator(bshift, coefs, f)) <= 1e-11);
}

TEST_CASE("E1 telescoping on a single coefficient") {
  GridSpec spec({3, 1, 1});
  PartialParaproductCoefs coefs(spec, 2, 0);
  CoefSequence inner(coefs.inner_spec());
  inner.set(DyadicRectangle(DyadicInterval{0, 0, 0}, DyadicInterval{1, 0, 0}), 1.0);
  const DyadicInterval k1{0, 0, 0};
  const DyadicInterval i1{0, 2, 3};
  const DyadicInterval j1{0, 0, 0};
  coefs.add_block({k1, i1, j1, inner});

  const auto b = random_function(spec, 401);

  // telescoping: <b>_{I1xK2xK3} - <b>_{K1xK2xK3} as a sum of Haar increments
  const CellSums bsums(b);
  const DyadicRectangle fine(DyadicInterval{0, i1.scale, i1.pos}, DyadicInterval{1, 0, 0},
                             DyadicInterval{2, 0, 0});
  const DyadicRectangle coarse(k1, DyadicInterval{1, 0, 0}, DyadicInterval{2, 0, 0});
  const double direct = bsums.average(fine) - bsums.average(coarse);
  double telescoped = 0.0;
  for (int l = 1; l <= 2; ++l) {
    const DyadicInterval anc = i1.ancestor(l);
    const std::array<AxisHaar, 1> fac{AxisHaar{anc, true}};
    const auto pairing = ref::partial_coefficient(b, fac);  // function of (x2,x3)
    // <h_anc>_{I1}
    const auto prof = haar_function(spec, anc, true);
    double havg = 0.0;
    for (int cell = i1.first_cell(3); cell < i1.first_cell(3) + i1.cell_count(3); ++cell)
      havg += prof[static_cast<std::size_t>(cell)];
    havg /= i1.cell_count(3);
    // integrate the pairing against 1_{K2}/|K2| 1_{K3}/|K3| (both full here)
    telescoped += havg * pairing.integral();
  }
  CHECK(direct == doctest::Approx(telescoped).epsilon(1e-11));

  // hand-loop evaluation of the E1 display
  const auto f = random_function(spec, 402);
  const auto got = e1_term(b, coefs, f, false);
  const double gamma = direct;
  double pairing_f = 0.0;
  {
    GridFunction u(spec, 0.0);
    const auto p0 = haar_function(spec, i1, true);
    const auto p1 = haar_function(spec, {1, 0, 0}, true);
    for (std::size_t i = 0; i < u.size(); ++i) {
      const auto c = spec.cell_coords(i);
      u[i] = p0[static_cast<std::size_t>(c[0])] * p1[static_cast<std::size_t>(c[1])];
    }
    for (std::size_t i = 0; i < u.size(); ++i) pairing_f += u[i] * f[i];
    pairing_f *= spec.cell_volume();
  }
  GridFunction expect(spec, 0.0);
  {
    const auto p0 = haar_function(spec, j1, true);
    const auto p2 = haar_function(spec, {2, 0, 0}, true);
    for (std::size_t i = 0; i < expect.size(); ++i) {
      const auto c = spec.cell_coords(i);
      expect[i] = gamma * pairing_f * p0[static_cast<std::size_t>(c[0])] *
                  p2[static_cast<std::size_t>(c[2])];
    }
  }
  CHECK(max_abs_diff(got, expect) <= 1e-12);
}

TEST_CASE("E1 dual bound") {
  GridSpec spec({3, 2, 2});
  const auto coefs = generate_partial_coefs(spec, 1, 1, 3, 411);
  const auto f = random_function(spec, 412);
  const auto g = random_function(spec, 413);
  const Weight nu = generate_weight(spec, WeightRecipe::make_random_bounded_ratio(2.0), 414);

  GridFunction cb(spec, 2.0);
  const auto [zl, zr] = e1_dual_bound(cb, coefs, f, g, nu);
  CHECK(zl <= 1e-13);

  const auto b = random_function(spec, 415);
  const auto [lhs, rhs] = e1_dual_bound(b, coefs, f, g, nu);
  CHECK(lhs >= 0.0);
  CHECK(rhs >= 0.0);

  // the dualised sum dominates the E1 pairing exactly
  const auto e1 = e1_term(b, coefs, f, false);
  double pairing = 0.0;
  for (std::size_t i = 0; i < e1.size(); ++i) pairing += e1[i] * g[i];
  pairing = std::fabs(pairing) * spec.cell_volume();
  CHECK(pairing <= lhs + 1e-12);

  // zero complexity leaves nothing to telescope
  const auto coefs0 = generate_partial_coefs(spec, 0, 1, 3, 416);
  const auto [l0, r0] = e1_dual_bound(b, coefs0, f, g, nu);
  CHECK(l0 == 0.0);
  CHECK(r0 == 0.0);
}

TEST_CASE("E1 dual bound, single block hand loop") {
  GridSpec spec({2, 1, 1});
  PartialParaproductCoefs coefs(spec, 1, 1);
  CoefSequence inner(coefs.inner_spec());
  inner.set(DyadicRectangle(DyadicInterval{0, 0, 0}, DyadicInterval{1, 0, 0}), 0.8);
  coefs.add_block({{0, 0, 0}, {0, 1, 0}, {0, 1, 1}, inner});

  const auto b = random_function(spec, 421);
  const auto f = random_function(spec, 422);
  const auto g = random_function(spec, 423);
  const Weight nu{GridFunction(spec, 1.0)};

  const auto [lhs, rhs] = e1_dual_bound(b, coefs, f, g, nu);

  // lhs by hand: single l = 1, L1 = K1 = [0,1)
  const std::array<AxisHaar, 1> bfac{AxisHaar{{0, 0, 0}, true}};
  const auto bpair = ref::partial_coefficient(b, bfac);
  double babs = 0.0;
  for (std::size_t i = 0; i < bpair.size(); ++i) babs += std::fabs(bpair[i]);
  babs /= static_cast<double>(bpair.size());  // average over K2 x K3 = all

  GridFunction u(spec, 0.0), v(spec, 0.0);
  {
    const auto pi = haar_function(spec, {0, 1, 0}, true);
    const auto pj = haar_function(spec, {0, 1, 1}, true);
    const auto pm = haar_function(spec, {1, 0, 0}, true);
    const auto pl = haar_function(spec, {2, 0, 0}, true);
    for (std::size_t i = 0; i < u.size(); ++i) {
      const auto c = spec.cell_coords(i);
      u[i] = pi[static_cast<std::size_t>(c[0])] * pm[static_cast<std::size_t>(c[1])];
      v[i] = pj[static_cast<std::size_t>(c[0])] * pl[static_cast<std::size_t>(c[2])];
    }
  }
  double fpair = 0.0, gpair = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    fpair += u[i] * f[i];
    gpair += v[i] * g[i];
  }
  fpair *= spec.cell_volume();
  gpair *= spec.cell_volume();
  const double want_lhs = 0.8 * 1.0 /* |L1|^{-1/2} */ * std::fabs(fpair) * std::fabs(gpair) * babs;
  CHECK(lhs == doctest::Approx(want_lhs).epsilon(1e-11));

  // rhs by hand: single bracket on L1 = [0,1), constant over (x2,x3)
  const double bracket = 0.8 * std::fabs(fpair) * std::fabs(gpair);
  CHECK(rhs == doctest::Approx(bracket).epsilon(1e-11));
}

TEST_CASE("vector-valued pairing estimate") {
  GridSpec spec({2, 2});
  const Weight one{GridFunction(spec, 1.0)};

  // all-zero data
  Lemma52Instance zeros;
  zeros.groups.push_back({});
  zeros.groups[0].push_back({CoefSequence(spec), GridFunction(spec, 0.0), GridFunction(spec, 0.0)});
  const auto [zl, zr] = lemma52_sides(zeros, one, 2.0, 1.0);
  CHECK(zl == 0.0);
  CHECK(zr == 0.0);

  // single rectangle, w == 1: closed-form equality
  Lemma52Instance single;
  single.groups.push_back({});
  CoefSequence a(spec);
  const DyadicRectangle full_rect(DyadicInterval{0, 0, 0}, DyadicInterval{1, 0, 0});
  a.set(full_rect, 1.0);
  GridFunction f(spec, 0.0), g(spec, 0.0);
  {
    const auto h0 = haar_function(spec, {0, 0, 0}, true);
    const auto h1 = haar_function(spec, {1, 0, 0}, true);
    for (std::size_t i = 0; i < f.size(); ++i) {
      const auto c = spec.cell_coords(i);
      f[i] = h0[static_cast<std::size_t>(c[0])];  // h_{K2} x 1
      g[i] = h1[static_cast<std::size_t>(c[1])];  // 1 x h_{K3}
    }
  }
  single.groups[0].push_back({a, f, g});
  const auto [sl, sr] = lemma52_sides(single, one, 2.0, 1.0);
  CHECK(sl == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sr == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::fabs(sl - sr) <= 1e-12);

  // entrywise growth of |a| grows both sides
  Lemma52Instance base;
  base.groups.push_back({});
  CoefSequence a2(spec);
  const auto rects = enumerate_cancellative_rectangles(spec);
  a2.set(rects[0], 0.2);
  a2.set(rects[4], 0.3);
  const auto bf = random_function(spec, 431);
  const auto bg = random_function(spec, 432);
  base.groups[0].push_back({a2, bf, bg});
  const auto [l1, r1] = lemma52_sides(base, one, 2.0, 1.0);
  CoefSequence a3 = a2;
  a3.scale(2.0);
  // rescale to stay inside the unit normalisation
  const auto family = omega_family(spec, OmegaFamilySpec{OmegaStrategy::AllRectangles}, 0);
  const double n3 = bmo_prod(a3, 2.0, family).norm;
  if (n3 > 1.0) a3.scale(0.999 / n3);
  Lemma52Instance bigger;
  bigger.groups.push_back({});
  bigger.groups[0].push_back({a3, bf, bg});
  const auto [l2, r2] = lemma52_sides(bigger, one, 2.0, 1.0);
  const double factor = a3.entries()[0].value / a2.entries()[0].value;
  if (factor > 1.0) {
    CHECK(l2 >= l1 - 1e-12);
    CHECK(r2 >= r1 - 1e-12);
  }

  // normalisation violations are rejected
  Lemma52Instance bad;
  bad.groups.push_back({});
  CoefSequence abad(spec);
  abad.set(rects[0], 100.0);
  bad.groups[0].push_back({abad, bf, bg});
  CHECK_THROWS(lemma52_sides(bad, one, 2.0, 1.0));
}

TEST_CASE("bloom ratio") {
  GridSpec spec({2, 2, 2});
  const auto coefs = generate_partial_coefs(spec, 1, 0, 2, 441);
  const auto b = random_function(spec, 442);
  const auto f = random_function(spec, 443);
  const Weight mu = generate_weight(spec, WeightRecipe::make_random_bounded_ratio(2.0), 444);
  const Weight lam = generate_weight(spec, WeightRecipe::make_random_bounded_ratio(2.0), 445);

  const double ratio = bloom_ratio(b, coefs, f, mu, lam, 2.0);
  CHECK(ratio > 0.0);

  // invariances: b -> 2b, f -> 3f, (mu, lambda) -> (5mu, 5lambda)
  GridFunction b2 = b;
  b2 *= 2.0;
  GridFunction f3 = f;
  f3 *= 3.0;
  GridFunction mu5 = mu.values();
  mu5 *= 5.0;
  GridFunction lam5 = lam.values();
  lam5 *= 5.0;
  CHECK(bloom_ratio(b2, coefs, f, mu, lam, 2.0) == doctest::Approx(ratio).epsilon(1e-12));
  CHECK(bloom_ratio(b, coefs, f3, mu, lam, 2.0) == doctest::Approx(ratio).epsilon(1e-12));
  CHECK(bloom_ratio(b, coefs, f, Weight{std::move(mu5)}, Weight{std::move(lam5)}, 2.0) ==
        doctest::Approx(ratio).epsilon(1e-12));

  // degenerate instance: constant b
  GridFunction cb(spec, 1.0);
  CHECK_THROWS_AS(bloom_ratio(cb, coefs, f, mu, lam, 2.0), std::domain_error);

  // single-atom brute-force check with unit weights
  const Weight one{GridFunction(spec, 1.0)};
  const auto atom = tensor_atom(spec, {0, 0, 0}, {1, 0, 0}, {2, 0, 0});
  PartialParaproductCoefs simple(spec, 0, 0);
  CoefSequence inner(simple.inner_spec());
  inner.set(DyadicRectangle(DyadicInterval{0, 0, 0}, DyadicInterval{1, 0, 0}), 0.5);
  simple.add_block({{0, 0, 0}, {0, 0, 0}, {0, 0, 0}, inner});
  const auto ff = random_function(spec, 446);
  const double got = bloom_ratio(atom, simple, ff, one, one, 2.0);
  GridFunction direct = GridFunction::product(atom, ref::partial_paraproduct(simple, ff));
  direct -= ref::partial_paraproduct(simple, GridFunction::product(atom, ff));
  const double want =
      lp_norm(direct, 2.0) / (little_bmo_bloom(atom, one) * lp_norm(ff, 2.0));
  CHECK(got == doctest::Approx(want).epsilon(1e-10));
}
