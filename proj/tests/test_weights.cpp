#include <doctest.h>

#include <cmath>

#include "dyadic/reference.hpp"
#include "dyadic/weights.hpp"
#include "test_helpers.hpp"

using namespace dyadic;

namespace {
Weight random_weight(const GridSpec& spec, std::uint64_t seed, double rho = 4.0) {
  return generate_weight(spec, WeightRecipe::make_random_bounded_ratio(rho), seed);
}
}  // namespace

TEST_CASE("ap constant basics") {
  GridSpec spec({2, 2});
  const Weight one{GridFunction(spec, 1.0)};
  for (double p : {1.5, 2.0, 4.0}) CHECK(one.ap_constant(p) == doctest::Approx(1.0).epsilon(1e-13));

  // scale invariance is exact
  const Weight w = random_weight(spec, 1);
  GridFunction scaled = w.values();
  scaled *= 7.0;
  const Weight cw{std::move(scaled)};
  for (double p : {1.5, 2.0, 4.0})
    CHECK(w.ap_constant(p) == doctest::Approx(cw.ap_constant(p)).epsilon(1e-12));

  // one-axis hand computation
  GridSpec line({1});
  const Weight w21{GridFunction(line, std::vector<double>{2.0, 1.0})};
  CHECK(w21.ap_constant(2.0) == doctest::Approx(1.125).epsilon(1e-14));

  CHECK_THROWS(ap_constant(w.values(), 1.0));
  CHECK_THROWS(ap_constant(w.values(), 0.5));

  // oracle
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Weight ww = random_weight(spec, 100 + s);
    for (double p : {1.5, 2.0})
      CHECK(ww.ap_constant(p) == doctest::Approx(ref::ap_constant(ww.values(), p)).epsilon(1e-12));
  }
}

TEST_CASE("ainf constant") {
  GridSpec line({1});
  const Weight one{GridFunction(line, 1.0)};
  CHECK(ainf_constant(one) == doctest::Approx(1.0).epsilon(1e-14));

  const Weight w21{GridFunction(line, std::vector<double>{2.0, 1.0})};
  CHECK(ainf_constant(w21) == doctest::Approx(1.5 * std::exp(-0.5 * std::log(2.0))).epsilon(1e-12));

  GridSpec spec({2, 2});
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Weight w = random_weight(spec, 200 + s);
    for (double p : {2.0, 4.0}) CHECK(ainf_constant(w) <= w.ap_constant(p) + 1e-12);
  }
}

TEST_CASE("ap monotonicity and duality") {
  GridSpec spec({2, 2});
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Weight w = random_weight(spec, 300 + s);
    const double a15 = w.ap_constant(1.5);
    const double a2 = w.ap_constant(2.0);
    const double a4 = w.ap_constant(4.0);
    CHECK(a2 <= a15 + 1e-12);
    CHECK(a4 <= a2 + 1e-12);
    CHECK(a15 >= 1.0 - 1e-12);
  }
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Weight w = random_weight(spec, 400 + s);
    for (double p : {1.5, 2.0, 3.0}) {
      const double dual_exp = p / (p - 1.0);
      GridFunction sigma(spec, 0.0);
      for (std::size_t i = 0; i < sigma.size(); ++i)
        sigma[i] = std::pow(w[i], 1.0 - dual_exp);
      const Weight ws{std::move(sigma)};
      CHECK(ws.ap_constant(dual_exp) ==
            doctest::Approx(std::pow(w.ap_constant(p), dual_exp - 1.0)).epsilon(1e-10));
    }
  }
}

TEST_CASE("iterated ap") {
  GridSpec spec({2, 2});
  const Weight one{GridFunction(spec, 1.0)};
  const auto [s0, s1] = iterated_ap(one, 2.0);
  CHECK(s0 == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(s1 == doctest::Approx(1.0).epsilon(1e-13));

  // tensor weights split into their factor constants
  GridSpec line({2});
  const Weight w0 = random_weight(line, 7);
  const Weight w1 = random_weight(line, 8);
  GridFunction tensor(spec, 0.0);
  for (std::size_t i = 0; i < tensor.size(); ++i) {
    const auto c = spec.cell_coords(i);
    tensor[i] = w0[static_cast<std::size_t>(c[0])] * w1[static_cast<std::size_t>(c[1])];
  }
  const Weight tw{std::move(tensor)};
  const auto [t0, t1] = iterated_ap(tw, 2.0);
  CHECK(t0 == doctest::Approx(w0.ap_constant(2.0)).epsilon(1e-12));
  CHECK(t1 == doctest::Approx(w1.ap_constant(2.0)).epsilon(1e-12));

  // slice maxima never exceed the rectangle constant
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Weight w = random_weight(spec, 500 + s);
    const auto [i0, i1] = iterated_ap(w, 2.0);
    const double full = w.ap_constant(2.0);
    CHECK(i0 <= full + 1e-12);
    CHECK(i1 <= full + 1e-12);
  }

  const Weight w3{GridFunction(GridSpec({1, 1, 1}), 1.0)};
  CHECK_THROWS(iterated_ap(w3, 2.0));
  CHECK(iterated_ap_axis(w3, 2.0, 2) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("weight generation recipes") {
  GridSpec spec({2, 2});

  const Weight c3 = generate_weight(spec, WeightRecipe::make_constant(3.0), 0);
  for (std::size_t i = 0; i < spec.total_cells(); ++i) CHECK(c3[i] == 3.0);
  CHECK(c3.ap_constant(2.0) == doctest::Approx(1.0).epsilon(1e-13));

  const Weight degenerate = generate_weight(spec, WeightRecipe::make_random_bounded_ratio(1.0), 9);
  for (std::size_t i = 0; i < spec.total_cells(); ++i) CHECK(degenerate[i] == 1.0);

  // bounded ratio honours its bounds
  const Weight rb = random_weight(spec, 10, 4.0);
  for (std::size_t i = 0; i < spec.total_cells(); ++i) {
    CHECK(rb[i] >= 0.25 - 1e-15);
    CHECK(rb[i] <= 4.0 + 1e-15);
  }

  // determinism
  const Weight a = random_weight(spec, 11);
  const Weight b = random_weight(spec, 11);
  for (std::size_t i = 0; i < spec.total_cells(); ++i) CHECK(a[i] == b[i]);

  // non-tensor mix fails the cross-ratio factorisation test somewhere
  const auto mix = WeightRecipe::make_non_tensor_mix(
      WeightRecipe::make_tensor({WeightRecipe::make_random_bounded_ratio(3.0),
                                 WeightRecipe::make_random_bounded_ratio(3.0)}),
      WeightRecipe::make_random_bounded_ratio(3.0), 0.5);
  const Weight nt = generate_weight(spec, mix, 12);
  bool found = false;
  for (int a0 = 0; a0 < spec.axis_cells(0) && !found; ++a0)
    for (int a1 = a0 + 1; a1 < spec.axis_cells(0) && !found; ++a1)
      for (int b0 = 0; b0 < spec.axis_cells(1) && !found; ++b0)
        for (int b1 = b0 + 1; b1 < spec.axis_cells(1) && !found; ++b1) {
          const double lhs = nt[spec.cell_index({a0, b0, 0})] * nt[spec.cell_index({a1, b1, 0})];
          const double rhs = nt[spec.cell_index({a0, b1, 0})] * nt[spec.cell_index({a1, b0, 0})];
          if (std::fabs(lhs - rhs) > 1e-9 * (std::fabs(lhs) + std::fabs(rhs))) found = true;
        }
  CHECK(found);

  // mixing two constants is a tensor weight: rejected
  const auto bad = WeightRecipe::make_non_tensor_mix(WeightRecipe::make_constant(1.0),
                                                     WeightRecipe::make_constant(2.0), 0.5);
  CHECK_THROWS(generate_weight(spec, bad, 0));

  // power-like weights keep the value ratio in range
  const Weight pw = generate_weight(spec, WeightRecipe::make_power_like({0.9, -0.9}), 0);
  double lo = 1e300, hi = 0.0;
  for (std::size_t i = 0; i < spec.total_cells(); ++i) {
    lo = std::min(lo, pw[i]);
    hi = std::max(hi, pw[i]);
  }
  CHECK(hi / lo <= 1e4 + 1e-6);
}

TEST_CASE("bloom weights") {
  GridSpec spec({2, 2});
  const Weight mu = random_weight(spec, 21);

  const auto same = bloom_nu(mu, mu, 2.0);
  for (std::size_t i = 0; i < spec.total_cells(); ++i)
    CHECK(same.nu[i] == doctest::Approx(1.0).epsilon(1e-13));

  const Weight lam1{GridFunction(spec, 1.0)};
  const auto sq = bloom_nu(mu, lam1, 2.0);
  for (std::size_t i = 0; i < spec.total_cells(); ++i)
    CHECK(sq.nu[i] == doctest::Approx(std::sqrt(mu[i])).epsilon(1e-13));

  // reconstruction invariant
  const Weight lam = random_weight(spec, 22);
  const auto bw = bloom_nu(mu, lam, 3.0);
  for (std::size_t i = 0; i < spec.total_cells(); ++i)
    CHECK(bw.nu[i] ==
          doctest::Approx(std::pow(mu[i], 1.0 / 3.0) * std::pow(lam[i], -1.0 / 3.0)).epsilon(1e-12));

  // sampled A2 x A2 pairs give A2 bloom weights with a finite constant
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Weight m2 = random_weight(spec, 600 + s, 2.0);
    const Weight l2 = random_weight(spec, 700 + s, 2.0);
    const auto b2 = bloom_nu(m2, l2, 2.0);
    const double c = b2.nu.ap_constant(2.0);
    CHECK(c >= 1.0 - 1e-12);
    CHECK(c <= std::sqrt(m2.ap_constant(2.0) * l2.ap_constant(2.0)) + 1e-9);
  }
}
