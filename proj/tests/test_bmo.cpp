#include <doctest.h>

#include <cmath>

#include "dyadic/bmo.hpp"
#include "dyadic/reference.hpp"
#include "test_helpers.hpp"

using namespace dyadic;
using dyadic::testing::max_abs_diff;
using dyadic::testing::random_function;
using dyadic::testing::random_sequence;

namespace {
std::vector<OmegaSet> all_rect_family(const GridSpec& spec) {
  return omega_family(spec, OmegaFamilySpec{OmegaStrategy::AllRectangles}, 0);
}
}  // namespace

TEST_CASE("sa and sa_omega") {
  GridSpec spec({2, 2});
  const auto rects = enumerate_cancellative_rectangles(spec);

  CoefSequence single(spec);
  single.set(rects[3], 1.0);
  const auto s = sa(single);
  const double expect = 1.0 / std::sqrt(rects[3].measure());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto c = spec.cell_coords(i);
    const bool inside =
        c[0] >= rects[3].interval(0).first_cell(2) &&
        c[0] < rects[3].interval(0).first_cell(2) + rects[3].interval(0).cell_count(2) &&
        c[1] >= rects[3].interval(1).first_cell(2) &&
        c[1] < rects[3].interval(1).first_cell(2) + rects[3].interval(1).cell_count(2);
    CHECK(s[i] == doctest::Approx(inside ? expect : 0.0).epsilon(1e-13));
  }

  // Omega disjoint from the support annihilates
  CoefSequence left(spec);
  left.set(DyadicRectangle({0, 1, 0}, {1, 0, 0}), 1.0);
  const auto right = OmegaSet::from_rectangle(spec, DyadicRectangle({0, 1, 1}, {1, 0, 0}));
  CHECK(sa_omega(left, right).max_abs() == 0.0);

  // oracle
  const auto seq = random_sequence(spec, 17, 6);
  const auto family = all_rect_family(spec);
  CHECK(max_abs_diff(sa(seq), ref::sa_omega(seq, nullptr)) <= 1e-13);
  for (std::size_t i = 0; i < family.size(); i += 3)
    CHECK(max_abs_diff(sa_omega(seq, family[i]), ref::sa_omega(seq, &family[i])) <= 1e-13);
}

TEST_CASE("bmo_prod: single coefficient, homogeneity, Holder direction") {
  GridSpec spec({2, 2});
  const auto family = all_rect_family(spec);
  const auto rects = enumerate_cancellative_rectangles(spec);

  CoefSequence single(spec);
  single.set(rects[4], 1.0);
  const auto report = bmo_prod(single, 2.0, family);
  CHECK(report.norm == doctest::Approx(1.0 / std::sqrt(rects[4].measure())).epsilon(1e-12));
  // the extremiser is the support rectangle itself
  const auto all_rects = enumerate_rectangles(spec);
  CHECK(all_rects[report.omega_index] == rects[4]);

  const auto seq = random_sequence(spec, 23, 8);
  for (double p : {1.0, 2.0, 4.0}) {
    CoefSequence scaled = seq;
    scaled.scale(-3.0);
    CHECK(bmo_prod(scaled, p, family).norm ==
          doctest::Approx(3.0 * bmo_prod(seq, p, family).norm).epsilon(1e-12));
  }

  const double n1 = bmo_prod(seq, 1.0, family).norm;
  const double n2 = bmo_prod(seq, 2.0, family).norm;
  const double n4 = bmo_prod(seq, 4.0, family).norm;
  CHECK(n1 <= n2 + 1e-12);
  CHECK(n2 <= n4 + 1e-12);

  CHECK_THROWS(bmo_prod(seq, 2.0, std::span<const OmegaSet>{}));
}

TEST_CASE("weighted bmo collapse identities") {
  GridSpec spec({2, 2});
  const auto family = all_rect_family(spec);
  const Weight one{GridFunction(spec, 1.0)};

  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto seq = random_sequence(spec, 1000 + s, 8);
    for (double p : {1.0, 2.0, 4.0})
      CHECK(std::fabs(bmo_prod_w(seq, p, one, family).norm - bmo_prod(seq, p, family).norm) <=
            1e-12);
    CHECK(std::fabs(bmo_prod_weighted(seq, one, family).norm -
                    bmo_prod(seq, 2.0, family).norm) <= 1e-12);
  }
}

TEST_CASE("bmo_prod_weighted closed form on a single coefficient") {
  GridSpec spec({2, 2});
  const auto family = all_rect_family(spec);
  const auto rects = enumerate_cancellative_rectangles(spec);
  const Weight w = generate_weight(spec, WeightRecipe::make_random_bounded_ratio(3.0), 31);

  CoefSequence single(spec);
  const auto& r0 = rects[6];
  single.set(r0, 2.0);
  const double expect = 2.0 / std::sqrt(w.on(r0) / r0.measure()) / std::sqrt(w.on(r0));
  const auto rep = bmo_prod_weighted(single, w, family);
  CHECK(rep.norm == doctest::Approx(expect).epsilon(1e-12));
  CHECK(enumerate_rectangles(spec)[rep.omega_index] == r0);

  CoefSequence scaled = single;
  scaled.scale(-2.0);
  CHECK(bmo_prod_weighted(scaled, w, family).norm == doctest::Approx(2.0 * rep.norm).epsilon(1e-12));
}

TEST_CASE("lift identity") {
  GridSpec spec({2, 2});
  const auto family = all_rect_family(spec);
  const Weight one{GridFunction(spec, 1.0)};

  const auto seq = random_sequence(spec, 41, 8);
  const auto lifted_one = lift_aw(seq, one);
  for (const auto& e : seq.entries()) CHECK(lifted_one.at(e.rect) == doctest::Approx(e.value).epsilon(1e-14));

  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto a = random_sequence(spec, 2000 + s, 8);
    const Weight w = generate_weight(spec, WeightRecipe::make_random_bounded_ratio(4.0), 3000 + s);
    const double lhs = bmo_prod_weighted(lift_aw(a, w), w, family).norm;
    const double rhs = bmo_prod_w(a, 2.0, w, family).norm;
    CHECK(std::fabs(lhs - rhs) <= 1e-12 * std::max(1.0, rhs));
  }
}

TEST_CASE("family monotonicity") {
  GridSpec spec({2, 2});
  const auto family = all_rect_family(spec);
  const auto seq = random_sequence(spec, 51, 8);
  const Weight w = generate_weight(spec, WeightRecipe::make_random_bounded_ratio(3.0), 52);

  const std::vector<OmegaSet> small(family.begin(), family.begin() + 5);
  for (double p : {1.0, 2.0}) {
    CHECK(bmo_prod(seq, p, small).norm <= bmo_prod(seq, p, family).norm + 1e-14);
    CHECK(bmo_prod_w(seq, p, w, small).norm <= bmo_prod_w(seq, p, w, family).norm + 1e-14);
  }
  CHECK(bmo_prod_weighted(seq, w, small).norm <= bmo_prod_weighted(seq, w, family).norm + 1e-14);
}

TEST_CASE("h1-bmo pairing") {
  GridSpec spec({2, 2});
  const auto family = all_rect_family(spec);
  const Weight one{GridFunction(spec, 1.0)};
  const auto rects = enumerate_cancellative_rectangles(spec);

  // single-rectangle equality case
  CoefSequence a(spec), b(spec);
  a.set(rects[2], 0.7);
  b.set(rects[2], -1.3);
  const auto pb = h1_bmo_pairing(a, b, one, family);
  CHECK(pb.lhs == doctest::Approx(0.7 * 1.3).epsilon(1e-12));
  CHECK(pb.rhs() == doctest::Approx(0.7 * 1.3).epsilon(1e-12));

  // zero second argument
  CoefSequence zero(spec);
  const auto pz = h1_bmo_pairing(a, zero, one, family);
  CHECK(pz.lhs == 0.0);

  // the bound itself on random data (constant recorded by the harness; here
  // we only check it is a genuine bound with a generous factor)
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto aa = random_sequence(spec, 4000 + s, 8);
    const auto bb = random_sequence(spec, 5000 + s, 8);
    const Weight w = generate_weight(spec, WeightRecipe::make_random_bounded_ratio(2.0), 6000 + s);
    const auto r = h1_bmo_pairing(aa, bb, w, family);
    CHECK(r.lhs <= 16.0 * r.rhs() + 1e-12);
  }
}

TEST_CASE("little bmo bloom surrogate") {
  GridSpec spec({2, 2});
  const Weight one{GridFunction(spec, 1.0)};

  GridFunction c(spec, 4.2);
  CHECK(little_bmo_bloom(c, one) == 0.0);

  const auto b = random_function(spec, 61);
  GridFunction cb = b;
  cb *= -2.0;
  CHECK(little_bmo_bloom(cb, one) == doctest::Approx(2.0 * little_bmo_bloom(b, one)).epsilon(1e-12));

  GridSpec line({1});
  GridFunction step(line, std::vector<double>{1.0, 0.0});
  const Weight lone{GridFunction(line, 1.0)};
  CHECK(little_bmo_bloom(step, lone) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("sampled dual lower bound") {
  GridSpec spec({2, 2});
  const Weight one{GridFunction(spec, 1.0)};

  GridFunction c(spec, 3.0);
  CHECK(dual_bmo_lower(c, one, 1u, DualSamplerSpec{8, 8}, 1) <= 1e-12);

  // single-atom quotient is attained among the samples
  const auto b = random_function(spec, 71);
  const double got = dual_bmo_lower(b, one, 1u, DualSamplerSpec{0, 1 << 20}, 2);
  double best_atom = 0.0;
  for (const auto& iv : enumerate_haar_intervals(spec, 0)) {
    GridFunction atom(spec, 1.0);
    const auto prof = haar_function(spec, iv, true);
    for (std::size_t i = 0; i < atom.size(); ++i)
      atom[i] = prof[static_cast<std::size_t>(spec.cell_coords(i)[0])];
    double pairing = 0.0;
    for (std::size_t i = 0; i < atom.size(); ++i) pairing += atom[i] * b[i];
    pairing = std::fabs(pairing) * spec.cell_volume();
    const double denom = lp_norm(square_function(atom, SquareMode::axis(0)), NormParams{1.0, &one});
    best_atom = std::max(best_atom, pairing / denom);
  }
  CHECK(got >= best_atom - 1e-12);
}
