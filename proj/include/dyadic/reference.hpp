#pragma once

#include <span>

#include "dyadic/bmo.hpp"
#include "dyadic/haar.hpp"
#include "dyadic/lattice.hpp"
#include "dyadic/maximal_square.hpp"
#include "dyadic/paraproducts.hpp"
#include "dyadic/weights.hpp"

namespace dyadic::ref {

// Serial brute-force implementations. These are the independent oracles the
// test suite checks the kernels against, and the baseline for the benchmark.
// No prefix tables, no fast transforms: every quantity is a direct loop over
// the defining sum.

double average(const GridFunction& f, const DyadicRectangle& rect);

double haar_coefficient(const GridFunction& f, const DyadicRectangle& rect, HaarIndex eta);

GridFunction partial_coefficient(const GridFunction& f, std::span<const AxisHaar> factors);

GridFunction martingale_diff(const GridFunction& f, int axis, const DyadicInterval& interval);

GridFunction maximal(const GridFunction& f, MaximalMode mode = MaximalMode::Full);

GridFunction weighted_maximal(const GridFunction& f, const Weight& w);

GridFunction square_function(const GridFunction& f, SquareMode mode);

double ap_constant(const GridFunction& w, double p);

GridFunction sa_omega(const CoefSequence& coefs, const OmegaSet* omega);

GridFunction linear_paraproduct(const CoefSequence& coefs, const GridFunction& f);

GridFunction full_paraproduct(const CoefSequence& coefs, const GridFunction& f1,
                              const GridFunction& f2, const FullParaproductSymmetry& sym);

GridFunction partial_paraproduct(const PartialParaproductCoefs& coefs, const GridFunction& f);

GridFunction operator_u(const GridFunction& g, const Weight& nu);

}  // namespace dyadic::ref
