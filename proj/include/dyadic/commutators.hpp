#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dyadic/paraproducts.hpp"

namespace dyadic {

/// [b,P] f = b (P f) - P (b f) for a tri-parameter partial paraproduct P.
GridFunction commutator(const GridFunction& b, const PartialParaproductCoefs& coefs,
                        const GridFunction& f);

/// Exact splitting of the commutator into named terms: the signed sum of all
/// terms reproduces [b,P] f on the grid. Term names: "A13_{j1}{j2}" (paired
/// expansion of b Pf on axes 1,3), "PA12_{j1}{j2}" (P applied to the paired
/// expansion of b f on axes 1,2, sign folded in), the error terms "E1", "E1m",
/// "E2", "E2m" (signs folded in), and "coarse" (finite-grid top-scale
/// corrections).
struct CommutatorDecomposition {
  std::vector<std::pair<std::string, GridFunction>> terms;

  GridFunction sum() const;
  const GridFunction* find(std::string_view name) const;
};

CommutatorDecomposition decompose(const GridFunction& b, const PartialParaproductCoefs& coefs,
                                  const GridFunction& f);

// Unsigned error-term displays; decompose() folds these in with signs
// E2 - E2m + E1m - E1.
GridFunction e1_term(const GridFunction& b, const PartialParaproductCoefs& coefs,
                     const GridFunction& f, bool mirror);
GridFunction e2_term(const GridFunction& b, const PartialParaproductCoefs& coefs,
                     const GridFunction& f, bool mirror);

/// Dualised majorisation chain for E1: lhs is the telescoped absolute sum
/// with the factors |<b, h_{L1}>_1|, rhs the square-function majorant it
/// reduces to. |<E1, g>| <= lhs holds exactly; lhs <= C(b) rhs holds with the
/// calibrated constant.
std::pair<double, double> e1_dual_bound(const GridFunction& b,
                                        const PartialParaproductCoefs& coefs,
                                        const GridFunction& f, const GridFunction& g,
                                        const Weight& nu);

/// One (j,k) slot of the vector-valued pairing estimate on a bi-parameter
/// grid: a normalised coefficient sequence and a function pair.
struct Lemma52Item {
  CoefSequence coefs;
  GridFunction f;
  GridFunction g;
};

/// groups[j] lists the items (indexed by k) sharing the outer l^p slot j.
struct Lemma52Instance {
  std::vector<std::vector<Lemma52Item>> groups;
};

/// Both sides of the vector-valued pairing estimate at exponents (p, q).
/// Every inner sequence must satisfy the unit BMO normalisation over the
/// all-rectangles family of its grid.
std::pair<double, double> lemma52_sides(const Lemma52Instance& instance, const Weight& w,
                                        double p, double q);

/// || [b,P] f ||_{L^p(lambda)} / ( littleBMO_nu(b) ||f||_{L^p(mu)} ) with
/// nu = mu^{1/p} lambda^{-1/p}. Throws std::domain_error on degenerate
/// instances (zero denominator).
double bloom_ratio(const GridFunction& b, const PartialParaproductCoefs& coefs,
                   const GridFunction& f, const Weight& mu, const Weight& lambda, double p);

}  // namespace dyadic
