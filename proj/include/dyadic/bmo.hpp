#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dyadic/lattice.hpp"
#include "dyadic/maximal_square.hpp"
#include "dyadic/weights.hpp"

namespace dyadic {

/// Scalar family indexed by fully cancellative dyadic rectangles (finite
/// support; absent keys read as 0). Entries iterate in a fixed sorted order.
class CoefSequence {
 public:
  struct Entry {
    DyadicRectangle rect;
    double value;
  };

  explicit CoefSequence(const GridSpec& spec) : spec_(spec) {}

  const GridSpec& spec() const { return spec_; }
  void set(const DyadicRectangle& rect, double value);
  double at(const DyadicRectangle& rect) const;
  std::span<const Entry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  void scale(double c) {
    for (auto& e : entries_) e.value *= c;
  }

  static std::uint64_t rect_key(const GridSpec& spec, const DyadicRectangle& rect);

 private:
  GridSpec spec_;
  std::vector<Entry> entries_;  // sorted by rect_key
  std::vector<std::uint64_t> keys_;
};

/// S_A / S_{A,Omega}: pointwise l^2 aggregate of the coefficients localized to
/// their rectangles; the Omega variant keeps only R inside Omega.
GridFunction sa(const CoefSequence& coefs);
GridFunction sa_omega(const CoefSequence& coefs, const OmegaSet& omega);

/// Result of a sup-over-family BMO evaluation. `norm` is attained at
/// family[omega_index]; the quotient there is recomputable.
struct BmoReport {
  double norm = 0.0;
  std::size_t omega_index = 0;
  std::string omega_label;
  std::string family;
  double p = 2.0;
  std::string weight;
};

/// sup over the family of |Omega|^{-1/p} || S_{A,Omega} ||_{L^p}.
BmoReport bmo_prod(const CoefSequence& coefs, double p, std::span<const OmegaSet> family);

/// sup over the family of w(Omega)^{-1/p} || S_{A,Omega} ||_{L^p(w)}.
BmoReport bmo_prod_w(const CoefSequence& coefs, double p, const Weight& w,
                     std::span<const OmegaSet> family);

/// Weight-normalised variant: sup over the family of
/// ( w(Omega)^{-1} sum_{R in Omega} |a_R|^2 / <w>_R )^{1/2}.
BmoReport bmo_prod_weighted(const CoefSequence& coefs, const Weight& w,
                            std::span<const OmegaSet> family);

/// Entrywise lift A -> (a_R <w>_R).
CoefSequence lift_aw(const CoefSequence& coefs, const Weight& w);

/// Both sides of the weighted pairing bound: lhs = sum |a_R| <w>_R |b_R|
/// exactly, together with the factors (BMO norm of A, ||S_B||_{L^1(w)}).
struct PairingBound {
  double lhs = 0.0;
  double bmo_a = 0.0;
  double sb_l1 = 0.0;
  double rhs() const { return bmo_a * sb_l1; }
};

PairingBound h1_bmo_pairing(const CoefSequence& a, const CoefSequence& b, const Weight& w,
                            std::span<const OmegaSet> family);

/// Rectangle-oscillation surrogate for the Bloom little-BMO norm:
/// sup over dyadic rectangles of nu(R)^{-1} int_R |b - <b>_R|.
double little_bmo_bloom(const GridFunction& b, const Weight& nu);

/// Sampled lower bound for the dual norm sup_f |<b,f>| / ||S f||_{L^1(nu)},
/// with S cancellative on the axes of `axes_mask`. Samples are Haar atoms on
/// the masked axes and random functions with their masked coarse parts
/// removed; samples annihilated by S are skipped.
struct DualSamplerSpec {
  int random_samples = 32;
  int atom_samples = 32;  // capped at the number of available atoms
};

double dual_bmo_lower(const GridFunction& b, const Weight& nu, unsigned axes_mask,
                      const DualSamplerSpec& sampler, std::uint64_t seed);

}  // namespace dyadic
