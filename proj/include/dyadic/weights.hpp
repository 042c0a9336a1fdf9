#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "dyadic/lattice.hpp"

namespace dyadic {

/// Strictly positive grid function with cached dyadic A_p characteristics.
class Weight {
 public:
  explicit Weight(GridFunction values);
  Weight(const Weight& o);
  Weight& operator=(const Weight& o);
  Weight(Weight&& o) noexcept;
  Weight& operator=(Weight&& o) noexcept;

  const GridSpec& spec() const { return values_.spec(); }
  const GridFunction& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  const CellSums& sums() const { return sums_; }
  double on(const DyadicRectangle& rect) const { return sums_.integral(rect); }  // w(R)
  double total() const { return sums_.integral(full_rect()); }

  /// Dyadic rectangle A_p characteristic, memoised per exponent.
  double ap_constant(double p) const;

  std::string describe() const { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }

  DyadicRectangle full_rect() const;

 private:
  GridFunction values_;
  CellSums sums_;
  std::string label_ = "w";
  mutable std::mutex cache_mutex_;
  mutable std::map<double, double> ap_cache_;
};

/// sup over dyadic rectangles of <w>_R <w^{1-p'}>_R^{p-1}, p in (1, inf).
double ap_constant(const GridFunction& w, double p);

/// sup over dyadic rectangles of <w>_R exp(<log w^{-1}>_R).
double ainf_constant(const Weight& w);

/// 1D dyadic A_p constant of the axis-`axis` slices, maximised over the
/// frozen complementary cells.
double iterated_ap_axis(const Weight& w, double p, int axis);
/// Bi-parameter convenience: (axis-0 slice constant, axis-1 slice constant).
std::pair<double, double> iterated_ap(const Weight& w, double p);

// ---------------------------------------------------------------------------
// Weight generation recipes. JSON-expressible; deterministic given a seed.

struct WeightRecipe {
  enum class Kind { Constant, Tensor, PowerLike, RandomBoundedRatio, NonTensorMix };
  Kind kind = Kind::Constant;
  double constant = 1.0;                // Constant
  std::vector<WeightRecipe> factors;    // Tensor: one 1D recipe per axis; NonTensorMix: two recipes
  std::vector<double> exponents;        // PowerLike: one exponent per axis
  double ratio = 2.0;                   // RandomBoundedRatio: values in [1/ratio, ratio]
  double mixing = 0.5;                  // NonTensorMix: convex combination parameter

  static WeightRecipe make_constant(double c);
  static WeightRecipe make_random_bounded_ratio(double rho);
  static WeightRecipe make_power_like(std::vector<double> exps);
  static WeightRecipe make_tensor(std::vector<WeightRecipe> one_d);
  static WeightRecipe make_non_tensor_mix(WeightRecipe a, WeightRecipe b, double mixing);
  std::string describe() const;
};

Weight generate_weight(const GridSpec& spec, const WeightRecipe& recipe, std::uint64_t seed);

/// Two-weight Bloom triple: nu = mu^{1/p} lambda^{-1/p}.
struct BloomWeight {
  Weight mu;
  Weight lambda;
  double p;
  Weight nu;
};

BloomWeight bloom_nu(const Weight& mu, const Weight& lambda, double p);

}  // namespace dyadic
