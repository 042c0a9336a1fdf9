#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dyadic/bmo.hpp"
#include "dyadic/lattice.hpp"
#include "dyadic/weights.hpp"

namespace dyadic {

/// Linear paraproduct: sum over fully cancellative R of a_R <f>_R h_R.
GridFunction linear_paraproduct(const CoefSequence& coefs, const GridFunction& f);

// ---------------------------------------------------------------------------
// Bilinear bi-parameter full paraproducts. Per axis, exactly one of the three
// slots (first argument, second argument, output) carries the cancellative
// Haar factor; the other two carry the normalised indicator 1_I/|I|. The slot
// assignment below reproduces
//   sum_R a_R <f1, h_I x 1_J/|J|> <f2>_R (1_I/|I|) x h_J
// for {axis0: FirstArg, axis1: Output}; the other eight symmetries permute
// the slots. The mapping table ships in the README.

enum class ParaSlot { FirstArg, SecondArg, Output };

struct FullParaproductSymmetry {
  ParaSlot haar_slot_axis0 = ParaSlot::FirstArg;
  ParaSlot haar_slot_axis1 = ParaSlot::Output;
  std::string describe() const;
};

std::array<FullParaproductSymmetry, 9> all_full_symmetries();

GridFunction full_paraproduct(const CoefSequence& coefs, const GridFunction& f1,
                              const GridFunction& f2, const FullParaproductSymmetry& sym);

/// Sampled ratio statistics for || Pi(f1,f2) ||_{L^r(w)} against
/// ||f1||_{L^p(w1)} ||f2||_{L^q(w2)}, with the coefficient sequence rescaled so
/// its product BMO norm (p=2, all-rectangles family) is 1 and
/// w = w1^{r/p} w2^{r/q}. Also evaluates the dual sum diagnostic
/// sum |a_R| <w>_R |pairing1| |pairing2| per sample.
struct FullParaBoundReport {
  double sup_ratio = 0.0;
  double median_ratio = 0.0;
  double sup_dual_ratio = 0.0;
  std::vector<double> ratios;
  std::vector<double> dual_ratios;
};

FullParaBoundReport full_paraproduct_bound_report(const CoefSequence& coefs, const Weight& w1,
                                                  const Weight& w2, double p, double q, double r,
                                                  const FullParaproductSymmetry& sym, int samples,
                                                  std::uint64_t seed);

// ---------------------------------------------------------------------------
// Tri-parameter partial paraproduct: shift structure on axis 0 (I1, J1 below a
// common ancestor K1 at relative depths i1, j1), paraproduct structure on axes
// 1 and 2:
//   P f = sum a_{(K),I1,J1} <f, h_{I1} x h_{K2} x 1_{K3}/|K3|>
//                           h_{J1} x (1_{K2}/|K2|) x h_{K3}.

class PartialParaproductCoefs {
 public:
  struct Block {
    DyadicInterval coarse;    // K1, axis 0
    DyadicInterval fine_in;   // I1 = descendant of K1 at depth i1
    DyadicInterval fine_out;  // J1 = descendant of K1 at depth j1
    CoefSequence inner;       // over the (axis1, axis2) bi-parameter grid
  };

  PartialParaproductCoefs(const GridSpec& spec, int complexity_in, int complexity_out);

  const GridSpec& spec() const { return spec_; }
  const GridSpec& inner_spec() const { return inner_spec_; }
  int complexity_in() const { return i1_; }
  int complexity_out() const { return j1_; }

  void add_block(Block block);
  std::span<const Block> blocks() const { return blocks_; }
  void scale(double c) {
    for (auto& blk : blocks_) blk.inner.scale(c);
  }

  /// The admissible inner BMO bound |I1|^{1/2} |J1|^{1/2} / |K1|.
  static double normalization_bound(const Block& block);

 private:
  GridSpec spec_;
  GridSpec inner_spec_;
  int i1_ = 0;
  int j1_ = 0;
  std::vector<Block> blocks_;
};

/// Checks every block's inner sequence against its BMO normalisation bound
/// over the given inner-grid Omega family.
bool check_partial_normalization(const PartialParaproductCoefs& coefs,
                                 std::span<const OmegaSet> inner_family, double slack = 1.0 + 1e-9);

GridFunction partial_paraproduct(const PartialParaproductCoefs& coefs, const GridFunction& f);

/// Random coefficient family; every inner sequence is rescaled to meet its
/// normalisation bound up to a factor in [1/2, 1]. Deterministic in the seed.
PartialParaproductCoefs generate_partial_coefs(const GridSpec& spec, int complexity_in,
                                               int complexity_out, int block_count,
                                               std::uint64_t seed);

// ---------------------------------------------------------------------------
// One-axis product paraproducts: with Delta_I the martingale difference and
// E_I the averaging operator on one axis,
//   kind DiffDiff: sum_I Delta_I b Delta_I f
//   kind DiffAvg:  sum_I Delta_I b E_I f
//   kind AvgDiff:  sum_I E_I b Delta_I f
// On the finite grid b f = (sum of the three kinds) + E0 b E0 f, with E0 the
// top average on the axis.

enum class PairKind { DiffDiff = 1, DiffAvg = 2, AvgDiff = 3 };

GridFunction aij(const GridFunction& b, const GridFunction& f, int axis, PairKind kind);

/// Composition on two distinct axes, A^{i1}_{j1} A^{i2}_{j2}.
GridFunction aij2(const GridFunction& b, const GridFunction& f, int axis1, PairKind kind1,
                  int axis2, PairKind kind2);

/// Finite-grid remainder of the two-axis expansion: b f minus the nine
/// aij2 terms equals this sum of coarse-projection terms, exactly.
GridFunction pair_coarse_correction(const GridFunction& b, const GridFunction& f, int axis1,
                                    int axis2);

/// Auxiliary operator on tri-parameter grids:
///   U g = sum_{V1,V3} h_{V1} x [ S_{axis1}<g, h_{V1} x h_{V3}>_{0,2}
///                                 <nu>^{0,2}_{V1 x V3} ] x h_{V3}.
GridFunction operator_u(const GridFunction& g, const Weight& nu);

}  // namespace dyadic
