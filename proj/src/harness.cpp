#include "dyadic/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "dyadic/bmo.hpp"
#include "dyadic/commutators.hpp"
#include "dyadic/haar.hpp"
#include "dyadic/maximal_square.hpp"
#include "dyadic/paraproducts.hpp"
#include "dyadic/reference.hpp"
#include "dyadic/rng.hpp"
#include "dyadic/serialization.hpp"

namespace dyadic {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

GridFunction sample_function(const GridSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  GridFunction f(spec, 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = rng.uniform(-1.0, 1.0);
  return f;
}

CoefSequence sample_coef_sequence(const GridSpec& spec, std::uint64_t seed, int support) {
  Rng rng(seed);
  const auto rects = enumerate_cancellative_rectangles(spec);
  CoefSequence seq(spec);
  const std::size_t want = std::min<std::size_t>(static_cast<std::size_t>(support), rects.size());
  std::vector<std::size_t> chosen;
  while (chosen.size() < want) {
    const std::size_t pick = rng.below(rects.size());
    if (std::find(chosen.begin(), chosen.end(), pick) == chosen.end()) chosen.push_back(pick);
  }
  for (std::size_t pick : chosen) seq.set(rects[pick], rng.uniform(-1.0, 1.0));
  return seq;
}

namespace {

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',') c = ';';
  return s;
}

// resamples until the dyadic A2 characteristic clears the cap
Weight capped_weight(const GridSpec& spec, const WeightRecipe& recipe, double cap,
                     std::uint64_t seed) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    Weight w = generate_weight(spec, recipe, split_seed(seed, static_cast<std::uint64_t>(attempt)));
    if (w.ap_constant(2.0) <= cap) return w;
  }
  throw std::runtime_error("weight family: cannot satisfy the A2 cap; loosen the recipe");
}

struct Corpus {
  GridSpec spec;
  std::vector<std::pair<std::string, std::vector<Weight>>> families;
  std::vector<OmegaSet> omega;
};

Corpus build_corpus(const ExperimentConfig& config, std::uint64_t seed) {
  Corpus corpus{GridSpec(config.depths), {}, {}};
  corpus.omega = omega_family(corpus.spec, OmegaFamilySpec{OmegaStrategy::AllRectangles}, 0);
  for (std::size_t fi = 0; fi < config.weights.size(); ++fi) {
    const auto& fam = config.weights[fi];
    std::vector<Weight> ws;
    for (int i = 0; i < fam.count; ++i)
      ws.push_back(capped_weight(corpus.spec, fam.recipe, fam.a2_cap,
                                 split_seed(seed, 0xF000 + fi * 257 + static_cast<std::uint64_t>(i))));
    corpus.families.emplace_back(fam.label, std::move(ws));
  }
  return corpus;
}

struct EntryTracker {
  std::map<std::string, FixtureEntry>* entries;
  void hi(const std::string& key, double v) {
    auto& e = (*entries)[key];
    e.hi = std::max(e.hi, v);
  }
  void two_sided(const std::string& key, double v) {
    auto& e = (*entries)[key];
    e.hi = std::max(e.hi, v);
    if (!e.lo.has_value() || v < *e.lo) e.lo = v;
  }
};

void push_row(ExperimentResult& result, std::initializer_list<std::string> cells) {
  result.rows.emplace_back(cells);
}

// ---------------------------------------------------------------------------
// Suite runners. Each consumes (config, seed) and fills rows plus fixture
// entries; rows are ordered by (family, weight, instance) so replays match.

void run_bmo_equivalence(const ExperimentConfig& config, ExperimentResult& out) {
  const Corpus corpus = build_corpus(config, config.seed);
  EntryTracker track{&out.fixture_entries};
  out.columns = {"schema", "suite",     "family",  "weight",      "instance", "a2",
                 "bmo",    "bmo_w",     "ratio",   "omega_plain", "omega_w"};
  for (const auto& [label, weights] : corpus.families) {
    const std::string key = "thm33:" + label + "|" + corpus.spec.describe();
    for (std::size_t wi = 0; wi < weights.size(); ++wi) {
      const Weight& w = weights[wi];
      for (int si = 0; si < config.samples; ++si) {
        const auto seq = sample_coef_sequence(
            corpus.spec, split_seed(config.seed, 0xA000 + wi * 1009 + static_cast<std::uint64_t>(si)),
            config.sequence_support);
        const auto plain = bmo_prod(seq, 2.0, corpus.omega);
        const auto weighted = bmo_prod_w(seq, 2.0, w, corpus.omega);
        if (plain.norm <= 0.0) continue;
        const double ratio = weighted.norm / plain.norm;
        track.two_sided(key, ratio);
        push_row(out, {std::to_string(config.schema), config.suite, sanitize(label),
                       std::to_string(wi), std::to_string(si), format_double(w.ap_constant(2.0)),
                       format_double(plain.norm), format_double(weighted.norm),
                       format_double(ratio), sanitize(plain.omega_label),
                       sanitize(weighted.omega_label)});
      }
    }
  }
}

void run_jn(const ExperimentConfig& config, ExperimentResult& out) {
  const Corpus corpus = build_corpus(config, config.seed);
  EntryTracker track{&out.fixture_entries};
  out.columns = {"schema", "suite", "family", "weight", "instance",
                 "norm_p1", "norm_p2", "norm_p4", "ratio21", "ratio42"};
  for (const auto& [label, weights] : corpus.families) {
    const std::string key21 = "jn21:" + label + "|" + corpus.spec.describe();
    const std::string key42 = "jn42:" + label + "|" + corpus.spec.describe();
    for (std::size_t wi = 0; wi < weights.size(); ++wi) {
      for (int si = 0; si < config.samples; ++si) {
        const auto seq = sample_coef_sequence(
            corpus.spec, split_seed(config.seed, 0xB000 + wi * 1013 + static_cast<std::uint64_t>(si)),
            config.sequence_support);
        const double n1 = bmo_prod_w(seq, 1.0, weights[wi], corpus.omega).norm;
        const double n2 = bmo_prod_w(seq, 2.0, weights[wi], corpus.omega).norm;
        const double n4 = bmo_prod_w(seq, 4.0, weights[wi], corpus.omega).norm;
        if (n1 <= 0.0) continue;
        const double r21 = n2 / n1;
        const double r42 = n4 / n2;
        track.hi(key21, r21);
        track.hi(key42, r42);
        push_row(out, {std::to_string(config.schema), config.suite, sanitize(label),
                       std::to_string(wi), std::to_string(si), format_double(n1),
                       format_double(n2), format_double(n4), format_double(r21),
                       format_double(r42)});
      }
    }
  }
}

void run_lemma35(const ExperimentConfig& config, ExperimentResult& out) {
  const Corpus corpus = build_corpus(config, config.seed);
  EntryTracker track{&out.fixture_entries};
  out.columns = {"schema", "suite",   "family", "weight", "instance",
                 "lifted", "plain",   "ratio",  "equality_gap"};
  for (const auto& [label, weights] : corpus.families) {
    const std::string key = "lemma35:" + label + "|" + corpus.spec.describe();
    for (std::size_t wi = 0; wi < weights.size(); ++wi) {
      for (int si = 0; si < config.samples; ++si) {
        const auto seq = sample_coef_sequence(
            corpus.spec, split_seed(config.seed, 0xC000 + wi * 1019 + static_cast<std::uint64_t>(si)),
            config.sequence_support);
        const Weight& w = weights[wi];
        const double lifted = bmo_prod_weighted(lift_aw(seq, w), w, corpus.omega).norm;
        const double measured = bmo_prod_w(seq, 2.0, w, corpus.omega).norm;
        const double plain = bmo_prod(seq, 2.0, corpus.omega).norm;
        if (plain <= 0.0) continue;
        track.two_sided(key, lifted / plain);
        push_row(out, {std::to_string(config.schema), config.suite, sanitize(label),
                       std::to_string(wi), std::to_string(si), format_double(lifted),
                       format_double(plain), format_double(lifted / plain),
                       format_double(std::fabs(lifted - measured))});
      }
    }
  }
}

void run_cor36(const ExperimentConfig& config, ExperimentResult& out) {
  const Corpus corpus = build_corpus(config, config.seed);
  EntryTracker track{&out.fixture_entries};
  out.columns = {"schema", "suite", "family", "weight", "instance", "lhs", "bmo_a", "sb_l1",
                 "ratio"};
  for (const auto& [label, weights] : corpus.families) {
    const std::string key = "cor36:" + label + "|" + corpus.spec.describe();
    for (std::size_t wi = 0; wi < weights.size(); ++wi) {
      for (int si = 0; si < config.samples; ++si) {
        const auto a = sample_coef_sequence(
            corpus.spec, split_seed(config.seed, 0xD000 + wi * 1021 + static_cast<std::uint64_t>(si)),
            config.sequence_support);
        const auto b = sample_coef_sequence(
            corpus.spec,
            split_seed(config.seed, 0xD700 + wi * 1031 + static_cast<std::uint64_t>(si)),
            config.sequence_support);
        const auto pairing = h1_bmo_pairing(a, b, weights[wi], corpus.omega);
        if (pairing.rhs() <= 0.0) continue;
        const double ratio = pairing.lhs / pairing.rhs();
        track.hi(key, ratio);
        push_row(out, {std::to_string(config.schema), config.suite, sanitize(label),
                       std::to_string(wi), std::to_string(si), format_double(pairing.lhs),
                       format_double(pairing.bmo_a), format_double(pairing.sb_l1),
                       format_double(ratio)});
      }
    }
  }
}

void run_dual_bmo(const ExperimentConfig& config, ExperimentResult& out) {
  const Corpus corpus = build_corpus(config, config.seed);
  EntryTracker track{&out.fixture_entries};
  out.columns = {"schema", "suite", "family", "weight", "instance", "axes",
                 "dual_lower", "surrogate", "ratio"};
  for (const auto& [label, weights] : corpus.families) {
    const std::string key = "dualbmo:" + label + "|" + corpus.spec.describe();
    for (std::size_t wi = 0; wi < weights.size(); ++wi) {
      for (int si = 0; si < config.samples; ++si) {
        const auto b = sample_function(
            corpus.spec, split_seed(config.seed, 0xE000 + wi * 1033 + static_cast<std::uint64_t>(si)));
        const Weight& nu = weights[wi];
        const double surrogate = little_bmo_bloom(b, nu);
        if (surrogate <= 0.0) continue;
        for (int axis = 0; axis < corpus.spec.param_count(); ++axis) {
          const double lower =
              dual_bmo_lower(b, nu, 1u << axis, DualSamplerSpec{16, 64},
                             split_seed(config.seed, 0xE800 + wi * 7 + static_cast<std::uint64_t>(axis)));
          const double ratio = lower / surrogate;
          track.hi(key, ratio);
          push_row(out, {std::to_string(config.schema), config.suite, sanitize(label),
                         std::to_string(wi), std::to_string(si), std::to_string(axis),
                         format_double(lower), format_double(surrogate), format_double(ratio)});
        }
      }
    }
  }
}

void run_maximal(const ExperimentConfig& config, ExperimentResult& out) {
  const Corpus corpus = build_corpus(config, config.seed);
  EntryTracker track{&out.fixture_entries};
  out.columns = {"schema", "suite", "family", "check", "p", "weight", "instance",
                 "numerator", "denominator", "ratio"};
  const double exponents[3] = {1.5, 2.0, 4.0};
  for (const auto& [label, weights] : corpus.families) {
    for (std::size_t wi = 0; wi < weights.size(); ++wi) {
      const Weight& w = weights[wi];
      for (int si = 0; si < config.samples; ++si) {
        const auto f = sample_function(
            corpus.spec, split_seed(config.seed, 0xF100 + wi * 1039 + static_cast<std::uint64_t>(si)));
        for (double p : exponents) {
          const std::string suffix = label + "|p=" + format_double(p) + "|" + corpus.spec.describe();
          const double fn = lp_norm(f, NormParams{p, &w});
          if (fn <= 0.0) continue;
          // weighted maximal bound
          {
            const double num = lp_norm(weighted_maximal(f, w), NormParams{p, &w});
            track.hi("m_w:" + suffix, num / fn);
            push_row(out, {std::to_string(config.schema), config.suite, sanitize(label), "m_w",
                           format_double(p), std::to_string(wi), std::to_string(si),
                           format_double(num), format_double(fn), format_double(num / fn)});
          }
          // two-sided square function equivalence
          {
            const double num = lp_norm(square_function(f, SquareMode::full(2)), NormParams{p, &w});
            track.hi("s_upper:" + suffix, num / fn);
            push_row(out, {std::to_string(config.schema), config.suite, sanitize(label), "s_upper",
                           format_double(p), std::to_string(wi), std::to_string(si),
                           format_double(num), format_double(fn), format_double(num / fn)});
          }
          // lower bound on coarse-free data
          {
            auto coefs = forward_transform(f);
            for (std::size_t i = 0; i < corpus.spec.total_cells(); ++i) {
              const auto c = corpus.spec.cell_coords(i);
              bool coarse = false;
              for (int t = 0; t < corpus.spec.param_count(); ++t)
                if (c[static_cast<std::size_t>(t)] == 0) coarse = true;
              if (coarse) coefs.mutable_data()[i] = 0.0;
            }
            const GridFunction fk = inverse_transform(coefs);
            const double den = lp_norm(square_function(fk, SquareMode::full(2)), NormParams{p, &w});
            const double num = lp_norm(fk, NormParams{p, &w});
            if (den > 0.0) {
              track.hi("s_lower:" + suffix, num / den);
              push_row(out, {std::to_string(config.schema), config.suite, sanitize(label),
                             "s_lower", format_double(p), std::to_string(wi), std::to_string(si),
                             format_double(num), format_double(den), format_double(num / den)});
            }
          }
          // hybrid square-maximal
          {
            const double num =
                lp_norm(square_function(f, SquareMode::axis_with_maximal(0)), NormParams{p, &w});
            track.hi("s_hybrid:" + suffix, num / fn);
            push_row(out, {std::to_string(config.schema), config.suite, sanitize(label), "s_hybrid",
                           format_double(p), std::to_string(wi), std::to_string(si),
                           format_double(num), format_double(fn), format_double(num / fn)});
          }
        }
        // Fefferman-Stein with s = 2
        {
          std::vector<GridFunction> fs;
          for (int j = 0; j < 4; ++j)
            fs.push_back(sample_function(
                corpus.spec,
                split_seed(config.seed, 0xF800 + wi * 1049 + static_cast<std::uint64_t>(4 * si + j))));
          const double num = fs_vector_maximal(fs, 2.0, 2.0, &w);
          GridFunction agg(corpus.spec, 0.0);
          for (const auto& g : fs)
            for (std::size_t i = 0; i < agg.size(); ++i) agg[i] += g[i] * g[i];
          for (std::size_t i = 0; i < agg.size(); ++i) agg[i] = std::sqrt(agg[i]);
          const double den = lp_norm(agg, NormParams{2.0, &w});
          if (den > 0.0) {
            const std::string key = "fs:" + label + "|s=2|p=2|" + corpus.spec.describe();
            track.hi(key, num / den);
            push_row(out, {std::to_string(config.schema), config.suite, sanitize(label), "fs",
                           "2", std::to_string(wi), std::to_string(si), format_double(num),
                           format_double(den), format_double(num / den)});
          }
        }
      }
    }
  }
}

void run_paraproducts(const ExperimentConfig& config, ExperimentResult& out) {
  const Corpus corpus = build_corpus(config, config.seed);
  EntryTracker track{&out.fixture_entries};
  out.columns = {"schema", "suite", "family", "symmetry", "weight", "samples",
                 "sup_ratio", "median_ratio", "sup_dual"};
  const auto syms = all_full_symmetries();
  const Weight unit{GridFunction(corpus.spec, 1.0)};

  const auto run_one = [&](const std::string& label, const Weight& w1, const Weight& w2,
                           std::size_t wi, std::uint64_t tag) {
    for (std::size_t si = 0; si < syms.size(); ++si) {
      const auto seq = sample_coef_sequence(corpus.spec, split_seed(config.seed, tag + si),
                                       config.sequence_support);
      const auto report = full_paraproduct_bound_report(
          seq, w1, w2, 4.0, 4.0, 2.0, syms[si], config.samples,
          split_seed(config.seed, tag + 100 + si));
      const std::string key =
          "prop42:" + syms[si].describe() + "|" + label + "|" + corpus.spec.describe();
      track.hi(key, report.sup_ratio);
      push_row(out, {std::to_string(config.schema), config.suite, sanitize(label),
                     sanitize(syms[si].describe()), std::to_string(wi),
                     std::to_string(config.samples), format_double(report.sup_ratio),
                     format_double(report.median_ratio), format_double(report.sup_dual_ratio)});
    }
  };

  run_one("unweighted", unit, unit, 0, 0x10000);
  for (const auto& [label, weights] : corpus.families) {
    if (weights.size() < 2) continue;
    run_one(label, weights[0], weights[1], 0, 0x20000 + std::hash<std::string>{}(label) % 1024);
  }
}

void run_bloom(const ExperimentConfig& config, ExperimentResult& out) {
  const Corpus corpus = build_corpus(config, config.seed);
  EntryTracker track{&out.fixture_entries};
  out.columns = {"schema", "suite", "family", "instance", "ratio", "e1_lhs", "e1_rhs", "e1_ratio"};
  for (const auto& [label, weights] : corpus.families) {
    if (weights.size() < 2) continue;
    const std::string key = "bloom:" + label + "|" + corpus.spec.describe();
    const std::string e1key = "e1:" + label + "|" + corpus.spec.describe();
    for (int si = 0; si < config.samples; ++si) {
      const Weight& mu = weights[static_cast<std::size_t>(si) % weights.size()];
      const Weight& lam = weights[(static_cast<std::size_t>(si) + 1) % weights.size()];
      const auto coefs = generate_partial_coefs(
          corpus.spec, config.complexity_in, config.complexity_out, config.block_count,
          split_seed(config.seed, 0x30000 + static_cast<std::uint64_t>(si)));
      const auto b =
          sample_function(corpus.spec, split_seed(config.seed, 0x31000 + static_cast<std::uint64_t>(si)));
      const auto f =
          sample_function(corpus.spec, split_seed(config.seed, 0x32000 + static_cast<std::uint64_t>(si)));
      double ratio = 0.0;
      try {
        ratio = bloom_ratio(b, coefs, f, mu, lam, config.p);
      } catch (const std::domain_error&) {
        continue;  // degenerate instance
      }
      track.hi(key, ratio);
      // E1 chain on the same instance
      const auto g =
          sample_function(corpus.spec, split_seed(config.seed, 0x33000 + static_cast<std::uint64_t>(si)));
      const auto bw = bloom_nu(mu, lam, config.p);
      const auto [lhs, rhs] = e1_dual_bound(b, coefs, f, g, bw.nu);
      double e1r = 0.0;
      if (rhs > 0.0) {
        e1r = lhs / rhs;
        track.hi(e1key, e1r);
      }
      push_row(out, {std::to_string(config.schema), config.suite, sanitize(label),
                     std::to_string(si), format_double(ratio), format_double(lhs),
                     format_double(rhs), format_double(e1r)});
    }
  }
}

void run_lemma52(const ExperimentConfig& config, ExperimentResult& out) {
  const Corpus corpus = build_corpus(config, config.seed);
  EntryTracker track{&out.fixture_entries};
  out.columns = {"schema", "suite", "instance", "lhs", "rhs", "ratio"};
  const std::string key =
      "lemma52:p=" + format_double(config.p) + ",q=" + format_double(config.q) + "|" +
      corpus.spec.describe();
  const auto family = corpus.omega;
  for (int si = 0; si < config.samples; ++si) {
    Lemma52Instance instance;
    Rng rng(split_seed(config.seed, 0x40000 + static_cast<std::uint64_t>(si)));
    const int groups = 1 + static_cast<int>(rng.below(3));
    for (int j = 0; j < groups; ++j) {
      instance.groups.emplace_back();
      const int items = 1 + static_cast<int>(rng.below(3));
      for (int k = 0; k < items; ++k) {
        auto seq = sample_coef_sequence(
            corpus.spec,
            split_seed(config.seed, 0x41000 + static_cast<std::uint64_t>(100 * si + 10 * j + k)),
            config.sequence_support);
        const double norm = bmo_prod(seq, 2.0, family).norm;
        if (norm > 0.0) seq.scale(rng.uniform(0.3, 1.0) / norm);
        instance.groups.back().push_back(
            {std::move(seq),
             sample_function(corpus.spec, split_seed(config.seed,
                                                     0x42000 + static_cast<std::uint64_t>(100 * si + 10 * j + k))),
             sample_function(corpus.spec, split_seed(config.seed,
                                                     0x43000 + static_cast<std::uint64_t>(100 * si + 10 * j + k)))});
      }
    }
    const Weight w = corpus.families.empty()
                         ? Weight{GridFunction(corpus.spec, 1.0)}
                         : corpus.families[0].second[static_cast<std::size_t>(si) %
                                                     corpus.families[0].second.size()];
    const auto [lhs, rhs] = lemma52_sides(instance, w, config.p, config.q);
    const double ratio = rhs > 0.0 ? lhs / rhs : 0.0;
    if (rhs > 0.0) track.hi(key, ratio);
    push_row(out, {std::to_string(config.schema), config.suite, std::to_string(si),
                   format_double(lhs), format_double(rhs), format_double(ratio)});
  }
}

void run_omega_families(const ExperimentConfig& config, ExperimentResult& out) {
  const GridSpec spec(config.depths);
  out.columns = {"schema", "suite", "instance", "all_rectangles", "random_unions", "level_sets",
                 "ru_over_all", "ls_over_all"};
  const auto all = omega_family(spec, OmegaFamilySpec{OmegaStrategy::AllRectangles}, 0);
  for (int si = 0; si < config.samples; ++si) {
    const auto seq = sample_coef_sequence(spec, split_seed(config.seed, 0x50000 + static_cast<std::uint64_t>(si)),
                                     config.sequence_support);
    OmegaFamilySpec unions{OmegaStrategy::RandomUnions, 4, 64, nullptr, {}};
    const auto ru = omega_family(spec, unions, split_seed(config.seed, 0x51000 + static_cast<std::uint64_t>(si)));
    const GridFunction level = sa(seq);
    OmegaFamilySpec levels{OmegaStrategy::LevelSets, 0, 0, &level, {}};
    for (int t = 1; t <= 8; ++t)
      levels.thresholds.push_back(level.max_abs() * t / 9.0);
    const auto ls = omega_family(spec, levels, 0);
    const double na = bmo_prod(seq, 2.0, all).norm;
    const double nr = bmo_prod(seq, 2.0, ru).norm;
    const double nl = ls.empty() ? 0.0 : bmo_prod(seq, 2.0, ls).norm;
    push_row(out, {std::to_string(config.schema), config.suite, std::to_string(si),
                   format_double(na), format_double(nr), format_double(nl),
                   format_double(na > 0 ? nr / na : 0.0), format_double(na > 0 ? nl / na : 0.0)});
  }
}

}  // namespace

const std::vector<std::string>& experiment_suites() {
  static const std::vector<std::string> suites = {
      "bmo-equivalence", "jn",    "lemma35", "cor36",   "dual-bmo",
      "maximal",         "paraproducts", "bloom", "lemma52", "omega-families"};
  return suites;
}

const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> suites = {
      "haar",     "weights",      "maximal", "bmo-exact", "bmo-equivalence",
      "paraproducts", "commutator-identity", "bloom",   "lemma52"};
  return suites;
}

ExperimentConfig standard_config(const std::string& suite) {
  ExperimentConfig config;
  config.suite = suite;
  config.seed = 20210401;

  const auto rbr = [](double rho) { return WeightRecipe::make_random_bounded_ratio(rho); };
  const auto standard_families = [&](int count, int axes) {
    std::vector<WeightFamilySpec> fams;
    fams.push_back({"rbr2", rbr(2.0), count, 16.0});
    fams.push_back({"rbr4", rbr(4.0), count, 16.0});
    std::vector<WeightRecipe> tensor_factors(static_cast<std::size_t>(axes), rbr(2.0));
    fams.push_back({"tensor", WeightRecipe::make_tensor(tensor_factors), count, 16.0});
    std::vector<double> exps(static_cast<std::size_t>(axes));
    for (int t = 0; t < axes; ++t) exps[static_cast<std::size_t>(t)] = t % 2 ? -0.3 : 0.4;
    fams.push_back({"power", WeightRecipe::make_power_like(exps), 1, 16.0});
    fams.push_back({"mix",
                    WeightRecipe::make_non_tensor_mix(WeightRecipe::make_tensor(tensor_factors),
                                                      rbr(3.0), 0.5),
                    count, 16.0});
    return fams;
  };

  if (suite == "bmo-equivalence") {
    config.depths = {4, 4};
    config.samples = 50;
    config.weights = standard_families(20, 2);
  } else if (suite == "jn" || suite == "lemma35" || suite == "cor36") {
    config.depths = {4, 4};
    config.samples = 10;
    config.weights = standard_families(10, 2);
  } else if (suite == "dual-bmo") {
    config.depths = {3, 3};
    config.samples = 5;
    config.weights = standard_families(4, 2);
  } else if (suite == "maximal") {
    config.depths = {4, 4};
    config.samples = 8;
    config.weights = standard_families(6, 2);
  } else if (suite == "paraproducts") {
    config.depths = {3, 3};
    config.samples = 50;
    config.sequence_support = 12;
    config.weights = standard_families(2, 2);
  } else if (suite == "bloom") {
    config.depths = {3, 3, 3};
    config.samples = 50;
    config.p = 2.0;
    config.block_count = 4;
    config.complexity_in = 1;
    config.complexity_out = 1;
    config.weights = standard_families(4, 3);
  } else if (suite == "lemma52") {
    config.depths = {3, 3};
    config.samples = 30;
    config.p = 2.0;
    config.q = 1.0;
    config.sequence_support = 10;
    config.weights = standard_families(4, 2);
  } else if (suite == "omega-families") {
    config.depths = {4, 4};
    config.samples = 20;
  } else {
    throw std::invalid_argument("standard_config: unknown suite '" + suite + "'");
  }
  return config;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  ExperimentResult out;
  if (config.suite == "bmo-equivalence")
    run_bmo_equivalence(config, out);
  else if (config.suite == "jn")
    run_jn(config, out);
  else if (config.suite == "lemma35")
    run_lemma35(config, out);
  else if (config.suite == "cor36")
    run_cor36(config, out);
  else if (config.suite == "dual-bmo")
    run_dual_bmo(config, out);
  else if (config.suite == "maximal")
    run_maximal(config, out);
  else if (config.suite == "paraproducts")
    run_paraproducts(config, out);
  else if (config.suite == "bloom")
    run_bloom(config, out);
  else if (config.suite == "lemma52")
    run_lemma52(config, out);
  else if (config.suite == "omega-families")
    run_omega_families(config, out);
  else
    throw std::invalid_argument("run_experiment: unknown suite '" + config.suite + "'");

  nlohmann::json keys = nlohmann::json::object();
  for (const auto& [key, entry] : out.fixture_entries) {
    nlohmann::json e;
    e["hi"] = entry.hi;
    if (entry.lo.has_value()) e["lo"] = *entry.lo;
    keys[key] = e;
  }
  out.summary["schema"] = config.schema;
  out.summary["suite"] = config.suite;
  out.summary["rows"] = out.rows.size();
  out.summary["config"] = config.to_json();
  out.summary["ratios"] = keys;
  return out;
}

std::string ExperimentResult::csv() const {
  std::string s;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) s += ",";
    s += columns[i];
  }
  s += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) s += ",";
      s += row[i];
    }
    s += "\n";
  }
  return s;
}

// ---------------------------------------------------------------------------
// Config JSON.

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig config;
  const auto fail = [](const std::string& pointer, const std::string& what) {
    throw std::invalid_argument("config error at " + pointer + ": " + what);
  };
  try {
    config.schema = j.value("schema", 1);
    if (config.schema != 1) fail("/schema", "unsupported schema version");
    if (!j.contains("suite")) fail("/suite", "missing");
    config.suite = j.at("suite").get<std::string>();
    if (j.contains("grid")) {
      if (!j.at("grid").contains("depths")) fail("/grid/depths", "missing");
      config.depths = j.at("grid").at("depths").get<std::vector<int>>();
    }
    config.seed = j.value("seed", config.seed);
    config.samples = j.value("samples", config.samples);
    config.sequence_support = j.value("sequence_support", config.sequence_support);
    if (j.contains("exponents")) {
      const auto& e = j.at("exponents");
      config.p = e.value("p", config.p);
      config.q = e.value("q", config.q);
      config.r = e.value("r", config.r);
    }
    if (j.contains("partial")) {
      const auto& e = j.at("partial");
      config.block_count = e.value("blocks", config.block_count);
      config.complexity_in = e.value("i1", config.complexity_in);
      config.complexity_out = e.value("j1", config.complexity_out);
    }
    if (j.contains("weights")) {
      config.weights.clear();
      std::size_t idx = 0;
      for (const auto& jf : j.at("weights")) {
        WeightFamilySpec fam;
        if (!jf.contains("label"))
          fail("/weights/" + std::to_string(idx) + "/label", "missing");
        fam.label = jf.at("label").get<std::string>();
        if (!jf.contains("recipe"))
          fail("/weights/" + std::to_string(idx) + "/recipe", "missing");
        fam.recipe = weight_recipe_from_json(jf.at("recipe"));
        fam.count = jf.value("count", fam.count);
        fam.a2_cap = jf.value("a2_cap", fam.a2_cap);
        config.weights.push_back(std::move(fam));
        ++idx;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config error: ") + e.what());
  }
  return config;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["schema"] = schema;
  j["suite"] = suite;
  j["grid"]["depths"] = depths;
  j["seed"] = seed;
  j["samples"] = samples;
  j["sequence_support"] = sequence_support;
  j["exponents"]["p"] = p;
  j["exponents"]["q"] = q;
  j["exponents"]["r"] = r;
  j["partial"]["blocks"] = block_count;
  j["partial"]["i1"] = complexity_in;
  j["partial"]["j1"] = complexity_out;
  nlohmann::json fams = nlohmann::json::array();
  for (const auto& fam : weights) {
    nlohmann::json jf;
    jf["label"] = fam.label;
    jf["recipe"] = dyadic::to_json(fam.recipe);
    jf["count"] = fam.count;
    jf["a2_cap"] = fam.a2_cap;
    fams.push_back(jf);
  }
  j["weights"] = fams;
  return j;
}

// ---------------------------------------------------------------------------
// Fixture IO.

nlohmann::json CalibrationFixture::to_json() const {
  nlohmann::json j;
  j["schema"] = schema;
  j["multiplier"] = multiplier;
  nlohmann::json js = nlohmann::json::object();
  for (const auto& [suite, entries] : suites) {
    nlohmann::json je = nlohmann::json::object();
    for (const auto& [key, entry] : entries) {
      nlohmann::json e;
      e["hi"] = entry.hi;
      if (entry.lo.has_value()) e["lo"] = *entry.lo;
      je[key] = e;
    }
    js[suite] = je;
  }
  j["suites"] = js;
  return j;
}

CalibrationFixture CalibrationFixture::from_json(const nlohmann::json& j) {
  CalibrationFixture fixture;
  fixture.schema = j.value("schema", 1);
  fixture.multiplier = j.value("multiplier", 2.0);
  if (j.contains("suites"))
    for (const auto& [suite, entries] : j.at("suites").items())
      for (const auto& [key, e] : entries.items()) {
        FixtureEntry entry;
        entry.hi = e.at("hi").get<double>();
        if (e.contains("lo")) entry.lo = e.at("lo").get<double>();
        fixture.suites[suite][key] = entry;
      }
  return fixture;
}

CalibrationFixture CalibrationFixture::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open fixture file: " + path);
  nlohmann::json j;
  in >> j;
  return from_json(j);
}

void CalibrationFixture::save(const std::string& path, bool force) const {
  if (!force) {
    std::ifstream probe(path);
    if (probe.good())
      throw std::runtime_error("fixture file exists, pass --force to overwrite: " + path);
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write fixture file: " + path);
  out << to_json().dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Verification suites.

namespace {

void check(VerifyReport& report, const std::string& name, bool pass, const std::string& detail) {
  report.checks.push_back({name, pass, detail});
}

void compare_fixture(VerifyReport& report, const CalibrationFixture* fixture,
                     const std::string& suite, const ExperimentResult& fresh) {
  if (fixture == nullptr) {
    check(report, suite + ": fixture", false, "no calibration fixture supplied");
    return;
  }
  const auto it = fixture->suites.find(suite);
  if (it == fixture->suites.end()) {
    check(report, suite + ": fixture", false, "fixture has no entries for this suite");
    return;
  }
  const double mult = fixture->multiplier;
  for (const auto& [key, stored] : it->second) {
    const auto fit = fresh.fixture_entries.find(key);
    if (fit == fresh.fixture_entries.end()) {
      check(report, key, false, "missing in fresh run");
      continue;
    }
    bool ok = fit->second.hi <= stored.hi * mult + 1e-12;
    std::string detail = "hi " + format_double(fit->second.hi) + " vs stored " +
                         format_double(stored.hi) + " x" + format_double(mult);
    if (stored.lo.has_value()) {
      const double fresh_lo = fit->second.lo.value_or(0.0);
      ok = ok && fresh_lo >= *stored.lo / mult - 1e-12;
      detail += ", lo " + format_double(fresh_lo) + " vs stored " + format_double(*stored.lo);
    }
    check(report, key, ok, detail);
  }
}

ExperimentConfig reseeded(const std::string& suite, std::uint64_t seed) {
  ExperimentConfig config = standard_config(suite);
  if (seed != 0) config.seed = split_seed(config.seed, seed);
  return config;
}

void verify_haar(VerifyReport& report, std::uint64_t seed) {
  for (const auto depths : {std::vector<int>{5, 5}, std::vector<int>{3, 3, 3}}) {
    GridSpec spec(depths);
    double worst_rt = 0.0, worst_pv = 0.0;
    for (int s = 0; s < 20; ++s) {
      const auto f = sample_function(spec, split_seed(seed, 0x600 + static_cast<std::uint64_t>(s)));
      const auto coefs = forward_transform(f);
      const auto back = inverse_transform(coefs);
      double rt = 0.0, l2 = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i) {
        rt = std::max(rt, std::fabs(back[i] - f[i]));
        l2 += f[i] * f[i];
      }
      l2 *= spec.cell_volume();
      worst_rt = std::max(worst_rt, rt);
      worst_pv = std::max(worst_pv, std::fabs(coefs.parseval_square_sum() - l2));
    }
    check(report, "round-trip " + spec.describe(), worst_rt <= 1e-10, format_double(worst_rt));
    check(report, "parseval " + spec.describe(), worst_pv <= 1e-10, format_double(worst_pv));
  }
}

void verify_weights(VerifyReport& report, std::uint64_t seed) {
  GridSpec spec({3, 3});
  double worst_dual = 0.0;
  bool monotone = true, iterated_ok = true, scale_ok = true;
  for (int s = 0; s < 50; ++s) {
    const Weight w = generate_weight(spec, WeightRecipe::make_random_bounded_ratio(4.0),
                                     split_seed(seed, 0x700 + static_cast<std::uint64_t>(s)));
    const double a15 = w.ap_constant(1.5), a2 = w.ap_constant(2.0), a4 = w.ap_constant(4.0);
    monotone = monotone && a2 <= a15 + 1e-12 && a4 <= a2 + 1e-12 && a4 >= 1.0 - 1e-12;
    GridFunction scaled = w.values();
    scaled *= 11.0;
    scale_ok = scale_ok && std::fabs(Weight{std::move(scaled)}.ap_constant(2.0) - a2) <= 1e-12 * a2;
    GridFunction sigma(spec, 0.0);
    for (std::size_t i = 0; i < sigma.size(); ++i) sigma[i] = 1.0 / w[i];  // p = 2 dual weight
    worst_dual = std::max(worst_dual, std::fabs(Weight{std::move(sigma)}.ap_constant(2.0) - a2));
    const auto [i0, i1] = iterated_ap(w, 2.0);
    iterated_ok = iterated_ok && i0 <= a2 + 1e-12 && i1 <= a2 + 1e-12;
  }
  check(report, "ap monotone in p", monotone, "");
  check(report, "ap scale invariant", scale_ok, "");
  check(report, "ap duality", worst_dual <= 1e-10, format_double(worst_dual));
  check(report, "iterated slices below rectangle constant", iterated_ok, "");
}

void verify_bmo_exact(VerifyReport& report, std::uint64_t seed) {
  GridSpec spec({4, 4});
  const auto family = omega_family(spec, OmegaFamilySpec{OmegaStrategy::AllRectangles}, 0);
  const Weight unit{GridFunction(spec, 1.0)};
  double worst_collapse = 0.0, worst_lift = 0.0, worst_holder = 0.0;
  for (int s = 0; s < 50; ++s) {
    const auto seq = sample_coef_sequence(spec, split_seed(seed, 0x800 + static_cast<std::uint64_t>(s)), 16);
    for (double p : {1.0, 2.0, 4.0})
      worst_collapse = std::max(worst_collapse,
                                std::fabs(bmo_prod_w(seq, p, unit, family).norm -
                                          bmo_prod(seq, p, family).norm));
    worst_collapse = std::max(worst_collapse, std::fabs(bmo_prod_weighted(seq, unit, family).norm -
                                                        bmo_prod(seq, 2.0, family).norm));
    const Weight w = generate_weight(spec, WeightRecipe::make_random_bounded_ratio(4.0),
                                     split_seed(seed, 0x900 + static_cast<std::uint64_t>(s)));
    worst_lift = std::max(worst_lift, std::fabs(bmo_prod_weighted(lift_aw(seq, w), w, family).norm -
                                                bmo_prod_w(seq, 2.0, w, family).norm));
    const double n1 = bmo_prod(seq, 1.0, family).norm;
    const double n2 = bmo_prod(seq, 2.0, family).norm;
    const double n4 = bmo_prod(seq, 4.0, family).norm;
    worst_holder = std::max({worst_holder, n1 - n2, n2 - n4});
  }
  check(report, "w=1 collapse", worst_collapse <= 1e-12, format_double(worst_collapse));
  check(report, "lift equality", worst_lift <= 1e-12, format_double(worst_lift));
  check(report, "holder direction", worst_holder <= 1e-12, format_double(worst_holder));
}

void verify_commutator_identity(VerifyReport& report, std::uint64_t seed) {
  GridSpec spec({3, 3, 3});
  double worst = 0.0;
  for (int s = 0; s < 20; ++s) {
    const auto coefs = generate_partial_coefs(spec, s % 3 == 0 ? 0 : 1, s % 2, 1 + s % 5,
                                              split_seed(seed, 0xA00 + static_cast<std::uint64_t>(s)));
    const auto b = sample_function(spec, split_seed(seed, 0xB00 + static_cast<std::uint64_t>(s)));
    const auto f = sample_function(spec, split_seed(seed, 0xC00 + static_cast<std::uint64_t>(s)));
    const auto dec = decompose(b, coefs, f);
    const auto direct = commutator(b, coefs, f);
    GridFunction sum = dec.sum();
    sum -= direct;
    worst = std::max(worst, sum.max_abs());
  }
  check(report, "decomposition identity", worst <= 1e-10, format_double(worst));

  const auto coefs = generate_partial_coefs(spec, 1, 1, 4, split_seed(seed, 0xD00));
  const auto f = sample_function(spec, split_seed(seed, 0xD01));
  GridFunction cb(spec, 3.75);
  const double resid = commutator(cb, coefs, f).max_abs();
  check(report, "constant symbol annihilates", resid <= 1e-12, format_double(resid));
}

void verify_exact_maximal(VerifyReport& report, std::uint64_t seed) {
  GridSpec spec({3, 3});
  const Weight unit{GridFunction(spec, 1.0)};
  double worst_reduce = 0.0, worst_upper = 0.0;
  bool sublinear = true;
  for (int s = 0; s < 20; ++s) {
    const auto f = sample_function(spec, split_seed(seed, 0xE00 + static_cast<std::uint64_t>(s)));
    const auto g = sample_function(spec, split_seed(seed, 0xF00 + static_cast<std::uint64_t>(s)));
    const auto mw = weighted_maximal(f, unit);
    const auto md = maximal(f);
    for (std::size_t i = 0; i < mw.size(); ++i)
      worst_reduce = std::max(worst_reduce, std::fabs(mw[i] - md[i]));
    GridFunction fg = f;
    fg += g;
    const auto mfg = maximal(fg);
    const auto mg = maximal(g);
    for (std::size_t i = 0; i < mfg.size(); ++i)
      sublinear = sublinear && mfg[i] <= md[i] + mg[i] + 1e-13;
    worst_upper = std::max(worst_upper,
                           lp_norm(square_function(f, SquareMode::full(2)), 2.0) - lp_norm(f, 2.0));
  }
  check(report, "weighted maximal reduces at w=1", worst_reduce == 0.0, format_double(worst_reduce));
  check(report, "maximal sublinear", sublinear, "");
  check(report, "square function L2 upper bound", worst_upper <= 1e-12, format_double(worst_upper));
}

void verify_exact_paraproducts(VerifyReport& report, std::uint64_t seed) {
  GridSpec spec({2, 2});
  const auto syms = all_full_symmetries();
  double worst = 0.0;
  for (std::size_t si = 0; si < syms.size(); ++si) {
    const auto seq = sample_coef_sequence(spec, split_seed(seed, 0x1000 + si), 6);
    const auto f1 = sample_function(spec, split_seed(seed, 0x1100 + si));
    const auto f2 = sample_function(spec, split_seed(seed, 0x1200 + si));
    const auto fast = full_paraproduct(seq, f1, f2, syms[si]);
    const auto slow = ref::full_paraproduct(seq, f1, f2, syms[si]);
    for (std::size_t i = 0; i < fast.size(); ++i)
      worst = std::max(worst, std::fabs(fast[i] - slow[i]));
  }
  check(report, "full paraproduct oracle (nine symmetries)", worst <= 1e-12, format_double(worst));

  GridSpec spec3({2, 2, 2});
  double worst3 = 0.0;
  for (int s = 0; s < 5; ++s) {
    const auto coefs = generate_partial_coefs(spec3, s % 2, (s + 1) % 2, 3,
                                              split_seed(seed, 0x1300 + static_cast<std::uint64_t>(s)));
    const auto f = sample_function(spec3, split_seed(seed, 0x1400 + static_cast<std::uint64_t>(s)));
    const auto fast = partial_paraproduct(coefs, f);
    const auto slow = ref::partial_paraproduct(coefs, f);
    for (std::size_t i = 0; i < fast.size(); ++i)
      worst3 = std::max(worst3, std::fabs(fast[i] - slow[i]));
  }
  check(report, "partial paraproduct oracle", worst3 <= 1e-12, format_double(worst3));
}

void verify_exact_bloom(VerifyReport& report, std::uint64_t seed) {
  GridSpec spec({2, 2, 2});
  const auto coefs = generate_partial_coefs(spec, 1, 0, 3, split_seed(seed, 0x1500));
  const auto b = sample_function(spec, split_seed(seed, 0x1501));
  const auto f = sample_function(spec, split_seed(seed, 0x1502));
  const Weight mu = generate_weight(spec, WeightRecipe::make_random_bounded_ratio(2.0),
                                    split_seed(seed, 0x1503));
  const Weight lam = generate_weight(spec, WeightRecipe::make_random_bounded_ratio(2.0),
                                     split_seed(seed, 0x1504));
  const double base = bloom_ratio(b, coefs, f, mu, lam, 2.0);
  GridFunction b2 = b;
  b2 *= 2.0;
  GridFunction f3 = f;
  f3 *= 3.0;
  GridFunction mu5 = mu.values();
  mu5 *= 5.0;
  GridFunction lam5 = lam.values();
  lam5 *= 5.0;
  const double worst = std::max(
      {std::fabs(bloom_ratio(b2, coefs, f, mu, lam, 2.0) - base),
       std::fabs(bloom_ratio(b, coefs, f3, mu, lam, 2.0) - base),
       std::fabs(bloom_ratio(b, coefs, f, Weight{std::move(mu5)}, Weight{std::move(lam5)}, 2.0) -
                 base)});
  check(report, "bloom ratio scaling invariance", worst <= 1e-12 * std::max(1.0, base),
        format_double(worst));
}

void verify_exact_lemma52(VerifyReport& report) {
  GridSpec spec({2, 2});
  const Weight unit{GridFunction(spec, 1.0)};
  Lemma52Instance single;
  single.groups.emplace_back();
  CoefSequence a(spec);
  a.set(DyadicRectangle(DyadicInterval{0, 0, 0}, DyadicInterval{1, 0, 0}), 1.0);
  GridFunction f(spec, 0.0), g(spec, 0.0);
  const auto h0 = haar_function(spec, {0, 0, 0}, true);
  const auto h1 = haar_function(spec, {1, 0, 0}, true);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto c = spec.cell_coords(i);
    f[i] = h0[static_cast<std::size_t>(c[0])];
    g[i] = h1[static_cast<std::size_t>(c[1])];
  }
  single.groups[0].push_back({std::move(a), std::move(f), std::move(g)});
  const auto [lhs, rhs] = lemma52_sides(single, unit, 2.0, 1.0);
  check(report, "single-rectangle equality", std::fabs(lhs - rhs) <= 1e-12,
        format_double(std::fabs(lhs - rhs)));
}

}  // namespace

nlohmann::json VerifyReport::to_json() const {
  nlohmann::json j;
  j["suite"] = suite;
  j["pass"] = pass();
  nlohmann::json checks_json = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json jc;
    jc["name"] = c.name;
    jc["pass"] = c.pass;
    jc["detail"] = c.detail;
    checks_json.push_back(jc);
  }
  j["checks"] = checks_json;
  return j;
}

VerifyReport run_verify(const std::string& suite, const CalibrationFixture* fixture,
                        std::uint64_t seed) {
  VerifyReport report;
  report.suite = suite;
  if (suite == "haar") {
    verify_haar(report, seed);
  } else if (suite == "weights") {
    verify_weights(report, seed);
  } else if (suite == "bmo-exact") {
    verify_bmo_exact(report, seed);
  } else if (suite == "commutator-identity") {
    verify_commutator_identity(report, seed);
  } else if (suite == "maximal") {
    verify_exact_maximal(report, seed);
    compare_fixture(report, fixture, "maximal", run_experiment(reseeded("maximal", seed)));
  } else if (suite == "bmo-equivalence") {
    for (const std::string sub : {"bmo-equivalence", "jn", "lemma35", "cor36", "dual-bmo"})
      compare_fixture(report, fixture, sub, run_experiment(reseeded(sub, seed)));
  } else if (suite == "paraproducts") {
    verify_exact_paraproducts(report, seed);
    compare_fixture(report, fixture, "paraproducts",
                    run_experiment(reseeded("paraproducts", seed)));
  } else if (suite == "bloom") {
    verify_exact_bloom(report, seed);
    compare_fixture(report, fixture, "bloom", run_experiment(reseeded("bloom", seed)));
  } else if (suite == "lemma52") {
    verify_exact_lemma52(report);
    compare_fixture(report, fixture, "lemma52", run_experiment(reseeded("lemma52", seed)));
  } else {
    throw std::invalid_argument("run_verify: unknown suite '" + suite + "'");
  }
  return report;
}

}  // namespace dyadic
