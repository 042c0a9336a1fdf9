#pragma once

#include <string>

#include <json.hpp>

#include "dyadic/bmo.hpp"
#include "dyadic/haar.hpp"
#include "dyadic/lattice.hpp"
#include "dyadic/paraproducts.hpp"
#include "dyadic/weights.hpp"

namespace dyadic {

// JSON formats:
//  GridSpec       {"m": 2, "depths": [3,3]}
//  GridFunction   {"spec": ..., "values": [...]}   (row-major, axis 0 slowest)
//  OmegaSet       {"spec": ..., "cells": [...]}    (sorted cell indices)
//  HaarCoefficients {"spec": ..., "coefficients": {"t:k:j|t:k:j;eta": v}}
//  CoefSequence   {"spec": ..., "entries": {"k:j|k:j": v}}
//  PartialParaproductCoefs
//                 {"spec": ..., "i1": .., "j1": ..,
//                  "blocks": [{"k1": "k:j", "i1": "k:j", "j1": "k:j",
//                              "inner": {"k:j|k:j": v}}]}
//  WeightRecipe   {"recipe": "RandomBoundedRatio", "rho": 4}

nlohmann::json to_json(const GridSpec& spec);
GridSpec grid_spec_from_json(const nlohmann::json& j);

nlohmann::json to_json(const GridFunction& f);
GridFunction grid_function_from_json(const nlohmann::json& j);

nlohmann::json to_json(const OmegaSet& omega);
OmegaSet omega_set_from_json(const nlohmann::json& j);

nlohmann::json to_json(const HaarCoefficients& coefs);
HaarCoefficients haar_coefficients_from_json(const nlohmann::json& j);

nlohmann::json to_json(const CoefSequence& coefs);
CoefSequence coef_sequence_from_json(const nlohmann::json& j);

nlohmann::json to_json(const PartialParaproductCoefs& coefs);
PartialParaproductCoefs partial_coefs_from_json(const nlohmann::json& j);

nlohmann::json to_json(const WeightRecipe& recipe);
WeightRecipe weight_recipe_from_json(const nlohmann::json& j);

}  // namespace dyadic
