#include "dyadic/serialization.hpp"

#include <sstream>
#include <stdexcept>

namespace dyadic {

namespace {

std::string interval_token(const DyadicInterval& iv) {
  return std::to_string(iv.scale) + ":" + std::to_string(iv.pos);
}

DyadicInterval interval_from_token(int axis, const std::string& token) {
  const auto colon = token.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("bad interval token: " + token);
  return {axis, std::stoi(token.substr(0, colon)), std::stoi(token.substr(colon + 1))};
}

std::string rect_token(const DyadicRectangle& rect) {
  std::string s;
  for (int t = 0; t < rect.param_count(); ++t) {
    if (t) s += "|";
    s += interval_token(rect.interval(t));
  }
  return s;
}

DyadicRectangle rect_from_token(const GridSpec& spec, const std::string& token) {
  std::array<DyadicInterval, 3> iv{};
  std::stringstream ss(token);
  std::string part;
  int t = 0;
  while (std::getline(ss, part, '|')) {
    if (t >= spec.param_count()) throw std::invalid_argument("bad rectangle token: " + token);
    iv[static_cast<std::size_t>(t)] = interval_from_token(t, part);
    ++t;
  }
  if (t != spec.param_count()) throw std::invalid_argument("bad rectangle token: " + token);
  return DyadicRectangle(std::span<const DyadicInterval>(iv.data(), static_cast<std::size_t>(t)));
}

}  // namespace

nlohmann::json to_json(const GridSpec& spec) {
  nlohmann::json j;
  j["m"] = spec.param_count();
  std::vector<int> depths;
  for (int t = 0; t < spec.param_count(); ++t) depths.push_back(spec.depth(t));
  j["depths"] = depths;
  return j;
}

GridSpec grid_spec_from_json(const nlohmann::json& j) {
  const auto depths = j.at("depths").get<std::vector<int>>();
  if (j.contains("m") && j.at("m").get<int>() != static_cast<int>(depths.size()))
    throw std::invalid_argument("grid spec: m does not match depths");
  return GridSpec(depths);
}

nlohmann::json to_json(const GridFunction& f) {
  nlohmann::json j;
  j["spec"] = to_json(f.spec());
  j["values"] = std::vector<double>(f.values().begin(), f.values().end());
  return j;
}

GridFunction grid_function_from_json(const nlohmann::json& j) {
  return GridFunction(grid_spec_from_json(j.at("spec")), j.at("values").get<std::vector<double>>());
}

nlohmann::json to_json(const OmegaSet& omega) {
  nlohmann::json j;
  j["spec"] = to_json(omega.spec());
  j["cells"] = omega.sorted_cells();
  return j;
}

OmegaSet omega_set_from_json(const nlohmann::json& j) {
  const GridSpec spec = grid_spec_from_json(j.at("spec"));
  const auto cells = j.at("cells").get<std::vector<std::size_t>>();
  return OmegaSet::from_cells(spec, cells);
}

nlohmann::json to_json(const HaarCoefficients& coefs) {
  const GridSpec& spec = coefs.spec();
  nlohmann::json entries = nlohmann::json::object();
  for (std::size_t i = 0; i < spec.total_cells(); ++i) {
    if (coefs[i] == 0.0) continue;
    const auto c = spec.cell_coords(i);
    std::string key;
    std::string eta;
    for (int t = 0; t < spec.param_count(); ++t) {
      const DyadicInterval iv = HaarCoefficients::axis_interval(t, c[static_cast<std::size_t>(t)]);
      if (t) key += "|";
      key += std::to_string(t) + ":" + interval_token(iv);
      eta += c[static_cast<std::size_t>(t)] == 0 ? "0" : "1";
    }
    entries[key + ";" + eta] = coefs[i];
  }
  nlohmann::json j;
  j["spec"] = to_json(spec);
  j["coefficients"] = entries;
  return j;
}

HaarCoefficients haar_coefficients_from_json(const nlohmann::json& j) {
  const GridSpec spec = grid_spec_from_json(j.at("spec"));
  HaarCoefficients out(spec);
  for (const auto& [key, value] : j.at("coefficients").items()) {
    const auto semi = key.find(';');
    if (semi == std::string::npos) throw std::invalid_argument("bad coefficient key: " + key);
    const std::string rect_part = key.substr(0, semi);
    const std::string eta = key.substr(semi + 1);
    std::stringstream ss(rect_part);
    std::string part;
    std::array<int, 3> idx{0, 0, 0};
    int t = 0;
    while (std::getline(ss, part, '|')) {
      const auto first_colon = part.find(':');
      const int axis = std::stoi(part.substr(0, first_colon));
      if (axis != t) throw std::invalid_argument("bad coefficient key: " + key);
      const DyadicInterval iv = interval_from_token(axis, part.substr(first_colon + 1));
      const bool canc = eta.size() > static_cast<std::size_t>(t) && eta[static_cast<std::size_t>(t)] == '1';
      idx[static_cast<std::size_t>(t)] = HaarCoefficients::axis_index(iv, canc);
      ++t;
    }
    if (t != spec.param_count()) throw std::invalid_argument("bad coefficient key: " + key);
    out.mutable_data()[spec.cell_index(idx)] = value.get<double>();
  }
  return out;
}

nlohmann::json to_json(const CoefSequence& coefs) {
  nlohmann::json entries = nlohmann::json::object();
  for (const auto& e : coefs.entries()) entries[rect_token(e.rect)] = e.value;
  nlohmann::json j;
  j["spec"] = to_json(coefs.spec());
  j["entries"] = entries;
  return j;
}

CoefSequence coef_sequence_from_json(const nlohmann::json& j) {
  const GridSpec spec = grid_spec_from_json(j.at("spec"));
  CoefSequence out(spec);
  for (const auto& [key, value] : j.at("entries").items())
    out.set(rect_from_token(spec, key), value.get<double>());
  return out;
}

nlohmann::json to_json(const PartialParaproductCoefs& coefs) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& block : coefs.blocks()) {
    nlohmann::json jb;
    jb["k1"] = interval_token(block.coarse);
    jb["i1"] = interval_token(block.fine_in);
    jb["j1"] = interval_token(block.fine_out);
    nlohmann::json inner = nlohmann::json::object();
    for (const auto& e : block.inner.entries()) inner[rect_token(e.rect)] = e.value;
    jb["inner"] = inner;
    blocks.push_back(jb);
  }
  nlohmann::json j;
  j["spec"] = to_json(coefs.spec());
  j["i1"] = coefs.complexity_in();
  j["j1"] = coefs.complexity_out();
  j["blocks"] = blocks;
  return j;
}

PartialParaproductCoefs partial_coefs_from_json(const nlohmann::json& j) {
  const GridSpec spec = grid_spec_from_json(j.at("spec"));
  PartialParaproductCoefs out(spec, j.at("i1").get<int>(), j.at("j1").get<int>());
  for (const auto& jb : j.at("blocks")) {
    CoefSequence inner(out.inner_spec());
    for (const auto& [key, value] : jb.at("inner").items())
      inner.set(rect_from_token(out.inner_spec(), key), value.get<double>());
    out.add_block({interval_from_token(0, jb.at("k1").get<std::string>()),
                   interval_from_token(0, jb.at("i1").get<std::string>()),
                   interval_from_token(0, jb.at("j1").get<std::string>()), std::move(inner)});
  }
  return out;
}

nlohmann::json to_json(const WeightRecipe& recipe) {
  nlohmann::json j;
  switch (recipe.kind) {
    case WeightRecipe::Kind::Constant:
      j["recipe"] = "Constant";
      j["c"] = recipe.constant;
      break;
    case WeightRecipe::Kind::RandomBoundedRatio:
      j["recipe"] = "RandomBoundedRatio";
      j["rho"] = recipe.ratio;
      break;
    case WeightRecipe::Kind::PowerLike:
      j["recipe"] = "PowerLike";
      j["exponents"] = recipe.exponents;
      break;
    case WeightRecipe::Kind::Tensor: {
      j["recipe"] = "Tensor";
      nlohmann::json factors = nlohmann::json::array();
      for (const auto& f : recipe.factors) factors.push_back(to_json(f));
      j["factors"] = factors;
      break;
    }
    case WeightRecipe::Kind::NonTensorMix: {
      j["recipe"] = "NonTensorMix";
      nlohmann::json factors = nlohmann::json::array();
      for (const auto& f : recipe.factors) factors.push_back(to_json(f));
      j["factors"] = factors;
      j["mixing"] = recipe.mixing;
      break;
    }
  }
  return j;
}

WeightRecipe weight_recipe_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("recipe").get<std::string>();
  if (kind == "Constant") return WeightRecipe::make_constant(j.at("c").get<double>());
  if (kind == "RandomBoundedRatio")
    return WeightRecipe::make_random_bounded_ratio(j.at("rho").get<double>());
  if (kind == "PowerLike")
    return WeightRecipe::make_power_like(j.at("exponents").get<std::vector<double>>());
  if (kind == "Tensor") {
    std::vector<WeightRecipe> factors;
    for (const auto& f : j.at("factors")) factors.push_back(weight_recipe_from_json(f));
    return WeightRecipe::make_tensor(std::move(factors));
  }
  if (kind == "NonTensorMix") {
    std::vector<WeightRecipe> factors;
    for (const auto& f : j.at("factors")) factors.push_back(weight_recipe_from_json(f));
    if (factors.size() != 2) throw std::invalid_argument("NonTensorMix needs two factors");
    return WeightRecipe::make_non_tensor_mix(factors[0], factors[1],
                                             j.value("mixing", 0.5));
  }
  throw std::invalid_argument("unknown weight recipe: " + kind);
}

}  // namespace dyadic
