#pragma once

#include <json.hpp>

#include "catdist/distcore/categorical.hpp"

namespace catdist::dist {

// {v_min, v_max, m, probs} for uniform grids, {atoms, probs} otherwise.
nlohmann::json to_json(const CategoricalDistribution& x);
CategoricalDistribution distribution_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SupportSpec& s);
SupportSpec support_from_json(const nlohmann::json& j);

}  // namespace catdist::dist
