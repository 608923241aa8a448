#include "catdist/distcore/serialization.hpp"

#include "catdist/common/errors.hpp"

namespace catdist::dist {

nlohmann::json to_json(const SupportSpec& s) {
  return {{"v_min", s.v_min()}, {"v_max", s.v_max()}, {"m", s.m()}};
}

SupportSpec support_from_json(const nlohmann::json& j) {
  try {
    return SupportSpec(j.at("v_min").get<double>(), j.at("v_max").get<double>(),
                       j.at("m").get<std::size_t>());
  } catch (const nlohmann::json::exception& e) {
    throw InvalidSupport(std::string("malformed support: ") + e.what());
  }
}

nlohmann::json to_json(const CategoricalDistribution& x) {
  nlohmann::json out;
  if (x.support()) {
    out = to_json(*x.support());
  } else {
    out["atoms"] = std::vector<double>(x.atoms().begin(), x.atoms().end());
  }
  out["probs"] = std::vector<double>(x.probs().begin(), x.probs().end());
  return out;
}

CategoricalDistribution distribution_from_json(const nlohmann::json& j) {
  try {
    auto probs = j.at("probs").get<std::vector<double>>();
    if (j.contains("atoms")) {
      return CategoricalDistribution(j.at("atoms").get<std::vector<double>>(), std::move(probs));
    }
    return CategoricalDistribution(support_from_json(j), std::move(probs));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidDistribution(std::string("malformed distribution: ") + e.what());
  }
}

}  // namespace catdist::dist
