#ifndef DELAN_SERIALIZE_HPP_
#define DELAN_SERIALIZE_HPP_

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "delan/baselines.hpp"
#include "delan/model.hpp"

namespace delan {

// All models serialize to one JSON document family, tagged by "kind"
// ("delan" | "ffnn" | "si") and carrying format_version 1. Weight arrays
// are flattened row-major.

nlohmann::json to_json(const DelanParams& params);
nlohmann::json to_json(const FfnnParams& params);
nlohmann::json to_json(const SiModel& model);

DelanParams delan_from_json(const nlohmann::json& doc);
FfnnParams ffnn_from_json(const nlohmann::json& doc);
SiModel si_from_json(const nlohmann::json& doc);

void save_model(const nlohmann::json& doc, const std::string& path);
nlohmann::json load_model(const std::string& path);

std::string model_kind(const nlohmann::json& doc);

}  // namespace delan

#endif  // DELAN_SERIALIZE_HPP_
