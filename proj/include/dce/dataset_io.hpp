#pragma once

#include <string>

#include "json.hpp"

#include "dce/data.hpp"

namespace dce {

// Line-delimited JSON dataset file: one self-describing header line followed
// by one record per session, sorted by (customer id, login time). The format
// round-trips losslessly.
void save_dataset(const std::string& path, const Dataset& ds);
Dataset load_dataset(const std::string& path);

nlohmann::json gen_config_to_json(const GenConfig& cfg);
GenConfig gen_config_from_json(const nlohmann::json& j);

// Counts and empirical label rates, used by the CLI summary.
nlohmann::json dataset_summary(const Dataset& ds);

}  // namespace dce
