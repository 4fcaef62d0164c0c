#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "mcm/core.hpp"

namespace mcm {

nlohmann::json to_json(const Instance& instance);
Instance instance_from_json(const nlohmann::json& j);

// A file holds either a single instance object or a bundle
// {"instances": [...]} (the footnote pair is written as a bundle).
std::vector<Instance> read_instances(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace mcm
