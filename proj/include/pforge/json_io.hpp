#pragma once

#include <string>

#include <json.hpp>

#include "pforge/pathkit.hpp"
#include "pforge/penalty_builder.hpp"
#include "pforge/verifier.hpp"

namespace pforge {

using nlohmann::json;

json loss_to_json(const LossSpec& spec);
LossSpec loss_from_json(const json& j);

json path_to_json(const SearchPath& path);
SearchPath path_from_json(const json& j);

json admissibility_to_json(const AdmissibilityReport& report, const PathGroups& groups);
json region_to_json(const UltimateRegion& region);

json model_to_json(const PenaltyModel& model);
PenaltyModel model_from_json(const json& j);

json schedule_to_json(const LambdaSchedule& schedule);
LambdaSchedule schedule_from_json(const json& j);

json certificates_to_json(const std::vector<TangencyCertificate>& certs);

json verification_to_json(const VerificationReport& report);

void write_json_file(const std::string& file, const json& j);
json read_json_file(const std::string& file);

}  // namespace pforge
