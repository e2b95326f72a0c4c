#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "msgame/analysis.hpp"
#include "msgame/equilibrium.hpp"
#include "msgame/exact.hpp"
#include "msgame/greedy.hpp"
#include "msgame/model.hpp"

namespace msgame::io {

using nlohmann::json;

/// {"stages":[{"machines":2,"speed":"5"}],"jobs":[{"size":"10"}]}
/// Numeric fields may be strings ("0.1", "1e6", "3/4") or JSON integers.
/// Throws ParseError on malformed input and ValidationError on invalid values.
Instance parse_instance(const std::string& text);
Instance instance_from_json(const json& doc);
json to_json(const Instance& instance);

/// {"exact": "a/b", "decimal": "x.xxxxxx"}
json number(const Scalar& x, int precision = 6);

json to_json(const ScheduleTrace& trace, int precision = 6);
json to_json(const std::vector<GreedyEvent>& events, int precision = 6);
json to_json(const Plan& plan);
Plan plan_from_json(const json& doc);
json to_json(const OptResult& result, bool with_witness, int precision = 6);
json to_json(const BoundReport& report, int precision = 6);
json to_json(const PoAReport& report, int precision = 6);
json to_json(const EquilibriumResult& result, const ActionModel& model, int precision = 6);
json to_json(const GreedyCertificate& certificate, int precision = 6);

/// Columns job,stage,machine,release,start,completion (exact), then the
/// three times again as decimals.
std::string trace_csv(const ScheduleTrace& trace, int precision = 6);

/// One row per policy and job: release and completion for every stage.
std::string comparison_csv(const EquilibriumResult& result, int precision = 6);

} // namespace msgame::io
