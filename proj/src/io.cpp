#include "msgame/io.hpp"

#include <sstream>

namespace msgame::io {

namespace {

Scalar scalar_field(const json& value, const std::string& where) {
    if (value.is_string()) {
        return Scalar::parse(value.get<std::string>());
    }
    if (value.is_number_integer()) {
        return Scalar::parse(std::to_string(value.get<long long>()));
    }
    if (value.is_number_float()) {
        // Exact decimal form of what the document wrote is lost in a float;
        // insist on strings so values stay exact.
        throw ParseError(where + ": non-integer numbers must be given as strings, e.g. \"0.1\"");
    }
    throw ParseError(where + ": expected a number or numeric string");
}

std::size_t count_field(const json& value, const std::string& where) {
    if (value.is_number_unsigned() || (value.is_number_integer() && value.get<long long>() >= 0)) {
        return value.get<std::size_t>();
    }
    if (value.is_string()) {
        const Scalar s = Scalar::parse(value.get<std::string>());
        if (s.sign() >= 0 && s.is_integer() && s.raw().get_num().fits_ulong_p()) {
            return s.raw().get_num().get_ui();
        }
    }
    throw ParseError(where + ": expected a non-negative integer");
}

json action_json(const GameAction& action) {
    if (action.kind == GameAction::Kind::Defer) {
        return json{{"kind", "defer"}};
    }
    return json{{"kind", "machine"}, {"machine", action.machine}};
}

} // namespace

json number(const Scalar& x, int precision) { return json{{"exact", x.str()}, {"decimal", x.decimal(precision)}}; }

Instance instance_from_json(const json& doc) {
    if (!doc.is_object()) {
        throw ParseError("instance must be a JSON object");
    }
    if (!doc.contains("stages") || !doc["stages"].is_array()) {
        throw ParseError("instance needs a \"stages\" array");
    }
    if (!doc.contains("jobs") || !doc["jobs"].is_array()) {
        throw ParseError("instance needs a \"jobs\" array");
    }
    std::vector<StageSpec> stages;
    for (std::size_t i = 0; i < doc["stages"].size(); ++i) {
        const json& s = doc["stages"][i];
        const std::string where = "stages[" + std::to_string(i) + "]";
        if (!s.is_object() || !s.contains("machines") || !s.contains("speed")) {
            throw ParseError(where + ": needs \"machines\" and \"speed\"");
        }
        stages.push_back(StageSpec{count_field(s["machines"], where + ".machines"), scalar_field(s["speed"], where + ".speed")});
    }
    std::vector<Scalar> sizes;
    for (std::size_t j = 0; j < doc["jobs"].size(); ++j) {
        const json& job = doc["jobs"][j];
        const std::string where = "jobs[" + std::to_string(j) + "]";
        if (!job.is_object() || !job.contains("size")) {
            throw ParseError(where + ": needs \"size\"");
        }
        sizes.push_back(scalar_field(job["size"], where + ".size"));
    }
    try {
        return Instance(sizes, std::move(stages));
    } catch (const ValidationError& e) {
        throw ParseError(std::string("invalid instance: ") + e.what());
    }
}

Instance parse_instance(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
    return instance_from_json(doc);
}

json to_json(const Instance& instance) {
    json stages = json::array();
    for (const auto& s : instance.stages()) {
        stages.push_back(json{{"machines", s.machines}, {"speed", s.speed.str()}});
    }
    json jobs = json::array();
    for (const auto& j : instance.jobs()) {
        jobs.push_back(json{{"size", j.size.str()}});
    }
    return json{{"stages", stages}, {"jobs", jobs}};
}

json to_json(const ScheduleTrace& trace, int precision) {
    json jobs = json::array();
    for (std::size_t j = 0; j < trace.job_count(); ++j) {
        json stages = json::array();
        for (const auto& rec : trace.records[j]) {
            stages.push_back(json{{"stage", rec.stage},
                                  {"machine", rec.machine},
                                  {"position", rec.position},
                                  {"release", number(rec.release, precision)},
                                  {"start", number(rec.start, precision)},
                                  {"completion", number(rec.completion, precision)}});
        }
        jobs.push_back(json{{"job", j}, {"stages", stages}});
    }
    return json{{"makespan", number(trace.makespan, precision)}, {"jobs", jobs}};
}

json to_json(const std::vector<GreedyEvent>& events, int precision) {
    json out = json::array();
    for (const auto& e : events) {
        json loads = json::array();
        for (const auto& l : e.loads) {
            loads.push_back(l.str());
        }
        out.push_back(json{{"time", number(e.time, precision)},
                           {"job", e.job},
                           {"stage", e.stage},
                           {"loads", loads},
                           {"machine", e.machine}});
    }
    return out;
}

json to_json(const Plan& plan) {
    json stages = json::array();
    for (const auto& stage : plan.stages) {
        json placements = json::array();
        for (const auto& p : stage) {
            placements.push_back(json{{"machine", p.machine}, {"position", p.position}});
        }
        stages.push_back(placements);
    }
    return json{{"stages", stages}};
}

Plan plan_from_json(const json& doc) {
    if (!doc.is_object() || !doc.contains("stages") || !doc["stages"].is_array()) {
        throw ParseError("plan needs a \"stages\" array");
    }
    Plan plan;
    for (const auto& stage : doc["stages"]) {
        if (!stage.is_array()) {
            throw ParseError("each plan stage must be an array of placements");
        }
        std::vector<Placement> placements;
        for (const auto& p : stage) {
            if (!p.is_object() || !p.contains("machine") || !p.contains("position")) {
                throw ParseError("placement needs \"machine\" and \"position\"");
            }
            placements.push_back(Placement{count_field(p["machine"], "machine"), count_field(p["position"], "position")});
        }
        plan.stages.push_back(std::move(placements));
    }
    return plan;
}

json to_json(const OptResult& result, bool with_witness, int precision) {
    json out{{"makespan", number(result.makespan, precision)},
             {"status", to_string(result.status)},
             {"lower_bound", number(result.lower_bound, precision)},
             {"nodes", result.nodes}};
    if (with_witness) {
        out["witness"] = to_json(result.witness);
    }
    return out;
}

json to_json(const BoundReport& report, int precision) {
    json entries = json::array();
    for (const auto& e : report.entries) {
        json item{{"label", e.label},
                  {"stage", e.stage},
                  {"rank", e.rank},
                  {"lhs", number(e.lhs, precision)},
                  {"rhs", number(e.rhs, precision)},
                  {"slack", number(e.slack(), precision)}};
        if (e.job) {
            item["job"] = *e.job;
        }
        entries.push_back(item);
    }
    json params = json::object();
    for (const auto& [name, value] : report.parameters) {
        params[name] = number(value, precision);
    }
    json out{{"inequality", report.inequality}, {"holds", report.holds()}, {"parameters", params}, {"entries", entries}};
    if (const auto slack = report.min_slack()) {
        out["min_slack"] = number(*slack, precision);
    }
    return out;
}

json to_json(const PoAReport& report, int precision) {
    json out{{"T_equ", number(report.t_equ, precision)},
             {"opt_status", to_string(report.opt_source)},
             {"opt_lower", number(report.opt_lower, precision)},
             {"opt_upper", number(report.opt_upper, precision)},
             {"path_bound", number(report.bounds.path_bound, precision)},
             {"bottleneck_bound", number(report.bounds.bottleneck_bound, precision)},
             {"ratio", number(report.ratio, precision)},
             {"ratio_is_exact", report.certified()},
             {"ratio_lower", number(report.ratio_lower, precision)},
             {"ceiling", number(report.ceiling, precision)},
             {"within_ceiling", report.within_ceiling()}};
    out["T_opt"] = report.t_opt ? number(*report.t_opt, precision) : json(nullptr);
    if (!report.family.empty()) {
        out["family"] = report.family;
    }
    if (!report.note.empty()) {
        out["note"] = report.note;
    }
    return out;
}

json to_json(const EquilibriumResult& result, const ActionModel& model, int precision) {
    json path = json::array();
    for (const auto& d : result.spne_path) {
        path.push_back(json{{"time", number(d.time, precision)},
                            {"job", d.job},
                            {"stage", d.stage},
                            {"action", action_json(d.action)}});
    }
    json comparison = json::array();
    for (std::size_t j = 0; j < result.spne_finals.size(); ++j) {
        comparison.push_back(json{{"job", j},
                                  {"greedy_final", number(result.greedy_finals[j], precision)},
                                  {"spne_final", number(result.spne_finals[j], precision)},
                                  {"delta", number(result.deltas[j], precision)}});
    }
    return json{{"action_model",
                 {{"allow_defer", model.allow_defer},
                  {"max_deferrals", model.max_deferrals},
                  {"defer_note", "defer lets a job yield its turn to the next job released at the same instant"}}},
                {"spne", to_json(result.spne_trace, precision)},
                {"spne_path", path},
                {"greedy", to_json(result.greedy_trace, precision)},
                {"comparison", comparison},
                {"greedy_is_spne_outcome", result.greedy_is_spne_outcome},
                {"states", result.states}};
}

json to_json(const GreedyCertificate& certificate, int precision) {
    json deviations = json::array();
    for (const auto& d : certificate.deviations) {
        deviations.push_back(json{{"decision_index", d.decision_index},
                                  {"time", number(d.time, precision)},
                                  {"job", d.job},
                                  {"stage", d.stage},
                                  {"greedy_action", action_json(d.greedy_action)},
                                  {"deviation", action_json(d.deviation)},
                                  {"greedy_value", number(d.greedy_value, precision)},
                                  {"deviation_value", number(d.deviation_value, precision)},
                                  {"improvement", number(d.improvement(), precision)}});
    }
    return json{{"greedy_is_spne", certificate.greedy_is_spne},
                {"decisions_checked", certificate.decisions_checked},
                {"deviations", deviations}};
}

std::string trace_csv(const ScheduleTrace& trace, int precision) {
    std::ostringstream os;
    os << "job,stage,machine,release,start,completion,release_decimal,start_decimal,completion_decimal\n";
    for (std::size_t j = 0; j < trace.job_count(); ++j) {
        for (const auto& r : trace.records[j]) {
            os << j << ',' << r.stage << ',' << r.machine << ',' << r.release.str() << ',' << r.start.str() << ','
               << r.completion.str() << ',' << r.release.decimal(precision) << ',' << r.start.decimal(precision) << ','
               << r.completion.decimal(precision) << '\n';
        }
    }
    return os.str();
}

std::string comparison_csv(const EquilibriumResult& result, int precision) {
    std::ostringstream os;
    const std::size_t k = result.greedy_trace.stage_count();
    os << "policy,job";
    for (std::size_t i = 1; i <= k; ++i) {
        os << ",r" << i << ",c" << i;
    }
    for (std::size_t i = 1; i <= k; ++i) {
        os << ",r" << i << "_decimal,c" << i << "_decimal";
    }
    os << '\n';
    const auto rows = [&](const char* policy, const ScheduleTrace& trace) {
        for (std::size_t j = 0; j < trace.job_count(); ++j) {
            os << policy << ',' << j;
            for (const auto& r : trace.records[j]) {
                os << ',' << r.release.str() << ',' << r.completion.str();
            }
            for (const auto& r : trace.records[j]) {
                os << ',' << r.release.decimal(precision) << ',' << r.completion.decimal(precision);
            }
            os << '\n';
        }
    };
    rows("greedy", result.greedy_trace);
    rows("spne", result.spne_trace);
    return os.str();
}

} // namespace msgame::io
