#include "msgame/cli.hpp"

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include <CLI11.hpp>

#include "msgame/analysis.hpp"
#include "msgame/equilibrium.hpp"
#include "msgame/generators.hpp"
#include "msgame/greedy.hpp"
#include "msgame/io.hpp"

namespace msgame::cli {

namespace {

struct FamilyParam {
    std::string name;
    std::string fallback;
    bool integer;
};

const std::map<std::string, std::vector<FamilyParam>>& families() {
    static const std::map<std::string, std::vector<FamilyParam>> table{
        {"single-stage-worst", {{"m", "2", true}, {"s", "1", false}}},
        {"multi-stage-worst",
         {{"k", "3", true},
          {"bottleneck", "1", true},
          {"m_max", "3", true},
          {"others", "", false},
          {"fast_speed", "1000000", false}}},
        {"appendix", {}},
        {"random",
         {{"seed", "0", true},
          {"n", "4", true},
          {"k", "2", true},
          {"machines_min", "1", true},
          {"machines_max", "3", true},
          {"speed_min", "1", false},
          {"speed_max", "3", false},
          {"speed_den", "1", true},
          {"size_min", "1", false},
          {"size_max", "10", false},
          {"size_den", "1", true}}},
    };
    return table;
}

const std::vector<FamilyParam>& family_table(const std::string& family) {
    const auto it = families().find(family);
    if (it == families().end()) {
        throw std::invalid_argument("unknown family \"" + family +
                                    "\" (expected single-stage-worst, multi-stage-worst, appendix or random)");
    }
    return it->second;
}

std::uint64_t parse_count(const std::string& text, const std::string& name) {
    const Scalar value = Scalar::parse(text);
    if (value.sign() < 0 || !value.is_integer() || !value.raw().get_num().fits_ulong_p()) {
        throw ParseError(name + " must be a non-negative integer, got \"" + text + "\"");
    }
    return value.raw().get_num().get_ui();
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, sep)) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

// "2..8" -> 2,3,...,8; anything else passes through.
std::vector<std::string> expand_values(const std::string& text, bool integer) {
    std::vector<std::string> out;
    for (const auto& item : split(text, ',')) {
        const auto dots = item.find("..");
        if (integer && dots != std::string::npos) {
            const std::uint64_t lo = parse_count(item.substr(0, dots), "range start");
            const std::uint64_t hi = parse_count(item.substr(dots + 2), "range end");
            if (hi < lo) {
                throw ParseError("empty range \"" + item + "\"");
            }
            for (std::uint64_t v = lo; v <= hi; ++v) {
                out.push_back(std::to_string(v));
            }
        } else {
            out.push_back(item);
        }
    }
    return out;
}

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) {
        return text;
    }
    std::string quoted = "\"";
    for (char c : text) {
        if (c == '"') {
            quoted += '"';
        }
        quoted += c;
    }
    return quoted + "\"";
}

std::string read_all(std::istream& in) { return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()}; }

Instance load_instance(const std::string& path, std::istream& in) {
    if (path.empty() || path == "-") {
        return io::parse_instance(read_all(in));
    }
    std::ifstream file(path);
    if (!file) {
        throw ParseError("cannot open " + path);
    }
    return io::parse_instance(read_all(file));
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream file(path);
    if (!file) {
        throw ParseError("cannot write " + path);
    }
    file << text;
}

// "max_jobs=8,node_budget=1000" applied over `base`.
SearchLimits apply_limits(SearchLimits base, const std::string& overrides) {
    for (const auto& item : split(overrides, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw ParseError("limit override \"" + item + "\" is not key=value");
        }
        const std::string key = item.substr(0, eq);
        const std::string value = item.substr(eq + 1);
        if (key == "max_jobs") {
            base.max_jobs = parse_count(value, key);
        } else if (key == "max_stages") {
            base.max_stages = parse_count(value, key);
        } else if (key == "max_machines") {
            base.max_machines = parse_count(value, key);
        } else if (key == "node_budget") {
            base.node_budget = parse_count(value, key);
        } else if (key == "time_budget") {
            base.time_budget_seconds = Scalar::parse(value).to_double();
        } else {
            throw ParseError("unknown limit \"" + key +
                             "\" (expected max_jobs, max_stages, max_machines, node_budget or time_budget)");
        }
    }
    return base;
}

std::string dump(const io::json& doc) { return doc.dump(2) + "\n"; }

} // namespace

std::vector<std::string> family_parameters(const std::string& family) {
    std::vector<std::string> names;
    for (const auto& p : family_table(family)) {
        names.push_back(p.name);
    }
    return names;
}

Instance make_family_instance(const std::string& family, const std::map<std::string, std::string>& params) {
    const auto& table = family_table(family);
    std::map<std::string, std::string> values;
    for (const auto& p : table) {
        values[p.name] = p.fallback;
    }
    for (const auto& [name, value] : params) {
        if (!values.contains(name)) {
            throw ParseError("family " + family + " has no parameter \"" + name + "\"");
        }
        values[name] = value;
    }

    if (family == "single-stage-worst") {
        return gen_single_stage_worst(parse_count(values["m"], "m"), Scalar::parse(values["s"]));
    }
    if (family == "multi-stage-worst") {
        const std::size_t k = parse_count(values["k"], "k");
        std::vector<std::size_t> others;
        if (values["others"].empty()) {
            others.assign(k == 0 ? 0 : k - 1, 1);
        } else {
            for (const auto& item : split(values["others"], ':')) {
                others.push_back(parse_count(item, "others"));
            }
        }
        return gen_multistage_worst(k, parse_count(values["bottleneck"], "bottleneck"),
                                    parse_count(values["m_max"], "m_max"), others, Scalar::parse(values["fast_speed"]));
    }
    if (family == "appendix") {
        return gen_appendix_example();
    }
    RandomParams rp;
    rp.seed = parse_count(values["seed"], "seed");
    rp.jobs = parse_count(values["n"], "n");
    rp.stages = parse_count(values["k"], "k");
    rp.machines_min = parse_count(values["machines_min"], "machines_min");
    rp.machines_max = parse_count(values["machines_max"], "machines_max");
    rp.speed_min = Scalar::parse(values["speed_min"]);
    rp.speed_max = Scalar::parse(values["speed_max"]);
    rp.speed_denominator = parse_count(values["speed_den"], "speed_den");
    rp.size_min = Scalar::parse(values["size_min"]);
    rp.size_max = Scalar::parse(values["size_max"]);
    rp.size_denominator = parse_count(values["size_den"], "size_den");
    return gen_random(rp);
}

SweepOutcome sweep(const SweepSpec& spec) {
    const auto& table = family_table(spec.family);
    for (const auto& [name, values] : spec.grid) {
        const bool known = std::any_of(table.begin(), table.end(), [&](const FamilyParam& p) { return p.name == name; });
        if (!known) {
            throw std::invalid_argument("family " + spec.family + " has no parameter \"" + name + "\"");
        }
        if (values.empty()) {
            throw std::invalid_argument("empty grid for parameter \"" + name + "\"");
        }
    }
    for (const auto& op : spec.operations) {
        if (op != "greedy" && op != "optimal" && op != "poa" && op != "verify-bounds" && op != "spne") {
            throw std::invalid_argument("unknown sweep operation \"" + op + "\"");
        }
    }
    const auto wants = [&](const std::string& op) {
        return std::find(spec.operations.begin(), spec.operations.end(), op) != spec.operations.end();
    };

    // Axes in family order; parameters absent from the grid use defaults.
    std::vector<std::pair<std::string, std::vector<std::string>>> axes;
    for (const auto& p : table) {
        if (const auto it = spec.grid.find(p.name); it != spec.grid.end()) {
            std::vector<std::string> expanded;
            for (const auto& v : it->second) {
                for (auto& e : expand_values(v, p.integer)) {
                    expanded.push_back(std::move(e));
                }
            }
            if (expanded.empty()) {
                throw std::invalid_argument("empty grid for parameter \"" + p.name + "\"");
            }
            axes.emplace_back(p.name, std::move(expanded));
        }
    }
    if (axes.empty() && !table.empty()) {
        throw std::invalid_argument("sweep grid is empty");
    }

    std::ostringstream csv;
    csv << "family";
    for (const auto& [name, values] : axes) {
        csv << ',' << name;
    }
    csv << ",T_equ,T_opt,opt_status,ratio,ceiling,min_slack,status,greedy_spne,ratio_lower"
           ",T_equ_decimal,T_opt_decimal,ratio_decimal,ceiling_decimal,min_slack_decimal\n";

    SweepOutcome outcome;
    std::vector<std::size_t> cursor(axes.size(), 0);
    const int p = spec.precision;
    while (true) {
        std::map<std::string, std::string> params;
        csv << csv_field(spec.family);
        for (std::size_t a = 0; a < axes.size(); ++a) {
            params[axes[a].first] = axes[a].second[cursor[a]];
            csv << ',' << csv_field(axes[a].second[cursor[a]]);
        }

        std::string t_equ, t_opt, opt_status, ratio, ceiling, min_slack, status = "ok", spne, ratio_lower;
        std::string t_equ_d, t_opt_d, ratio_d, ceiling_d, min_slack_d;
        bool failed = false;
        try {
            const Instance instance = make_family_instance(spec.family, params);
            const ScheduleTrace trace = greedy_schedule(instance).trace;
            t_equ = trace.makespan.str();
            t_equ_d = trace.makespan.decimal(p);

            std::optional<Scalar> opt;
            if (wants("optimal") || wants("poa")) {
                const PoAReport report = price_of_anarchy(instance, spec.limits, spec.family);
                opt_status = to_string(report.opt_source);
                if (report.t_opt) {
                    opt = report.t_opt;
                    t_opt = report.t_opt->str();
                    t_opt_d = report.t_opt->decimal(p);
                } else {
                    status = report.note;
                }
                if (wants("poa")) {
                    ratio = report.ratio.str();
                    ratio_d = report.ratio.decimal(p);
                    ratio_lower = report.ratio_lower.str();
                    ceiling = report.ceiling.str();
                    ceiling_d = report.ceiling.decimal(p);
                    if (report.certified() && !report.within_ceiling()) {
                        status = "ceiling-violated";
                        failed = true;
                    }
                }
            }
            if (wants("verify-bounds")) {
                const BoundReport chain = check_multistage_chain(instance, trace, opt);
                if (const auto slack = chain.min_slack()) {
                    min_slack = slack->str();
                    min_slack_d = slack->decimal(p);
                }
                if (!chain.holds()) {
                    status = "bound-violation";
                    failed = true;
                }
            }
            if (wants("spne")) {
                try {
                    const auto cert =
                        check_greedy_spne(instance, ActionModel{}, SearchLimits::equilibrium_defaults());
                    spne = cert.greedy_is_spne ? "yes" : "no";
                } catch (const LimitExceeded&) {
                    spne = "refused";
                }
            }
        } catch (const std::exception& e) {
            status = std::string("error: ") + e.what();
        }
        if (failed) {
            ++outcome.failed_rows;
        }
        ++outcome.rows;
        for (const auto* field : {&t_equ, &t_opt, &opt_status, &ratio, &ceiling, &min_slack, &status, &spne,
                                  &ratio_lower, &t_equ_d, &t_opt_d, &ratio_d, &ceiling_d, &min_slack_d}) {
            csv << ',' << csv_field(*field);
        }
        csv << '\n';

        std::size_t axis = axes.size();
        while (axis > 0) {
            --axis;
            if (++cursor[axis] < axes[axis].second.size()) {
                break;
            }
            cursor[axis] = 0;
            if (axis == 0) {
                axis = axes.size() + 1;
                break;
            }
        }
        if (axes.empty() || axis == axes.size() + 1) {
            break;
        }
    }
    outcome.csv = csv.str();
    return outcome;
}

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multi-stage scheduling game toolkit: greedy simulation, exact optimum, equilibria and bound checks"};
    app.require_subcommand(1);

    std::string input = "-";
    std::string format = "json";
    std::string limits_text;
    std::string output = "-";
    std::string family_label;
    int precision = 6;

    auto* simulate = app.add_subcommand("simulate", "Run greedy play and print the trace");
    std::string policy = "greedy";
    bool with_events = false;
    simulate->add_option("-i,--input", input, "Instance JSON file (default stdin)");
    simulate->add_option("--policy", policy, "Machine-choice policy")->check(CLI::IsMember({"greedy"}));
    simulate->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    simulate->add_flag("--events", with_events, "Include the decision log (json only)");
    simulate->add_option("--precision", precision, "Decimal digits");

    auto* optimal = app.add_subcommand("optimal", "Exact optimal makespan");
    bool emit_witness = false;
    optimal->add_option("-i,--input", input, "Instance JSON file (default stdin)");
    optimal->add_option("--limits", limits_text, "Overrides, e.g. max_jobs=8,node_budget=1000000");
    optimal->add_flag("--emit-witness", emit_witness, "Include the optimal plan");
    optimal->add_option("--precision", precision, "Decimal digits");

    auto* spne = app.add_subcommand("spne", "Subgame perfect equilibrium versus greedy play");
    bool allow_defer = true;
    std::size_t max_deferrals = std::numeric_limits<std::size_t>::max();
    spne->add_option("-i,--input", input, "Instance JSON file (default stdin)");
    spne->add_flag("--defer,!--no-defer", allow_defer, "Allow tied jobs to yield their turn (default on)");
    spne->add_option("--max-deferrals", max_deferrals, "Per-job defer cap within a tied batch");
    spne->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    spne->add_option("--limits", limits_text, "Overrides, e.g. max_jobs=5,node_budget=100000");
    spne->add_option("--precision", precision, "Decimal digits");

    auto* poa = app.add_subcommand("poa", "Price of anarchy of greedy play");
    poa->add_option("-i,--input", input, "Instance JSON file (default stdin)");
    poa->add_option("--limits", limits_text, "Solver limit overrides");
    poa->add_option("--family", family_label, "Label recorded in the report");
    poa->add_option("--precision", precision, "Decimal digits");

    auto* verify = app.add_subcommand("verify-bounds", "Check the completion-time bound chain on the greedy trace");
    std::string ms_star_text;
    bool with_opt = false;
    verify->add_option("-i,--input", input, "Instance JSON file (default stdin)");
    verify->add_option("--ms-star", ms_star_text, "Throughput used in the bounds (default min m_i s_i)");
    verify->add_flag("--with-opt", with_opt, "Also compare against the exact optimum");
    verify->add_option("--limits", limits_text, "Solver limit overrides for --with-opt");
    verify->add_option("--precision", precision, "Decimal digits");

    auto* generate = app.add_subcommand("generate", "Write an instance JSON");
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a family over a parameter grid and emit CSV");
    std::string family;
    std::string operations = "greedy,poa,verify-bounds";
    std::map<std::string, std::string> gen_values;
    generate->add_option("--family", family, "single-stage-worst, multi-stage-worst, appendix or random")->required();
    generate->add_option("-o,--output", output, "Output file (default stdout)");
    sweep_cmd->add_option("--family", family, "single-stage-worst, multi-stage-worst, appendix or random")->required();
    sweep_cmd->add_option("-o,--output", output, "CSV file (default stdout)");
    sweep_cmd->add_option("--ops", operations, "Comma list of greedy, optimal, poa, verify-bounds, spne");
    sweep_cmd->add_option("--limits", limits_text, "Solver limit overrides");
    sweep_cmd->add_option("--precision", precision, "Decimal digits");
    for (const auto& [fam, params] : families()) {
        for (const auto& p : params) {
            std::string flag = "--" + p.name;
            std::replace(flag.begin(), flag.end(), '_', '-');
            if (generate->get_option_no_throw(flag) == nullptr) {
                generate->add_option_function<std::string>(
                    flag, [&gen_values, name = p.name](const std::string& v) { gen_values[name] = v; },
                    "Family parameter " + p.name);
                sweep_cmd->add_option_function<std::string>(
                    flag, [&gen_values, name = p.name](const std::string& v) { gen_values[name] = v; },
                    "Comma list of values for " + p.name + " (integers accept a..b)");
            }
        }
    }

    std::vector<std::string> argv_storage{"msgame"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_storage) {
        argv.push_back(a.data());
    }

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsageError;
    }

    try {
        if (simulate->parsed()) {
            const Instance instance = load_instance(input, in);
            const GreedyResult result = greedy_schedule(instance);
            if (format == "csv") {
                out << io::trace_csv(result.trace, precision);
            } else {
                io::json doc{{"policy", policy}, {"trace", io::to_json(result.trace, precision)}};
                if (with_events) {
                    doc["events"] = io::to_json(result.events, precision);
                }
                out << dump(doc);
            }
            return kOk;
        }
        if (optimal->parsed()) {
            const Instance instance = load_instance(input, in);
            const OptResult result =
                optimal_makespan(instance, apply_limits(SearchLimits::general_defaults(instance), limits_text));
            out << dump(io::to_json(result, emit_witness, precision));
            return kOk;
        }
        if (spne->parsed()) {
            const Instance instance = load_instance(input, in);
            const ActionModel model{allow_defer, max_deferrals};
            const SearchLimits limits = apply_limits(SearchLimits::equilibrium_defaults(), limits_text);
            const EquilibriumResult result = spne_solve(instance, model, limits);
            if (format == "csv") {
                out << io::comparison_csv(result, precision);
            } else {
                io::json doc = io::to_json(result, model, precision);
                doc["greedy_check"] = io::to_json(check_greedy_spne(instance, model, limits), precision);
                out << dump(doc);
            }
            return kOk;
        }
        if (poa->parsed()) {
            const Instance instance = load_instance(input, in);
            std::optional<SearchLimits> limits;
            if (!limits_text.empty()) {
                const SearchLimits base = instance.stage_count() == 1 ? SearchLimits::single_stage_defaults()
                                                                      : SearchLimits::general_defaults(instance);
                limits = apply_limits(base, limits_text);
            }
            const PoAReport report = price_of_anarchy(instance, limits, family_label);
            out << dump(io::to_json(report, precision));
            return report.certified() && !report.within_ceiling() ? kCheckFailed : kOk;
        }
        if (verify->parsed()) {
            const Instance instance = load_instance(input, in);
            const ScheduleTrace trace = greedy_schedule(instance).trace;
            std::optional<Scalar> t_opt;
            if (with_opt) {
                const PoAReport report = price_of_anarchy(
                    instance,
                    limits_text.empty()
                        ? std::nullopt
                        : std::optional<SearchLimits>(apply_limits(SearchLimits::general_defaults(instance), limits_text)));
                t_opt = report.t_opt;
            }
            std::optional<Scalar> ms_star;
            if (!ms_star_text.empty()) {
                ms_star = Scalar::parse(ms_star_text);
            }
            const BoundReport report = check_multistage_chain(instance, trace, t_opt, ms_star);
            out << dump(io::to_json(report, precision));
            return report.holds() ? kOk : kCheckFailed;
        }
        if (generate->parsed()) {
            const Instance instance = make_family_instance(family, gen_values);
            write_output(output, dump(io::to_json(instance)), out);
            return kOk;
        }
        if (sweep_cmd->parsed()) {
            SweepSpec spec;
            spec.family = family;
            spec.precision = precision;
            spec.operations = split(operations, ',');
            if (!limits_text.empty()) {
                spec.limits = apply_limits(SearchLimits{}, limits_text);
            }
            for (const auto& [name, value] : gen_values) {
                spec.grid[name] = split(value, ',');
            }
            const SweepOutcome outcome = sweep(spec);
            write_output(output, outcome.csv, out);
            return outcome.failed_rows == 0 ? kOk : kCheckFailed;
        }
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const LimitExceeded& e) {
        err << "refused: " << e.what() << "\n";
        return kCheckFailed;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    }
    return kUsageError;
}

} // namespace msgame::cli
