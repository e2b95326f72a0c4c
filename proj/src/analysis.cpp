#include "msgame/analysis.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "msgame/greedy.hpp"

namespace msgame {

std::vector<std::size_t> SigmaPermutation::inverse() const {
    std::vector<std::size_t> inv(order.size());
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        inv.at(order[rank]) = rank;
    }
    return inv;
}

SigmaPermutation sigma_permutation(std::span<const Scalar> completions, std::size_t stage) {
    SigmaPermutation sigma;
    sigma.stage = stage;
    sigma.order.resize(completions.size());
    std::iota(sigma.order.begin(), sigma.order.end(), 0);
    std::stable_sort(sigma.order.begin(), sigma.order.end(),
                     [&](std::size_t a, std::size_t b) { return completions[a] < completions[b]; });
    return sigma;
}

SigmaPermutation sigma_permutation(const ScheduleTrace& trace, std::size_t stage) {
    std::vector<Scalar> completions;
    completions.reserve(trace.job_count());
    for (std::size_t j = 0; j < trace.job_count(); ++j) {
        completions.push_back(trace.at(j, stage).completion);
    }
    return sigma_permutation(completions, stage);
}

bool BoundReport::holds() const {
    return std::all_of(entries.begin(), entries.end(), [](const BoundEntry& e) { return e.slack().sign() >= 0; });
}

std::optional<Scalar> BoundReport::min_slack() const {
    std::optional<Scalar> out;
    for (const auto& e : entries) {
        Scalar s = e.slack();
        if (!out || s < *out) {
            out = std::move(s);
        }
    }
    return out;
}

const BoundEntry* BoundReport::first_violation() const {
    for (const auto& e : entries) {
        if (e.slack().sign() < 0) {
            return &e;
        }
    }
    return nullptr;
}

namespace {

Scalar from_count(std::size_t n) { return Scalar(static_cast<unsigned long>(n)); }

// (2m - 1) / (m s): per-stage growth of the bound, in units of p_max.
Scalar stage_growth(const StageSpec& spec) {
    const Scalar m = from_count(spec.machines);
    return (Scalar(2) * m - Scalar(1)) / (m * spec.speed);
}

void require_stage(const Instance& instance, const ScheduleTrace& trace, std::size_t stage) {
    if (trace.job_count() != instance.job_count() || trace.stage_count() != instance.stage_count()) {
        throw std::invalid_argument("trace shape does not match instance");
    }
    if (stage >= instance.stage_count()) {
        throw std::invalid_argument("stage " + std::to_string(stage) + " out of range");
    }
}

void require_ms_star(const Instance& instance, std::size_t stage, const Scalar& ms_star) {
    const StageSpec& spec = instance.stage(stage);
    const Scalar capacity = from_count(spec.machines) * spec.speed;
    if (ms_star.sign() <= 0 || ms_star > capacity) {
        throw std::invalid_argument("ms_star " + ms_star.str() + " must lie in (0, " + capacity.str() +
                                    "] for stage " + std::to_string(stage));
    }
}

void premise_entries(const Instance& instance, const ScheduleTrace& trace, std::size_t stage, const Scalar& offset,
                     const Scalar& ms_star, BoundReport& report) {
    Scalar prefix;
    std::optional<Scalar> t_min;
    std::size_t rank = 1;
    for (std::size_t j : release_order(trace, stage)) {
        const Scalar& release = trace.at(j, stage).release;
        const Scalar spread = prefix / ms_star;
        report.entries.push_back(BoundEntry{"release-premise", stage, rank, j, release, offset + spread});
        Scalar needed = release - spread;
        if (!t_min || needed > *t_min) {
            t_min = std::move(needed);
        }
        prefix += instance.job(j).size;
        ++rank;
    }
    report.parameters["T_min[" + std::to_string(stage) + "]"] = *t_min;
}

void completion_entries(const Instance& instance, const ScheduleTrace& trace, std::size_t stage,
                        const Scalar& offset, const Scalar& ms_star, BoundReport& report) {
    const Scalar base = offset + stage_growth(instance.stage(stage)) * instance.max_size();

    Scalar prefix;
    std::size_t rank = 1;
    for (std::size_t j : release_order(trace, stage)) {
        report.entries.push_back(
            BoundEntry{"completion", stage, rank, j, trace.at(j, stage).completion, base + prefix / ms_star});
        prefix += instance.job(j).size;
        ++rank;
    }

    prefix = Scalar();
    rank = 1;
    for (std::size_t j : sigma_permutation(trace, stage).order) {
        report.entries.push_back(
            BoundEntry{"completion-sigma", stage, rank, j, trace.at(j, stage).completion, base + prefix / ms_star});
        prefix += instance.job(j).size;
        ++rank;
    }
}

void stage_parameters(const Instance& instance, std::size_t stage, const Scalar& offset, const Scalar& ms_star,
                      BoundReport& report) {
    report.parameters["T"] = offset;
    report.parameters["ms_star"] = ms_star;
    report.parameters["p_max"] = instance.max_size();
    report.parameters["m"] = from_count(instance.stage(stage).machines);
    report.parameters["s"] = instance.stage(stage).speed;
}

} // namespace

BoundReport check_release_premise(const Instance& instance, const ScheduleTrace& trace, std::size_t stage,
                                  const Scalar& offset, const Scalar& ms_star) {
    require_stage(instance, trace, stage);
    require_ms_star(instance, stage, ms_star);
    BoundReport report;
    report.inequality = "release-premise";
    stage_parameters(instance, stage, offset, ms_star, report);
    premise_entries(instance, trace, stage, offset, ms_star, report);
    report.parameters["T_min"] = report.parameters["T_min[" + std::to_string(stage) + "]"];
    return report;
}

BoundReport check_completion_bound(const Instance& instance, const ScheduleTrace& trace, std::size_t stage,
                                   const Scalar& offset, const Scalar& ms_star) {
    const BoundReport premise = check_release_premise(instance, trace, stage, offset, ms_star);
    if (!premise.holds()) {
        const BoundEntry* bad = premise.first_violation();
        throw std::invalid_argument("release premise fails at stage " + std::to_string(stage) + ", rank " +
                                    std::to_string(bad->rank) + " (" + bad->lhs.str() + " > " + bad->rhs.str() +
                                    "); the completion bound would be vacuous");
    }
    BoundReport report;
    report.inequality = "completion-bound";
    stage_parameters(instance, stage, offset, ms_star, report);
    completion_entries(instance, trace, stage, offset, ms_star, report);
    return report;
}

BoundReport check_multistage_chain(const Instance& instance, const ScheduleTrace& trace,
                                   const std::optional<Scalar>& t_opt, const std::optional<Scalar>& ms_star) {
    require_stage(instance, trace, 0);
    const Scalar default_ms = instance.min_throughput();
    const Scalar rate = ms_star.value_or(default_ms);
    for (std::size_t i = 0; i < instance.stage_count(); ++i) {
        require_ms_star(instance, i, rate);
    }

    BoundReport report;
    report.inequality = "multistage-chain";
    const Scalar p_max = instance.max_size();
    report.parameters["ms_star"] = rate;
    report.parameters["p_max"] = p_max;

    Scalar offset;
    for (std::size_t i = 0; i < instance.stage_count(); ++i) {
        report.parameters["T[" + std::to_string(i) + "]"] = offset;
        premise_entries(instance, trace, i, offset, rate, report);
        completion_entries(instance, trace, i, offset, rate, report);
        offset += stage_growth(instance.stage(i)) * p_max;
    }
    report.parameters["T[" + std::to_string(instance.stage_count()) + "]"] = offset;

    const std::size_t n = instance.job_count();
    const std::size_t last = instance.stage_count() - 1;
    Scalar prefix;
    const auto sigma = sigma_permutation(trace, last).order;
    for (std::size_t rank = 0; rank + 1 < n; ++rank) {
        prefix += instance.job(sigma[rank]).size;
    }
    const Scalar makespan_bound = offset + prefix / rate;
    report.entries.push_back(BoundEntry{"makespan", last, n, std::nullopt, trace.makespan, makespan_bound});

    if (rate == default_ms) {
        const OptLowerBounds bounds = opt_lower_bounds(instance);
        const Scalar m_max = from_count(instance.max_machines());
        const Scalar relaxed = (Scalar(2) - Scalar(1) / m_max) * bounds.path_bound + bounds.bottleneck_bound;
        const Scalar ceiling = Scalar(3) - Scalar(1) / m_max;
        report.parameters["path_bound"] = bounds.path_bound;
        report.parameters["bottleneck_bound"] = bounds.bottleneck_bound;
        report.parameters["m_max"] = m_max;
        report.entries.push_back(BoundEntry{"makespan-bound-relaxed", last, n, std::nullopt, makespan_bound, relaxed});
        report.entries.push_back(
            BoundEntry{"relaxed-vs-ceiling", last, n, std::nullopt, relaxed, ceiling * bounds.best()});
        report.entries.push_back(
            BoundEntry{"makespan-vs-ceiling-bounds", last, n, std::nullopt, trace.makespan, ceiling * bounds.best()});
        if (t_opt) {
            report.parameters["T_opt"] = *t_opt;
            report.entries.push_back(BoundEntry{"lower-bounds-vs-opt", last, n, std::nullopt, bounds.best(), *t_opt});
            report.entries.push_back(
                BoundEntry{"makespan-vs-ceiling-opt", last, n, std::nullopt, trace.makespan, ceiling * *t_opt});
        }
    }
    return report;
}

std::string to_string(OptSource source) {
    switch (source) {
    case OptSource::Exact:
        return "exact";
    case OptSource::BudgetExhausted:
        return "budget-exhausted";
    case OptSource::Refused:
        return "refused";
    }
    return "unknown";
}

Scalar poa_ceiling(const Instance& instance) {
    const Scalar m = from_count(instance.max_machines());
    return (instance.stage_count() == 1 ? Scalar(2) : Scalar(3)) - Scalar(1) / m;
}

PoAReport price_of_anarchy(const Instance& instance, const std::optional<SearchLimits>& limits, std::string family) {
    PoAReport report;
    report.family = std::move(family);
    report.t_equ = greedy_schedule(instance).trace.makespan;
    report.bounds = opt_lower_bounds(instance);
    report.ceiling = poa_ceiling(instance);

    const bool single = instance.stage_count() == 1;
    const SearchLimits effective =
        limits.value_or(single ? SearchLimits::single_stage_defaults() : SearchLimits::general_defaults(instance));

    try {
        const OptResult opt =
            single ? single_stage_optimal(instance.jobs(), instance.stage(0).machines, instance.stage(0).speed, effective)
                   : optimal_makespan(instance, effective);
        if (opt.status == OptStatus::Exact) {
            report.opt_source = OptSource::Exact;
            report.t_opt = opt.makespan;
            report.opt_lower = opt.makespan;
            report.opt_upper = opt.makespan;
        } else {
            report.opt_source = OptSource::BudgetExhausted;
            report.opt_lower = max(opt.lower_bound, report.bounds.best());
            report.opt_upper = opt.makespan;
            report.note = "search budget exhausted after " + std::to_string(opt.nodes) + " nodes";
        }
    } catch (const LimitExceeded& e) {
        report.opt_source = OptSource::Refused;
        report.opt_lower = report.bounds.best();
        report.opt_upper =
            min(report.t_equ, evaluate_schedule(instance, largest_first_plan(instance)).makespan);
        report.note = std::string("exact solver refused: ") + e.what();
    }

    report.ratio = report.t_equ / report.opt_lower;
    report.ratio_lower = report.t_equ / report.opt_upper;
    return report;
}

} // namespace msgame
