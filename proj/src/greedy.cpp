#include "msgame/greedy.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>
#include <tuple>

namespace msgame {

std::size_t least_loaded(std::span<const Scalar> loads) {
    if (loads.empty()) {
        throw std::invalid_argument("least_loaded: no machines");
    }
    std::size_t best = 0;
    for (std::size_t a = 1; a < loads.size(); ++a) {
        if (loads[a] < loads[best]) {
            best = a;
        }
    }
    return best;
}

GreedyResult greedy_schedule(const Instance& instance) {
    const std::size_t n = instance.job_count();
    const std::size_t k = instance.stage_count();

    GreedyResult result;
    result.trace.records.assign(n, std::vector<StageRecord>(k));
    result.events.reserve(n * k);

    std::vector<std::vector<MachineState>> machines(k);
    std::vector<std::vector<std::size_t>> queue_length(k);
    for (std::size_t i = 0; i < k; ++i) {
        machines[i].resize(instance.stage(i).machines);
        queue_length[i].assign(instance.stage(i).machines, 0);
    }

    // Pending decisions ordered by (release, job id). A job's next release is
    // its completion, which is strictly later than the decision time.
    using Pending = std::tuple<Scalar, std::size_t, std::size_t>;  // release, job, stage
    std::set<Pending> pending;
    for (std::size_t j = 0; j < n; ++j) {
        pending.emplace(Scalar(), j, 0);
    }

    while (!pending.empty()) {
        auto [release, job, stage] = *pending.begin();
        pending.erase(pending.begin());
        const StageSpec& spec = instance.stage(stage);

        GreedyEvent event;
        event.time = release;
        event.job = job;
        event.stage = stage;
        event.loads.reserve(spec.machines);
        for (const auto& m : machines[stage]) {
            event.loads.push_back(m.load(spec.speed));
        }
        event.machine = least_loaded(event.loads);

        StageRecord& rec = result.trace.records[job][stage];
        rec.stage = stage;
        rec.machine = event.machine;
        rec.position = queue_length[stage][event.machine]++;
        rec.release = release;
        rec.start = machines[stage][event.machine].enqueue(release, execution_time(instance.job(job), spec));
        rec.completion = machines[stage][event.machine].available_at;

        if (stage + 1 < k) {
            pending.emplace(rec.completion, job, stage + 1);
        }
        result.events.push_back(std::move(event));
    }

    for (std::size_t j = 0; j < n; ++j) {
        result.trace.makespan = j == 0 ? result.trace.final_completion(j)
                                       : max(result.trace.makespan, result.trace.final_completion(j));
    }
    return result;
}

std::vector<std::size_t> release_order(const ScheduleTrace& trace, std::size_t stage) {
    if (stage >= trace.stage_count()) {
        throw std::out_of_range("release_order: stage " + std::to_string(stage) + " out of range");
    }
    std::vector<std::size_t> order(trace.job_count());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return trace.at(a, stage).release < trace.at(b, stage).release;
    });
    return order;
}

} // namespace msgame
