#include "msgame/model.hpp"

#include <algorithm>
#include <numeric>

namespace msgame {

Instance::Instance(const std::vector<Scalar>& sizes, std::vector<StageSpec> stages) : stages_(std::move(stages)) {
    if (sizes.empty()) {
        throw ValidationError("instance needs at least one job");
    }
    if (stages_.empty()) {
        throw ValidationError("instance needs at least one stage");
    }
    jobs_.reserve(sizes.size());
    for (std::size_t j = 0; j < sizes.size(); ++j) {
        if (sizes[j].sign() <= 0) {
            throw ValidationError("job " + std::to_string(j) + " has non-positive size " + sizes[j].str());
        }
        jobs_.push_back(Job{j, sizes[j]});
    }
    for (std::size_t i = 0; i < stages_.size(); ++i) {
        if (stages_[i].machines == 0) {
            throw ValidationError("stage " + std::to_string(i) + " has no machines");
        }
        if (stages_[i].speed.sign() <= 0) {
            throw ValidationError("stage " + std::to_string(i) + " has non-positive speed " + stages_[i].speed.str());
        }
    }
}

Scalar Instance::max_size() const {
    Scalar best = jobs_.front().size;
    for (const auto& job : jobs_) {
        best = max(best, job.size);
    }
    return best;
}

Scalar Instance::total_size() const {
    Scalar total;
    for (const auto& job : jobs_) {
        total += job.size;
    }
    return total;
}

std::size_t Instance::max_machines() const {
    std::size_t best = 0;
    for (const auto& stage : stages_) {
        best = std::max(best, stage.machines);
    }
    return best;
}

Scalar Instance::min_throughput() const {
    Scalar best = Scalar(static_cast<unsigned long>(stages_.front().machines)) * stages_.front().speed;
    for (const auto& stage : stages_) {
        best = min(best, Scalar(static_cast<unsigned long>(stage.machines)) * stage.speed);
    }
    return best;
}

Scalar MachineState::enqueue(const Scalar& release, const Scalar& duration) {
    Scalar start = max(release, available_at);
    available_at = start + duration;
    return start;
}

Scalar execution_time(const Job& job, const StageSpec& stage) { return job.size / stage.speed; }

ScheduleTrace evaluate_schedule(const Instance& instance, const Plan& plan) {
    const std::size_t n = instance.job_count();
    const std::size_t k = instance.stage_count();
    if (plan.stages.size() != k) {
        throw ValidationError("plan has " + std::to_string(plan.stages.size()) + " stages, instance has " +
                              std::to_string(k));
    }

    ScheduleTrace trace;
    trace.records.assign(n, std::vector<StageRecord>(k));

    for (std::size_t i = 0; i < k; ++i) {
        const StageSpec& spec = instance.stage(i);
        const auto& stage_plan = plan.stages[i];
        if (stage_plan.size() != n) {
            throw ValidationError("plan stage " + std::to_string(i) + " places " + std::to_string(stage_plan.size()) +
                                  " jobs, instance has " + std::to_string(n));
        }

        // queues[machine][position] = job
        std::vector<std::vector<std::size_t>> queues(spec.machines);
        for (std::size_t j = 0; j < n; ++j) {
            const Placement& p = stage_plan[j];
            if (p.machine >= spec.machines) {
                throw ValidationError("plan stage " + std::to_string(i) + ": job " + std::to_string(j) +
                                      " on machine " + std::to_string(p.machine) + " of " +
                                      std::to_string(spec.machines));
            }
            auto& queue = queues[p.machine];
            if (queue.size() <= p.position) {
                queue.resize(p.position + 1, n);
            }
            if (queue[p.position] != n) {
                throw ValidationError("plan stage " + std::to_string(i) + ": jobs " +
                                      std::to_string(queue[p.position]) + " and " + std::to_string(j) +
                                      " share position " + std::to_string(p.position) + " on machine " +
                                      std::to_string(p.machine));
            }
            queue[p.position] = j;
        }

        for (std::size_t machine = 0; machine < spec.machines; ++machine) {
            MachineState state;
            const auto& queue = queues[machine];
            for (std::size_t pos = 0; pos < queue.size(); ++pos) {
                const std::size_t j = queue[pos];
                if (j == n) {
                    throw ValidationError("plan stage " + std::to_string(i) + ": machine " + std::to_string(machine) +
                                          " has a gap at position " + std::to_string(pos));
                }
                StageRecord& rec = trace.records[j][i];
                rec.stage = i;
                rec.machine = machine;
                rec.position = pos;
                rec.release = i == 0 ? Scalar() : trace.records[j][i - 1].completion;
                rec.start = state.enqueue(rec.release, execution_time(instance.job(j), spec));
                rec.completion = state.available_at;
            }
        }
    }

    for (std::size_t j = 0; j < n; ++j) {
        trace.makespan = j == 0 ? trace.final_completion(j) : max(trace.makespan, trace.final_completion(j));
    }
    return trace;
}

Plan plan_of(const ScheduleTrace& trace) {
    Plan plan;
    plan.stages.assign(trace.stage_count(), std::vector<Placement>(trace.job_count()));
    for (std::size_t j = 0; j < trace.job_count(); ++j) {
        for (std::size_t i = 0; i < trace.stage_count(); ++i) {
            plan.stages[i][j] = Placement{trace.at(j, i).machine, trace.at(j, i).position};
        }
    }
    return plan;
}

std::string to_string(Violation::Kind kind) {
    switch (kind) {
    case Violation::Kind::Shape:
        return "shape";
    case Violation::Kind::MachineRange:
        return "machine-range";
    case Violation::Kind::QueueOrder:
        return "fcfs";
    case Violation::Kind::InitialRelease:
        return "initial-release";
    case Violation::Kind::Chaining:
        return "chaining";
    case Violation::Kind::StartBeforeRelease:
        return "start-before-release";
    case Violation::Kind::Duration:
        return "duration";
    case Violation::Kind::Overlap:
        return "overlap";
    case Violation::Kind::Makespan:
        return "makespan";
    }
    return "unknown";
}

std::vector<Violation> validate_trace(const Instance& instance, const ScheduleTrace& trace) {
    using Kind = Violation::Kind;
    std::vector<Violation> out;
    const std::size_t n = instance.job_count();
    const std::size_t k = instance.stage_count();

    if (trace.records.size() != n) {
        out.push_back({Kind::Shape, 0, 0, "trace has " + std::to_string(trace.records.size()) + " jobs"});
        return out;
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (trace.records[j].size() != k) {
            out.push_back({Kind::Shape, j, 0, "job has " + std::to_string(trace.records[j].size()) + " stage records"});
            return out;
        }
    }

    Scalar latest;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < k; ++i) {
            const StageRecord& rec = trace.at(j, i);
            if (rec.stage != i) {
                out.push_back({Kind::Shape, j, i, "record labelled stage " + std::to_string(rec.stage)});
            }
            if (rec.machine >= instance.stage(i).machines) {
                out.push_back({Kind::MachineRange, j, i, "machine " + std::to_string(rec.machine) + " out of range"});
            }
            if (i == 0 && rec.release.sign() != 0) {
                out.push_back({Kind::InitialRelease, j, i, "stage-0 release " + rec.release.str()});
            }
            if (i > 0 && rec.release != trace.at(j, i - 1).completion) {
                out.push_back({Kind::Chaining, j, i,
                               "release " + rec.release.str() + " != previous completion " +
                                   trace.at(j, i - 1).completion.str()});
            }
            if (rec.start < rec.release) {
                out.push_back({Kind::StartBeforeRelease, j, i,
                               "start " + rec.start.str() + " < release " + rec.release.str()});
            }
            const Scalar expected = rec.start + execution_time(instance.job(j), instance.stage(i));
            if (rec.completion != expected) {
                out.push_back({Kind::Duration, j, i,
                               "completion " + rec.completion.str() + " != start + size/speed = " + expected.str()});
            }
        }
        latest = j == 0 ? trace.final_completion(j) : max(latest, trace.final_completion(j));
    }
    if (latest != trace.makespan) {
        out.push_back({Kind::Makespan, 0, k - 1, "makespan " + trace.makespan.str() + " != latest completion " + latest.str()});
    }

    for (std::size_t i = 0; i < k; ++i) {
        std::vector<std::vector<std::size_t>> by_machine(instance.stage(i).machines);
        for (std::size_t j = 0; j < n; ++j) {
            if (trace.at(j, i).machine < by_machine.size()) {
                by_machine[trace.at(j, i).machine].push_back(j);
            }
        }
        for (std::size_t machine = 0; machine < by_machine.size(); ++machine) {
            auto jobs = by_machine[machine];
            std::sort(jobs.begin(), jobs.end(), [&](std::size_t a, std::size_t b) {
                return trace.at(a, i).position < trace.at(b, i).position;
            });
            for (std::size_t pos = 0; pos < jobs.size(); ++pos) {
                if (trace.at(jobs[pos], i).position != pos) {
                    out.push_back({Kind::QueueOrder, jobs[pos], i,
                                   "queue positions on machine " + std::to_string(machine) + " are not 0.." +
                                       std::to_string(jobs.size() - 1)});
                    break;
                }
            }
            for (std::size_t pos = 1; pos < jobs.size(); ++pos) {
                const StageRecord& prev = trace.at(jobs[pos - 1], i);
                const StageRecord& cur = trace.at(jobs[pos], i);
                if (cur.start < prev.start) {
                    out.push_back({Kind::QueueOrder, jobs[pos], i,
                                   "served before job " + std::to_string(jobs[pos - 1]) + " despite later queue position"});
                } else if (cur.start < prev.completion) {
                    out.push_back({Kind::Overlap, jobs[pos], i,
                                   "interval starting " + cur.start.str() + " overlaps job " +
                                       std::to_string(jobs[pos - 1]) + " ending " + prev.completion.str()});
                }
            }
        }
    }
    return out;
}

} // namespace msgame
