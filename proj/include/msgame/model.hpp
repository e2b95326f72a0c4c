#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "msgame/scalar.hpp"

namespace msgame {

/// Raised when an instance or plan breaks a structural invariant.
class ValidationError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

struct Job {
    std::size_t id = 0;  ///< position in the t=0 priority order
    Scalar size;         ///< work units, strictly positive

    friend bool operator==(const Job&, const Job&) = default;
};

struct StageSpec {
    std::size_t machines = 1;  ///< identical machines in this stage
    Scalar speed = 1;          ///< work units per unit time, strictly positive

    friend bool operator==(const StageSpec&, const StageSpec&) = default;
};

/// Ordered job list plus the stage pipeline. The job order doubles as the
/// tie-break priority for the simultaneous release at t=0.
class Instance {
  public:
    /// Throws ValidationError unless there is at least one job and one stage,
    /// every size and speed is positive and every stage has a machine.
    Instance(const std::vector<Scalar>& sizes, std::vector<StageSpec> stages);

    [[nodiscard]] const std::vector<Job>& jobs() const { return jobs_; }
    [[nodiscard]] const std::vector<StageSpec>& stages() const { return stages_; }
    [[nodiscard]] const Job& job(std::size_t id) const { return jobs_.at(id); }
    [[nodiscard]] const StageSpec& stage(std::size_t index) const { return stages_.at(index); }
    [[nodiscard]] std::size_t job_count() const { return jobs_.size(); }
    [[nodiscard]] std::size_t stage_count() const { return stages_.size(); }

    [[nodiscard]] Scalar max_size() const;
    [[nodiscard]] Scalar total_size() const;
    [[nodiscard]] std::size_t max_machines() const;
    /// Bottleneck throughput (ms)*: min over stages of machines * speed.
    [[nodiscard]] Scalar min_throughput() const;

    friend bool operator==(const Instance&, const Instance&) = default;

  private:
    std::vector<Job> jobs_;
    std::vector<StageSpec> stages_;
};

/// One job's passage through one stage.
struct StageRecord {
    std::size_t stage = 0;
    std::size_t machine = 0;
    std::size_t position = 0;  ///< index in the machine's service queue
    Scalar release;
    Scalar start;
    Scalar completion;

    friend bool operator==(const StageRecord&, const StageRecord&) = default;
};

/// Timed schedule: `records[job][stage]`.
struct ScheduleTrace {
    std::vector<std::vector<StageRecord>> records;
    Scalar makespan;

    [[nodiscard]] const StageRecord& at(std::size_t job, std::size_t stage) const {
        return records.at(job).at(stage);
    }
    [[nodiscard]] std::size_t job_count() const { return records.size(); }
    [[nodiscard]] std::size_t stage_count() const { return records.empty() ? 0 : records.front().size(); }
    [[nodiscard]] Scalar final_completion(std::size_t job) const { return records.at(job).back().completion; }

    friend bool operator==(const ScheduleTrace&, const ScheduleTrace&) = default;
};

/// Queue tail of one machine. The load L(t) is speed * available_at.
struct MachineState {
    Scalar available_at;

    [[nodiscard]] Scalar load(const Scalar& speed) const { return speed * available_at; }
    [[nodiscard]] bool idle_at(const Scalar& t) const { return available_at <= t; }
    /// Appends a job released at `release` taking `duration`; returns its start.
    Scalar enqueue(const Scalar& release, const Scalar& duration);
};

/// Where one job runs in one stage.
struct Placement {
    std::size_t machine = 0;
    std::size_t position = 0;

    friend bool operator==(const Placement&, const Placement&) = default;
};

/// Centrally chosen plan: `stages[stage][job]`.
struct Plan {
    std::vector<std::vector<Placement>> stages;

    friend bool operator==(const Plan&, const Plan&) = default;
};

Scalar execution_time(const Job& job, const StageSpec& stage);

/// Forward recursion of the stage semantics for an arbitrary plan. Jobs on a
/// machine are served in plan queue order even if that disagrees with their
/// release order. Throws ValidationError for malformed plans.
ScheduleTrace evaluate_schedule(const Instance& instance, const Plan& plan);

/// Extracts the plan (machine and queue position per stage) a trace realises.
Plan plan_of(const ScheduleTrace& trace);

struct Violation {
    enum class Kind { Shape, MachineRange, QueueOrder, InitialRelease, Chaining, StartBeforeRelease, Duration, Overlap, Makespan };
    Kind kind;
    std::size_t job = 0;
    std::size_t stage = 0;
    std::string detail;
};

std::string to_string(Violation::Kind kind);

/// Empty iff the trace satisfies every structural invariant: queue positions
/// form a permutation per machine and agree with start order, intervals on a
/// machine are disjoint, stage-0 releases are zero, releases chain from the
/// previous completion, durations match size / speed and the makespan is the
/// latest final completion.
std::vector<Violation> validate_trace(const Instance& instance, const ScheduleTrace& trace);

} // namespace msgame
