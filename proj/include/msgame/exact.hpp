#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

#include "msgame/model.hpp"

namespace msgame {

/// Raised when an instance is larger than the solver agreed to handle.
class LimitExceeded : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Size caps and effort budgets for the exhaustive solvers. Instances beyond
/// the caps are refused; runs that exhaust a budget report bounds instead of
/// pretending to be exact.
struct SearchLimits {
    std::size_t max_jobs = 6;
    std::size_t max_stages = 3;
    std::size_t max_machines = 3;
    std::uint64_t node_budget = 50'000'000;
    double time_budget_seconds = 300.0;

    /// n <= 8 for the general solver on one stage; n <= 6, k <= 3, m <= 3 otherwise.
    static SearchLimits general_defaults(const Instance& instance);
    /// Partition search on one stage, where bounds close most large instances at the root.
    static SearchLimits single_stage_defaults();
    /// Backward induction over the sequential game.
    static SearchLimits equilibrium_defaults();

    /// Throws LimitExceeded naming the first cap the instance breaks.
    void require_within(const Instance& instance) const;
};

enum class OptStatus { Exact, BudgetExhausted };

std::string to_string(OptStatus status);

struct OptResult {
    Scalar makespan;  ///< optimum when Exact, best plan found otherwise
    Plan witness;     ///< evaluates to `makespan`
    OptStatus status = OptStatus::Exact;
    Scalar lower_bound;  ///< equals makespan when Exact
    std::uint64_t nodes = 0;
};

struct OptLowerBounds {
    Scalar path_bound;        ///< sum over stages of p_max / s_i
    Scalar bottleneck_bound;  ///< total size / min_i m_i s_i

    [[nodiscard]] const Scalar& best() const { return max(path_bound, bottleneck_bound); }
};

OptLowerBounds opt_lower_bounds(const Instance& instance);

/// Exact minimum makespan over all plans, machine sequences unconstrained by
/// arrival order. Branch and bound over semi-active schedules built in
/// strictly increasing (start, stage, job) order, with machines of equal
/// availability treated as interchangeable.
OptResult optimal_makespan(const Instance& instance, const SearchLimits& limits);
OptResult optimal_makespan(const Instance& instance);

/// Exact minimum of (largest machine total) / speed over all m-way partitions.
OptResult single_stage_optimal(std::span<const Job> jobs, std::size_t machines, const Scalar& speed,
                               const SearchLimits& limits);
OptResult single_stage_optimal(std::span<const Job> jobs, std::size_t machines, const Scalar& speed);

/// Feasible plan from greedy play on the jobs sorted by non-increasing size.
/// Used as an incumbent and as an upper bound on the optimum.
Plan largest_first_plan(const Instance& instance);

/// Relabels machines inside each stage so that machines are ordered by the
/// smallest job id they serve; unused machines come last.
Plan canonical_plan(const Plan& plan, const Instance& instance);

} // namespace msgame
