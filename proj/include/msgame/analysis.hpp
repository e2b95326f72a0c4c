#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "msgame/exact.hpp"
#include "msgame/model.hpp"

namespace msgame {

/// sigma[rank] = job with the rank-th smallest completion at `stage`;
/// equal completions keep ascending job id.
struct SigmaPermutation {
    std::size_t stage = 0;
    std::vector<std::size_t> order;

    [[nodiscard]] std::vector<std::size_t> inverse() const;
};

SigmaPermutation sigma_permutation(std::span<const Scalar> completions, std::size_t stage = 0);
SigmaPermutation sigma_permutation(const ScheduleTrace& trace, std::size_t stage);

/// One instance of an inequality lhs <= rhs.
struct BoundEntry {
    std::string label;
    std::size_t stage = 0;
    std::size_t rank = 0;  ///< 1-based index j in the ordering the label names
    std::optional<std::size_t> job;
    Scalar lhs;
    Scalar rhs;

    [[nodiscard]] Scalar slack() const { return rhs - lhs; }
};

struct BoundReport {
    std::string inequality;
    std::vector<BoundEntry> entries;
    std::map<std::string, Scalar> parameters;

    /// True iff every slack is non-negative.
    [[nodiscard]] bool holds() const;
    [[nodiscard]] std::optional<Scalar> min_slack() const;
    [[nodiscard]] const BoundEntry* first_violation() const;
};

/// Evaluates r_j <= T + (1/ms_star) * sum_{l<j} p_l over the stage's release
/// order. Reports the smallest T that would satisfy it as "T_min".
/// Throws std::invalid_argument unless 0 < ms_star <= m_i s_i.
BoundReport check_release_premise(const Instance& instance, const ScheduleTrace& trace, std::size_t stage,
                                  const Scalar& offset, const Scalar& ms_star);

/// Checks the per-stage completion bound
///   c_j <= T + (2m-1)/(ms) * p_max + (1/ms_star) * sum_{l<j} p_l
/// in release order, and its analogue in completion order with prefix sums
/// taken over sigma. p_max is the largest size over all jobs. Throws
/// std::invalid_argument when the release premise fails for (T, ms_star).
BoundReport check_completion_bound(const Instance& instance, const ScheduleTrace& trace, std::size_t stage,
                                   const Scalar& offset, const Scalar& ms_star);

/// Runs the stage-by-stage induction on a greedy trace: premise and both
/// completion bounds per stage with T accumulating (2m_i-1)/(m_i s_i) p_max,
/// then the makespan bound and its relaxation to (3 - 1/m_max) times the
/// larger optimum lower bound, and to (3 - 1/m_max) * T_opt when given.
/// Failures are data; nothing throws for a well-formed trace.
BoundReport check_multistage_chain(const Instance& instance, const ScheduleTrace& trace,
                                   const std::optional<Scalar>& t_opt = std::nullopt,
                                   const std::optional<Scalar>& ms_star = std::nullopt);

enum class OptSource { Exact, BudgetExhausted, Refused };

std::string to_string(OptSource source);

struct PoAReport {
    Scalar t_equ;
    OptSource opt_source = OptSource::Exact;
    std::optional<Scalar> t_opt;  ///< set only when certified
    Scalar opt_lower;             ///< certified lower bound on the optimum
    Scalar opt_upper;             ///< makespan of the best plan known
    OptLowerBounds bounds;
    Scalar ratio;        ///< exact when certified, else t_equ / opt_lower (an upper estimate)
    Scalar ratio_lower;  ///< t_equ / opt_upper, always a valid lower bound on the true ratio
    Scalar ceiling;      ///< 2 - 1/m for one stage, 3 - 1/m_max otherwise
    std::string family;
    std::string note;

    [[nodiscard]] bool certified() const { return t_opt.has_value(); }
    /// Ratio proven within the ceiling: exact ratio when certified, else the upper estimate.
    [[nodiscard]] bool within_ceiling() const { return ratio <= ceiling; }
};

/// 2 - 1/m for single-stage instances, 3 - 1/m_max otherwise.
Scalar poa_ceiling(const Instance& instance);

/// Greedy makespan against the exact optimum. Single-stage instances use the
/// partition solver; others the flow-shop search. A refusal or an exhausted
/// budget degrades to the certified bounds instead of failing.
PoAReport price_of_anarchy(const Instance& instance, const std::optional<SearchLimits>& limits = std::nullopt,
                           std::string family = {});

} // namespace msgame
