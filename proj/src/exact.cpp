#include "msgame/exact.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <optional>
#include <tuple>

#include "msgame/greedy.hpp"

namespace msgame {

SearchLimits SearchLimits::general_defaults(const Instance& instance) {
    SearchLimits limits;
    if (instance.stage_count() == 1) {
        limits.max_jobs = 8;
        limits.max_stages = 1;
        limits.max_machines = 8;
    }
    return limits;
}

SearchLimits SearchLimits::single_stage_defaults() {
    SearchLimits limits;
    limits.max_jobs = 64;
    limits.max_stages = 1;
    limits.max_machines = 16;
    return limits;
}

SearchLimits SearchLimits::equilibrium_defaults() {
    SearchLimits limits;
    limits.max_jobs = 5;
    limits.max_stages = 3;
    limits.max_machines = 3;
    limits.node_budget = 5'000'000;
    return limits;
}

void SearchLimits::require_within(const Instance& instance) const {
    if (instance.job_count() > max_jobs) {
        throw LimitExceeded("instance has " + std::to_string(instance.job_count()) + " jobs, limit is " +
                            std::to_string(max_jobs));
    }
    if (instance.stage_count() > max_stages) {
        throw LimitExceeded("instance has " + std::to_string(instance.stage_count()) + " stages, limit is " +
                            std::to_string(max_stages));
    }
    if (instance.max_machines() > max_machines) {
        throw LimitExceeded("instance has a stage with " + std::to_string(instance.max_machines()) +
                            " machines, limit is " + std::to_string(max_machines));
    }
    if (node_budget == 0 || time_budget_seconds <= 0) {
        throw LimitExceeded("search budgets must be positive");
    }
}

std::string to_string(OptStatus status) {
    return status == OptStatus::Exact ? "exact" : "budget-exhausted";
}

OptLowerBounds opt_lower_bounds(const Instance& instance) {
    OptLowerBounds bounds;
    const Scalar p_max = instance.max_size();
    for (const auto& stage : instance.stages()) {
        bounds.path_bound += p_max / stage.speed;
    }
    bounds.bottleneck_bound = instance.total_size() / instance.min_throughput();
    return bounds;
}

Plan canonical_plan(const Plan& plan, const Instance& instance) {
    Plan out = plan;
    for (std::size_t i = 0; i < plan.stages.size(); ++i) {
        const std::size_t m = instance.stage(i).machines;
        const std::size_t n = plan.stages[i].size();
        std::vector<std::size_t> first_job(m, n);
        for (std::size_t j = 0; j < n; ++j) {
            auto& slot = first_job[plan.stages[i][j].machine];
            slot = std::min(slot, j);
        }
        std::vector<std::size_t> order(m);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return first_job[a] < first_job[b]; });
        std::vector<std::size_t> relabel(m);
        for (std::size_t pos = 0; pos < m; ++pos) {
            relabel[order[pos]] = pos;
        }
        for (auto& placement : out.stages[i]) {
            placement.machine = relabel[placement.machine];
        }
    }
    return out;
}

Plan largest_first_plan(const Instance& instance) {
    const std::size_t n = instance.job_count();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return instance.job(a).size > instance.job(b).size; });
    std::vector<Scalar> sizes;
    sizes.reserve(n);
    for (std::size_t j : order) {
        sizes.push_back(instance.job(j).size);
    }
    const Instance sorted(sizes, instance.stages());
    const Plan sorted_plan = plan_of(greedy_schedule(sorted).trace);

    Plan plan;
    plan.stages.assign(instance.stage_count(), std::vector<Placement>(n));
    for (std::size_t i = 0; i < instance.stage_count(); ++i) {
        for (std::size_t rank = 0; rank < n; ++rank) {
            plan.stages[i][order[rank]] = sorted_plan.stages[i][rank];
        }
    }
    return plan;
}

namespace {

using Clock = std::chrono::steady_clock;

class Budget {
  public:
    explicit Budget(const SearchLimits& limits)
        : node_budget_(limits.node_budget),
          deadline_(Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                       std::chrono::duration<double>(limits.time_budget_seconds))) {}

    // False once either budget is spent.
    bool tick() {
        ++nodes_;
        if (nodes_ > node_budget_) {
            exhausted_ = true;
        } else if ((nodes_ & 1023U) == 0 && Clock::now() > deadline_) {
            exhausted_ = true;
        }
        return !exhausted_;
    }

    [[nodiscard]] bool exhausted() const { return exhausted_; }
    [[nodiscard]] std::uint64_t nodes() const { return nodes_; }

  private:
    std::uint64_t node_budget_;
    Clock::time_point deadline_;
    std::uint64_t nodes_ = 0;
    bool exhausted_ = false;
};

// Scaled integers when every time fits in int64, exact rationals otherwise.
std::int64_t divide_up(std::int64_t a, std::int64_t q) { return a / q + (a % q != 0 ? 1 : 0); }
Scalar divide_up(const Scalar& a, std::int64_t q) { return a / Scalar(static_cast<long>(q)); }

// Smallest level C with sum_a max(0, C - floor_a) >= work.
template <typename V>
V water_level(std::vector<V> floors, const V& work) {
    std::sort(floors.begin(), floors.end());
    V filled{};
    for (std::size_t q = 1; q <= floors.size(); ++q) {
        filled += floors[q - 1];
        V level = divide_up(filled + work, static_cast<std::int64_t>(q));
        if (q == floors.size() || level <= floors[q]) {
            return level;
        }
    }
    return floors.back() + work;
}

template <typename V>
struct Operation {
    V start;
    std::size_t stage;
    std::size_t job;
    std::size_t machine;
};

// Enumerates schedules whose operations are started in strictly increasing
// (start, stage, job) order, each on the machine that frees up first. Some
// optimal schedule has that form: list-scheduling any schedule's operations
// in start order onto first-free machines never starts an operation later.
template <typename V>
class FlowShopSearch {
  public:
    FlowShopSearch(std::vector<std::vector<V>> exec, const std::vector<std::size_t>& machines,
                   const SearchLimits& limits)
        : n_(exec.size()), k_(machines.size()), budget_(limits), exec_(std::move(exec)) {
        tail_.assign(n_, std::vector<V>(k_ + 1));
        for (std::size_t j = 0; j < n_; ++j) {
            for (std::size_t i = k_; i-- > 0;) {
                tail_[j][i] = tail_[j][i + 1] + exec_[j][i];
            }
        }
        avail_.resize(k_);
        for (std::size_t i = 0; i < k_; ++i) {
            avail_[i].assign(machines[i], V{});
        }
        next_stage_.assign(n_, 0);
        ready_.assign(n_, V{});
        twin_.assign(n_, n_);
        for (std::size_t j = 0; j < n_; ++j) {
            for (std::size_t e = 0; e < j; ++e) {
                if (exec_[e] == exec_[j]) {
                    twin_[j] = e;
                }
            }
        }
    }

    // Searches for a schedule shorter than `incumbent`; returns true if found.
    bool run(const V& incumbent, const V& lower_bound) {
        best_ = incumbent;
        root_bound_ = std::max(lower_bound, node_bound());
        if (root_bound_ < best_) {
            dfs();
        }
        return found_;
    }

    [[nodiscard]] const V& best() const { return best_; }
    [[nodiscard]] const V& root_bound() const { return root_bound_; }
    [[nodiscard]] bool exhausted() const { return budget_.exhausted(); }
    [[nodiscard]] std::uint64_t nodes() const { return budget_.nodes(); }

    [[nodiscard]] Plan best_plan() const {
        Plan plan;
        plan.stages.assign(k_, std::vector<Placement>(n_));
        std::vector<std::vector<std::size_t>> filled(k_);
        for (std::size_t i = 0; i < k_; ++i) {
            filled[i].assign(avail_[i].size(), 0);
        }
        for (const auto& op : best_path_) {
            plan.stages[op.stage][op.job] = Placement{op.machine, filled[op.stage][op.machine]++};
        }
        return plan;
    }

  private:
    V node_bound() const {
        const V t0 = has_last_ ? last_start_ : V{};
        V bound{};
        for (std::size_t j = 0; j < n_; ++j) {
            if (next_stage_[j] == k_) {
                bound = std::max(bound, ready_[j]);
                continue;
            }
            const auto& machines = avail_[next_stage_[j]];
            const V& earliest_machine = *std::min_element(machines.begin(), machines.end());
            bound = std::max(bound, std::max(std::max(ready_[j], t0), earliest_machine) + tail_[j][next_stage_[j]]);
        }

        std::vector<V> floors;
        for (std::size_t i = 0; i < k_; ++i) {
            V work{};
            V earliest{};
            V min_tail{};
            bool any = false;
            for (std::size_t j = 0; j < n_; ++j) {
                const std::size_t s = next_stage_[j];
                if (s > i) {
                    continue;
                }
                const V arrival = std::max(ready_[j], t0) + tail_[j][s] - tail_[j][i];
                if (!any) {
                    earliest = arrival;
                    min_tail = tail_[j][i + 1];
                    any = true;
                } else {
                    earliest = std::min(earliest, arrival);
                    min_tail = std::min(min_tail, tail_[j][i + 1]);
                }
                work += exec_[j][i];
            }
            if (!any) {
                continue;
            }
            floors.clear();
            for (const auto& a : avail_[i]) {
                floors.push_back(std::max(a, earliest));
            }
            bound = std::max(bound, water_level(floors, work) + min_tail);
        }
        return bound;
    }

    void dfs() {
        if (done_ == n_) {
            V makespan{};
            for (const auto& r : ready_) {
                makespan = std::max(makespan, r);
            }
            if (makespan < best_) {
                best_ = makespan;
                best_path_ = path_;
                found_ = true;
            }
            return;
        }
        if (node_bound() >= best_ || !budget_.tick()) {
            return;
        }

        std::vector<Operation<V>> children;
        std::vector<bool> offered(n_, false);
        for (std::size_t j = 0; j < n_; ++j) {
            const std::size_t i = next_stage_[j];
            if (i == k_) {
                continue;
            }
            const auto& machines = avail_[i];
            const std::size_t a = static_cast<std::size_t>(std::min_element(machines.begin(), machines.end()) -
                                                           machines.begin());
            V start = std::max(ready_[j], machines[a]);
            if (has_last_ && std::tie(start, i, j) <= std::tie(last_start_, last_stage_, last_job_)) {
                continue;
            }
            // An identical job in the same state already offers this move.
            const std::size_t e = twin_[j];
            if (e < n_ && offered[e] && next_stage_[e] == i && ready_[e] == ready_[j]) {
                offered[j] = true;
                continue;
            }
            offered[j] = true;
            children.push_back(Operation<V>{std::move(start), i, j, a});
        }
        std::sort(children.begin(), children.end(), [](const Operation<V>& x, const Operation<V>& y) {
            return std::tie(x.start, x.stage, x.job) < std::tie(y.start, y.stage, y.job);
        });

        for (const auto& op : children) {
            apply_and_recurse(op);
            if (budget_.exhausted()) {
                return;
            }
        }
    }

    void apply_and_recurse(const Operation<V>& op) {
        const V saved_avail = avail_[op.stage][op.machine];
        const V saved_ready = ready_[op.job];
        const V saved_last = last_start_;
        const std::size_t saved_last_stage = last_stage_;
        const std::size_t saved_last_job = last_job_;
        const bool saved_has_last = has_last_;

        const V completion = op.start + exec_[op.job][op.stage];
        avail_[op.stage][op.machine] = completion;
        ready_[op.job] = completion;
        if (++next_stage_[op.job] == k_) {
            ++done_;
        }
        last_start_ = op.start;
        last_stage_ = op.stage;
        last_job_ = op.job;
        has_last_ = true;
        path_.push_back(op);

        dfs();

        path_.pop_back();
        if (next_stage_[op.job]-- == k_) {
            --done_;
        }
        avail_[op.stage][op.machine] = saved_avail;
        ready_[op.job] = saved_ready;
        last_start_ = saved_last;
        last_stage_ = saved_last_stage;
        last_job_ = saved_last_job;
        has_last_ = saved_has_last;
    }

    std::size_t n_;
    std::size_t k_;
    Budget budget_;

    std::vector<std::vector<V>> exec_;
    std::vector<std::vector<V>> tail_;  // tail_[j][i] = sum of exec_[j][i..k)

    std::vector<std::vector<V>> avail_;
    std::vector<std::size_t> next_stage_;
    std::vector<V> ready_;
    std::vector<std::size_t> twin_;  // nearest lower id with identical times, or n_
    std::size_t done_ = 0;

    V last_start_{};
    std::size_t last_stage_ = 0;
    std::size_t last_job_ = 0;
    bool has_last_ = false;
    std::vector<Operation<V>> path_;

    V best_{};
    V root_bound_{};
    bool found_ = false;
    std::vector<Operation<V>> best_path_;
};

struct SearchOutcome {
    Scalar best;
    Scalar root_bound;
    std::optional<Plan> plan;
    bool exhausted;
    std::uint64_t nodes;
};

template <typename V, typename ToV, typename FromV>
SearchOutcome run_flow_shop(const Instance& instance, const SearchLimits& limits, const Scalar& incumbent,
                            const Scalar& lower_bound, ToV to_v, FromV from_v) {
    std::vector<std::vector<V>> exec(instance.job_count(), std::vector<V>(instance.stage_count()));
    std::vector<std::size_t> machines;
    for (std::size_t i = 0; i < instance.stage_count(); ++i) {
        machines.push_back(instance.stage(i).machines);
        for (std::size_t j = 0; j < instance.job_count(); ++j) {
            exec[j][i] = to_v(execution_time(instance.job(j), instance.stage(i)));
        }
    }
    FlowShopSearch<V> search(std::move(exec), machines, limits);
    // The scaled lower bound is rounded up; all schedule lengths are integral there.
    const bool improved = search.run(to_v(incumbent), to_v(lower_bound));
    SearchOutcome out{from_v(search.best()), from_v(search.root_bound()), std::nullopt, search.exhausted(),
                      search.nodes()};
    if (improved) {
        out.plan = search.best_plan();
    }
    return out;
}

SearchOutcome search_flow_shop(const Instance& instance, const SearchLimits& limits, const Scalar& incumbent,
                               const Scalar& lower_bound) {
    mpz_class scale = 1;
    Scalar total;
    for (std::size_t j = 0; j < instance.job_count(); ++j) {
        for (std::size_t i = 0; i < instance.stage_count(); ++i) {
            const Scalar p = execution_time(instance.job(j), instance.stage(i));
            total += p;
            mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), p.raw().get_den().get_mpz_t());
        }
    }
    // Every semi-active schedule ends by the total work, well inside int64.
    const mpq_class scaled_total = total.raw() * mpq_class(scale) + incumbent.raw() * mpq_class(scale);
    if (scaled_total < mpq_class(mpz_class(1) << 60)) {
        const auto to_v = [&](const Scalar& x) {
            const mpq_class y = x.raw() * mpq_class(scale);
            mpz_class q;
            mpz_cdiv_q(q.get_mpz_t(), y.get_num_mpz_t(), y.get_den_mpz_t());
            return static_cast<std::int64_t>(q.get_si());
        };
        const auto from_v = [&](std::int64_t v) { return Scalar(mpq_class(mpz_class(static_cast<long>(v)), scale)); };
        return run_flow_shop<std::int64_t>(instance, limits, incumbent, lower_bound, to_v, from_v);
    }
    const auto same = [](const Scalar& x) { return x; };
    return run_flow_shop<Scalar>(instance, limits, incumbent, lower_bound, same, same);
}

OptResult flow_shop_optimal(const Instance& instance, const SearchLimits& limits) {
    const Plan greedy_plan = plan_of(greedy_schedule(instance).trace);
    const Plan sorted_plan = largest_first_plan(instance);
    const Scalar greedy_makespan = evaluate_schedule(instance, greedy_plan).makespan;
    const Scalar sorted_makespan = evaluate_schedule(instance, sorted_plan).makespan;

    OptResult result;
    result.witness = sorted_makespan < greedy_makespan ? sorted_plan : greedy_plan;
    result.makespan = min(greedy_makespan, sorted_makespan);
    const Scalar bounds = opt_lower_bounds(instance).best();

    const SearchOutcome outcome = search_flow_shop(instance, limits, result.makespan, bounds);
    result.nodes = outcome.nodes;
    if (outcome.plan) {
        result.witness = *outcome.plan;
        result.makespan = evaluate_schedule(instance, result.witness).makespan;
        if (result.makespan != outcome.best) {
            throw std::logic_error("optimal_makespan: witness does not reproduce its makespan");
        }
    }
    result.witness = canonical_plan(result.witness, instance);
    if (outcome.exhausted) {
        result.status = OptStatus::BudgetExhausted;
        result.lower_bound = max(bounds, outcome.root_bound);
    } else {
        result.status = OptStatus::Exact;
        result.lower_bound = result.makespan;
    }
    if (evaluate_schedule(instance, result.witness).makespan != result.makespan) {
        throw std::logic_error("optimal_makespan: witness does not reproduce its makespan");
    }
    return result;
}

class PartitionSearch {
  public:
    PartitionSearch(std::span<const Job> jobs, std::size_t machines, const SearchLimits& limits)
        : jobs_(jobs.begin(), jobs.end()), machines_(machines), budget_(limits) {
        std::stable_sort(jobs_.begin(), jobs_.end(), [](const Job& a, const Job& b) { return a.size > b.size; });
        suffix_.assign(jobs_.size() + 1, Scalar());
        for (std::size_t r = jobs_.size(); r-- > 0;) {
            suffix_[r] = suffix_[r + 1] + jobs_[r].size;
        }
        loads_.assign(machines_, Scalar());
        assignment_.assign(jobs_.size(), 0);
    }

    void run() {
        // Largest-first list scheduling as the incumbent.
        std::vector<Scalar> loads(machines_);
        best_assignment_.assign(jobs_.size(), 0);
        for (std::size_t r = 0; r < jobs_.size(); ++r) {
            const std::size_t a = least_loaded(loads);
            loads[a] += jobs_[r].size;
            best_assignment_[r] = a;
        }
        best_ = *std::max_element(loads.begin(), loads.end());

        root_bound_ = max(jobs_.front().size, suffix_[0] / Scalar(static_cast<unsigned long>(machines_)));
        if (root_bound_ < best_) {
            dfs(0, Scalar());
        }
    }

    [[nodiscard]] const Scalar& best_load() const { return best_; }
    [[nodiscard]] const Scalar& root_bound() const { return root_bound_; }
    [[nodiscard]] bool exhausted() const { return budget_.exhausted(); }
    [[nodiscard]] std::uint64_t nodes() const { return budget_.nodes(); }

    // Machine per original job id.
    [[nodiscard]] std::vector<std::size_t> machine_by_id(std::size_t n) const {
        std::vector<std::size_t> out(n, 0);
        for (std::size_t r = 0; r < jobs_.size(); ++r) {
            out[jobs_[r].id] = best_assignment_[r];
        }
        return out;
    }

  private:
    void dfs(std::size_t rank, const Scalar& current_max) {
        if (budget_.exhausted()) {
            return;
        }
        if (rank == jobs_.size()) {
            if (current_max < best_) {
                best_ = current_max;
                best_assignment_ = assignment_;
            }
            return;
        }
        Scalar used;
        for (const auto& l : loads_) {
            used += l;
        }
        const Scalar bound = max(current_max, (used + suffix_[rank]) / Scalar(static_cast<unsigned long>(machines_)));
        if (bound >= best_ || !budget_.tick()) {
            return;
        }
        for (std::size_t a = 0; a < machines_; ++a) {
            if (std::find(loads_.begin(), loads_.begin() + static_cast<std::ptrdiff_t>(a), loads_[a]) !=
                loads_.begin() + static_cast<std::ptrdiff_t>(a)) {
                continue;
            }
            Scalar next = loads_[a] + jobs_[rank].size;
            if (next >= best_) {
                continue;
            }
            const Scalar saved = loads_[a];
            loads_[a] = next;
            assignment_[rank] = a;
            dfs(rank + 1, max(current_max, next));
            loads_[a] = saved;
            if (budget_.exhausted()) {
                return;
            }
        }
    }

    std::vector<Job> jobs_;
    std::size_t machines_;
    Budget budget_;
    std::vector<Scalar> suffix_;
    std::vector<Scalar> loads_;
    std::vector<std::size_t> assignment_;
    std::vector<std::size_t> best_assignment_;
    Scalar best_;
    Scalar root_bound_;
};

} // namespace

OptResult optimal_makespan(const Instance& instance, const SearchLimits& limits) {
    limits.require_within(instance);
    return flow_shop_optimal(instance, limits);
}

OptResult optimal_makespan(const Instance& instance) {
    return optimal_makespan(instance, SearchLimits::general_defaults(instance));
}

OptResult single_stage_optimal(std::span<const Job> jobs, std::size_t machines, const Scalar& speed,
                               const SearchLimits& limits) {
    if (jobs.empty() || machines == 0 || speed.sign() <= 0) {
        throw ValidationError("single_stage_optimal needs jobs, machines and a positive speed");
    }
    if (jobs.size() > limits.max_jobs) {
        throw LimitExceeded(std::to_string(jobs.size()) + " jobs exceeds limit " + std::to_string(limits.max_jobs));
    }
    if (machines > limits.max_machines) {
        throw LimitExceeded(std::to_string(machines) + " machines exceeds limit " +
                            std::to_string(limits.max_machines));
    }
    for (std::size_t r = 0; r < jobs.size(); ++r) {
        if (jobs[r].id >= jobs.size() || jobs[r].size.sign() <= 0) {
            throw ValidationError("single_stage_optimal: job ids must be 0..n-1 with positive sizes");
        }
    }

    PartitionSearch search(jobs, machines, limits);
    search.run();

    const std::size_t n = jobs.size();
    const std::vector<std::size_t> machine = search.machine_by_id(n);
    Plan plan;
    plan.stages.assign(1, std::vector<Placement>(n));
    std::vector<std::size_t> filled(machines, 0);
    for (std::size_t j = 0; j < n; ++j) {
        plan.stages[0][j] = Placement{machine[j], filled[machine[j]]++};
    }

    std::vector<Scalar> sizes(n);
    for (const auto& job : jobs) {
        sizes[job.id] = job.size;
    }
    const Instance instance(sizes, {StageSpec{machines, speed}});

    OptResult result;
    result.witness = canonical_plan(plan, instance);
    result.makespan = search.best_load() / speed;
    result.nodes = search.nodes();
    if (search.exhausted()) {
        result.status = OptStatus::BudgetExhausted;
        result.lower_bound = search.root_bound() / speed;
    } else {
        result.status = OptStatus::Exact;
        result.lower_bound = result.makespan;
    }
    if (evaluate_schedule(instance, result.witness).makespan != result.makespan) {
        throw std::logic_error("single_stage_optimal: witness does not reproduce its makespan");
    }
    return result;
}

OptResult single_stage_optimal(std::span<const Job> jobs, std::size_t machines, const Scalar& speed) {
    return single_stage_optimal(jobs, machines, speed, SearchLimits::single_stage_defaults());
}

} // namespace msgame
