#include <doctest.h>

#include "msgame/generators.hpp"
#include "msgame/greedy.hpp"
#include "msgame/model.hpp"
#include "oracles.hpp"

using namespace msgame;
using oracle::q;

namespace {

Plan single_machine_plan(std::size_t n, std::size_t k) {
    Plan plan;
    plan.stages.assign(k, {});
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            plan.stages[i].push_back(Placement{0, j});
        }
    }
    return plan;
}

bool has_kind(const std::vector<Violation>& v, Violation::Kind kind) {
    return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.kind == kind; });
}

} // namespace

TEST_CASE("execution time is size over speed") {
    CHECK(execution_time(Job{0, 10}, StageSpec{2, 5}) == 2);
    CHECK(execution_time(Job{0, 1}, StageSpec{1, 1}) == 1);
    CHECK(execution_time(Job{0, 7}, StageSpec{1, 3}) == Scalar(7, 3));
}

TEST_CASE("instance validation") {
    CHECK_THROWS_AS(Instance({}, {StageSpec{1, 1}}), ValidationError);
    CHECK_THROWS_AS(Instance({1}, {}), ValidationError);
    CHECK_THROWS_AS(Instance({0}, {StageSpec{1, 1}}), ValidationError);
    CHECK_THROWS_AS(Instance({-1}, {StageSpec{1, 1}}), ValidationError);
    CHECK_THROWS_AS(Instance({1}, {StageSpec{0, 1}}), ValidationError);
    CHECK_THROWS_AS(Instance({1}, {StageSpec{1, 0}}), ValidationError);

    const Instance inst({3, 1, 2}, {StageSpec{2, 1}, StageSpec{3, q("1/2")}});
    CHECK(inst.job(1).id == 1);
    CHECK(inst.max_size() == 3);
    CHECK(inst.total_size() == 6);
    CHECK(inst.max_machines() == 3);
    CHECK(inst.min_throughput() == Scalar(3, 2));
}

TEST_CASE("machine state load and idleness") {
    MachineState m;
    CHECK(m.idle_at(0));
    CHECK(m.enqueue(2, 3) == 2);
    CHECK(m.available_at == 5);
    CHECK(m.load(2) == 10);
    CHECK(m.enqueue(1, 1) == 5);
    CHECK_FALSE(m.idle_at(5));
    CHECK(m.idle_at(6));
}

TEST_CASE("evaluate_schedule: one job, one stage") {
    const Instance inst({4}, {StageSpec{1, 1}});
    const ScheduleTrace t = evaluate_schedule(inst, single_machine_plan(1, 1));
    CHECK(t.at(0, 0).completion == 4);
    CHECK(t.makespan == 4);
}

TEST_CASE("evaluate_schedule: greedy plan of the three-stage example") {
    // Large job first through the single machines; small job alone in stage 2.
    const Instance inst = gen_appendix_example();
    Plan plan;
    plan.stages = {{{0, 0}, {0, 1}}, {{0, 0}, {1, 0}}, {{0, 1}, {0, 0}}};
    const ScheduleTrace t = evaluate_schedule(inst, plan);
    CHECK(t.final_completion(0) == Scalar(606, 5));
    CHECK(t.final_completion(1) == Scalar(106, 5));
    CHECK(validate_trace(inst, t).empty());
}

TEST_CASE("evaluate_schedule: balanced plan for [1,1,2] on two machines") {
    const Instance inst({1, 1, 2}, {StageSpec{2, 1}});
    Plan plan;
    plan.stages = {{{1, 0}, {1, 1}, {0, 0}}};
    const ScheduleTrace t = evaluate_schedule(inst, plan);
    CHECK(t.makespan == 2);
    CHECK(plan_of(t) == plan);
}

TEST_CASE("evaluate_schedule rejects malformed plans") {
    const Instance inst({1, 1}, {StageSpec{2, 1}});
    Plan wrong_stages;
    CHECK_THROWS_AS(evaluate_schedule(inst, wrong_stages), ValidationError);

    Plan bad_machine;
    bad_machine.stages = {{{0, 0}, {2, 0}}};
    CHECK_THROWS_AS(evaluate_schedule(inst, bad_machine), ValidationError);

    Plan duplicate_position;
    duplicate_position.stages = {{{0, 0}, {0, 0}}};
    CHECK_THROWS_AS(evaluate_schedule(inst, duplicate_position), ValidationError);

    Plan gap;
    gap.stages = {{{0, 0}, {0, 2}}};
    CHECK_THROWS_AS(evaluate_schedule(inst, gap), ValidationError);
}

TEST_CASE("validate_trace reports tampering") {
    const Instance inst({2, 3}, {StageSpec{1, 1}, StageSpec{1, 1}});
    const ScheduleTrace good = greedy_schedule(inst).trace;
    REQUIRE(validate_trace(inst, good).empty());

    SUBCASE("overlap") {
        ScheduleTrace t = good;
        t.records[1][0].start = 1;
        t.records[1][0].completion = 4;
        CHECK(has_kind(validate_trace(inst, t), Violation::Kind::Overlap));
    }
    SUBCASE("chaining") {
        ScheduleTrace t = good;
        t.records[0][1].release += 1;
        t.records[0][1].start += 1;
        t.records[0][1].completion += 1;
        CHECK(has_kind(validate_trace(inst, t), Violation::Kind::Chaining));
    }
    SUBCASE("duration") {
        ScheduleTrace t = good;
        t.records[0][0].completion += 1;
        CHECK(has_kind(validate_trace(inst, t), Violation::Kind::Duration));
    }
    SUBCASE("start before release") {
        ScheduleTrace t = good;
        t.records[1][1].start = t.records[1][1].release - 1;
        CHECK(has_kind(validate_trace(inst, t), Violation::Kind::StartBeforeRelease));
    }
    SUBCASE("makespan") {
        ScheduleTrace t = good;
        t.makespan += 1;
        CHECK(has_kind(validate_trace(inst, t), Violation::Kind::Makespan));
    }
    SUBCASE("shape") {
        ScheduleTrace t = good;
        t.records.pop_back();
        CHECK(has_kind(validate_trace(inst, t), Violation::Kind::Shape));
    }
}

TEST_CASE("property: evaluated plans are valid and scale with sizes") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        RandomParams p;
        p.seed = seed;
        p.jobs = 5;
        p.stages = 3;
        p.size_denominator = 2;
        const Instance inst = gen_random(p);
        const ScheduleTrace t = greedy_schedule(inst).trace;
        CHECK(validate_trace(inst, t).empty());
        CHECK(evaluate_schedule(inst, plan_of(t)) == t);

        // Doubling every size doubles every time under the same plan.
        std::vector<Scalar> doubled;
        for (const auto& job : inst.jobs()) {
            doubled.push_back(job.size * 2);
        }
        const Instance big(doubled, inst.stages());
        const ScheduleTrace tb = evaluate_schedule(big, plan_of(t));
        CHECK(tb.makespan == t.makespan * 2);

        // Cross-check against the plain queue runner.
        oracle::Queues queues(inst.stage_count());
        for (std::size_t i = 0; i < inst.stage_count(); ++i) {
            queues[i].resize(inst.stage(i).machines);
            for (std::size_t j = 0; j < inst.job_count(); ++j) {
                const auto& r = t.at(j, i);
                auto& qm = queues[i][r.machine];
                if (qm.size() <= r.position) {
                    qm.resize(r.position + 1);
                }
                qm[r.position] = j;
            }
        }
        const auto finals = oracle::run_queues(inst, queues);
        for (std::size_t j = 0; j < inst.job_count(); ++j) {
            CHECK(finals[j] == t.final_completion(j));
        }
    }
}
