#include <doctest.h>

#include "msgame/equilibrium.hpp"
#include "msgame/generators.hpp"
#include "msgame/greedy.hpp"
#include "oracles.hpp"

using namespace msgame;

namespace {

const SearchLimits kLimits = SearchLimits::equilibrium_defaults();
const ActionModel kDefer{true};
const ActionModel kNoDefer{false};

std::vector<Scalar> completions_at(const ScheduleTrace& t, std::size_t stage) {
    std::vector<Scalar> out;
    for (std::size_t j = 0; j < t.job_count(); ++j) {
        out.push_back(t.at(j, stage).completion);
    }
    return out;
}

} // namespace

TEST_CASE("three-stage example with deferral: the large job yields") {
    const Instance inst = gen_appendix_example();
    const EquilibriumResult r = spne_solve(inst, kDefer, kLimits);
    CHECK(completions_at(r.spne_trace, 0) == std::vector<Scalar>{11, 1});
    CHECK(completions_at(r.spne_trace, 1) == std::vector<Scalar>{13, Scalar(6, 5)});
    CHECK(completions_at(r.spne_trace, 2) == std::vector<Scalar>{113, Scalar(56, 5)});
    CHECK(r.spne_finals == std::vector<Scalar>{113, Scalar(56, 5)});
    CHECK(r.greedy_finals == std::vector<Scalar>{Scalar(606, 5), Scalar(106, 5)});
    CHECK(r.deltas == std::vector<Scalar>{Scalar(-41, 5), -10});
    CHECK_FALSE(r.greedy_is_spne_outcome);
    REQUIRE_FALSE(r.spne_path.empty());
    CHECK(r.spne_path.front().job == 0);
    CHECK(r.spne_path.front().action == GameAction::defer());
    CHECK(validate_trace(inst, r.spne_trace).empty());
}

TEST_CASE("three-stage example without deferral: equilibrium path is greedy") {
    const Instance inst = gen_appendix_example();
    const EquilibriumResult r = spne_solve(inst, kNoDefer, kLimits);
    CHECK(r.greedy_is_spne_outcome);
    CHECK(r.spne_trace == greedy_schedule(inst).trace);
    CHECK(r.spne_finals[0] == Scalar(606, 5));
    for (const auto& d : r.spne_path) {
        CHECK(d.action.kind == GameAction::Kind::Machine);
    }
}

TEST_CASE("a zero deferral cap behaves like no deferral") {
    const Instance inst = gen_appendix_example();
    const EquilibriumResult r = spne_solve(inst, ActionModel{true, 0}, kLimits);
    CHECK(r.spne_finals[0] == Scalar(606, 5));
}

TEST_CASE("greedy check finds the large job's deviation") {
    const Instance inst = gen_appendix_example();
    const GreedyCertificate cert = check_greedy_spne(inst, kDefer, kLimits);
    CHECK_FALSE(cert.greedy_is_spne);
    REQUIRE(cert.first() != nullptr);
    const Deviation& d = *cert.first();
    CHECK(d.job == 0);
    CHECK(d.stage == 0);
    CHECK(d.decision_index == 0);
    CHECK(d.deviation == GameAction::defer());
    CHECK(d.greedy_value == Scalar(606, 5));
    CHECK(d.deviation_value == 113);
    CHECK(d.improvement() == Scalar(41, 5));
    CHECK(verify_deviation(inst, kDefer, kLimits, d));

    Deviation forged = d;
    forged.deviation_value = 100;
    CHECK_FALSE(verify_deviation(inst, kDefer, kLimits, forged));
    forged = d;
    forged.decision_index = 1;
    CHECK_FALSE(verify_deviation(inst, kDefer, kLimits, forged));
    CHECK_FALSE(verify_deviation(inst, kNoDefer, kLimits, d));
}

TEST_CASE("[1,1,2] on two machines: greedy survives every deviation") {
    const Instance inst({1, 1, 2}, {StageSpec{2, 1}});
    const GreedyCertificate cert = check_greedy_spne(inst, kNoDefer, kLimits);
    CHECK(cert.greedy_is_spne);
    CHECK(cert.decisions_checked == 3);

    // Independent backward induction over the 2x2x2 tree.
    const std::vector<Scalar> sizes{1, 1, 2};
    const oracle::SingleStageGame game{sizes, 2, 1};
    CHECK(game.solve({}) == std::vector<std::size_t>{0, 1, 0});
    CHECK_FALSE(game.greedy_has_profitable_deviation({0, 1, 0}));
    CHECK(spne_solve(inst, kNoDefer, kLimits).greedy_is_spne_outcome);
}

TEST_CASE("a single job plays greedily") {
    const Instance inst({4}, {StageSpec{2, 1}, StageSpec{3, 2}});
    const EquilibriumResult r = spne_solve(inst, kDefer, kLimits);
    CHECK(r.greedy_is_spne_outcome);
    CHECK(r.spne_finals == std::vector<Scalar>{6});
    CHECK(check_greedy_spne(inst, kDefer, kLimits).greedy_is_spne);
}

TEST_CASE("one machine everywhere leaves nothing to deviate to") {
    const Instance inst({3, 1, 2}, {StageSpec{1, 1}, StageSpec{1, 2}});
    const GreedyCertificate cert = check_greedy_spne(inst, kNoDefer, kLimits);
    CHECK(cert.greedy_is_spne);
    CHECK(cert.decisions_checked == 6);
}

TEST_CASE("instances beyond the limits are refused") {
    const Instance inst({1, 1, 1, 1, 1, 1}, {StageSpec{2, 1}});
    CHECK_THROWS_AS(spne_solve(inst, kDefer, kLimits), LimitExceeded);
    SearchLimits tiny = kLimits;
    tiny.node_budget = 3;
    CHECK_THROWS_AS(spne_solve(gen_appendix_example(), kDefer, tiny), LimitExceeded);
}

TEST_CASE("property: single-stage equilibria match independent backward induction") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        CAPTURE(seed);
        RandomParams p;
        p.seed = seed;
        p.jobs = 2 + seed % 3;
        p.stages = 1;
        p.size_max = 4;
        const Instance inst = gen_random(p);
        std::vector<Scalar> sizes;
        for (const auto& job : inst.jobs()) {
            sizes.push_back(job.size);
        }
        const oracle::SingleStageGame game{sizes, inst.stage(0).machines, inst.stage(0).speed};
        const auto profile = game.solve({});

        const EquilibriumResult r = spne_solve(inst, kNoDefer, kLimits);
        for (std::size_t j = 0; j < inst.job_count(); ++j) {
            CHECK(r.spne_trace.at(j, 0).machine == profile[j]);
        }
        CHECK(r.spne_trace.makespan == greedy_schedule(inst).trace.makespan);

        std::vector<std::size_t> greedy;
        for (std::size_t j = 0; j < inst.job_count(); ++j) {
            greedy.push_back(r.greedy_trace.at(j, 0).machine);
        }
        const GreedyCertificate cert = check_greedy_spne(inst, kNoDefer, kLimits);
        CHECK(cert.greedy_is_spne == !game.greedy_has_profitable_deviation(greedy));
    }
}

TEST_CASE("property: equilibrium paths are valid and every certificate replays") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        CAPTURE(seed);
        RandomParams p;
        p.seed = seed;
        p.jobs = 3;
        p.stages = 2 + seed % 2;
        p.machines_max = 2;
        p.size_max = 5;
        const Instance inst = gen_random(p);
        for (const ActionModel& model : {kDefer, kNoDefer}) {
            const EquilibriumResult r = spne_solve(inst, model, kLimits);
            CHECK(validate_trace(inst, r.spne_trace).empty());
            const GreedyCertificate cert = check_greedy_spne(inst, model, kLimits);
            CHECK(cert.decisions_checked >= inst.job_count() * inst.stage_count());
            for (const auto& d : cert.deviations) {
                CHECK(d.improvement() > 0);
                CHECK(verify_deviation(inst, model, kLimits, d));
            }
        }
    }
}
