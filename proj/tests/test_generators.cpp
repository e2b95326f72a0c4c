#include <doctest.h>

#include "msgame/analysis.hpp"
#include "msgame/equilibrium.hpp"
#include "msgame/exact.hpp"
#include "msgame/generators.hpp"
#include "msgame/greedy.hpp"
#include "oracles.hpp"

using namespace msgame;

TEST_CASE("single-stage worst case, m = 2") {
    const Instance inst = gen_single_stage_worst(2);
    CHECK(inst.job_count() == 3);
    CHECK(inst.job(0).size == 1);
    CHECK(inst.job(1).size == 1);
    CHECK(inst.job(2).size == 2);
    CHECK(greedy_schedule(inst).trace.makespan == 3);
    CHECK(oracle::brute_force_opt(inst) == 2);
}

TEST_CASE("single-stage worst case, m = 4 at speed 2") {
    const Instance inst = gen_single_stage_worst(4, 2);
    CHECK(greedy_schedule(inst).trace.makespan == Scalar(7, 2));
    CHECK(single_stage_optimal(inst.jobs(), 4, 2).makespan == 2);
}

TEST_CASE("single-stage worst case sizes") {
    for (std::size_t m = 2; m <= 9; ++m) {
        const Instance inst = gen_single_stage_worst(m);
        CHECK(inst.job_count() == m * m - m + 1);
        CHECK(inst.job(inst.job_count() - 1).size == Scalar(static_cast<unsigned long>(m)));
    }
    CHECK_THROWS_AS(gen_single_stage_worst(1), ValidationError);
    CHECK_THROWS_AS(gen_single_stage_worst(3, 0), ValidationError);
}

TEST_CASE("multi-stage worst case approaches 2 - 1/m_max") {
    const Instance inst = gen_multistage_worst(3, 1, 3, {1, 1});
    CHECK(inst.stage(1).machines == 3);
    CHECK(inst.stage(0).speed == 1'000'000);
    SearchLimits limits;
    limits.max_jobs = 7;
    const PoAReport r = price_of_anarchy(inst, limits);
    REQUIRE(r.certified());
    const Scalar target(5, 3);
    CHECK(r.ratio > target - Scalar(1, 1000));
    CHECK(r.ratio < target + Scalar(1, 1000));
}

TEST_CASE("multi-stage worst case with one stage is the single-stage family") {
    CHECK(gen_multistage_worst(1, 0, 4, {}) == gen_single_stage_worst(4, 1));
}

TEST_CASE("multi-stage worst case at finite speed matches brute force") {
    const Instance inst = gen_multistage_worst(2, 0, 2, {1}, 1);
    const PoAReport r = price_of_anarchy(inst);
    REQUIRE(r.certified());
    CHECK(*r.t_opt == oracle::brute_force_opt(inst));
    CHECK(r.ratio == greedy_schedule(inst).trace.makespan / oracle::brute_force_opt(inst));
}

TEST_CASE("multi-stage worst case validation") {
    CHECK_THROWS_AS(gen_multistage_worst(0, 0, 3, {}), ValidationError);
    CHECK_THROWS_AS(gen_multistage_worst(3, 3, 3, {1, 1}), ValidationError);
    CHECK_THROWS_AS(gen_multistage_worst(3, 1, 3, {1}), ValidationError);
    CHECK_THROWS_AS(gen_multistage_worst(3, 1, 3, {1, 3}), ValidationError);
    CHECK_THROWS_AS(gen_multistage_worst(3, 1, 3, {0, 1}), ValidationError);
    CHECK_THROWS_AS(gen_multistage_worst(2, 0, 1, {1}), ValidationError);
    CHECK_THROWS_AS(gen_multistage_worst(2, 0, 3, {1}, Scalar(1, 2)), ValidationError);
}

TEST_CASE("three-stage example outputs") {
    const Instance inst = gen_appendix_example();
    const ScheduleTrace g = greedy_schedule(inst).trace;
    CHECK(g.makespan == Scalar(606, 5));
    CHECK(g.at(1, 0).completion == 11);
    CHECK(g.at(1, 1).completion == Scalar(56, 5));
    CHECK(g.at(1, 2).completion == Scalar(106, 5));
    const EquilibriumResult e = spne_solve(inst, ActionModel{}, SearchLimits::equilibrium_defaults());
    CHECK(e.spne_finals[0] == 113);
}

TEST_CASE("seeded draws follow SplitMix64") {
    // Reference outputs of SplitMix64 seeded with 0.
    CHECK(seeded_draw(0, 0) == 0xE220A8397B1DCDAFULL);
    CHECK(seeded_draw(0, 1) == 0x6E789E6AA1B965F4ULL);
    CHECK(draw_in_range(17, 3, 5) == 5);
    CHECK(draw_in_range(0, 3, 3) == 3);
}

TEST_CASE("random instances are reproducible and in range") {
    RandomParams p;
    p.seed = 99;
    p.jobs = 6;
    p.stages = 3;
    p.speed_min = Scalar(1, 2);
    p.speed_max = 2;
    p.speed_denominator = 4;
    CHECK(gen_random(p) == gen_random(p));

    std::size_t differing = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        p.seed = seed;
        const Instance inst = gen_random(p);
        CHECK(inst.job_count() == 6);
        CHECK(inst.stage_count() == 3);
        for (const auto& s : inst.stages()) {
            CHECK(s.machines >= 1);
            CHECK(s.machines <= 3);
            CHECK(s.speed >= Scalar(1, 2));
            CHECK(s.speed <= 2);
            CHECK((s.speed * 4).is_integer());
        }
        for (const auto& j : inst.jobs()) {
            CHECK(j.size >= 1);
            CHECK(j.size <= 10);
            CHECK(j.size.is_integer());
        }
        p.seed = seed + 1000;
        differing += gen_random(p) == inst ? 0 : 1;
    }
    CHECK(differing > 45);
}

TEST_CASE("random generator validation") {
    RandomParams p;
    p.jobs = 0;
    CHECK_THROWS_AS(gen_random(p), ValidationError);
    p = RandomParams{};
    p.stages = 0;
    CHECK_THROWS_AS(gen_random(p), ValidationError);
    p = RandomParams{};
    p.machines_min = 4;
    CHECK_THROWS_AS(gen_random(p), ValidationError);
    p = RandomParams{};
    p.size_min = Scalar(1, 3);
    p.size_max = Scalar(1, 2);
    p.size_denominator = 1;
    CHECK_THROWS_AS(gen_random(p), ValidationError);
}

TEST_CASE("property: seeded instances pass the bound suites") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        RandomParams p;
        p.seed = seed;
        p.jobs = 6;
        p.stages = 3;
        const Instance inst = gen_random(p);
        const PoAReport r = price_of_anarchy(inst);
        REQUIRE(r.certified());
        CHECK(r.within_ceiling());
        CHECK(check_multistage_chain(inst, greedy_schedule(inst).trace, r.t_opt).holds());
    }
}
