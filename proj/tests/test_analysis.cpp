#include <doctest.h>

#include "msgame/analysis.hpp"
#include "msgame/generators.hpp"
#include "msgame/greedy.hpp"
#include "oracles.hpp"

using namespace msgame;
using oracle::q;

namespace {

const BoundEntry& entry(const BoundReport& r, const std::string& label, std::size_t stage, std::size_t rank) {
    for (const auto& e : r.entries) {
        if (e.label == label && e.stage == stage && e.rank == rank) {
            return e;
        }
    }
    FAIL("missing entry " << label << " stage " << stage << " rank " << rank);
    throw std::logic_error("unreachable");
}

} // namespace

TEST_CASE("sigma orders jobs by completion") {
    const std::vector<Scalar> c{12, Scalar(56, 5)};
    CHECK(sigma_permutation(c, 1).order == std::vector<std::size_t>{1, 0});
    const std::vector<Scalar> tied{3, 3, 3};
    CHECK(sigma_permutation(tied).order == std::vector<std::size_t>{0, 1, 2});

    const std::vector<Scalar> mixed{5, 1, 4, 1, 2};
    const SigmaPermutation s = sigma_permutation(mixed);
    CHECK(s.order == std::vector<std::size_t>{1, 3, 4, 2, 0});
    const auto inv = s.inverse();
    for (std::size_t j = 0; j < mixed.size(); ++j) {
        CHECK(s.order[inv[j]] == j);
    }
}

TEST_CASE("release premise on the three-stage example, second stage") {
    const Instance inst = gen_appendix_example();
    const ScheduleTrace t = greedy_schedule(inst).trace;
    const BoundReport r = check_release_premise(inst, t, 1, 0, q("1/10"));
    const BoundEntry& second = entry(r, "release-premise", 1, 2);
    CHECK(second.lhs == 11);
    CHECK(second.rhs == 100);
    // The first arrival, at 10, needs an offset of at least 10.
    REQUIRE(r.first_violation() != nullptr);
    CHECK(r.first_violation()->rank == 1);
    CHECK(r.parameters.at("T_min") == 10);
    CHECK(check_release_premise(inst, t, 1, 10, q("1/10")).holds());
}

TEST_CASE("release premise at the first stage holds with zero offset") {
    RandomParams p;
    p.jobs = 6;
    p.stages = 3;
    const Instance inst = gen_random(p);
    const ScheduleTrace t = greedy_schedule(inst).trace;
    CHECK(check_release_premise(inst, t, 0, 0, inst.min_throughput()).holds());
}

TEST_CASE("ms_star above the stage capacity is rejected") {
    const Instance inst = gen_appendix_example();
    const ScheduleTrace t = greedy_schedule(inst).trace;
    CHECK_THROWS_AS(check_release_premise(inst, t, 2, 0, Scalar(1)), std::invalid_argument);
    CHECK_THROWS_AS(check_release_premise(inst, t, 0, 0, Scalar(0)), std::invalid_argument);
    CHECK_THROWS_AS(check_multistage_chain(inst, t, std::nullopt, Scalar(1)), std::invalid_argument);
}

TEST_CASE("completion bound on [1,1,2] with two machines") {
    const Instance inst = gen_single_stage_worst(2);
    const ScheduleTrace t = greedy_schedule(inst).trace;
    const BoundReport r = check_completion_bound(inst, t, 0, 0, Scalar(2));
    CHECK(r.holds());
    const BoundEntry& third = entry(r, "completion", 0, 3);
    CHECK(third.lhs == 3);
    CHECK(third.rhs == 4);
    CHECK(entry(r, "completion-sigma", 0, 3).rhs == 4);
}

TEST_CASE("completion bound for a lone job") {
    for (std::size_t m = 1; m <= 4; ++m) {
        const Instance inst({q("7/2")}, {StageSpec{m, 3}});
        const ScheduleTrace t = greedy_schedule(inst).trace;
        CHECK(check_completion_bound(inst, t, 0, 0, inst.min_throughput()).holds());
    }
}

TEST_CASE("completion bound refuses a failed premise") {
    const Instance inst = gen_appendix_example();
    const ScheduleTrace t = greedy_schedule(inst).trace;
    // Stage 3 releases reach 12, far beyond an offset of zero with a fast rate.
    CHECK_THROWS_AS(check_completion_bound(inst, t, 2, 0, q("1/10")), std::invalid_argument);
}

TEST_CASE("chain on the three-stage example") {
    const Instance inst = gen_appendix_example();
    const ScheduleTrace t = greedy_schedule(inst).trace;
    const BoundReport r = check_multistage_chain(inst, t, Scalar(113));
    CHECK(r.holds());
    CHECK(r.parameters.at("T[0]") == 0);
    CHECK(r.parameters.at("T[1]") == 10);
    CHECK(r.parameters.at("T[2]") == 13);
    CHECK(r.parameters.at("T[3]") == 113);
    const BoundEntry& mk = entry(r, "makespan", 2, 2);
    CHECK(mk.lhs == Scalar(606, 5));
    CHECK(mk.rhs == 113 + 10);
    CHECK(entry(r, "lower-bounds-vs-opt", 2, 2).lhs == 112);

    // Each stage's chained bound agrees with the single-stage checker.
    const BoundReport third = check_completion_bound(inst, t, 2, 13, q("1/10"));
    CHECK(third.holds());
    CHECK(entry(third, "completion", 2, 2).rhs == entry(r, "completion", 2, 2).rhs);
}

TEST_CASE("single-stage chain reduces to the completion bound at offset zero") {
    const Instance inst({3, 1, 2, 2, 1}, {StageSpec{2, q("3/2")}});
    const ScheduleTrace t = greedy_schedule(inst).trace;
    const BoundReport chain = check_multistage_chain(inst, t);
    const BoundReport single = check_completion_bound(inst, t, 0, 0, inst.min_throughput());
    for (const auto& e : single.entries) {
        const BoundEntry& c = entry(chain, e.label, e.stage, e.rank);
        CHECK(c.lhs == e.lhs);
        CHECK(c.rhs == e.rhs);
    }
}

TEST_CASE("chain holds on the fast-stage family") {
    const Instance inst = gen_multistage_worst(3, 1, 3, {1, 1});
    const BoundReport r = check_multistage_chain(inst, greedy_schedule(inst).trace);
    CHECK(r.holds());
    CHECK(*r.min_slack() >= 0);
}

TEST_CASE("the chain catches an inflated trace") {
    const Instance inst = gen_appendix_example();
    ScheduleTrace t = greedy_schedule(inst).trace;
    t.records[0][2].completion = 1000;
    t.makespan = 1000;
    const BoundReport r = check_multistage_chain(inst, t);
    CHECK_FALSE(r.holds());
    REQUIRE(r.first_violation() != nullptr);
    CHECK(r.min_slack()->sign() < 0);
}

TEST_CASE("price of anarchy examples") {
    const PoAReport five = price_of_anarchy(gen_single_stage_worst(5));
    CHECK(five.certified());
    CHECK(five.ratio == Scalar(9, 5));
    CHECK(five.ceiling == Scalar(9, 5));
    CHECK(five.within_ceiling());

    const PoAReport lone = price_of_anarchy(Instance({2}, {StageSpec{3, 1}, StageSpec{1, 2}}));
    CHECK(lone.ratio == 1);

    const PoAReport appendix = price_of_anarchy(gen_appendix_example());
    CHECK(appendix.t_opt == Scalar(113));
    CHECK(appendix.ratio == Scalar(606, 565));
    CHECK(appendix.ceiling == Scalar(5, 2));
}

TEST_CASE("refused instances still report a rigorous bracket") {
    const Instance inst = gen_multistage_worst(3, 1, 4, {1, 1}, Scalar(100));
    const PoAReport r = price_of_anarchy(inst);
    CHECK(r.opt_source == OptSource::Refused);
    CHECK_FALSE(r.certified());
    CHECK(r.opt_lower <= r.opt_upper);
    CHECK(r.ratio_lower <= r.ratio);
    CHECK_FALSE(r.note.empty());
}

TEST_CASE("property: chain and ceilings hold on random instances") {
    for (std::uint64_t seed = 0; seed < 80; ++seed) {
        CAPTURE(seed);
        RandomParams p;
        p.seed = seed;
        p.jobs = 2 + seed % 5;
        p.stages = 1 + seed % 3;
        p.speed_denominator = 2;
        p.size_denominator = 2;
        const Instance inst = gen_random(p);
        const ScheduleTrace t = greedy_schedule(inst).trace;
        const PoAReport poa = price_of_anarchy(inst);
        REQUIRE(poa.certified());
        CHECK(poa.within_ceiling());
        const BoundReport chain = check_multistage_chain(inst, t, poa.t_opt);
        CHECK(chain.holds());

        // Independent evaluation of the final makespan bound.
        Scalar offset;
        for (const auto& s : inst.stages()) {
            const Scalar m(static_cast<unsigned long>(s.machines));
            offset += (Scalar(2) * m - 1) / (m * s.speed) * inst.max_size();
        }
        std::vector<Scalar> finals;
        for (std::size_t j = 0; j < inst.job_count(); ++j) {
            finals.push_back(t.final_completion(j));
        }
        const auto order = sigma_permutation(finals).order;
        Scalar prefix;
        for (std::size_t r = 0; r + 1 < order.size(); ++r) {
            prefix += inst.job(order[r]).size;
        }
        CHECK(entry(chain, "makespan", inst.stage_count() - 1, inst.job_count()).rhs ==
              offset + prefix / inst.min_throughput());
    }
}
