#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "msgame/model.hpp"

namespace msgame {

/// m(m-1) unit jobs followed by one job of size m on a single stage of m
/// machines at speed s. Greedy reaches (2m-1)/s, the optimum is m/s.
Instance gen_single_stage_worst(std::size_t m, const Scalar& speed = 1);

/// `k` stages where stage `bottleneck` has `m_max` machines at speed 1 and
/// every other stage runs at `fast_speed` with the listed machine counts (in
/// stage order, skipping the bottleneck). Jobs follow the single-stage worst
/// case for m_max. As fast_speed grows the ratio approaches 2 - 1/m_max.
Instance gen_multistage_worst(std::size_t k, std::size_t bottleneck, std::size_t m_max,
                              const std::vector<std::size_t>& other_machine_counts,
                              const Scalar& fast_speed = Scalar(1'000'000));

/// Three stages (1 machine at speed 1, 2 at speed 5, 1 at speed 1/10) and
/// jobs of size 10 then 1: greedy play is not subgame perfect here.
Instance gen_appendix_example();

/// Parameters for seeded random instances. Sizes are multiples of
/// 1/size_denominator inside [size_min, size_max]; speeds likewise.
struct RandomParams {
    std::size_t jobs = 4;
    std::size_t stages = 2;
    std::size_t machines_min = 1;
    std::size_t machines_max = 3;
    Scalar speed_min = 1;
    Scalar speed_max = 3;
    std::uint64_t speed_denominator = 1;
    Scalar size_min = 1;
    Scalar size_max = 10;
    std::uint64_t size_denominator = 1;
    std::uint64_t seed = 0;
};

/// SplitMix64 output for draw `index` under `seed`: the state is
/// seed + (index + 1) * 0x9E3779B97F4A7C15, then the standard finaliser.
std::uint64_t seeded_draw(std::uint64_t seed, std::uint64_t index);

/// Uniform integer in [lo, hi] from a draw: lo + draw % (hi - lo + 1).
std::uint64_t draw_in_range(std::uint64_t draw, std::uint64_t lo, std::uint64_t hi);

/// Draws, in order: machine count per stage, speed per stage, size per job.
/// Draw index d consumes seeded_draw(seed, d). Throws ValidationError on
/// empty ranges or zero counts.
Instance gen_random(const RandomParams& params);

} // namespace msgame
