#include "msgame/generators.hpp"

namespace msgame {

Instance gen_single_stage_worst(std::size_t m, const Scalar& speed) {
    if (m < 2) {
        throw ValidationError("single-stage worst case needs m >= 2");
    }
    if (speed.sign() <= 0) {
        throw ValidationError("speed must be positive");
    }
    std::vector<Scalar> sizes(m * (m - 1), Scalar(1));
    sizes.emplace_back(static_cast<unsigned long>(m));
    return Instance(sizes, {StageSpec{m, speed}});
}

Instance gen_multistage_worst(std::size_t k, std::size_t bottleneck, std::size_t m_max,
                              const std::vector<std::size_t>& other_machine_counts, const Scalar& fast_speed) {
    if (k == 0) {
        throw ValidationError("need at least one stage");
    }
    if (bottleneck >= k) {
        throw ValidationError("bottleneck stage " + std::to_string(bottleneck) + " out of range for " +
                              std::to_string(k) + " stages");
    }
    if (m_max < 2) {
        throw ValidationError("multi-stage worst case needs m_max >= 2");
    }
    if (other_machine_counts.size() != k - 1) {
        throw ValidationError("expected " + std::to_string(k - 1) + " machine counts for the non-bottleneck stages, got " +
                              std::to_string(other_machine_counts.size()));
    }
    if (fast_speed < Scalar(1)) {
        throw ValidationError("fast_speed must be at least 1");
    }

    std::vector<StageSpec> stages;
    std::size_t other = 0;
    for (std::size_t i = 0; i < k; ++i) {
        if (i == bottleneck) {
            stages.push_back(StageSpec{m_max, Scalar(1)});
            continue;
        }
        const std::size_t count = other_machine_counts[other++];
        if (count == 0 || count >= m_max) {
            throw ValidationError("non-bottleneck stages need between 1 and m_max - 1 machines, got " +
                                  std::to_string(count));
        }
        stages.push_back(StageSpec{count, fast_speed});
    }

    std::vector<Scalar> sizes(m_max * (m_max - 1), Scalar(1));
    sizes.emplace_back(static_cast<unsigned long>(m_max));
    return Instance(sizes, std::move(stages));
}

Instance gen_appendix_example() {
    return Instance({Scalar(10), Scalar(1)},
                    {StageSpec{1, Scalar(1)}, StageSpec{2, Scalar(5)}, StageSpec{1, Scalar(1, 10)}});
}

std::uint64_t seeded_draw(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t draw_in_range(std::uint64_t draw, std::uint64_t lo, std::uint64_t hi) {
    return lo + draw % (hi - lo + 1);
}

namespace {

// Integer numerators q with lo <= q / den <= hi.
std::pair<std::uint64_t, std::uint64_t> numerator_range(const Scalar& lo, const Scalar& hi, std::uint64_t den,
                                                        const char* what) {
    if (den == 0) {
        throw ValidationError(std::string(what) + " denominator must be positive");
    }
    if (lo.sign() <= 0 || hi < lo) {
        throw ValidationError(std::string(what) + " range must be positive and non-empty");
    }
    const mpz_class d(static_cast<unsigned long>(den));
    mpz_class q_lo;
    mpz_class q_hi;
    const mpz_class lo_num = lo.raw().get_num() * d;
    const mpz_class hi_num = hi.raw().get_num() * d;
    mpz_cdiv_q(q_lo.get_mpz_t(), lo_num.get_mpz_t(), lo.raw().get_den().get_mpz_t());
    mpz_fdiv_q(q_hi.get_mpz_t(), hi_num.get_mpz_t(), hi.raw().get_den().get_mpz_t());
    if (q_hi < q_lo) {
        throw ValidationError(std::string(what) + " range contains no multiple of 1/" + std::to_string(den));
    }
    if (!q_hi.fits_ulong_p()) {
        throw ValidationError(std::string(what) + " range too large");
    }
    return {q_lo.get_ui(), q_hi.get_ui()};
}

} // namespace

Instance gen_random(const RandomParams& params) {
    if (params.jobs == 0) {
        throw ValidationError("random instance needs at least one job");
    }
    if (params.stages == 0) {
        throw ValidationError("random instance needs at least one stage");
    }
    if (params.machines_min == 0 || params.machines_max < params.machines_min) {
        throw ValidationError("machine range must be positive and non-empty");
    }
    const auto [speed_lo, speed_hi] =
        numerator_range(params.speed_min, params.speed_max, params.speed_denominator, "speed");
    const auto [size_lo, size_hi] = numerator_range(params.size_min, params.size_max, params.size_denominator, "size");

    std::uint64_t index = 0;
    const auto next = [&](std::uint64_t lo, std::uint64_t hi) { return draw_in_range(seeded_draw(params.seed, index++), lo, hi); };

    std::vector<StageSpec> stages(params.stages);
    for (auto& stage : stages) {
        stage.machines = static_cast<std::size_t>(next(params.machines_min, params.machines_max));
    }
    for (auto& stage : stages) {
        stage.speed = Scalar(static_cast<unsigned long>(next(speed_lo, speed_hi))) /
                      Scalar(static_cast<unsigned long>(params.speed_denominator));
    }
    std::vector<Scalar> sizes(params.jobs);
    for (auto& size : sizes) {
        size = Scalar(static_cast<unsigned long>(next(size_lo, size_hi))) /
               Scalar(static_cast<unsigned long>(params.size_denominator));
    }
    return Instance(sizes, std::move(stages));
}

} // namespace msgame
