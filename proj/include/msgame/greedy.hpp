#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "msgame/model.hpp"

namespace msgame {

/// One machine choice made by a released job.
struct GreedyEvent {
    Scalar time;
    std::size_t job = 0;
    std::size_t stage = 0;
    std::vector<Scalar> loads;  ///< L_alpha at decision time, per machine
    std::size_t machine = 0;

    friend bool operator==(const GreedyEvent&, const GreedyEvent&) = default;
};

struct GreedyResult {
    ScheduleTrace trace;
    std::vector<GreedyEvent> events;
};

/// Lowest index attaining the minimum load.
std::size_t least_loaded(std::span<const Scalar> loads);

/// Simulates the game with every job greedily joining the least loaded
/// machine at its release. Decisions happen in ascending (release, job id);
/// at t=0 that is the instance order. An earlier decider's enqueue is visible
/// to later deciders with the same release time.
GreedyResult greedy_schedule(const Instance& instance);

/// Job ids ordered by (release time at `stage`, job id).
std::vector<std::size_t> release_order(const ScheduleTrace& trace, std::size_t stage);

} // namespace msgame
