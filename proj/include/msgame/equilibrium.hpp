#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "msgame/exact.hpp"
#include "msgame/model.hpp"

namespace msgame {

/// Action set of the sequential game.
///
/// Besides choosing a machine, a job whose decision is tied in time with
/// other jobs may `defer`: it steps behind the next job of the tied batch.
/// Without this move a job on a single-machine stage has no way to yield
/// priority. Each job may defer at most min(max_deferrals, batch size - 1)
/// times per batch, which bounds the tree.
struct ActionModel {
    bool allow_defer = true;
    std::size_t max_deferrals = std::numeric_limits<std::size_t>::max();
};

struct GameAction {
    enum class Kind { Machine, Defer };
    Kind kind = Kind::Machine;
    std::size_t machine = 0;

    static GameAction on(std::size_t machine) { return {Kind::Machine, machine}; }
    static GameAction defer() { return {Kind::Defer, 0}; }

    friend bool operator==(const GameAction&, const GameAction&) = default;
};

std::string to_string(const GameAction& action);

/// A decision taken on a play path.
struct GameDecision {
    Scalar time;
    std::size_t job = 0;
    std::size_t stage = 0;
    GameAction action;
};

struct EquilibriumResult {
    ScheduleTrace spne_trace;
    std::vector<GameDecision> spne_path;
    ScheduleTrace greedy_trace;
    std::vector<Scalar> spne_finals;    ///< per job, final-stage completion
    std::vector<Scalar> greedy_finals;  ///< per job, final-stage completion
    std::vector<Scalar> deltas;         ///< spne_finals - greedy_finals
    bool greedy_is_spne_outcome = false;
    std::uint64_t states = 0;
};

/// Backward induction over the game. Every decider minimises its own final
/// completion given subgame-perfect play afterwards; indifferent deciders
/// prefer a machine over deferring, then the lowest machine index. Throws
/// LimitExceeded when the instance or the state budget is too large.
EquilibriumResult spne_solve(const Instance& instance, const ActionModel& model, const SearchLimits& limits);

/// A profitable one-shot deviation from greedy play at one node of the
/// greedy path, with both continuations played subgame-perfectly.
struct Deviation {
    std::size_t decision_index = 0;  ///< position on the greedy path
    Scalar time;
    std::size_t job = 0;
    std::size_t stage = 0;
    GameAction greedy_action;
    GameAction deviation;
    Scalar greedy_value;
    Scalar deviation_value;

    [[nodiscard]] Scalar improvement() const { return greedy_value - deviation_value; }
};

struct GreedyCertificate {
    bool greedy_is_spne = true;
    std::size_t decisions_checked = 0;
    std::vector<Deviation> deviations;  ///< every profitable node, best alternative each

    [[nodiscard]] const Deviation* first() const { return deviations.empty() ? nullptr : &deviations.front(); }
};

/// Walks the greedy path and compares, at each node, the greedy action with
/// every alternative under subgame-perfect continuation.
GreedyCertificate check_greedy_spne(const Instance& instance, const ActionModel& model, const SearchLimits& limits);

/// Replays the greedy path up to the certificate's node, then solves both
/// subgames afresh. True iff both values match the certificate exactly and
/// the deviation is strictly profitable.
bool verify_deviation(const Instance& instance, const ActionModel& model, const SearchLimits& limits,
                      const Deviation& deviation);

} // namespace msgame
