#include "msgame/equilibrium.hpp"

#include <algorithm>
#include <unordered_map>

#include "msgame/greedy.hpp"

namespace msgame {

std::string to_string(const GameAction& action) {
    return action.kind == GameAction::Kind::Defer ? "defer" : "machine " + std::to_string(action.machine);
}

namespace {

struct GameState {
    std::vector<std::vector<Scalar>> available;  // [stage][machine]
    std::vector<std::size_t> next_stage;         // per job; == k once finished
    std::vector<Scalar> ready;                   // release at next_stage, or final completion
    std::vector<std::size_t> batch;              // tied deciders, front moves next
    std::size_t batch_size = 0;                  // size when the batch formed
    std::vector<std::size_t> defers;             // per job, within the current batch
};

class Game {
  public:
    Game(const Instance& instance, const ActionModel& model, const SearchLimits& limits)
        : instance_(instance), model_(model), limits_(limits), k_(instance.stage_count()) {
        limits.require_within(instance);
    }

    GameState initial() const {
        GameState s;
        s.available.resize(k_);
        for (std::size_t i = 0; i < k_; ++i) {
            s.available[i].assign(instance_.stage(i).machines, Scalar());
        }
        s.next_stage.assign(instance_.job_count(), 0);
        s.ready.assign(instance_.job_count(), Scalar());
        s.defers.assign(instance_.job_count(), 0);
        form_batch(s);
        return s;
    }

    bool terminal(const GameState& s) const { return s.batch.empty(); }
    std::size_t decider(const GameState& s) const { return s.batch.front(); }

    // Machines in index order, then defer when permitted.
    std::vector<GameAction> actions(const GameState& s) const {
        const std::size_t j = decider(s);
        std::vector<GameAction> out;
        for (std::size_t a = 0; a < instance_.stage(s.next_stage[j]).machines; ++a) {
            out.push_back(GameAction::on(a));
        }
        const std::size_t cap = std::min(model_.max_deferrals, s.batch_size == 0 ? 0 : s.batch_size - 1);
        if (model_.allow_defer && s.batch.size() >= 2 && s.defers[j] < cap) {
            out.push_back(GameAction::defer());
        }
        return out;
    }

    GameAction greedy_action(const GameState& s) const {
        const std::size_t j = decider(s);
        const std::size_t i = s.next_stage[j];
        const StageSpec& spec = instance_.stage(i);
        std::vector<Scalar> loads;
        for (const auto& a : s.available[i]) {
            loads.push_back(spec.speed * a);
        }
        return GameAction::on(least_loaded(loads));
    }

    GameState apply(const GameState& s, const GameAction& action) const {
        GameState next = s;
        const std::size_t j = decider(s);
        if (action.kind == GameAction::Kind::Defer) {
            std::swap(next.batch[0], next.batch[1]);
            ++next.defers[j];
            return next;
        }
        const std::size_t i = s.next_stage[j];
        Scalar& machine = next.available[i].at(action.machine);
        const Scalar start = max(s.ready[j], machine);
        machine = start + execution_time(instance_.job(j), instance_.stage(i));
        next.ready[j] = machine;
        ++next.next_stage[j];
        next.batch.erase(next.batch.begin());
        if (next.batch.empty()) {
            form_batch(next);
        }
        return next;
    }

    // Final completion of every job under subgame-perfect play from `s`.
    const std::vector<Scalar>& value(const GameState& s) {
        return entry(s).values;
    }

    GameAction best_action(const GameState& s) { return entry(s).best; }

    std::uint64_t states() const { return memo_.size(); }

  private:
    struct Entry {
        std::vector<Scalar> values;
        GameAction best;
    };

    void form_batch(GameState& s) const {
        s.batch.clear();
        std::fill(s.defers.begin(), s.defers.end(), 0);
        const Scalar* earliest = nullptr;
        for (std::size_t j = 0; j < s.ready.size(); ++j) {
            if (s.next_stage[j] < k_ && (earliest == nullptr || s.ready[j] < *earliest)) {
                earliest = &s.ready[j];
            }
        }
        if (earliest != nullptr) {
            for (std::size_t j = 0; j < s.ready.size(); ++j) {
                if (s.next_stage[j] < k_ && s.ready[j] == *earliest) {
                    s.batch.push_back(j);
                }
            }
        }
        s.batch_size = s.batch.size();
    }

    static std::string key(const GameState& s) {
        std::string out;
        for (const auto& stage : s.available) {
            for (const auto& a : stage) {
                out += a.str();
                out += ',';
            }
            out += ';';
        }
        for (std::size_t j = 0; j < s.ready.size(); ++j) {
            out += std::to_string(s.next_stage[j]);
            out += '@';
            out += s.ready[j].str();
            out += ',';
        }
        out += '|';
        for (std::size_t j : s.batch) {
            out += std::to_string(j) + ':' + std::to_string(s.defers[j]) + ',';
        }
        out += std::to_string(s.batch_size);
        return out;
    }

    const Entry& entry(const GameState& s) {
        std::string k = key(s);
        if (auto it = memo_.find(k); it != memo_.end()) {
            return it->second;
        }
        if (memo_.size() >= limits_.node_budget) {
            throw LimitExceeded("equilibrium search exceeded the state budget of " +
                                std::to_string(limits_.node_budget));
        }

        Entry e;
        if (terminal(s)) {
            e.values = s.ready;
        } else {
            const std::size_t j = decider(s);
            bool have = false;
            for (const auto& action : actions(s)) {
                const std::vector<Scalar> child = value(apply(s, action));
                if (!have || child[j] < e.values[j]) {
                    e.values = child;
                    e.best = action;
                    have = true;
                }
            }
        }
        return memo_.emplace(std::move(k), std::move(e)).first->second;
    }

    const Instance& instance_;
    ActionModel model_;
    SearchLimits limits_;
    std::size_t k_;
    std::unordered_map<std::string, Entry> memo_;
};

// Walks a play path, recording the trace and the decision log.
class PathRecorder {
  public:
    explicit PathRecorder(const Instance& instance) : instance_(instance) {
        trace_.records.assign(instance.job_count(), std::vector<StageRecord>(instance.stage_count()));
        filled_.resize(instance.stage_count());
        for (std::size_t i = 0; i < instance.stage_count(); ++i) {
            filled_[i].assign(instance.stage(i).machines, 0);
        }
    }

    void record(const GameState& before, const GameAction& action, const GameState& after) {
        const std::size_t j = before.batch.front();
        const std::size_t i = before.next_stage[j];
        log_.push_back(GameDecision{before.ready[j], j, i, action});
        if (action.kind == GameAction::Kind::Defer) {
            return;
        }
        StageRecord& rec = trace_.records[j][i];
        rec.stage = i;
        rec.machine = action.machine;
        rec.position = filled_[i][action.machine]++;
        rec.release = before.ready[j];
        rec.completion = after.ready[j];
        rec.start = rec.completion - execution_time(instance_.job(j), instance_.stage(i));
    }

    ScheduleTrace finish() {
        for (std::size_t j = 0; j < trace_.job_count(); ++j) {
            trace_.makespan = j == 0 ? trace_.final_completion(j) : max(trace_.makespan, trace_.final_completion(j));
        }
        return trace_;
    }

    const std::vector<GameDecision>& log() const { return log_; }

  private:
    const Instance& instance_;
    ScheduleTrace trace_;
    std::vector<std::vector<std::size_t>> filled_;
    std::vector<GameDecision> log_;
};

std::vector<Scalar> finals_of(const ScheduleTrace& trace) {
    std::vector<Scalar> out;
    for (std::size_t j = 0; j < trace.job_count(); ++j) {
        out.push_back(trace.final_completion(j));
    }
    return out;
}

} // namespace

EquilibriumResult spne_solve(const Instance& instance, const ActionModel& model, const SearchLimits& limits) {
    Game game(instance, model, limits);
    GameState state = game.initial();
    game.value(state);

    PathRecorder recorder(instance);
    while (!game.terminal(state)) {
        const GameAction action = game.best_action(state);
        GameState next = game.apply(state, action);
        recorder.record(state, action, next);
        state = std::move(next);
    }

    EquilibriumResult result;
    result.spne_trace = recorder.finish();
    result.spne_path = recorder.log();
    result.greedy_trace = greedy_schedule(instance).trace;
    result.spne_finals = finals_of(result.spne_trace);
    result.greedy_finals = finals_of(result.greedy_trace);
    for (std::size_t j = 0; j < instance.job_count(); ++j) {
        result.deltas.push_back(result.spne_finals[j] - result.greedy_finals[j]);
    }
    result.greedy_is_spne_outcome = result.spne_trace == result.greedy_trace;
    result.states = game.states();
    return result;
}

GreedyCertificate check_greedy_spne(const Instance& instance, const ActionModel& model, const SearchLimits& limits) {
    Game game(instance, model, limits);
    GameState state = game.initial();

    GreedyCertificate cert;
    std::size_t index = 0;
    while (!game.terminal(state)) {
        const std::size_t j = game.decider(state);
        const GameAction greedy = game.greedy_action(state);
        const Scalar greedy_value = game.value(game.apply(state, greedy))[j];

        std::optional<Deviation> best;
        for (const auto& action : game.actions(state)) {
            if (action == greedy) {
                continue;
            }
            const Scalar v = game.value(game.apply(state, action))[j];
            if (v < greedy_value && (!best || v < best->deviation_value)) {
                best = Deviation{index, state.ready[j], j, state.next_stage[j], greedy, action, greedy_value, v};
            }
        }
        if (best) {
            cert.deviations.push_back(*best);
        }
        ++cert.decisions_checked;
        state = game.apply(state, greedy);
        ++index;
    }
    cert.greedy_is_spne = cert.deviations.empty();
    return cert;
}

bool verify_deviation(const Instance& instance, const ActionModel& model, const SearchLimits& limits,
                      const Deviation& deviation) {
    Game game(instance, model, limits);
    GameState state = game.initial();
    for (std::size_t index = 0; index < deviation.decision_index; ++index) {
        if (game.terminal(state)) {
            return false;
        }
        state = game.apply(state, game.greedy_action(state));
    }
    if (game.terminal(state) || game.decider(state) != deviation.job ||
        state.next_stage[deviation.job] != deviation.stage || state.ready[deviation.job] != deviation.time) {
        return false;
    }
    const auto legal = game.actions(state);
    if (std::find(legal.begin(), legal.end(), deviation.deviation) == legal.end() ||
        game.greedy_action(state) != deviation.greedy_action) {
        return false;
    }
    const Scalar greedy_value = game.value(game.apply(state, deviation.greedy_action))[deviation.job];
    const Scalar deviation_value = game.value(game.apply(state, deviation.deviation))[deviation.job];
    return greedy_value == deviation.greedy_value && deviation_value == deviation.deviation_value &&
           deviation_value < greedy_value;
}

} // namespace msgame
