#include "refnav/env.hpp"

#include <algorithm>
#include <stdexcept>

#include "json.hpp"
#include "refnav/metrics.hpp"

namespace refnav {

EpisodeState reset(const Task& task, const NeighborGraph& graph,
                   const std::string& start_id, const RewardConfig& cfg) {
    if (std::find(task.candidate_ids.begin(), task.candidate_ids.end(), start_id) ==
        task.candidate_ids.end())
        throw std::invalid_argument("reset: start id '" + start_id + "' is not a candidate");
    (void)graph.neighbors(start_id);  // start must be part of the task graph

    EpisodeState state;
    state.task = &task;
    state.current_id = start_id;
    state.step_index = 0;
    state.visited.push_back(start_id);
    state.visited_set.insert(start_id);
    state.step_cap = ctn(task.candidate_ids.size(), task.target_ids.size());
    if (task.target_ids.count(start_id)) {
        state.done = true;
        state.succeeded = true;
        state.reset_reward = cfg.terminal_scale / 1.0;  // degenerate episode, T = 1
    }
    return state;
}

StepResult step(EpisodeState& state, const NeighborGraph& graph,
                const std::string& action_id, const RewardConfig& cfg) {
    if (state.done) throw std::logic_error("step: episode already finished");
    if (!graph.has_neighbor(state.current_id, action_id))
        throw std::invalid_argument("step: action '" + action_id +
                                    "' is not a neighbor of '" + state.current_id + "'");

    state.current_id = action_id;
    state.step_index += 1;
    state.visited.push_back(action_id);
    state.visited_set.insert(action_id);

    StepResult result;
    if (state.task->target_ids.count(action_id)) {
        state.done = true;
        state.succeeded = true;
        result.reward = cfg.terminal_scale / static_cast<double>(state.step_index);
        result.done = true;
    } else {
        result.reward = cfg.step_penalty;
        if (state.step_index >= state.step_cap) {
            state.done = true;
            result.done = true;
        }
    }
    return result;
}

std::vector<double> discounted_returns(const std::vector<double>& rewards, double gamma) {
    if (rewards.empty())
        throw std::invalid_argument("discounted_returns: empty reward list");
    if (gamma <= 0.0 || gamma > 1.0)
        throw std::invalid_argument("discounted_returns: gamma must be in (0,1]");
    std::vector<double> returns(rewards.size());
    double acc = 0.0;
    for (std::size_t i = rewards.size(); i-- > 0;) {
        acc = rewards[i] + gamma * acc;
        returns[i] = acc;
    }
    return returns;
}

void export_trace_jsonl(const std::vector<TraceRecord>& records, std::ostream& out) {
    for (const auto& r : records) {
        nlohmann::ordered_json j;
        j["t"] = r.t;
        j["from_id"] = r.from_id;
        j["to_id"] = r.to_id;
        j["reward"] = r.reward;
        j["done"] = r.done;
        out << j.dump() << "\n";
    }
}

}  // namespace refnav
