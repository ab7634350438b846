#pragma once

#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "refnav/corpus.hpp"
#include "refnav/recsys.hpp"

namespace refnav {

struct RewardConfig {
    double step_penalty = -0.3;   // c_P, applied on every non-target move
    double discount = 0.9;        // gamma
    double terminal_scale = 1.0;  // terminal reward = terminal_scale / T
};

struct EpisodeState {
    const Task* task = nullptr;
    std::string current_id;
    std::size_t step_index = 0;             // t
    std::vector<std::string> visited;       // in visit order, starts with start_id
    std::set<std::string> visited_set;
    std::size_t step_cap = 0;               // = CTN of the task
    bool done = false;
    bool succeeded = false;
    double reset_reward = 0.0;              // nonzero only when start is a target (T=1)

    std::size_t unique_reads() const { return visited_set.size(); }
};

// Start an episode at start_id. Starting on a target terminates immediately
// with the degenerate T=1 terminal reward.
EpisodeState reset(const Task& task, const NeighborGraph& graph,
                   const std::string& start_id, const RewardConfig& cfg = {});

struct StepResult {
    double reward = 0.0;
    bool done = false;
};

// Deterministic transition to action_id; action must be a neighbor of the
// current reference. Revisits are legal moves (they cost a step penalty but
// not a new read).
StepResult step(EpisodeState& state, const NeighborGraph& graph,
                const std::string& action_id, const RewardConfig& cfg = {});

// G_t = r_t + gamma * G_{t+1}
std::vector<double> discounted_returns(const std::vector<double>& rewards, double gamma);

struct TraceRecord {
    std::size_t t;
    std::string from_id;
    std::string to_id;
    double reward;
    bool done;
};

// JSON-lines, one object per step: t, from_id, to_id, reward, done.
void export_trace_jsonl(const std::vector<TraceRecord>& records, std::ostream& out);

}  // namespace refnav
