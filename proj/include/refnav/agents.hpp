#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "refnav/corpus.hpp"
#include "refnav/env.hpp"
#include "refnav/nn.hpp"
#include "refnav/recsys.hpp"

namespace refnav {

enum class Algo { reinforce, a2c };

Algo parse_algo(const std::string& name);
std::string algo_name(Algo algo);

struct PolicyOptions {
    bool distance_weights = false;  // multiply logits by neighbor weights (A2C mode)
    bool use_similarity = false;    // weight by 1-distance instead of raw distance
    bool uniform_random = false;    // ignore the model; uniform over neighbors
};

struct TraceStep {
    std::string from_id;
    std::string to_id;
    std::vector<std::string> candidate_ids;
    std::size_t chosen = 0;
    int logprob_node = -1;
    int entropy_node = -1;
    int value_node = -1;
    double logprob = 0.0;
    double entropy = 0.0;
    double value = 0.0;
    double reward = 0.0;
};

// One finished episode plus the tape that produced it, kept so a learner can
// assemble its loss on the same graph. The degenerate start-on-target episode
// has no steps, T = 1 and a single terminal reward.
struct EpisodeTrace {
    std::vector<TraceStep> steps;
    std::vector<double> rewards;       // one per step; [terminal] when start is target
    bool succeeded = false;
    std::size_t T = 1;                 // episode length, max(1, steps)
    std::size_t unique_reads = 1;
    std::string start_id;
    std::unique_ptr<Tape> tape;

    std::vector<TraceRecord> records() const;
};

EpisodeTrace rollout(const PolicyModel& model, const Vocabulary& vocab,
                     const Corpus& corpus, const Task& task, const NeighborGraph& graph,
                     const std::string& start_id, const RewardConfig& reward_cfg,
                     const PolicyOptions& options, std::uint64_t seed);

struct BaselineState {
    double b = 0.0;      // b_{-1} = 0
    double beta = 0.5;
    std::vector<double> history;  // b_t per step, for invariant checks

    double update(double cumulative_reward) {
        b = (1.0 - beta) * b + beta * cumulative_reward;
        history.push_back(b);
        return b;
    }
};

struct UpdateResult {
    double loss = 0.0;     // combined objective
    double loss_pi = 0.0;
    double loss_v = 0.0;
};

// -log pi(a_t) * (G_t - b_t) - delta * H(pi_t), summed over steps; one
// gradient application per episode. A null optimizer computes the loss and
// gradients but leaves the parameters untouched.
UpdateResult reinforce_update(PolicyModel& model, EpisodeTrace& trace,
                              BaselineState& baseline, double gamma, double delta,
                              Adam* optimizer);

// lambda * loss_pi + (1-lambda) * loss_v with the advantage gradient-stopped.
UpdateResult a2c_update(PolicyModel& model, EpisodeTrace& trace, double lambda,
                        double gamma, Adam* optimizer);

struct TrainOptions {
    Algo algo = Algo::a2c;
    std::size_t episodes_per_task = 24;
    std::size_t k = 20;
    RewardConfig reward;
    double beta = 0.5;      // REINFORCE baseline mix
    double delta = 1e-4;    // entropy coefficient
    double lambda = 0.5;    // A2C loss mix
    double learning_rate = 1e-3;
    bool use_similarity = false;
    int dim = 64;
    std::uint64_t seed = 0;
};

struct TrainLogRow {
    std::size_t episode;
    std::string task;
    std::string algo;
    std::size_t T;
    bool succeeded;
    double loss_pi;
    double loss_v;
    std::uint64_t seed;
};

struct TrainResult {
    PolicyModel model;
    std::vector<TrainLogRow> log;
};

// Round-robin over tasks, one rollout+update per episode. start_ids gives
// each task's initial paper (from the baseline ranking); tasks absent from
// the map start at their first candidate.
TrainResult train_agent(const Corpus& corpus, const Vocabulary& vocab,
                        const std::vector<Task>& tasks,
                        const std::map<std::string, NeighborGraph>& graphs,
                        const std::map<std::string, std::string>& start_ids,
                        const TrainOptions& options);

// CSV: episode,task,algo,T,succeeded,loss_pi,loss_v,seed
void write_train_log(const std::vector<TrainLogRow>& log, std::ostream& out);

}  // namespace refnav
