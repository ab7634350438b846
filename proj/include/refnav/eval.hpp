#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "refnav/agents.hpp"
#include "refnav/corpus.hpp"
#include "refnav/metrics.hpp"
#include "refnav/nn.hpp"
#include "refnav/recsys.hpp"

namespace refnav {

struct TaskResult {
    std::string task;
    std::string method;  // baseline | reinforce | a2c | random
    std::vector<double> reads;          // per episode; failed episodes score CTN
    std::vector<std::uint64_t> seeds;   // one per episode
    double median_reads = 0.0;
    double hof = 0.0;
    std::size_t ctn_value = 0;
    double ei = 0.0;
};

// Lower-middle element for even counts, so results stay in the observed support.
double median_lower(std::vector<double> values);

struct EvalOptions {
    std::string method = "a2c";
    std::size_t n_episodes = 30;
    std::uint64_t base_seed = 0;
    RewardConfig reward;
    PolicyOptions policy;
};

// n_episodes seeded rollouts per task from its given initial paper; unique
// reads per episode, CTN for capped failures, lower-median across episodes.
std::vector<TaskResult> evaluate_agent(const PolicyModel& model, const Vocabulary& vocab,
                                       const Corpus& corpus, const std::vector<Task>& tasks,
                                       const std::map<std::string, NeighborGraph>& graphs,
                                       const std::map<std::string, std::string>& start_ids,
                                       const EvalOptions& options);

// Deterministic ranking walk: one pseudo-episode whose reads is the 1-based
// rank of the first target.
TaskResult baseline_result(const std::string& task_name, std::size_t reads,
                           std::size_t n_candidates, std::size_t n_targets);

// report.csv, report.txt (per-method tables with total EI rows) and
// boxplot.csv (per-episode reads) under out_dir.
void emit_report(const std::vector<TaskResult>& results, const std::string& out_dir);

void save_results(const std::vector<TaskResult>& results, const std::string& path);
std::vector<TaskResult> load_results(const std::string& path);

}  // namespace refnav
