#include "refnav/agents.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <unordered_map>

namespace refnav {

Algo parse_algo(const std::string& name) {
    if (name == "reinforce") return Algo::reinforce;
    if (name == "a2c") return Algo::a2c;
    throw std::invalid_argument("unknown algorithm '" + name + "'");
}

std::string algo_name(Algo algo) {
    return algo == Algo::reinforce ? "reinforce" : "a2c";
}

std::vector<TraceRecord> EpisodeTrace::records() const {
    std::vector<TraceRecord> out;
    for (std::size_t i = 0; i < steps.size(); ++i)
        out.push_back({i + 1, steps[i].from_id, steps[i].to_id, steps[i].reward,
                       i + 1 == steps.size()});
    return out;
}

EpisodeTrace rollout(const PolicyModel& model, const Vocabulary& vocab,
                     const Corpus& corpus, const Task& task, const NeighborGraph& graph,
                     const std::string& start_id, const RewardConfig& reward_cfg,
                     const PolicyOptions& options, std::uint64_t seed) {
    EpisodeTrace trace;
    trace.start_id = start_id;
    trace.tape = std::make_unique<Tape>(&model.params);
    Tape& tape = *trace.tape;
    Rng rng(seed);

    std::string query_text = task.drug;
    for (const auto& g : task.genes) query_text += " " + g;
    const std::vector<int> query_tokens = vocab.lookup_all(tokenize(query_text));

    // candidate encodings and their scored projections are reused across
    // steps within the episode (parameters are fixed until the update)
    std::unordered_map<std::string, int> feature_cache;
    std::unordered_map<std::string, int> scored_cache;
    auto encode = [&](const std::string& id) {
        auto it = feature_cache.find(id);
        if (it != feature_cache.end()) return it->second;
        std::vector<int> toks = vocab.lookup_all(tokenize(corpus.at(id).metadata_text()));
        int node = model.encode_reference(tape, toks, query_tokens);
        feature_cache.emplace(id, node);
        return node;
    };
    auto scored = [&](const std::string& id) {
        auto it = scored_cache.find(id);
        if (it != scored_cache.end()) return it->second;
        int node = model.scored_feature(tape, encode(id));
        scored_cache.emplace(id, node);
        return node;
    };

    EpisodeState state = reset(task, graph, start_id, reward_cfg);
    if (state.done) {
        trace.succeeded = true;
        trace.rewards = {state.reset_reward};
        trace.T = 1;
        trace.unique_reads = 1;
        return trace;
    }

    int obs = encode(start_id);  // O_0 = raw encoded feature of (P_0, q)
    while (!state.done) {
        const auto& neighbors = graph.neighbors(state.current_id);
        TraceStep ts;
        ts.from_id = state.current_id;

        std::vector<int> features, scored_features;
        std::optional<Vec> weights;
        for (const auto& nb : neighbors) {
            ts.candidate_ids.push_back(nb.id);
            features.push_back(encode(nb.id));
            scored_features.push_back(scored(nb.id));
        }
        if (options.distance_weights) {
            Vec w;
            for (const auto& nb : neighbors)
                w.push_back(options.use_similarity ? 1.0 - nb.distance : nb.distance);
            weights = std::move(w);
        }

        int logits = model.logits_from_scored(tape, obs, scored_features, weights);
        Vec probs = options.uniform_random
                        ? Vec(features.size(), 1.0 / static_cast<double>(features.size()))
                        : tape.softmax_value(logits);
        std::size_t chosen = rng.sample_discrete(probs);

        ts.chosen = chosen;
        ts.logprob_node = tape.log_prob(logits, chosen);
        ts.entropy_node = tape.entropy_of_logits(logits);
        ts.value_node = model.value_estimate(tape, obs);
        ts.logprob = tape.scalar(ts.logprob_node);
        ts.entropy = tape.scalar(ts.entropy_node);
        ts.value = tape.scalar(ts.value_node);
        ts.to_id = neighbors[chosen].id;

        StepResult sr = step(state, graph, ts.to_id, reward_cfg);
        ts.reward = sr.reward;
        trace.rewards.push_back(sr.reward);
        trace.steps.push_back(std::move(ts));

        if (!state.done) obs = model.update_observation(tape, obs, features[chosen]);
    }
    trace.succeeded = state.succeeded;
    trace.T = trace.steps.size();
    trace.unique_reads = state.unique_reads();
    return trace;
}

namespace {

void check_finite(double loss, std::size_t step_index) {
    if (!std::isfinite(loss))
        throw std::runtime_error("non-finite loss at step " + std::to_string(step_index));
}

}  // namespace

UpdateResult reinforce_update(PolicyModel& model, EpisodeTrace& trace,
                              BaselineState& baseline, double gamma, double delta,
                              Adam* optimizer) {
    UpdateResult result;
    if (trace.steps.empty()) return result;  // degenerate start-on-target episode
    Tape& tape = *trace.tape;

    std::vector<double> returns = discounted_returns(trace.rewards, gamma);
    double cumulative = 0.0;
    std::vector<int> terms;
    for (std::size_t t = 0; t < trace.steps.size(); ++t) {
        cumulative += trace.rewards[t];  // CR_t, undiscounted
        double b_t = baseline.update(cumulative);
        double advantage = returns[t] - b_t;
        int term = tape.scale(trace.steps[t].logprob_node, -advantage);
        if (delta != 0.0)
            term = tape.add(term, tape.scale(trace.steps[t].entropy_node, -delta));
        terms.push_back(term);
        check_finite(tape.scalar(term), t);
    }
    int loss = tape.sum(tape.stack(terms));
    result.loss = result.loss_pi = tape.scalar(loss);
    check_finite(result.loss, trace.steps.size());

    tape.backward(loss);
    if (optimizer) optimizer->step(model.params, tape.param_grads());
    return result;
}

UpdateResult a2c_update(PolicyModel& model, EpisodeTrace& trace, double lambda,
                        double gamma, Adam* optimizer) {
    UpdateResult result;
    if (trace.steps.empty()) return result;
    Tape& tape = *trace.tape;

    std::vector<double> returns = discounted_returns(trace.rewards, gamma);
    std::vector<int> pi_terms, v_terms;
    for (std::size_t t = 0; t < trace.steps.size(); ++t) {
        const TraceStep& ts = trace.steps[t];
        double advantage = returns[t] - ts.value;  // gradient-stopped
        pi_terms.push_back(tape.scale(ts.logprob_node, -advantage));
        int residual = tape.add_const(tape.scale(ts.value_node, -1.0), returns[t]);
        v_terms.push_back(tape.abs_op(residual));
        check_finite(tape.scalar(pi_terms.back()), t);
    }
    int loss_pi = tape.sum(tape.stack(pi_terms));
    int loss_v = tape.sum(tape.stack(v_terms));
    int loss = tape.add(tape.scale(loss_pi, lambda), tape.scale(loss_v, 1.0 - lambda));
    result.loss_pi = tape.scalar(loss_pi);
    result.loss_v = tape.scalar(loss_v);
    result.loss = tape.scalar(loss);
    check_finite(result.loss, trace.steps.size());

    tape.backward(loss);
    if (optimizer) optimizer->step(model.params, tape.param_grads());
    return result;
}

TrainResult train_agent(const Corpus& corpus, const Vocabulary& vocab,
                        const std::vector<Task>& tasks,
                        const std::map<std::string, NeighborGraph>& graphs,
                        const std::map<std::string, std::string>& start_ids,
                        const TrainOptions& options) {
    for (const auto& task : tasks) {
        if (task.target_ids.empty())
            throw std::invalid_argument("train_agent: task '" + task.name() +
                                        "' has no targets");
        if (task.candidate_ids.size() < 2)
            throw std::invalid_argument("train_agent: task '" + task.name() +
                                        "' has fewer than 2 candidates");
        if (!graphs.count(task.name()))
            throw std::invalid_argument("train_agent: missing graph for task '" +
                                        task.name() + "'");
    }

    TrainResult result;
    result.model = PolicyModel::init(vocab, options.dim, options.seed);
    Adam optimizer;
    optimizer.lr = options.learning_rate;

    PolicyOptions policy;
    policy.distance_weights = (options.algo == Algo::a2c);
    policy.use_similarity = options.use_similarity;

    std::size_t episode = 0;
    for (std::size_t e = 0; e < options.episodes_per_task; ++e) {
        for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
            const Task& task = tasks[ti];
            const NeighborGraph& graph = graphs.at(task.name());
            auto sit = start_ids.find(task.name());
            const std::string& start =
                sit != start_ids.end() ? sit->second : task.candidate_ids.front();
            std::uint64_t seed = mix_seed(options.seed, (ti + 1) * 100000 + e + 1);

            EpisodeTrace trace = rollout(result.model, vocab, corpus, task, graph, start,
                                         options.reward, policy, seed);
            UpdateResult upd;
            if (options.algo == Algo::reinforce) {
                BaselineState baseline;
                baseline.beta = options.beta;
                upd = reinforce_update(result.model, trace, baseline, options.reward.discount,
                                       options.delta, &optimizer);
            } else {
                upd = a2c_update(result.model, trace, options.lambda,
                                 options.reward.discount, &optimizer);
            }
            result.log.push_back({episode++, task.name(), algo_name(options.algo), trace.T,
                                  trace.succeeded, upd.loss_pi, upd.loss_v, seed});
        }
    }
    return result;
}

void write_train_log(const std::vector<TrainLogRow>& log, std::ostream& out) {
    out << "episode,task,algo,T,succeeded,loss_pi,loss_v,seed\n";
    for (const auto& row : log) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g", row.loss_pi, row.loss_v);
        out << row.episode << "," << row.task << "," << row.algo << "," << row.T << ","
            << (row.succeeded ? 1 : 0) << "," << buf << "," << row.seed << "\n";
    }
}

}  // namespace refnav
