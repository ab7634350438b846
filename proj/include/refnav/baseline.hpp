#pragma once

#include <cstdint>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "refnav/corpus.hpp"
#include "refnav/params.hpp"
#include "refnav/tape.hpp"

namespace refnav {

struct LabeledExample {
    std::string id;
    std::vector<int> token_ids;  // title+abstract, order preserved
    int label = 0;               // 1 = read_full_text (target), 0 = not_read
};

// Convolutional read/not-read classifier over title+abstract token windows
// (widths 3/4/5, max-over-time pooling, sigmoid output).
struct ClassifierModel {
    ParamStore params;
    int dim = 64;
    int n_filters = 32;
    std::size_t vocab_size = 0;
    std::uint64_t vocab_hash = 0;

    static ClassifierModel init(const Vocabulary& vocab, int dim, int n_filters,
                                std::uint64_t seed);

    int logit(Tape& tape, const std::vector<int>& token_ids) const;
    double predict(const std::vector<int>& token_ids) const;  // P(read_full_text)

    void save(const std::string& path) const;
    static ClassifierModel load(const std::string& path);
};

struct ClassifierTrainOptions {
    int dim = 64;
    int n_filters = 32;
    std::size_t batch_size = 32;
    std::size_t epochs = 8;
    double learning_rate = 1e-3;
    std::uint64_t seed = 0;
};

std::vector<LabeledExample> build_examples(const Corpus& corpus, const Vocabulary& vocab,
                                           const std::vector<Task>& tasks);

// Positives are oversampled with replacement to a 1:1 ratio each epoch.
ClassifierModel train_classifier(const Corpus& corpus, const Vocabulary& vocab,
                                 const std::vector<Task>& training_tasks,
                                 const ClassifierTrainOptions& options = {});

// Candidates in descending predicted probability, ties by id ascending.
// The first element is the RL agents' initial paper.
std::vector<std::string> rank_candidates(const ClassifierModel& model, const Corpus& corpus,
                                         const Vocabulary& vocab,
                                         const std::vector<std::string>& candidate_ids);

// 1-based index of the first target in the ranking.
std::size_t reads_until_target(const std::vector<std::string>& ranking,
                               const std::set<std::string>& target_ids);

// CSV: task,rank,id,probability
void write_ranking_csv(const std::string& task, const ClassifierModel& model,
                       const Corpus& corpus, const Vocabulary& vocab,
                       const std::vector<std::string>& ranking, std::ostream& out);

}  // namespace refnav
