#include "refnav/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace refnav {

namespace {
constexpr int kWidths[] = {3, 4, 5};
}

ClassifierModel ClassifierModel::init(const Vocabulary& vocab, int dim, int n_filters,
                                      std::uint64_t seed) {
    ClassifierModel m;
    m.dim = dim;
    m.n_filters = n_filters;
    m.vocab_size = vocab.size();
    m.vocab_hash = vocab.hash();
    Rng rng(seed);
    std::size_t d = static_cast<std::size_t>(dim);
    std::size_t f = static_cast<std::size_t>(n_filters);
    m.params.add_uniform("embed", {m.vocab_size, d}, rng);
    for (int w : kWidths) {
        std::string tag = std::to_string(w);
        m.params.add_uniform("conv" + tag + "_w", {f, static_cast<std::size_t>(w) * d}, rng);
        m.params.add_uniform("conv" + tag + "_b", {f}, rng);
    }
    m.params.add_uniform("out_w", {1, 3 * f}, rng);
    m.params.add_uniform("out_b", {1}, rng);
    return m;
}

int ClassifierModel::logit(Tape& tape, const std::vector<int>& token_ids) const {
    std::size_t d = static_cast<std::size_t>(dim);
    std::vector<int> ids = token_ids;
    while (ids.size() < 5) ids.push_back(Vocabulary::kPad);

    std::vector<int> pooled;
    for (int w : kWidths) {
        std::string tag = std::to_string(w);
        std::vector<int> windows;
        for (std::size_t pos = 0; pos + w <= ids.size(); ++pos) {
            std::vector<int> rows(ids.begin() + pos, ids.begin() + pos + w);
            int window = tape.embed_concat("embed", rows, d);
            windows.push_back(tape.relu_op(tape.affine("conv" + tag + "_w",
                                                       "conv" + tag + "_b", window)));
        }
        pooled.push_back(tape.max_over(windows));
    }
    int features = tape.concat(tape.concat(pooled[0], pooled[1]), pooled[2]);
    return tape.affine("out_w", "out_b", features);
}

double ClassifierModel::predict(const std::vector<int>& token_ids) const {
    Tape tape(&params);
    double z = tape.scalar(logit(tape, token_ids));
    return 1.0 / (1.0 + std::exp(-z));
}

void ClassifierModel::save(const std::string& path) const {
    nlohmann::ordered_json meta;
    meta["kind"] = "classifier";
    meta["d"] = dim;
    meta["n_filters"] = n_filters;
    meta["vocab_size"] = vocab_size;
    meta["vocab_hash"] = vocab_hash;
    save_params(params, meta, path);
}

ClassifierModel ClassifierModel::load(const std::string& path) {
    nlohmann::json meta;
    ClassifierModel m;
    m.params = load_params(path, &meta);
    if (meta.value("kind", std::string()) != "classifier")
        throw std::runtime_error("checkpoint is not a classifier: " + path);
    m.dim = meta.at("d").get<int>();
    m.n_filters = meta.at("n_filters").get<int>();
    m.vocab_size = meta.at("vocab_size").get<std::size_t>();
    m.vocab_hash = meta.at("vocab_hash").get<std::uint64_t>();
    return m;
}

std::vector<LabeledExample> build_examples(const Corpus& corpus, const Vocabulary& vocab,
                                           const std::vector<Task>& tasks) {
    std::vector<LabeledExample> out;
    for (const auto& task : tasks) {
        for (const auto& id : task.candidate_ids) {
            LabeledExample ex;
            ex.id = id;
            ex.token_ids = vocab.lookup_all(tokenize_sequence(corpus.at(id).metadata_text()));
            ex.label = task.target_ids.count(id) ? 1 : 0;
            out.push_back(std::move(ex));
        }
    }
    return out;
}

ClassifierModel train_classifier(const Corpus& corpus, const Vocabulary& vocab,
                                 const std::vector<Task>& training_tasks,
                                 const ClassifierTrainOptions& options) {
    std::vector<LabeledExample> examples = build_examples(corpus, vocab, training_tasks);
    std::vector<std::size_t> positives, negatives;
    for (std::size_t i = 0; i < examples.size(); ++i)
        (examples[i].label ? positives : negatives).push_back(i);
    if (positives.empty() || negatives.empty())
        throw std::runtime_error("train_classifier: need at least one example of each class");

    ClassifierModel model =
        ClassifierModel::init(vocab, options.dim, options.n_filters, options.seed);
    Adam optimizer;
    optimizer.lr = options.learning_rate;
    Rng rng(mix_seed(options.seed, 0x1bace));

    for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
        // oversample positives with replacement to a 1:1 ratio
        std::vector<std::size_t> order = negatives;
        for (std::size_t i = 0; i < negatives.size(); ++i)
            order.push_back(positives[rng.uniform_index(positives.size())]);
        rng.shuffle(order);

        for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
            std::size_t end = std::min(start + options.batch_size, order.size());
            Tape tape(&model.params);
            std::vector<int> losses;
            for (std::size_t i = start; i < end; ++i) {
                const LabeledExample& ex = examples[order[i]];
                losses.push_back(tape.bce_with_logit(model.logit(tape, ex.token_ids),
                                                     static_cast<double>(ex.label)));
            }
            int loss = tape.scale(tape.sum(tape.stack(losses)),
                                  1.0 / static_cast<double>(end - start));
            tape.backward(loss);
            optimizer.step(model.params, tape.param_grads());
        }
    }
    return model;
}

std::vector<std::string> rank_candidates(const ClassifierModel& model, const Corpus& corpus,
                                         const Vocabulary& vocab,
                                         const std::vector<std::string>& candidate_ids) {
    std::vector<std::pair<double, std::string>> scored;
    for (const auto& id : candidate_ids) {
        const Reference& ref = corpus.at(id);  // throws on unknown candidate
        scored.emplace_back(
            model.predict(vocab.lookup_all(tokenize_sequence(ref.metadata_text()))), id);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::vector<std::string> out;
    for (auto& [p, id] : scored) out.push_back(std::move(id));
    return out;
}

std::size_t reads_until_target(const std::vector<std::string>& ranking,
                               const std::set<std::string>& target_ids) {
    if (target_ids.empty())
        throw std::invalid_argument("reads_until_target: empty target set");
    for (std::size_t i = 0; i < ranking.size(); ++i)
        if (target_ids.count(ranking[i])) return i + 1;
    throw std::invalid_argument("reads_until_target: no target in ranking");
}

void write_ranking_csv(const std::string& task, const ClassifierModel& model,
                       const Corpus& corpus, const Vocabulary& vocab,
                       const std::vector<std::string>& ranking, std::ostream& out) {
    for (std::size_t r = 0; r < ranking.size(); ++r) {
        double p = model.predict(
            vocab.lookup_all(tokenize_sequence(corpus.at(ranking[r]).metadata_text())));
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", p);
        out << task << "," << (r + 1) << "," << ranking[r] << "," << buf << "\n";
    }
}

}  // namespace refnav
