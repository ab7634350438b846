#include <algorithm>
#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "helpers.hpp"
#include "refnav/baseline.hpp"

using namespace refnav;

namespace {

// separable toy data: positives carry the token "posmark" in the title
Corpus toy_corpus(std::size_t n, std::size_t n_pos) {
    Corpus corpus;
    for (std::size_t i = 0; i < n; ++i) {
        std::string id = "d" + std::to_string(i);
        std::string title = i < n_pos ? "study posmark result alpha beta"
                                      : "study filler result alpha beta";
        title += " w" + std::to_string(i % 7);
        corpus.add({id, title, "common abstract text", {}});
    }
    return corpus;
}

Task toy_task(const Corpus& corpus, std::size_t n_pos) {
    Task task;
    task.drug = "study";
    task.genes = {"none"};
    for (const auto& ref : corpus.refs()) task.candidate_ids.push_back(ref.id);
    for (std::size_t i = 0; i < n_pos; ++i) task.target_ids.insert("d" + std::to_string(i));
    return task;
}

}  // namespace

TEST_CASE("build_examples labels targets and keeps token order") {
    Corpus corpus;
    corpus.add({"a", "one two", "three two", {}});
    corpus.add({"b", "four", "five", {}});
    Vocabulary vocab = Vocabulary::build(corpus);
    Task task;
    task.candidate_ids = {"a", "b"};
    task.target_ids = {"b"};
    auto examples = build_examples(corpus, vocab, {task});
    REQUIRE(examples.size() == 2);
    CHECK(examples[0].id == "a");
    CHECK(examples[0].label == 0);
    CHECK(examples[1].label == 1);
    // sequence form: duplicates kept, order title then abstract
    CHECK(examples[0].token_ids ==
          vocab.lookup_all(std::vector<std::string>{"one", "two", "three", "two"}));
}

TEST_CASE("an all-zero network predicts 1/2 regardless of input") {
    Corpus corpus = toy_corpus(6, 2);
    Vocabulary vocab = Vocabulary::build(corpus);
    ClassifierModel model = ClassifierModel::init(vocab, 8, 4, 0);
    for (auto& [name, entry] : model.params.entries())
        std::fill(entry.data.begin(), entry.data.end(), 0.0);
    CHECK(model.predict({2, 3, 4}) == 0.5);
    CHECK(model.predict({}) == 0.5);  // padded up to the widest window
    model.params.data("out_b")[0] = 1.0;
    CHECK(model.predict({2}) == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))));
}

TEST_CASE("classifier gradients match finite differences") {
    Corpus corpus = toy_corpus(4, 1);
    Vocabulary vocab = Vocabulary::build(corpus);
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        ClassifierModel model = ClassifierModel::init(vocab, 3, 2, seed);
        std::vector<int> toks = {2, 3, 4, 5, 2, 6};
        auto build = [&](Tape& t) { return t.bce_with_logit(model.logit(t, toks), 1.0); };
        Tape tape(&model.params);
        tape.backward(build(tape));
        double err = test::max_fd_rel_error(model.params, tape.param_grads(), [&]() {
            Tape t(&model.params);
            return t.scalar(build(t));
        });
        CHECK(err < 1e-4);
    }
}

TEST_CASE("training separates marked positives and ranks them first") {
    Corpus corpus = toy_corpus(40, 4);
    Vocabulary vocab = Vocabulary::build(corpus);
    Task task = toy_task(corpus, 4);

    ClassifierTrainOptions opts;
    opts.dim = 16;
    opts.n_filters = 8;
    opts.epochs = 6;
    ClassifierModel model = train_classifier(corpus, vocab, {task}, opts);

    auto ranking = rank_candidates(model, corpus, vocab, task.candidate_ids);
    REQUIRE(ranking.size() == 40);
    CHECK(reads_until_target(ranking, task.target_ids) == 1);
    std::set<std::string> top(ranking.begin(), ranking.begin() + 4);
    CHECK(top == task.target_ids);

    ClassifierModel again = train_classifier(corpus, vocab, {task}, opts);
    for (const auto& [name, entry] : model.params.entries())
        CHECK(again.params.data(name) == entry.data);
}

TEST_CASE("training requires both classes") {
    Corpus corpus = toy_corpus(6, 0);
    Vocabulary vocab = Vocabulary::build(corpus);
    Task task = toy_task(corpus, 0);
    CHECK_THROWS_AS(train_classifier(corpus, vocab, {task}, {}), std::runtime_error);
}

TEST_CASE("equal scores fall back to id order") {
    Corpus corpus;
    corpus.add({"z9", "same words", "x", {}});
    corpus.add({"a1", "same words", "x", {}});
    corpus.add({"m5", "same words", "x", {}});
    Vocabulary vocab = Vocabulary::build(corpus);
    ClassifierModel model = ClassifierModel::init(vocab, 4, 2, 1);
    auto ranking = rank_candidates(model, corpus, vocab, {"z9", "a1", "m5"});
    CHECK(ranking == std::vector<std::string>{"a1", "m5", "z9"});
}

TEST_CASE("reads_until_target is the 1-based first hit") {
    CHECK(reads_until_target({"a", "b", "c"}, {"b"}) == 2);
    CHECK(reads_until_target({"a", "b", "c"}, {"c", "a"}) == 1);
    CHECK_THROWS_AS(reads_until_target({"a"}, {}), std::invalid_argument);
    CHECK_THROWS_AS(reads_until_target({"a"}, {"b"}), std::invalid_argument);
}

TEST_CASE("classifier checkpoints round-trip") {
    Corpus corpus = toy_corpus(5, 1);
    Vocabulary vocab = Vocabulary::build(corpus);
    ClassifierModel model = ClassifierModel::init(vocab, 6, 3, 12);
    auto path =
        (std::filesystem::temp_directory_path() / "refnav_classifier.ckpt.json").string();
    model.save(path);
    ClassifierModel loaded = ClassifierModel::load(path);
    CHECK(loaded.n_filters == 3);
    CHECK(loaded.vocab_hash == vocab.hash());
    CHECK(loaded.predict({2, 3, 4, 5, 6}) == model.predict({2, 3, 4, 5, 6}));
}
