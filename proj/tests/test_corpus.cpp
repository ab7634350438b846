#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "refnav/corpus.hpp"

using namespace refnav;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string tmp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

// independent oracle: lowercase both sides by hand, scan every reference
std::vector<std::string> retrieval_oracle(const Corpus& corpus, std::string drug) {
    for (auto& c : drug) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    std::vector<std::string> out;
    for (const auto& ref : corpus.refs()) {
        std::string hay = ref.title + "\n" + ref.abstract_text;
        for (auto& c : hay) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (hay.find(drug) != std::string::npos) out.push_back(ref.id);
    }
    return out;
}

// independent oracle: character-walk sentence splitter + per-sentence scan
bool target_oracle_one(const Reference& ref, const std::string& drug,
                       const std::vector<std::string>& genes) {
    std::string text = ref.title + " " + ref.abstract_text;
    if (ref.body) text += " " + *ref.body;
    std::vector<std::string> sentences;
    std::string cur;
    for (std::size_t i = 0; i < text.size(); ++i) {
        cur += text[i];
        if ((text[i] == '.' || text[i] == '!' || text[i] == '?') &&
            (i + 1 == text.size() ||
             std::isspace(static_cast<unsigned char>(text[i + 1])))) {
            sentences.push_back(cur);
            cur.clear();
        }
    }
    sentences.push_back(cur);
    for (const auto& s : sentences) {
        TokenSet toks = tokenize(s);
        bool has_drug = true;
        for (const auto& t : tokenize(drug)) has_drug = has_drug && toks.count(t);
        if (!has_drug) continue;
        for (const auto& g : genes) {
            bool has_gene = true;
            for (const auto& t : tokenize(g)) has_gene = has_gene && toks.count(t);
            if (has_gene && !tokenize(g).empty()) return true;
        }
    }
    return false;
}

}  // namespace

TEST_CASE("tokenize follows the split/lowercase/dedup rule") {
    CHECK(tokenize("MAP2K1, inhibitor!") == TokenSet{"map2k1", "inhibitor"});
    CHECK(tokenize("") == TokenSet{});
    CHECK(tokenize("drug-gene drug") == TokenSet{"drug", "gene"});
}

TEST_CASE("tokenize is idempotent and case-insensitive") {
    Rng rng(11);
    const std::string alphabet = "abcXYZ019 ,.!-_";
    for (int trial = 0; trial < 50; ++trial) {
        std::string s;
        for (int i = 0; i < 40; ++i) s += alphabet[rng.uniform_index(alphabet.size())];
        TokenSet once = tokenize(s);
        std::string joined;
        for (const auto& t : once) joined += t + " ";
        CHECK(tokenize(joined) == once);
        std::string upper = s;
        std::transform(upper.begin(), upper.end(), upper.begin(),
                       [](unsigned char c) { return std::toupper(c); });
        CHECK(tokenize(upper) == once);
    }
}

TEST_CASE("load_corpus reads minimal records and reports bad input") {
    auto path = tmp_path("refnav_corpus_ok.jsonl");
    std::ofstream(path) << R"({"id":"p1","title":"T","abstract":"A"})" << "\n";
    Corpus corpus = load_corpus(path);
    CHECK(corpus.size() == 1);
    CHECK_FALSE(corpus.at("p1").body.has_value());

    auto dup = tmp_path("refnav_corpus_dup.jsonl");
    std::ofstream(dup) << R"({"id":"p1","title":"T"})" << "\n"
                       << R"({"id":"p1","title":"U"})" << "\n";
    CHECK_THROWS_WITH_AS(load_corpus(dup), doctest::Contains("p1"), std::runtime_error);

    auto bad = tmp_path("refnav_corpus_bad.jsonl");
    std::ofstream(bad) << R"({"id":"p1","title":"T"})" << "\n" << "{not json" << "\n";
    CHECK_THROWS_WITH_AS(load_corpus(bad), doctest::Contains(":2"), std::runtime_error);
}

TEST_CASE("retrieve_candidates matches metadata substrings only") {
    Corpus corpus;
    corpus.add({"p1", "Tamoxifen resistance in breast cancer", "x", {}});
    corpus.add({"p2", "Gene X study", "y", {}});
    corpus.add({"p3", "Unrelated title", "abstract only", std::string("hidden tamoxifen")});
    auto ids = retrieve_candidates(corpus, "tamoxifen");
    CHECK(ids == std::vector<std::string>{"p1"});  // body mention excluded
    CHECK_THROWS_AS(retrieve_candidates(corpus, "absentdrug"), std::runtime_error);
}

TEST_CASE("retrieve_candidates equals an exhaustive scan on random corpora") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Corpus corpus = test::random_corpus(200, seed);
        CHECK(retrieve_candidates(corpus, "probedrug") ==
              retrieval_oracle(corpus, "PROBEDRUG"));
    }
}

TEST_CASE("label_targets requires drug and gene in one sentence") {
    Corpus corpus;
    corpus.add({"p1", "Tamoxifen study", "a", std::string("Tamoxifen binds esr1.")});
    corpus.add({"p2", "Tamoxifen study", "b",
                std::string("Tamoxifen works. Only esr1 here.")});
    auto targets = label_targets(corpus, {"p1", "p2"}, "tamoxifen", {"esr1", "esr2"});
    CHECK(targets == std::set<std::string>{"p1"});
    // token-exact: esr12 must not match esr1
    Corpus c2;
    c2.add({"q1", "Tamoxifen", "x", std::string("Tamoxifen binds esr12.")});
    CHECK(label_targets(c2, {"q1"}, "tamoxifen", {"esr1"}).empty());
}

TEST_CASE("label_targets agrees with an independent sentence scanner") {
    for (std::uint64_t seed = 100; seed < 105; ++seed) {
        Corpus corpus = test::random_corpus(150, seed);
        std::vector<std::string> ids;
        for (const auto& ref : corpus.refs()) ids.push_back(ref.id);
        auto got = label_targets(corpus, ids, "probedrug", {"probegene"});
        std::set<std::string> want;
        for (const auto& ref : corpus.refs())
            if (target_oracle_one(ref, "probedrug", {"probegene"})) want.insert(ref.id);
        CHECK(got == want);
        for (const auto& id : got)
            CHECK(std::find(ids.begin(), ids.end(), id) != ids.end());
    }
}

TEST_CASE("hardness_of_find arithmetic and monotonicity") {
    CHECK(hardness_of_find(371, 8) == doctest::Approx(0.978).epsilon(5e-4));
    CHECK(hardness_of_find(42, 42) == 0.0);
    CHECK(hardness_of_find(104, 38) == doctest::Approx(0.635).epsilon(5e-4));
    CHECK_THROWS_AS(hardness_of_find(10, 0), std::invalid_argument);
    CHECK_THROWS_AS(hardness_of_find(10, 11), std::invalid_argument);
    for (std::size_t t = 1; t < 50; ++t)
        CHECK(hardness_of_find(50, t) > hardness_of_find(50, t + 1));
}

TEST_CASE("generate_synthetic_corpus is seeded and closed-world") {
    auto [corpus, task] = generate_synthetic_corpus(500, 10, 1000, 7);
    CHECK(task.candidate_ids.size() == 500);
    CHECK(task.target_ids.size() == 10);
    CHECK(hardness_of_find(task.candidate_ids.size(), task.target_ids.size()) ==
          doctest::Approx(0.98));

    auto a = tmp_path("refnav_synth_a.jsonl");
    auto b = tmp_path("refnav_synth_b.jsonl");
    save_corpus(corpus, a);
    save_corpus(generate_synthetic_corpus(500, 10, 1000, 7).first, b);
    CHECK(slurp(a) == slurp(b));

    CHECK_THROWS_AS(generate_synthetic_corpus(500, 0, 1000, 7), std::invalid_argument);
    CHECK_THROWS_AS(generate_synthetic_corpus(500, 10, 10, 7), std::invalid_argument);
}

TEST_CASE("vocabulary maps unknown tokens to the reserved index") {
    Corpus corpus;
    corpus.add({"p1", "alpha beta", "gamma", {}});
    Vocabulary vocab = Vocabulary::build(corpus);
    CHECK(vocab.size() == 5);  // 3 tokens + unk + pad
    CHECK(vocab.lookup("alpha") >= 2);
    CHECK(vocab.lookup("nosuchtoken") == Vocabulary::kUnk);
    CHECK(vocab.hash() == Vocabulary::build(corpus).hash());
}
