#include "refnav/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "refnav/rng.hpp"

namespace refnav {

namespace {

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool is_token_char(unsigned char c) { return std::isalnum(c) != 0; }

// '.', '?', '!' followed by whitespace or end of text ends a sentence.
std::vector<std::string> split_sentences(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        cur.push_back(c);
        if (c == '.' || c == '?' || c == '!') {
            bool at_end = (i + 1 == text.size());
            if (at_end || std::isspace(static_cast<unsigned char>(text[i + 1]))) {
                out.push_back(cur);
                cur.clear();
            }
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

}  // namespace

void Corpus::add(Reference ref) {
    if (ref.id.empty()) throw std::invalid_argument("corpus: reference with empty id");
    if (ref.title.empty())
        throw std::invalid_argument("corpus: reference '" + ref.id + "' has empty title");
    if (index_.count(ref.id))
        throw std::invalid_argument("corpus: duplicate id '" + ref.id + "'");
    index_[ref.id] = refs_.size();
    refs_.push_back(std::move(ref));
}

const Reference& Corpus::at(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw std::out_of_range("corpus: unknown id '" + id + "'");
    return refs_[it->second];
}

TokenSet tokenize(std::string_view text) {
    TokenSet out;
    std::string cur;
    for (unsigned char c : text) {
        if (is_token_char(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            out.insert(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) out.insert(cur);
    return out;
}

std::vector<std::string> tokenize_sequence(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : text) {
        if (is_token_char(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

Corpus load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open corpus file: " + path);
    Corpus corpus;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": malformed record: " + e.what());
        }
        Reference ref;
        try {
            ref.id = j.at("id").get<std::string>();
            ref.title = j.at("title").get<std::string>();
            ref.abstract_text = j.value("abstract", std::string());
            if (j.contains("body")) ref.body = j.at("body").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": malformed record: " + e.what());
        }
        try {
            corpus.add(std::move(ref));
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write corpus file: " + path);
    for (const auto& ref : corpus.refs()) {
        nlohmann::ordered_json j;
        j["id"] = ref.id;
        j["title"] = ref.title;
        j["abstract"] = ref.abstract_text;
        if (ref.body) j["body"] = *ref.body;
        out << j.dump() << "\n";
    }
}

std::vector<TaskSpec> load_task_specs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open task file: " + path);
    std::vector<TaskSpec> specs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
            TaskSpec spec;
            spec.drug = j.at("drug").get<std::string>();
            spec.genes = j.at("genes").get<std::vector<std::string>>();
            if (spec.drug.empty() || spec.genes.empty())
                throw std::runtime_error("drug and genes must be non-empty");
            specs.push_back(std::move(spec));
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": malformed task: " + e.what());
        }
    }
    return specs;
}

void save_task_specs(const std::vector<TaskSpec>& specs, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write task file: " + path);
    for (const auto& spec : specs) {
        nlohmann::ordered_json j;
        j["drug"] = spec.drug;
        j["genes"] = spec.genes;
        out << j.dump() << "\n";
    }
}

std::vector<std::string> retrieve_candidates(const Corpus& corpus, const std::string& drug) {
    if (drug.empty()) throw std::invalid_argument("retrieve_candidates: empty drug");
    const std::string needle = to_lower(drug);
    std::vector<std::string> out;
    for (const auto& ref : corpus.refs()) {
        if (to_lower(ref.title).find(needle) != std::string::npos ||
            to_lower(ref.abstract_text).find(needle) != std::string::npos) {
            out.push_back(ref.id);
        }
    }
    if (out.empty())
        throw std::runtime_error("no candidates for drug '" + drug + "'");
    return out;
}

std::set<std::string> label_targets(const Corpus& corpus,
                                    const std::vector<std::string>& candidate_ids,
                                    const std::string& drug,
                                    const std::vector<std::string>& genes) {
    if (candidate_ids.empty())
        throw std::invalid_argument("label_targets: empty candidate set");
    const TokenSet drug_tokens = tokenize(drug);
    std::vector<TokenSet> gene_tokens;
    for (const auto& g : genes) gene_tokens.push_back(tokenize(g));

    auto contains_all = [](const TokenSet& sentence, const TokenSet& query) {
        if (query.empty()) return false;
        for (const auto& t : query)
            if (!sentence.count(t)) return false;
        return true;
    };

    std::set<std::string> targets;
    for (const auto& id : candidate_ids) {
        const Reference& ref = corpus.at(id);
        for (const auto& sentence : split_sentences(ref.full_text())) {
            TokenSet toks = tokenize(sentence);
            if (!contains_all(toks, drug_tokens)) continue;
            for (const auto& gt : gene_tokens) {
                if (contains_all(toks, gt)) {
                    targets.insert(id);
                    break;
                }
            }
            if (targets.count(id)) break;
        }
    }
    return targets;
}

double hardness_of_find(std::size_t n_candidates, std::size_t n_targets) {
    if (n_targets == 0 || n_targets > n_candidates)
        throw std::invalid_argument("hardness_of_find: need 0 < n_targets <= n_candidates");
    return 1.0 - static_cast<double>(n_targets) / static_cast<double>(n_candidates);
}

Task make_task(const Corpus& corpus, const TaskSpec& spec) {
    Task task;
    task.drug = spec.drug;
    task.genes = spec.genes;
    task.candidate_ids = retrieve_candidates(corpus, spec.drug);
    task.target_ids = label_targets(corpus, task.candidate_ids, spec.drug, spec.genes);
    if (task.target_ids.empty())
        throw std::runtime_error("task '" + spec.drug +
                                 "' has no target reference (closed-world violation)");
    return task;
}

std::pair<Corpus, Task> generate_synthetic_corpus(std::size_t n_docs,
                                                  std::size_t n_targets,
                                                  std::size_t vocab_size,
                                                  std::uint64_t seed,
                                                  SynthMode mode) {
    if (n_targets == 0 || n_targets >= n_docs)
        throw std::invalid_argument("generate_synthetic_corpus: need 0 < n_targets < n_docs");
    if (vocab_size < 50)
        throw std::invalid_argument("generate_synthetic_corpus: vocab_size must be >= 50");

    const std::string drug = "synthdrug";
    const std::string gene = "synthgene";
    static const std::vector<std::string> signal = {"siga", "sigb", "sigc", "sigd", "sige"};

    Rng rng(seed);
    auto filler = [&](std::size_t n) {
        std::string s;
        for (std::size_t i = 0; i < n; ++i) {
            if (i) s += " ";
            s += "w" + std::to_string(rng.uniform_index(vocab_size));
        }
        return s;
    };

    // pick target ids, then a band of "near" docs carrying partial signal
    std::vector<std::size_t> order(n_docs);
    for (std::size_t i = 0; i < n_docs; ++i) order[i] = i;
    rng.shuffle(order);
    std::set<std::size_t> target_idx(order.begin(), order.begin() + n_targets);
    std::size_t n_near = std::min<std::size_t>(n_docs / 10, n_docs - n_targets);
    std::set<std::size_t> near_idx(order.begin() + n_targets,
                                   order.begin() + n_targets + n_near);

    int width = static_cast<int>(std::to_string(n_docs - 1).size());
    Corpus corpus;
    for (std::size_t i = 0; i < n_docs; ++i) {
        std::string num = std::to_string(i);
        Reference ref;
        ref.id = "d" + std::string(width - static_cast<int>(num.size()), '0') + num;
        ref.title = drug + " study " + filler(3);
        bool is_target = target_idx.count(i) > 0;
        bool is_near = near_idx.count(i) > 0;

        std::string abstract = filler(36);
        if (is_target) {
            if (mode == SynthMode::separable) abstract += " targetmark";
            // three of the five signal tokens, chosen per document
            std::vector<std::string> sig(signal);
            rng.shuffle(sig);
            for (std::size_t s = 0; s < 3; ++s) abstract += " " + sig[s];
        } else if (is_near) {
            abstract += " " + signal[rng.uniform_index(signal.size())];
        }
        ref.abstract_text = abstract;

        if (is_target) {
            ref.body = drug + " modulates " + gene + ". " + filler(8) + ".";
        } else {
            std::string body = drug + " affects pathway " + filler(2) + ".";
            if (rng.uniform_real() < 0.1) body += " " + gene + " discussed elsewhere.";
            body += " " + filler(8) + ".";
            ref.body = body;
        }
        corpus.add(std::move(ref));
    }

    TaskSpec spec{drug, {gene}};
    Task task = make_task(corpus, spec);
    if (task.target_ids.size() != n_targets)
        throw std::runtime_error("generate_synthetic_corpus: target labeling mismatch");
    return {std::move(corpus), std::move(task)};
}

Vocabulary Vocabulary::build(const Corpus& corpus) {
    TokenSet all;
    for (const auto& ref : corpus.refs()) {
        TokenSet t = tokenize(ref.metadata_text());
        all.insert(t.begin(), t.end());
    }
    Vocabulary v;
    v.tokens_.assign(all.begin(), all.end());  // already lexicographic
    for (std::size_t i = 0; i < v.tokens_.size(); ++i)
        v.index_[v.tokens_[i]] = static_cast<int>(i) + 2;
    return v;
}

int Vocabulary::lookup(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? kUnk : it->second;
}

std::vector<int> Vocabulary::lookup_all(const TokenSet& tokens) const {
    std::vector<int> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(lookup(t));
    return out;
}

std::vector<int> Vocabulary::lookup_all(const std::vector<std::string>& tokens) const {
    std::vector<int> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(lookup(t));
    return out;
}

std::uint64_t Vocabulary::hash() const {
    // FNV-1a over tokens in index order
    std::uint64_t h = 1469598103934665603ULL;
    auto eat = [&](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        h ^= 0xff;
        h *= 1099511628211ULL;
    };
    for (const auto& t : tokens_) eat(t);
    return h;
}

}  // namespace refnav
