#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace refnav {

// One document: freely visible metadata (title+abstract) and a hidden body
// that is revealed only when the reference is visited.
struct Reference {
    std::string id;
    std::string title;
    std::string abstract_text;
    std::optional<std::string> body;

    std::string metadata_text() const { return title + " " + abstract_text; }
    std::string full_text() const {
        return body ? metadata_text() + " " + *body : metadata_text();
    }
};

class Corpus {
  public:
    void add(Reference ref);  // throws on duplicate/empty id or empty title
    const Reference& at(const std::string& id) const;
    bool contains(const std::string& id) const { return index_.count(id) > 0; }
    std::size_t size() const { return refs_.size(); }
    const std::vector<Reference>& refs() const { return refs_; }

  private:
    std::vector<Reference> refs_;  // insertion order, relied on downstream
    std::unordered_map<std::string, std::size_t> index_;
};

// A (drug, ?, gene) query with its candidate universe and known targets.
struct Task {
    std::string drug;
    std::vector<std::string> genes;
    std::vector<std::string> candidate_ids;  // corpus insertion order
    std::set<std::string> target_ids;

    std::string name() const { return drug; }
};

using TokenSet = std::set<std::string>;

// Lowercase, split on any non-alphanumeric byte, drop empties, dedupe.
TokenSet tokenize(std::string_view text);

// Same rule but order-preserving with duplicates kept (classifier input).
std::vector<std::string> tokenize_sequence(std::string_view text);

Corpus load_corpus(const std::string& path);
void save_corpus(const Corpus& corpus, const std::string& path);

struct TaskSpec {
    std::string drug;
    std::vector<std::string> genes;
};

std::vector<TaskSpec> load_task_specs(const std::string& path);
void save_task_specs(const std::vector<TaskSpec>& specs, const std::string& path);

// All references whose title or abstract contains the drug as a
// case-insensitive substring, in corpus insertion order.
std::vector<std::string> retrieve_candidates(const Corpus& corpus, const std::string& drug);

// A candidate is a target iff some sentence of its full text contains the
// drug and at least one gene by case-insensitive token match. Sentence
// boundaries: '.', '?', '!' followed by whitespace or end of text.
std::set<std::string> label_targets(const Corpus& corpus,
                                    const std::vector<std::string>& candidate_ids,
                                    const std::string& drug,
                                    const std::vector<std::string>& genes);

double hardness_of_find(std::size_t n_candidates, std::size_t n_targets);

// retrieve + label + closed-world check.
Task make_task(const Corpus& corpus, const TaskSpec& spec);

enum class SynthMode {
    mild,       // targets share a few signal tokens; not linearly separable
    separable,  // every target's metadata carries a dedicated marker token
};

std::pair<Corpus, Task> generate_synthetic_corpus(std::size_t n_docs,
                                                  std::size_t n_targets,
                                                  std::size_t vocab_size,
                                                  std::uint64_t seed,
                                                  SynthMode mode = SynthMode::mild);

// Token -> index map over corpus metadata. Index 0 is the unknown token,
// index 1 the sequence pad; real tokens follow in lexicographic order.
class Vocabulary {
  public:
    static constexpr int kUnk = 0;
    static constexpr int kPad = 1;

    static Vocabulary build(const Corpus& corpus);

    int lookup(const std::string& token) const;
    std::vector<int> lookup_all(const TokenSet& tokens) const;
    std::vector<int> lookup_all(const std::vector<std::string>& tokens) const;
    std::size_t size() const { return tokens_.size() + 2; }  // incl. unk+pad
    std::uint64_t hash() const;

  private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, int> index_;
};

}  // namespace refnav
