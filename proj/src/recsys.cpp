#include "refnav/recsys.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace refnav {

const std::vector<NeighborEntry>& NeighborGraph::neighbors(const std::string& id) const {
    auto it = entries.find(id);
    if (it == entries.end())
        throw std::out_of_range("neighbor graph: unknown id '" + id + "'");
    return it->second;
}

bool NeighborGraph::has_neighbor(const std::string& id, const std::string& neighbor_id) const {
    for (const auto& e : neighbors(id))
        if (e.id == neighbor_id) return true;
    return false;
}

double jaccard_distance(const TokenSet& a, const TokenSet& b) {
    if (a.empty() && b.empty()) return 0.0;
    std::size_t inter = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) ++ia;
        else if (*ib < *ia) ++ib;
        else { ++inter; ++ia; ++ib; }
    }
    std::size_t uni = a.size() + b.size() - inter;
    return 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
}

NeighborGraph build_neighbor_graph(const Corpus& corpus,
                                   const std::vector<std::string>& candidate_ids,
                                   std::size_t k) {
    if (candidate_ids.size() < 2)
        throw std::invalid_argument("build_neighbor_graph: need at least 2 candidates");
    if (k < 1) throw std::invalid_argument("build_neighbor_graph: k must be >= 1");

    const std::size_t n = candidate_ids.size();
    std::vector<TokenSet> tokens(n);
    for (std::size_t i = 0; i < n; ++i)
        tokens[i] = tokenize(corpus.at(candidate_ids[i]).metadata_text());

    NeighborGraph graph;
    graph.k = k;
    std::vector<std::pair<double, std::size_t>> dists;
    for (std::size_t i = 0; i < n; ++i) {
        dists.clear();
        dists.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            dists.emplace_back(jaccard_distance(tokens[i], tokens[j]), j);
        }
        auto cmp = [&](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first < b.first;
            return candidate_ids[a.second] < candidate_ids[b.second];
        };
        std::size_t keep = std::min(k, dists.size());
        std::partial_sort(dists.begin(), dists.begin() + keep, dists.end(), cmp);
        std::vector<NeighborEntry> list;
        list.reserve(keep);
        for (std::size_t r = 0; r < keep; ++r)
            list.push_back({candidate_ids[dists[r].second], dists[r].first});
        graph.entries[candidate_ids[i]] = std::move(list);
    }
    return graph;
}

void export_graph_csv(const NeighborGraph& graph, std::ostream& out) {
    out << "source_id,neighbor_id,rank,distance\n";
    for (const auto& [source, list] : graph.entries) {
        for (std::size_t r = 0; r < list.size(); ++r) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.17g", list[r].distance);
            out << source << "," << list[r].id << "," << (r + 1) << "," << buf << "\n";
        }
    }
}

}  // namespace refnav
