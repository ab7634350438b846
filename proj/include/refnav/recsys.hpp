#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "refnav/corpus.hpp"

namespace refnav {

struct NeighborEntry {
    std::string id;
    double distance;  // in [0, 1]
};

// Per-task top-k nearest-neighbor lists over candidate metadata tokens.
// Lists sorted ascending by distance, ties by id ascending, no self-loops.
struct NeighborGraph {
    std::size_t k = 0;
    std::map<std::string, std::vector<NeighborEntry>> entries;

    const std::vector<NeighborEntry>& neighbors(const std::string& id) const;
    bool has_neighbor(const std::string& id, const std::string& neighbor_id) const;
};

// 1 - |a∩b|/|a∪b|; both empty -> 0 by convention.
double jaccard_distance(const TokenSet& a, const TokenSet& b);

NeighborGraph build_neighbor_graph(const Corpus& corpus,
                                   const std::vector<std::string>& candidate_ids,
                                   std::size_t k);

// CSV rows: source_id,neighbor_id,rank,distance
void export_graph_csv(const NeighborGraph& graph, std::ostream& out);

}  // namespace refnav
