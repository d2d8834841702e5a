#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "helab/common.hpp"

namespace helab::distinguish {

// Simple undirected graph on vertices 0..n-1. Edges are stored as (min,max)
// in sorted order; duplicates and self-loops are errors, not silently fixed.
struct Graph {
    uint32_t n = 0;
    std::vector<std::pair<uint32_t, uint32_t>> edges;

    bool operator==(const Graph&) const = default;
};

// Validates ranges, rejects self-loops and duplicates, normalizes order.
Graph make_graph(uint32_t n, std::vector<std::pair<uint32_t, uint32_t>> edges);

Graph complete_graph(uint32_t k);
Graph path_graph(uint32_t k);   // k vertices, k-1 edges
Graph cycle_graph(uint32_t k);  // k >= 3

uint32_t degree(const Graph& g, uint32_t v);
std::vector<uint32_t> sorted_neighbors(const Graph& g, uint32_t v);
// Row-per-vertex adjacency bitmasks; usable while n <= 64.
std::vector<uint64_t> adjacency_bits(const Graph& g);

// Text formats: an edge list ("n m" header, then one "u v" line per edge) or
// JSON {"n": ..., "edges": [[u,v], ...]}; parse_graph sniffs which.
Graph parse_edge_list(const std::string& text);
Graph graph_from_json(const std::string& text);
Graph parse_graph(const std::string& text);
std::string to_edge_list(const Graph& g);
std::string to_json(const Graph& g);

}  // namespace helab::distinguish
