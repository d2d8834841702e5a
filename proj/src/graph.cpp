#include "helab/graph.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

namespace helab::distinguish {

using nlohmann::json;

Graph make_graph(uint32_t n, std::vector<std::pair<uint32_t, uint32_t>> edges) {
    for (auto& [u, v] : edges) {
        if (u >= n || v >= n)
            throw ParseError("edge (" + std::to_string(u) + "," + std::to_string(v) + ") out of range for " +
                             std::to_string(n) + " vertices");
        if (u == v) throw ParseError("self-loop at vertex " + std::to_string(u));
        if (u > v) std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) throw ParseError("duplicate edge");
    return Graph{n, std::move(edges)};
}

Graph complete_graph(uint32_t k) {
    std::vector<std::pair<uint32_t, uint32_t>> edges;
    for (uint32_t u = 0; u < k; ++u)
        for (uint32_t v = u + 1; v < k; ++v) edges.emplace_back(u, v);
    return Graph{k, std::move(edges)};
}

Graph path_graph(uint32_t k) {
    std::vector<std::pair<uint32_t, uint32_t>> edges;
    for (uint32_t u = 0; u + 1 < k; ++u) edges.emplace_back(u, u + 1);
    return Graph{k, std::move(edges)};
}

Graph cycle_graph(uint32_t k) {
    if (k < 3) throw UsageError("a cycle needs at least 3 vertices");
    Graph g = path_graph(k);
    g.edges.emplace_back(0, k - 1);
    std::sort(g.edges.begin(), g.edges.end());
    return g;
}

uint32_t degree(const Graph& g, uint32_t v) {
    uint32_t d = 0;
    for (auto [a, b] : g.edges) d += (a == v) + (b == v);
    return d;
}

std::vector<uint32_t> sorted_neighbors(const Graph& g, uint32_t v) {
    std::vector<uint32_t> out;
    for (auto [a, b] : g.edges) {
        if (a == v) out.push_back(b);
        if (b == v) out.push_back(a);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<uint64_t> adjacency_bits(const Graph& g) {
    if (g.n > 64) throw BudgetExceeded("adjacency bitmask supports at most 64 vertices");
    std::vector<uint64_t> adj(g.n, 0);
    for (auto [a, b] : g.edges) {
        adj[a] |= uint64_t(1) << b;
        adj[b] |= uint64_t(1) << a;
    }
    return adj;
}

Graph parse_edge_list(const std::string& text) {
    std::istringstream in(text);
    uint64_t n = 0, m = 0;
    if (!(in >> n >> m)) throw ParseError("expected \"n m\" header");
    if (n > 1'000'000 || m > 1'000'000) throw ParseError("graph header out of range");
    std::vector<std::pair<uint32_t, uint32_t>> edges;
    edges.reserve(m);
    for (uint64_t i = 0; i < m; ++i) {
        uint64_t u = 0, v = 0;
        if (!(in >> u >> v)) throw ParseError("expected edge line " + std::to_string(i + 1));
        if (u > UINT32_MAX || v > UINT32_MAX) throw ParseError("vertex id out of range");
        edges.emplace_back(static_cast<uint32_t>(u), static_cast<uint32_t>(v));
    }
    std::string rest;
    if (in >> rest) throw ParseError("trailing input after " + std::to_string(m) + " edges");
    return make_graph(static_cast<uint32_t>(n), std::move(edges));
}

Graph graph_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid graph JSON: ") + e.what());
    }
    try {
        const uint64_t n = j.at("n").get<uint64_t>();
        if (n > 1'000'000) throw ParseError("vertex count out of range");
        std::vector<std::pair<uint32_t, uint32_t>> edges;
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2) throw ParseError("edges must be [u,v] pairs");
            edges.emplace_back(e[0].get<uint32_t>(), e[1].get<uint32_t>());
        }
        return make_graph(static_cast<uint32_t>(n), std::move(edges));
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid graph JSON: ") + e.what());
    }
}

Graph parse_graph(const std::string& text) {
    const size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') return graph_from_json(text);
    return parse_edge_list(text);
}

std::string to_edge_list(const Graph& g) {
    std::string out = std::to_string(g.n) + " " + std::to_string(g.edges.size()) + "\n";
    for (auto [u, v] : g.edges) out += std::to_string(u) + " " + std::to_string(v) + "\n";
    return out;
}

std::string to_json(const Graph& g) {
    json edges = json::array();
    for (auto [u, v] : g.edges) edges.push_back(json::array({u, v}));
    json j;
    j["edges"] = std::move(edges);
    j["n"] = g.n;
    return j.dump();
}

}  // namespace helab::distinguish
