// Copyright 2026 The QLego Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <deque>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qlego/circuit.hpp"

namespace qlego {

/// Connected simple graph of physical qubits. Immutable once built; all-pairs
/// shortest-path distances are computed at construction.
class CouplingGraph {
  public:
    CouplingGraph() = default;

    CouplingGraph(size_t num_vertices, std::vector<std::pair<uint32_t, uint32_t>> edges, std::string name = "custom")
        : n_(num_vertices), name_(std::move(name)), adj_(num_vertices) {
        std::set<std::pair<uint32_t, uint32_t>> seen;
        for (auto [u, v] : edges) {
            if (u >= n_ || v >= n_) throw DimensionError("coupling graph: edge endpoint out of range");
            if (u == v) throw DomainError("coupling graph: self loop on vertex " + std::to_string(u));
            auto key = std::minmax(u, v);
            if (!seen.insert(key).second) continue;
            edges_.push_back(key);
            adj_[u].push_back(v);
            adj_[v].push_back(u);
        }
        for (auto& a : adj_) std::sort(a.begin(), a.end());
        std::sort(edges_.begin(), edges_.end());
        dist_.assign(n_ * n_, kUnreachable);
        for (uint32_t s = 0; s < n_; ++s) {
            std::deque<uint32_t> queue{s};
            dist_[s * n_ + s] = 0;
            while (!queue.empty()) {
                uint32_t u = queue.front();
                queue.pop_front();
                for (uint32_t v : adj_[u]) {
                    if (dist_[s * n_ + v] == kUnreachable) {
                        dist_[s * n_ + v] = dist_[s * n_ + u] + 1;
                        queue.push_back(v);
                    }
                }
            }
        }
        for (auto d : dist_)
            if (d == kUnreachable) throw DomainError("coupling graph '" + name_ + "' is not connected");
    }

    static CouplingGraph all_to_all(size_t n) {
        std::vector<std::pair<uint32_t, uint32_t>> e;
        for (uint32_t u = 0; u < n; ++u)
            for (uint32_t v = u + 1; v < n; ++v) e.emplace_back(u, v);
        return {n, std::move(e), "all-to-all"};
    }

    static CouplingGraph line(size_t n) {
        std::vector<std::pair<uint32_t, uint32_t>> e;
        for (uint32_t u = 0; u + 1 < n; ++u) e.emplace_back(u, u + 1);
        return {n, std::move(e), "line"};
    }

    /// Brick-wall hexagonal lattice with every edge subdivided by one extra
    /// vertex; degree is at most 3, as on heavy-hex devices.
    static CouplingGraph heavy_hex(size_t rows, size_t cols) {
        if (rows < 1 || cols < 2) throw DomainError("heavy_hex: need at least 1 row and 2 columns");
        auto id = [cols](size_t r, size_t c) { return static_cast<uint32_t>(r * cols + c); };
        std::vector<std::pair<uint32_t, uint32_t>> base;
        for (size_t r = 0; r < rows; ++r) {
            for (size_t c = 0; c + 1 < cols; ++c) base.emplace_back(id(r, c), id(r, c + 1));
            if (r + 1 < rows)
                for (size_t c = 0; c < cols; ++c)
                    if ((r + c) % 2 == 0) base.emplace_back(id(r, c), id(r + 1, c));
        }
        auto next = static_cast<uint32_t>(rows * cols);
        std::vector<std::pair<uint32_t, uint32_t>> e;
        for (auto [u, v] : base) {
            e.emplace_back(u, next);
            e.emplace_back(next, v);
            ++next;
        }
        return {next, std::move(e), "heavy-hex"};
    }

    size_t size() const { return n_; }
    const std::string& name() const { return name_; }
    const std::vector<std::pair<uint32_t, uint32_t>>& edges() const { return edges_; }
    const std::vector<uint32_t>& neighbors(uint32_t u) const { return adj_.at(u); }
    size_t degree(uint32_t u) const { return adj_.at(u).size(); }
    bool adjacent(uint32_t u, uint32_t v) const { return distance(u, v) == 1; }
    uint32_t distance(uint32_t u, uint32_t v) const { return dist_.at(size_t{u} * n_ + v); }
    bool is_complete() const { return edges_.size() == n_ * (n_ - 1) / 2; }

    /// Vertices from u to v inclusive; among equal-length paths, each step
    /// moves to the lowest-numbered neighbour that is one step closer.
    std::vector<uint32_t> shortest_path(uint32_t u, uint32_t v) const {
        std::vector<uint32_t> path{u};
        while (u != v) {
            for (uint32_t w : adj_[u]) {
                if (distance(w, v) + 1 == distance(u, v)) {
                    u = w;
                    break;
                }
            }
            path.push_back(u);
        }
        return path;
    }

    /// Breadth-first order from `start`; used to place data qubits on a connected patch.
    std::vector<uint32_t> bfs_order(uint32_t start = 0) const {
        std::vector<uint32_t> order;
        std::vector<bool> seen(n_, false);
        std::deque<uint32_t> queue{start};
        seen[start] = true;
        while (!queue.empty()) {
            uint32_t u = queue.front();
            queue.pop_front();
            order.push_back(u);
            for (uint32_t w : adj_[u])
                if (!seen[w]) {
                    seen[w] = true;
                    queue.push_back(w);
                }
        }
        return order;
    }

  private:
    static constexpr uint32_t kUnreachable = std::numeric_limits<uint32_t>::max();
    size_t n_ = 0;
    std::string name_;
    std::vector<std::vector<uint32_t>> adj_;
    std::vector<std::pair<uint32_t, uint32_t>> edges_;
    std::vector<uint32_t> dist_;
};

// Edge-list text: `vertices N` header, then `u v` per line.
inline std::string to_text(const CouplingGraph& g) {
    std::ostringstream os;
    os << "vertices " << g.size() << '\n';
    for (auto [u, v] : g.edges()) os << u << ' ' << v << '\n';
    return os.str();
}

inline CouplingGraph coupling_graph_from_text(const std::string& text, std::string name = "custom") {
    std::istringstream is(text);
    std::string line, key;
    size_t n = 0;
    bool header = false;
    std::vector<std::pair<uint32_t, uint32_t>> edges;
    while (std::getline(is, line)) {
        if (line.empty() || line.front() == '#') continue;
        std::istringstream ls(line);
        if (!header) {
            if (!(ls >> key >> n) || key != "vertices") throw ParseError("layout: expected 'vertices N' header");
            header = true;
            continue;
        }
        uint32_t u, v;
        if (!(ls >> u >> v)) throw ParseError("layout: bad edge line '" + line + "'");
        edges.emplace_back(u, v);
    }
    if (!header) throw ParseError("layout: empty input");
    return {n, std::move(edges), std::move(name)};
}

inline CouplingGraph load_coupling_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open layout file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return coupling_graph_from_text(ss.str(), path);
}

/// Rewrites a circuit on logical qubits onto graph vertices. Logical qubit i
/// sits on vertex placement[i]. A two-qubit gate on non-adjacent vertices is
/// preceded by SWAPs that walk the first operand along a shortest path until
/// it neighbours the second, and followed by the same SWAPs in reverse, so the
/// placement is unchanged between gates.
inline CliffordCircuit route(const CliffordCircuit& c, const CouplingGraph& g, const std::vector<uint32_t>& placement) {
    if (placement.size() < c.num_qubits()) throw CapacityError("route: placement does not cover every qubit");
    for (auto v : placement)
        if (v >= g.size()) throw CapacityError("route: placement uses a vertex outside the layout");
    CliffordCircuit out(g.size());
    for (const auto& gate : c.gates()) {
        Gate m = gate;
        m.q0 = placement[gate.q0];
        if (!is_two_qubit(gate.kind)) {
            out.append(m);
            continue;
        }
        m.q1 = placement[gate.q1];
        if (g.adjacent(m.q0, m.q1)) {
            out.append(m);
            continue;
        }
        auto path = g.shortest_path(m.q0, m.q1);
        // path[0] = q0 ... path.back() = q1; move q0 to path[size-2].
        for (size_t i = 0; i + 2 < path.size(); ++i) out.swap(path[i], path[i + 1]);
        Gate moved = m;
        moved.q0 = path[path.size() - 2];
        out.append(moved);
        for (size_t i = path.size() - 2; i-- > 0;) out.swap(path[i], path[i + 1]);
    }
    return out;
}

/// Indices of two-qubit gates acting on non-adjacent vertices.
inline std::vector<size_t> off_graph_gates(const CliffordCircuit& c, const CouplingGraph& g) {
    std::vector<size_t> bad;
    for (size_t i = 0; i < c.gates().size(); ++i) {
        const auto& gate = c.gates()[i];
        if (!is_two_qubit(gate.kind)) continue;
        if (gate.q0 >= g.size() || gate.q1 >= g.size() || !g.adjacent(gate.q0, gate.q1)) bad.push_back(i);
    }
    return bad;
}

}  // namespace qlego
