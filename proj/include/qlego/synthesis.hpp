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

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "qlego/check_matrix.hpp"
#include "qlego/gf2.hpp"
#include "qlego/layout.hpp"
#include "qlego/tableau.hpp"

namespace qlego {

/// A Clifford C and pivot qubits such that C row_i C^dagger = sign_i Z_{pivot_i}
/// for every input row (after multiplying by earlier rows where needed).
struct Disentangler {
    CliffordCircuit circuit;
    std::vector<uint32_t> pivot;
    std::vector<int> sign;
};

/// Row-by-row elimination: each row, restricted to qubits not yet fixed, is
/// rotated to a single Z. Rows must be Hermitian, independent and commuting.
inline Disentangler disentangle(std::vector<PauliOperator> rows, size_t n) {
    Disentangler d{CliffordCircuit(n), {}, {}};
    std::vector<bool> fixed(n, false);
    auto apply = [&](const Gate& g) {
        d.circuit.append(g);
        for (auto& r : rows) conjugate(r, g);
    };
    for (size_t j = 0; j < rows.size(); ++j) {
        if (rows[j].size() != n) throw DimensionError("disentangle: row size mismatch");
        for (size_t i = 0; i < j; ++i) {
            uint32_t q = d.pivot[i];
            if (rows[j].x(q)) throw DomainError("disentangle: rows do not commute");
            if (rows[j].z(q)) rows[j] = multiply(rows[j], rows[i]);
        }
        std::vector<uint32_t> support;
        bool any_x = false;
        for (uint32_t q = 0; q < n; ++q) {
            if (fixed[q] || rows[j].letter(q) == PauliLetter::I) continue;
            support.push_back(q);
            any_x = any_x || rows[j].x(q);
        }
        if (support.empty()) throw DomainError("disentangle: rows are dependent");
        uint32_t pivot = support.front();
        if (!any_x) {
            for (size_t s = 1; s < support.size(); ++s) apply({GateKind::CX, support[s], pivot});
        } else {
            for (auto q : support)
                if (rows[j].x(q)) {
                    pivot = q;
                    break;
                }
            for (auto q : support) {
                auto l = rows[j].letter(q);
                if (l == PauliLetter::Z) apply({GateKind::H, q});
                if (l == PauliLetter::Y) apply({GateKind::S_DAG, q});
            }
            for (auto q : support)
                if (q != pivot) apply({GateKind::CX, pivot, q});
            apply({GateKind::H, pivot});
        }
        fixed[pivot] = true;
        d.pivot.push_back(pivot);
        d.sign.push_back(rows[j].sign());
    }
    return d;
}

/// Completes independent commuting stabilizers on n qubits to a code by
/// pulling single-qubit X/Z on the unpivoted qubits back through the
/// disentangler.
inline CheckMatrix complete_code(const std::vector<PauliOperator>& stabilizers, size_t n) {
    auto d = disentangle(stabilizers, n);
    auto back = d.circuit.inverse();
    std::vector<bool> pivot(n, false);
    for (auto q : d.pivot) pivot[q] = true;
    CheckMatrix code{n, n - stabilizers.size(), stabilizers, {}, {}};
    for (uint32_t q = 0; q < n; ++q) {
        if (pivot[q]) continue;
        auto lx = PauliOperator::single(n, q, PauliLetter::X);
        auto lz = PauliOperator::single(n, q, PauliLetter::Z);
        for (const auto& g : back.gates()) {
            conjugate(lx, g);
            conjugate(lz, g);
        }
        code.logical_x.push_back(lx);
        code.logical_z.push_back(lz);
    }
    validate(code);
    return code;
}

inline const PauliOperator& logical_operator(const CheckMatrix& code, PauliLetter basis, size_t index = 0) {
    switch (basis) {
        case PauliLetter::X: return code.logical_x.at(index);
        case PauliLetter::Z: return code.logical_z.at(index);
        default: throw UsageError("logical_operator: basis must be X, Y or Z");
    }
}

/// Logical operator for basis X, Y (= i X_L Z_L) or Z.
inline PauliOperator logical_pauli(const CheckMatrix& code, PauliLetter basis, size_t index = 0) {
    if (basis == PauliLetter::I) throw UsageError("logical_pauli: basis must be X, Y or Z");
    if (basis != PauliLetter::Y) return logical_operator(code, basis, index);
    PauliOperator y = multiply(code.logical_x.at(index), code.logical_z.at(index));
    y.set_phase((y.phase() + 1) % 4);
    return y;
}

/// Encoder mapping |0...0> to the codeword stabilized by the code stabilizers
/// and sign * logical P on the first logical qubit (any further logical qubits
/// are prepared in +Z). Built by disentangling the target stabilizer group and
/// inverting.
inline CliffordCircuit synthesize_encoder(const CheckMatrix& code, PauliLetter basis, int sign) {
    validate(code);
    if (code.k == 0) throw UsageError("synthesize_encoder: code has no logical qubit");
    if (sign != 1 && sign != -1) throw UsageError("synthesize_encoder: sign must be +1 or -1");
    std::vector<PauliOperator> rows = code.stabilizers;
    PauliOperator target = logical_pauli(code, basis);
    if (sign < 0) target.negate();
    rows.push_back(target);
    for (size_t j = 1; j < code.k; ++j) rows.push_back(code.logical_z[j]);
    auto d = disentangle(rows, code.n);
    CliffordCircuit enc(code.n);
    for (size_t i = 0; i < d.pivot.size(); ++i)
        if (d.sign[i] < 0) enc.x(d.pivot[i]);
    enc.append_circuit(d.circuit.inverse());
    return enc;
}

/// Unitary rotating logical P onto a single qubit, followed by a Z
/// measurement there. The logical eigenvalue is sign * (-1)^bit.
struct LogicalReadout {
    CliffordCircuit circuit;
    uint32_t qubit = 0;
    int sign = 1;
};

inline LogicalReadout synthesize_logical_readout(const CheckMatrix& code, PauliLetter basis) {
    validate(code);
    // Only the logical row is rotated, so the measured operator is exactly
    // the code's representative and not a stabilizer-equivalent one.
    auto d = disentangle({logical_pauli(code, basis)}, code.n);
    LogicalReadout r{std::move(d.circuit), d.pivot.back(), d.sign.back()};
    r.circuit.measure(r.qubit);
    return r;
}

/// Unconstrained extraction circuit on n data qubits (0..n-1) plus one
/// ancilla per stabilizer (n..). Each ancilla collects the parity of its
/// generator through basis-changed CX gates and is measured at the end of its
/// block, yielding bit 1 exactly when the generator's eigenvalue is -1.
inline CliffordCircuit syndrome_extraction_logical(const CheckMatrix& code) {
    validate(code);
    size_t m = code.stabilizers.size();
    CliffordCircuit c(code.n + m);
    for (size_t i = 0; i < m; ++i) {
        const auto& s = code.stabilizers[i];
        auto a = static_cast<uint32_t>(code.n + i);
        for (uint32_t q = 0; q < code.n; ++q) {
            switch (s.letter(q)) {
                case PauliLetter::I: break;
                case PauliLetter::Z: c.cx(q, a); break;
                case PauliLetter::X:
                    c.h(q);
                    c.cx(q, a);
                    c.h(q);
                    break;
                case PauliLetter::Y:
                    c.s_dag(q);
                    c.h(q);
                    c.cx(q, a);
                    c.h(q);
                    c.s(q);
                    break;
            }
        }
        if (s.sign() < 0) c.x(a);
    }
    for (size_t i = 0; i < m; ++i) c.measure(static_cast<uint32_t>(code.n + i));
    return c;
}

/// Data qubits take the first n vertices of a breadth-first walk from vertex
/// 0; ancilla i then takes the free vertex with the smallest summed distance
/// to its generator's data vertices (lowest id on ties).
inline std::vector<uint32_t> place_qubits(const CheckMatrix& code, const CouplingGraph& g, size_t extra = 0) {
    size_t m = code.stabilizers.size();
    if (code.n + m + extra > g.size())
        throw CapacityError("layout '" + g.name() + "' has " + std::to_string(g.size()) + " vertices, need " +
                            std::to_string(code.n + m + extra));
    auto order = g.bfs_order(0);
    std::vector<uint32_t> placement(order.begin(), order.begin() + static_cast<long>(code.n));
    std::vector<bool> used(g.size(), false);
    for (auto v : placement) used[v] = true;
    for (size_t i = 0; i < m; ++i) {
        uint32_t best = 0;
        uint64_t best_cost = std::numeric_limits<uint64_t>::max();
        for (uint32_t v = 0; v < g.size(); ++v) {
            if (used[v]) continue;
            uint64_t cost = 0;
            for (uint32_t q = 0; q < code.n; ++q)
                if (code.stabilizers[i].letter(q) != PauliLetter::I) cost += g.distance(v, placement[q]);
            if (cost < best_cost) {
                best_cost = cost;
                best = v;
            }
        }
        used[best] = true;
        placement.push_back(best);
    }
    for (size_t e = 0; e < extra; ++e) {
        uint32_t v = 0;
        while (used[v]) ++v;
        used[v] = true;
        placement.push_back(v);
    }
    return placement;
}

/// Syndrome extraction, optionally routed onto a coupling graph. With a
/// layout the circuit acts on graph vertices using place_qubits.
inline CliffordCircuit synthesize_syndrome_extraction(const CheckMatrix& code, const CouplingGraph* layout = nullptr) {
    auto logical = syndrome_extraction_logical(code);
    if (!layout) return logical;
    return route(logical, *layout, place_qubits(code, *layout));
}

/// Edges in a minimum spanning tree of the generator's support under the
/// graph metric; `placement[q]` is the vertex of data qubit q.
inline size_t generator_cost(const PauliOperator& g, const CouplingGraph& graph, const std::vector<uint32_t>& placement) {
    std::vector<uint32_t> verts;
    for (size_t q = 0; q < g.size(); ++q)
        if (g.letter(q) != PauliLetter::I) verts.push_back(placement.at(q));
    if (verts.size() < 2) return 0;
    constexpr size_t kInf = std::numeric_limits<size_t>::max();
    std::vector<size_t> best(verts.size(), kInf);
    std::vector<bool> in(verts.size(), false);
    best[0] = 0;
    size_t total = 0;
    for (size_t it = 0; it < verts.size(); ++it) {
        size_t u = kInf;
        for (size_t i = 0; i < verts.size(); ++i)
            if (!in[i] && (u == kInf || best[i] < best[u])) u = i;
        in[u] = true;
        total += best[u];
        for (size_t i = 0; i < verts.size(); ++i)
            if (!in[i]) best[i] = std::min<size_t>(best[i], graph.distance(verts[u], verts[i]));
    }
    return total;
}

inline size_t layout_cost(const std::vector<PauliOperator>& gens, const CouplingGraph& graph,
                          const std::vector<uint32_t>& placement) {
    size_t c = 0;
    for (const auto& g : gens) c += generator_cost(g, graph, placement);
    return c;
}

/// Data placement used by optimize_generators: the same breadth-first patch
/// as place_qubits.
inline std::vector<uint32_t> data_placement(size_t n, const CouplingGraph& g) {
    if (n > g.size()) throw CapacityError("layout too small for " + std::to_string(n) + " data qubits");
    auto order = g.bfs_order(0);
    return {order.begin(), order.begin() + static_cast<long>(n)};
}

/// Greedy generator rewrite: replace g_i by g_i * g_j on the first strict
/// cost improvement found scanning (i, j) in order, then rescan.
inline CheckMatrix optimize_generators(const CheckMatrix& code, const CouplingGraph& graph) {
    validate(code);
    auto placement = data_placement(code.n, graph);
    CheckMatrix out = code;
    auto& gens = out.stabilizers;
    std::vector<size_t> cost(gens.size());
    for (size_t i = 0; i < gens.size(); ++i) cost[i] = generator_cost(gens[i], graph, placement);
    bool improved = true;
    while (improved) {
        improved = false;
        for (size_t i = 0; i < gens.size() && !improved; ++i) {
            for (size_t j = 0; j < gens.size() && !improved; ++j) {
                if (i == j) continue;
                auto candidate = multiply(gens[i], gens[j]);
                size_t c = generator_cost(candidate, graph, placement);
                if (c < cost[i]) {
                    gens[i] = candidate;
                    cost[i] = c;
                    improved = true;
                }
            }
        }
    }
    return out;
}

/// Partial-swap angle for relaxation strength delta: sin^2(theta) = delta / 2.
inline double relaxation_theta(double delta) {
    if (!(delta >= 0.0 && delta <= 1.0)) throw DomainError("relaxation delta must lie in [0, 1]");
    return std::asin(std::sqrt(delta / 2.0));
}

/// Appends the relaxation gadget on `target`: fresh |0> auxiliary, then
/// exp(-i theta (XX + YY)). The auxiliary is left unmeasured (traced out).
inline void append_relaxation(CliffordCircuit& c, uint32_t target, uint32_t aux, double delta) {
    double theta = relaxation_theta(delta);
    c.reset(aux);
    c.pswap(target, aux, theta);
}

/// Two-qubit gadget: qubit 0 is the target, qubit 1 the auxiliary.
inline CliffordCircuit relaxation_gadget(double delta) {
    CliffordCircuit c(2);
    append_relaxation(c, 0, 1, delta);
    return c;
}

}  // namespace qlego
