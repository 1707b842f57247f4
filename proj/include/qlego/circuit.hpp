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

#include <array>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qlego/error.hpp"

namespace qlego {

/// Gate set of the evaluation circuits.
///
/// PSWAP is the partial swap exp(-i theta (XX + YY)) used to realize
/// relaxation with an auxiliary qubit; it is the only non-Clifford entry and
/// runs on the dense engine only. NOISE is an annotation marking where the
/// noise model's channel acts; it is not a gate and is not counted.
enum class GateKind : uint8_t { H, S, S_DAG, X, Y, Z, CX, CZ, SWAP, PSWAP, MEASURE_Z, RESET, NOISE };

inline constexpr std::array<std::pair<GateKind, std::string_view>, 13> kGateNames{{
    {GateKind::H, "H"},
    {GateKind::S, "S"},
    {GateKind::S_DAG, "S_DAG"},
    {GateKind::X, "X"},
    {GateKind::Y, "Y"},
    {GateKind::Z, "Z"},
    {GateKind::CX, "CX"},
    {GateKind::CZ, "CZ"},
    {GateKind::SWAP, "SWAP"},
    {GateKind::PSWAP, "PSWAP"},
    {GateKind::MEASURE_Z, "MEASURE_Z"},
    {GateKind::RESET, "RESET"},
    {GateKind::NOISE, "NOISE"},
}};

inline std::string_view gate_name(GateKind k) {
    for (const auto& [kind, name] : kGateNames)
        if (kind == k) return name;
    return "?";
}

inline constexpr bool is_two_qubit(GateKind k) {
    return k == GateKind::CX || k == GateKind::CZ || k == GateKind::SWAP || k == GateKind::PSWAP;
}

inline constexpr bool is_one_qubit_unitary(GateKind k) {
    return k == GateKind::H || k == GateKind::S || k == GateKind::S_DAG || k == GateKind::X || k == GateKind::Y ||
           k == GateKind::Z;
}

inline constexpr bool is_unitary(GateKind k) { return is_one_qubit_unitary(k) || is_two_qubit(k); }

struct Gate {
    GateKind kind = GateKind::H;
    uint32_t q0 = 0;
    uint32_t q1 = 0;
    double param = 0.0;

    friend bool operator==(const Gate&, const Gate&) = default;
};

/// N_q, N_1, N_2 of the fidelity model.
struct GateCounts {
    size_t qubits = 0;
    size_t one_qubit = 0;
    size_t two_qubit = 0;

    friend bool operator==(const GateCounts&, const GateCounts&) = default;
};

class CliffordCircuit {
  public:
    CliffordCircuit() = default;
    explicit CliffordCircuit(size_t num_qubits) : num_qubits_(num_qubits) { counts_.qubits = num_qubits; }

    size_t num_qubits() const { return num_qubits_; }
    const std::vector<Gate>& gates() const { return gates_; }
    const GateCounts& counts() const { return counts_; }

    /// Counts tallied from scratch; always equal to counts().
    GateCounts tally() const {
        GateCounts c;
        c.qubits = num_qubits_;
        for (const auto& g : gates_) {
            if (is_one_qubit_unitary(g.kind)) ++c.one_qubit;
            if (is_two_qubit(g.kind)) ++c.two_qubit;
        }
        return c;
    }

    size_t num_measurements() const {
        size_t m = 0;
        for (const auto& g : gates_) m += g.kind == GateKind::MEASURE_Z;
        return m;
    }

    bool has_pswap() const {
        for (const auto& g : gates_)
            if (g.kind == GateKind::PSWAP) return true;
        return false;
    }

    void append(const Gate& g) {
        if (g.q0 >= num_qubits_ || (is_two_qubit(g.kind) && g.q1 >= num_qubits_))
            throw DimensionError("gate " + std::string(gate_name(g.kind)) + " operand out of range for " +
                                 std::to_string(num_qubits_) + " qubits");
        if (is_two_qubit(g.kind) && g.q0 == g.q1)
            throw DimensionError("two-qubit gate " + std::string(gate_name(g.kind)) + " on a single qubit");
        Gate stored = g;
        if (!is_two_qubit(g.kind)) stored.q1 = 0;
        if (g.kind != GateKind::PSWAP) stored.param = 0.0;
        gates_.push_back(stored);
        if (is_one_qubit_unitary(g.kind)) ++counts_.one_qubit;
        if (is_two_qubit(g.kind)) ++counts_.two_qubit;
    }

    void append(GateKind k, uint32_t q0, uint32_t q1 = 0, double param = 0.0) { append(Gate{k, q0, q1, param}); }

    void h(uint32_t q) { append(GateKind::H, q); }
    void s(uint32_t q) { append(GateKind::S, q); }
    void s_dag(uint32_t q) { append(GateKind::S_DAG, q); }
    void x(uint32_t q) { append(GateKind::X, q); }
    void y(uint32_t q) { append(GateKind::Y, q); }
    void z(uint32_t q) { append(GateKind::Z, q); }
    void cx(uint32_t c, uint32_t t) { append(GateKind::CX, c, t); }
    void cz(uint32_t a, uint32_t b) { append(GateKind::CZ, a, b); }
    void swap(uint32_t a, uint32_t b) { append(GateKind::SWAP, a, b); }
    void pswap(uint32_t a, uint32_t b, double theta) { append(GateKind::PSWAP, a, b, theta); }
    void measure(uint32_t q) { append(GateKind::MEASURE_Z, q); }
    void reset(uint32_t q) { append(GateKind::RESET, q); }
    void noise(uint32_t q) { append(GateKind::NOISE, q); }

    /// Appends `other` with its qubit i relabelled to qubit_map[i].
    void append_mapped(const CliffordCircuit& other, const std::vector<uint32_t>& qubit_map) {
        if (qubit_map.size() < other.num_qubits()) throw DimensionError("append_mapped: qubit map too short");
        for (auto g : other.gates()) {
            g.q0 = qubit_map[g.q0];
            if (is_two_qubit(g.kind)) g.q1 = qubit_map[g.q1];
            append(g);
        }
    }

    /// Appends `other` acting on the same qubit indices.
    void append_circuit(const CliffordCircuit& other) {
        for (const auto& g : other.gates()) append(g);
    }

    /// Inverse of a purely unitary circuit.
    CliffordCircuit inverse() const {
        CliffordCircuit out(num_qubits_);
        for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) {
            Gate g = *it;
            switch (g.kind) {
                case GateKind::S: g.kind = GateKind::S_DAG; break;
                case GateKind::S_DAG: g.kind = GateKind::S; break;
                case GateKind::PSWAP: g.param = -g.param; break;
                case GateKind::MEASURE_Z:
                case GateKind::RESET:
                case GateKind::NOISE: throw UsageError("inverse: circuit is not unitary");
                default: break;
            }
            out.append(g);
        }
        return out;
    }

    friend bool operator==(const CliffordCircuit& a, const CliffordCircuit& b) {
        return a.num_qubits_ == b.num_qubits_ && a.gates_ == b.gates_;
    }

  private:
    size_t num_qubits_ = 0;
    std::vector<Gate> gates_;
    GateCounts counts_;
};

// Circuit text format: a `QUBITS n` header, then one gate per line as
// `GATE q0 [q1] [param]`. Parameters use 17 significant digits so the text
// round-trips bit-exactly.
inline std::string to_text(const CliffordCircuit& c) {
    std::ostringstream os;
    os << "QUBITS " << c.num_qubits() << '\n';
    for (const auto& g : c.gates()) {
        os << gate_name(g.kind) << ' ' << g.q0;
        if (is_two_qubit(g.kind)) os << ' ' << g.q1;
        if (g.kind == GateKind::PSWAP) os << ' ' << std::setprecision(std::numeric_limits<double>::max_digits10) << g.param;
        os << '\n';
    }
    return os.str();
}

inline CliffordCircuit circuit_from_text(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    CliffordCircuit c;
    bool have_header = false;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        std::istringstream ls(line);
        std::string name;
        ls >> name;
        if (!have_header) {
            size_t n;
            if (name != "QUBITS" || !(ls >> n)) throw ParseError("circuit: expected 'QUBITS n' header");
            c = CliffordCircuit(n);
            have_header = true;
            continue;
        }
        const GateKind* kind = nullptr;
        for (const auto& entry : kGateNames)
            if (entry.second == name) kind = &entry.first;
        if (kind == nullptr) throw ParseError("circuit: unknown gate '" + name + "'");
        Gate g{*kind};
        if (!(ls >> g.q0)) throw ParseError("circuit: missing operand in '" + line + "'");
        if (is_two_qubit(g.kind) && !(ls >> g.q1)) throw ParseError("circuit: missing second operand in '" + line + "'");
        if (g.kind == GateKind::PSWAP && !(ls >> g.param)) throw ParseError("circuit: missing PSWAP angle");
        c.append(g);
    }
    if (!have_header) throw ParseError("circuit: empty input");
    return c;
}

}  // namespace qlego
