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

#include <random>
#include <vector>

#include "qlego/circuit.hpp"
#include "qlego/pauli.hpp"

namespace qlego {

// Heisenberg-picture updates P -> U P U^dagger for the Clifford gate set.

inline void conjugate_h(PauliOperator& p, size_t q) {
    bool x = p.x(q), z = p.z(q);
    if (x && z) p.negate();
    p.set_bits(q, z, x);
}

inline void conjugate_s(PauliOperator& p, size_t q) {
    bool x = p.x(q), z = p.z(q);
    if (x && z) p.negate();  // Y -> -X
    p.set_bits(q, x, z ^ x);
}

inline void conjugate_s_dag(PauliOperator& p, size_t q) {
    bool x = p.x(q), z = p.z(q);
    if (x && !z) p.negate();  // X -> -Y
    p.set_bits(q, x, z ^ x);
}

inline void conjugate_x(PauliOperator& p, size_t q) {
    if (p.z(q)) p.negate();
}
inline void conjugate_y(PauliOperator& p, size_t q) {
    if (p.x(q) != p.z(q)) p.negate();
}
inline void conjugate_z(PauliOperator& p, size_t q) {
    if (p.x(q)) p.negate();
}

inline void conjugate_cx(PauliOperator& p, size_t c, size_t t) {
    bool xc = p.x(c), zc = p.z(c), xt = p.x(t), zt = p.z(t);
    if (xc && zt && (xt == zc)) p.negate();
    p.set_bits(t, xt ^ xc, zt);
    p.set_bits(c, xc, zc ^ zt);
}

inline void conjugate_cz(PauliOperator& p, size_t a, size_t b) {
    conjugate_h(p, b);
    conjugate_cx(p, a, b);
    conjugate_h(p, b);
}

inline void conjugate_swap(PauliOperator& p, size_t a, size_t b) {
    auto la = p.letter(a);
    p.set(a, p.letter(b));
    p.set(b, la);
}

/// Conjugates by a unitary Clifford gate. Throws UnsupportedGate for PSWAP.
inline void conjugate(PauliOperator& p, const Gate& g) {
    switch (g.kind) {
        case GateKind::H: conjugate_h(p, g.q0); break;
        case GateKind::S: conjugate_s(p, g.q0); break;
        case GateKind::S_DAG: conjugate_s_dag(p, g.q0); break;
        case GateKind::X: conjugate_x(p, g.q0); break;
        case GateKind::Y: conjugate_y(p, g.q0); break;
        case GateKind::Z: conjugate_z(p, g.q0); break;
        case GateKind::CX: conjugate_cx(p, g.q0, g.q1); break;
        case GateKind::CZ: conjugate_cz(p, g.q0, g.q1); break;
        case GateKind::SWAP: conjugate_swap(p, g.q0, g.q1); break;
        case GateKind::NOISE: break;
        default: throw UnsupportedGate("conjugate: " + std::string(gate_name(g.kind)) + " is not a Clifford unitary");
    }
}

/// Aaronson-Gottesman stabilizer tableau.
///
/// Rows 0..n-1 are destabilizers, rows n..2n-1 stabilizers. Destabilizer
/// phases are not tracked.
class TableauSimulator {
  public:
    explicit TableauSimulator(size_t n) : n_(n) {
        rows_.reserve(2 * n);
        for (size_t q = 0; q < n; ++q) rows_.push_back(PauliOperator::single(n, q, PauliLetter::X));
        for (size_t q = 0; q < n; ++q) rows_.push_back(PauliOperator::single(n, q, PauliLetter::Z));
    }

    size_t num_qubits() const { return n_; }

    void apply_unitary(const Gate& g) {
        for (auto& r : rows_) conjugate(r, g);
    }

    /// Z-basis measurement. Random outcomes use `rng`; when `forced` is 0 or 1
    /// a random outcome takes that value instead.
    template <class Rng>
    bool measure_z(size_t q, Rng& rng, int forced = -1) {
        last_was_random_ = false;
        size_t p = 2 * n_;
        for (size_t i = n_; i < 2 * n_; ++i) {
            if (rows_[i].x(q)) {
                p = i;
                break;
            }
        }
        if (p < 2 * n_) {
            last_was_random_ = true;
            for (size_t i = 0; i < 2 * n_; ++i) {
                if (i != p && rows_[i].x(q)) {
                    rows_[i] = multiply(rows_[i], rows_[p]);
                    if (i < n_) rows_[i].set_phase(0);
                }
            }
            rows_[p - n_] = rows_[p];
            rows_[p - n_].set_phase(0);
            bool outcome = forced >= 0 ? forced == 1 : (rng() & 1);
            rows_[p] = PauliOperator::single(n_, q, PauliLetter::Z);
            if (outcome) rows_[p].negate();
            return outcome;
        }
        PauliOperator scratch(n_);
        for (size_t i = 0; i < n_; ++i)
            if (rows_[i].x(q)) scratch = multiply(scratch, rows_[n_ + i]);
        return scratch.sign() < 0;
    }

    bool last_measurement_was_random() const { return last_was_random_; }

    template <class Rng>
    void reset(size_t q, Rng& rng) {
        if (measure_z(q, rng)) apply_unitary(Gate{GateKind::X, static_cast<uint32_t>(q)});
    }

    /// +1 or -1 when the observable is determined by the state, 0 when random.
    int expectation(const PauliOperator& obs) const {
        if (obs.size() != n_) throw DimensionError("expectation: operator size mismatch");
        for (size_t i = n_; i < 2 * n_; ++i)
            if (symplectic_product(rows_[i], obs)) return 0;
        PauliOperator scratch(n_);
        for (size_t i = 0; i < n_; ++i)
            if (symplectic_product(rows_[i], obs)) scratch = multiply(scratch, rows_[n_ + i]);
        return scratch.sign() * obs.sign();
    }

    std::vector<PauliOperator> stabilizers() const { return {rows_.begin() + n_, rows_.end()}; }

    /// Runs the unitary, measurement and reset gates of a circuit. NOISE is
    /// ignored; PSWAP throws. Returns the measurement record.
    template <class Rng>
    std::vector<bool> run(const CliffordCircuit& c, Rng& rng, int forced = -1) {
        if (c.num_qubits() > n_) throw DimensionError("tableau: circuit wider than simulator");
        std::vector<bool> record;
        for (const auto& g : c.gates()) {
            switch (g.kind) {
                case GateKind::MEASURE_Z: record.push_back(measure_z(g.q0, rng, forced)); break;
                case GateKind::RESET:
                    if (measure_z(g.q0, rng, forced)) apply_unitary(Gate{GateKind::X, g.q0});
                    break;
                case GateKind::NOISE: break;
                case GateKind::PSWAP: throw UnsupportedGate("tableau: PSWAP requires the dense engine");
                default: apply_unitary(g);
            }
        }
        return record;
    }

  private:
    size_t n_;
    std::vector<PauliOperator> rows_;
    bool last_was_random_ = false;
};

}  // namespace qlego
