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
#include <thread>
#include <unordered_map>
#include <vector>

#include "qlego/execution.hpp"
#include "qlego/noise.hpp"
#include "qlego/tableau.hpp"

namespace qlego {

namespace detail {

inline void check_tableau_inputs(const CliffordCircuit& c, const NoiseModel& noise) {
    noise.validate();
    if (noise.has_relaxation())
        throw ConfigurationError("the tableau engine cannot apply relaxation; use the dense engine");
    if (c.has_pswap()) throw UnsupportedGate("the tableau engine cannot run PSWAP; use the dense engine");
    check_measurement_count(c);
}

/// Noiseless reference sample with every random outcome forced to 0.
inline uint64_t reference_sample(const CliffordCircuit& c) {
    TableauSimulator sim(c.num_qubits());
    Rng unused(0);
    auto bits = sim.run(c, unused, 0);
    uint64_t w = 0;
    for (size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) w |= uint64_t{1} << i;
    return w;
}

inline bool is_noise_site(const Gate& g, NoisePlacement placement) {
    return placement == NoisePlacement::AfterEncoding ? g.kind == GateKind::NOISE : is_unitary(g.kind);
}

/// Propagates Pauli frames through one gate (signs are irrelevant to frames).
template <class Word>
inline void frame_gate(std::vector<Word>& x, std::vector<Word>& z, const Gate& g) {
    auto a = g.q0, b = g.q1;
    switch (g.kind) {
        case GateKind::H: std::swap(x[a], z[a]); break;
        case GateKind::S:
        case GateKind::S_DAG: z[a] ^= x[a]; break;
        case GateKind::CX:
            x[b] ^= x[a];
            z[a] ^= z[b];
            break;
        case GateKind::CZ:
            z[a] ^= x[b];
            z[b] ^= x[a];
            break;
        case GateKind::SWAP:
            std::swap(x[a], x[b]);
            std::swap(z[a], z[b]);
            break;
        default: break;
    }
}

}  // namespace detail

/// Pauli-frame sampler: a noiseless tableau reference sample, then 64 shots
/// at a time of bit-packed X/Z error frames. Frames start with random Z
/// (a no-op on |0>) and receive fresh random Z after every measurement and
/// reset, which reproduces the randomness of non-deterministic outcomes.
/// Batch b draws from its own derived stream, so `threads` does not change
/// the result.
inline ExecutionResult run_tableau(const CliffordCircuit& c, const NoiseModel& noise, size_t shots, uint64_t seed,
                                   size_t threads = 1) {
    detail::check_tableau_inputs(c, noise);
    const uint64_t ref = detail::reference_sample(c);
    const size_t nq = c.num_qubits();
    const size_t nm = c.num_measurements();
    ExecutionResult result{nm, std::vector<uint64_t>(shots, 0)};
    const size_t batches = (shots + 63) / 64;

    auto run_batch = [&](size_t b) {
        Rng rng = make_rng(seed, {b});
        std::vector<uint64_t> x(nq, 0), z(nq, 0), flips(nm, 0);
        for (auto& w : z) w = rng();
        auto inject = [&](uint32_t q) {
            const auto& p = noise.probs(q);
            if (p.zero()) return;
            const double pxy = p.px + p.py, pall = p.total();
            for (unsigned lane = 0; lane < 64; ++lane) {
                double u = uniform01(rng);
                uint64_t bit = uint64_t{1} << lane;
                if (u < p.px) x[q] ^= bit;
                else if (u < pxy) x[q] ^= bit, z[q] ^= bit;
                else if (u < pall) z[q] ^= bit;
            }
        };
        size_t m = 0;
        for (const auto& g : c.gates()) {
            switch (g.kind) {
                case GateKind::MEASURE_Z:
                    flips[m++] = x[g.q0];
                    z[g.q0] = rng();
                    break;
                case GateKind::RESET:
                    x[g.q0] = 0;
                    z[g.q0] = rng();
                    break;
                default: detail::frame_gate(x, z, g);
            }
            if (detail::is_noise_site(g, noise.placement)) {
                inject(g.q0);
                if (is_two_qubit(g.kind)) inject(g.q1);
            }
        }
        size_t lo = b * 64, hi = std::min(shots, lo + 64);
        for (size_t s = lo; s < hi; ++s) {
            uint64_t w = ref;
            unsigned lane = static_cast<unsigned>(s - lo);
            for (size_t i = 0; i < nm; ++i) w ^= ((flips[i] >> lane) & 1) << i;
            result.shots[s] = w;
        }
    };

    threads = std::max<size_t>(1, std::min(threads, batches));
    if (threads == 1) {
        for (size_t b = 0; b < batches; ++b) run_batch(b);
    } else {
        std::vector<std::thread> pool;
        for (size_t t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                for (size_t b = t; b < batches; b += threads) run_batch(b);
            });
        for (auto& th : pool) th.join();
    }
    return result;
}

/// Exact outcome distribution of a Clifford circuit with Pauli noise.
///
/// Every random ingredient of the frame sampler is an independent source
/// whose effect on the outcome is a fixed flip pattern: each noise site
/// (X, Y or Z with their probabilities) and each gauge Z (probability 1/2).
/// The distribution is the reference sample XOR the convolution of those.
inline ExactDistribution run_tableau_exact(const CliffordCircuit& c, const NoiseModel& noise) {
    detail::check_tableau_inputs(c, noise);
    const uint64_t ref = detail::reference_sample(c);
    const size_t nq = c.num_qubits();
    const auto& gates = c.gates();

    // Measurement index reached before gate i.
    std::vector<size_t> meas_before(gates.size() + 1, 0);
    for (size_t i = 0; i < gates.size(); ++i) meas_before[i + 1] = meas_before[i] + (gates[i].kind == GateKind::MEASURE_Z);

    // Flip pattern of a single Pauli placed on qubit q just before gate `start`.
    auto propagate = [&](uint32_t q, bool px, bool pz, size_t start) {
        std::vector<uint8_t> x(nq, 0), z(nq, 0);
        x[q] = px;
        z[q] = pz;
        uint64_t mask = 0;
        size_t m = meas_before[start];
        for (size_t i = start; i < gates.size(); ++i) {
            const auto& g = gates[i];
            if (g.kind == GateKind::MEASURE_Z) {
                if (x[g.q0]) mask |= uint64_t{1} << m;
                ++m;
                z[g.q0] = 0;
            } else if (g.kind == GateKind::RESET) {
                x[g.q0] = z[g.q0] = 0;
            } else {
                detail::frame_gate(x, z, g);
            }
        }
        return mask;
    };

    std::unordered_map<uint64_t, double> dist{{0, 1.0}};
    auto convolve = [&](const std::vector<std::pair<uint64_t, double>>& outcomes) {
        std::unordered_map<uint64_t, double> next;
        next.reserve(dist.size() * 2);
        for (const auto& [m, p] : dist)
            for (const auto& [f, q] : outcomes)
                if (q > 0) next[m ^ f] += p * q;
        dist.swap(next);
    };
    auto gauge = [&](uint32_t q, size_t start) {
        uint64_t f = propagate(q, false, true, start);
        if (f) convolve({{0, 0.5}, {f, 0.5}});
    };
    auto site = [&](uint32_t q, size_t start) {
        const auto& p = noise.probs(q);
        if (p.zero()) return;
        uint64_t fx = propagate(q, true, false, start), fz = propagate(q, false, true, start);
        if (!fx && !fz) return;
        convolve({{0, 1 - p.total()}, {fx, p.px}, {fx ^ fz, p.py}, {fz, p.pz}});
    };

    for (uint32_t q = 0; q < nq; ++q) gauge(q, 0);
    for (size_t i = 0; i < gates.size(); ++i) {
        const auto& g = gates[i];
        if (g.kind == GateKind::MEASURE_Z || g.kind == GateKind::RESET) gauge(g.q0, i + 1);
        if (detail::is_noise_site(g, noise.placement)) {
            site(g.q0, i + 1);
            if (is_two_qubit(g.kind)) site(g.q1, i + 1);
        }
    }
    ExactDistribution out{c.num_measurements(), {}};
    for (const auto& [m, p] : dist)
        if (p > 0) out.probs[ref ^ m] += p;
    return out;
}

}  // namespace qlego
