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

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "qlego/execution.hpp"
#include "qlego/noise.hpp"
#include "qlego/synthesis.hpp"

namespace qlego {

using cplx = std::complex<double>;
/// Row-major 2x2 and 4x4 matrices. Two-qubit local index is b(q0) + 2 b(q1);
/// single-qubit superoperators use r + 2c for the basis element |r><c|.
using Mat2 = std::array<cplx, 4>;
using Mat4 = std::array<cplx, 16>;

namespace dense {

inline Mat2 gate_matrix_1q(GateKind k) {
    const cplx i(0, 1);
    const double r = 1.0 / std::sqrt(2.0);
    switch (k) {
        case GateKind::H: return {r, r, r, -r};
        case GateKind::S: return {1, 0, 0, i};
        case GateKind::S_DAG: return {1, 0, 0, -i};
        case GateKind::X: return {0, 1, 1, 0};
        case GateKind::Y: return {0, -i, i, 0};
        case GateKind::Z: return {1, 0, 0, -1};
        default: throw UnsupportedGate("not a one-qubit unitary: " + std::string(gate_name(k)));
    }
}

/// exp(-i theta (XX + YY)): identity on |00>, |11>; cos 2theta - i sin 2theta X
/// on the {|01>, |10>} block.
inline Mat4 pswap_matrix(double theta) {
    Mat4 m{};
    const cplx c = std::cos(2 * theta), s = cplx(0, -std::sin(2 * theta));
    m[0] = m[15] = 1;
    m[1 * 4 + 1] = m[2 * 4 + 2] = c;
    m[1 * 4 + 2] = m[2 * 4 + 1] = s;
    return m;
}

inline Mat4 gate_matrix_2q(const Gate& g) {
    Mat4 m{};
    switch (g.kind) {
        case GateKind::CX:
            m[0] = m[2 * 4 + 2] = 1;
            m[1 * 4 + 3] = m[3 * 4 + 1] = 1;
            return m;
        case GateKind::CZ:
            m[0] = m[5] = m[10] = 1;
            m[15] = -1;
            return m;
        case GateKind::SWAP:
            m[0] = m[15] = 1;
            m[1 * 4 + 2] = m[2 * 4 + 1] = 1;
            return m;
        case GateKind::PSWAP: return pswap_matrix(g.param);
        default: throw UnsupportedGate("not a two-qubit unitary: " + std::string(gate_name(g.kind)));
    }
}

template <class M>
M conj(M m) {
    for (auto& v : m) v = std::conj(v);
    return m;
}

inline void apply_1(std::vector<cplx>& v, size_t bit, const Mat2& m) {
    const size_t s = size_t{1} << bit;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i & s) continue;
        cplx a = v[i], b = v[i | s];
        v[i] = m[0] * a + m[1] * b;
        v[i | s] = m[2] * a + m[3] * b;
    }
}

inline void apply_2(std::vector<cplx>& v, size_t bit0, size_t bit1, const Mat4& m) {
    const size_t s0 = size_t{1} << bit0, s1 = size_t{1} << bit1;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i & (s0 | s1)) continue;
        const size_t idx[4] = {i, i | s0, i | s1, i | s0 | s1};
        cplx a[4] = {v[idx[0]], v[idx[1]], v[idx[2]], v[idx[3]]};
        for (int r = 0; r < 4; ++r)
            v[idx[r]] = m[r * 4 + 0] * a[0] + m[r * 4 + 1] * a[1] + m[r * 4 + 2] * a[2] + m[r * 4 + 3] * a[3];
    }
}

}  // namespace dense

/// n-qubit density matrix stored as a 2n-qubit vector: entry (r, c) lives at
/// index r | (c << n).
class DensityMatrix {
  public:
    explicit DensityMatrix(size_t n) : n_(n), v_(size_t{1} << (2 * n), 0.0) { v_[0] = 1.0; }

    size_t num_qubits() const { return n_; }
    cplx& at(size_t r, size_t c) { return v_[r | (c << n_)]; }
    cplx at(size_t r, size_t c) const { return v_[r | (c << n_)]; }
    std::vector<cplx>& data() { return v_; }

    void apply_1q(uint32_t q, const Mat2& u) {
        dense::apply_1(v_, q, u);
        dense::apply_1(v_, q + n_, dense::conj(u));
    }
    void apply_2q(uint32_t a, uint32_t b, const Mat4& u) {
        dense::apply_2(v_, a, b, u);
        dense::apply_2(v_, a + n_, b + n_, dense::conj(u));
    }
    /// Single-qubit channel given as a superoperator on |r><c| (index r + 2c).
    void apply_channel(uint32_t q, const Mat4& superop) { dense::apply_2(v_, q, q + n_, superop); }

    void apply_unitary(const Gate& g) {
        if (is_two_qubit(g.kind)) apply_2q(g.q0, g.q1, dense::gate_matrix_2q(g));
        else apply_1q(g.q0, dense::gate_matrix_1q(g.kind));
    }

    /// Keeps only the |bit><bit| block of qubit q (unnormalised).
    void project(uint32_t q, bool bit) {
        const size_t sr = size_t{1} << q, sc = size_t{1} << (q + n_);
        for (size_t i = 0; i < v_.size(); ++i)
            if (bool(i & sr) != bit || bool(i & sc) != bit) v_[i] = 0.0;
    }

    double trace() const {
        double t = 0;
        for (size_t r = 0; r < (size_t{1} << n_); ++r) t += at(r, r).real();
        return t;
    }

  private:
    size_t n_;
    std::vector<cplx> v_;
};

// Single-qubit channels as superoperators S[(r' + 2c') * 4 + (r + 2c)].

inline Mat4 superop_from_kraus(const std::vector<Mat2>& kraus) {
    Mat4 s{};
    for (const auto& k : kraus)
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                for (int rp = 0; rp < 2; ++rp)
                    for (int cp = 0; cp < 2; ++cp)
                        s[(rp + 2 * cp) * 4 + (r + 2 * c)] += k[rp * 2 + r] * std::conj(k[cp * 2 + c]);
    return s;
}

inline Mat4 identity_superop() { return superop_from_kraus({{1, 0, 0, 1}}); }

inline Mat4 pauli_superop(const PauliProbs& p) {
    auto scaled = [](Mat2 m, double w) {
        for (auto& v : m) v *= std::sqrt(w);
        return m;
    };
    return superop_from_kraus({scaled({1, 0, 0, 1}, 1 - p.total()), scaled(dense::gate_matrix_1q(GateKind::X), p.px),
                               scaled(dense::gate_matrix_1q(GateKind::Y), p.py),
                               scaled(dense::gate_matrix_1q(GateKind::Z), p.pz)});
}

/// Standard amplitude damping with decay probability gamma.
inline Mat4 amplitude_damping_superop(double gamma) {
    if (!(gamma >= 0 && gamma <= 1)) throw DomainError("gamma must lie in [0, 1]");
    return superop_from_kraus({{1, 0, 0, std::sqrt(1 - gamma)}, {0, std::sqrt(gamma), 0, 0}});
}

/// The discrete relaxation map
///   rho -> (1-D)^2 rho + D(2-D) [P+ rho P+ + X P- rho P- X] + (D/2)(1-D) [rho - Z rho Z]
/// with P+- = (1 +- Z)/2, evaluated on each basis element |r><c|.
inline Mat4 relaxation_superop(double delta) {
    if (!(delta >= 0 && delta <= 1)) throw DomainError("relaxation delta must lie in [0, 1]");
    using M = Eigen::Matrix2cd;
    M x, z, pp, pm;
    x << 0, 1, 1, 0;
    z << 1, 0, 0, -1;
    pp = (M::Identity() + z) / 2.0;
    pm = (M::Identity() - z) / 2.0;
    Mat4 s{};
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            M e = M::Zero();
            e(r, c) = 1;
            M out = (1 - delta) * (1 - delta) * e + delta * (2 - delta) * (pp * e * pp + x * pm * e * pm * x) +
                    (delta / 2) * (1 - delta) * (e - z * e * z);
            for (int rp = 0; rp < 2; ++rp)
                for (int cp = 0; cp < 2; ++cp) s[(rp + 2 * cp) * 4 + (r + 2 * c)] = out(rp, cp);
        }
    }
    return s;
}

/// Channel on the target qubit of the relaxation gadget: fresh |0> auxiliary,
/// partial swap, auxiliary traced out.
inline Mat4 gadget_superop(double delta) {
    const double theta = relaxation_theta(delta);
    Mat4 s{};
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            DensityMatrix rho(2);
            rho.at(0, 0) = 0;
            rho.at(static_cast<size_t>(r), static_cast<size_t>(c)) = 1;  // aux bit (bit 1) stays 0
            rho.apply_2q(0, 1, dense::pswap_matrix(theta));
            for (int rp = 0; rp < 2; ++rp)
                for (int cp = 0; cp < 2; ++cp) {
                    cplx acc = 0;
                    for (int a = 0; a < 2; ++a) acc += rho.at(size_t(rp | (a << 1)), size_t(cp | (a << 1)));
                    s[(rp + 2 * cp) * 4 + (r + 2 * c)] = acc;
                }
        }
    }
    return s;
}

/// RESET as a channel: every input goes to |0><0| with its trace.
inline Mat4 reset_superop() {
    Mat4 s{};
    s[0 * 4 + 0] = 1;
    s[0 * 4 + 3] = 1;
    return s;
}

/// Normalised Choi matrix (1/2) sum |r><c| (x) Phi(|r><c|); index (2r + r', 2c + c').
inline Eigen::Matrix4cd choi_matrix(const Mat4& s) {
    Eigen::Matrix4cd j;
    for (int r = 0; r < 2; ++r)
        for (int rp = 0; rp < 2; ++rp)
            for (int c = 0; c < 2; ++c)
                for (int cp = 0; cp < 2; ++cp) j(2 * r + rp, 2 * c + cp) = s[(rp + 2 * cp) * 4 + (r + 2 * c)] / 2.0;
    return j;
}

/// Trace distance between the normalised Choi states of two channels.
inline double choi_trace_distance(const Mat4& a, const Mat4& b) {
    Eigen::Matrix4cd d = choi_matrix(a) - choi_matrix(b);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(d, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

struct CptpCheck {
    double min_eigenvalue = 0;
    double trace_preservation_error = 0;
    bool ok(double tol = 1e-12) const { return min_eigenvalue >= -tol && trace_preservation_error <= tol; }
};

/// Positivity of the Choi matrix and the partial trace over the output,
/// which must be I/2 for a trace-preserving map.
inline CptpCheck check_cptp(const Mat4& s) {
    Eigen::Matrix4cd j = choi_matrix(s);
    Eigen::Matrix4cd herm = (j + j.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(herm, Eigen::EigenvaluesOnly);
    CptpCheck out;
    out.min_eigenvalue = es.eigenvalues().minCoeff();
    double err = (j - herm).cwiseAbs().maxCoeff();
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
            cplx t = j(2 * r, 2 * c) + j(2 * r + 1, 2 * c + 1);
            err = std::max(err, std::abs(t - (r == c ? 0.5 : 0.0)));
        }
    out.trace_preservation_error = err;
    return out;
}

/// Applies a single-qubit superoperator to a 2x2 density matrix.
inline Eigen::Matrix2cd apply_superop(const Mat4& s, const Eigen::Matrix2cd& rho) {
    Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            for (int rp = 0; rp < 2; ++rp)
                for (int cp = 0; cp < 2; ++cp) out(rp, cp) += s[(rp + 2 * cp) * 4 + (r + 2 * c)] * rho(r, c);
    return out;
}

struct DenseOptions {
    /// Limit on simulated qubits, counting only qubits the circuit touches
    /// plus the internal auxiliary used for gadget-mode relaxation.
    size_t qubit_cap = 12;
};

/// Exact joint outcome distribution by density-matrix evolution.
///
/// Noise sites follow NoiseModel placement. Relaxation uses the discrete map
/// directly (Kraus mode) or an internal auxiliary qubit with RESET + PSWAP
/// (gadget mode). A measurement whose qubit is untouched afterwards is read
/// off the final diagonal; otherwise the state branches on the outcome.
inline ExactDistribution run_dense_exact(const CliffordCircuit& circuit, const NoiseModel& noise,
                                         const DenseOptions& opt = {}) {
    noise.validate();
    check_measurement_count(circuit);
    const auto& gates = circuit.gates();

    // Compress to the qubits actually used.
    std::vector<int> map(circuit.num_qubits(), -1);
    uint32_t used = 0;
    for (const auto& g : gates) {
        if (map[g.q0] < 0) map[g.q0] = static_cast<int>(used++);
        if (is_two_qubit(g.kind) && map[g.q1] < 0) map[g.q1] = static_cast<int>(used++);
    }
    const bool gadget = noise.has_relaxation() && noise.relaxation_mode == RelaxationMode::Gadget;
    const uint32_t aux = used;
    const size_t n = used + (gadget ? 1 : 0);
    if (n > opt.qubit_cap)
        throw CapacityError("dense engine: " + std::to_string(n) + " qubits exceed the cap of " +
                            std::to_string(opt.qubit_cap));

    std::vector<bool> touched_later(gates.size(), false);
    {
        std::vector<bool> seen(circuit.num_qubits(), false);
        for (size_t i = gates.size(); i-- > 0;) {
            const auto& g = gates[i];
            if (g.kind == GateKind::MEASURE_Z) touched_later[i] = seen[g.q0];
            seen[g.q0] = true;
            if (is_two_qubit(g.kind)) seen[g.q1] = true;
        }
    }

    std::vector<Mat4> pauli_cache(circuit.num_qubits());
    std::vector<bool> pauli_active(circuit.num_qubits(), false);
    for (uint32_t q = 0; q < circuit.num_qubits(); ++q) {
        if (noise.probs(q).zero()) continue;
        pauli_active[q] = true;
        pauli_cache[q] = pauli_superop(noise.probs(q));
    }
    const Mat4 relax = noise.has_relaxation() ? relaxation_superop(*noise.relaxation_delta) : Mat4{};
    const double theta = noise.has_relaxation() ? relaxation_theta(*noise.relaxation_delta) : 0.0;
    const Mat4 reset = reset_superop();

    struct Branch {
        uint64_t bits = 0;
        DensityMatrix rho;
    };
    std::vector<Branch> branches;
    branches.push_back({0, DensityMatrix(n)});
    std::vector<std::pair<size_t, uint32_t>> deferred;  // (measurement index, compressed qubit)

    auto noise_at = [&](DensityMatrix& rho, uint32_t q) {
        auto cq = static_cast<uint32_t>(map[q]);
        if (pauli_active[q]) rho.apply_channel(cq, pauli_cache[q]);
        if (!noise.has_relaxation()) return;
        if (gadget) {
            rho.apply_channel(aux, reset);
            rho.apply_2q(cq, aux, dense::pswap_matrix(theta));
        } else {
            rho.apply_channel(cq, relax);
        }
    };

    size_t m = 0;
    for (size_t i = 0; i < gates.size(); ++i) {
        Gate g = gates[i];
        const uint32_t orig0 = g.q0, orig1 = g.q1;
        g.q0 = static_cast<uint32_t>(map[g.q0]);
        if (is_two_qubit(g.kind)) g.q1 = static_cast<uint32_t>(map[g.q1]);
        if (g.kind == GateKind::MEASURE_Z) {
            if (!touched_later[i]) {
                deferred.emplace_back(m, g.q0);
            } else {
                std::vector<Branch> next;
                for (auto& b : branches) {
                    for (int bit = 0; bit < 2; ++bit) {
                        Branch nb{b.bits | (bit ? uint64_t{1} << m : 0), b.rho};
                        nb.rho.project(g.q0, bit);
                        if (nb.rho.trace() > 1e-300) next.push_back(std::move(nb));
                    }
                }
                branches.swap(next);
            }
            ++m;
            continue;
        }
        for (auto& b : branches) {
            if (g.kind == GateKind::RESET) b.rho.apply_channel(g.q0, reset);
            else if (is_unitary(g.kind)) b.rho.apply_unitary(g);
        }
        bool site = noise.placement == NoisePlacement::AfterEncoding ? g.kind == GateKind::NOISE : is_unitary(g.kind);
        if (site && !noise.noiseless()) {
            for (auto& b : branches) {
                noise_at(b.rho, orig0);
                if (is_two_qubit(g.kind)) noise_at(b.rho, orig1);
            }
        }
    }

    ExactDistribution out{circuit.num_measurements(), {}};
    const size_t dim = size_t{1} << n;
    for (const auto& b : branches) {
        for (size_t idx = 0; idx < dim; ++idx) {
            double p = b.rho.at(idx, idx).real();
            if (p <= 0) continue;
            uint64_t bits = b.bits;
            for (auto [mi, q] : deferred)
                if ((idx >> q) & 1) bits |= uint64_t{1} << mi;
            out.probs[bits] += p;
        }
    }
    return out;
}

/// Shots drawn from the exact distribution with a seeded stream.
inline ExecutionResult run_dense(const CliffordCircuit& circuit, const NoiseModel& noise, size_t shots, uint64_t seed,
                                 const DenseOptions& opt = {}) {
    auto dist = run_dense_exact(circuit, noise, opt);
    Rng rng = make_rng(seed, {0xde45e});
    return sample_distribution(dist, shots, rng);
}

}  // namespace qlego
