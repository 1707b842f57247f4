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

// Dense-matrix reference implementations used only by tests. Nothing here
// calls into the stabilizer algebra it is meant to check: operators are built
// entry by entry from 2x2 Pauli matrices.

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>
#include <complex>
#include <random>
#include <string>
#include <vector>

#include "qlego/circuit.hpp"
#include "qlego/pauli.hpp"

namespace qlego::oracle {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Eigen::Matrix2cd letter_matrix(char c) {
    Eigen::Matrix2cd m;
    switch (c) {
        case 'I': m << 1, 0, 0, 1; break;
        case 'X': m << 0, 1, 1, 0; break;
        case 'Y': m << 0, cd(0, -1), cd(0, 1), 0; break;
        case 'Z': m << 1, 0, 0, -1; break;
        default: throw std::invalid_argument("letter_matrix");
    }
    return m;
}

/// Dense 2^n x 2^n matrix of a Pauli operator; qubit q is bit q of the basis index.
inline Mat pauli_matrix(const PauliOperator& p) {
    size_t n = p.size();
    size_t dim = size_t{1} << n;
    static const cd kPhase[4] = {cd(1, 0), cd(0, 1), cd(-1, 0), cd(0, -1)};
    std::string letters = p.letters();
    Mat m = Mat::Zero(dim, dim);
    for (size_t r = 0; r < dim; ++r) {
        for (size_t c = 0; c < dim; ++c) {
            cd v = kPhase[p.phase()];
            for (size_t q = 0; q < n && v != cd(0); ++q) v *= letter_matrix(letters[q])((r >> q) & 1, (c >> q) & 1);
            m(r, c) = v;
        }
    }
    return m;
}

/// Product over generators of (I + g) / 2.
inline Mat group_projector(const std::vector<PauliOperator>& gens, size_t n) {
    size_t dim = size_t{1} << n;
    Mat proj = Mat::Identity(dim, dim);
    for (const auto& g : gens) proj = proj * (Mat::Identity(dim, dim) + pauli_matrix(g)) * 0.5;
    return proj;
}

/// Normalized state in the range of a rank-one projector.
inline Vec state_from_projector(const Mat& proj) {
    Eigen::Index best = 0;
    double best_norm = -1;
    for (Eigen::Index c = 0; c < proj.cols(); ++c) {
        double nn = proj.col(c).norm();
        if (nn > best_norm) {
            best_norm = nn;
            best = c;
        }
    }
    Vec v = proj.col(best);
    return v / v.norm();
}

/// Applies <Phi+| (unnormalized, sum_i <ii|) to legs a and b of an n-leg state.
inline Vec bell_project(const Vec& psi, size_t n, size_t a, size_t b) {
    size_t m = n - 2;
    Vec out = Vec::Zero(Eigen::Index(1) << m);
    for (size_t idx = 0; idx < (size_t{1} << n); ++idx) {
        if (((idx >> a) & 1) != ((idx >> b) & 1)) continue;
        size_t o = 0, bit = 0;
        for (size_t q = 0; q < n; ++q) {
            if (q == a || q == b) continue;
            o |= ((idx >> q) & 1) << bit++;
        }
        out(o) += psi(idx);
    }
    return out;
}

/// Kronecker product with `first` on the low qubits.
inline Vec tensor_states(const Vec& first, size_t n_first, const Vec& second) {
    Vec out(first.size() * second.size());
    for (Eigen::Index j = 0; j < second.size(); ++j)
        for (Eigen::Index i = 0; i < first.size(); ++i) out(i + (j << n_first)) = first(i) * second(j);
    return out;
}

inline double max_abs_diff(const Mat& a, const Mat& b) { return (a - b).cwiseAbs().maxCoeff(); }


/// Dense matrix of a one- or two-qubit gate on the local basis (operand 0 = low bit).
inline Mat gate_matrix(const Gate& g) {
    const cd i(0, 1);
    const double r = 1.0 / std::sqrt(2.0);
    Mat m;
    switch (g.kind) {
        case GateKind::H: m = Mat(2, 2); m << r, r, r, -r; break;
        case GateKind::S: m = Mat(2, 2); m << 1, 0, 0, i; break;
        case GateKind::S_DAG: m = Mat(2, 2); m << 1, 0, 0, -i; break;
        case GateKind::X: m = letter_matrix('X'); break;
        case GateKind::Y: m = letter_matrix('Y'); break;
        case GateKind::Z: m = letter_matrix('Z'); break;
        case GateKind::CX:
            m = Mat::Zero(4, 4);
            m(0, 0) = m(2, 2) = 1;  // control bit 0 clear
            m(3, 1) = m(1, 3) = 1;
            break;
        case GateKind::CZ: m = Mat::Identity(4, 4); m(3, 3) = -1; break;
        case GateKind::SWAP:
            m = Mat::Zero(4, 4);
            m(0, 0) = m(3, 3) = m(1, 2) = m(2, 1) = 1;
            break;
        case GateKind::PSWAP: {
            Mat xx = Eigen::kroneckerProduct(letter_matrix('X'), letter_matrix('X'));
            Mat yy = Eigen::kroneckerProduct(letter_matrix('Y'), letter_matrix('Y'));
            Mat gen = cd(0, -g.param) * (xx + yy);
            m = gen.exp();
            break;
        }
        default: throw std::invalid_argument("gate_matrix: not unitary");
    }
    return m;
}

/// Applies a unitary gate to an n-qubit state vector.
inline Vec apply_gate(const Vec& psi, size_t n, const Gate& g) {
    Mat u = gate_matrix(g);
    std::vector<size_t> ops{g.q0};
    if (is_two_qubit(g.kind)) ops.push_back(g.q1);
    size_t k = ops.size();
    Vec out = Vec::Zero(psi.size());
    for (size_t idx = 0; idx < (size_t{1} << n); ++idx) {
        size_t local = 0;
        for (size_t j = 0; j < k; ++j) local |= ((idx >> ops[j]) & 1) << j;
        for (size_t lo = 0; lo < (size_t{1} << k); ++lo) {
            cd a = u(lo, local);
            if (a == cd(0)) continue;
            size_t dst = idx;
            for (size_t j = 0; j < k; ++j) dst = (dst & ~(size_t{1} << ops[j])) | (((lo >> j) & 1) << ops[j]);
            out(dst) += a * psi(idx);
        }
    }
    return out;
}

/// |0...0> evolved by the unitary part of a circuit.
inline Vec run_unitary(const CliffordCircuit& c) {
    Vec psi = Vec::Zero(Eigen::Index(1) << c.num_qubits());
    psi(0) = 1;
    for (const auto& g : c.gates()) psi = apply_gate(psi, c.num_qubits(), g);
    return psi;
}

}  // namespace qlego::oracle
