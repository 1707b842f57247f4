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

#include <optional>
#include <span>
#include <vector>

#include "qlego/pauli.hpp"

namespace qlego {

/// Column index in the symplectic layout: x-block columns 0..n-1, then z-block n..2n-1.
inline bool symplectic_bit(const PauliOperator& p, size_t column) {
    size_t n = p.size();
    return column < n ? p.x(column) : p.z(column - n);
}

struct RrefResult {
    /// Reduced generators, one per pivot, ordered by pivot column.
    std::vector<PauliOperator> basis;
    /// Symplectic pivot column of each basis row.
    std::vector<size_t> pivots;
    size_t rank = 0;
    /// Some product of the inputs reduced to a non-trivial multiple of I
    /// (-I for commuting Hermitian inputs), so the generated group is not a stabilizer group.
    bool contains_nontrivial_identity = false;
};

/// Reduced row echelon form of a set of Pauli generators over GF(2)^{2n}.
///
/// Pivots are searched column by column, x-block first, taking the lowest
/// remaining row index that has the bit set. Eliminations multiply the pivot
/// row in from the right, so signs follow the exact group product.
inline RrefResult rref(std::span<const PauliOperator> rows) {
    RrefResult out;
    if (rows.empty()) return out;
    size_t n = rows.front().size();
    std::vector<PauliOperator> m(rows.begin(), rows.end());
    for (const auto& r : m)
        if (r.size() != n) throw DimensionError("rref: rows have different qubit counts");

    size_t row = 0;
    for (size_t col = 0; col < 2 * n && row < m.size(); ++col) {
        size_t pivot = row;
        while (pivot < m.size() && !symplectic_bit(m[pivot], col)) ++pivot;
        if (pivot == m.size()) continue;
        if (pivot != row) std::swap(m[pivot], m[row]);
        for (size_t i = 0; i < m.size(); ++i) {
            if (i != row && symplectic_bit(m[i], col)) m[i] = multiply(m[i], m[row]);
        }
        out.pivots.push_back(col);
        ++row;
    }
    out.rank = row;
    for (size_t i = row; i < m.size(); ++i) {
        if (m[i].phase() != 0) out.contains_nontrivial_identity = true;
    }
    m.resize(row);
    out.basis = std::move(m);
    return out;
}

inline RrefResult rref(const std::vector<PauliOperator>& rows) { return rref(std::span<const PauliOperator>(rows)); }

/// Reduces `p` against an rref basis. The remainder has identity letters iff
/// p lies in the span; its phase then is the sign relating p to the group element.
inline PauliOperator reduce(const PauliOperator& p, const RrefResult& r) {
    PauliOperator rem = p;
    for (size_t i = 0; i < r.basis.size(); ++i) {
        if (symplectic_bit(rem, r.pivots[i])) rem = multiply(rem, r.basis[i]);
    }
    return rem;
}

/// True when the letters of p (ignoring sign) are generated by the basis.
inline bool in_span(const PauliOperator& p, const RrefResult& r) { return reduce(p, r).is_identity_letters(); }

/// Rank of a set of Pauli operators viewed as GF(2) vectors.
inline size_t gf2_rank(std::span<const PauliOperator> rows) { return rref(rows).rank; }

/// True when every pair commutes.
inline bool mutually_commuting(std::span<const PauliOperator> rows) {
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = i + 1; j < rows.size(); ++j)
            if (symplectic_product(rows[i], rows[j])) return false;
    return true;
}

}  // namespace qlego
