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

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "qlego/check_matrix.hpp"
#include "support/dense_oracle.hpp"

using namespace qlego;
namespace o = qlego::oracle;

static PauliOperator P(const char* s) { return PauliOperator::from_string(s); }

static PauliOperator random_pauli(size_t n, std::mt19937_64& rng, bool random_sign = true) {
    PauliOperator p(n);
    for (size_t q = 0; q < n; ++q) p.set(q, static_cast<PauliLetter>(rng() % 4));
    if (random_sign && (rng() & 1)) p.negate();
    return p;
}

TEST(Pauli, string_round_trip) {
    for (const char* s : {"+XZZXI", "-YY", "+I", "-IIZ"}) EXPECT_EQ(P(s).to_string(), s);
    EXPECT_EQ(P("XX").to_string(), "+XX");
    EXPECT_EQ(P("\xE2\x88\x92ZZ").to_string(), "-ZZ");
    EXPECT_THROW(P("+XQ"), ParseError);
}

TEST(Pauli, wide_operators_cross_word_boundary) {
    PauliOperator a(130), b(130);
    a.set(0, PauliLetter::X);
    a.set(129, PauliLetter::Z);
    b.set(129, PauliLetter::X);
    EXPECT_EQ(symplectic_product(a, b), 1);
    EXPECT_EQ(a.weight(), 2u);
    auto c = a * b;
    EXPECT_EQ(c.letter(129), PauliLetter::Y);
    EXPECT_EQ(c.letter(0), PauliLetter::X);
}

TEST(SymplecticProduct, examples) {
    EXPECT_EQ(symplectic_product(P("X"), P("Z")), 1);
    EXPECT_EQ(symplectic_product(P("XX"), P("ZZ")), 0);
    EXPECT_THROW(symplectic_product(P("X"), P("ZZ")), DimensionError);
}

TEST(SymplecticProduct, matches_dense_commutator) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        size_t n = 1 + rng() % 4;
        auto a = random_pauli(n, rng), b = random_pauli(n, rng);
        o::Mat ma = o::pauli_matrix(a), mb = o::pauli_matrix(b);
        bool dense_commute = o::max_abs_diff(ma * mb, mb * ma) < 1e-12;
        EXPECT_EQ(symplectic_product(a, b), dense_commute ? 0 : 1);
        EXPECT_EQ(symplectic_product(a, b), symplectic_product(b, a));
    }
}

TEST(Multiply, examples) {
    auto xz = P("X") * P("Z");
    EXPECT_EQ(xz.letter(0), PauliLetter::Y);
    EXPECT_EQ(xz.phase(), 3);  // XZ = -iY
    EXPECT_FALSE(xz.is_hermitian());
    auto sq = xz * xz;
    EXPECT_TRUE(sq.is_identity_letters());
    EXPECT_EQ(sq.sign(), -1);
    EXPECT_LT(o::max_abs_diff(o::pauli_matrix(sq), -o::Mat::Identity(2, 2)), 1e-12);

    for (const char* s : {"+XYZ", "-ZZI", "+YIY"}) {
        auto a = P(s);
        auto aa = a * a;
        EXPECT_TRUE(aa.is_identity_letters());
        EXPECT_EQ(aa.sign(), +1);
    }
    auto zx = P("+Z") * P("+X");
    auto xz2 = P("+X") * P("+Z");
    EXPECT_EQ(zx.letters(), xz2.letters());
    EXPECT_EQ((zx.phase() + 2) % 4, xz2.phase());
}

TEST(Multiply, dense_homomorphism_and_associativity) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        size_t n = 1 + rng() % 4;
        auto a = random_pauli(n, rng), b = random_pauli(n, rng), c = random_pauli(n, rng);
        EXPECT_LT(o::max_abs_diff(o::pauli_matrix(a * b), o::pauli_matrix(a) * o::pauli_matrix(b)), 1e-12);
        EXPECT_EQ((a * b) * c, a * (b * c));
    }
}

TEST(Rref, examples) {
    std::vector<PauliOperator> rows{P("+XX"), P("+ZZ"), P("-YY")};
    auto r = rref(rows);
    EXPECT_EQ(r.rank, 2u);
    EXPECT_FALSE(r.contains_nontrivial_identity);
    EXPECT_LT(o::max_abs_diff(o::group_projector(rows, 2), o::group_projector(r.basis, 2)), 1e-12);

    // +YY is inconsistent with XX and ZZ: XX*ZZ = -YY.
    auto bad = rref(std::vector<PauliOperator>{P("+XX"), P("+ZZ"), P("+YY")});
    EXPECT_TRUE(bad.contains_nontrivial_identity);

    auto id = rref(std::vector<PauliOperator>{P("+I")});
    EXPECT_EQ(id.rank, 0u);
    EXPECT_TRUE(id.basis.empty());
    EXPECT_EQ(rref(std::vector<PauliOperator>{}).rank, 0u);
}

TEST(Rref, canonical_pivots_x_block_first) {
    auto r = rref(std::vector<PauliOperator>{P("+ZZI"), P("+IXX"), P("+XXI")});
    ASSERT_EQ(r.rank, 3u);
    EXPECT_EQ(r.pivots, (std::vector<size_t>{0, 1, 3}));
    EXPECT_EQ(r.basis[0].letters(), "XIX");
}

// Enumerates the full group generated by commuting Hermitian rows as signed
// dense matrices and compares it to the group of the rref basis.
static std::set<std::string> dense_group(const std::vector<PauliOperator>& gens) {
    std::set<std::string> out;
    size_t m = gens.size();
    for (size_t mask = 0; mask < (size_t{1} << m); ++mask) {
        size_t n = gens.front().size();
        o::Mat acc = o::Mat::Identity(size_t{1} << n, size_t{1} << n);
        for (size_t i = 0; i < m; ++i)
            if ((mask >> i) & 1) acc = acc * o::pauli_matrix(gens[i]);
        std::ostringstream os;
        for (Eigen::Index r = 0; r < acc.rows(); ++r)
            for (Eigen::Index c = 0; c < acc.cols(); ++c)
                os << std::lround(acc(r, c).real()) << ',' << std::lround(acc(r, c).imag()) << ';';
        out.insert(os.str());
    }
    return out;
}

TEST(Rref, random_commuting_sets_preserve_group) {
    std::mt19937_64 rng(3);
    int checked = 0;
    while (checked < 60) {
        size_t n = 1 + rng() % 4;
        size_t m = 1 + rng() % (n + 1);
        std::vector<PauliOperator> rows;
        // Greedily collect commuting random rows (duplicates and products allowed).
        for (int tries = 0; tries < 40 && rows.size() < m; ++tries) {
            auto p = random_pauli(n, rng);
            bool ok = true;
            for (const auto& r : rows) ok &= commutes(r, p);
            if (ok) rows.push_back(p);
        }
        if (rows.empty()) continue;
        auto r = rref(rows);
        if (r.contains_nontrivial_identity) continue;
        if (r.rank == 0) continue;
        EXPECT_EQ(dense_group(rows), dense_group(r.basis));
        EXPECT_LT(o::max_abs_diff(o::group_projector(rows, n), o::group_projector(r.basis, n)), 1e-12);
        ++checked;
    }
}

TEST(CheckMatrix, text_round_trip_and_validation) {
    for (const auto& c : {five_qubit_code(), trivial_code(), two_qubit_bit_flip_code()}) {
        EXPECT_TRUE(is_valid(c)) << check_matrix_violation(c);
        auto text = to_text(c);
        auto back = check_matrix_from_text(text);
        EXPECT_EQ(back, c);
        EXPECT_EQ(to_text(back), text);
    }
    auto bad = five_qubit_code();
    bad.logical_z[0] = P("+ZIIII");
    EXPECT_FALSE(is_valid(bad));
    EXPECT_THROW(check_matrix_from_text("2 1\n+ZZ\n"), ParseError);
}

TEST(CheckMatrix, canonical_regeneration_keeps_invariants) {
    auto c = canonicalized(five_qubit_code());
    EXPECT_TRUE(is_valid(c)) << check_matrix_violation(c);
    EXPECT_LT(o::max_abs_diff(o::group_projector(c.stabilizers, 5), o::group_projector(five_qubit_code().stabilizers, 5)),
              1e-12);
}

TEST(Distance, examples) {
    EXPECT_EQ(distance_by_enumeration(five_qubit_code(), 5).distance, 3u);
    EXPECT_EQ(distance_by_enumeration(two_qubit_bit_flip_code(), 2).distance, 1u);
    EXPECT_EQ(distance_by_enumeration(trivial_code(), 1).distance, 1u);
    EXPECT_FALSE(distance_by_enumeration(five_qubit_code(), 2).distance.has_value());
    EXPECT_THROW(distance_by_enumeration(five_qubit_code(), 5, 100), BudgetExceeded);
}

// Independent check: brute force over all 4^5 Paulis with the dense commutant test.
TEST(Distance, five_qubit_code_brute_force) {
    auto code = five_qubit_code();
    std::vector<o::Mat> stabs;
    for (const auto& s : code.stabilizers) stabs.push_back(o::pauli_matrix(s));
    o::Mat proj = o::group_projector(code.stabilizers, 5);
    size_t best = 99;
    for (size_t idx = 1; idx < 1024; ++idx) {
        PauliOperator p(5);
        for (size_t q = 0; q < 5; ++q) p.set(q, static_cast<PauliLetter>((idx >> (2 * q)) & 3));
        if (p.weight() >= best) continue;
        o::Mat m = o::pauli_matrix(p);
        bool commute_all = true;
        for (const auto& s : stabs) commute_all &= o::max_abs_diff(m * s, s * m) < 1e-12;
        if (!commute_all) continue;
        // A stabilizer element acts as +-identity on the codespace.
        o::Mat restricted = proj * m * proj;
        bool trivial = o::max_abs_diff(restricted, proj) < 1e-9 || o::max_abs_diff(restricted, -proj) < 1e-9;
        if (!trivial) best = p.weight();
    }
    EXPECT_EQ(best, 3u);
}
