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

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qlego/gf2.hpp"

namespace qlego {

/// Stabilizer code [[n, k]]: n - k stabilizer generators and k logical X/Z pairs.
struct CheckMatrix {
    size_t n = 0;
    size_t k = 0;
    std::vector<PauliOperator> stabilizers;
    std::vector<PauliOperator> logical_x;
    std::vector<PauliOperator> logical_z;

    friend bool operator==(const CheckMatrix&, const CheckMatrix&) = default;
};

/// Empty string when all invariants hold, otherwise the first violation found.
inline std::string check_matrix_violation(const CheckMatrix& c) {
    if (c.k > c.n) return "k exceeds n";
    if (c.stabilizers.size() != c.n - c.k) return "expected n-k stabilizers";
    if (c.logical_x.size() != c.k || c.logical_z.size() != c.k) return "expected k logical pairs";
    auto sized = [&](const std::vector<PauliOperator>& v) {
        for (const auto& p : v)
            if (p.size() != c.n || !p.is_hermitian()) return false;
        return true;
    };
    if (!sized(c.stabilizers) || !sized(c.logical_x) || !sized(c.logical_z))
        return "operator with wrong length or imaginary phase";
    if (!mutually_commuting(c.stabilizers)) return "stabilizers do not commute";
    auto r = rref(c.stabilizers);
    if (r.rank != c.stabilizers.size()) return "stabilizers are linearly dependent";
    if (r.contains_nontrivial_identity) return "stabilizer group contains -I";
    for (size_t i = 0; i < c.k; ++i) {
        for (const auto& s : c.stabilizers) {
            if (symplectic_product(s, c.logical_x[i]) || symplectic_product(s, c.logical_z[i]))
                return "logical operator anticommutes with a stabilizer";
        }
        for (size_t j = 0; j < c.k; ++j) {
            if (symplectic_product(c.logical_x[i], c.logical_z[j]) != (i == j ? 1 : 0))
                return "logical X/Z pairing violated";
            if (i != j && (symplectic_product(c.logical_x[i], c.logical_x[j]) ||
                           symplectic_product(c.logical_z[i], c.logical_z[j])))
                return "logical operators of different pairs anticommute";
        }
    }
    return {};
}

inline bool is_valid(const CheckMatrix& c) { return check_matrix_violation(c).empty(); }

inline void validate(const CheckMatrix& c) {
    if (auto why = check_matrix_violation(c); !why.empty()) throw DomainError("invalid check matrix: " + why);
}

/// Same code with the stabilizer generators replaced by their rref basis.
inline CheckMatrix canonicalized(const CheckMatrix& c) {
    CheckMatrix out = c;
    out.stabilizers = rref(c.stabilizers).basis;
    return out;
}

// Text format:
//   n k
//   STAB
//   +XZZXI
//   ...
//   LOGX
//   ...
//   LOGZ
//   ...
inline std::string to_text(const CheckMatrix& c) {
    std::ostringstream os;
    os << c.n << ' ' << c.k << '\n';
    os << "STAB\n";
    for (const auto& p : c.stabilizers) os << p.to_string() << '\n';
    os << "LOGX\n";
    for (const auto& p : c.logical_x) os << p.to_string() << '\n';
    os << "LOGZ\n";
    for (const auto& p : c.logical_z) os << p.to_string() << '\n';
    return os.str();
}

inline CheckMatrix check_matrix_from_text(const std::string& text) {
    std::istringstream is(text);
    CheckMatrix c;
    std::string line;
    bool have_header = false;
    std::vector<PauliOperator>* section = nullptr;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        if (!have_header) {
            std::istringstream hs(line);
            if (!(hs >> c.n >> c.k)) throw ParseError("check matrix: expected header 'n k', got '" + line + "'");
            have_header = true;
            continue;
        }
        if (line == "STAB") section = &c.stabilizers;
        else if (line == "LOGX") section = &c.logical_x;
        else if (line == "LOGZ") section = &c.logical_z;
        else {
            if (section == nullptr) throw ParseError("check matrix: operator before any section: '" + line + "'");
            auto p = PauliOperator::from_string(line);
            if (p.size() != c.n) throw ParseError("check matrix: operator '" + line + "' does not have n qubits");
            section->push_back(std::move(p));
        }
    }
    if (!have_header) throw ParseError("check matrix: empty input");
    return c;
}

inline CheckMatrix load_check_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open code file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return check_matrix_from_text(ss.str());
}

/// Identity code on one qubit: no stabilizers, logicals X and Z.
inline CheckMatrix trivial_code() {
    return CheckMatrix{1, 1, {}, {PauliOperator::from_string("+X")}, {PauliOperator::from_string("+Z")}};
}

/// [[5,1,3]] with stabilizers XZZXI and its cyclic shifts.
inline CheckMatrix five_qubit_code() {
    CheckMatrix c;
    c.n = 5;
    c.k = 1;
    for (const char* s : {"+XZZXI", "+IXZZX", "+XIXZZ", "+ZXIXZ"}) c.stabilizers.push_back(PauliOperator::from_string(s));
    c.logical_x.push_back(PauliOperator::from_string("+XXXXX"));
    c.logical_z.push_back(PauliOperator::from_string("+ZZZZZ"));
    return c;
}

/// Two-qubit bit-flip code: stabilizer ZZ, logical X = XX, Z = ZI.
inline CheckMatrix two_qubit_bit_flip_code() {
    return CheckMatrix{2, 1, {PauliOperator::from_string("+ZZ")}, {PauliOperator::from_string("+XX")},
                       {PauliOperator::from_string("+ZI")}};
}

struct DistanceResult {
    /// Minimum weight found, or nullopt when the distance exceeds max_weight.
    std::optional<size_t> distance;
    size_t candidates_checked = 0;
};

/// Smallest weight of a Pauli that commutes with every stabilizer without
/// belonging to the stabilizer group (signs ignored), searched up to max_weight.
///
/// Throws BudgetExceeded before starting a weight class whose candidate count
/// would push the total past `budget`.
inline DistanceResult distance_by_enumeration(const CheckMatrix& code, size_t max_weight, size_t budget = 50'000'000) {
    validate(code);
    if (max_weight < 1) throw DomainError("distance_by_enumeration: max_weight must be >= 1");
    auto group = rref(code.stabilizers);
    DistanceResult out;
    size_t n = code.n;
    size_t limit = std::min(max_weight, n);
    for (size_t w = 1; w <= limit; ++w) {
        // C(n, w) * 3^w candidates of exactly this weight.
        long double count = 1;
        for (size_t i = 0; i < w; ++i) count = count * static_cast<long double>(n - i) / static_cast<long double>(i + 1);
        for (size_t i = 0; i < w; ++i) count *= 3;
        if (static_cast<long double>(out.candidates_checked) + count > static_cast<long double>(budget))
            throw BudgetExceeded("distance_by_enumeration: weight " + std::to_string(w) + " needs more than " +
                                 std::to_string(budget) + " candidates");
        std::vector<size_t> support(w);
        for (size_t i = 0; i < w; ++i) support[i] = i;
        while (true) {
            std::vector<uint8_t> letters(w, 1);
            while (true) {
                PauliOperator p(n);
                for (size_t i = 0; i < w; ++i) p.set(support[i], static_cast<PauliLetter>(letters[i]));
                ++out.candidates_checked;
                bool centralizes = true;
                for (const auto& s : code.stabilizers) {
                    if (symplectic_product(s, p)) {
                        centralizes = false;
                        break;
                    }
                }
                if (centralizes && !in_span(p, group)) {
                    out.distance = w;
                    return out;
                }
                size_t i = 0;
                while (i < w && letters[i] == 3) letters[i++] = 1;
                if (i == w) break;
                ++letters[i];
            }
            // next combination
            size_t i = w;
            while (i > 0 && support[i - 1] == n - w + i - 1) --i;
            if (i == 0) break;
            ++support[i - 1];
            for (size_t j = i; j < w; ++j) support[j] = support[j - 1] + 1;
        }
    }
    return out;
}

}  // namespace qlego
