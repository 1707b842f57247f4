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

#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qlego/error.hpp"

namespace qlego {

enum class PauliLetter : uint8_t { I = 0, X = 1, Z = 2, Y = 3 };

inline char letter_char(PauliLetter p) {
    switch (p) {
        case PauliLetter::I: return 'I';
        case PauliLetter::X: return 'X';
        case PauliLetter::Y: return 'Y';
        case PauliLetter::Z: return 'Z';
    }
    return '?';
}

/// Signed n-qubit Pauli operator.
///
/// The operator is i^phase * P_0 (x) P_1 (x) ... where each P_q is one of the
/// Hermitian letters I, X, Y, Z selected by (x_q, z_q); Y is the pair (1, 1)
/// with Y = iXZ. Qubit q lives in bit (q % 64) of word (q / 64).
///
/// Only phases 0 and 2 (signs +1 and -1) are Hermitian. Products of commuting
/// Hermitian operators stay Hermitian; odd phases appear only transiently when
/// multiplying anticommuting operators and are rejected at text boundaries.
class PauliOperator {
  public:
    PauliOperator() = default;
    explicit PauliOperator(size_t n) : n_(n), x_(num_words(n), 0), z_(num_words(n), 0) {}

    /// Parses "+XZZXI", "-YY" or an unsigned "XX". Accepts ASCII '-' and U+2212.
    static PauliOperator from_string(std::string_view text) {
        int sign = +1;
        if (text.starts_with("\xE2\x88\x92")) {
            sign = -1;
            text.remove_prefix(3);
        } else if (!text.empty() && (text.front() == '+' || text.front() == '-')) {
            sign = text.front() == '-' ? -1 : +1;
            text.remove_prefix(1);
        }
        PauliOperator p(text.size());
        for (size_t q = 0; q < text.size(); ++q) {
            switch (text[q]) {
                case 'I': case '_': break;
                case 'X': p.set(q, PauliLetter::X); break;
                case 'Y': p.set(q, PauliLetter::Y); break;
                case 'Z': p.set(q, PauliLetter::Z); break;
                default:
                    throw ParseError("invalid Pauli character '" + std::string(1, text[q]) + "' in '" +
                                     std::string(text) + "'");
            }
        }
        if (sign < 0) p.phase_ = 2;
        return p;
    }

    static PauliOperator single(size_t n, size_t q, PauliLetter letter) {
        PauliOperator p(n);
        p.set(q, letter);
        return p;
    }

    size_t size() const { return n_; }

    bool x(size_t q) const { return (x_[q >> 6] >> (q & 63)) & 1; }
    bool z(size_t q) const { return (z_[q >> 6] >> (q & 63)) & 1; }

    PauliLetter letter(size_t q) const {
        return static_cast<PauliLetter>(static_cast<uint8_t>(x(q)) | (static_cast<uint8_t>(z(q)) << 1));
    }

    /// Overwrites the letter on qubit q without touching the phase.
    void set(size_t q, PauliLetter letter) {
        check_index(q);
        uint64_t mask = uint64_t{1} << (q & 63);
        auto code = static_cast<uint8_t>(letter);
        x_[q >> 6] = (code & 1) ? (x_[q >> 6] | mask) : (x_[q >> 6] & ~mask);
        z_[q >> 6] = (code & 2) ? (z_[q >> 6] | mask) : (z_[q >> 6] & ~mask);
    }

    void set_bits(size_t q, bool xb, bool zb) {
        set(q, static_cast<PauliLetter>(static_cast<uint8_t>(xb) | (static_cast<uint8_t>(zb) << 1)));
    }

    uint8_t phase() const { return phase_; }
    void set_phase(uint8_t phase) { phase_ = phase & 3; }
    bool is_hermitian() const { return (phase_ & 1) == 0; }

    /// +1 or -1. Throws on the non-Hermitian phases +-i.
    int sign() const {
        if (!is_hermitian()) throw DomainError("Pauli operator " + to_string() + " has an imaginary phase");
        return phase_ == 0 ? +1 : -1;
    }
    void set_sign(int sign) { phase_ = sign < 0 ? 2 : 0; }
    void negate() { phase_ = (phase_ + 2) & 3; }

    PauliOperator operator-() const {
        PauliOperator r = *this;
        r.negate();
        return r;
    }

    size_t weight() const {
        size_t w = 0;
        for (size_t i = 0; i < x_.size(); ++i) w += std::popcount(x_[i] | z_[i]);
        return w;
    }

    /// True when every letter is I (the phase is ignored).
    bool is_identity_letters() const {
        for (size_t i = 0; i < x_.size(); ++i)
            if (x_[i] | z_[i]) return false;
        return true;
    }

    std::span<const uint64_t> x_words() const { return x_; }
    std::span<const uint64_t> z_words() const { return z_; }

    /// Letters on the listed qubits, in the listed order. The phase is kept.
    PauliOperator restricted(std::span<const size_t> qubits) const {
        PauliOperator r(qubits.size());
        for (size_t i = 0; i < qubits.size(); ++i) r.set(i, letter(qubits[i]));
        r.phase_ = phase_;
        return r;
    }

    /// Appends `extra` identity qubits.
    PauliOperator extended(size_t extra) const {
        PauliOperator r(n_ + extra);
        for (size_t q = 0; q < n_; ++q) r.set(q, letter(q));
        r.phase_ = phase_;
        return r;
    }

    /// this (x) other, phases multiplied.
    PauliOperator tensor(const PauliOperator& other) const {
        PauliOperator r(n_ + other.n_);
        for (size_t q = 0; q < n_; ++q) r.set(q, letter(q));
        for (size_t q = 0; q < other.n_; ++q) r.set(n_ + q, other.letter(q));
        r.phase_ = (phase_ + other.phase_) & 3;
        return r;
    }

    std::string letters() const {
        std::string s(n_, 'I');
        for (size_t q = 0; q < n_; ++q) s[q] = letter_char(letter(q));
        return s;
    }

    std::string to_string() const {
        static constexpr const char* kPrefix[4] = {"+", "+i", "-", "-i"};
        return kPrefix[phase_] + letters();
    }

    friend bool operator==(const PauliOperator& a, const PauliOperator& b) = default;

    /// Lexicographic order on (letters, phase) used for canonical sorting.
    friend bool operator<(const PauliOperator& a, const PauliOperator& b) {
        if (a.n_ != b.n_) return a.n_ < b.n_;
        if (a.x_ != b.x_) return a.x_ < b.x_;
        if (a.z_ != b.z_) return a.z_ < b.z_;
        return a.phase_ < b.phase_;
    }

    friend PauliOperator multiply(const PauliOperator& a, const PauliOperator& b);
    friend int symplectic_product(const PauliOperator& a, const PauliOperator& b);

    /// In-place right multiplication, this <- this * rhs.
    PauliOperator& operator*=(const PauliOperator& rhs) {
        *this = multiply(*this, rhs);
        return *this;
    }

  private:
    static size_t num_words(size_t n) { return (n + 63) / 64; }
    void check_index(size_t q) const {
        if (q >= n_) throw DimensionError("qubit index " + std::to_string(q) + " out of range for " +
                                          std::to_string(n_) + "-qubit Pauli");
    }

    size_t n_ = 0;
    std::vector<uint64_t> x_;
    std::vector<uint64_t> z_;
    uint8_t phase_ = 0;
};

/// 0 if a and b commute, 1 if they anticommute.
inline int symplectic_product(const PauliOperator& a, const PauliOperator& b) {
    if (a.n_ != b.n_)
        throw DimensionError("symplectic_product: " + std::to_string(a.n_) + " vs " + std::to_string(b.n_) +
                             " qubits");
    uint64_t acc = 0;
    for (size_t i = 0; i < a.x_.size(); ++i) acc ^= (a.x_[i] & b.z_[i]) ^ (a.z_[i] & b.x_[i]);
    return std::popcount(acc) & 1;
}

inline bool commutes(const PauliOperator& a, const PauliOperator& b) { return symplectic_product(a, b) == 0; }

/// Exact group product a * b, including the i^k phase.
inline PauliOperator multiply(const PauliOperator& a, const PauliOperator& b) {
    if (a.n_ != b.n_)
        throw DimensionError("multiply: " + std::to_string(a.n_) + " vs " + std::to_string(b.n_) + " qubits");
    PauliOperator r(a.n_);
    int log_i = a.phase_ + b.phase_;
    for (size_t i = 0; i < a.x_.size(); ++i) {
        uint64_t x1 = a.x_[i], z1 = a.z_[i], x2 = b.x_[i], z2 = b.z_[i];
        uint64_t is_x1 = x1 & ~z1, is_y1 = x1 & z1, is_z1 = ~x1 & z1;
        uint64_t is_x2 = x2 & ~z2, is_y2 = x2 & z2, is_z2 = ~x2 & z2;
        // XY = iZ, YZ = iX, ZX = iY and the reversed orders pick up -i.
        uint64_t plus = (is_x1 & is_y2) | (is_y1 & is_z2) | (is_z1 & is_x2);
        uint64_t minus = (is_x1 & is_z2) | (is_y1 & is_x2) | (is_z1 & is_y2);
        log_i += std::popcount(plus) - std::popcount(minus);
        r.x_[i] = x1 ^ x2;
        r.z_[i] = z1 ^ z2;
    }
    r.phase_ = static_cast<uint8_t>(((log_i % 4) + 4) % 4);
    return r;
}

inline PauliOperator operator*(const PauliOperator& a, const PauliOperator& b) { return multiply(a, b); }

}  // namespace qlego
