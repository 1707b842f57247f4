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
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "qlego/error.hpp"

namespace qlego {

enum class NoisePlacement { AfterEncoding, PerGate };

/// How a relaxation delta is realised: the discrete single-qubit map applied
/// directly, or the auxiliary-qubit partial-swap gadget inserted into the circuit.
enum class RelaxationMode { Kraus, Gadget };

struct PauliProbs {
    double px = 0, py = 0, pz = 0;

    double total() const { return px + py + pz; }
    bool zero() const { return px == 0 && py == 0 && pz == 0; }
    friend bool operator==(const PauliProbs&, const PauliProbs&) = default;
};

/// Pauli channel probabilities (a default plus per-qubit overrides), an
/// optional relaxation strength delta, and where noise is applied.
///
/// With after_encoding placement noise acts at NOISE markers in the circuit;
/// with per_gate it acts on the operands after every unitary gate. At each
/// location the Pauli channel comes first, then relaxation.
struct NoiseModel {
    PauliProbs pauli;
    std::map<uint32_t, PauliProbs> per_qubit;
    std::optional<double> relaxation_delta;
    NoisePlacement placement = NoisePlacement::AfterEncoding;
    RelaxationMode relaxation_mode = RelaxationMode::Kraus;

    static NoiseModel isotropic(double p) {
        NoiseModel m;
        m.pauli = {p, p, p};
        m.validate();
        return m;
    }

    const PauliProbs& probs(uint32_t q) const {
        auto it = per_qubit.find(q);
        return it == per_qubit.end() ? pauli : it->second;
    }

    bool has_pauli() const {
        if (!pauli.zero()) return true;
        for (const auto& [q, p] : per_qubit)
            if (!p.zero()) return true;
        return false;
    }

    bool has_relaxation() const { return relaxation_delta.has_value() && *relaxation_delta > 0; }
    bool noiseless() const { return !has_pauli() && !has_relaxation(); }

    void validate() const {
        auto check = [](const PauliProbs& p, const std::string& where) {
            for (double v : {p.px, p.py, p.pz})
                if (!(v >= 0 && v <= 1)) throw DomainError("noise: probability out of [0,1] in " + where);
            if (p.total() > 1 + 1e-12) throw DomainError("noise: probabilities sum above 1 in " + where);
        };
        check(pauli, "default channel");
        for (const auto& [q, p] : per_qubit) check(p, "qubit " + std::to_string(q));
        if (relaxation_delta && !(*relaxation_delta >= 0 && *relaxation_delta <= 1))
            throw DomainError("noise: delta must lie in [0,1]");
    }

    /// Gamma t for the relaxation strength: 2 log(1 / (1 - delta)).
    std::optional<double> gamma_t() const {
        if (!relaxation_delta) return std::nullopt;
        return 2.0 * std::log(1.0 / (1.0 - *relaxation_delta));
    }

    /// Same model with per-qubit overrides relabelled through placement[q].
    template <class Map>
    NoiseModel remapped(const Map& placement) const {
        NoiseModel m = *this;
        m.per_qubit.clear();
        for (const auto& [q, p] : per_qubit) m.per_qubit[static_cast<uint32_t>(placement.at(q))] = p;
        return m;
    }

    friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

namespace detail {
inline std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}
}  // namespace detail

/// Canonical spec string; parse_noise_spec(to_spec(m)) == m.
inline std::string to_spec(const NoiseModel& m) {
    using detail::format_double;
    std::ostringstream os;
    os << "px=" << format_double(m.pauli.px) << ",py=" << format_double(m.pauli.py)
       << ",pz=" << format_double(m.pauli.pz);
    for (const auto& [q, p] : m.per_qubit)
        os << ",q" << q << ".px=" << format_double(p.px) << ",q" << q << ".py=" << format_double(p.py) << ",q" << q
           << ".pz=" << format_double(p.pz);
    if (m.relaxation_delta) {
        os << ",delta=" << format_double(*m.relaxation_delta);
        os << ",relax=" << (m.relaxation_mode == RelaxationMode::Kraus ? "kraus" : "gadget");
    }
    os << ",placement=" << (m.placement == NoisePlacement::AfterEncoding ? "after_encoding" : "per_gate");
    return os.str();
}

/// Comma-separated key=value list. Keys: p (all three Paulis), px, py, pz,
/// qN.p / qN.px / qN.py / qN.pz (override for qubit N, starting from the
/// default channel), delta, gamma_t, relax=kraus|gadget,
/// placement=after_encoding|per_gate. "none" or "" is noiseless.
inline NoiseModel parse_noise_spec(const std::string& spec) {
    NoiseModel m;
    if (spec.empty() || spec == "none") return m;
    std::map<uint32_t, PauliProbs> overrides;
    std::map<uint32_t, std::map<char, double>> raw;
    std::istringstream is(spec);
    std::string item;
    auto number = [&](const std::string& v, const std::string& key) {
        try {
            size_t used = 0;
            double d = std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return d;
        } catch (const std::exception&) {
            throw ParseError("noise spec: bad number '" + v + "' for " + key);
        }
    };
    while (std::getline(is, item, ',')) {
        while (!item.empty() && item.front() == ' ') item.erase(item.begin());
        while (!item.empty() && item.back() == ' ') item.pop_back();
        if (item.empty()) continue;
        auto eq = item.find('=');
        if (eq == std::string::npos) throw ParseError("noise spec: expected key=value, got '" + item + "'");
        std::string key = item.substr(0, eq), val = item.substr(eq + 1);
        if (key == "p") {
            double p = number(val, key);
            m.pauli = {p, p, p};
        } else if (key == "px") {
            m.pauli.px = number(val, key);
        } else if (key == "py") {
            m.pauli.py = number(val, key);
        } else if (key == "pz") {
            m.pauli.pz = number(val, key);
        } else if (key == "delta") {
            m.relaxation_delta = number(val, key);
        } else if (key == "gamma_t") {
            double gt = number(val, key);
            if (gt < 0) throw DomainError("noise spec: gamma_t must be nonnegative");
            m.relaxation_delta = 1.0 - std::exp(-gt / 2.0);
        } else if (key == "relax") {
            if (val == "kraus") m.relaxation_mode = RelaxationMode::Kraus;
            else if (val == "gadget") m.relaxation_mode = RelaxationMode::Gadget;
            else throw ParseError("noise spec: relax must be kraus or gadget");
        } else if (key == "placement") {
            if (val == "after_encoding") m.placement = NoisePlacement::AfterEncoding;
            else if (val == "per_gate") m.placement = NoisePlacement::PerGate;
            else throw ParseError("noise spec: placement must be after_encoding or per_gate");
        } else if (key.size() > 2 && key[0] == 'q' && key.find('.') != std::string::npos) {
            auto dot = key.find('.');
            uint32_t q = 0;
            try {
                size_t used = 0;
                q = static_cast<uint32_t>(std::stoul(key.substr(1, dot - 1), &used));
                if (used != dot - 1) throw std::invalid_argument(key);
            } catch (const std::exception&) {
                throw ParseError("noise spec: bad qubit in '" + key + "'");
            }
            std::string sub = key.substr(dot + 1);
            double v = number(val, key);
            if (sub == "p") raw[q]['x'] = raw[q]['y'] = raw[q]['z'] = v;
            else if (sub == "px") raw[q]['x'] = v;
            else if (sub == "py") raw[q]['y'] = v;
            else if (sub == "pz") raw[q]['z'] = v;
            else throw ParseError("noise spec: unknown key '" + key + "'");
        } else {
            throw ParseError("noise spec: unknown key '" + key + "'");
        }
    }
    for (const auto& [q, vals] : raw) {
        PauliProbs p = m.pauli;
        for (const auto& [c, v] : vals) (c == 'x' ? p.px : c == 'y' ? p.py : p.pz) = v;
        m.per_qubit[q] = p;
    }
    m.validate();
    return m;
}

}  // namespace qlego
