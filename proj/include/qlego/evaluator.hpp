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
#include <array>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qlego/backend.hpp"
#include "qlego/fidelity.hpp"
#include "qlego/synthesis.hpp"

namespace qlego {

using Json = nlohmann::ordered_json;

struct PreparedState {
    PauliLetter basis = PauliLetter::Z;
    int sign = 1;
    friend bool operator==(const PreparedState&, const PreparedState&) = default;
};

inline PauliLetter letter_from_char(char c) {
    switch (c) {
        case 'I': return PauliLetter::I;
        case 'X': return PauliLetter::X;
        case 'Y': return PauliLetter::Y;
        case 'Z': return PauliLetter::Z;
        default: throw ParseError(std::string("bad Pauli letter '") + c + "'");
    }
}

inline std::string to_string(const PreparedState& s) { return std::string(s.sign > 0 ? "+" : "-") + letter_char(s.basis); }

/// The default preparation set: +-X, +-Y, +-Z.
inline std::vector<PreparedState> six_states() {
    std::vector<PreparedState> v;
    for (auto b : {PauliLetter::X, PauliLetter::Y, PauliLetter::Z})
        for (int s : {1, -1}) v.push_back({b, s});
    return v;
}

/// Three positive eigenstates only, as in the two-qubit worked example.
inline std::vector<PreparedState> three_states() {
    return {{PauliLetter::X, 1}, {PauliLetter::Y, 1}, {PauliLetter::Z, 1}};
}

/// Encoder, noise slot, syndrome extraction and logical readout for one
/// prepared state. Measurements: syndrome bits 0..m-1, then the logical bit.
struct ProtocolCircuit {
    CliffordCircuit circuit;
    size_t num_syndrome = 0;
    int readout_sign = 1;
    NoiseModel noise;
};

inline ProtocolCircuit build_protocol(const CheckMatrix& code, const PreparedState& state, const NoiseModel& noise,
                                      const CouplingGraph* layout = nullptr) {
    validate(code);
    const size_t m = code.stabilizers.size();
    CliffordCircuit c(code.n + m);
    c.append_circuit(synthesize_encoder(code, state.basis, state.sign));
    for (uint32_t q = 0; q < code.n; ++q) c.noise(q);
    c.append_circuit(syndrome_extraction_logical(code));
    auto ro = synthesize_logical_readout(code, state.basis);
    c.append_circuit(ro.circuit);
    ProtocolCircuit p{std::move(c), m, ro.sign, noise};
    if (layout) {
        auto placement = place_qubits(code, *layout);
        p.circuit = route(p.circuit, *layout, placement);
        p.noise = noise.remapped(placement);
    }
    return p;
}

struct ShotRecord {
    PauliLetter basis = PauliLetter::Z;
    int sign_in = 1;
    std::string syndrome;
    int sign_out = 1;
    double weight = 1.0;

    bool syndrome_zero() const { return syndrome.find('1') == std::string::npos; }
    /// (p_in, 0, p_in): no syndrome and the prepared eigenvalue came back.
    bool error_free() const { return syndrome_zero() && sign_out == sign_in; }
    friend bool operator==(const ShotRecord&, const ShotRecord&) = default;
};

inline ShotRecord record_from_bits(uint64_t bits, const ProtocolCircuit& p, const PreparedState& s, double weight) {
    ShotRecord r{s.basis, s.sign, std::string(p.num_syndrome, '0'), 1, weight};
    for (size_t i = 0; i < p.num_syndrome; ++i)
        if ((bits >> i) & 1) r.syndrome[i] = '1';
    bool logical = (bits >> p.num_syndrome) & 1;
    r.sign_out = p.readout_sign * (logical ? -1 : 1);
    return r;
}

struct StateRun {
    PreparedState state;
    GateCounts counts;
    size_t first = 0, last = 0;  // record range [first, last)
};

struct ProtocolRun {
    std::vector<ShotRecord> records;
    std::vector<StateRun> states;
    size_t shots_per_state = 0;
    bool exact = false;
};

struct ProtocolOptions {
    size_t shots = 10000;
    uint64_t seed = 0;
    bool exact = false;
    std::vector<PreparedState> states = six_states();
};

/// Runs the protocol for every prepared state on a backend. Sampled mode
/// gives one record per shot; exact mode gives one record per distinct
/// outcome with weight probability * shots-per-state. The backend's coupling
/// graph, if any, is used for routing.
inline ProtocolRun run_protocol(const CheckMatrix& code, const NoiseModel& noise, Backend& backend,
                                const ProtocolOptions& opt) {
    if (opt.states.empty()) throw UsageError("run_protocol: no prepared states");
    ProtocolRun run;
    run.exact = opt.exact;
    run.shots_per_state = opt.shots / opt.states.size();
    if (run.shots_per_state == 0) throw UsageError("run_protocol: fewer shots than prepared states");
    const auto& conn = backend.descriptor().connectivity;
    for (size_t i = 0; i < opt.states.size(); ++i) {
        const auto& s = opt.states[i];
        auto p = build_protocol(code, s, noise, conn ? &*conn : nullptr);
        StateRun sr{s, p.circuit.counts(), run.records.size(), 0};
        if (opt.exact) {
            auto dist = backend.run_exact(p.circuit, p.noise);
            for (const auto& [bits, prob] : dist.probs)
                if (prob > 0) run.records.push_back(record_from_bits(bits, p, s, prob * double(run.shots_per_state)));
        } else {
            auto res = backend.run(p.circuit, p.noise, run.shots_per_state, derive_seed(opt.seed, {i}));
            for (auto w : res.shots) run.records.push_back(record_from_bits(w, p, s, 1.0));
        }
        sr.last = run.records.size();
        run.states.push_back(sr);
    }
    return run;
}

/// Logical corrections are single-qubit Paulis; P flips the eigenvalue of
/// basis B exactly when P is neither I nor B.
inline bool flips(PauliLetter correction, PauliLetter basis) {
    return correction != PauliLetter::I && correction != basis;
}

inline bool is_fixed_by(const ShotRecord& r, PauliLetter correction) {
    return r.sign_out * (flips(correction, r.basis) ? -1 : 1) == r.sign_in;
}

inline constexpr std::array<PauliLetter, 4> kCorrectionOrder{PauliLetter::I, PauliLetter::X, PauliLetter::Y,
                                                             PauliLetter::Z};

struct CorrectionTable {
    std::map<std::string, PauliLetter> entries;

    /// Unobserved syndromes get the identity.
    PauliLetter lookup(const std::string& s) const {
        auto it = entries.find(s);
        return it == entries.end() ? PauliLetter::I : it->second;
    }
};

/// Weighted fixed-count of each candidate correction, per syndrome.
inline std::map<std::string, std::array<double, 4>> fixed_weights(const std::vector<ShotRecord>& records) {
    std::map<std::string, std::array<double, 4>> w;
    for (const auto& r : records) {
        auto& slot = w[r.syndrome];
        for (size_t i = 0; i < 4; ++i)
            if (is_fixed_by(r, kCorrectionOrder[i])) slot[i] += r.weight;
    }
    return w;
}

/// Per syndrome, the correction fixing the largest weight; ties go to the
/// earliest of I, X, Y, Z.
inline CorrectionTable build_correction_table(const std::vector<ShotRecord>& records) {
    CorrectionTable t;
    for (const auto& [s, w] : fixed_weights(records)) {
        size_t best = 0;
        for (size_t i = 1; i < 4; ++i)
            if (w[i] > w[best]) best = i;
        t.entries[s] = kCorrectionOrder[best];
    }
    return t;
}

struct SyndromeTally {
    std::string syndrome;
    PauliLetter correction = PauliLetter::I;
    double weight = 0, corrected = 0;
};

struct EvalReport {
    double p_nd = 0;
    double n_tot = 0;
    double n_uncorrected = 0;
    double n_error_free = 0;
    size_t records = 0;
    std::vector<SyndromeTally> syndromes;
};

inline EvalReport compute_pnd(const std::vector<ShotRecord>& records, const CorrectionTable& table) {
    if (records.empty()) throw DomainError("compute_pnd: no records, rate undefined");
    EvalReport rep;
    rep.records = records.size();
    std::map<std::string, SyndromeTally> by;
    for (const auto& r : records) {
        auto c = table.lookup(r.syndrome);
        auto& t = by[r.syndrome];
        t.syndrome = r.syndrome;
        t.correction = c;
        t.weight += r.weight;
        rep.n_tot += r.weight;
        if (r.error_free()) rep.n_error_free += r.weight;
        if (is_fixed_by(r, c)) t.corrected += r.weight;
        else rep.n_uncorrected += r.weight;
    }
    if (!(rep.n_tot > 0)) throw DomainError("compute_pnd: zero total weight, rate undefined");
    rep.p_nd = rep.n_uncorrected / rep.n_tot;
    for (auto& [s, t] : by) rep.syndromes.push_back(t);
    return rep;
}

inline Json to_json(const EvalReport& r) {
    Json j;
    j["p_nd"] = r.p_nd;
    j["n_tot"] = r.n_tot;
    j["n_uncorrected"] = r.n_uncorrected;
    j["n_error_free"] = r.n_error_free;
    j["records"] = r.records;
    Json syn = Json::array();
    for (const auto& t : r.syndromes)
        syn.push_back({{"syndrome", t.syndrome},
                       {"correction", std::string(1, letter_char(t.correction))},
                       {"weight", t.weight},
                       {"corrected", t.corrected}});
    j["syndromes"] = syn;
    return j;
}

/// Fraction of weight in error-free records; the fidelity proxy for fitting.
inline double error_free_fraction(const std::vector<ShotRecord>& records) {
    double tot = 0, ok = 0;
    for (const auto& r : records) {
        tot += r.weight;
        if (r.error_free()) ok += r.weight;
    }
    if (!(tot > 0)) throw DomainError("error_free_fraction: no weight");
    return ok / tot;
}

struct Renormalization {
    double error_free_factor = 1.0;
    double other_factor = 1.0;
    bool saturated = false;
    std::vector<std::string> warnings;
};

/// Reweights records in place: error-free records by 1/scale (scale =
/// F_ex^alpha), the rest by (N_tot - N_0/scale) / (N_tot - N_0), keeping the
/// total N_tot. When N_0/scale exceeds N_tot the other weights are clamped to
/// zero and the error-free ones rescaled to sum to N_tot.
inline Renormalization renormalize(std::vector<ShotRecord>& records, double scale) {
    if (!(scale > 0 && scale <= 1)) throw DomainError("renormalize: F_ex^alpha must lie in (0, 1]");
    double n_tot = 0, n0 = 0;
    for (const auto& r : records) {
        n_tot += r.weight;
        if (r.error_free()) n0 += r.weight;
    }
    Renormalization out;
    if (scale == 1.0 || n_tot == 0) return out;
    if (n0 == 0) {
        out.warnings.push_back("no error-free records; weights unchanged");
        return out;
    }
    if (n0 >= n_tot) {
        out.warnings.push_back("all records error-free; renormalization is degenerate, weights unchanged");
        return out;
    }
    const double boosted = n0 / scale;
    if (boosted > n_tot) {
        out.saturated = true;
        out.error_free_factor = n_tot / n0;
        out.other_factor = 0.0;
        out.warnings.push_back("renormalization saturated: error-free weight would exceed the total; other records clamped to 0");
    } else {
        out.error_free_factor = 1.0 / scale;
        out.other_factor = (n_tot - boosted) / (n_tot - n0);
    }
    for (auto& r : records) r.weight *= r.error_free() ? out.error_free_factor : out.other_factor;
    return out;
}

/// Renormalizes each prepared state's records with F_ex predicted from that
/// state's circuit counts.
inline std::vector<Renormalization> renormalize_run(ProtocolRun& run, const FidelityModel& model) {
    std::vector<Renormalization> out;
    for (const auto& s : run.states) {
        std::vector<ShotRecord> part(run.records.begin() + long(s.first), run.records.begin() + long(s.last));
        out.push_back(renormalize(part, model.scale(s.counts)));
        std::copy(part.begin(), part.end(), run.records.begin() + long(s.first));
    }
    return out;
}

struct EvaluateOptions {
    ProtocolOptions protocol;
    std::optional<FidelityModel> renormalize_with;
};

struct Evaluation {
    ProtocolRun run;
    CorrectionTable table;
    EvalReport report;
    std::vector<Renormalization> renormalization;
};

/// Protocol, optional renormalization, optimal table, p_ND.
inline Evaluation evaluate(const CheckMatrix& code, const NoiseModel& noise, Backend& backend,
                           const EvaluateOptions& opt) {
    Evaluation e;
    e.run = run_protocol(code, noise, backend, opt.protocol);
    if (opt.renormalize_with) e.renormalization = renormalize_run(e.run, *opt.renormalize_with);
    e.table = build_correction_table(e.run.records);
    e.report = compute_pnd(e.run.records, e.table);
    return e;
}

inline Json to_json(const CorrectionTable& t) {
    Json j = Json::object();
    for (const auto& [s, p] : t.entries) j[s.empty() ? "-" : s] = std::string(1, letter_char(p));
    return j;
}

// Shot table: one record per line, `basis sign_in syndrome sign_out weight`,
// e.g. `X + 0110 - 1`. An empty syndrome is written as `-`.
inline std::string shot_table_to_text(const std::vector<ShotRecord>& records) {
    std::ostringstream os;
    os.precision(17);
    os << "# basis sign_in syndrome sign_out weight\n";
    for (const auto& r : records)
        os << letter_char(r.basis) << ' ' << (r.sign_in > 0 ? '+' : '-') << ' '
           << (r.syndrome.empty() ? "-" : r.syndrome) << ' ' << (r.sign_out > 0 ? '+' : '-') << ' ' << r.weight << '\n';
    return os.str();
}

inline std::vector<ShotRecord> shot_table_from_text(const std::string& text) {
    std::vector<ShotRecord> out;
    std::istringstream is(text);
    std::string line;
    auto sign = [](const std::string& s) {
        if (s == "+") return 1;
        if (s == "-") return -1;
        throw ParseError("shot table: bad sign '" + s + "'");
    };
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string b, si, syn, so;
        ShotRecord r;
        if (!(ls >> b >> si >> syn >> so >> r.weight) || b.size() != 1)
            throw ParseError("shot table: bad line '" + line + "'");
        r.basis = letter_from_char(b[0]);
        if (r.basis == PauliLetter::I) throw ParseError("shot table: basis must be X, Y or Z");
        r.sign_in = sign(si);
        r.sign_out = sign(so);
        r.syndrome = syn == "-" ? "" : syn;
        if (r.syndrome.find_first_not_of("01") != std::string::npos) throw ParseError("shot table: bad syndrome");
        if (r.weight < 0) throw ParseError("shot table: negative weight");
        out.push_back(r);
    }
    return out;
}

}  // namespace qlego
