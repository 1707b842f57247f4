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
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qlego/circuit.hpp"
#include "qlego/hash.hpp"
#include "qlego/rng.hpp"

namespace qlego {

/// Measurement records limited to 64 bits per shot (bit i = i-th MEASURE_Z).
inline constexpr size_t kMaxMeasurements = 64;

inline void check_measurement_count(const CliffordCircuit& c) {
    if (c.num_measurements() > kMaxMeasurements)
        throw CapacityError("circuit has " + std::to_string(c.num_measurements()) + " measurements; the limit is 64");
}

/// Sampled outcomes: one word per shot.
struct ExecutionResult {
    size_t num_measurements = 0;
    std::vector<uint64_t> shots;

    bool bit(size_t shot, size_t m) const { return (shots[shot] >> m) & 1; }
    friend bool operator==(const ExecutionResult&, const ExecutionResult&) = default;
};

/// Exact joint outcome distribution; keys use the same bit layout as shots.
struct ExactDistribution {
    size_t num_measurements = 0;
    std::map<uint64_t, double> probs;

    double total() const {
        double t = 0;
        for (const auto& [k, p] : probs) t += p;
        return t;
    }
};

/// Draws shots from an exact distribution (inverse CDF in key order).
inline ExecutionResult sample_distribution(const ExactDistribution& d, size_t shots, Rng& rng) {
    std::vector<uint64_t> keys;
    std::vector<double> cdf;
    double acc = 0;
    for (const auto& [k, p] : d.probs) {
        if (p <= 0) continue;
        acc += p;
        keys.push_back(k);
        cdf.push_back(acc);
    }
    ExecutionResult r{d.num_measurements, {}};
    r.shots.reserve(shots);
    if (keys.empty()) throw DomainError("sample_distribution: empty distribution");
    for (size_t s = 0; s < shots; ++s) {
        double u = uniform01(rng) * acc;
        auto i = static_cast<size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        r.shots.push_back(keys[std::min(i, keys.size() - 1)]);
    }
    return r;
}

inline std::string circuit_hash(const CliffordCircuit& c) { return sha256_hex(to_text(c)); }

inline std::string bits_to_string(uint64_t word, size_t m) {
    std::string s(m, '0');
    for (size_t i = 0; i < m; ++i)
        if ((word >> i) & 1) s[i] = '1';
    return s;
}

inline uint64_t bits_from_string(const std::string& s) {
    if (s.size() > kMaxMeasurements) throw ParseError("bitstring longer than 64");
    uint64_t w = 0;
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '1') w |= uint64_t{1} << i;
        else if (s[i] != '0') throw ParseError("bad bitstring '" + s + "'");
    }
    return w;
}

/// Line-per-shot text: header lines `# circuit <sha256>`, `# seed <s>`,
/// `# shots <n>`, `# measurements <m>`, then one bitstring per shot with the
/// first measurement leftmost.
inline std::string to_text(const ExecutionResult& r, const std::string& circuit_sha, uint64_t seed) {
    std::ostringstream os;
    os << "# circuit " << circuit_sha << "\n# seed " << seed << "\n# shots " << r.shots.size() << "\n# measurements "
       << r.num_measurements << '\n';
    for (auto w : r.shots) os << bits_to_string(w, r.num_measurements) << '\n';
    return os.str();
}

struct ResultFile {
    std::string circuit_sha;
    uint64_t seed = 0;
    ExecutionResult result;
};

inline ResultFile result_from_text(const std::string& text) {
    ResultFile f;
    std::istringstream is(text);
    std::string line;
    size_t declared = 0;
    bool have_shots = false, have_m = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ls(line.substr(1));
            std::string key;
            ls >> key;
            if (key == "circuit") ls >> f.circuit_sha;
            else if (key == "seed") ls >> f.seed;
            else if (key == "shots") have_shots = static_cast<bool>(ls >> declared);
            else if (key == "measurements") have_m = static_cast<bool>(ls >> f.result.num_measurements);
            continue;
        }
        if (!have_m || line.size() != f.result.num_measurements)
            throw ParseError("result file: bitstring width does not match header");
        f.result.shots.push_back(bits_from_string(line));
    }
    if (!have_shots || declared != f.result.shots.size()) throw ParseError("result file: shot count mismatch");
    return f;
}

}  // namespace qlego
