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
#include <compare>
#include <fstream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "qlego/check_matrix.hpp"

namespace qlego {

/// A leg of a network, addressed by block index and leg index within the block.
struct LegRef {
    uint32_t block = 0;
    uint32_t leg = 0;

    friend auto operator<=>(const LegRef&, const LegRef&) = default;
    friend bool operator==(const LegRef&, const LegRef&) = default;
};

inline std::string to_string(LegRef r) { return "(" + std::to_string(r.block) + "." + std::to_string(r.leg) + ")"; }

struct Contraction {
    LegRef a;
    LegRef b;

    friend bool operator==(const Contraction&, const Contraction&) = default;
};

/// A stabilizer-state tensor: `legs` generators on `legs` legs.
struct LegoBlock {
    std::string name;
    size_t legs = 0;
    std::vector<PauliOperator> group;

    friend bool operator==(const LegoBlock&, const LegoBlock&) = default;
};

inline void validate(const LegoBlock& b) {
    if (b.group.size() != b.legs) throw DomainError("lego block " + b.name + ": needs one generator per leg");
    for (const auto& g : b.group)
        if (g.size() != b.legs || !g.is_hermitian()) throw DomainError("lego block " + b.name + ": malformed generator");
    if (!mutually_commuting(b.group)) throw DomainError("lego block " + b.name + ": generators do not commute");
    auto r = rref(b.group);
    if (r.rank != b.legs || r.contains_nontrivial_identity)
        throw DomainError("lego block " + b.name + ": generators are not independent");
}

/// Two-leg Bell pair |00> + |11>, group {XX, ZZ}.
inline LegoBlock bell_block() {
    return {"BELL", 2, {PauliOperator::from_string("+XX"), PauliOperator::from_string("+ZZ")}};
}

/// Six-leg state of the [[4,2,2]] code with both logical legs exposed.
/// Legs 0-3 carry the physical qubits, legs 4 and 5 the two logical qubits
/// (logical X1 = XXII, Z1 = ZIZI, X2 = XIXI, Z2 = ZZII).
inline LegoBlock t6_block() {
    std::vector<PauliOperator> g;
    for (const char* s : {"+XXXXII", "+ZZZZII", "+XXIIXI", "+ZIZIZI", "+XIXIIX", "+ZZIIIZ"})
        g.push_back(PauliOperator::from_string(s));
    return {"T6", 6, std::move(g)};
}

/// Named blocks available to networks and to the learner.
class Palette {
  public:
    void add(LegoBlock block) {
        validate(block);
        for (auto& b : blocks_) {
            if (b.name == block.name) {
                b = std::move(block);
                return;
            }
        }
        blocks_.push_back(std::move(block));
    }

    const LegoBlock& at(const std::string& name) const {
        for (const auto& b : blocks_)
            if (b.name == name) return b;
        throw ParseError("unknown lego block '" + name + "'");
    }

    const std::vector<LegoBlock>& blocks() const { return blocks_; }

  private:
    std::vector<LegoBlock> blocks_;
};

inline Palette default_palette() {
    Palette p;
    p.add(t6_block());
    p.add(bell_block());
    return p;
}

namespace detail {

/// Projects legs ia, ib of a stabilizer state onto <Phi+| and removes them.
///
/// Keeps the subgroup acting on the pair as II, XX, YY or ZZ; YY carries the
/// eigenvalue -1 on |Phi+>, so those elements change sign.
inline std::vector<PauliOperator> bell_project_group(std::vector<PauliOperator> gens, size_t ia, size_t ib) {
    if (gens.empty()) return gens;
    size_t n = gens.front().size();
    PauliOperator xx(n), zz(n);
    xx.set(ia, PauliLetter::X);
    xx.set(ib, PauliLetter::X);
    zz.set(ia, PauliLetter::Z);
    zz.set(ib, PauliLetter::Z);
    for (const auto* check : {&xx, &zz}) {
        auto pivot = std::find_if(gens.begin(), gens.end(), [&](const PauliOperator& g) { return symplectic_product(g, *check); });
        if (pivot == gens.end()) continue;
        PauliOperator p = *pivot;
        gens.erase(pivot);
        for (auto& g : gens)
            if (symplectic_product(g, *check)) g = multiply(g, p);
    }
    std::vector<size_t> keep;
    for (size_t q = 0; q < n; ++q)
        if (q != ia && q != ib) keep.push_back(q);
    std::vector<PauliOperator> out;
    out.reserve(gens.size());
    for (const auto& g : gens) {
        auto r = g.restricted(keep);
        if (g.letter(ia) == PauliLetter::Y) r.negate();
        out.push_back(std::move(r));
    }
    auto reduced = rref(out);
    if (reduced.contains_nontrivial_identity) throw DegenerateContraction("contraction projects the network state to zero");
    return std::move(reduced.basis);
}

}  // namespace detail

/// Blocks, contractions and logical-leg assignment, with the stabilizer group
/// of the contracted state on the open legs kept in canonical rref form.
class LegoNetwork {
  public:
    LegoNetwork() = default;

    const std::vector<LegoBlock>& blocks() const { return blocks_; }
    const std::vector<Contraction>& contractions() const { return contractions_; }
    const std::vector<LegRef>& logical_legs() const { return logical_; }
    /// Uncontracted legs ordered by (block, leg); column order of group().
    const std::vector<LegRef>& open_legs() const { return open_; }
    const std::vector<PauliOperator>& group() const { return group_; }

    bool empty() const { return blocks_.empty(); }
    /// All legs contracted: the network evaluates to a scalar.
    bool is_scalar() const { return !blocks_.empty() && open_.empty(); }
    size_t num_physical_legs() const { return open_.size() - logical_.size(); }

    std::optional<size_t> open_index(LegRef leg) const {
        auto it = std::lower_bound(open_.begin(), open_.end(), leg);
        if (it == open_.end() || *it != leg) return std::nullopt;
        return static_cast<size_t>(it - open_.begin());
    }

    bool is_logical(LegRef leg) const { return std::find(logical_.begin(), logical_.end(), leg) != logical_.end(); }

    LegoNetwork with_block(const LegoBlock& block) const {
        validate(block);
        LegoNetwork out = *this;
        auto bi = static_cast<uint32_t>(blocks_.size());
        out.blocks_.push_back(block);
        size_t before = open_.size();
        for (auto& g : out.group_) g = g.extended(block.legs);
        for (const auto& g : block.group) out.group_.push_back(PauliOperator(before).tensor(g));
        for (uint32_t l = 0; l < block.legs; ++l) out.open_.push_back({bi, l});
        out.group_ = rref(out.group_).basis;
        return out;
    }

    /// Marks an open leg as logical.
    LegoNetwork with_logical(LegRef leg) const {
        if (!open_index(leg)) throw UsageError("leg " + to_string(leg) + " is not open");
        if (is_logical(leg)) throw UsageError("leg " + to_string(leg) + " is already logical");
        LegoNetwork out = *this;
        out.logical_.push_back(leg);
        return out;
    }

    friend LegoNetwork contract_pair(const LegoNetwork& net, LegRef a, LegRef b);

    friend bool operator==(const LegoNetwork& x, const LegoNetwork& y) {
        return x.blocks_ == y.blocks_ && x.contractions_ == y.contractions_ && x.logical_ == y.logical_;
    }

  private:
    std::vector<LegoBlock> blocks_;
    std::vector<Contraction> contractions_;
    std::vector<LegRef> logical_;
    std::vector<LegRef> open_;
    std::vector<PauliOperator> group_;
};

/// Glues two open legs (same block or different blocks).
///
/// Throws UsageError if a leg is not open or is logical, and
/// DegenerateContraction if the projected group contains -I.
inline LegoNetwork contract_pair(const LegoNetwork& net, LegRef a, LegRef b) {
    if (a == b) throw UsageError("cannot contract a leg with itself");
    auto ia = net.open_index(a), ib = net.open_index(b);
    if (!ia || !ib) throw UsageError("contraction " + to_string(a) + "-" + to_string(b) + " uses a closed leg");
    if (net.is_logical(a) || net.is_logical(b)) throw UsageError("cannot contract a logical leg");
    LegoNetwork out = net;
    out.group_ = detail::bell_project_group(net.group_, *ia, *ib);
    out.contractions_.push_back({a, b});
    out.open_.erase(std::remove_if(out.open_.begin(), out.open_.end(), [&](LegRef r) { return r == a || r == b; }),
                    out.open_.end());
    return out;
}

/// GF(2) rank of the group restricted to one open leg (2 means the leg can carry a logical qubit).
inline size_t leg_rank(const LegoNetwork& net, LegRef leg) {
    auto idx = net.open_index(leg);
    if (!idx) throw UsageError("leg " + to_string(leg) + " is not open");
    std::vector<PauliOperator> col;
    for (const auto& g : net.group()) col.push_back(g.restricted(std::vector<size_t>{*idx}));
    return rref(col).rank;
}

/// Reads the contracted tensor as an encoding map from the logical legs to the
/// remaining (physical) open legs.
///
/// Group elements that are identity on the logical legs are the stabilizers;
/// elements acting as X_j (Z_j) on logical leg j and identity on the other
/// logical legs give logical X_j (Z_j) on the physical legs.
inline CheckMatrix derive_code(const LegoNetwork& net) {
    if (net.empty() || net.is_scalar()) throw InvalidAssignment("network has no open legs");
    const auto& open = net.open_legs();
    std::vector<size_t> logical_cols, physical_cols;
    for (size_t i = 0; i < open.size(); ++i) (net.is_logical(open[i]) ? logical_cols : physical_cols).push_back(i);
    // Logical legs in assignment order.
    logical_cols.clear();
    for (auto leg : net.logical_legs()) logical_cols.push_back(*net.open_index(leg));
    size_t k = logical_cols.size();
    size_t n = physical_cols.size();
    if (n == 0) throw InvalidAssignment("no physical legs remain");

    std::vector<PauliOperator> gens = net.group();
    if (gens.size() != open.size()) throw InvalidAssignment("network group is not a full stabilizer state");
    auto logical_bit = [&](const PauliOperator& g, size_t col) {
        size_t leg = logical_cols[col / 2];
        return col % 2 == 0 ? g.x(leg) : g.z(leg);
    };
    std::vector<PauliOperator> pivots(2 * k);
    size_t next = 0;
    for (size_t col = 0; col < 2 * k; ++col) {
        size_t p = next;
        while (p < gens.size() && !logical_bit(gens[p], col)) ++p;
        if (p == gens.size())
            throw InvalidAssignment("logical legs are not independent: no generator reaches logical column " +
                                    std::to_string(col));
        std::swap(gens[p], gens[next]);
        for (size_t i = 0; i < gens.size(); ++i)
            if (i != next && logical_bit(gens[i], col)) gens[i] = multiply(gens[i], gens[next]);
        ++next;
    }
    CheckMatrix code;
    code.n = n;
    code.k = k;
    for (size_t j = 0; j < k; ++j) {
        code.logical_x.push_back(gens[2 * j].restricted(physical_cols));
        code.logical_z.push_back(gens[2 * j + 1].restricted(physical_cols));
    }
    std::vector<PauliOperator> stabs;
    for (size_t i = 2 * k; i < gens.size(); ++i) stabs.push_back(gens[i].restricted(physical_cols));
    code.stabilizers = rref(stabs).basis;
    validate(code);
    return code;
}

// Network text format:
//   blocks: T6 T6
//   contractions: (0.1)-(1.3) (0.2)-(1.4)
//   logical: (0.0)
inline std::string to_text(const LegoNetwork& net) {
    std::ostringstream os;
    os << "blocks:";
    for (const auto& b : net.blocks()) os << ' ' << b.name;
    os << "\ncontractions:";
    for (const auto& c : net.contractions()) os << ' ' << to_string(c.a) << '-' << to_string(c.b);
    os << "\nlogical:";
    for (auto l : net.logical_legs()) os << ' ' << to_string(l);
    os << '\n';
    return os.str();
}

inline LegoNetwork network_from_text(const std::string& text, const Palette& palette = default_palette()) {
    std::istringstream is(text);
    std::string line;
    LegoNetwork net;
    static const std::regex kLeg(R"(\((\d+)\.(\d+)\))");
    auto legs_in = [&](const std::string& s) {
        std::vector<LegRef> out;
        for (std::sregex_iterator it(s.begin(), s.end(), kLeg), end; it != end; ++it)
            out.push_back({static_cast<uint32_t>(std::stoul((*it)[1])), static_cast<uint32_t>(std::stoul((*it)[2]))});
        return out;
    };
    bool saw_blocks = false;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        auto colon = line.find(':');
        if (colon == std::string::npos) throw ParseError("network: expected 'key: values', got '" + line + "'");
        std::string key = line.substr(0, colon), rest = line.substr(colon + 1);
        if (key == "blocks") {
            std::istringstream bs(rest);
            std::string name;
            while (bs >> name) net = net.with_block(palette.at(name));
            saw_blocks = true;
        } else if (key == "contractions") {
            if (!saw_blocks) throw ParseError("network: contractions before 'blocks:'");
            auto legs = legs_in(rest);
            if (legs.size() % 2) throw ParseError("network: odd number of legs in contraction list");
            for (size_t i = 0; i < legs.size(); i += 2) net = contract_pair(net, legs[i], legs[i + 1]);
        } else if (key == "logical") {
            for (auto l : legs_in(rest)) net = net.with_logical(l);
        } else {
            throw ParseError("network: unknown key '" + key + "'");
        }
    }
    if (!saw_blocks) throw ParseError("network: missing 'blocks:' line");
    return net;
}

inline LegoNetwork load_network(const std::string& path, const Palette& palette = default_palette()) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open network file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return network_from_text(ss.str(), palette);
}

}  // namespace qlego
