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

#include <cmath>
#include <random>

#include "qlego/evaluator.hpp"
#include "support/enumeration.hpp"

using namespace qlego;

namespace {

ShotRecord rec(char basis, int in, std::string syn, int out, double w = 1.0) {
    return {letter_from_char(basis), in, std::move(syn), out, w};
}

double weight_of(const ProtocolRun& run, const std::string& state, const std::string& syn, int out) {
    double w = 0;
    for (const auto& r : run.records)
        if (to_string(PreparedState{r.basis, r.sign_in}) == state && r.syndrome == syn && r.sign_out == out) w += r.weight;
    return w;
}

}  // namespace

TEST(Protocol, NoiselessRunsAreClean) {
    LocalTableauBackend tab;
    LocalDenseBackend den;
    for (const auto& code : {trivial_code(), two_qubit_bit_flip_code(), five_qubit_code()}) {
        for (Backend* b : {static_cast<Backend*>(&tab), static_cast<Backend*>(&den)}) {
            for (bool exact : {false, true}) {
                ProtocolOptions opt;
                opt.shots = 600;
                opt.exact = exact;
                auto run = run_protocol(code, {}, *b, opt);
                double tot = 0;
                for (const auto& r : run.records) {
                    EXPECT_TRUE(r.error_free()) << to_string(PreparedState{r.basis, r.sign_in}) << ' ' << r.syndrome;
                    tot += r.weight;
                }
                EXPECT_NEAR(tot, 600.0, 1e-9);
                EXPECT_EQ(run.states.size(), 6u);
            }
        }
    }
}

TEST(Protocol, BitFlipCodeExactDistribution) {
    // X on qubit 1 only: syndrome fires, no logical basis operator is flipped
    // (logical X = XX, Y = YX and Z = ZI all commute with X on qubit 1).
    LocalDenseBackend den;
    ProtocolOptions opt;
    opt.exact = true;
    opt.shots = 300;
    opt.states = three_states();
    auto run = run_protocol(two_qubit_bit_flip_code(), parse_noise_spec("q1.px=0.05"), den, opt);
    for (std::string s : {"+X", "+Y", "+Z"}) {
        EXPECT_NEAR(weight_of(run, s, "0", 1), 0.95 * 100, 1e-10) << s;
        EXPECT_NEAR(weight_of(run, s, "1", 1), 0.05 * 100, 1e-10) << s;
    }
    auto ev = build_correction_table(run.records);
    EXPECT_EQ(ev.lookup("1"), PauliLetter::I);
    EXPECT_NEAR(compute_pnd(run.records, ev).p_nd, 0.0, 1e-15);

    // X on qubit 0 anticommutes with logical Z = ZI and Y = YX, so the
    // syndrome-1 records of +Y and +Z come back flipped; X corrects all of them.
    run = run_protocol(two_qubit_bit_flip_code(), parse_noise_spec("q0.px=0.05"), den, opt);
    EXPECT_NEAR(weight_of(run, "+X", "1", 1), 5.0, 1e-10);
    EXPECT_NEAR(weight_of(run, "+Y", "1", -1), 5.0, 1e-10);
    EXPECT_NEAR(weight_of(run, "+Z", "1", -1), 5.0, 1e-10);
    auto t = build_correction_table(run.records);
    EXPECT_EQ(t.lookup("1"), PauliLetter::X);
    EXPECT_NEAR(compute_pnd(run.records, t).p_nd, 0.0, 1e-15);
}

TEST(Protocol, FiveQubitExactMatchesEnumeration) {
    auto code = five_qubit_code();
    auto oracle = test_support::enumerate_pnd(code, {0.01, 0.01, 0.01});
    LocalDenseBackend den;
    LocalTableauBackend tab;
    EvaluateOptions opt;
    opt.protocol.exact = true;
    opt.protocol.shots = 6;
    auto dense = evaluate(code, NoiseModel::isotropic(0.01), den, opt);
    auto frames = evaluate(code, NoiseModel::isotropic(0.01), tab, opt);
    EXPECT_NEAR(dense.report.p_nd, oracle.p_nd, 1e-10);
    EXPECT_NEAR(frames.report.p_nd, oracle.p_nd, 1e-10);
    EXPECT_LT(oracle.p_nd, 0.02);
}

TEST(Protocol, FiveQubitSyndromeZeroFraction) {
    auto code = five_qubit_code();
    auto oracle = test_support::enumerate_pnd(code, {0.01, 0.01, 0.01});
    LocalTableauBackend tab;
    ProtocolOptions opt;
    opt.shots = 100002;
    opt.seed = 12;
    auto run = run_protocol(code, NoiseModel::isotropic(0.01), tab, opt);
    double zero = 0;
    for (const auto& r : run.records) zero += r.syndrome_zero();
    double n = double(run.records.size());
    double sigma = std::sqrt(oracle.syndrome_zero * (1 - oracle.syndrome_zero) / n);
    EXPECT_NEAR(zero / n, oracle.syndrome_zero, 3 * sigma);
    EXPECT_GT(oracle.syndrome_zero, std::pow(0.97, 5));
}

TEST(Protocol, PndIncreasesWithNoise) {
    LocalTableauBackend tab;
    EvaluateOptions opt;
    opt.protocol.exact = true;
    double prev = -1;
    for (double p : {0.001, 0.005, 0.01, 0.05}) {
        double v = evaluate(five_qubit_code(), NoiseModel::isotropic(p), tab, opt).report.p_nd;
        EXPECT_GT(v, prev);
        prev = v;
    }
}

TEST(Protocol, EngineNoiseMismatchRejected) {
    LocalTableauBackend tab;
    EXPECT_THROW(run_protocol(five_qubit_code(), parse_noise_spec("delta=0.1"), tab, {}), ConfigurationError);
}

TEST(Protocol, RoutedOnHeavyHexIsClean) {
    auto backend = make_backend("heavy-hex-tableau");
    ProtocolOptions opt;
    opt.shots = 120;
    auto run = run_protocol(five_qubit_code(), {}, *backend, opt);
    for (const auto& r : run.records) EXPECT_TRUE(r.error_free());
    // With noise, the routed protocol gives the same exact p_ND as the unrouted one.
    opt.exact = true;
    LocalTableauBackend free;
    auto noise = parse_noise_spec("p=0.01,q2.pz=0.03");
    auto a = run_protocol(five_qubit_code(), noise, *backend, opt);
    auto b = run_protocol(five_qubit_code(), noise, free, opt);
    EXPECT_NEAR(compute_pnd(a.records, build_correction_table(a.records)).p_nd,
                compute_pnd(b.records, build_correction_table(b.records)).p_nd, 1e-12);
}

TEST(Protocol, SampledRunsAreDeterministic) {
    LocalTableauBackend tab;
    ProtocolOptions opt;
    opt.shots = 3000;
    opt.seed = 4;
    auto a = run_protocol(five_qubit_code(), NoiseModel::isotropic(0.05), tab, opt);
    auto b = run_protocol(five_qubit_code(), NoiseModel::isotropic(0.05), tab, opt);
    EXPECT_EQ(a.records, b.records);
}

TEST(CorrectionTable, WorkedPattern) {
    std::vector<ShotRecord> r{rec('X', 1, "10", -1), rec('Y', 1, "10", 1), rec('Z', 1, "10", -1)};
    EXPECT_EQ(build_correction_table(r).lookup("10"), PauliLetter::Y);
    EXPECT_EQ(build_correction_table(r).lookup("01"), PauliLetter::I);
}

TEST(CorrectionTable, ErrorFreeGivesIdentity) {
    std::vector<ShotRecord> r{rec('X', 1, "00", 1), rec('Z', -1, "00", -1)};
    auto t = build_correction_table(r);
    EXPECT_EQ(t.entries.size(), 1u);
    EXPECT_EQ(t.lookup("00"), PauliLetter::I);
}

TEST(CorrectionTable, TieBreaksInFixedOrder) {
    // A flipped Y record is fixed equally by X and Z.
    std::vector<ShotRecord> r(50, rec('Y', 1, "1", -1));
    EXPECT_EQ(build_correction_table(r).lookup("1"), PauliLetter::X);
    // Half fixable by I or X, half by I or Z, plus extra X- and Z-only weight.
    std::vector<ShotRecord> s{rec('X', 1, "1", 1, 1), rec('Z', 1, "1", 1, 1), rec('Y', 1, "1", -1, 3)};
    EXPECT_EQ(build_correction_table(s).lookup("1"), PauliLetter::X);
}

TEST(CorrectionTable, NoAlternativeBeatsChoice) {
    std::mt19937_64 rng(6);
    const char bases[] = {'X', 'Y', 'Z'};
    for (int t = 0; t < 200; ++t) {
        std::vector<ShotRecord> r;
        for (int i = 0; i < 30; ++i)
            r.push_back(rec(bases[rng() % 3], rng() & 1 ? 1 : -1, std::string(1, "01"[rng() % 2]), rng() & 1 ? 1 : -1,
                            double(rng() % 5)));
        auto table = build_correction_table(r);
        auto w = fixed_weights(r);
        for (const auto& [s, arr] : w) {
            auto chosen = table.lookup(s);
            double chosen_w = arr[std::find(kCorrectionOrder.begin(), kCorrectionOrder.end(), chosen) - kCorrectionOrder.begin()];
            for (double alt : arr) EXPECT_LE(alt, chosen_w);
        }
    }
}

TEST(CorrectionTable, ExactModeEqualsBruteForceOverTables) {
    LocalDenseBackend den;
    std::vector<CheckMatrix> codes{two_qubit_bit_flip_code(),
                                   complete_code({PauliOperator::from_string("+ZZI"), PauliOperator::from_string("+XXX")}, 3)};
    for (const auto& code : codes) {
        ProtocolOptions opt;
        opt.exact = true;
        auto run = run_protocol(code, parse_noise_spec("px=0.03,py=0.01,pz=0.06"), den, opt);
        double best = compute_pnd(run.records, build_correction_table(run.records)).p_nd;
        std::vector<std::string> syn;
        for (const auto& r : run.records)
            if (std::find(syn.begin(), syn.end(), r.syndrome) == syn.end()) syn.push_back(r.syndrome);
        double brute = 1.0;
        size_t tables = size_t{1} << (2 * syn.size());
        for (size_t t = 0; t < tables; ++t) {
            CorrectionTable table;
            for (size_t i = 0; i < syn.size(); ++i) table.entries[syn[i]] = kCorrectionOrder[(t >> (2 * i)) & 3];
            brute = std::min(brute, compute_pnd(run.records, table).p_nd);
        }
        EXPECT_NEAR(best, brute, 1e-14);
    }
}

TEST(CorrectionTable, FlipRuleMatchesLogicalOperators) {
    // Apply the logical Pauli P to an encoded +B state and read B with the tableau.
    auto code = five_qubit_code();
    std::mt19937_64 rng(1);
    for (auto b : {PauliLetter::X, PauliLetter::Y, PauliLetter::Z}) {
        for (auto p : kCorrectionOrder) {
            auto c = synthesize_encoder(code, b, 1);
            if (p != PauliLetter::I) {
                auto op = logical_pauli(code, p);
                for (uint32_t q = 0; q < code.n; ++q) {
                    auto l = op.letter(q);
                    if (l != PauliLetter::I) c.append(l == PauliLetter::X ? GateKind::X : l == PauliLetter::Y ? GateKind::Y : GateKind::Z, q);
                }
            }
            TableauSimulator sim(code.n);
            sim.run(c, rng);
            EXPECT_EQ(sim.expectation(logical_pauli(code, b)), flips(p, b) ? -1 : 1);
        }
    }
}

TEST(Pnd, ArithmeticByConstruction) {
    std::vector<ShotRecord> r(90, rec('Z', 1, "0", 1));
    for (int i = 0; i < 10; ++i) r.push_back(rec('Z', 1, "0", -1));
    auto rep = compute_pnd(r, build_correction_table(r));
    EXPECT_NEAR(rep.p_nd, 0.10, 1e-15);
    EXPECT_EQ(rep.n_tot, 100.0);
    EXPECT_THROW(compute_pnd({}, {}), DomainError);
    auto j = to_json(rep);
    EXPECT_EQ(j["syndromes"][0]["correction"], "I");
}

TEST(Renormalize, WorkedSubstitutions) {
    auto make = [](int n0, int n) {
        std::vector<ShotRecord> r(n0, rec('Z', 1, "0", 1));
        for (int i = n0; i < n; ++i) r.push_back(rec('Z', 1, "1", 1));
        return r;
    };
    auto r = make(60, 100);
    auto info = renormalize(r, 0.9);
    EXPECT_DOUBLE_EQ(info.error_free_factor, 1 / 0.9);
    EXPECT_NEAR(info.other_factor, (100 - 60 / 0.9) / 40, 1e-15);
    EXPECT_NEAR(info.other_factor, 0.8333333333333333, 1e-12);
    double tot = 0;
    for (auto& x : r) tot += x.weight;
    EXPECT_NEAR(tot, 100.0, 1e-9);

    r = make(80, 100);
    info = renormalize(r, 0.8);
    EXPECT_NEAR(info.error_free_factor, 1.25, 1e-15);
    EXPECT_NEAR(info.other_factor, 0.0, 1e-12);

    r = make(60, 100);
    info = renormalize(r, 1.0);
    EXPECT_EQ(info.error_free_factor, 1.0);
    for (auto& x : r) EXPECT_EQ(x.weight, 1.0);
}

TEST(Renormalize, ClampAndDegenerateCases) {
    std::vector<ShotRecord> r(90, rec('X', 1, "0", 1));
    for (int i = 0; i < 10; ++i) r.push_back(rec('X', 1, "0", -1));
    auto info = renormalize(r, 0.5);
    EXPECT_TRUE(info.saturated);
    EXPECT_FALSE(info.warnings.empty());
    double tot = 0;
    for (auto& x : r) {
        EXPECT_GE(x.weight, 0.0);
        tot += x.weight;
    }
    EXPECT_NEAR(tot, 100.0, 1e-9);
    std::vector<ShotRecord> all(5, rec('X', 1, "0", 1));
    info = renormalize(all, 0.5);
    EXPECT_FALSE(info.warnings.empty());
    for (auto& x : all) EXPECT_EQ(x.weight, 1.0);
    EXPECT_THROW(renormalize(all, 0.0), DomainError);
}

TEST(Renormalize, ConservesWeightOnRandomSets) {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(0, 1);
    for (int t = 0; t < 500; ++t) {
        std::vector<ShotRecord> r;
        size_t n = 2 + rng() % 50;
        for (size_t i = 0; i < n; ++i)
            r.push_back(rec("XYZ"[rng() % 3], 1, rng() % 3 ? "00" : "01", rng() % 4 ? 1 : -1, 0.1 + 5 * u(rng)));
        double before = 0, after = 0;
        for (auto& x : r) before += x.weight;
        renormalize(r, 0.3 + 0.7 * u(rng));
        for (auto& x : r) after += x.weight;
        EXPECT_NEAR(after / before, 1.0, 1e-9);
    }
}

TEST(Fit, RecoversSyntheticCoefficients) {
    const double cq = -0.001, c1 = -0.002, c2 = -0.01;
    std::vector<FitRun> runs;
    for (size_t q : {3, 5, 7, 9})
        for (size_t n1 : {4, 10, 25})
            for (size_t n2 : {2, 8, 20}) {
                GateCounts c{q, n1, n2};
                runs.push_back({c, std::exp(cq * q + c1 * n1 + c2 * n2)});
            }
    auto m = fit_fidelity(runs);
    EXPECT_NEAR(m.c_q, cq, 1e-9);
    EXPECT_NEAR(m.c_1, c1, 1e-9);
    EXPECT_NEAR(m.c_2, c2, 1e-9);
    EXPECT_LT(m.residual_norm, 1e-9);
}

TEST(Fit, RejectsUnidentifiableAndBadData) {
    std::vector<FitRun> single;
    for (size_t n1 : {1, 2, 3, 4}) single.push_back({{0, n1, 0}, std::exp(-0.01 * n1)});
    EXPECT_THROW(fit_fidelity(single), IdentifiabilityError);
    std::vector<FitRun> two{{{1, 0, 0}, 0.9}, {{0, 1, 0}, 0.9}};
    EXPECT_THROW(fit_fidelity(two), IdentifiabilityError);
    std::vector<FitRun> zero{{{1, 0, 0}, 0.9}, {{0, 1, 0}, 0.0}, {{0, 0, 1}, 0.9}};
    EXPECT_THROW(fit_fidelity(zero), DomainError);
}

TEST(Fit, NoisyDataStaysNearGenerator) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0, 0.002);
    std::vector<FitRun> runs;
    for (int i = 0; i < 60; ++i) {
        GateCounts c{3 + rng() % 8, 5 + rng() % 40, 2 + rng() % 30};
        double f = std::exp(-0.001 * c.qubits - 0.002 * c.one_qubit - 0.01 * c.two_qubit) * std::exp(g(rng));
        runs.push_back({c, std::min(f, 1.0)});
    }
    auto m = fit_fidelity(runs);
    EXPECT_GT(m.residual_norm, 0.0);
    EXPECT_NEAR(m.c_2, -0.01, 5e-4);
    EXPECT_NEAR(m.c_1, -0.002, 5e-4);
    EXPECT_NEAR(m.c_q, -0.001, 2e-3);
}

TEST(ShotTable, TextRoundTrip) {
    LocalTableauBackend tab;
    ProtocolOptions opt;
    opt.shots = 60;
    auto run = run_protocol(two_qubit_bit_flip_code(), NoiseModel::isotropic(0.1), tab, opt);
    run.records[0].weight = 0.123456789012345678;
    EXPECT_EQ(shot_table_from_text(shot_table_to_text(run.records)), run.records);
    auto t = run_protocol(trivial_code(), NoiseModel::isotropic(0.1), tab, opt);
    EXPECT_EQ(shot_table_from_text(shot_table_to_text(t.records)), t.records);
    EXPECT_THROW(shot_table_from_text("Q + 0 + 1\n"), ParseError);
}

TEST(Baseline, TrivialCodeIsTwoP) {
    LocalTableauBackend tab;
    EvaluateOptions opt;
    opt.protocol.exact = true;
    EXPECT_NEAR(evaluate(trivial_code(), NoiseModel::isotropic(0.01), tab, opt).report.p_nd, 0.02, 1e-12);
    EXPECT_NEAR(test_support::enumerate_pnd(trivial_code(), {0.01, 0.01, 0.01}).p_nd, 0.02, 1e-12);
}
