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

#include <chrono>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qlego/dense.hpp"
#include "qlego/fidelity.hpp"
#include "qlego/frame_sim.hpp"
#include "qlego/layout.hpp"

namespace qlego {

inline constexpr const char* kCapCliffordOnly = "clifford-only";
inline constexpr const char* kCapDense = "dense";
inline constexpr const char* kCapRelaxation = "relaxation-gadget";

struct BackendDescriptor {
    std::string name;
    std::set<std::string> capabilities;
    size_t qubit_cap = 0;
    /// Empty means all-to-all.
    std::optional<CouplingGraph> connectivity;
    double shots_per_second = 0;
    bool supports_exact = false;
    std::string summary;
};

/// Number of distinct qubits the circuit acts on.
inline size_t used_qubits(const CliffordCircuit& c) {
    std::vector<bool> used(c.num_qubits(), false);
    for (const auto& g : c.gates()) {
        used[g.q0] = true;
        if (is_two_qubit(g.kind)) used[g.q1] = true;
    }
    return static_cast<size_t>(std::count(used.begin(), used.end(), true));
}

/// Throws RejectedJob when the backend cannot run the job as submitted.
inline void check_compatible(const BackendDescriptor& d, const CliffordCircuit& c, const NoiseModel& noise) {
    if (d.capabilities.empty()) throw ConfigurationError("backend '" + d.name + "' declares no capabilities");
    noise.validate();
    if ((c.has_pswap() || noise.has_relaxation()) && !d.capabilities.count(kCapRelaxation))
        throw RejectedJob("backend '" + d.name + "' rejected the job: relaxation requires the " +
                          std::string(kCapRelaxation) + " capability");
    size_t q = used_qubits(c);
    if (q > d.qubit_cap)
        throw RejectedJob("backend '" + d.name + "' rejected the job: " + std::to_string(q) + " qubits exceed the cap of " +
                          std::to_string(d.qubit_cap));
    if (d.connectivity) {
        const auto& g = *d.connectivity;
        if (c.num_qubits() > g.size())
            throw RejectedJob("backend '" + d.name + "' rejected the job: circuit is wider than the coupling graph");
        auto bad = off_graph_gates(c, g);
        if (!bad.empty()) {
            std::ostringstream os;
            os << "backend '" << d.name << "' rejected the job: two-qubit gates off the coupling graph:";
            for (size_t i = 0; i < bad.size() && i < 10; ++i) {
                const auto& gate = c.gates()[bad[i]];
                os << " #" << bad[i] << ' ' << gate_name(gate.kind) << ' ' << gate.q0 << ' ' << gate.q1;
            }
            if (bad.size() > 10) os << " ... (" << bad.size() << " total)";
            throw RejectedJob(os.str());
        }
    }
}

/// Execution boundary. Implementations run synchronously; run() and
/// run_exact() validate the job before delegating.
class Backend {
  public:
    virtual ~Backend() = default;
    virtual const BackendDescriptor& descriptor() const = 0;

    ExecutionResult run(const CliffordCircuit& c, const NoiseModel& noise, size_t shots, uint64_t seed) {
        check_compatible(descriptor(), c, noise);
        return do_run(c, noise, shots, seed);
    }

    ExactDistribution run_exact(const CliffordCircuit& c, const NoiseModel& noise) {
        check_compatible(descriptor(), c, noise);
        if (!descriptor().supports_exact)
            throw ConfigurationError("backend '" + descriptor().name + "' has no exact mode");
        return do_run_exact(c, noise);
    }

  protected:
    virtual ExecutionResult do_run(const CliffordCircuit& c, const NoiseModel& noise, size_t shots, uint64_t seed) = 0;
    virtual ExactDistribution do_run_exact(const CliffordCircuit& c, const NoiseModel& noise) = 0;
};

/// Pauli-frame tableau engine, optionally restricted to a coupling graph.
class LocalTableauBackend : public Backend {
  public:
    explicit LocalTableauBackend(std::optional<CouplingGraph> connectivity = std::nullopt, size_t threads = 1,
                                 std::string name = "local-tableau")
        : threads_(threads) {
        d_.name = std::move(name);
        d_.capabilities = {kCapCliffordOnly};
        d_.qubit_cap = connectivity ? connectivity->size() : 4096;
        d_.connectivity = std::move(connectivity);
        d_.shots_per_second = 1e6;
        d_.supports_exact = true;
        d_.summary = d_.connectivity ? "stabilizer frames on a " + d_.connectivity->name() + " coupling graph"
                                     : "stabilizer frames, all-to-all";
    }
    const BackendDescriptor& descriptor() const override { return d_; }

  protected:
    ExecutionResult do_run(const CliffordCircuit& c, const NoiseModel& n, size_t shots, uint64_t seed) override {
        return run_tableau(c, n, shots, seed, threads_);
    }
    ExactDistribution do_run_exact(const CliffordCircuit& c, const NoiseModel& n) override {
        return run_tableau_exact(c, n);
    }

  private:
    BackendDescriptor d_;
    size_t threads_;
};

/// Density-matrix engine with relaxation support.
class LocalDenseBackend : public Backend {
  public:
    explicit LocalDenseBackend(DenseOptions opt = {}) : opt_(opt) {
        d_.name = "local-dense";
        d_.capabilities = {kCapDense, kCapRelaxation};
        d_.qubit_cap = opt.qubit_cap;
        d_.shots_per_second = 1e4;
        d_.supports_exact = true;
        d_.summary = "density matrix, all-to-all, relaxation channel and gadget";
    }
    const BackendDescriptor& descriptor() const override { return d_; }

  protected:
    ExecutionResult do_run(const CliffordCircuit& c, const NoiseModel& n, size_t shots, uint64_t seed) override {
        return run_dense(c, n, shots, seed, opt_);
    }
    ExactDistribution do_run_exact(const CliffordCircuit& c, const NoiseModel& n) override {
        return run_dense_exact(c, n, opt_);
    }

  private:
    BackendDescriptor d_;
    DenseOptions opt_;
};

/// Stand-in for a remote device: adds latency and whole-shot infidelity
/// predicted by a fidelity model from the circuit's (N_q, N_1, N_2). With
/// probability 1 - F_ex a shot is replaced by uniformly random bits; the exact
/// mode mixes the ideal distribution with the uniform one accordingly.
class MockRemoteBackend : public Backend {
  public:
    struct Options {
        FidelityModel model;
        std::chrono::milliseconds latency{0};
        std::optional<CouplingGraph> connectivity;
        DenseOptions dense;
    };

    explicit MockRemoteBackend(Options opt) : opt_(std::move(opt)) {
        d_.name = "mock-remote";
        d_.capabilities = {kCapCliffordOnly, kCapDense, kCapRelaxation};
        d_.qubit_cap = opt_.connectivity ? opt_.connectivity->size() : 32;
        d_.connectivity = opt_.connectivity;
        d_.shots_per_second = 1e3;
        d_.supports_exact = true;
        d_.summary = "simulated device: latency plus gate-count infidelity";
    }
    const BackendDescriptor& descriptor() const override { return d_; }
    const FidelityModel& model() const { return opt_.model; }

  protected:
    ExecutionResult do_run(const CliffordCircuit& c, const NoiseModel& n, size_t shots, uint64_t seed) override {
        wait();
        auto r = needs_dense(c, n) ? run_dense(c, n, shots, seed, opt_.dense) : run_tableau(c, n, shots, seed);
        const double f = opt_.model.fidelity(c.counts());
        Rng rng = make_rng(seed, {0xfa11});
        const size_t m = r.num_measurements;
        const uint64_t mask = m == 64 ? ~uint64_t{0} : (uint64_t{1} << m) - 1;
        for (auto& w : r.shots)
            if (uniform01(rng) >= f) w = rng() & mask;
        return r;
    }

    ExactDistribution do_run_exact(const CliffordCircuit& c, const NoiseModel& n) override {
        wait();
        auto d = needs_dense(c, n) ? run_dense_exact(c, n, opt_.dense) : run_tableau_exact(c, n);
        const double f = opt_.model.fidelity(c.counts());
        if (f >= 1.0) return d;
        if (d.num_measurements > 24) throw CapacityError("mock-remote exact mode: too many measurements to mix");
        const uint64_t outcomes = uint64_t{1} << d.num_measurements;
        ExactDistribution out{d.num_measurements, {}};
        for (uint64_t k = 0; k < outcomes; ++k) out.probs[k] = (1 - f) / double(outcomes);
        for (const auto& [k, p] : d.probs) out.probs[k] += f * p;
        return out;
    }

  private:
    static bool needs_dense(const CliffordCircuit& c, const NoiseModel& n) { return c.has_pswap() || n.has_relaxation(); }
    void wait() const {
        if (opt_.latency.count() > 0) std::this_thread::sleep_for(opt_.latency);
    }

    Options opt_;
    BackendDescriptor d_;
};

/// Built-in backend names, in listing order.
inline std::vector<std::string> backend_names() {
    return {"local-tableau", "local-dense", "heavy-hex-tableau", "mock-remote"};
}

/// The mock-remote default model, roughly a good trapped-ion device: per-qubit,
/// one- and two-qubit log-fidelity costs of -5e-4, -5e-5 and -1e-3.
inline FidelityModel default_mock_model() { return {-5e-4, -5e-5, -1e-3, 1.0, 0.0}; }

inline std::unique_ptr<Backend> make_backend(const std::string& name, size_t threads = 1) {
    if (name == "local-tableau") return std::make_unique<LocalTableauBackend>(std::nullopt, threads);
    if (name == "local-dense") return std::make_unique<LocalDenseBackend>();
    if (name == "heavy-hex-tableau")
        return std::make_unique<LocalTableauBackend>(CouplingGraph::heavy_hex(3, 5), threads, "heavy-hex-tableau");
    if (name == "mock-remote") return std::make_unique<MockRemoteBackend>(MockRemoteBackend::Options{default_mock_model()});
    throw UsageError("unknown backend '" + name + "'");
}

}  // namespace qlego
