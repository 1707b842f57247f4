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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qlego/backend.hpp"
#include "qlego/hash.hpp"

namespace qlego {

enum class JobStatus { Submitted, Completed, Failed };

inline const char* to_string(JobStatus s) {
    switch (s) {
        case JobStatus::Submitted: return "submitted";
        case JobStatus::Completed: return "completed";
        case JobStatus::Failed: return "failed";
    }
    return "?";
}

inline JobStatus job_status_from_string(const std::string& s) {
    if (s == "submitted") return JobStatus::Submitted;
    if (s == "completed") return JobStatus::Completed;
    if (s == "failed") return JobStatus::Failed;
    throw ParseError("unknown job status '" + s + "'");
}

/// One line of the job index. `submitted_seq` / `completed_seq` are logical
/// timestamps (index line numbers) so stores are byte-reproducible.
struct JobRecord {
    std::string id;
    std::string backend;
    std::string circuit_hash;
    std::string noise_spec;
    uint64_t seed = 0;
    size_t shots = 0;
    bool exact = false;
    JobStatus status = JobStatus::Submitted;
    std::string result_path;  // relative to the store root
    std::string result_hash;
    std::string error;
    uint64_t submitted_seq = 0;
    uint64_t completed_seq = 0;
};

inline nlohmann::ordered_json to_json(const JobRecord& r) {
    return {{"id", r.id},
            {"backend", r.backend},
            {"circuit_hash", r.circuit_hash},
            {"noise", r.noise_spec},
            {"seed", r.seed},
            {"shots", r.shots},
            {"exact", r.exact},
            {"status", to_string(r.status)},
            {"result", r.result_path},
            {"result_hash", r.result_hash},
            {"error", r.error},
            {"submitted_seq", r.submitted_seq},
            {"completed_seq", r.completed_seq}};
}

inline JobRecord job_record_from_json(const nlohmann::ordered_json& j) {
    JobRecord r;
    r.id = j.at("id");
    r.backend = j.at("backend");
    r.circuit_hash = j.at("circuit_hash");
    r.noise_spec = j.at("noise");
    r.seed = j.at("seed");
    r.shots = j.at("shots");
    r.exact = j.at("exact");
    r.status = job_status_from_string(j.at("status"));
    r.result_path = j.at("result");
    r.result_hash = j.at("result_hash");
    r.error = j.value("error", "");
    r.submitted_seq = j.at("submitted_seq");
    r.completed_seq = j.at("completed_seq");
    return r;
}

/// Deterministic job id: the same backend, circuit, noise, seed, shots and
/// mode always map to the same id, so resubmission deduplicates.
inline std::string job_id(const std::string& backend, const std::string& circuit_hash, const std::string& noise_spec,
                          uint64_t seed, size_t shots, bool exact) {
    std::ostringstream os;
    os << backend << '\n' << circuit_hash << '\n' << noise_spec << '\n' << seed << '\n' << shots << '\n' << exact;
    return sha256_hex(os.str()).substr(0, 16);
}

inline std::string exact_to_text(const ExactDistribution& d, const std::string& circuit_sha) {
    std::ostringstream os;
    os.precision(17);
    os << "# circuit " << circuit_sha << "\n# exact\n# measurements " << d.num_measurements << '\n';
    for (const auto& [k, p] : d.probs) os << bits_to_string(k, d.num_measurements) << ' ' << p << '\n';
    return os.str();
}

inline ExactDistribution exact_from_text(const std::string& text) {
    ExactDistribution d;
    std::istringstream is(text);
    std::string line;
    bool have_m = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ls(line.substr(1));
            std::string key;
            ls >> key;
            if (key == "measurements") have_m = static_cast<bool>(ls >> d.num_measurements);
            continue;
        }
        std::istringstream ls(line);
        std::string bits;
        double p;
        if (!have_m || !(ls >> bits >> p) || bits.size() != d.num_measurements)
            throw ParseError("exact result file: bad line '" + line + "'");
        d.probs[bits_from_string(bits)] = p;
    }
    return d;
}

/// On-disk job store:
///   <root>/index.jsonl          one JSON JobRecord per line, newest last
///   <root>/circuits/<sha>.txt   circuit text, named by its SHA-256
///   <root>/results/<sha>.txt    result text, named by its SHA-256
/// The index only grows; each append rewrites it through a temporary file
/// and an atomic rename, so readers never see a partial line.
class JobStore {
  public:
    explicit JobStore(std::filesystem::path root) : root_(std::move(root)) {
        std::filesystem::create_directories(root_ / "circuits");
        std::filesystem::create_directories(root_ / "results");
    }

    const std::filesystem::path& root() const { return root_; }

    /// Every index line in order (a job may appear more than once).
    std::vector<JobRecord> history() const {
        std::vector<JobRecord> out;
        std::ifstream in(root_ / "index.jsonl");
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            try {
                out.push_back(job_record_from_json(nlohmann::ordered_json::parse(line)));
            } catch (const nlohmann::json::exception& e) {
                throw IntegrityError(std::string("job index: corrupt line: ") + e.what());
            }
        }
        return out;
    }

    /// Latest record per job id, in first-submission order.
    std::vector<JobRecord> jobs() const {
        std::vector<JobRecord> out;
        std::map<std::string, size_t> pos;
        for (auto& r : history()) {
            auto it = pos.find(r.id);
            if (it == pos.end()) {
                pos[r.id] = out.size();
                out.push_back(r);
            } else {
                out[it->second] = r;
            }
        }
        return out;
    }

    std::optional<JobRecord> find(const std::string& id) const {
        std::optional<JobRecord> found;
        for (auto& r : history())
            if (r.id == id) found = r;
        return found;
    }

    /// Appends a record, stamping it with the next logical sequence number.
    JobRecord append(JobRecord r) {
        auto path = root_ / "index.jsonl";
        std::string existing;
        uint64_t lines = 0;
        {
            std::ifstream in(path);
            std::stringstream ss;
            ss << in.rdbuf();
            existing = ss.str();
            for (char ch : existing) lines += ch == '\n';
        }
        if (r.status == JobStatus::Submitted) r.submitted_seq = lines + 1;
        else r.completed_seq = lines + 1;
        auto tmp = path;
        tmp += ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            out << existing << to_json(r).dump() << '\n';
            if (!out) throw IntegrityError("job index: write failed");
        }
        std::filesystem::rename(tmp, path);
        return r;
    }

    /// Writes content under dir/<sha>.txt and returns (relative path, sha).
    std::pair<std::string, std::string> put(const std::string& dir, const std::string& content) {
        std::string sha = sha256_hex(content);
        std::string rel = dir + "/" + sha + ".txt";
        auto full = root_ / rel;
        if (!std::filesystem::exists(full)) {
            auto tmp = full;
            tmp += ".tmp";
            {
                std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
                out << content;
                if (!out) throw IntegrityError("job store: write failed for " + rel);
            }
            std::filesystem::rename(tmp, full);
        }
        return {rel, sha};
    }

    /// Reads a stored file and checks it still hashes to `sha`.
    std::string get_verified(const std::string& rel, const std::string& sha) const {
        auto full = root_ / rel;
        std::ifstream in(full, std::ios::binary);
        if (!in) throw IntegrityError("job store: missing file " + rel);
        std::stringstream ss;
        ss << in.rdbuf();
        std::string content = ss.str();
        if (sha256_hex(content) != sha) throw IntegrityError("job store: hash mismatch for " + rel);
        return content;
    }

    /// Stored result text of a completed job.
    std::string result_text(const std::string& id) const {
        auto r = find(id);
        if (!r) throw UsageError("unknown job id '" + id + "'");
        if (r->status != JobStatus::Completed) throw UsageError("job '" + id + "' is not completed");
        return get_verified(r->result_path, r->result_hash);
    }

    ExecutionResult replay(const std::string& id) const {
        auto r = find(id);
        if (!r) throw UsageError("unknown job id '" + id + "'");
        if (r->exact) throw UsageError("job '" + id + "' holds an exact distribution; use replay_exact");
        return result_from_text(result_text(id)).result;
    }

    ExactDistribution replay_exact(const std::string& id) const {
        auto r = find(id);
        if (!r) throw UsageError("unknown job id '" + id + "'");
        if (!r->exact) throw UsageError("job '" + id + "' holds sampled shots; use replay");
        return exact_from_text(result_text(id));
    }

  private:
    std::filesystem::path root_;
};

/// Persists every job that passes through the wrapped backend. The record is
/// written before execution and updated once the result file is stored. A
/// completed job with the same id is served from the store.
class RecordingBackend : public Backend {
  public:
    RecordingBackend(Backend& inner, JobStore& store) : inner_(inner), store_(store) {}
    const BackendDescriptor& descriptor() const override { return inner_.descriptor(); }
    const std::vector<std::string>& job_ids() const { return ids_; }

  protected:
    ExecutionResult do_run(const CliffordCircuit& c, const NoiseModel& n, size_t shots, uint64_t seed) override {
        auto rec = begin(c, n, seed, shots, false);
        if (rec.status == JobStatus::Completed) return store_.replay(rec.id);
        try {
            auto r = inner_.run(c, n, shots, seed);
            finish(rec, to_text(r, rec.circuit_hash, seed));
            return r;
        } catch (const std::exception& e) {
            fail(rec, e.what());
            throw;
        }
    }

    ExactDistribution do_run_exact(const CliffordCircuit& c, const NoiseModel& n) override {
        auto rec = begin(c, n, 0, 0, true);
        if (rec.status == JobStatus::Completed) return store_.replay_exact(rec.id);
        try {
            auto d = inner_.run_exact(c, n);
            finish(rec, exact_to_text(d, rec.circuit_hash));
            return d;
        } catch (const std::exception& e) {
            fail(rec, e.what());
            throw;
        }
    }

  private:
    JobRecord begin(const CliffordCircuit& c, const NoiseModel& n, uint64_t seed, size_t shots, bool exact) {
        auto [circ_path, sha] = store_.put("circuits", to_text(c));
        (void)circ_path;
        JobRecord r;
        r.backend = descriptor().name;
        r.circuit_hash = sha;
        r.noise_spec = to_spec(n);
        r.seed = seed;
        r.shots = shots;
        r.exact = exact;
        r.id = job_id(r.backend, sha, r.noise_spec, seed, shots, exact);
        ids_.push_back(r.id);
        if (auto prev = store_.find(r.id); prev && prev->status == JobStatus::Completed) {
            store_.get_verified(prev->result_path, prev->result_hash);
            return *prev;
        }
        return store_.append(r);
    }

    void finish(JobRecord r, const std::string& text) {
        auto [path, sha] = store_.put("results", text);
        r.status = JobStatus::Completed;
        r.result_path = path;
        r.result_hash = sha;
        store_.append(r);
    }

    void fail(JobRecord r, const std::string& what) {
        r.status = JobStatus::Failed;
        r.error = what;
        store_.append(r);
    }

    Backend& inner_;
    JobStore& store_;
    std::vector<std::string> ids_;
};

/// Runs one sampled job through `backend`, persisting it in `store`, and
/// returns the final record.
inline JobRecord submit(Backend& backend, JobStore& store, const CliffordCircuit& c, const NoiseModel& noise, size_t shots,
                        uint64_t seed) {
    RecordingBackend rec(backend, store);
    rec.run(c, noise, shots, seed);
    return *store.find(rec.job_ids().back());
}

/// Serves jobs purely from a store, for a backend described by `descriptor`.
/// Anything not recorded, missing or altered raises an error instead of
/// being recomputed.
class ReplayBackend : public Backend {
  public:
    ReplayBackend(const JobStore& store, BackendDescriptor descriptor) : store_(store), d_(std::move(descriptor)) {}
    const BackendDescriptor& descriptor() const override { return d_; }

  protected:
    ExecutionResult do_run(const CliffordCircuit& c, const NoiseModel& n, size_t shots, uint64_t seed) override {
        auto id = job_id(d_.name, circuit_hash(c), to_spec(n), seed, shots, false);
        auto r = store_.find(id);
        if (!r) throw IntegrityError("replay: job " + id + " was never recorded");
        return store_.replay(id);
    }
    ExactDistribution do_run_exact(const CliffordCircuit& c, const NoiseModel& n) override {
        auto id = job_id(d_.name, circuit_hash(c), to_spec(n), 0, 0, true);
        auto r = store_.find(id);
        if (!r) throw IntegrityError("replay: job " + id + " was never recorded");
        return store_.replay_exact(id);
    }

  private:
    const JobStore& store_;
    BackendDescriptor d_;
};

}  // namespace qlego
