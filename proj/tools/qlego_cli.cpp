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

// qlego: evaluate, learn and report on stabilizer codes built from lego blocks.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qlego/backend.hpp"
#include "qlego/evaluator.hpp"
#include "qlego/job_store.hpp"
#include "qlego/learner.hpp"
#include "qlego/reports.hpp"

namespace fs = std::filesystem;
using namespace qlego;

namespace {

struct Globals {
    uint64_t seed = 0;
    std::string out = "qlego-out";
    size_t threads = 1;
};

void write_text(const fs::path& p, const std::string& text) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + p.string());
}

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ParseError("cannot open " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_json(const fs::path& p, const Json& j) { write_text(p, j.dump(2) + "\n"); }

/// "c_q,c_1,c_2[,alpha]"
FidelityModel parse_model(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) {
        try {
            v.push_back(std::stod(part));
        } catch (const std::exception&) {
            throw UsageError("fidelity model: cannot parse '" + part + "'");
        }
    }
    if (v.size() != 3 && v.size() != 4) throw UsageError("fidelity model: expected c_q,c_1,c_2[,alpha]");
    return {v[0], v[1], v[2], v.size() == 4 ? v[3] : 1.0, 0.0};
}

/// Model from a `fit.json` written by the fit command.
FidelityModel model_from_fit_file(const std::string& path) {
    auto j = Json::parse(read_text(path));
    const auto& m = j.at("model");
    return {m.at("c_q"), m.at("c_1"), m.at("c_2"), m.at("alpha"), m.at("residual_norm")};
}

Json model_json(const FidelityModel& m) {
    return {{"c_q", m.c_q}, {"c_1", m.c_1}, {"c_2", m.c_2}, {"alpha", m.alpha}, {"residual_norm", m.residual_norm}};
}

std::string default_backend(const NoiseModel& n) { return n.has_relaxation() ? "local-dense" : "local-tableau"; }

std::unique_ptr<Backend> open_backend(const std::string& name, const Globals& g, const std::string& layout,
                                      const std::string& mock_model, int latency_ms) {
    std::optional<CouplingGraph> graph;
    if (!layout.empty()) graph = load_coupling_graph(layout);
    if (name == "mock-remote") {
        MockRemoteBackend::Options o{mock_model.empty() ? default_mock_model() : parse_model(mock_model)};
        o.latency = std::chrono::milliseconds(latency_ms);
        o.connectivity = graph;
        return std::make_unique<MockRemoteBackend>(o);
    }
    if (!mock_model.empty()) throw UsageError("--mock-model only applies to the mock-remote backend");
    if (graph) {
        if (name != "local-tableau") throw UsageError("--layout is supported for local-tableau and mock-remote");
        return std::make_unique<LocalTableauBackend>(graph, g.threads, "local-tableau@" + fs::path(layout).stem().string());
    }
    return make_backend(name, g.threads);
}

std::vector<PreparedState> parse_states(const std::string& s) {
    if (s == "six") return six_states();
    if (s == "three") return three_states();
    std::vector<PreparedState> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) {
        if (part.size() != 2 || (part[0] != '+' && part[0] != '-'))
            throw UsageError("states: expected six, three or a list like +X,-Z");
        out.push_back({letter_from_char(part[1]), part[0] == '+' ? 1 : -1});
    }
    return out;
}

Json descriptor_json(const BackendDescriptor& d) {
    Json caps = Json::array();
    for (const auto& c : d.capabilities) caps.push_back(c);
    return {{"name", d.name},
            {"capabilities", caps},
            {"qubit_cap", d.qubit_cap},
            {"connectivity", d.connectivity ? d.connectivity->name() : "all-to-all"},
            {"edges", d.connectivity ? d.connectivity->edges().size() : 0},
            {"shots_per_second", d.shots_per_second},
            {"exact", d.supports_exact},
            {"summary", d.summary}};
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// ---------------------------------------------------------------------------

struct EvaluateArgs {
    std::string code, network, noise, backend = "auto", states = "six", layout, renormalize, model_file, mock_model;
    size_t shots = 10000;
    bool exact = false;
    int latency_ms = 0;
};

int cmd_evaluate(const EvaluateArgs& a, const Globals& g) {
    if (a.code.empty() == a.network.empty()) throw UsageError("evaluate: give exactly one of --code or --network");
    CheckMatrix code = a.code.empty() ? derive_code(load_network(a.network)) : load_check_matrix(a.code);
    validate(code);
    NoiseModel noise = parse_noise_spec(a.noise);
    std::string name = a.backend == "auto" ? default_backend(noise) : a.backend;
    auto inner = open_backend(name, g, a.layout, a.mock_model, a.latency_ms);
    fs::path out(g.out);
    JobStore store(out / "jobs");
    RecordingBackend backend(*inner, store);

    EvaluateOptions opt;
    opt.protocol.shots = a.shots;
    opt.protocol.seed = g.seed;
    opt.protocol.exact = a.exact;
    opt.protocol.states = parse_states(a.states);
    if (!a.renormalize.empty() && !a.model_file.empty()) throw UsageError("give --renormalize or --model, not both");
    if (!a.renormalize.empty()) opt.renormalize_with = parse_model(a.renormalize);
    if (!a.model_file.empty()) opt.renormalize_with = model_from_fit_file(a.model_file);

    // Calibration fractions come from the raw records, before any reweighting.
    auto raw_opt = opt;
    raw_opt.renormalize_with.reset();
    auto ev = evaluate(code, noise, backend, opt);
    ProtocolRun raw = opt.renormalize_with ? run_protocol(code, noise, backend, raw_opt.protocol) : ev.run;

    Json states = Json::array();
    std::ostringstream calib;
    calib.precision(17);
    calib << "# N_q N_1 N_2 error_free_fraction\n";
    for (size_t i = 0; i < raw.states.size(); ++i) {
        const auto& s = raw.states[i];
        std::vector<ShotRecord> part(raw.records.begin() + long(s.first), raw.records.begin() + long(s.last));
        double f = error_free_fraction(part);
        Json js{{"state", to_string(s.state)},
                {"qubits", s.counts.qubits},
                {"one_qubit_gates", s.counts.one_qubit},
                {"two_qubit_gates", s.counts.two_qubit},
                {"error_free_fraction", f}};
        if (i < ev.renormalization.size()) {
            const auto& r = ev.renormalization[i];
            js["renormalization"] = {{"error_free_factor", r.error_free_factor},
                                     {"other_factor", r.other_factor},
                                     {"saturated", r.saturated},
                                     {"warnings", r.warnings}};
            for (const auto& w : r.warnings) std::cerr << "warning (" << to_string(s.state) << "): " << w << "\n";
        }
        states.push_back(js);
        calib << s.counts.qubits << ' ' << s.counts.one_qubit << ' ' << s.counts.two_qubit << ' ' << f << '\n';
    }

    Json j{{"command", "evaluate"},
           {"code", {{"n", code.n}, {"k", code.k}, {"text", to_text(code)}}},
           {"noise", to_spec(noise)},
           {"backend", descriptor_json(inner->descriptor())},
           {"shots", a.shots},
           {"exact", a.exact},
           {"seed", g.seed},
           {"renormalize", opt.renormalize_with ? model_json(*opt.renormalize_with) : Json(nullptr)},
           {"p_nd", ev.report.p_nd},
           {"report", to_json(ev.report)},
           {"correction_table", to_json(ev.table)},
           {"states", states},
           {"job_store", "jobs"},
           {"jobs", backend.job_ids()}};
    write_json(out / "evaluation.json", j);
    write_text(out / "shots.txt", shot_table_to_text(ev.run.records));
    write_text(out / "calibration.txt", calib.str());
    std::cout << "code [[" << code.n << "," << code.k << "]] on " << inner->descriptor().name << (a.exact ? " (exact)" : "")
              << "\np_ND = " << fmt("%.10g", ev.report.p_nd) << "\nwrote " << (out / "evaluation.json").string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct LearnArgs {
    std::string noise = "p=0.01", agent = "mcts", routing = "threshold", backend = "auto", renormalize;
    size_t episodes = 100, max_qubits = 10, shots = 10000, exact_threshold = 10;
    double exploration = 1.0, epsilon = 0.2;
};

std::vector<PlotSeries> learning_series(const Json& learning, const std::string& label) {
    PlotSeries s{label, {}, true};
    for (const auto& b : learning.at("best_by_qubits")) s.points.emplace_back(double(b.at("n")), double(b.at("p_nd")));
    return {s};
}

int cmd_learn(const LearnArgs& a, const Globals& g) {
    LearningConfig cfg;
    cfg.noise = parse_noise_spec(a.noise);
    cfg.agent = agent_kind_from_string(a.agent);
    cfg.episodes = a.episodes;
    cfg.max_qubits = a.max_qubits;
    cfg.shots = a.shots;
    cfg.seed = g.seed;
    cfg.routing = eval_routing_from_string(a.routing);
    cfg.exact_threshold = a.exact_threshold;
    cfg.backend = a.backend;
    cfg.exploration = a.exploration;
    cfg.epsilon = a.epsilon;
    if (!a.renormalize.empty()) cfg.renormalize_with = parse_model(a.renormalize);
    fs::path out(g.out);
    auto r = run_learning(cfg, out);
    auto learning = Json::parse(read_text(out / "learning.json"));
    write_text(out / "pnd_vs_qubits.svg", pnd_vs_qubits_svg(learning_series(learning, to_spec(cfg.noise)), r.bare_qubit_p_nd));
    if (r.resumed_episodes) std::cout << "resumed " << r.resumed_episodes << " logged episodes\n";
    std::cout << "episodes " << r.episodes.size() << ", distinct codes " << r.ranking.size()
              << ", bare qubit p_ND = " << fmt("%.6g", r.bare_qubit_p_nd) << "\n";
    std::cout << "best per qubit count:\n";
    for (const auto& b : r.best_by_qubits)
        std::cout << "  n=" << b.code.n << "  p_ND=" << fmt("%.6g", b.p_nd) << "  (episode " << b.first_episode << ")\n";
    if (!r.ranking.empty())
        std::cout << "best: n=" << r.ranking.front().code.n << " p_ND=" << fmt("%.6g", r.ranking.front().p_nd) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_fit(const std::string& data, double alpha, const Globals& g) {
    auto runs = load_fit_runs(data);
    auto m = fit_fidelity(runs, alpha);
    Json pts = Json::array();
    for (const auto& r : runs)
        pts.push_back({{"qubits", r.counts.qubits},
                       {"one_qubit_gates", r.counts.one_qubit},
                       {"two_qubit_gates", r.counts.two_qubit},
                       {"observed", r.fraction},
                       {"predicted", m.fidelity(r.counts)}});
    fs::path out(g.out);
    write_json(out / "fit.json", {{"command", "fit"}, {"data", data}, {"runs", runs.size()}, {"model", model_json(m)}, {"points", pts}});
    write_text(out / "fit.svg", fit_scatter_svg(runs, m));
    std::cout << "log F_ex = " << fmt("%.6g", m.c_q) << " N_q + " << fmt("%.6g", m.c_1) << " N_1 + " << fmt("%.6g", m.c_2)
              << " N_2   (residual " << fmt("%.3g", m.residual_norm) << ", " << runs.size() << " runs)\n";
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_channel_check(std::vector<double> deltas, const Globals& g) {
    if (deltas.empty()) deltas = {0, 0.1, 0.3, 0.5, 0.9, 1};
    Json rows = Json::array();
    bool ok = true;
    double worst = 0;
    for (double d : deltas) {
        auto c = channel_check(d);
        rows.push_back(to_json(c));
        ok = ok && c.ok();
        worst = std::max(worst, c.max_distance());
        std::cout << "delta=" << fmt("%g", d) << "  max Choi trace distance " << fmt("%.3e", c.max_distance())
                  << "  |1> population " << fmt("%.12f", c.population) << " (expected "
                  << fmt("%.12f", c.expected_population) << ")  " << (c.ok() ? "ok" : "MISMATCH") << "\n";
    }
    write_json(fs::path(g.out) / "channel_check.json",
               {{"command", "channel-check"}, {"max_trace_distance", worst}, {"ok", ok}, {"checks", rows}});
    return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------

int cmd_report(const std::string& runs_dir, const Globals& g) {
    fs::path root(runs_dir);
    std::vector<fs::path> learning, fits, evals;
    if (fs::is_directory(root)) {
        std::vector<fs::path> files;
        for (const auto& e : fs::recursive_directory_iterator(root))
            if (e.is_regular_file()) files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            auto name = f.filename().string();
            if (name == "learning.json") learning.push_back(f);
            else if (name == "fit.json") fits.push_back(f);
            else if (name == "evaluation.json") evals.push_back(f);
        }
    }
    if (learning.empty() && fits.empty() && evals.empty()) {
        std::cout << "no runs found in " << runs_dir << "\n";
        return 0;
    }
    fs::path out(g.out);
    auto rel = [&](const fs::path& p) { return fs::relative(p.parent_path(), root).generic_string(); };
    Json jl = Json::array(), jf = Json::array(), je = Json::array();
    std::vector<PlotSeries> series;
    std::optional<double> bare;
    for (const auto& f : learning) {
        auto j = Json::parse(read_text(f));
        std::string label = rel(f) + " (" + j.at("config").at("noise").get<std::string>() + ")";
        auto s = learning_series(j, label);
        series.insert(series.end(), s.begin(), s.end());
        if (!bare) bare = j.at("bare_qubit_p_nd").get<double>();
        Json best = Json::array();
        for (const auto& b : j.at("best_by_qubits")) best.push_back({{"n", b.at("n")}, {"p_nd", b.at("p_nd")}});
        jl.push_back({{"run", rel(f)},
                      {"noise", j.at("config").at("noise")},
                      {"agent", j.at("config").at("agent")},
                      {"episodes", j.at("episodes")},
                      {"bare_qubit_p_nd", j.at("bare_qubit_p_nd")},
                      {"best_by_qubits", best}});
        std::cout << "learning run " << rel(f) << ": bare " << fmt("%.6g", j.at("bare_qubit_p_nd").get<double>());
        for (const auto& b : j.at("best_by_qubits"))
            std::cout << "  n=" << b.at("n").get<size_t>() << ":" << fmt("%.6g", b.at("p_nd").get<double>());
        std::cout << "\n";
    }
    for (size_t i = 0; i < fits.size(); ++i) {
        auto j = Json::parse(read_text(fits[i]));
        std::vector<FitRun> runs;
        for (const auto& p : j.at("points"))
            runs.push_back({{p.at("qubits"), p.at("one_qubit_gates"), p.at("two_qubit_gates")}, p.at("observed")});
        const auto& m = j.at("model");
        FidelityModel model{m.at("c_q"), m.at("c_1"), m.at("c_2"), m.at("alpha"), m.at("residual_norm")};
        std::string svg = "report_fit_" + std::to_string(i) + ".svg";
        write_text(out / svg, fit_scatter_svg(runs, model));
        jf.push_back({{"run", rel(fits[i])}, {"model", m}, {"runs", runs.size()}, {"plot", svg}});
        std::cout << "fit " << rel(fits[i]) << ": c_q=" << fmt("%.4g", model.c_q) << " c_1=" << fmt("%.4g", model.c_1)
                  << " c_2=" << fmt("%.4g", model.c_2) << "\n";
    }
    for (const auto& f : evals) {
        auto j = Json::parse(read_text(f));
        je.push_back({{"run", rel(f)},
                      {"n", j.at("code").at("n")},
                      {"noise", j.at("noise")},
                      {"backend", j.at("backend").at("name")},
                      {"exact", j.at("exact")},
                      {"p_nd", j.at("p_nd")}});
        std::cout << "evaluation " << rel(f) << ": n=" << j.at("code").at("n").get<size_t>()
                  << " p_ND=" << fmt("%.6g", j.at("p_nd").get<double>()) << "\n";
    }
    if (!series.empty()) write_text(out / "report_pnd_vs_qubits.svg", pnd_vs_qubits_svg(series, bare));
    write_json(out / "report.json", {{"command", "report"}, {"learning", jl}, {"fits", jf}, {"evaluations", je}});
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_backends_list(const Globals& g) {
    Json arr = Json::array();
    for (const auto& name : backend_names()) {
        auto b = make_backend(name, g.threads);
        const auto& d = b->descriptor();
        arr.push_back(descriptor_json(d));
        std::string caps;
        for (const auto& c : d.capabilities) caps += (caps.empty() ? "" : ",") + c;
        std::printf("%-18s cap %-5zu %-38s %s\n", d.name.c_str(), d.qubit_cap, caps.c_str(), d.summary.c_str());
    }
    write_json(fs::path(g.out) / "backends.json", {{"command", "backends list"}, {"backends", arr}});
    return 0;
}

JobStore open_store(const std::string& dir) {
    if (!fs::exists(fs::path(dir) / "index.jsonl")) throw UsageError("no job store at " + dir);
    return JobStore(dir);
}

int cmd_jobs_list(const std::string& store_dir) {
    JobStore store = open_store(store_dir);
    for (const auto& r : store.jobs())
        std::cout << r.id << "  " << to_string(r.status) << "  " << r.backend << "  " << (r.exact ? "exact" : std::to_string(r.shots) + " shots")
                  << "  noise " << r.noise_spec << "\n";
    return 0;
}

int cmd_jobs_show(const std::string& store_dir, const std::string& id) {
    JobStore store = open_store(store_dir);
    auto r = store.find(id);
    if (!r) throw UsageError("unknown job id '" + id + "'");
    std::cout << to_json(*r).dump(2) << "\n";
    return 0;
}

int cmd_jobs_replay(const std::string& store_dir, const std::string& id, const Globals& g) {
    JobStore store = open_store(store_dir);
    auto r = store.find(id);
    if (!r) throw UsageError("unknown job id '" + id + "'");
    Json j{{"command", "jobs replay"}, {"id", id}, {"record", to_json(*r)}};
    std::map<std::string, double> hist;
    size_t m = 0;
    if (r->exact) {
        auto d = store.replay_exact(id);
        m = d.num_measurements;
        for (const auto& [k, p] : d.probs) hist[bits_to_string(k, m)] += p;
    } else {
        auto res = store.replay(id);
        m = res.num_measurements;
        for (auto w : res.shots) hist[bits_to_string(w, m)] += 1;
    }
    Json h = Json::object();
    for (const auto& [k, v] : hist) h[k] = v;
    j["measurements"] = m;
    j["outcomes"] = h;
    j["verified"] = true;
    write_json(fs::path(g.out) / ("replay_" + id + ".json"), j);
    std::cout << "job " << id << " (" << r->backend << "): result verified against " << r->result_hash.substr(0, 12) << "..., "
              << hist.size() << " distinct outcomes over " << m << " measurements\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qlego: build, evaluate and search stabilizer codes from lego blocks"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
    app.add_option("--out", g.out, "Output directory for artifacts")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker threads for local simulation")->capture_default_str()->check(CLI::PositiveNumber);

    EvaluateArgs ea;
    auto* ev = app.add_subcommand("evaluate", "Run the error-correction protocol on one code and report p_ND");
    ev->add_option("--code", ea.code, "Check-matrix file")->check(CLI::ExistingFile);
    ev->add_option("--network", ea.network, "Lego network file")->check(CLI::ExistingFile);
    ev->add_option("--noise", ea.noise, "Noise spec, e.g. p=0.01 or px=0.02,delta=0.1")->required();
    ev->add_option("--backend", ea.backend, "Backend name or auto")->capture_default_str();
    ev->add_option("--shots", ea.shots, "Total shots over all prepared states")->capture_default_str()->check(CLI::PositiveNumber);
    ev->add_flag("--exact", ea.exact, "Use exact outcome distributions");
    ev->add_option("--states", ea.states, "six, three, or a list like +X,-Z")->capture_default_str();
    ev->add_option("--layout", ea.layout, "Coupling-graph file to route onto")->check(CLI::ExistingFile);
    ev->add_option("--renormalize", ea.renormalize, "Fidelity model c_q,c_1,c_2[,alpha]");
    ev->add_option("--model", ea.model_file, "fit.json to renormalize with")->check(CLI::ExistingFile);
    ev->add_option("--mock-model", ea.mock_model, "mock-remote device model c_q,c_1,c_2");
    ev->add_option("--latency-ms", ea.latency_ms, "mock-remote latency per job")->capture_default_str();

    LearnArgs la;
    auto* lr = app.add_subcommand("learn", "Search for codes with a lego-building agent");
    lr->add_option("--noise", la.noise, "Noise spec")->capture_default_str();
    lr->add_option("--agent", la.agent, "mcts, greedy-epsilon or random")->capture_default_str();
    lr->add_option("--episodes", la.episodes, "Episode budget")->capture_default_str()->check(CLI::PositiveNumber);
    lr->add_option("--max-qubits", la.max_qubits, "Largest physical qubit count")->capture_default_str()->check(CLI::PositiveNumber);
    lr->add_option("--shots", la.shots, "Shots per sampled evaluation")->capture_default_str()->check(CLI::PositiveNumber);
    lr->add_option("--routing", la.routing, "threshold, exact or sampled")->capture_default_str();
    lr->add_option("--exact-threshold", la.exact_threshold, "Largest code evaluated exactly under threshold routing")
        ->capture_default_str();
    lr->add_option("--backend", la.backend, "Backend name or auto")->capture_default_str();
    lr->add_option("--exploration", la.exploration, "UCB1 exploration constant")->capture_default_str();
    lr->add_option("--epsilon", la.epsilon, "Exploration rate of the greedy-epsilon agent")->capture_default_str();
    lr->add_option("--renormalize", la.renormalize, "Fidelity model c_q,c_1,c_2[,alpha]");

    std::string fit_data;
    double alpha = 1.0;
    auto* ft = app.add_subcommand("fit", "Fit log F_ex = c_q N_q + c_1 N_1 + c_2 N_2 to calibration runs");
    ft->add_option("--data", fit_data, "Lines of 'N_q N_1 N_2 fraction'")->required()->check(CLI::ExistingFile);
    ft->add_option("--alpha", alpha, "Renormalization exponent stored with the model")->capture_default_str();

    std::vector<double> deltas;
    auto* cc = app.add_subcommand("channel-check", "Compare the relaxation map, gadget and amplitude damping");
    cc->alias("channel_check");
    cc->add_option("--delta", deltas, "Relaxation strength(s); default 0,0.1,0.3,0.5,0.9,1")->check(CLI::Range(0.0, 1.0));

    std::string runs_dir;
    auto* rp = app.add_subcommand("report", "Summarize persisted runs and render plots");
    rp->add_option("--runs", runs_dir, "Directory holding run outputs")->required();

    auto* bk = app.add_subcommand("backends", "Execution backends");
    bk->require_subcommand(1);
    auto* bk_list = bk->add_subcommand("list", "List built-in backends");

    std::string store_dir, job_id;
    auto* jb = app.add_subcommand("jobs", "Inspect and replay recorded jobs");
    jb->require_subcommand(1);
    jb->add_option("--store", store_dir, "Job store directory (default <out>/jobs)");
    auto* jb_list = jb->add_subcommand("list", "List recorded jobs");
    auto* jb_show = jb->add_subcommand("show", "Print a job record");
    jb_show->add_option("id", job_id, "Job id")->required();
    auto* jb_replay = jb->add_subcommand("replay", "Verify and replay a job's stored result");
    jb_replay->add_option("id", job_id, "Job id")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (store_dir.empty()) store_dir = (fs::path(g.out) / "jobs").string();
        if (*ev) return cmd_evaluate(ea, g);
        if (*lr) return cmd_learn(la, g);
        if (*ft) return cmd_fit(fit_data, alpha, g);
        if (*cc) return cmd_channel_check(deltas, g);
        if (*rp) return cmd_report(runs_dir, g);
        if (*bk_list) return cmd_backends_list(g);
        if (*jb_list) return cmd_jobs_list(store_dir);
        if (*jb_show) return cmd_jobs_show(store_dir, job_id);
        if (*jb_replay) return cmd_jobs_replay(store_dir, job_id, g);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
