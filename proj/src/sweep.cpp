#include "hsched/sweep.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "hsched/util.hpp"
#include "json.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hsched {

void ExperimentSpec::validate() const {
    workload.validate();
    if (policies.empty()) throw std::invalid_argument("config: policies must not be empty");
    if (levels.empty()) throw std::invalid_argument("config: levels must not be empty");
    if (quantum_factors.empty())
        throw std::invalid_argument("config: quantum_factors must not be empty");
    if (cost_factors.empty()) throw std::invalid_argument("config: cost_factors must not be empty");
    if (repetitions < 1) throw std::invalid_argument("config: repetitions must be >= 1");
    for (int k : levels)
        if (k < 2) throw std::invalid_argument("config: levels entries must be >= 2");
    for (int q : quantum_factors)
        if (q < 1) throw std::invalid_argument("config: quantum_factors entries must be >= 1");
    for (double c : cost_factors)
        if (c < 0.0) throw std::invalid_argument("config: cost_factors entries must be >= 0");
    for (int n : job_counts)
        if (n < 0) throw std::invalid_argument("config: job_counts entries must be >= 0");
}

std::vector<int> ExperimentSpec::resolved_job_counts() const {
    if (!job_counts.empty()) return job_counts;
    std::vector<int> out;
    for (int n = 20; n <= 500; n += 20) out.push_back(n);
    return out;
}

std::uint64_t workload_seed(std::uint64_t master, int jobs, int rep) {
    std::uint64_t h = mix64(master ^ 0x776f726b6c6f6164ull);  // "workload"
    h = mix64(h ^ (std::uint64_t)jobs);
    return mix64(h ^ (std::uint64_t)rep);
}

std::uint64_t sim_seed(std::uint64_t master, int levels, int jobs, int rep) {
    std::uint64_t h = mix64(master ^ 0x73696d7472656500ull);  // "simtree"
    h = mix64(h ^ (std::uint64_t)levels);
    h = mix64(h ^ (std::uint64_t)jobs);
    return mix64(h ^ (std::uint64_t)rep);
}

namespace {

using nlohmann::json;

void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
                    const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) { ok = true; break; }
        if (!ok) throw std::invalid_argument("config: unknown key '" + key + "'" + where);
    }
}

void parse_workload_section(const json& j, WorkloadConfig& wc) {
    reject_unknown(j,
                   {"offered_load", "job_count", "parallelism_range", "work_range", "max_span",
                    "phase_span_length", "impulse_width"},
                   " in workload section");
    if (j.contains("offered_load")) wc.offered_load = j["offered_load"].get<double>();
    if (j.contains("job_count")) wc.job_count = j["job_count"].get<int>();
    if (j.contains("parallelism_range")) {
        wc.parallelism_min = j["parallelism_range"].at(0).get<double>();
        wc.parallelism_max = j["parallelism_range"].at(1).get<double>();
    }
    if (j.contains("work_range")) {
        wc.work_min = j["work_range"].at(0).get<double>();
        wc.work_max = j["work_range"].at(1).get<double>();
    }
    if (j.contains("max_span")) wc.max_span = j["max_span"].get<double>();
    if (j.contains("phase_span_length")) wc.phase_span_length = j["phase_span_length"].get<double>();
    if (j.contains("impulse_width")) wc.impulse_width = j["impulse_width"].get<double>();
}

}  // namespace

ExperimentSpec parse_config_stream(std::istream& in, const std::string& origin) {
    ExperimentSpec spec;
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    bool blank = text.find_first_not_of(" \t\r\n") == std::string::npos;
    if (!blank) {
        json j;
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            throw std::invalid_argument(origin + ": " + e.what());
        }
        reject_unknown(j,
                       {"processors", "base_quantum", "branching", "policies", "levels",
                        "quantum_factors", "cost_factors", "job_counts", "repetitions",
                        "master_seed", "output", "workload", "ag"},
                       "");
        if (j.contains("processors")) spec.sim.total_processors = j["processors"].get<int>();
        if (j.contains("base_quantum")) spec.sim.base_quantum = j["base_quantum"].get<double>();
        if (j.contains("branching")) {
            spec.sim.branch_min = j["branching"].at(0).get<int>();
            spec.sim.branch_max = j["branching"].at(1).get<int>();
        }
        if (j.contains("policies")) {
            spec.policies.clear();
            for (const auto& p : j["policies"])
                spec.policies.push_back(policy_from_name(p.get<std::string>()));
        }
        if (j.contains("levels")) spec.levels = j["levels"].get<std::vector<int>>();
        if (j.contains("quantum_factors"))
            spec.quantum_factors = j["quantum_factors"].get<std::vector<int>>();
        if (j.contains("cost_factors"))
            spec.cost_factors = j["cost_factors"].get<std::vector<double>>();
        if (j.contains("job_counts")) spec.job_counts = j["job_counts"].get<std::vector<int>>();
        if (j.contains("repetitions")) spec.repetitions = j["repetitions"].get<int>();
        if (j.contains("master_seed")) spec.master_seed = j["master_seed"].get<std::uint64_t>();
        if (j.contains("output")) spec.output_dir = j["output"].get<std::string>();
        if (j.contains("workload")) parse_workload_section(j["workload"], spec.workload);
        if (j.contains("ag")) {
            reject_unknown(j["ag"], {"threshold", "multiplier"}, " in ag section");
            if (j["ag"].contains("threshold"))
                spec.sim.ag_threshold = j["ag"]["threshold"].get<double>();
            if (j["ag"].contains("multiplier"))
                spec.sim.ag_multiplier = j["ag"]["multiplier"].get<double>();
        }
    }
    spec.workload.total_processors = spec.sim.total_processors;
    spec.validate();
    return spec;
}

ExperimentSpec parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    return parse_config_stream(in, path);
}

namespace {

struct RunPoint {
    PolicyKind policy;
    int levels;
    int qf;
    double cf;
    int jobs;
    int rep;
};

struct RunOut {
    bool ok = false;
    double makespan = 0.0;
    double utilization = 1.0;
    double transition_factor = 1.0;
    double alpha = 0.0;
    double beta = 0.0;
    bool lemma_pass = true;
    bool theorem_pass = true;
    std::string error;
};

RunOut one_run(const ExperimentSpec& spec, const RunPoint& pt, SingleRun* full) {
    WorkloadConfig wc = spec.workload;
    wc.total_processors = spec.sim.total_processors;
    wc.job_count = pt.jobs;
    wc.offered_load = std::max(pt.jobs / 160.0, 1e-3);  // load model couples rho to n
    wc.seed = workload_seed(spec.master_seed, pt.jobs, pt.rep);
    auto jobs = generate_workload(wc);

    SimConfig sc = spec.sim;
    sc.policy = pt.policy;
    sc.levels = pt.levels;
    sc.quantum_factor = pt.qf;
    sc.cost_factor = pt.cf;
    sc.seed = sim_seed(spec.master_seed, pt.levels, pt.jobs, pt.rep);
    std::mt19937_64 tree_rng(mix64(sc.seed ^ 0x7472656500ull));
    Hierarchy tree = generate_tree(sc, tree_rng);

    SimResult res = run(sc, jobs, tree, full ? &full->trace : nullptr);
    BoundReport br = check_bounds(sc, res);

    RunOut out;
    out.ok = true;
    out.makespan = res.makespan;
    out.utilization = res.utilization;
    out.transition_factor = br.transition_factor;
    out.alpha = br.alpha;
    out.beta = br.beta;
    out.lemma_pass = br.lemma_pass;
    out.theorem_pass = br.theorem_pass;
    if (full) {
        full->jobs = std::move(jobs);
        full->result = std::move(res);
        full->bounds = br;
    }
    return out;
}

RunOut safe_run(const ExperimentSpec& spec, const RunPoint& pt) {
    try {
        return one_run(spec, pt, nullptr);
    } catch (const std::exception& e) {
        RunOut out;
        out.ok = false;
        out.error = e.what();
        return out;
    }
}

std::string point_label(const RunPoint& pt) {
    std::ostringstream os;
    os << "policy=" << policy_name(pt.policy) << " K=" << pt.levels << " QF=" << pt.qf
       << " CF=" << format_double(pt.cf) << " n=" << pt.jobs;
    return os.str();
}

}  // namespace

ResultTable run_sweep(const ExperimentSpec& spec, ExecMode mode) {
    spec.validate();
    const auto counts = spec.resolved_job_counts();

    std::vector<RunPoint> points;
    for (PolicyKind pol : spec.policies)
        for (int k : spec.levels)
            for (int qf : spec.quantum_factors)
                for (double cf : spec.cost_factors)
                    for (int n : counts)
                        for (int rep = 0; rep < spec.repetitions; ++rep)
                            points.push_back({pol, k, qf, cf, n, rep});

    std::vector<RunOut> outs(points.size());
    const int total = (int)points.size();
    if (mode == ExecMode::Parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
        for (int i = 0; i < total; ++i) outs[i] = safe_run(spec, points[i]);
    } else {
        for (int i = 0; i < total; ++i) outs[i] = safe_run(spec, points[i]);
    }

    ResultTable table;
    table.master_seed = spec.master_seed;
    table.repetitions = spec.repetitions;
    table.has_ratio =
        std::find(spec.policies.begin(), spec.policies.end(), PolicyKind::EquiEqui) !=
        spec.policies.end();

    for (size_t base = 0; base < points.size(); base += spec.repetitions) {
        const RunPoint& pt = points[base];
        ResultRow row;
        row.policy = pt.policy;
        row.levels = pt.levels;
        row.quantum_factor = pt.qf;
        row.cost_factor = pt.cf;
        row.jobs = pt.jobs;
        bool failed = false;
        for (int r = 0; r < spec.repetitions; ++r) {
            const RunOut& o = outs[base + r];
            if (!o.ok) {
                table.errors.push_back(point_label(pt) + " rep=" + std::to_string(r) + ": " +
                                       o.error);
                failed = true;
                continue;
            }
            row.makespan += o.makespan;
            row.utilization += o.utilization;
            row.transition_factor = std::max(row.transition_factor, o.transition_factor);
            row.alpha = std::max(row.alpha, o.alpha);
            row.beta = std::max(row.beta, o.beta);
            row.lemma_pass = row.lemma_pass && o.lemma_pass;
            row.theorem_pass = row.theorem_pass && o.theorem_pass;
        }
        if (failed) continue;
        row.makespan /= spec.repetitions;
        row.utilization /= spec.repetitions;
        table.rows.push_back(row);
    }

    if (table.has_ratio) {
        std::map<std::tuple<int, int, double, int>, double> equi;
        for (const ResultRow& r : table.rows)
            if (r.policy == PolicyKind::EquiEqui)
                equi[{r.levels, r.quantum_factor, r.cost_factor, r.jobs}] = r.makespan;
        for (ResultRow& r : table.rows) {
            auto it = equi.find({r.levels, r.quantum_factor, r.cost_factor, r.jobs});
            if (it != equi.end() && r.makespan > 0.0)
                r.makespan_ratio = it->second / r.makespan;
            else
                r.makespan_ratio = 1.0;
        }
    }
    return table;
}

void write_csv(std::ostream& out, const ResultTable& table) {
    out << "seed,policy,K,QF,CF,n,makespan,utilization";
    if (table.has_ratio) out << ",makespan_ratio";
    out << ",c,alpha,beta,lemma_pass,theorem_pass\n";
    for (const ResultRow& r : table.rows) {
        out << table.master_seed << ',' << policy_name(r.policy) << ',' << r.levels << ','
            << r.quantum_factor << ',' << format_double(r.cost_factor) << ',' << r.jobs << ','
            << format_double(r.makespan) << ',' << format_double(r.utilization);
        if (table.has_ratio) out << ',' << format_double(r.makespan_ratio);
        out << ',' << format_double(r.transition_factor) << ',' << format_double(r.alpha) << ','
            << format_double(r.beta) << ',' << (r.lemma_pass ? 1 : 0) << ','
            << (r.theorem_pass ? 1 : 0) << '\n';
    }
}

std::string csv_string(const ResultTable& table) {
    std::ostringstream os;
    write_csv(os, table);
    return os.str();
}

void write_json(std::ostream& out, const ResultTable& table) {
    json j;
    j["format"] = "hsched-results";
    j["version"] = 1;
    j["master_seed"] = table.master_seed;
    j["repetitions"] = table.repetitions;
    j["has_ratio"] = table.has_ratio;
    j["errors"] = table.errors;
    json rows = json::array();
    for (const ResultRow& r : table.rows) {
        json jr;
        jr["policy"] = policy_name(r.policy);
        jr["levels"] = r.levels;
        jr["quantum_factor"] = r.quantum_factor;
        jr["cost_factor"] = r.cost_factor;
        jr["jobs"] = r.jobs;
        jr["makespan"] = r.makespan;
        jr["utilization"] = r.utilization;
        jr["makespan_ratio"] = r.makespan_ratio;
        jr["transition_factor"] = r.transition_factor;
        jr["alpha"] = r.alpha;
        jr["beta"] = r.beta;
        jr["lemma_pass"] = r.lemma_pass;
        jr["theorem_pass"] = r.theorem_pass;
        rows.push_back(std::move(jr));
    }
    j["rows"] = std::move(rows);
    out << j.dump(2) << "\n";
}

ResultTable table_from_json(std::istream& in) {
    json j = json::parse(in);
    if (j.value("format", "") != "hsched-results")
        throw std::invalid_argument("results file: missing hsched-results format tag");
    ResultTable table;
    table.master_seed = j.at("master_seed").get<std::uint64_t>();
    table.repetitions = j.at("repetitions").get<int>();
    table.has_ratio = j.at("has_ratio").get<bool>();
    table.errors = j.at("errors").get<std::vector<std::string>>();
    for (const auto& jr : j.at("rows")) {
        ResultRow r;
        r.policy = policy_from_name(jr.at("policy").get<std::string>());
        r.levels = jr.at("levels").get<int>();
        r.quantum_factor = jr.at("quantum_factor").get<int>();
        r.cost_factor = jr.at("cost_factor").get<double>();
        r.jobs = jr.at("jobs").get<int>();
        r.makespan = jr.at("makespan").get<double>();
        r.utilization = jr.at("utilization").get<double>();
        r.makespan_ratio = jr.at("makespan_ratio").get<double>();
        r.transition_factor = jr.at("transition_factor").get<double>();
        r.alpha = jr.at("alpha").get<double>();
        r.beta = jr.at("beta").get<double>();
        r.lemma_pass = jr.at("lemma_pass").get<bool>();
        r.theorem_pass = jr.at("theorem_pass").get<bool>();
        table.rows.push_back(r);
    }
    return table;
}

SingleRun single_run(const ExperimentSpec& spec, bool with_trace) {
    spec.validate();
    RunPoint pt{spec.policies.at(0), spec.levels.at(0), spec.quantum_factors.at(0),
                spec.cost_factors.at(0), spec.resolved_job_counts().at(0), 0};
    SingleRun sr;
    one_run(spec, pt, &sr);
    if (!with_trace) sr.trace = Trace{};
    return sr;
}

}  // namespace hsched
