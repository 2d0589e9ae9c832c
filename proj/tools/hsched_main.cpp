#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "hsched/sweep.hpp"
#include "hsched/util.hpp"
#include "hsched/verify.hpp"

namespace {

namespace fs = std::filesystem;
using namespace hsched;

std::ofstream open_out(const fs::path& p) {
    std::ofstream out(p);
    if (!out) throw std::invalid_argument("cannot open for writing: " + p.string());
    return out;
}

int cmd_gen(const ExperimentSpec& spec, int jobs_override, const fs::path& dir) {
    WorkloadConfig wc = spec.workload;
    wc.total_processors = spec.sim.total_processors;
    if (jobs_override >= 0) {
        wc.job_count = jobs_override;
        wc.offered_load = std::max(jobs_override / 160.0, 1e-3);
    }
    wc.seed = workload_seed(spec.master_seed, wc.resolved_job_count(), 0);
    auto jobs = generate_workload(wc);
    fs::path p = dir / "workload.json";
    auto out = open_out(p);
    save_workload(out, jobs);
    std::cout << "wrote " << jobs.size() << " jobs to " << p.string() << "\n";
    return 0;
}

int cmd_run(const ExperimentSpec& spec, const fs::path& dir) {
    SingleRun sr = single_run(spec, true);
    {
        auto out = open_out(dir / "trace.txt");
        write_trace(out, sr.trace);
    }
    {
        ResultTable t;
        t.master_seed = spec.master_seed;
        t.repetitions = 1;
        ResultRow row;
        row.policy = spec.policies.at(0);
        row.levels = spec.levels.at(0);
        row.quantum_factor = spec.quantum_factors.at(0);
        row.cost_factor = spec.cost_factors.at(0);
        row.jobs = (int)sr.jobs.size();
        row.makespan = sr.result.makespan;
        row.utilization = sr.result.utilization;
        row.transition_factor = sr.bounds.transition_factor;
        row.alpha = sr.bounds.alpha;
        row.beta = sr.bounds.beta;
        row.lemma_pass = sr.bounds.lemma_pass;
        row.theorem_pass = sr.bounds.theorem_pass;
        t.rows.push_back(row);
        auto out = open_out(dir / "metrics.csv");
        write_csv(out, t);
    }
    {
        auto out = open_out(dir / "workload.json");
        save_workload(out, sr.jobs);
    }
    std::cout << "makespan " << format_double(sr.result.makespan) << ", utilization "
              << format_double(sr.result.utilization) << ", c "
              << format_double(sr.bounds.transition_factor) << ", bounds "
              << (sr.bounds.lemma_pass && sr.bounds.theorem_pass ? "pass" : "fail")
              << (sr.bounds.asserted ? "" : " (informational)") << "\n";
    return 0;
}

int cmd_sweep(const ExperimentSpec& spec, const std::string& format, const fs::path& dir) {
    ResultTable table = run_sweep(spec, ExecMode::Parallel);
    for (const std::string& e : table.errors) std::cerr << "grid point failed: " << e << "\n";
    fs::path p = dir / (format == "json" ? "results.json" : "results.csv");
    auto out = open_out(p);
    if (format == "json")
        write_json(out, table);
    else
        write_csv(out, table);
    std::cout << "wrote " << table.rows.size() << " rows to " << p.string() << "\n";
    if (table.rows.empty() && !table.errors.empty()) return 1;
    return 0;
}

int cmd_verify() {
    auto suites = builtin_suites();
    bool all = true;
    for (const SuiteResult& s : suites) {
        std::cout << (s.pass ? "[PASS] " : "[FAIL] ") << s.name << ": " << s.detail << "\n";
        all = all && s.pass;
    }
    return all ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum-driven simulator for hierarchical scheduling of malleable jobs"};
    app.require_subcommand(1);

    std::string config_path, out_dir, format = "csv";
    std::uint64_t seed = 0;
    int jobs = -1;
    bool seed_set = false, out_set = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "experiment config file (JSON)");
        sub->add_option("--seed", seed, "master seed override")
            ->each([&](const std::string&) { seed_set = true; });
        sub->add_option("--out", out_dir, "output directory")
            ->each([&](const std::string&) { out_set = true; });
        sub->add_option("--format", format, "results format")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--jobs", jobs, "job count override")->check(CLI::NonNegativeNumber);
    };

    CLI::App* gen = app.add_subcommand("gen", "sample a workload and write workload.json");
    CLI::App* runc = app.add_subcommand("run", "one simulation run; writes trace and metrics");
    CLI::App* sweep = app.add_subcommand("sweep", "run the experiment grid; writes results");
    CLI::App* verify = app.add_subcommand("verify", "run the builtin self-check suites");
    for (CLI::App* sub : {gen, runc, sweep, verify}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        ExperimentSpec spec;
        if (!config_path.empty()) spec = parse_config(config_path);
        if (seed_set) spec.master_seed = seed;
        if (jobs >= 0) spec.job_counts = {jobs};
        if (out_set) spec.output_dir = out_dir;
        spec.validate();
        fs::path dir(spec.output_dir);
        if (!dir.empty()) fs::create_directories(dir);

        if (*verify) return cmd_verify();
        if (*gen) return cmd_gen(spec, jobs, dir);
        if (*runc) return cmd_run(spec, dir);
        if (*sweep) return cmd_sweep(spec, format, dir);
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
