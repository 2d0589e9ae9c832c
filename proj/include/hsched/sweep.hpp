#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hsched/analysis.hpp"
#include "hsched/engine.hpp"
#include "hsched/workload.hpp"

namespace hsched {

struct ExperimentSpec {
    WorkloadConfig workload;  // base; seed, job_count and load are set per run
    SimConfig sim;            // base; policy/levels/QF/CF and seed are set per run
    std::vector<PolicyKind> policies{PolicyKind::AcDs, PolicyKind::AgDs, PolicyKind::EquiEqui};
    std::vector<int> levels{2, 3, 4, 5};
    std::vector<int> quantum_factors{1};
    std::vector<double> cost_factors{0.0};
    std::vector<int> job_counts;  // filled with 20..500 step 20 when empty
    int repetitions = 10;
    std::uint64_t master_seed = 0;
    std::string output_dir = ".";

    void validate() const;
    std::vector<int> resolved_job_counts() const;
};

// Empty or missing keys fall back to defaults; unknown keys are rejected by
// name. An empty file yields the full default grid.
ExperimentSpec parse_config(const std::string& path);
ExperimentSpec parse_config_stream(std::istream& in, const std::string& origin);

// Per-run seeds. Workload seeds ignore the scheduling axes so every policy,
// tree depth and quantum setting replays the same job set; tree/attachment
// seeds additionally key on the depth.
std::uint64_t workload_seed(std::uint64_t master, int jobs, int rep);
std::uint64_t sim_seed(std::uint64_t master, int levels, int jobs, int rep);

struct ResultRow {
    PolicyKind policy = PolicyKind::AcDs;
    int levels = 2;
    int quantum_factor = 1;
    double cost_factor = 0.0;
    int jobs = 0;
    double makespan = 0.0;         // mean over repetitions
    double utilization = 0.0;      // mean over repetitions
    double makespan_ratio = 1.0;   // EQUI-EQUI mean makespan / this policy's
    double transition_factor = 1.0;
    double alpha = 0.0;
    double beta = 0.0;
    bool lemma_pass = true;
    bool theorem_pass = true;
};

struct ResultTable {
    std::uint64_t master_seed = 0;
    int repetitions = 0;
    bool has_ratio = false;  // EQUI-EQUI baseline present
    std::vector<ResultRow> rows;
    std::vector<std::string> errors;  // diagnostics from failed grid points
};

enum class ExecMode { Serial, Parallel };

// Run the whole grid (policies x levels x QF x CF x job counts), averaging
// repetitions. Parallel mode farms independent runs out with OpenMP; both
// modes produce identical tables. A failing grid point is dropped from the
// rows and recorded in errors; the rest of the grid still runs.
ResultTable run_sweep(const ExperimentSpec& spec, ExecMode mode = ExecMode::Parallel);

void write_csv(std::ostream& out, const ResultTable& table);
std::string csv_string(const ResultTable& table);
void write_json(std::ostream& out, const ResultTable& table);
ResultTable table_from_json(std::istream& in);

// One simulation run plus its bound report, for the CLI run command.
struct SingleRun {
    std::vector<MalleableJob> jobs;
    SimResult result;
    BoundReport bounds;
    Trace trace;
};

SingleRun single_run(const ExperimentSpec& spec, bool with_trace);

}  // namespace hsched
