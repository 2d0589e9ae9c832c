#include <chrono>
#include <iostream>

#include "hsched/sweep.hpp"
#include "hsched/util.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace hsched;

namespace {

double time_sweep(const ExperimentSpec& spec, ExecMode mode, ResultTable& out) {
    auto t0 = std::chrono::steady_clock::now();
    out = run_sweep(spec, mode);
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    bool big = argc > 1 && std::string(argv[1]) == "--big";

    ExperimentSpec spec;
    spec.policies = {PolicyKind::AcDs, PolicyKind::EquiEqui};
    spec.levels = {2, 3};
    spec.quantum_factors = {1};
    spec.cost_factors = {0.0};
    spec.job_counts = big ? std::vector<int>{80, 160, 240} : std::vector<int>{40, 80};
    spec.repetitions = big ? 10 : 4;
    spec.master_seed = 7;

    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    std::cout << "grid: " << spec.policies.size() * spec.levels.size() * spec.job_counts.size()
              << " points x " << spec.repetitions << " repetitions, " << threads
              << " thread(s) available\n";

    ResultTable serial_table, parallel_table;
    double ts = time_sweep(spec, ExecMode::Serial, serial_table);
    double tp = time_sweep(spec, ExecMode::Parallel, parallel_table);

    bool same = csv_string(serial_table) == csv_string(parallel_table);
    std::cout << "serial   " << format_double(ts) << " s\n";
    std::cout << "parallel " << format_double(tp) << " s\n";
    std::cout << "speedup  " << format_double(ts / tp) << "x\n";
    std::cout << "tables " << (same ? "identical" : "DIFFER") << "\n";
    return same ? 0 : 1;
}
