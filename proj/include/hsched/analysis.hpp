#pragma once

#include <vector>

#include "hsched/engine.hpp"

namespace hsched {

// max(total work / P, longest span): no schedule on P processors finishes
// earlier.
double lower_bound(const std::vector<MalleableJob>& jobs, int processors);

// Independent reference for equal-share allocation: allocations are
// min(desire, lambda) for the water level lambda that either exhausts the
// amount or tops every desire. Agrees with deq_allocate elementwise.
AllocationVector water_filling(const DesireMap& desires, double amount);

// Transition factor recovered from a trace: the largest ratio between
// parallelism reported in adjacent quanta of any single job.
double measure_transition_factor(const Trace& trace);

struct BoundReport {
    double transition_factor = 1.0;
    double alpha = 0.0;  // max over jobs of satisfied_time / span
    double beta = 0.0;   // max over jobs of total_allocation / work
    double makespan_bound = 0.0;
    bool lemma_pass = true;
    bool theorem_pass = true;
    bool asserted = false;  // bounds are guarantees only for AC feedback, QF=1, CF=0
    std::vector<int> violations;  // job ids past a lemma bound
};

// Checks, per job, satisfied time against (c+1) * span and allocated area
// against (c+1) * work, and the makespan against
// (c+1) * (release_k + span_k) + (c+1) * total_work / P for the last
// finisher k. Each side carries slack_quanta * L of discretization slack
// (the area bound scales it by P).
BoundReport check_bounds(const SimConfig& cfg, const SimResult& result,
                         double slack_quanta = 2.0);

}  // namespace hsched
