#pragma once

#include <vector>

#include "hsched/workload.hpp"

namespace hsched {

// Progress made by one job over one advance call.
struct ExecDelta {
    double work_done = 0.0;
    double span_done = 0.0;
    double wall_time = 0.0;
    bool completed = false;
};

// One job's aggregate over a quantum, used to set its next desire.
struct QuantumStats {
    double work = 0.0;
    double span = 0.0;
    double avg_parallelism = 1.0;
};

struct JobExecState {
    int job_id = -1;
    int phase_index = 0;
    double span_progress = 0.0;   // within the current phase
    double remaining_work = 0.0;
    double initial_work = 0.0;
    double desire = 1.0;
    double allocation = 0.0;
    double satisfied_time = 0.0;
    double deprived_time = 0.0;
    double total_allocation = 0.0;  // integral of allocation over busy time
    double completion_time = -1.0;  // < 0 while running

    bool complete() const { return completion_time >= 0.0; }
};

JobExecState make_exec_state(const MalleableJob& job);

// Parallelism available at span offset s into the job (piecewise constant).
double parallelism_at(const MalleableJob& job, double s);

// Run the job with constant allocation a for wall time dt. The execution rate
// is min(a, h) where h is the current curve segment; span advances at
// rate / h. Completion may cut the call short (wall_time < dt); a == 0 burns
// the whole interval without progress.
ExecDelta advance(JobExecState& st, const MalleableJob& job, double a, double dt);

// Fold per-interval deltas of one quantum. Average parallelism is work/span;
// a quantum with no span progress falls back to the desire held during it.
QuantumStats quantum_stats(const std::vector<ExecDelta>& deltas, double desire_held);

}  // namespace hsched
