#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <random>
#include <vector>

#include "hsched/policies.hpp"
#include "hsched/workload.hpp"

namespace hsched {

struct TreeNode {
    int id = 0;
    int level = 2;    // leaves sit at level 2, the root at level K
    int parent = -1;  // -1 for the root
    std::vector<int> children;
};

struct Hierarchy {
    std::vector<TreeNode> nodes;
    int root = 0;
    int levels = 2;
    std::vector<int> leaves;  // level-2 node ids; jobs attach here
};

struct SimConfig {
    int total_processors = 256;
    int levels = 2;            // K
    int quantum_factor = 1;    // QF; level k redecides every QF^(k-2) base quanta
    double cost_factor = 0.0;  // CF; a moved processor is unavailable CF * L
    double base_quantum = 1.0; // L
    PolicyKind policy = PolicyKind::AcDs;
    int branch_min = 1;
    int branch_max = 5;
    std::uint64_t seed = 0;    // tree shape and leaf attachment
    double ag_threshold = 0.8;
    double ag_multiplier = 2.0;

    void validate() const;
};

// Base quanta between allocation decisions at a level: QF^(level-2) * L.
double quantum_length(const SimConfig& cfg, int level);

Hierarchy generate_tree(const SimConfig& cfg, std::mt19937_64& rng);

// Splice `extra` single-child pass-through nodes above every leaf, deepening
// the tree by `extra` levels while leaving leaves and their order untouched.
Hierarchy passthrough_transform(const Hierarchy& base, int extra);

struct JobOutcome {
    int job_id = -1;
    double release = 0.0;
    double work = 0.0;
    double span = 0.0;
    double completion = 0.0;
    double satisfied_time = 0.0;
    double deprived_time = 0.0;
    double total_allocation = 0.0;
    double transition_factor = 1.0;  // max adjacent-quantum parallelism ratio
};

struct NodeRecord {
    std::int64_t quantum = 0;
    int node_id = 0;
    double desire = 0.0;
    double allocation = 0.0;
    double realloc_delay = 0.0;  // summed child move costs at this node's expiry
};

struct JobRecord {
    std::int64_t quantum = 0;
    int job_id = 0;
    double desire = 0.0;
    double allocation = 0.0;
    double work_done = 0.0;
    double span_done = 0.0;
    bool satisfied = false;
};

struct Trace {
    std::vector<NodeRecord> nodes;
    std::vector<JobRecord> jobs;
};

struct SimResult {
    double makespan = 0.0;
    double utilization = 1.0;
    double transition_factor = 1.0;  // max over jobs
    std::int64_t quanta = 0;
    std::vector<JobOutcome> jobs;
};

struct Metrics {
    double makespan = 0.0;
    double utilization = 1.0;
};

// makespan = last completion; utilization = total work / (P * (makespan -
// first release)).
Metrics compute_metrics(const SimResult& result, const SimConfig& cfg);

// Move costs keyed by child id: a child whose allocation dropped by x is
// charged x * L * CF; the moved processors also sit out CF * L at their
// destination before the new allocation takes effect.
std::map<int, double> apply_reallocation_delay(const AllocationVector& prev,
                                               const AllocationVector& next,
                                               const SimConfig& cfg);

// Run the full simulation: jobs attach to a uniform-random leaf on release,
// desires flow up and allocations flow down at each level's quantum expiry,
// and every job advances each base quantum under its current allocation.
SimResult run(const SimConfig& cfg, const std::vector<MalleableJob>& jobs,
              const Hierarchy& tree, Trace* trace = nullptr);

void write_trace(std::ostream& out, const Trace& trace);

}  // namespace hsched
