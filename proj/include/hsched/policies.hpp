#pragma once

#include <map>
#include <span>
#include <vector>

#include "hsched/execution.hpp"

namespace hsched {

enum class PolicyKind { AcDs, AgDs, EquiEqui };

const char* policy_name(PolicyKind p);
PolicyKind policy_from_name(const std::string& name);

using DesireMap = std::map<int, double>;
using AllocationVector = std::map<int, double>;

// Feedback desire: first quantum requests 1, afterwards the average
// parallelism observed over the previous quantum (zero-progress quanta carry
// the previous desire forward via quantum_stats).
double ac_desire(const QuantumStats* stats, double prev_desire);

struct AgState {
    double prev_desire = 1.0;
    double utilization_threshold = 0.8;
    double multiplier = 2.0;
};

// Multiplicative feedback: deprived keeps the desire; a satisfied quantum
// doubles it when at least threshold * alloc * quantum_len work got done and
// halves it otherwise, floored at 1.
double ag_desire(const QuantumStats& stats, const AgState& st, double alloc, bool satisfied,
                 double quantum_len);

// An interior node's desire is the sum of its children's most recent ones.
double ds_aggregate(const std::vector<double>& child_desires);

// Equal-share allocation capped at desires: repeatedly split the remaining
// amount evenly over unsatisfied children, granting any child whose desire
// sits below the share exactly its desire. Leftover beyond total desire
// stays idle at the node. Children are processed in ascending id order.
AllocationVector deq_allocate(const DesireMap& desires, double amount);

// Core on index spans, shared with the simulation loop. Returns the number
// of refinement rounds taken (bounded by the child count).
int deq_allocate_core(std::span<const double> desires, double amount, std::span<double> out);

// Even split over children with unfinished jobs in their subtree.
AllocationVector equi_allocate(const std::vector<int>& active_children, double amount);

}  // namespace hsched
