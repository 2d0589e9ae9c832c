#include "hsched/policies.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hsched {

const char* policy_name(PolicyKind p) {
    switch (p) {
        case PolicyKind::AcDs: return "AC-DS";
        case PolicyKind::AgDs: return "AG-DS";
        case PolicyKind::EquiEqui: return "EQUI-EQUI";
    }
    return "?";
}

PolicyKind policy_from_name(const std::string& name) {
    if (name == "AC-DS") return PolicyKind::AcDs;
    if (name == "AG-DS") return PolicyKind::AgDs;
    if (name == "EQUI-EQUI") return PolicyKind::EquiEqui;
    throw std::invalid_argument("unknown policy: " + name);
}

double ac_desire(const QuantumStats* stats, double prev_desire) {
    if (!stats) return 1.0;
    (void)prev_desire;  // already folded into stats on zero-progress quanta
    return stats->avg_parallelism;
}

double ag_desire(const QuantumStats& stats, const AgState& st, double alloc, bool satisfied,
                 double quantum_len) {
    if (!satisfied) return st.prev_desire;
    bool efficient = stats.work >= st.utilization_threshold * alloc * quantum_len;
    double d = efficient ? st.prev_desire * st.multiplier : st.prev_desire / st.multiplier;
    return std::max(d, 1.0);
}

double ds_aggregate(const std::vector<double>& child_desires) {
    return std::accumulate(child_desires.begin(), child_desires.end(), 0.0);
}

int deq_allocate_core(std::span<const double> desires, double amount, std::span<double> out) {
    const int m = (int)desires.size();
    if ((int)out.size() != m) throw std::invalid_argument("deq_allocate_core: size mismatch");
    for (double d : desires)
        if (d < 0.0) throw std::domain_error("deq_allocate_core: negative desire");
    if (amount < 0.0) throw std::domain_error("deq_allocate_core: negative amount");

    std::fill(out.begin(), out.end(), 0.0);
    thread_local std::vector<int> open;
    open.clear();
    for (int i = 0; i < m; ++i) open.push_back(i);
    double budget = amount;
    int rounds = 0;

    while (!open.empty() && budget > 0.0) {
        ++rounds;
        double share = budget / (double)open.size();
        bool granted_below = false;
        size_t w = 0;
        for (size_t r = 0; r < open.size(); ++r) {
            int i = open[r];
            if (desires[i] <= share) {
                out[i] = desires[i];
                budget -= desires[i];
                granted_below = true;
            } else {
                open[w++] = i;
            }
        }
        open.resize(w);
        if (!granted_below) {
            // every open child wants at least the share: split evenly, done
            for (int i : open) out[i] = share;
            budget = 0.0;
            open.clear();
        }
        if (budget < 0.0) budget = 0.0;
        if (rounds > m + 1) throw std::logic_error("deq_allocate_core: round bound exceeded");
    }
    return rounds;
}

AllocationVector deq_allocate(const DesireMap& desires, double amount) {
    thread_local std::vector<double> d, a;
    thread_local std::vector<int> ids;
    d.clear();
    ids.clear();
    for (const auto& [id, des] : desires) {
        ids.push_back(id);
        d.push_back(des);
    }
    a.assign(d.size(), 0.0);
    deq_allocate_core(d, amount, a);
    AllocationVector out;
    for (size_t i = 0; i < ids.size(); ++i) out[ids[i]] = a[i];
    return out;
}

AllocationVector equi_allocate(const std::vector<int>& active_children, double amount) {
    if (amount < 0.0) throw std::domain_error("equi_allocate: negative amount");
    AllocationVector out;
    if (active_children.empty()) return out;
    double share = amount / (double)active_children.size();
    for (int id : active_children) out[id] = share;
    return out;
}

}  // namespace hsched
