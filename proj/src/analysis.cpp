#include "hsched/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace hsched {

double lower_bound(const std::vector<MalleableJob>& jobs, int processors) {
    if (processors < 1) throw std::invalid_argument("lower_bound: processors must be >= 1");
    double w = 0.0, rl = 0.0;
    for (const MalleableJob& j : jobs) {
        w += j.total_work();
        rl = std::max(rl, j.release + j.total_span());
    }
    return std::max(w / (double)processors, rl);
}

AllocationVector water_filling(const DesireMap& desires, double amount) {
    if (amount < 0.0) throw std::domain_error("water_filling: negative amount");
    std::vector<double> d;
    d.reserve(desires.size());
    double total = 0.0;
    for (const auto& [id, des] : desires) {
        if (des < 0.0) throw std::domain_error("water_filling: negative desire");
        d.push_back(des);
        total += des;
    }
    AllocationVector out;
    if (desires.empty()) return out;
    double level;
    if (total <= amount) {
        level = std::numeric_limits<double>::infinity();
    } else {
        std::sort(d.begin(), d.end());
        const int m = (int)d.size();
        double prefix = 0.0;
        level = 0.0;
        for (int k = 0; k < m; ++k) {
            level = (amount - prefix) / (double)(m - k);
            if (level <= d[k]) break;
            prefix += d[k];
        }
    }
    for (const auto& [id, des] : desires) out[id] = std::min(des, level);
    return out;
}

double measure_transition_factor(const Trace& trace) {
    std::map<int, std::vector<std::pair<std::int64_t, double>>> per_job;
    for (const JobRecord& r : trace.jobs) {
        double avg = r.span_done > 0.0 ? r.work_done / r.span_done : r.desire;
        per_job[r.job_id].push_back({r.quantum, avg});
    }
    double c = 1.0;
    for (auto& [id, recs] : per_job) {
        std::sort(recs.begin(), recs.end());
        for (size_t i = 1; i < recs.size(); ++i) {
            if (recs[i].first != recs[i - 1].first + 1) continue;
            double a = recs[i - 1].second, b = recs[i].second;
            if (a <= 0.0 || b <= 0.0) continue;
            double ratio = b / a;
            if (ratio < 1.0) ratio = 1.0 / ratio;
            c = std::max(c, ratio);
        }
    }
    return c;
}

BoundReport check_bounds(const SimConfig& cfg, const SimResult& result, double slack_quanta) {
    BoundReport rep;
    rep.transition_factor = result.transition_factor;
    rep.asserted = cfg.policy == PolicyKind::AcDs && cfg.quantum_factor == 1 &&
                   cfg.cost_factor == 0.0;
    if (result.jobs.empty()) return rep;

    const double c1 = result.transition_factor + 1.0;
    const double slack = slack_quanta * cfg.base_quantum;
    double total_w = 0.0;
    const JobOutcome* last = &result.jobs.front();
    for (const JobOutcome& j : result.jobs) {
        total_w += j.work;
        if (j.completion > last->completion) last = &j;
        if (j.span > 0.0) {
            rep.alpha = std::max(rep.alpha, j.satisfied_time / j.span);
            if (j.satisfied_time > c1 * j.span + slack) {
                rep.lemma_pass = false;
                rep.violations.push_back(j.job_id);
            }
        }
        if (j.work > 0.0) {
            rep.beta = std::max(rep.beta, j.total_allocation / j.work);
            if (j.total_allocation > c1 * j.work + slack * (double)cfg.total_processors) {
                rep.lemma_pass = false;
                rep.violations.push_back(j.job_id);
            }
        }
    }
    rep.makespan_bound = c1 * (last->release + last->span) +
                         c1 * total_w / (double)cfg.total_processors + slack;
    rep.theorem_pass = result.makespan <= rep.makespan_bound;
    return rep;
}

}  // namespace hsched
