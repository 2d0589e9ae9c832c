#include "hsched/engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>

#include "hsched/execution.hpp"
#include "hsched/util.hpp"

namespace hsched {

void SimConfig::validate() const {
    if (total_processors < 1) throw std::invalid_argument("sim config: total_processors must be >= 1");
    if (levels < 2) throw std::invalid_argument("sim config: levels must be >= 2");
    if (quantum_factor < 1) throw std::invalid_argument("sim config: quantum_factor must be >= 1");
    if (cost_factor < 0.0) throw std::invalid_argument("sim config: cost_factor must be >= 0");
    if (!(base_quantum > 0.0)) throw std::invalid_argument("sim config: base_quantum must be > 0");
    if (!(branch_min >= 1 && branch_min <= branch_max))
        throw std::invalid_argument("sim config: need 1 <= branch_min <= branch_max");
    if (!(ag_threshold > 0.0 && ag_threshold <= 1.0))
        throw std::invalid_argument("sim config: ag_threshold must be in (0, 1]");
    if (!(ag_multiplier > 1.0))
        throw std::invalid_argument("sim config: ag_multiplier must be > 1");
    std::int64_t p = 1;
    for (int k = 3; k <= levels; ++k) {
        p *= quantum_factor;
        if (p > (std::int64_t)1 << 40)
            throw std::invalid_argument("sim config: quantum_factor^levels overflows the schedule");
    }
}

double quantum_length(const SimConfig& cfg, int level) {
    cfg.validate();
    if (level < 2 || level > cfg.levels)
        throw std::invalid_argument("quantum_length: level outside [2, levels]");
    std::int64_t p = 1;
    for (int k = 3; k <= level; ++k) p *= cfg.quantum_factor;
    return (double)p * cfg.base_quantum;
}

Hierarchy generate_tree(const SimConfig& cfg, std::mt19937_64& rng) {
    cfg.validate();
    Hierarchy h;
    h.levels = cfg.levels;
    h.nodes.push_back(TreeNode{0, cfg.levels, -1, {}});
    h.root = 0;
    std::vector<int> frontier{0};
    while (!frontier.empty()) {
        std::vector<int> next;
        for (int nd : frontier) {
            if (h.nodes[nd].level == 2) {
                h.leaves.push_back(nd);
                continue;
            }
            int width = cfg.branch_min + (int)bounded(rng, (std::uint64_t)(cfg.branch_max - cfg.branch_min + 1));
            for (int c = 0; c < width; ++c) {
                int id = (int)h.nodes.size();
                h.nodes.push_back(TreeNode{id, h.nodes[nd].level - 1, nd, {}});
                h.nodes[nd].children.push_back(id);
                next.push_back(id);
            }
        }
        frontier = std::move(next);
    }
    return h;
}

Hierarchy passthrough_transform(const Hierarchy& base, int extra) {
    if (extra < 0) throw std::invalid_argument("passthrough_transform: extra must be >= 0");
    if (extra == 0) return base;
    Hierarchy out;
    out.levels = base.levels + extra;
    out.nodes = base.nodes;
    out.root = base.root;
    out.leaves = base.leaves;
    std::vector<char> is_leaf(out.nodes.size(), 0);
    for (int lf : base.leaves) is_leaf[lf] = 1;
    for (auto& nd : out.nodes)
        if (!is_leaf[nd.id]) nd.level += extra;
    for (int lf : base.leaves) {
        int parent = out.nodes[lf].parent;
        int prev = parent;
        for (int j = 0; j < extra; ++j) {
            int id = (int)out.nodes.size();
            out.nodes.push_back(TreeNode{id, 2 + extra - j, prev, {}});
            if (j == 0) {
                if (parent >= 0) {
                    for (int& c : out.nodes[parent].children)
                        if (c == lf) c = id;
                } else {
                    out.root = id;
                }
            } else {
                out.nodes[prev].children.push_back(id);
            }
            prev = id;
        }
        out.nodes[prev].children.push_back(lf);
        out.nodes[lf].parent = prev;
    }
    return out;
}

Metrics compute_metrics(const SimResult& result, const SimConfig& cfg) {
    Metrics m;
    if (result.jobs.empty()) return m;
    double makespan = 0.0, r0 = result.jobs.front().release, w = 0.0;
    for (const JobOutcome& j : result.jobs) {
        makespan = std::max(makespan, j.completion);
        r0 = std::min(r0, j.release);
        w += j.work;
    }
    m.makespan = makespan;
    m.utilization = makespan > r0 ? w / ((double)cfg.total_processors * (makespan - r0)) : 1.0;
    return m;
}

std::map<int, double> apply_reallocation_delay(const AllocationVector& prev,
                                               const AllocationVector& next,
                                               const SimConfig& cfg) {
    std::map<int, double> cost;
    if (cfg.cost_factor <= 0.0) return cost;
    for (const auto& [id, old_a] : prev) {
        auto it = next.find(id);
        double new_a = it == next.end() ? 0.0 : it->second;
        double dec = old_a - new_a;
        if (dec > 0.0) cost[id] = dec * cfg.base_quantum * cfg.cost_factor;
    }
    return cost;
}

namespace {

void validate_tree(const SimConfig& cfg, const Hierarchy& tree) {
    const int m = (int)tree.nodes.size();
    if (m == 0 || tree.root < 0 || tree.root >= m)
        throw std::invalid_argument("run: hierarchy has no valid root");
    if (tree.levels != cfg.levels)
        throw std::invalid_argument("run: hierarchy depth disagrees with sim config levels");
    if (tree.leaves.empty()) throw std::invalid_argument("run: hierarchy has no leaves");
    if (tree.nodes[tree.root].level != cfg.levels || tree.nodes[tree.root].parent != -1)
        throw std::invalid_argument("run: root must sit at the top level with no parent");
    for (const TreeNode& nd : tree.nodes) {
        if (nd.id < 0 || nd.id >= m || tree.nodes[nd.id].id != nd.id)
            throw std::invalid_argument("run: node ids must be dense and self-consistent");
        for (int c : nd.children) {
            if (c < 0 || c >= m || tree.nodes[c].parent != nd.id ||
                tree.nodes[c].level != nd.level - 1)
                throw std::invalid_argument("run: child/parent levels are inconsistent");
        }
        if (nd.level == 2 && !nd.children.empty())
            throw std::invalid_argument("run: leaves must not have children");
        if (nd.level > 2 && nd.children.empty())
            throw std::invalid_argument("run: interior node without children");
    }
    for (int lf : tree.leaves)
        if (lf < 0 || lf >= m || tree.nodes[lf].level != 2)
            throw std::invalid_argument("run: leaf list must reference level-2 nodes");
}

struct RunJob {
    const MalleableJob* job = nullptr;
    JobExecState st;
    int leaf = -1;
    double prev_avg = -1.0;  // last reported quantum parallelism
    double cfac = 1.0;
    QuantumStats last;
    bool has_last = false;
    double last_alloc = 0.0;
    bool last_satisfied = false;
    double prev_step_alloc = 0.0;
    bool attached = false;
};

}  // namespace

SimResult run(const SimConfig& cfg, const std::vector<MalleableJob>& jobs,
              const Hierarchy& tree, Trace* trace) {
    cfg.validate();
    validate_tree(cfg, tree);

    const double L = cfg.base_quantum;
    const double P = (double)cfg.total_processors;
    const int K = cfg.levels;
    const int m = (int)tree.nodes.size();
    const int n = (int)jobs.size();
    const bool equi = cfg.policy == PolicyKind::EquiEqui;
    const double transit = cfg.cost_factor > 0.0 ? std::min(cfg.cost_factor * L, L) : 0.0;

    {
        std::set<int> ids;
        for (const auto& j : jobs)
            if (!ids.insert(j.id).second)
                throw std::invalid_argument("run: duplicate job id " + std::to_string(j.id));
    }

    std::vector<std::vector<int>> by_level(K + 1);
    for (const TreeNode& nd : tree.nodes) by_level[nd.level].push_back(nd.id);
    for (auto& v : by_level) std::sort(v.begin(), v.end());

    std::vector<std::int64_t> period(K + 1, 1);
    for (int k = 3; k <= K; ++k) period[k] = period[k - 1] * cfg.quantum_factor;

    std::vector<double> ndesire(m, 0.0), namount(m, 0.0), ndelay(m, 0.0);
    std::vector<int> nactive(m, 0);
    std::vector<std::vector<int>> leaf_jobs(m);
    namount[tree.root] = P;

    std::vector<RunJob> rj(n);
    double total_w = 0.0, total_l = 0.0, rmax = 0.0;
    for (int i = 0; i < n; ++i) {
        rj[i].job = &jobs[i];
        rj[i].st = make_exec_state(jobs[i]);
        total_w += rj[i].st.initial_work;
        total_l += jobs[i].total_span();
        rmax = std::max(rmax, jobs[i].release);
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (jobs[a].release != jobs[b].release) return jobs[a].release < jobs[b].release;
        return jobs[a].id < jobs[b].id;
    });

    std::mt19937_64 rng(cfg.seed);
    std::vector<int> alive;
    std::vector<std::pair<int, double>> freed;  // (leaf, allocation) from completions
    std::vector<double> sd, sa;
    std::vector<int> done_now;
    int next_rel = 0;
    std::int64_t step = 0;
    const std::int64_t max_steps =
        (std::int64_t)(4.0 * (rmax + total_w + total_l) / L) + 1024;

    while (next_rel < n || !alive.empty()) {
        if (step > max_steps) throw std::logic_error("run: simulation failed to terminate");
        const double t = (double)step * L;

        // arrivals attach to a uniform-random leaf with desire 1
        while (next_rel < n) {
            int j = order[next_rel];
            if (jobs[j].release > t + 1e-9 * L) break;
            RunJob& r = rj[j];
            r.attached = true;
            r.st.desire = 1.0;
            r.st.deprived_time += std::max(0.0, t - jobs[j].release);
            r.leaf = tree.leaves[bounded(rng, tree.leaves.size())];
            auto& lj = leaf_jobs[r.leaf];
            lj.insert(std::upper_bound(lj.begin(), lj.end(), j,
                                       [&](int a, int b) { return jobs[a].id < jobs[b].id; }),
                      j);
            for (int nd = r.leaf; nd != -1; nd = tree.nodes[nd].parent) ++nactive[nd];
            alive.push_back(j);
            ++next_rel;
        }

        // desire feedback from the previous quantum
        for (int j : alive) {
            RunJob& r = rj[j];
            if (!r.has_last) continue;
            if (cfg.policy == PolicyKind::AgDs) {
                AgState ag{r.st.desire, cfg.ag_threshold, cfg.ag_multiplier};
                r.st.desire = ag_desire(r.last, ag, r.last_alloc, r.last_satisfied, L);
            } else {
                r.st.desire = ac_desire(&r.last, r.st.desire);
            }
        }

        // levels whose quantum expires now; always a prefix {2..kmax}
        int kmax = 2;
        for (int k = 3; k <= K; ++k) {
            if (step % period[k] != 0) break;
            kmax = k;
        }

        // desires up
        for (int k = 2; k <= kmax; ++k) {
            for (int nd : by_level[k]) {
                double s = 0.0;
                if (k == 2)
                    for (int j : leaf_jobs[nd]) s += rj[j].st.desire;
                else
                    for (int c : tree.nodes[nd].children) s += ndesire[c];
                ndesire[nd] = s;
            }
        }

        // allocations down
        for (int k = kmax; k >= 2; --k) {
            for (int nd : by_level[k]) {
                const double amount = namount[nd];
                if (k == 2) {
                    auto& js = leaf_jobs[nd];
                    if (js.empty()) continue;
                    if (equi) {
                        double share = amount / (double)js.size();
                        for (int j : js) rj[j].st.allocation = share;
                    } else {
                        sd.clear();
                        for (int j : js) sd.push_back(rj[j].st.desire);
                        sa.assign(js.size(), 0.0);
                        deq_allocate_core(sd, amount, sa);
                        for (size_t i = 0; i < js.size(); ++i) rj[js[i]].st.allocation = sa[i];
                    }
                } else {
                    auto& ch = tree.nodes[nd].children;
                    if (equi) {
                        int nact = 0;
                        for (int c : ch) nact += nactive[c] > 0 ? 1 : 0;
                        double share = nact > 0 ? amount / (double)nact : 0.0;
                        for (int c : ch) namount[c] = nactive[c] > 0 ? share : 0.0;
                    } else {
                        sd.clear();
                        for (int c : ch) sd.push_back(ndesire[c]);
                        sa.assign(ch.size(), 0.0);
                        deq_allocate_core(sd, amount, sa);
                        for (size_t i = 0; i < ch.size(); ++i) namount[ch[i]] = sa[i];
                    }
                }
            }
        }

        // reallocation costs land on the leaf that lost the processors
        if (cfg.cost_factor > 0.0) {
            for (auto& [leaf, a] : freed) ndelay[leaf] += a * L * cfg.cost_factor;
            freed.clear();
            for (int j : alive) {
                RunJob& r = rj[j];
                double dec = r.prev_step_alloc - r.st.allocation;
                if (dec > 0.0) ndelay[r.leaf] += dec * L * cfg.cost_factor;
            }
        }

        // run every job for one base quantum; processors that just moved in
        // sit out the transit window first
        done_now.clear();
        for (int j : alive) {
            RunJob& r = rj[j];
            const double a = r.st.allocation;
            const double moved_in = std::max(0.0, a - r.prev_step_alloc);
            std::array<ExecDelta, 2> deltas;
            int nd_ = 0;
            if (transit > 0.0 && moved_in > 0.0) {
                if (transit < L) {
                    deltas[nd_++] = advance(r.st, *r.job, a - moved_in, transit);
                    if (!deltas[0].completed)
                        deltas[nd_++] = advance(r.st, *r.job, a, L - transit);
                } else {
                    deltas[nd_++] = advance(r.st, *r.job, a - moved_in, L);
                }
            } else {
                deltas[nd_++] = advance(r.st, *r.job, a, L);
            }
            double consumed = 0.0;
            for (int i = 0; i < nd_; ++i) consumed += deltas[i].wall_time;
            const bool completed = deltas[nd_ - 1].completed;
            const bool satisfied = a + 1e-9 >= r.st.desire;
            (satisfied ? r.st.satisfied_time : r.st.deprived_time) += consumed;
            r.st.total_allocation += a * consumed;
            QuantumStats qs;
            for (int i = 0; i < nd_; ++i) {
                qs.work += deltas[i].work_done;
                qs.span += deltas[i].span_done;
            }
            qs.avg_parallelism = qs.span > 0.0 ? qs.work / qs.span : r.st.desire;
            if (r.prev_avg > 0.0) {
                double ratio = qs.avg_parallelism / r.prev_avg;
                if (ratio < 1.0) ratio = 1.0 / ratio;
                r.cfac = std::max(r.cfac, ratio);
            }
            r.prev_avg = qs.avg_parallelism;
            r.last = qs;
            r.has_last = true;
            r.last_alloc = a;
            r.last_satisfied = satisfied;
            if (trace)
                trace->jobs.push_back(
                    {step, r.job->id, r.st.desire, a, qs.work, qs.span, satisfied});
            if (completed) {
                r.st.completion_time = t + consumed;
                done_now.push_back(j);
                freed.push_back({r.leaf, a});
                r.prev_step_alloc = 0.0;
            } else {
                r.prev_step_alloc = a;
            }
        }

        for (int j : done_now) {
            RunJob& r = rj[j];
            auto& lj = leaf_jobs[r.leaf];
            lj.erase(std::find(lj.begin(), lj.end(), j));
            for (int nd = r.leaf; nd != -1; nd = tree.nodes[nd].parent) --nactive[nd];
            alive.erase(std::find(alive.begin(), alive.end(), j));
        }

        // expiring nodes report and hand accumulated move costs upward
        for (int k = 2; k <= kmax; ++k) {
            for (int nd : by_level[k]) {
                if (trace)
                    trace->nodes.push_back({step, nd, ndesire[nd], namount[nd], ndelay[nd]});
                int par = tree.nodes[nd].parent;
                if (par != -1) ndelay[par] += ndelay[nd];
                ndelay[nd] = 0.0;
            }
        }

        ++step;
    }

    SimResult res;
    res.quanta = step;
    res.jobs.reserve(n);
    for (int i = 0; i < n; ++i) {
        const RunJob& r = rj[i];
        JobOutcome o;
        o.job_id = jobs[i].id;
        o.release = jobs[i].release;
        o.work = r.st.initial_work;
        o.span = jobs[i].total_span();
        o.completion = r.st.completion_time;
        o.satisfied_time = r.st.satisfied_time;
        o.deprived_time = r.st.deprived_time;
        o.total_allocation = r.st.total_allocation;
        o.transition_factor = r.cfac;
        res.jobs.push_back(o);
        res.transition_factor = std::max(res.transition_factor, r.cfac);
    }
    Metrics mt = compute_metrics(res, cfg);
    res.makespan = mt.makespan;
    res.utilization = mt.utilization;
    return res;
}

void write_trace(std::ostream& out, const Trace& trace) {
    out << "# hierarchical scheduling trace\n";
    out << "# job <quantum> <job_id> <desire> <allocation> <work> <span> <satisfied>\n";
    out << "# node <quantum> <node_id> <desire> <allocation> <delay>\n";
    for (const JobRecord& r : trace.jobs) {
        out << "job " << r.quantum << ' ' << r.job_id << ' ' << format_double(r.desire) << ' '
            << format_double(r.allocation) << ' ' << format_double(r.work_done) << ' '
            << format_double(r.span_done) << ' ' << (r.satisfied ? 1 : 0) << '\n';
    }
    for (const NodeRecord& r : trace.nodes) {
        out << "node " << r.quantum << ' ' << r.node_id << ' ' << format_double(r.desire) << ' '
            << format_double(r.allocation) << ' ' << format_double(r.realloc_delay) << '\n';
    }
}

}  // namespace hsched
