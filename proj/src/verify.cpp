#include "hsched/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hsched/analysis.hpp"
#include "hsched/engine.hpp"
#include "hsched/sweep.hpp"
#include "hsched/util.hpp"
#include "hsched/workload.hpp"

namespace hsched {

SuiteResult deq_oracle_suite(int instances, std::uint64_t seed) {
    SuiteResult res{"deq-vs-water-filling", true, ""};
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int it = 0; it < instances; ++it) {
        int m = 1 + (int)bounded(rng, 50);
        DesireMap desires;
        for (int i = 0; i < m; ++i) desires[i] = uniform_in(rng, 0.0, 100.0);
        double amount = uniform_in(rng, 0.0, 200.0);
        AllocationVector got = deq_allocate(desires, amount);
        AllocationVector want = water_filling(desires, amount);
        for (const auto& [id, v] : want) {
            double diff = std::abs(got.at(id) - v);
            worst = std::max(worst, diff);
            if (diff > 1e-9) {
                res.pass = false;
                res.detail = "instance " + std::to_string(it) + " child " + std::to_string(id) +
                             " differs by " + format_double(diff);
                return res;
            }
        }
    }
    res.detail = std::to_string(instances) + " instances, max deviation " + format_double(worst);
    return res;
}

SuiteResult kinematics_suite(int jobs_n, std::uint64_t seed) {
    SuiteResult res{"kinematics", true, ""};
    WorkloadConfig wc;
    wc.job_count = jobs_n;
    wc.work_min = 20.0;
    wc.work_max = 400.0;
    wc.seed = seed;
    auto jobs = generate_workload(wc);
    double worst = 0.0;
    for (const MalleableJob& job : jobs) {
        double w = job.total_work(), l = job.total_span();
        double hmax = 0.0;
        for (const Phase& ph : job.phases)
            hmax = std::max(hmax, *std::max_element(ph.segments.begin(), ph.segments.end()));
        for (int mode = 0; mode < 2; ++mode) {
            double a = mode == 0 ? 1.0 : hmax + 1.0;
            double expect = mode == 0 ? w : l;
            JobExecState st = make_exec_state(job);
            double wall = 0.0;
            int guard = 1000000;
            while (!st.complete()) {
                ExecDelta d = advance(st, job, a, 1.0);
                wall += d.wall_time;
                if (d.completed) break;
                if (--guard <= 0) break;
            }
            double err = std::abs(wall - expect) / expect;
            worst = std::max(worst, err);
            if (err > 1e-6) {
                res.pass = false;
                res.detail = "job " + std::to_string(job.id) +
                             (mode == 0 ? " serial" : " fully fed") + " wall off by " +
                             format_double(err);
                return res;
            }
        }
    }
    res.detail = std::to_string(jobs_n) + " jobs, max relative error " + format_double(worst);
    return res;
}

SuiteResult bounds_suite(const std::vector<int>& levels, int seeds_per_level, int jobs_n,
                         std::uint64_t master) {
    SuiteResult res{"feedback-bounds", true, ""};
    int runs = 0, violations = 0;
    double max_c = 1.0, max_alpha = 0.0, max_beta = 0.0;
    for (int k : levels) {
        for (int s = 0; s < seeds_per_level; ++s) {
            WorkloadConfig wc;
            wc.job_count = jobs_n;
            wc.offered_load = std::max(jobs_n / 160.0, 1e-3);
            wc.seed = workload_seed(master, jobs_n, s);
            auto jobs = generate_workload(wc);

            SimConfig sc;
            sc.levels = k;
            sc.policy = PolicyKind::AcDs;
            sc.seed = sim_seed(master, k, jobs_n, s);
            std::mt19937_64 tree_rng(mix64(sc.seed ^ 0x7472656500ull));
            Hierarchy tree = generate_tree(sc, tree_rng);

            SimResult result = run(sc, jobs, tree);
            BoundReport br = check_bounds(sc, result);
            ++runs;
            max_c = std::max(max_c, br.transition_factor);
            max_alpha = std::max(max_alpha, br.alpha);
            max_beta = std::max(max_beta, br.beta);
            if (!br.lemma_pass || !br.theorem_pass) {
                ++violations;
                if (res.pass) {
                    res.pass = false;
                    res.detail = "K=" + std::to_string(k) + " seed " + std::to_string(s) +
                                 (br.lemma_pass ? " breaks the makespan envelope"
                                                : " breaks a per-job envelope");
                }
            }
        }
    }
    if (res.pass) {
        std::ostringstream os;
        os << runs << " runs within bounds, max c=" << format_double(max_c)
           << " alpha=" << format_double(max_alpha) << " beta=" << format_double(max_beta);
        res.detail = os.str();
    } else {
        res.detail += " (" + std::to_string(violations) + "/" + std::to_string(runs) + " bad)";
    }
    return res;
}

SuiteResult passthrough_suite(int seeds, int extra_levels, int jobs_n, std::uint64_t master) {
    SuiteResult res{"passthrough-equivalence", true, ""};
    double worst = 0.0;
    for (PolicyKind pol : {PolicyKind::AcDs, PolicyKind::AgDs}) {
        for (int s = 0; s < seeds; ++s) {
            WorkloadConfig wc;
            wc.job_count = jobs_n;
            wc.offered_load = std::max(jobs_n / 160.0, 1e-3);
            wc.seed = workload_seed(master, jobs_n, s);
            auto jobs = generate_workload(wc);

            SimConfig base_cfg;
            base_cfg.levels = 2;
            base_cfg.policy = pol;
            base_cfg.seed = sim_seed(master, 2, jobs_n, s);
            std::mt19937_64 tree_rng(mix64(base_cfg.seed ^ 0x7472656500ull));
            Hierarchy base_tree = generate_tree(base_cfg, tree_rng);

            SimConfig deep_cfg = base_cfg;
            deep_cfg.levels = 2 + extra_levels;
            Hierarchy deep_tree = passthrough_transform(base_tree, extra_levels);

            SimResult a = run(base_cfg, jobs, base_tree);
            SimResult b = run(deep_cfg, jobs, deep_tree);
            double diff = std::abs(a.makespan - b.makespan);
            for (size_t i = 0; i < a.jobs.size(); ++i)
                diff = std::max(diff, std::abs(a.jobs[i].completion - b.jobs[i].completion));
            worst = std::max(worst, diff);
            if (diff > 1e-9) {
                res.pass = false;
                res.detail = std::string(policy_name(pol)) + " seed " + std::to_string(s) +
                             " diverges by " + format_double(diff);
                return res;
            }
        }
    }
    res.detail = "max completion drift " + format_double(worst);
    return res;
}

std::vector<SuiteResult> builtin_suites() {
    std::vector<SuiteResult> out;
    out.push_back(deq_oracle_suite(2000, 1234));
    out.push_back(kinematics_suite(40, 77));
    out.push_back(bounds_suite({2, 3, 4, 5}, 3, 80, 9001));
    out.push_back(passthrough_suite(5, 3, 40, 4242));
    return out;
}

}  // namespace hsched
