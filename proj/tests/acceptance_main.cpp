// Acceptance gate: ten pinned behavioral criteria, one pass/fail line each.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hsched/analysis.hpp"
#include "hsched/engine.hpp"
#include "hsched/sweep.hpp"
#include "hsched/util.hpp"
#include "hsched/verify.hpp"
#include "hsched/workload.hpp"

using namespace hsched;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fixed_str(double x, int digits) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << x;
    return os.str();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

// One feedback run under the sweep seeding conventions.
struct EnvelopeRun {
    BoundReport report;
    double makespan = 0.0;
};

EnvelopeRun envelope_run(std::uint64_t master, int levels, int n, int rep) {
    WorkloadConfig wc;
    wc.job_count = n;
    wc.offered_load = std::max(n / 160.0, 1e-3);
    wc.seed = workload_seed(master, n, rep);
    std::vector<MalleableJob> jobs = generate_workload(wc);

    SimConfig sc;
    sc.levels = levels;
    sc.policy = PolicyKind::AcDs;
    sc.seed = sim_seed(master, levels, n, rep);
    std::mt19937_64 tree_rng(mix64(sc.seed ^ 0x7472656500ull));
    Hierarchy tree = generate_tree(sc, tree_rng);

    SimResult res = run(sc, jobs, tree);
    return {check_bounds(sc, res), res.makespan};
}

// 52 feedback runs shared by the per-job and makespan envelope criteria.
const std::vector<EnvelopeRun>& envelope_runs() {
    static const std::vector<EnvelopeRun> runs = [] {
        std::vector<EnvelopeRun> out;
        for (int k = 2; k <= 5; ++k)
            for (int rep = 0; rep < 13; ++rep) out.push_back(envelope_run(20260822ull, k, 80, rep));
        return out;
    }();
    return runs;
}

Outcome c1_allocation_oracle() {
    auto t0 = Clock::now();
    SuiteResult s = deq_oracle_suite(10000, 1234);
    double dt = seconds_since(t0);
    bool pass = s.pass && dt < 5.0;
    return {pass, s.detail + ", " + fixed_str(dt, 2) + "s against a 5s budget"};
}

Outcome c2_per_job_envelopes() {
    int bad_jobs = 0, bad_runs = 0;
    double cmax = 1.0, amax = 0.0, bmax = 0.0;
    for (const EnvelopeRun& r : envelope_runs()) {
        if (!r.report.lemma_pass) {
            ++bad_runs;
            bad_jobs += (int)r.report.violations.size();
        }
        cmax = std::max(cmax, r.report.transition_factor);
        amax = std::max(amax, r.report.alpha);
        bmax = std::max(bmax, r.report.beta);
    }
    std::ostringstream os;
    os << envelope_runs().size() << " runs, " << bad_jobs << " violating jobs in " << bad_runs
       << " runs; max c=" << fixed_str(cmax, 1) << " alpha=" << fixed_str(amax, 2)
       << " beta=" << fixed_str(bmax, 2);
    return {bad_jobs == 0 && bad_runs == 0, os.str()};
}

Outcome c3_makespan_envelope() {
    int bad_runs = 0;
    double worst = 0.0;
    for (const EnvelopeRun& r : envelope_runs()) {
        if (!r.report.theorem_pass) ++bad_runs;
        if (r.report.makespan_bound > 0.0)
            worst = std::max(worst, r.makespan / r.report.makespan_bound);
    }
    std::ostringstream os;
    os << envelope_runs().size() << " runs, " << bad_runs
       << " above the bound; worst makespan/bound=" << fixed_str(worst, 3);
    return {bad_runs == 0, os.str()};
}

Outcome c4_depth_insensitivity() {
    ExperimentSpec spec;
    spec.policies = {PolicyKind::AcDs};
    spec.levels = {2, 3, 4, 5};
    spec.job_counts = {80, 160, 240};
    spec.repetitions = 10;
    spec.master_seed = 424242;
    ResultTable table = run_sweep(spec, ExecMode::Parallel);
    if (!table.errors.empty()) return {false, "sweep errors: " + table.errors.front()};

    std::map<int, std::vector<double>> by_n;
    for (const ResultRow& r : table.rows) by_n[r.jobs].push_back(r.makespan);
    double worst_cv = 0.0;
    int worst_n = 0;
    for (const auto& [n, ms] : by_n) {
        if (ms.size() != spec.levels.size()) return {false, "missing depth rows"};
        double mean = 0.0;
        for (double m : ms) mean += m;
        mean /= (double)ms.size();
        double var = 0.0;
        for (double m : ms) var += (m - mean) * (m - mean);
        double cv = std::sqrt(var / (double)ms.size()) / mean;
        if (cv > worst_cv) {
            worst_cv = cv;
            worst_n = n;
        }
    }
    std::ostringstream os;
    os << "depths 2..5, worst CV " << fixed_str(worst_cv * 100.0, 2) << "% at n=" << worst_n
       << " against a 5% cap";
    return {worst_cv <= 0.05, os.str()};
}

Outcome c5_passthrough_invariance() {
    SuiteResult s = passthrough_suite(20, 3, 40, 4242);
    return {s.pass, s.detail};
}

struct LoadCurve {
    std::map<int, double> util_feedback, util_even, ratio;
    std::string error;
};

// Feedback vs even split over the load axis, shared by the utilization and
// makespan ordering criteria.
const LoadCurve& load_curve() {
    static const LoadCurve curve = [] {
        ExperimentSpec spec;
        spec.policies = {PolicyKind::AcDs, PolicyKind::EquiEqui};
        spec.levels = {3};
        spec.job_counts = {40, 120, 200, 280, 360};
        spec.repetitions = 10;
        spec.master_seed = 67676;
        ResultTable table = run_sweep(spec, ExecMode::Parallel);
        LoadCurve out;
        if (!table.errors.empty()) {
            out.error = table.errors.front();
            return out;
        }
        for (const ResultRow& r : table.rows) {
            if (r.policy == PolicyKind::AcDs) {
                out.util_feedback[r.jobs] = r.utilization;
                out.ratio[r.jobs] = r.makespan_ratio;
            } else {
                out.util_even[r.jobs] = r.utilization;
            }
        }
        return out;
    }();
    return curve;
}

Outcome c6_utilization() {
    const LoadCurve& lc = load_curve();
    if (!lc.error.empty()) return {false, "sweep errors: " + lc.error};
    bool pass = true;
    std::ostringstream os;
    os << "util";
    for (int n : {200, 280, 360}) {
        double u = lc.util_feedback.at(n);
        os << " n" << n << "=" << fixed_str(u, 3);
        if (u < 0.80) pass = false;
    }
    os << " (floor 0.80); feedback minus even split";
    for (int n : {120, 200, 280}) {
        double gap = lc.util_feedback.at(n) - lc.util_even.at(n);
        os << " n" << n << "=" << fixed_str(gap, 3);
        if (gap < 0.0) pass = false;
    }
    os << "; n40 gap=" << fixed_str(lc.util_feedback.at(40) - lc.util_even.at(40), 3)
       << " reported only";
    return {pass, os.str()};
}

Outcome c7_makespan_ordering() {
    const LoadCurve& lc = load_curve();
    if (!lc.error.empty()) return {false, "sweep errors: " + lc.error};
    bool pass = true;
    std::ostringstream os;
    os << "even/feedback makespan ratio";
    for (int n : {120, 200, 280, 360}) {
        double r = lc.ratio.at(n);
        os << " n" << n << "=" << fixed_str(r, 3);
        if (r < 1.0) pass = false;
    }
    os << " (floor 1.0); n40=" << fixed_str(lc.ratio.at(40), 3) << " may dip";
    return {pass, os.str()};
}

Outcome c8_quantum_cost_tradeoff() {
    // Deep tree at heavy load: the regime where quantum granularity and move
    // cost push hardest in opposite directions.
    ExperimentSpec spec;
    spec.policies = {PolicyKind::AcDs, PolicyKind::EquiEqui};
    spec.levels = {5};
    spec.quantum_factors = {1, 2, 4, 6};
    spec.cost_factors = {0.0, 0.1};
    spec.job_counts = {300};
    spec.repetitions = 10;
    spec.master_seed = 88888;
    ResultTable table = run_sweep(spec, ExecMode::Parallel);
    if (!table.errors.empty()) return {false, "sweep errors: " + table.errors.front()};

    std::map<std::pair<double, int>, double> ratio;  // (cf, qf) -> even/feedback makespan
    for (const ResultRow& r : table.rows)
        if (r.policy == PolicyKind::AcDs) ratio[{r.cost_factor, r.quantum_factor}] = r.makespan_ratio;

    int best_qf = 1;
    double best = -1.0;
    std::ostringstream os;
    os << "free moves QF1=" << fixed_str(ratio.at({0.0, 1}), 3)
       << " QF6=" << fixed_str(ratio.at({0.0, 6}), 3) << "; costly moves";
    for (int qf : spec.quantum_factors) {
        double r = ratio.at({0.1, qf});
        os << " QF" << qf << "=" << fixed_str(r, 3);
        if (r > best) {
            best = r;
            best_qf = qf;
        }
    }
    os << ", best QF=" << best_qf;
    bool pass = ratio.at({0.0, 1}) > ratio.at({0.0, 6}) && best_qf > 1;
    return {pass, os.str()};
}

Outcome c9_kinematics() {
    SuiteResult s = kinematics_suite(100, 55);
    return {s.pass, s.detail};
}

Outcome c10_determinism() {
    ExperimentSpec spec;
    spec.policies = {PolicyKind::AcDs, PolicyKind::AgDs};
    spec.levels = {2, 3};
    spec.job_counts = {24};
    spec.repetitions = 2;
    spec.master_seed = 31337;
    std::string first = csv_string(run_sweep(spec, ExecMode::Parallel));
    std::string repeat = csv_string(run_sweep(spec, ExecMode::Parallel));
    std::string serial = csv_string(run_sweep(spec, ExecMode::Serial));
    bool pass = first == repeat && first == serial;
    std::ostringstream os;
    os << first.size() << " bytes; parallel repeat " << (first == repeat ? "identical" : "differs")
       << ", serial " << (first == serial ? "identical" : "differs");
    return {pass, os.str()};
}

}  // namespace

int main() {
    struct Criterion {
        const char* id;
        const char* label;
        std::function<Outcome()> fn;
    };
    const std::vector<Criterion> criteria = {
        {"C1", "equal share allocation matches the water filling oracle", c1_allocation_oracle},
        {"C2", "satisfied time and allocated area stay inside their envelopes",
         c2_per_job_envelopes},
        {"C3", "makespan stays inside its envelope", c3_makespan_envelope},
        {"C4", "makespan is insensitive to tree depth", c4_depth_insensitivity},
        {"C5", "pass-through levels leave schedules unchanged", c5_passthrough_invariance},
        {"C6", "feedback scheduling sustains high utilization under load", c6_utilization},
        {"C7", "feedback beats even splitting at scale", c7_makespan_ordering},
        {"C8", "coarse quanta only pay off when moves cost", c8_quantum_cost_tradeoff},
        {"C9", "execution kinematics match the closed forms", c9_kinematics},
        {"C10", "sweeps are byte deterministic", c10_determinism},
    };

    int failed = 0;
    for (const Criterion& c : criteria) {
        auto t0 = Clock::now();
        Outcome oc;
        try {
            oc = c.fn();
        } catch (const std::exception& e) {
            oc = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (oc.pass ? "[PASS] " : "[FAIL] ") << c.id << " " << c.label << " ("
                  << oc.detail << "; " << fixed_str(seconds_since(t0), 1) << "s)" << std::endl;
        if (!oc.pass) ++failed;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed"
              << std::endl;
    return failed == 0 ? 0 : 1;
}
